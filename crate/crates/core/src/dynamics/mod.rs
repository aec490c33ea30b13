//! Endomorphisms of products of projective spaces: evaluation, orbits,
//! pullback actions, dynamical degrees and Lyapunov multipliers.

pub mod degrees;
pub mod mpoly;
pub mod orbit;
pub mod point;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::{AlgebraError, Matrix, Polynomial};
use crate::geometry::{GeometryError, ProductSpace};

pub use degrees::{
    dynamical_degree, dynamical_degrees, intersection_growth_estimate, lyapunov_multipliers,
    multipliers_via_big_cone, pullback_on_graded, pullback_on_n1, GrowthTable,
};
pub use mpoly::{format_poly, MultiPoly};
pub use orbit::{iterate, iterate_partial, FactorHeight, OrbitRecord, StopReason};
pub use point::ProjPoint;

/// Default total decimal-digit budget for orbit iteration.
pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;
/// Default number of iteration steps.
pub const DEFAULT_N_MAX: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("expected {expected} blocks, found {found}")]
    BlockCount { expected: usize, found: usize },
    #[error("block {block} has {found} components, expected {expected}")]
    BlockShape { block: usize, expected: usize, found: usize },
    #[error("polynomial in block {block} uses {found} variables, expected {expected}")]
    VariableCount { block: usize, expected: usize, found: usize },
    #[error("block {0} is identically zero")]
    ZeroBlock(usize),
    #[error("block {block} is not multihomogeneous in factor {factor}")]
    NotMultihomogeneous { block: usize, factor: usize },
    #[error("block {0} is constant (its multidegree row is zero)")]
    ConstantBlock(usize),
    #[error("the map has degree 0 on the top cohomology, so it is not surjective")]
    NotSurjective,
    #[error("block {0}: the components share a common zero (resultant is 0)")]
    NotAMorphism(usize),
    #[error("point does not lie on {0}")]
    PointShape(String),
    #[error("factor {0} of the point is the zero vector")]
    ZeroPoint(usize),
    #[error("indeterminacy: block {block} vanishes identically at step {step}")]
    Indeterminacy { step: usize, block: usize },
    #[error("the maps live on different spaces")]
    SpaceMismatch,
}

/// A multihomogeneous self-map of a product of projective spaces, given by
/// one block of `n_j + 1` polynomials per factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Endomorphism {
    space: ProductSpace,
    blocks: Vec<Vec<MultiPoly<BigRational>>>,
    int_blocks: Vec<Vec<MultiPoly<BigInt>>>,
    degrees: Vec<Vec<u32>>,
    // nonzero multiple of every gcd of the block's values at primitive points
    gcd_bounds: Vec<Option<BigInt>>,
}

impl Endomorphism {
    /// Validated morphism. Blocks on a single `P^1` factor are certified
    /// base-point free via the binary resultant.
    pub fn new(space: ProductSpace, blocks: Vec<Vec<MultiPoly<BigRational>>>) -> Result<Self, DynamicsError> {
        let f = Self::new_rational_map(space, blocks)?;
        for (j, b) in f.gcd_bounds.iter().enumerate() {
            if matches!(b, Some(r) if r.is_zero()) {
                return Err(DynamicsError::NotAMorphism(j));
            }
        }
        Ok(f)
    }

    /// Structural validation only; a common zero of a block shows up as
    /// [`DynamicsError::Indeterminacy`] during evaluation.
    pub fn new_rational_map(
        space: ProductSpace,
        blocks: Vec<Vec<MultiPoly<BigRational>>>,
    ) -> Result<Self, DynamicsError> {
        let k = space.factors();
        if blocks.len() != k {
            return Err(DynamicsError::BlockCount { expected: k, found: blocks.len() });
        }
        let nv = space.num_vars();
        let mut degrees = Vec::with_capacity(k);
        for (j, block) in blocks.iter().enumerate() {
            let want = space.dims()[j] + 1;
            if block.len() != want {
                return Err(DynamicsError::BlockShape { block: j, expected: want, found: block.len() });
            }
            if let Some(p) = block.iter().find(|p| p.nvars() != nv) {
                return Err(DynamicsError::VariableCount { block: j, expected: nv, found: p.nvars() });
            }
            if block.iter().all(|p| p.is_zero()) {
                return Err(DynamicsError::ZeroBlock(j));
            }
            let mut row = Vec::with_capacity(k);
            for l in 0..k {
                let off = space.var_offset(l);
                let group = off..off + space.dims()[l] + 1;
                let mut deg = None;
                for p in block.iter().filter(|p| !p.is_zero()) {
                    match (deg, p.group_degree(group.clone())) {
                        (_, None) => return Err(DynamicsError::NotMultihomogeneous { block: j, factor: l }),
                        (None, Some(d)) => deg = Some(d),
                        (Some(a), Some(b)) if a != b => {
                            return Err(DynamicsError::NotMultihomogeneous { block: j, factor: l })
                        }
                        _ => {}
                    }
                }
                row.push(deg.unwrap_or(0));
            }
            if row.iter().all(|&d| d == 0) {
                return Err(DynamicsError::ConstantBlock(j));
            }
            degrees.push(row);
        }
        let int_blocks: Vec<Vec<MultiPoly<BigInt>>> = blocks
            .iter()
            .map(|b| {
                let l = b.iter().fold(BigInt::from(1), |l, p| {
                    num_integer::Integer::lcm(&l, &p.terms().values().fold(BigInt::from(1), |a, c| {
                        num_integer::Integer::lcm(&a, c.denom())
                    }))
                });
                let s = BigRational::from_integer(l);
                b.iter().map(|p| p.scale(&s).clear_denominators()).collect()
            })
            .collect();
        let mut f = Endomorphism { space, blocks, int_blocks, degrees, gcd_bounds: vec![] };
        f.gcd_bounds = (0..k).map(|j| f.binary_resultant(j)).collect();
        let top = degrees::pullback_on_graded(&f, f.space.dim())?;
        if !top[(0, 0)].is_positive() {
            return Err(DynamicsError::NotSurjective);
        }
        Ok(f)
    }

    /// Resultant of a `P^1` block whose components only involve one `P^1`
    /// factor, as binary forms of the block's degree.
    fn binary_resultant(&self, j: usize) -> Option<BigInt> {
        if self.space.dims()[j] != 1 {
            return None;
        }
        let row = &self.degrees[j];
        let mut used = row.iter().enumerate().filter(|(_, &d)| d > 0);
        let (l, &d) = used.next()?;
        if used.next().is_some() || self.space.dims()[l] != 1 {
            return None;
        }
        let off = self.space.var_offset(l);
        let forms: Vec<Vec<BigInt>> = self.int_blocks[j]
            .iter()
            .map(|p| {
                let mut c = vec![BigInt::zero(); d as usize + 1];
                for (e, a) in p.terms() {
                    // coefficient of X^e0 Y^(d - e0), lowest X power first
                    c[e[off] as usize] = a.clone();
                }
                c
            })
            .collect();
        Some(binary_form_resultant(&forms[0], &forms[1], d as usize))
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[Vec<MultiPoly<BigRational>>] {
        &self.blocks
    }

    /// Blocks scaled to primitive-denominator integer polynomials.
    pub fn integer_blocks(&self) -> &[Vec<MultiPoly<BigInt>>] {
        &self.int_blocks
    }

    /// Multidegree matrix: `D[j][l]` is the degree of block `j` in the
    /// variables of factor `l`.
    pub fn degree_matrix(&self) -> &[Vec<u32>] {
        &self.degrees
    }

    pub fn identity(space: &ProductSpace) -> Self {
        let nv = space.num_vars();
        let blocks = (0..space.factors())
            .map(|j| {
                let off = space.var_offset(j);
                (0..=space.dims()[j]).map(|i| MultiPoly::var(nv, off + i)).collect()
            })
            .collect();
        Self::new(space.clone(), blocks).expect("identity is a morphism")
    }

    /// Map whose components are the given exponent vectors over all
    /// variables, each with coefficient 1.
    pub fn monomial(space: ProductSpace, blocks: &[Vec<Vec<u32>>]) -> Result<Self, DynamicsError> {
        let nv = space.num_vars();
        let blocks = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|e| {
                        if e.len() != nv {
                            return Err(DynamicsError::VariableCount { block: 0, expected: nv, found: e.len() });
                        }
                        Ok(MultiPoly::from_terms(nv, [(e.clone(), BigRational::from_integer(1.into()))]))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(space, blocks)
    }

    /// `[X_0^d : ... : X_n^d]` on every factor.
    pub fn power_map(space: ProductSpace, d: u32) -> Self {
        let nv = space.num_vars();
        let blocks: Vec<Vec<Vec<u32>>> = (0..space.factors())
            .map(|j| {
                let off = space.var_offset(j);
                (0..=space.dims()[j])
                    .map(|i| {
                        let mut e = vec![0; nv];
                        e[off + i] = d;
                        e
                    })
                    .collect()
            })
            .collect();
        Self::monomial(space, &blocks).expect("power maps are morphisms")
    }

    /// Name of the `v`-th homogeneous coordinate: `X{j}_{i}` with factor
    /// `j` counted from 1.
    pub fn variable_name(space: &ProductSpace, v: usize) -> String {
        let mut j = 0;
        let mut v = v;
        while v > space.dims()[j] {
            v -= space.dims()[j] + 1;
            j += 1;
        }
        format!("X{}_{}", j + 1, v)
    }

    /// Canonical text form used for hashing and serialization.
    pub fn description(&self) -> String {
        let names = |v: usize| Self::variable_name(&self.space, v);
        let dims: Vec<String> = self.space.dims().iter().map(|d| d.to_string()).collect();
        let mut s = format!("space [{}]\n", dims.join(", "));
        for (j, b) in self.blocks.iter().enumerate() {
            let polys: Vec<String> = b.iter().map(|p| format_poly(p, &names)).collect();
            s.push_str(&format!("block {} [{}]\n", j + 1, polys.join(", ")));
        }
        s
    }

    /// Hex SHA-256 of [`Self::description`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.description().as_bytes()))
    }

    /// Image of `x`, reduced to its canonical representative.
    pub fn evaluate(&self, x: &ProjPoint) -> Result<ProjPoint, DynamicsError> {
        self.evaluate_at_step(x, 0)
    }

    pub(crate) fn evaluate_at_step(&self, x: &ProjPoint, step: usize) -> Result<ProjPoint, DynamicsError> {
        if !x.lies_on(&self.space) {
            return Err(DynamicsError::PointShape(self.space.to_string()));
        }
        let flat = x.flat();
        let mut out = Vec::with_capacity(self.space.factors());
        for (j, block) in self.int_blocks.iter().enumerate() {
            let vals: Vec<BigInt> = block.iter().map(|p| p.eval(&flat)).collect();
            if vals.iter().all(|v| v.is_zero()) {
                return Err(DynamicsError::Indeterminacy { step, block: j });
            }
            out.push(point::normalize(vals, self.gcd_bounds[j].as_ref()));
        }
        Ok(ProjPoint::from_canonical(out))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &Endomorphism) -> Result<Endomorphism, DynamicsError> {
        if self.space != g.space {
            return Err(DynamicsError::SpaceMismatch);
        }
        let subs: Vec<MultiPoly<BigRational>> = g.blocks.iter().flatten().cloned().collect();
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|p| p.substitute(&subs)).collect())
            .collect();
        Endomorphism::new_rational_map(self.space.clone(), blocks)
    }

    /// `self x g` on the product of the two spaces.
    pub fn product_system(&self, g: &Endomorphism) -> Endomorphism {
        let space = self.space.product(&g.space);
        let nv = space.num_vars();
        let shift = self.space.num_vars();
        let mut blocks: Vec<Vec<MultiPoly<BigRational>>> =
            self.blocks.iter().map(|b| b.iter().map(|p| p.embed(nv, 0)).collect()).collect();
        blocks.extend(g.blocks.iter().map(|b| b.iter().map(|p| p.embed(nv, shift)).collect()));
        Endomorphism::new_rational_map(space, blocks).expect("product of valid maps")
    }

    /// Integer matrix `D` as a rational matrix.
    pub fn degree_matrix_rational(&self) -> Matrix<BigRational> {
        Matrix::from_rows(
            self.degrees
                .iter()
                .map(|r| r.iter().map(|&d| BigRational::from_integer(d.into())).collect())
                .collect(),
        )
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: usize| Self::variable_name(&self.space, v);
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let c: Vec<String> = b.iter().map(|p| format_poly(p, &names)).collect();
                format!("[{}]", c.join(" : "))
            })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Resultant of the binary forms `sum f[e] X^e Y^(d-e)` and likewise `g`,
/// both taken with formal degree `d`.
pub fn binary_form_resultant(f: &[BigInt], g: &[BigInt], d: usize) -> BigInt {
    // dehomogenize at Y = 1; a drop in formal degree means a root at infinity
    let pf = Polynomial::new(f.to_vec());
    let pg = Polynomial::new(g.to_vec());
    let df = pf.degree();
    let dg = pg.degree();
    let (Some(df), Some(dg)) = (df, dg) else { return BigInt::zero() };
    if df < d && dg < d {
        return BigInt::zero();
    }
    let r = crate::algebra::resultant(&pf, &pg).unwrap_or_else(|_| BigInt::zero());
    // Res_d,d(F, G) = lc(F)^(d - dg) Res(f, g) up to sign when G drops degree
    let extra = if dg < d {
        num_traits::pow(pf.leading(), d - dg)
    } else if df < d {
        num_traits::pow(pg.leading(), d - df)
    } else {
        BigInt::from(1)
    };
    r * extra
}

#[cfg(test)]
mod tests;
