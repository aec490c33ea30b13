//! Exact feasibility of `sum_j c_j v_j > 0` (componentwise) by
//! Fourier–Motzkin elimination over any ordered ring.

use std::cmp::Ordering;

use crate::scalar::OrderedRing;

use super::AlgebraError;

/// True iff some linear combination of `generators` has every coordinate
/// strictly positive, i.e. the span meets the open positive orthant.
pub fn subspace_meets_open_orthant<T: OrderedRing>(generators: &[Vec<T>]) -> Result<bool, AlgebraError> {
    let Some(first) = generators.first() else {
        return Ok(false);
    };
    let k = first.len();
    if k == 0 {
        return Err(AlgebraError::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(g) = generators.iter().find(|g| g.len() != k) {
        return Err(AlgebraError::DimensionMismatch { expected: k, found: g.len() });
    }
    // one strict constraint per coordinate, one variable per generator
    let constraints: Vec<Vec<T>> = (0..k)
        .map(|i| generators.iter().map(|g| g[i].clone()).collect())
        .collect();
    Ok(strict_homogeneous_feasible(constraints, generators.len()))
}

/// Decides whether `A c > 0` has a solution, each row of `A` a constraint.
pub fn strict_homogeneous_feasible<T: OrderedRing>(rows: Vec<Vec<T>>, vars: usize) -> bool {
    let mut rows: Vec<(Vec<T>, Vec<Ordering>)> = rows
        .into_iter()
        .map(|r| {
            let s = r.iter().map(|c| c.sign()).collect();
            (r, s)
        })
        .collect();
    let mut alive: Vec<bool> = vec![true; vars];
    loop {
        if rows.iter().any(|(_, s)| s.iter().all(|&x| x == Ordering::Equal)) {
            return false;
        }
        if rows.is_empty() {
            return true;
        }
        // eliminate the variable producing the fewest new rows
        let mut best: Option<(usize, usize)> = None;
        for v in (0..vars).filter(|&v| alive[v]) {
            let pos = rows.iter().filter(|(_, s)| s[v] == Ordering::Greater).count();
            let neg = rows.iter().filter(|(_, s)| s[v] == Ordering::Less).count();
            let cost = pos * neg;
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((v, cost));
            }
        }
        let Some((v, _)) = best else {
            // every row has some nonzero sign but no live variable: impossible
            return false;
        };
        alive[v] = false;
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows.drain(..) {
            match row.1[v] {
                Ordering::Greater => pos.push(row),
                Ordering::Less => neg.push(row),
                Ordering::Equal => keep.push(row),
            }
        }
        if !pos.is_empty() && !neg.is_empty() {
            for (p, ps) in &pos {
                for (n, ns) in &neg {
                    // (-n_v) * p + p_v * n has zero coefficient on v
                    let a = -n[v].clone();
                    let b = p[v].clone();
                    let row: Vec<T> = p
                        .iter()
                        .zip(n)
                        .enumerate()
                        .map(|(j, (x, y))| {
                            if j == v || (ps[j] == Ordering::Equal && ns[j] == Ordering::Equal) {
                                T::zero()
                            } else {
                                a.clone() * x.clone() + b.clone() * y.clone()
                            }
                        })
                        .collect();
                    let s = row
                        .iter()
                        .enumerate()
                        .map(|(j, c)| {
                            if j == v || (ns[j] == Ordering::Equal && ps[j] == Ordering::Equal) {
                                Ordering::Equal
                            } else if ns[j] == Ordering::Equal {
                                ps[j]
                            } else if ps[j] == Ordering::Equal {
                                ns[j]
                            } else {
                                c.sign()
                            }
                        })
                        .collect();
                    keep.push((row, s));
                }
            }
        }
        // rows with only one sign in v are satisfiable by pushing v far out
        rows = keep;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use num_rational::BigRational;

    fn gens(v: &[&[i64]]) -> Vec<Vec<BigRational>> {
        v.iter().map(|g| g.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn axis_misses_orthant() {
        assert!(!subspace_meets_open_orthant(&gens(&[&[-1, 0]])).unwrap());
    }

    #[test]
    fn full_plane_meets_orthant() {
        assert!(subspace_meets_open_orthant(&gens(&[&[1, 0], &[0, 1]])).unwrap());
    }

    #[test]
    fn antidiagonal_misses_orthant() {
        assert!(!subspace_meets_open_orthant(&gens(&[&[1, -1]])).unwrap());
    }

    #[test]
    fn mixed_generators() {
        // (1,-1,0) + (0,2,1) = (1,1,1)
        assert!(subspace_meets_open_orthant(&gens(&[&[1, -1, 0], &[0, 2, 1]])).unwrap());
        // span{(1,-1,0),(0,0,1)} never has both first two coordinates positive
        assert!(!subspace_meets_open_orthant(&gens(&[&[1, -1, 0], &[0, 0, 1]])).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            subspace_meets_open_orthant(&gens(&[&[1, 0], &[1]])),
            Err(AlgebraError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_generator_list_is_origin() {
        let g: Vec<Vec<BigRational>> = Vec::new();
        assert!(!subspace_meets_open_orthant(&g).unwrap());
    }
}
