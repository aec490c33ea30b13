//! On-disk orbit cache.
//!
//! One file per `(system digest, starting point)`:
//!
//! ```text
//! arithdeg-orbit 1
//! system <sha256 of the system description>
//! point <starting point>
//! 0 2,1;3,1 1,1
//! 1 4,1;9,1 1,1
//! end completed n_max=15 budget=1000000
//! ```
//!
//! Each record line holds `n`, the factor coordinate vectors and the digit
//! count of each factor's largest coordinate. A coordinate wider than
//! [`SIDE_FILE_BITS`] is written as `@<hash>` and stored in hex under
//! `blobs/<hash>.hex`, the hash being the sha256 of the file contents.
//! Files are written to a temporary name and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use arithdeg::dynamics::{DynamicsError, Endomorphism, OrbitRecord, ProjPoint, StopReason};
use num_bigint::BigInt;
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "ARITHDEG_CACHE_DIR";
pub const SIDE_FILE_BITS: u64 = 16384;
const MAGIC: &str = "arithdeg-orbit 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Miss,
    Hit,
    Extended,
    WriteFailed,
}

impl CacheStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CacheStatus::Disabled => "disabled",
            CacheStatus::Miss => "miss",
            CacheStatus::Hit => "hit",
            CacheStatus::Extended => "extended",
            CacheStatus::WriteFailed => "write-failed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitCache {
    dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
struct Stored {
    points: Vec<ProjPoint>,
    digits: Vec<u64>,
    stop: StopReason,
    budget: u64,
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl OrbitCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        OrbitCache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, f: &Endomorphism, x: &ProjPoint) -> Option<PathBuf> {
        let key = sha_hex(x.to_string().as_bytes());
        self.dir.as_ref().map(|d| d.join(format!("{}-{}.orbit", f.digest(), &key[..32])))
    }

    /// Same result as a cold `iterate_partial(f, x, n_max, budget)`, reusing
    /// and updating the stored orbit.
    pub fn orbit(
        &self,
        f: &Endomorphism,
        x: &ProjPoint,
        n_max: usize,
        budget: u64,
    ) -> Result<(OrbitRecord, CacheStatus), DynamicsError> {
        let Some(path) = self.path_for(f, x) else {
            return Ok((arithdeg::dynamics::iterate_partial(f, x, n_max, budget)?, CacheStatus::Disabled));
        };
        if !x.lies_on(f.space()) {
            return Err(DynamicsError::PointShape(f.space().to_string()));
        }
        let stored = self.load(&path, f, x);
        let (rec, mut status) = match &stored {
            None => (arithdeg::dynamics::iterate_partial(f, x, n_max, budget)?, CacheStatus::Miss),
            Some(s) => replay(f, s, n_max, budget)?,
        };
        let better = match &stored {
            None => true,
            Some(s) => {
                let (a, b) = (rec.len(), s.points.len());
                a > b
                    || (a == b && s.stop == StopReason::Completed && *rec.stop_reason() != StopReason::Completed)
                    || (a == b && s.stop == StopReason::Budget && *rec.stop_reason() == StopReason::Budget && budget > s.budget)
            }
        };
        if better && self.store(&path, &rec, n_max, budget).is_err() {
            status = CacheStatus::WriteFailed;
        }
        Ok((rec, status))
    }

    fn load(&self, path: &Path, f: &Endomorphism, x: &ProjPoint) -> Option<Stored> {
        let text = fs::read_to_string(path).ok()?;
        let mut lines = text.lines();
        if lines.next()? != MAGIC {
            return None;
        }
        if lines.next()?.strip_prefix("system ")? != f.digest() {
            return None;
        }
        if lines.next()?.strip_prefix("point ")? != x.to_string() {
            return None;
        }
        let mut points = Vec::new();
        let mut digits = Vec::new();
        for line in lines {
            if let Some(footer) = line.strip_prefix("end ") {
                let (stop, budget) = parse_footer(footer)?;
                if points.is_empty() || points[0] != *x {
                    return None;
                }
                return Some(Stored { points, digits, stop, budget });
            }
            let mut parts = line.split(' ');
            let n: usize = parts.next()?.parse().ok()?;
            if n != points.len() {
                return None;
            }
            let coords = parts
                .next()?
                .split(';')
                .map(|v| v.split(',').map(|c| self.read_coord(c)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()?;
            let ds = parts.next()?.split(',').map(|d| d.parse::<u64>().ok()).collect::<Option<Vec<_>>>()?;
            let p = ProjPoint::from_canonical_unchecked(coords);
            if !p.lies_on(f.space()) || ds.len() != p.factors() {
                return None;
            }
            digits.push(ds.iter().sum());
            points.push(p);
        }
        None
    }

    fn read_coord(&self, tok: &str) -> Option<BigInt> {
        match tok.strip_prefix('@') {
            Some(hash) => {
                let text = fs::read_to_string(self.dir.as_ref()?.join("blobs").join(format!("{hash}.hex"))).ok()?;
                if sha_hex(text.as_bytes()) != hash {
                    return None;
                }
                let (neg, digits) = match text.strip_prefix('-') {
                    Some(d) => (true, d),
                    None => (false, text.as_str()),
                };
                let v = BigInt::parse_bytes(digits.as_bytes(), 16)?;
                Some(if neg { -v } else { v })
            }
            None => tok.parse().ok(),
        }
    }

    fn write_coord(&self, c: &BigInt, dir: &Path) -> std::io::Result<String> {
        if c.bits() <= SIDE_FILE_BITS {
            return Ok(c.to_string());
        }
        let text = c.to_str_radix(16);
        let hash = sha_hex(text.as_bytes());
        let blobs = dir.join("blobs");
        let target = blobs.join(format!("{hash}.hex"));
        if !target.exists() {
            fs::create_dir_all(&blobs)?;
            atomic_write(&blobs, &target, text.as_bytes())?;
        }
        Ok(format!("@{hash}"))
    }

    fn store(&self, path: &Path, rec: &OrbitRecord, n_max: usize, budget: u64) -> std::io::Result<()> {
        let dir = self.dir.as_ref().expect("store needs a cache directory");
        fs::create_dir_all(dir)?;
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        out.push_str(&format!("system {}\npoint {}\n", rec.system_digest(), rec.point(0)));
        for (n, p) in rec.points().iter().enumerate() {
            let factors = p
                .coords()
                .iter()
                .map(|v| v.iter().map(|c| self.write_coord(c, dir)).collect::<std::io::Result<Vec<_>>>().map(|v| v.join(",")))
                .collect::<std::io::Result<Vec<_>>>()?;
            let ds: Vec<String> = rec.factor_heights(n).iter().map(|h| h.digits.to_string()).collect();
            out.push_str(&format!("{n} {} {}\n", factors.join(";"), ds.join(",")));
        }
        let stop = match rec.stop_reason() {
            StopReason::Indeterminacy { step, block } => format!("indeterminacy step={step} block={block}"),
            s => s.as_str().to_string(),
        };
        out.push_str(&format!("end {stop} n_max={n_max} budget={budget}\n"));
        atomic_write(dir, path, out.as_bytes())
    }
}

fn atomic_write(dir: &Path, target: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(target).map_err(|e| e.error)?;
    Ok(())
}

fn parse_footer(s: &str) -> Option<(StopReason, u64)> {
    let mut fields = s.split(' ');
    let kind = fields.next()?;
    let mut kv = std::collections::BTreeMap::new();
    for f in fields {
        let (k, v) = f.split_once('=')?;
        kv.insert(k, v.parse::<u64>().ok()?);
    }
    let stop = match kind {
        "completed" => StopReason::Completed,
        "budget" => StopReason::Budget,
        "indeterminacy" => StopReason::Indeterminacy {
            step: usize::try_from(*kv.get("step")?).ok()?,
            block: usize::try_from(*kv.get("block")?).ok()?,
        },
        _ => return None,
    };
    Some((stop, *kv.get("budget")?))
}

/// Rebuilds what a cold run would return from the stored prefix, computing
/// further points only when the stored orbit cannot decide.
fn replay(f: &Endomorphism, s: &Stored, n_max: usize, budget: u64) -> Result<(OrbitRecord, CacheStatus), DynamicsError> {
    let digest = f.digest();
    let mut pts = Vec::new();
    for (i, p) in s.points.iter().enumerate().take(n_max + 1) {
        if i > 0 && s.digits[i] > budget {
            return Ok((OrbitRecord::new(digest, pts, StopReason::Budget), CacheStatus::Hit));
        }
        pts.push(p.clone());
    }
    if pts.len() == n_max + 1 {
        return Ok((OrbitRecord::new(digest, pts, StopReason::Completed), CacheStatus::Hit));
    }
    match s.stop {
        StopReason::Indeterminacy { .. } => Ok((OrbitRecord::new(digest, pts, s.stop.clone()), CacheStatus::Hit)),
        StopReason::Budget if budget <= s.budget => Ok((OrbitRecord::new(digest, pts, StopReason::Budget), CacheStatus::Hit)),
        _ => {
            let mut rec = OrbitRecord::new(digest, pts, StopReason::Completed);
            rec.extend(f, n_max, budget)?;
            Ok((rec, CacheStatus::Extended))
        }
    }
}
