//! Surrogates for inner volume slices, with a keyed cache.
//!
//! The D-term re-queries the same one-slot families thousands of times, so
//! fits are cached by (kind, topology, frozen lengths, ε, b, tol, P_max).
//! The cache is an optimization only: results must agree with cache disabled
//! up to tolerance. The f64 tier can persist fits to disk as versioned JSON
//! records replaced atomically.

use crate::cheb::Chebyshev;
use crate::error::Result;
use crate::real::Real;
use crate::topology::{Topology, VolumeKind};
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Cache key; parameter floats are keyed by their exact bit patterns after
/// rounding to the cache grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SurrogateKey {
    pub kind: VolumeKind,
    pub top: Topology,
    /// Frozen boundary lengths (the free slot excluded), grid-rounded bits.
    pub frozen: Vec<u64>,
    pub eps_bits: u64,
    pub b_bits: u64,
    pub tol_mag: i32,
    pub pmax_bits: u64,
    /// Free-slot position marker for 2D families (p and q slots).
    pub two_dim: bool,
}

pub fn grid_round(x: f64) -> u64 {
    // 1e-9 grid: coarser keys would change results through the cache
    ((x * 1e9).round() / 1e9).to_bits()
}

/// One fitted slice V(·, frozen) on [0, P_max] with its residual estimate.
#[derive(Debug, Clone)]
pub struct Surrogate<R: Real> {
    pub cheb: Chebyshev<R>,
    pub residual: f64,
    pub key: SurrogateKey,
}

impl<R: Real> Surrogate<R> {
    pub fn eval(&self, p: &R) -> R {
        self.cheb.eval(p)
    }
    pub fn p_max(&self) -> R {
        self.cheb.domain().1
    }
}

/// Tensor-product surrogate for the connected gluing term when the inner
/// volume genuinely depends on both glued lengths.
#[derive(Debug, Clone)]
pub struct Surrogate2<R: Real> {
    p_nodes: Vec<R>,
    rows: Vec<Chebyshev<R>>,
    pub residual: f64,
}

impl<R: Real> Surrogate2<R> {
    /// Fit f(p, q) on [0,pmax]²: rows are Chebyshev slices in q at Chebyshev
    /// nodes of p, recombined with barycentric interpolation across p.
    pub fn fit<F: Fn(&R, &R) -> R>(f: &F, pmax: &R, n: usize) -> Result<Self> {
        let proto = pmax.clone();
        let pi = proto.pi();
        let half = proto.of(0.5);
        let mid = pmax.clone() * half;
        let mut p_nodes = Vec::with_capacity(n);
        for k in 0..n {
            let theta = pi.clone() * proto.of(k as f64 + 0.5) / proto.of(n as f64);
            p_nodes.push(mid.clone() + mid.clone() * theta.cos());
        }
        let mut rows = Vec::with_capacity(n);
        for p in &p_nodes {
            rows.push(Chebyshev::fit(&|q: &R| f(p, q), proto.of(0.0), pmax.clone(), n));
        }
        let mut s = Surrogate2 { p_nodes, rows, residual: 0.0 };
        let mut worst = 0.0f64;
        for (i, j) in [(3usize, 7usize), (11, 5), (6, 13)] {
            let tp = proto.of((i as f64 + 0.41) / 16.0) * pmax.clone();
            let tq = proto.of((j as f64 + 0.29) / 16.0) * pmax.clone();
            let d = (s.eval(&tp, &tq) - f(&tp, &tq)).abs().f64();
            worst = worst.max(d);
        }
        s.residual = worst;
        Ok(s)
    }

    pub fn eval(&self, p: &R, q: &R) -> R {
        let vals: Vec<R> = self.rows.iter().map(|r| r.eval(q)).collect();
        lagrange_cheb(&self.p_nodes, &vals, p, p)
    }
}

/// Barycentric Lagrange interpolation at Chebyshev points of the first kind.
fn lagrange_cheb<R: Real>(nodes: &[R], vals: &[R], x: &R, proto: &R) -> R {
    let n = nodes.len();
    let pi = proto.pi();
    let mut num = proto.of(0.0);
    let mut den = proto.of(0.0);
    for k in 0..n {
        let theta = pi.clone() * proto.of(k as f64 + 0.5) / proto.of(n as f64);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = theta.sin() * proto.of(sign);
        let dx = x.clone() - nodes[k].clone();
        if dx.abs() <= proto.epsilon() * proto.of(16.0) {
            return vals[k].clone();
        }
        let t = w / dx;
        num = num + t.clone() * vals[k].clone();
        den = den + t;
    }
    num / den
}

/// Concurrent-map cache with at-most-once construction per key in the happy
/// path (speculative duplicates are tolerated, torn values are not).
pub struct SurrogateCache<R: Real> {
    map: Mutex<HashMap<SurrogateKey, Arc<Surrogate<R>>>>,
    pub disk_dir: Option<PathBuf>,
    pub enabled: bool,
}

impl<R: Real> SurrogateCache<R> {
    pub fn new(enabled: bool) -> Self {
        SurrogateCache { map: Mutex::new(HashMap::new()), disk_dir: None, enabled }
    }

    pub fn get_or_build<F: FnOnce() -> Result<Surrogate<R>>>(
        &self,
        key: &SurrogateKey,
        build: F,
    ) -> Result<Arc<Surrogate<R>>> {
        if self.enabled {
            if let Some(hit) = self.map.lock().unwrap().get(key) {
                return Ok(hit.clone());
            }
        }
        let built = Arc::new(build()?);
        if self.enabled {
            self.map
                .lock()
                .unwrap()
                .entry(key.clone())
                .or_insert_with(|| built.clone());
        }
        Ok(built)
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Versioned on-disk record for the f64 tier.
#[derive(serde::Serialize, serde::Deserialize)]
pub struct DiskRecord {
    pub version: u32,
    pub key: SurrogateKey,
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
    pub residual: f64,
}

impl SurrogateCache<f64> {
    /// Load any persisted fits from `dir` (ignoring unreadable or
    /// version-mismatched records) and enable write-through.
    pub fn attach_disk(&mut self, dir: PathBuf) -> std::io::Result<()> {
        std::fs::create_dir_all(&dir)?;
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().map(|e| e != "json").unwrap_or(true) {
                continue;
            }
            let Ok(text) = std::fs::read_to_string(&path) else { continue };
            let Ok(rec) = serde_json::from_str::<DiskRecord>(&text) else { continue };
            if rec.version != CACHE_FORMAT_VERSION {
                continue;
            }
            let cheb = crate::cheb::Chebyshev::from_parts(rec.a, rec.b, rec.coeffs);
            let s = Surrogate { cheb, residual: rec.residual, key: rec.key.clone() };
            self.map.lock().unwrap().insert(rec.key, Arc::new(s));
        }
        self.disk_dir = Some(dir);
        Ok(())
    }

    /// Atomic write of one record: write to a temp file, then rename.
    pub fn persist(&self, s: &Surrogate<f64>) -> std::io::Result<()> {
        let Some(dir) = &self.disk_dir else { return Ok(()) };
        let (a, b) = s.cheb.domain();
        let rec = DiskRecord {
            version: CACHE_FORMAT_VERSION,
            key: s.key.clone(),
            a,
            b,
            coeffs: s.cheb.coeffs().to_vec(),
            residual: s.residual,
        };
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        use std::hash::{Hash, Hasher};
        rec.key.hash(&mut hasher);
        let name = format!("{:016x}.json", hasher.finish());
        let tmp = dir.join(format!(".{name}.tmp.{}", std::process::id()));
        std::fs::write(&tmp, serde_json::to_string(&rec).unwrap())?;
        std::fs::rename(&tmp, dir.join(name))?;
        Ok(())
    }
}
