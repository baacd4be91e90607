//! Exact orientable Weil–Petersson volume polynomials, reconstructed from
//! the b = 0 numerical recursion at extended precision.
//!
//! A volume of complexity d = 3g−3+n is Σ_α q_α π^{2(d−|α|)} Π L_i^{2α_i}
//! with rational q_α. The engine supplies values at generic length tuples;
//! a linear solve recovers the monomial coefficients and continued
//! fractions pin each q_α exactly, which doubles as a consistency test of
//! the p dp measure convention.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::topology::Topology;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Exact polynomial in squared boundary lengths with coefficients
/// q · π^{2j}, homogeneous of total weight |α| + j = 3g−3+n.
#[derive(Debug, Clone, PartialEq)]
pub struct PiPoly {
    pub topology: Topology,
    /// Multi-degree α (exponents of L_i²) → rational q; the π-power is
    /// implied: j = dim − |α|.
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

impl PiPoly {
    pub fn dim(&self) -> i64 {
        self.topology.dim3g3n().expect("integer genus enforced at construction")
    }

    /// Assert the stored grading: every term satisfies |α| + j = dim with
    /// j ≥ 0, and the polynomial is symmetric under boundary permutations.
    pub fn check_invariants(&self) -> Result<()> {
        let d = self.dim();
        for (alpha, q) in &self.terms {
            if alpha.len() != self.topology.n as usize {
                return Err(Error::invalid("PiPoly: multi-degree arity mismatch"));
            }
            let total: i64 = alpha.iter().map(|&a| a as i64).sum();
            if total > d {
                return Err(Error::invalid(format!(
                    "PiPoly: term {alpha:?} breaks homogeneity (|alpha| = {total} > {d})"
                )));
            }
            let _ = q;
        }
        // symmetry: every permutation image carries the same coefficient
        for (alpha, q) in &self.terms {
            let mut sorted = alpha.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let rep = self.terms.iter().find(|(k, _)| {
                let mut s = (*k).clone();
                s.sort_unstable_by(|a, b| b.cmp(a));
                s == sorted
            });
            if let Some((_, q0)) = rep {
                if q0 != q {
                    return Err(Error::invalid("PiPoly: not permutation symmetric"));
                }
            }
        }
        Ok(())
    }

    /// Numeric evaluation at the given lengths.
    pub fn eval<R: Real>(&self, lengths: &[R]) -> Result<R> {
        if lengths.len() != self.topology.n as usize {
            return Err(Error::invalid(format!(
                "wp_eval: {} lengths for {}",
                lengths.len(),
                self.topology
            )));
        }
        let proto = &lengths[0];
        let d = self.dim();
        let pi2 = proto.pi() * proto.pi();
        let mut acc = proto.of(0.0);
        for (alpha, q) in &self.terms {
            let mut term = rational_to_real(q, proto)?;
            let j = d - alpha.iter().map(|&a| a as i64).sum::<i64>();
            for _ in 0..j {
                term = term * pi2.clone();
            }
            for (l, &a) in lengths.iter().zip(alpha) {
                for _ in 0..a {
                    term = term * l.clone() * l.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Canonical text rendering: orbits of monomials under boundary
    /// permutation, highest length-degree first.
    pub fn render(&self) -> String {
        let d = self.dim();
        // group by sorted multi-degree
        let mut orbits: BTreeMap<Vec<u32>, (BigRational, Vec<Vec<u32>>)> = BTreeMap::new();
        for (alpha, q) in &self.terms {
            let mut key = alpha.clone();
            key.sort_unstable_by(|a, b| b.cmp(a));
            let e = orbits.entry(key).or_insert_with(|| (q.clone(), Vec::new()));
            e.1.push(alpha.clone());
        }
        let mut list: Vec<(i64, Vec<u32>, BigRational, Vec<Vec<u32>>)> = orbits
            .into_iter()
            .map(|(k, (q, mons))| {
                let deg: i64 = k.iter().map(|&a| a as i64).sum();
                (deg, k, q, mons)
            })
            .collect();
        list.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
        let mut parts = Vec::new();
        for (deg, _key, q, mut mons) in list {
            if q.is_zero() {
                continue;
            }
            mons.sort_by(|a, b| b.cmp(a));
            let j = d - deg;
            let pi_str = match j {
                0 => None,
                j => Some(format!("pi^{}", 2 * j)),
            };
            let base = if deg == 0 {
                None
            } else {
                let rendered: Vec<String> = mons.iter().map(|m| monomial_str(m)).collect();
                if rendered.len() == 1 {
                    Some(rendered.into_iter().next().unwrap())
                } else {
                    Some(format!("({})", rendered.join("+")))
                }
            };
            parts.push(coeff_term(&q, pi_str, base));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn monomial_str(alpha: &[u32]) -> String {
    let factors: Vec<String> = alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| format!("L{}^{}", i + 1, 2 * a))
        .collect();
    factors.join("·")
}

fn coeff_term(q: &BigRational, pi_str: Option<String>, base: Option<String>) -> String {
    let tail: Vec<String> = [pi_str, base].into_iter().flatten().collect();
    let tail_str = tail.join("·");
    let numer = q.numer();
    let denom = q.denom();
    if tail_str.is_empty() {
        return format!("{q}");
    }
    if numer.is_one() && !denom.is_one() {
        return format!("{tail_str}/{denom}");
    }
    if numer.is_one() && denom.is_one() {
        return tail_str;
    }
    if denom.is_one() {
        return format!("{numer}·{tail_str}");
    }
    format!("{numer}/{denom}·{tail_str}")
}

fn rational_to_real<R: Real>(q: &BigRational, proto: &R) -> Result<R> {
    let numer = q
        .numer()
        .to_f64()
        .ok_or_else(|| Error::Reconstruction("coefficient numerator exceeds f64 exact range".into()))?;
    let denom = q
        .denom()
        .to_f64()
        .ok_or_else(|| Error::Reconstruction("coefficient denominator exceeds f64 exact range".into()))?;
    if numer.abs() >= 9.0e15 || denom.abs() >= 9.0e15 {
        return Err(Error::Reconstruction("coefficient outside exactly-representable range".into()));
    }
    Ok(proto.of(numer) / proto.of(denom))
}

/// Best rational with denominator ≤ `den_bound` whose distance to `x` is at
/// most `tol`, via continued fractions. Fails loudly otherwise: a residual
/// that is too large signals a precision or measure-convention bug.
pub fn rationalize<R: Real>(x: &R, den_bound: u64, tol: f64) -> Result<BigRational> {
    let mut p_prev = BigInt::from(1);
    let mut q_prev = BigInt::from(0);
    let mut p_cur = BigInt::from(x.floor().f64() as i64);
    let mut q_cur = BigInt::from(1);
    let mut frac = x.clone() - x.floor();
    for _ in 0..64 {
        let cand = BigRational::new(p_cur.clone(), q_cur.clone());
        let approx = rational_to_real(&cand, x)?;
        if (x.clone() - approx).abs() <= x.of(tol) {
            return Ok(cand);
        }
        if frac.abs() <= x.epsilon() * x.of(4.0) {
            break;
        }
        let inv = x.of(1.0) / frac.clone();
        let a = inv.floor();
        frac = inv - a.clone();
        let ai = BigInt::from(a.f64() as i64);
        let p_next = &ai * &p_cur + &p_prev;
        let q_next = &ai * &q_cur + &q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if q_cur > BigInt::from(den_bound) {
            break;
        }
    }
    Err(Error::Reconstruction(format!(
        "no rational with denominator <= {den_bound} within {tol:e} of {}",
        x.f64()
    )))
}

/// Monomial basis {α : |α| ≤ d} in n variables.
pub fn monomial_basis(n: usize, d: i64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for a in 0..=left {
            cur[i] = a as u32;
            rec(i + 1, left - a, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// Solve A x = rhs by Gaussian elimination with partial pivoting.
pub fn solve_dense<R: Real>(a: &mut Vec<Vec<R>>, rhs: &mut Vec<R>) -> Result<Vec<R>> {
    let n = rhs.len();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs().f64() == 0.0 {
            return Err(Error::Reconstruction("singular reconstruction system".into()));
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in (col + 1)..n {
            let factor = a[r][col].clone() / a[col][col].clone();
            for c in col..n {
                a[r][c] = a[r][c].clone() - factor.clone() * a[col][c].clone();
            }
            rhs[r] = rhs[r].clone() - factor * rhs[col].clone();
        }
    }
    let proto = rhs[0].clone();
    let mut x = vec![proto.of(0.0); n];
    for row in (0..n).rev() {
        let mut s = rhs[row].clone();
        for c in (row + 1)..n {
            s = s - a[row][c].clone() * x[c].clone();
        }
        x[row] = s / a[row][row].clone();
    }
    Ok(x)
}

#[cfg(all(feature = "extended", not(target_arch = "wasm32")))]
mod reconstruct {
    use super::*;
    use crate::engine::{Engine, EngineConfig, VolumeQuery};
    use crate::kernels::RegEps;
    use crate::real::{Field, MpReal, Precision};

    pub const DEN_BOUND: u64 = 1_000_000_000_000;
    pub const VERIFY_TOL: f64 = 1e-30;

    /// Compute the volume polynomial of an orientable topology at desk scale
    /// (3g−3+n ≤ 6) by exact-fit reconstruction from the b = 0 recursion in
    /// ≥ 200-bit arithmetic.
    pub fn wp_volume(top: Topology) -> Result<PiPoly> {
        if !top.genus_is_integer() {
            return Err(Error::UnsupportedTopology(format!("{top} has half-integer genus")));
        }
        if !top.is_stable() {
            return Err(Error::UnsupportedTopology(format!("{top} is unstable")));
        }
        let d = top.dim3g3n()?;
        if d > 6 {
            return Err(Error::UnsupportedTopology(format!(
                "{top} beyond desk scale (3g-3+n = {d} > 6)"
            )));
        }
        let n = top.n as usize;
        let basis = monomial_basis(n, d);
        let proto = MpReal::with_prec(Precision::extended(256), 0.0);
        let engine: Engine<MpReal> =
            Engine::with_proto(proto.clone(), EngineConfig::extended_tier());
        let tol = 1e-36;
        let eval = |lengths: &[f64]| -> Result<MpReal> {
            let q = VolumeQuery {
                top,
                lengths: lengths.to_vec(),
                eps: RegEps::new(0.5).unwrap(),
                b: 0.0,
                tol,
            };
            Ok(engine.total_volume(&q)?.value)
        };

        // generic nodes: small rationals, exactly representable
        let nodes = node_tuples(n, basis.len() + 3);
        let mut mat: Vec<Vec<MpReal>> = Vec::with_capacity(basis.len());
        let mut rhs: Vec<MpReal> = Vec::with_capacity(basis.len());
        for node in nodes.iter().take(basis.len()) {
            let lifted: Vec<MpReal> = node.iter().map(|&l| proto.of(l)).collect();
            mat.push(basis.iter().map(|alpha| monomial_value(alpha, &lifted, &proto)).collect());
            rhs.push(eval(node)?);
        }
        let coeffs = solve_dense(&mut mat, &mut rhs)?;

        // strip the pi powers and rationalize
        let pi2 = proto.pi() * proto.pi();
        let mut terms = BTreeMap::new();
        for (alpha, c) in basis.iter().zip(&coeffs) {
            let j = d - alpha.iter().map(|&a| a as i64).sum::<i64>();
            let mut q = c.clone();
            for _ in 0..j {
                q = q / pi2.clone();
            }
            let rat = rationalize(&q, DEN_BOUND, 1e-25)?;
            if !rat.is_zero() {
                terms.insert(alpha.clone(), rat);
            }
        }
        let poly = PiPoly { topology: top, terms };
        poly.check_invariants()?;

        // verify at fresh nodes
        for node in nodes.iter().skip(basis.len()) {
            let lifted: Vec<MpReal> = node.iter().map(|&l| proto.of(l)).collect();
            let fit = poly.eval(&lifted)?;
            let truth = eval(node)?;
            let resid = (fit - truth.clone()).abs().f64();
            let scale = truth.abs().f64().max(1.0);
            if resid > VERIFY_TOL * scale {
                return Err(Error::Reconstruction(format!(
                    "re-evaluation residual {resid:e} at {node:?} exceeds {VERIFY_TOL:e}"
                )));
            }
        }

        // positivity of the leading L1-coefficient
        let lead = basis
            .iter()
            .position(|a| a[0] as i64 == d && a.iter().skip(1).all(|&x| x == 0))
            .expect("leading monomial in basis");
        if coeffs[lead].f64() <= 0.0 && d > 0 {
            return Err(Error::Reconstruction("leading coefficient not positive".into()));
        }
        Ok(poly)
    }

    fn monomial_value(alpha: &[u32], lengths: &[MpReal], proto: &MpReal) -> MpReal {
        let mut v = proto.of(1.0);
        for (l, &a) in lengths.iter().zip(alpha) {
            for _ in 0..a {
                v = v * l.clone() * l.clone();
            }
        }
        v
    }

    fn node_tuples(n: usize, count: usize) -> Vec<Vec<f64>> {
        // deterministic, generic, exactly-representable rational tuples
        let mut out = Vec::with_capacity(count);
        let mut seed = 0u64;
        for _ in 0..count {
            let mut node = Vec::with_capacity(n);
            for _ in 0..n {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let step = ((seed >> 33) % 12) as f64;
                node.push(0.75 + step * 0.25);
            }
            out.push(node);
        }
        out
    }
}

#[cfg(all(feature = "extended", not(target_arch = "wasm32")))]
pub use reconstruct::wp_volume;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rationalize_simple_fractions() {
        let q = rationalize(&(1.0f64 / 48.0), 1_000_000, 1e-12).unwrap();
        assert_eq!(q, BigRational::new(BigInt::from(1), BigInt::from(48)));
        let q = rationalize(&2.0f64, 1_000_000, 1e-12).unwrap();
        assert_eq!(q, BigRational::from(BigInt::from(2)));
        assert!(rationalize(&std::f64::consts::E, 100, 1e-14).is_err());
    }

    #[test]
    fn basis_counts() {
        assert_eq!(monomial_basis(4, 1).len(), 5);
        assert_eq!(monomial_basis(2, 2).len(), 6);
        assert_eq!(monomial_basis(1, 1).len(), 2);
    }

    #[test]
    fn render_known_forms() {
        use std::collections::BTreeMap;
        // (1,1): L^2/48 + pi^2/12
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], BigRational::new(BigInt::from(1), BigInt::from(48)));
        terms.insert(vec![0], BigRational::new(BigInt::from(1), BigInt::from(12)));
        let p = PiPoly { topology: Topology::new(2, 1).unwrap(), terms };
        assert_eq!(p.render(), "L1^2/48 + pi^2/12");
        let v: f64 = p.eval(&[0.0f64]).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.powi(2) / 12.0, max_relative = 1e-15);

        // (0,3): constant 1
        let mut terms = BTreeMap::new();
        terms.insert(vec![0, 0, 0], BigRational::one());
        let p = PiPoly { topology: Topology::new(0, 3).unwrap(), terms };
        assert_eq!(p.render(), "1");
        assert_eq!(p.eval(&[4.0f64, 5.0, 6.0]).unwrap(), 1.0);
    }

    #[test]
    fn eval_is_permutation_invariant_for_symmetric_terms() {
        let mut terms = BTreeMap::new();
        for alpha in [vec![1u32, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]] {
            terms.insert(alpha, BigRational::new(BigInt::from(1), BigInt::from(2)));
        }
        terms.insert(vec![0, 0, 0, 0], BigRational::from(BigInt::from(2)));
        let p = PiPoly { topology: Topology::new(0, 4).unwrap(), terms };
        p.check_invariants().unwrap();
        let a: f64 = p.eval(&[1.0f64, 2.0, 3.0, 4.0]).unwrap();
        let b: f64 = p.eval(&[4.0f64, 3.0, 2.0, 1.0]).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-15);
        assert_eq!(p.render(), "(L1^2+L2^2+L3^2+L4^2)/2 + 2·pi^2");
    }

    #[test]
    fn homogeneity_violation_detected() {
        let mut terms = BTreeMap::new();
        terms.insert(vec![5u32], BigRational::one()); // |alpha| = 5 > d = 1
        let p = PiPoly { topology: Topology::new(2, 1).unwrap(), terms };
        assert!(p.check_invariants().is_err());
    }
}
