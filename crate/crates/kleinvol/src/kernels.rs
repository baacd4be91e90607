//! The four identity kernels R, D, E, F, the ε-dependent upper bound Λ, and
//! the closed-form gluing kernel 𝓔 for cross-capped pairs of pants.
//!
//! All cosh-ratio logs go through `log_cosh_sum`, so the kernels stay finite
//! out to the truncation radius instead of overflowing near argument 700.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::{log1p_exp_neg, log_cosh, log_cosh_sum};

/// Evaluation point (x, y, z) for the identity kernels; all coordinates are
/// lengths, finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl KernelPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y), ("z", z)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("kernel point: {name} = {v} must be finite and >= 0")));
            }
        }
        Ok(KernelPoint { x, y, z })
    }
}

/// Regularisation parameter ε with the collar-lemma bound sinh(ε/2) ≤ 1
/// enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegEps(f64);

impl RegEps {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::invalid(format!("eps = {eps} must be finite and > 0")));
        }
        if (eps / 2.0).sinh() > 1.0 {
            return Err(Error::invalid(format!(
                "eps = {eps} violates sinh(eps/2) <= 1 (eps <= {:.6} required)",
                2.0 * 1.0f64.asinh()
            )));
        }
        Ok(RegEps(eps))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn as_real<R: Real>(&self, proto: &R) -> R {
        proto.of(self.0)
    }
}

/// R(x,y,z) = x − log[(cosh y/2 + cosh (x+z)/2) / (cosh y/2 + cosh (x−z)/2)].
pub fn kernel_r<R: Real>(x: &R, y: &R, z: &R) -> R {
    let half = x.of(0.5);
    let yh = y.clone() * half.clone();
    let ap = (x.clone() + z.clone()) * half.clone();
    let am = (x.clone() - z.clone()) * half;
    x.clone() - (log_cosh_sum(&yh, &ap) - log_cosh_sum(&yh, &am))
}

/// D(x,y,z) = R(x,y,z) + R(x,z,y) − x. Symmetric in (y,z) by construction.
pub fn kernel_d<R: Real>(x: &R, y: &R, z: &R) -> R {
    kernel_r(x, y, z) + kernel_r(x, z, y) - x.clone()
}

/// E(x,y,z) = R(x,2z,y) − x/2. Can go negative for large y.
pub fn kernel_e<R: Real>(x: &R, y: &R, z: &R) -> R {
    kernel_r(x, &(z.clone() * x.of(2.0)), y) - x.clone() * x.of(0.5)
}

/// F(x,y,z) = x − 2a(x,y,z) − 2a(x,z,y) with
/// tanh a = sinh(x/2) sinh(z) tanh(z/2) / (cosh y + cosh(x/2) cosh z).
/// Errors if the atanh argument leaves (−1,1), which flags invalid inputs.
pub fn kernel_f<R: Real>(x: &R, y: &R, z: &R) -> Result<R> {
    if x.is_zero() {
        return Ok(x.of(0.0));
    }
    let a1 = f_half_angle(x, y, z)?;
    let a2 = f_half_angle(x, z, y)?;
    Ok(x.clone() - (a1 + a2) * x.of(2.0))
}

fn f_half_angle<R: Real>(x: &R, y: &R, z: &R) -> Result<R> {
    if z.is_zero() {
        return Ok(x.of(0.0));
    }
    // log-space evaluation keeps the ratio finite for the doubly-fast
    // growing Klein-bottle sequences.
    let half = x.of(0.5);
    let num_ln = (x.clone() * half.clone()).sinh().ln() + log_sinh(z) + log_tanh_half(z);
    let den_ln = log_cosh_plus_prod(y, &(x.clone() * half), z);
    let r = (num_ln - den_ln).exp();
    if r >= x.of(1.0) || r <= x.of(-1.0) {
        return Err(Error::domain("kernel F: tanh argument left (-1,1)"));
    }
    Ok(r.atanh())
}

/// log tanh(z/2) = log1p(−e^{−z}) − log1p(e^{−z}), stable for large z.
fn log_tanh_half<R: Real>(z: &R) -> R {
    let e = (-z.clone()).exp();
    (-e.clone()).ln_1p() - e.ln_1p()
}

fn log_sinh<R: Real>(x: &R) -> R {
    if *x > x.of(30.0) {
        x.clone() - (-(x.clone() * x.of(2.0))).exp().ln_1p() - x.of(2.0).ln()
    } else {
        x.sinh().ln()
    }
}

/// log(cosh y + cosh(u) cosh z) with overflow protection.
fn log_cosh_plus_prod<R: Real>(y: &R, u: &R, z: &R) -> R {
    let ly = log_cosh(y);
    let lp = log_cosh(u) + log_cosh(z);
    let (hi, lo) = if ly >= lp { (ly, lp) } else { (lp, ly) };
    hi.clone() + (lo - hi).exp().ln_1p()
}

/// Λ(x, y, ε): the unique solution of cosh(x/2) + cosh(y/2) = 2 sinh(ε/2) sinh(Λ/2).
pub fn lambda_upper<R: Real>(x: &R, y: &R, eps: &RegEps) -> R {
    let half = x.of(0.5);
    let s = eps.as_real(x) * half.clone();
    // (cosh x/2 + cosh y/2) / (2 sinh(eps/2)) in log space
    let num = log_cosh_sum(&(x.clone() * half.clone()), &(y.clone() * half));
    let arg = (num - s.sinh().ln() - x.of(2.0).ln()).exp();
    x.of(2.0) * arg.asinh()
}

/// 𝓔(x, y; ε) = ∫_ε^Λ E(x,y,z) dz / tanh(z/2) in closed form:
/// 2 log²(cosh((x−y)/4)/sinh(ε/2)) − 2 log²(cosh((x+y)/4)/sinh(ε/2))
///   + x log(cosh((x+y)/4) cosh((x−y)/4) / sinh²(ε/2)).
pub fn kernel_ecal<R: Real>(x: &R, y: &R, eps: &RegEps) -> R {
    let q = x.of(0.25);
    let lp = log_cosh(&((x.clone() + y.clone()) * q.clone()));
    let lm = log_cosh(&((x.clone() - y.clone()) * q));
    let ls = (eps.as_real(x) * x.of(0.5)).sinh().ln();
    let ap = lp.clone() - ls.clone();
    let am = lm - ls;
    // 2 am^2 - 2 ap^2 + x (ap + am) = (ap + am) (x - 2 (ap - am));
    // the bracket is computed cancellation-free from log1p terms.
    let bracket = ecal_bracket(x, y);
    (ap + am) * bracket
}

/// x − 2[logcosh((x+y)/4) − logcosh((x−y)/4)] without cancellation at y ≫ x.
fn ecal_bracket<R: Real>(x: &R, y: &R) -> R {
    let half = x.of(0.5);
    let ya = y.abs();
    if ya >= *x {
        // logcosh((x+y)/4) − logcosh((x−y)/4) = x/2 + log1p(e^{−(x+y)/2}) − log1p(e^{−(y−x)/2})
        let d = log1p_exp_neg(&((x.clone() + ya.clone()) * half.clone()))
            - log1p_exp_neg(&((ya - x.clone()) * half));
        -d * x.of(2.0)
    } else {
        let q = x.of(0.25);
        let lp = log_cosh(&((x.clone() + y.clone()) * q.clone()));
        let lm = log_cosh(&((x.clone() - y.clone()) * q));
        x.clone() - (lp - lm) * x.of(2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_quad;
    use approx::assert_relative_eq;

    fn ecal_quadrature_oracle(x: f64, y: f64, eps: RegEps) -> f64 {
        let lam = lambda_upper(&x, &y, &eps);
        adaptive_quad(
            &|z: &f64| kernel_e(&x, &y, z) / (z / 2.0).tanh(),
            eps.value(),
            lam,
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn r_vanishing_z_returns_x() {
        // identical float path in numerator and denominator: exact
        assert_eq!(kernel_r(&3.0f64, &1.0, &0.0), 3.0);
    }

    #[test]
    fn r_large_z_tends_to_zero() {
        assert!(kernel_r(&1.0f64, &1.0, &60.0).abs() < 1e-10);
    }

    #[test]
    fn r_tail_monotone_beyond_x_plus_ten() {
        let (x, y) = (2.0f64, 1.5);
        let mut prev = kernel_r(&x, &y, &(x + 10.0)).abs();
        for i in 1..60 {
            let z = x + 10.0 + i as f64 * 0.5;
            let cur = kernel_r(&x, &y, &z).abs();
            assert!(cur <= prev, "tail not monotone at z={z}");
            prev = cur;
        }
    }

    #[cfg(feature = "extended")]
    #[test]
    fn kernels_match_extended_oracle() {
        use crate::real::{MpReal, Precision};
        let p = Precision::extended(256);
        let lift = |v: f64| MpReal::with_prec(p, v);
        let (x, y, z) = (2.0f64, 1.0, 1.0);
        let cases: [(f64, f64); 4] = [
            (kernel_r(&x, &y, &z), kernel_r(&lift(x), &lift(y), &lift(z)).f64()),
            (kernel_d(&x, &y, &z), kernel_d(&lift(x), &lift(y), &lift(z)).f64()),
            (kernel_e(&x, &y, &z), kernel_e(&lift(x), &lift(y), &lift(z)).f64()),
            (
                kernel_f(&x, &y, &z).unwrap(),
                kernel_f(&lift(x), &lift(y), &lift(z)).unwrap().f64(),
            ),
        ];
        for (ours, oracle) in cases {
            assert_relative_eq!(ours, oracle, max_relative = 1e-13);
        }
    }

    #[test]
    fn d_symmetry_is_exact_in_floats() {
        // same two summands in either order: bitwise equal
        assert_eq!(kernel_d(&3.0f64, &1.0, &2.0), kernel_d(&3.0f64, &2.0, &1.0));
        assert_relative_eq!(kernel_d(&2.0f64, &0.0, &0.0), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn e_vanishes_at_x_zero_and_goes_negative() {
        assert_eq!(kernel_e(&0.0f64, &1.0, &1.0), 0.0);
        assert!(kernel_e(&2.0f64, &20.0, &1.0) < 0.0);
    }

    #[test]
    fn f_symmetry_and_zero_at_x_zero() {
        assert_eq!(
            kernel_f(&2.0f64, &1.0, &3.0).unwrap(),
            kernel_f(&2.0f64, &3.0, &1.0).unwrap()
        );
        assert_eq!(kernel_f(&0.0f64, &1.0, &2.0).unwrap(), 0.0);
    }

    #[test]
    fn lambda_inversion_residual() {
        let eps = RegEps::new(0.5).unwrap();
        let (x, y) = (3.0f64, 2.0);
        let lam = lambda_upper(&x, &y, &eps);
        let lhs = (x / 2.0).cosh() + (y / 2.0).cosh();
        let rhs = 2.0 * (eps.value() / 2.0).sinh() * (lam / 2.0).sinh();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn lambda_at_zero_lengths() {
        let eps = RegEps::new(0.5).unwrap();
        let lam = lambda_upper(&0.0f64, &0.0, &eps);
        assert_relative_eq!(lam, 2.0 * (1.0 / (0.25f64).sinh()).asinh(), max_relative = 1e-14);
    }

    #[test]
    fn lambda_decreasing_in_eps() {
        let mut prev = f64::INFINITY;
        for e in [0.2, 0.4, 0.6, 0.8] {
            let lam = lambda_upper(&1.0f64, &1.0, &RegEps::new(e).unwrap());
            assert!(lam < prev);
            prev = lam;
        }
    }

    #[test]
    fn reg_eps_enforces_collar_bound() {
        assert!(RegEps::new(0.5).is_ok());
        assert!(RegEps::new(2.0 * 1.0f64.asinh() + 0.01).is_err());
        assert!(RegEps::new(0.0).is_err());
    }

    #[test]
    fn ecal_vanishes_at_x_zero() {
        let eps = RegEps::new(0.5).unwrap();
        assert_eq!(kernel_ecal(&0.0f64, &2.0, &eps), 0.0);
    }

    #[test]
    fn ecal_matches_quadrature_of_defining_integral() {
        let eps = RegEps::new(0.5).unwrap();
        let closed = kernel_ecal(&2.0f64, &1.0, &eps);
        let oracle = ecal_quadrature_oracle(2.0, 1.0, eps);
        assert_relative_eq!(closed, oracle, max_relative = 1e-8);
    }

    #[test]
    fn ecal_large_y_cancellation() {
        let eps = RegEps::new(0.5).unwrap();
        assert!(kernel_ecal(&1.0f64, &40.0, &eps).abs() < 1e-6);
    }

    #[test]
    fn ecal_antiderivative_property() {
        // f(x,y,z) = (x − 4 logcosh((x+y)/4) + 4 logcosh((x−y)/4)) log sinh(z/2)
        //          + Li2(−sinh²(z/2)/cosh²((x+y)/4)) − Li2(−sinh²(z/2)/cosh²((x−y)/4))
        // must satisfy df/dz = E(x,y,z)/tanh(z/2).
        use crate::specfun::dilog;
        let f = |x: f64, y: f64, z: f64| -> f64 {
            let a = ((x + y) / 4.0).cosh();
            let b = ((x - y) / 4.0).cosh();
            let s2 = (z / 2.0).sinh().powi(2);
            (x - 4.0 * a.ln() + 4.0 * b.ln()) * (z / 2.0).sinh().ln()
                + dilog(&(-s2 / (a * a))).unwrap()
                - dilog(&(-s2 / (b * b))).unwrap()
        };
        let mut rng = 987654321u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng >> 33) as f64 / (1u64 << 31) as f64) * 3.0 + 0.2
        };
        for _ in 0..20 {
            let (x, y, z) = (next(), next(), next());
            let h = 1e-5;
            let d = (f(x, y, z + h) - f(x, y, z - h)) / (2.0 * h);
            let rhs = kernel_e(&x, &y, &z) / (z / 2.0).tanh();
            assert_relative_eq!(d, rhs, max_relative = 1e-6);
        }
    }

    #[test]
    fn kernel_point_rejects_bad_coords() {
        assert!(KernelPoint::new(1.0, -0.1, 0.0).is_err());
        assert!(KernelPoint::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(KernelPoint::new(1.0, 2.0, 3.0).is_ok());
    }
}
