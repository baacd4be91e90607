//! Special functions: the real dilogarithm and the stable log/cosh helpers
//! used throughout the kernel and volume formulas.

use crate::error::{Error, Result};
use crate::real::Real;

/// Li₂(x) = Σ_{k≥1} x^k/k² for |x| ≤ 1, analytically continued to x < 1.
///
/// Split: power series on |x| ≤ 1/2, the z/(z−1) transformation on
/// (−2, −1/2), reflection through 1/x for x ≤ −2, and the 1−x Landen
/// identity on (1/2, 1). Every argument arising in this crate is ≤ 0.
pub fn dilog<R: Real>(x: &R) -> Result<R> {
    if !x.is_finite() {
        return Err(Error::domain("dilog: non-finite argument"));
    }
    let one = x.of(1.0);
    if *x >= one {
        return Err(Error::domain("dilog: argument must be < 1"));
    }
    let half = x.of(0.5);
    if x.abs() <= half {
        return Ok(dilog_series(x));
    }
    if *x > half {
        // Li2(x) = pi^2/6 - ln(x) ln(1-x) - Li2(1-x), 1-x in (0, 1/2)
        let pi = x.pi();
        let u = one.clone() - x.clone();
        let v = pi.clone() * pi / x.of(6.0) - x.ln() * u.ln() - dilog_series(&u);
        return Ok(v);
    }
    if *x <= x.of(-2.0) {
        // Li2(x) = -pi^2/6 - ln^2(-x)/2 - Li2(1/x), 1/x in [-1/2, 0)
        let pi = x.pi();
        let l = (-x.clone()).ln();
        let v = -pi.clone() * pi / x.of(6.0) - l.clone() * l * half - dilog_series(&(one / x.clone()));
        return Ok(v);
    }
    // x in (-2, -1/2): Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2, x/(x-1) in (1/3, 2/3)
    let w = x.clone() / (x.clone() - one.clone());
    let l = (one - x.clone()).ln();
    Ok(-dilog_series(&w) - l.clone() * l * half)
}

fn dilog_series<R: Real>(x: &R) -> R {
    // |x| <= 2/3 always holds here; stop once terms fall below the roundoff
    // of the accumulated value.
    let mut sum = x.clone();
    let mut pw = x.clone();
    let tol = x.epsilon() * x.of(0.25);
    for k in 2..10_000u32 {
        pw = pw * x.clone();
        let term = pw.clone() / x.of((k as f64) * (k as f64));
        sum = sum + term.clone();
        if term.abs() <= tol.clone() * sum.abs().max_val(&x.of(1.0)) {
            break;
        }
    }
    sum
}

/// log(2 sinh(ε/2)) with the small-ε route log(ε) + log(sinh(ε/2)/(ε/2)).
pub fn log_two_sinh_half<R: Real>(eps: &R) -> Result<R> {
    if !eps.is_finite() || *eps <= eps.of(0.0) {
        return Err(Error::domain("log_two_sinh_half: need eps > 0"));
    }
    let h = eps.clone() * eps.of(0.5);
    if *eps < eps.of(1e-3) {
        // sinh(h)/h = 1 + h^2/6 + h^4/120 + ...
        let h2 = h.clone() * h.clone();
        let corr = h2.clone() * eps.of(1.0 / 6.0) + h2.clone() * h2 * eps.of(1.0 / 120.0);
        Ok(eps.ln() + corr.ln_1p())
    } else {
        Ok((eps.of(2.0) * h.sinh()).ln())
    }
}

/// log cosh(x), safe for arbitrarily large |x|.
pub fn log_cosh<R: Real>(x: &R) -> R {
    let a = x.abs();
    if a > x.of(30.0) {
        // cosh a = e^a (1 + e^{-2a}) / 2
        a.clone() + (-(a * x.of(2.0))).exp().ln_1p() - x.of(2.0).ln()
    } else {
        a.cosh().ln()
    }
}

/// log(cosh a + cosh b), safe for arbitrarily large arguments.
pub fn log_cosh_sum<R: Real>(a: &R, b: &R) -> R {
    let (hi, lo) = if a.abs() >= b.abs() { (a.abs(), b.abs()) } else { (b.abs(), a.abs()) };
    if hi <= a.of(30.0) {
        return (a.cosh() + b.cosh()).ln();
    }
    // cosh hi + cosh lo = (e^hi / 2) (1 + e^{-2 hi} + e^{lo - hi} + e^{-lo - hi})
    let r = (-(hi.clone() * a.of(2.0))).exp()
        + (lo.clone() - hi.clone()).exp()
        + (-(lo + hi.clone())).exp();
    hi + r.ln_1p() - a.of(2.0).ln()
}

/// log(1 + e^{-t}) for t ≥ 0 without underflow surprises.
pub fn log1p_exp_neg<R: Real>(t: &R) -> R {
    (-t.clone()).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_quad;
    use approx::assert_relative_eq;

    #[test]
    fn dilog_zero_is_zero() {
        assert_eq!(dilog(&0.0f64).unwrap(), 0.0);
    }

    #[test]
    fn dilog_minus_one_alternating_series_oracle() {
        // oracle: alternating series summed directly to tolerance
        let mut s = 0.0f64;
        for k in 1..4000u64 {
            let t = if k % 2 == 0 { 1.0 } else { -1.0 } / ((k * k) as f64);
            s += t;
        }
        let v = dilog(&-1.0f64).unwrap();
        assert_relative_eq!(v, s, max_relative = 1e-6);
        assert_relative_eq!(v, -std::f64::consts::PI.powi(2) / 12.0, max_relative = 1e-14);
    }

    #[test]
    fn dilog_reflection_fixed_point() {
        // z = -1 is a fixed point of the reflection: Li2(-1)+Li2(-1)+pi^2/6+log^2(1)/2 = 0
        let v = dilog(&-1.0f64).unwrap();
        let resid = v + v + std::f64::consts::PI.powi(2) / 6.0;
        assert!(resid.abs() < 1e-14, "resid = {resid:e}");
    }

    #[test]
    fn dilog_rejects_x_ge_one() {
        assert!(dilog(&1.0f64).is_err());
        assert!(dilog(&2.5f64).is_err());
    }

    #[test]
    fn dilog_matches_integral_oracle() {
        // Li2(x) = -∫_0^x log(1-t)/t dt, adaptive quadrature
        for &x in &[-10.0f64, -1.0, -0.3, 0.5] {
            let oracle = -adaptive_quad(
                &|t: &f64| if t.abs() < 1e-14 { -1.0 } else { (1.0 - t).ln() / t },
                0.0,
                x,
                1e-13,
            )
            .unwrap();
            assert_relative_eq!(dilog(&x).unwrap(), oracle, max_relative = 1e-10);
        }
    }

    #[test]
    fn dilog_monotone_increasing() {
        let xs: Vec<f64> = (0..60).map(|i| -12.0 + 0.21 * i as f64).collect();
        let mut prev = f64::NEG_INFINITY;
        for x in xs {
            let v = dilog(&x).unwrap();
            assert!(v > prev, "not increasing at x={x}");
            prev = v;
        }
    }

    #[cfg(feature = "extended")]
    #[test]
    fn dilog_extended_against_mpfr() {
        use crate::real::{mpfr_li2, MpReal, Precision};
        for &x in &[-7.3f64, -1.9, -0.8, -0.4, 0.3, 0.7] {
            let xm = MpReal::with_prec(Precision::extended(256), x);
            let ours = dilog(&xm).unwrap();
            let reference = mpfr_li2(&xm);
            let d = (ours.clone() - reference).abs();
            assert!(d.f64() < 1e-60, "x={x} diff={}", d.f64());
        }
    }

    #[test]
    fn log_two_sinh_half_unit_argument() {
        // sinh(e/2) = 1/2  =>  value 0
        let eps = 2.0f64 * 0.5f64.asinh();
        assert!(log_two_sinh_half(&eps).unwrap().abs() < 1e-15);
    }

    #[test]
    fn log_two_sinh_half_small_eps_behaves_like_log_eps() {
        for &e in &[1e-4f64, 1e-6, 1e-8] {
            let v = log_two_sinh_half(&e).unwrap();
            assert_relative_eq!(v, e.ln(), max_relative = 1e-6);
        }
        assert!(log_two_sinh_half(&0.0f64).is_err());
        assert!(log_two_sinh_half(&-1.0f64).is_err());
    }

    #[cfg(feature = "extended")]
    #[test]
    fn log_two_sinh_half_matches_extended_direct() {
        use crate::real::{MpReal, Precision};
        let e = 1.0f64;
        let v = log_two_sinh_half(&e).unwrap();
        let em = MpReal::with_prec(Precision::extended(256), e);
        let direct = log_two_sinh_half(&em).unwrap().f64();
        // 4 ulp at unit scale: the log sits near zero, so absolute ulps apply
        assert!((v - direct).abs() <= 4.0 * f64::EPSILON * direct.abs().max(1.0));
    }

    #[test]
    fn log_cosh_sum_large_arguments() {
        // exact in logs: cosh(400)+cosh(100) ~ e^400/2
        let v = log_cosh_sum(&400.0f64, &100.0);
        assert_relative_eq!(v, 400.0 - 2.0f64.ln(), max_relative = 1e-14);
        let w = log_cosh_sum(&3.0f64, &1.0);
        assert_relative_eq!(w, (3.0f64.cosh() + 1.0f64.cosh()).ln(), max_relative = 1e-15);
    }
}
