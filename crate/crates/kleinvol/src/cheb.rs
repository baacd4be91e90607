//! Adaptive Chebyshev approximation of one-variable volume slices.
//!
//! The recursion integrates inner volumes against kernels thousands of
//! times; fitting each inner slice once on [0, P_max] and evaluating the
//! expansion via Clenshaw recursion makes the nested quadrature cheap.

use crate::error::{Error, Result};
use crate::real::Real;

/// Chebyshev expansion of a function on [a, b].
#[derive(Debug, Clone)]
pub struct Chebyshev<R: Real> {
    a: R,
    b: R,
    coeffs: Vec<R>,
}

impl<R: Real> Chebyshev<R> {
    /// Interpolate `f` at `n` Chebyshev points of the first kind.
    pub fn fit<F: Fn(&R) -> R>(f: &F, a: R, b: R, n: usize) -> Self {
        let proto = a.clone();
        let pi = proto.pi();
        let half = proto.of(0.5);
        let mid = (a.clone() + b.clone()) * half.clone();
        let rad = (b.clone() - a.clone()) * half.clone();
        let mut vals = Vec::with_capacity(n);
        let mut angles = Vec::with_capacity(n);
        for k in 0..n {
            let theta = pi.clone() * proto.of(k as f64 + 0.5) / proto.of(n as f64);
            let x = mid.clone() + rad.clone() * theta.cos();
            vals.push(f(&x));
            angles.push(theta);
        }
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            let mut s = proto.of(0.0);
            for k in 0..n {
                s = s + vals[k].clone() * (angles[k].clone() * proto.of(j as f64)).cos();
            }
            coeffs.push(s * proto.of(2.0) / proto.of(n as f64));
        }
        coeffs[0] = coeffs[0].clone() * half;
        Chebyshev { a, b, coeffs }
    }

    /// Refit with doubling degree until `probes` off-grid points agree with
    /// `f` to `tol` (absolute, relative to the slice's scale).
    pub fn fit_adaptive<F: Fn(&R) -> R>(
        f: &F,
        a: R,
        b: R,
        tol: f64,
        degree_cap: usize,
    ) -> Result<(Self, f64)> {
        let mut n = 17usize;
        loop {
            let fit = Chebyshev::fit(f, a.clone(), b.clone(), n);
            let resid = fit.probe_residual(f, 13);
            let scale = fit.scale().f64().abs().max(1.0);
            if resid <= tol * scale {
                return Ok((fit, resid));
            }
            if n >= degree_cap {
                return Err(Error::convergence(format!(
                    "chebyshev fit: degree cap {degree_cap} reached, residual {resid:e} > tol {tol:e}"
                )));
            }
            n = (2 * n - 1).min(degree_cap);
        }
    }

    /// Max deviation from `f` at `m` equispaced off-grid probes.
    pub fn probe_residual<F: Fn(&R) -> R>(&self, f: &F, m: usize) -> f64 {
        let proto = self.a.clone();
        let mut worst = 0.0f64;
        for i in 0..m {
            let t = (i as f64 + 0.371) / m as f64;
            let x = self.a.clone() + (self.b.clone() - self.a.clone()) * proto.of(t);
            let d = (self.eval(&x) - f(&x)).abs().f64();
            worst = worst.max(d);
        }
        worst
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: &R) -> R {
        let proto = x.clone();
        let t = (x.clone() * proto.of(2.0) - self.a.clone() - self.b.clone())
            / (self.b.clone() - self.a.clone());
        let two_t = t.clone() * proto.of(2.0);
        let mut b1 = proto.of(0.0);
        let mut b2 = proto.of(0.0);
        for c in self.coeffs.iter().rev() {
            let next = two_t.clone() * b1.clone() - b2 + c.clone();
            b2 = b1;
            b1 = next;
        }
        b1 - b2 * t
    }

    pub fn domain(&self) -> (R, R) {
        (self.a.clone(), self.b.clone())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Reassemble from persisted parts.
    pub fn from_parts(a: R, b: R, coeffs: Vec<R>) -> Self {
        Chebyshev { a, b, coeffs }
    }

    /// Crude magnitude of the function on the interval (|c0| + |c1|).
    fn scale(&self) -> R {
        let mut s = self.coeffs[0].abs();
        if self.coeffs.len() > 1 {
            s = s + self.coeffs[1].abs();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interpolates_smooth_function() {
        let f = |x: &f64| (x / 3.0).cosh().ln() + x * x / 48.0;
        let (c, resid) = Chebyshev::fit_adaptive(&f, 0.0, 40.0, 1e-11, 257).unwrap();
        assert!(resid < 1e-9);
        for x in [0.0, 1.7, 13.0, 39.9] {
            assert_relative_eq!(c.eval(&x), f(&x), max_relative = 1e-9);
        }
    }

    #[test]
    fn constant_stays_constant() {
        let (c, _) = Chebyshev::fit_adaptive(&|_: &f64| 1.0, 0.0, 10.0, 1e-12, 65).unwrap();
        assert_relative_eq!(c.eval(&7.3), 1.0, max_relative = 1e-13);
        assert!(c.degree() <= 17);
    }

    #[test]
    fn cap_is_enforced() {
        // a kink cannot be fit to 1e-12 with bounded degree
        let f = |x: &f64| (x - 5.0).abs();
        assert!(Chebyshev::fit_adaptive(&f, 0.0, 10.0, 1e-12, 129).is_err());
    }
}
