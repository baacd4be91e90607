//! Gauss–Legendre quadrature: fixed panels, adaptive bisection, and the
//! tensor rule used by the two-curve gluing term.

use crate::error::{Error, Result};
use crate::real::Real;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1],
/// computed by Newton iteration on P_n at the precision of `proto`.
pub fn gauss_legendre<R: Real>(n: usize, proto: &R) -> (Vec<R>, Vec<R>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let pi = proto.pi();
    for i in 0..n {
        // Chebyshev-like initial guess
        let guess = (pi.clone() * proto.of(i as f64 + 0.75) / proto.of(n as f64 + 0.5)).cos();
        let mut x = guess;
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, &x, proto);
            let dx = p / dp;
            x = x.clone() - dx.clone();
            if dx.abs() <= proto.epsilon() * proto.of(4.0) {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, &x, proto);
        let w = proto.of(2.0) / ((proto.of(1.0) - x.clone() * x.clone()) * dp.clone() * dp);
        nodes.push(x);
        weights.push(w);
    }
    (nodes, weights)
}

fn legendre_and_deriv<R: Real>(n: usize, x: &R, proto: &R) -> (R, R) {
    let mut p0 = proto.of(1.0);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = proto.of(k as f64);
        let p2 = (proto.of(2.0 * k as f64 - 1.0) * x.clone() * p1.clone()
            - proto.of(k as f64 - 1.0) * p0)
            / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = proto.of(n as f64) * (x.clone() * p1.clone() - p0) / (x.clone() * x.clone() - proto.of(1.0));
    (p1, dp)
}

/// One fixed rule applied to [a, b].
pub fn fixed_quad<R: Real, F: Fn(&R) -> R>(
    f: &F,
    a: &R,
    b: &R,
    nodes: &[R],
    weights: &[R],
) -> R {
    let half = a.of(0.5);
    let mid = (a.clone() + b.clone()) * half.clone();
    let rad = (b.clone() - a.clone()) * half;
    let mut sum = a.of(0.0);
    for (x, w) in nodes.iter().zip(weights) {
        let t = mid.clone() + rad.clone() * x.clone();
        sum = sum + w.clone() * f(&t);
    }
    sum * rad
}

/// Adaptive panel quadrature with error control by rule doubling.
///
/// Splits until |G_n − G_2n| on each panel is below the panel's share of
/// `tol` (absolute, relative to the running magnitude). Returns the value;
/// see [`adaptive_quad_with_estimate`] for the error estimate.
pub fn adaptive_quad<R: Real, F: Fn(&R) -> R>(f: &F, a: R, b: R, tol: f64) -> Result<R> {
    adaptive_quad_with_estimate(f, a, b, tol).map(|(v, _)| v)
}

pub fn adaptive_quad_with_estimate<R: Real, F: Fn(&R) -> R>(
    f: &F,
    a: R,
    b: R,
    tol: f64,
) -> Result<(R, R)> {
    if a == b {
        return Ok((a.of(0.0), a.of(0.0)));
    }
    let proto = a.clone();
    let order = base_order(&proto);
    let (lo_n, lo_w) = gauss_legendre(order, &proto);
    let (hi_n, hi_w) = gauss_legendre(2 * order, &proto);

    let mut stack = vec![(a.clone(), b.clone(), 0u32)];
    let mut total = proto.of(0.0);
    let mut err = proto.of(0.0);
    let scale_floor = proto.of(1.0);
    let max_depth = 40;
    while let Some((x0, x1, depth)) = stack.pop() {
        let coarse = fixed_quad(f, &x0, &x1, &lo_n, &lo_w);
        let fine = fixed_quad(f, &x0, &x1, &hi_n, &hi_w);
        let delta = (fine.clone() - coarse).abs();
        let scale = total.abs().max_val(&fine.abs()).max_val(&scale_floor);
        if delta <= scale.clone() * proto.of(tol) * proto.of(0.25) || depth >= max_depth {
            if depth >= max_depth && delta > scale * proto.of(tol) {
                return Err(Error::convergence(
                    "adaptive quadrature: subdivision cap reached before tolerance",
                ));
            }
            total = total + fine;
            err = err + delta;
        } else {
            let mid = (x0.clone() + x1.clone()) * proto.of(0.5);
            stack.push((x0, mid.clone(), depth + 1));
            stack.push((mid, x1, depth + 1));
        }
    }
    Ok((total, err))
}

/// Tensor Gauss–Legendre over [0,a]×[0,b] with panelization; integrand is
/// given panel-node tables so the caller can hoist per-axis work.
pub fn tensor_quad<R: Real, F: Fn(&R, &R) -> R>(
    f: &F,
    a: &R,
    b: &R,
    panels: usize,
    order: usize,
) -> R {
    let proto = a.clone();
    let (gn, gw) = gauss_legendre(order, &proto);
    let mut xs = Vec::new();
    let mut wx = Vec::new();
    let mut ys = Vec::new();
    let mut wy = Vec::new();
    for p in 0..panels {
        let (x0, x1) = panel_edges(a, p, panels);
        let (y0, y1) = panel_edges(b, p, panels);
        for (t, w) in gn.iter().zip(&gw) {
            let half = proto.of(0.5);
            xs.push((x0.clone() + x1.clone()) * half.clone() + (x1.clone() - x0.clone()) * half.clone() * t.clone());
            wx.push(w.clone() * (x1.clone() - x0.clone()) * half.clone());
            ys.push((y0.clone() + y1.clone()) * half.clone() + (y1.clone() - y0.clone()) * half.clone() * t.clone());
            wy.push(w.clone() * (y1.clone() - y0.clone()) * half);
        }
    }
    let mut sum = proto.of(0.0);
    for (x, wxi) in xs.iter().zip(&wx) {
        let mut row = proto.of(0.0);
        for (y, wyi) in ys.iter().zip(&wy) {
            row = row + wyi.clone() * f(x, y);
        }
        sum = sum + wxi.clone() * row;
    }
    sum
}

fn panel_edges<R: Real>(upper: &R, p: usize, panels: usize) -> (R, R) {
    // mildly geometric towards the tail: finer panels near 0 where kernels vary
    let frac = |i: usize| -> f64 {
        let t = i as f64 / panels as f64;
        t * t * (3.0 - 2.0 * t) * 0.4 + t * 0.6
    };
    (upper.of(0.0) + upper.clone() * upper.of(frac(p)), upper.of(0.0) + upper.clone() * upper.of(frac(p + 1)))
}

fn base_order<R: Real>(proto: &R) -> usize {
    // higher order pays off at extended precision
    if proto.epsilon().f64() < 1e-20 {
        40
    } else {
        16
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        let (n, w) = gauss_legendre(8, &1.0f64);
        // degree-15 polynomial must be exact
        let f = |x: &f64| x.powi(15) + 3.0 * x.powi(4) + 1.0;
        let v = fixed_quad(&f, &-1.0, &1.0, &n, &w);
        assert_relative_eq!(v, 3.0 * 2.0 / 5.0 + 2.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_decaying_tail() {
        let f = |x: &f64| (-x / 2.0).exp() * x.cosh().ln();
        let (v, e) = adaptive_quad_with_estimate(&f, 0.0, 80.0, 1e-12).unwrap();
        // reference from a much finer run
        let (v2, _) = adaptive_quad_with_estimate(&f, 0.0, 80.0, 1e-14).unwrap();
        assert!((v - v2).abs() <= (e + 1e-12 * v.abs()));
    }

    #[test]
    fn tensor_rule_symmetric_in_equal_slots() {
        let f = |x: &f64, y: &f64| (x - y).powi(2) * (-(x + y) / 2.0).exp();
        let a = tensor_quad(&f, &20.0, &20.0, 6, 12);
        let g = |x: &f64, y: &f64| (y - x).powi(2) * (-(y + x) / 2.0).exp();
        let b = tensor_quad(&g, &20.0, &20.0, 6, 12);
        assert_eq!(a, b);
    }

    #[cfg(feature = "extended")]
    #[test]
    fn gl_extended_precision_nodes() {
        use crate::real::{Field, MpReal, Precision, Real};
        let proto = MpReal::with_prec(Precision::extended(256), 0.0);
        let (n, w) = gauss_legendre(24, &proto);
        // sum of weights = 2 to full precision
        let mut s = proto.of(0.0);
        for wi in &w {
            s = s + wi.clone();
        }
        assert!((s.f64() - 2.0).abs() < 1e-15);
        assert!((n[0].clone() + n[23].clone()).abs().f64() < 1e-60, "nodes symmetric");
    }
}
