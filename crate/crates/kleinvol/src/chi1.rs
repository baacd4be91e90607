//! Closed-form volumes for the four Euler-characteristic −1 topologies, the
//! Klein-bottle trace-identity machinery, and the exponential expansion of
//! the one-bordered Klein bottle volume.

use crate::error::{Error, Result};
use crate::kernels::{kernel_d, kernel_f, RegEps};
use crate::real::Real;
use crate::specfun::{dilog, log_cosh, log_two_sinh_half};
use crate::topology::Topology;

/// V⁺ for the two orientable χ = −1 seeds: V⁺_{0,3} = 1 and
/// V⁺_{1,1}(L) = L²/48 + π²/12 (the convention that absorbs the elliptic
/// involution of the one-holed torus).
pub fn v_plus_chi1<R: Real>(top: Topology, lengths: &[R]) -> Result<R> {
    let proto = lengths.first().ok_or_else(|| Error::invalid("need at least one length"))?;
    match (top.twice_g, top.n) {
        (0, 3) => Ok(proto.of(1.0)),
        (2, 1) => {
            let l = &lengths[0];
            let pi = proto.pi();
            Ok(l.clone() * l.clone() / proto.of(48.0) + pi.clone() * pi / proto.of(12.0))
        }
        _ => Err(Error::UnsupportedTopology(format!(
            "v_plus_chi1 serves (0,3) and (1,1), got {top}"
        ))),
    }
}

/// V⁻_{1/2,2}(L₁, L₂; ε) = log[ cosh((L₁+L₂)/4) cosh((L₁−L₂)/4) / sinh²(ε/2) ].
pub fn v_minus_half_2<R: Real>(l1: &R, l2: &R, eps: &RegEps) -> R {
    let q = l1.of(0.25);
    let lp = log_cosh(&((l1.clone() + l2.clone()) * q.clone()));
    let lm = log_cosh(&((l1.clone() - l2.clone()) * q));
    let ls = (eps.as_real(l1) * l1.of(0.5)).sinh().ln();
    lp + lm - ls.clone() - ls
}

/// V⁻_{1,1}(L; ε) = −Li₂(−cosh²(L/4)/sinh²(ε/2)).
pub fn v_minus_1_1<R: Real>(l: &R, eps: &RegEps) -> Result<R> {
    let c = (l.clone() * l.of(0.25)).cosh();
    let s = (eps.as_real(l) * l.of(0.5)).sinh();
    let arg = -(c.clone() / s.clone()) * (c / s);
    Ok(-dilog(&arg)?)
}

/// The reflected form 2 log²(sinh(ε/2)/cosh(L/4)) + π²/6 + Li₂(−sinh²(ε/2)/cosh²(L/4)),
/// equal to [`v_minus_1_1`] by the dilogarithm reflection identity.
pub fn v_minus_1_1_reflected<R: Real>(l: &R, eps: &RegEps) -> Result<R> {
    let c = (l.clone() * l.of(0.25)).cosh();
    let s = (eps.as_real(l) * l.of(0.5)).sinh();
    let r = s.clone() / c.clone();
    let lg = r.ln();
    let pi = l.pi();
    Ok(lg.clone() * lg * l.of(2.0) + pi.clone() * pi / l.of(6.0) + dilog(&(-(s.clone() / c.clone()) * (s / c)))?)
}

/// State on the Klein-bottle Teichmüller space: s_i = sinh(ℓ_i/2) for two
/// consecutive one-sided geodesics, plus the boundary length.
#[derive(Debug, Clone, Copy)]
pub struct KbState {
    pub s0: f64,
    pub s1: f64,
    pub boundary: f64,
    pub eps: RegEps,
}

impl KbState {
    pub fn new(s0: f64, s1: f64, boundary: f64, eps: RegEps) -> Result<Self> {
        let floor = (eps.value() / 2.0).sinh();
        if s0 < floor || s1 < floor {
            return Err(Error::invalid(format!(
                "KB state needs s_i >= sinh(eps/2) = {floor:.6}, got ({s0}, {s1})"
            )));
        }
        if boundary < 0.0 || !boundary.is_finite() {
            return Err(Error::invalid("KB state: boundary length must be finite and >= 0"));
        }
        Ok(KbState { s0, s1, boundary, eps })
    }

    fn c2(&self) -> f64 {
        (self.boundary / 4.0).cosh().powi(2)
    }
}

/// Length ℓ of the unique two-sided primitive geodesic:
/// cosh(ℓ/2) = (s₀² + s₁² + cosh²(L/4)) / (2 s₀ s₁); the argument is ≥ 1 by AM–GM.
pub fn kb_two_sided_length(st: &KbState) -> f64 {
    let arg = (st.s0 * st.s0 + st.s1 * st.s1 + st.c2()) / (2.0 * st.s0 * st.s1);
    2.0 * arg.acosh()
}

/// Extends (s₀, s₁) in both directions via s_{i+1} = (s_i² + cosh²(L/4)) / s_{i−1}.
/// Returns s_i for i in [-window, window+1]; the sequence grows doubly fast,
/// so the window is capped by an overflow guard.
pub fn kb_sequence(st: &KbState, window: u32) -> Result<Vec<f64>> {
    if window > 16 {
        return Err(Error::Overflow(format!(
            "KB sequence window {window} exceeds the doubly-exponential overflow cap 16"
        )));
    }
    let c2 = st.c2();
    let len = 2 * window as usize + 2;
    let mut s = vec![0.0f64; len];
    let mid = window as usize; // index of s0
    s[mid] = st.s0;
    s[mid + 1] = st.s1;
    for i in (mid + 1)..(len - 1) {
        s[i + 1] = (s[i] * s[i] + c2) / s[i - 1];
        if !s[i + 1].is_finite() {
            return Err(Error::Overflow("KB sequence overflow (forward)".into()));
        }
    }
    for i in (1..=mid).rev() {
        s[i - 1] = (s[i] * s[i] + c2) / s[i + 1];
        if !s[i - 1].is_finite() {
            return Err(Error::Overflow("KB sequence overflow (backward)".into()));
        }
    }
    Ok(s)
}

/// |L − D(L,ℓ,ℓ) − Σ_{|i|≤K} F(L, ℓ_i, ℓ_{i+1})| for the Klein-bottle
/// McShane–Norbury identity, with ℓ_i = 2 asinh(s_i).
pub fn kb_mcshane_norbury_residual(st: &KbState, truncation: u32) -> Result<f64> {
    let s = kb_sequence(st, truncation)?;
    let ell = kb_two_sided_length(st);
    let l = st.boundary;
    let mut total = kernel_d(&l, &ell, &ell);
    for i in 0..(s.len() - 1) {
        let li = 2.0 * s[i].asinh();
        let lj = 2.0 * s[i + 1].asinh();
        total += kernel_f(&l, &li, &lj)?;
    }
    Ok((l - total).abs())
}

/// U_k^ε = (4/k) log(2 sinh(ε/2)) + (4/k) H_{k−1}
///        + Σ_{j=1}^k (2 sinh(ε/2))^{2j} / j² · C(k+j−1, 2j−1).
pub fn u_coeff(k: u32, eps: &RegEps) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("u_coeff: k >= 1"));
    }
    let kf = k as f64;
    let l2s = log_two_sinh_half(&eps.value())?;
    let harmonic: f64 = (1..k).map(|j| 1.0 / j as f64).sum();
    let t2s2 = (2.0 * (eps.value() / 2.0).sinh()).powi(2);
    let mut sum = 0.0f64;
    let mut pw = 1.0f64;
    for j in 1..=k {
        pw *= t2s2;
        sum += pw * binomial_f64(k + j - 1, 2 * j - 1) / (j as f64 * j as f64);
    }
    Ok(4.0 / kf * l2s + 4.0 / kf * harmonic + sum)
}

/// Binomial coefficient as f64 via the multiplicative formula; arguments at
/// desk scale keep every factor exactly representable.
pub(crate) fn binomial_f64(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Truncated expansion of V⁻_{1,1} for L > 2ε, with its geometric tail bound.
/// Returns (value, tail_bound).
pub fn v_minus_1_1_expansion(l: f64, eps: &RegEps, truncation: u32) -> Result<(f64, f64)> {
    if l <= 2.0 * eps.value() {
        return Err(Error::domain(format!(
            "expansion needs L > 2 eps, got L = {l}, eps = {}",
            eps.value()
        )));
    }
    let l2s = log_two_sinh_half(&eps.value())?;
    let pi2 = std::f64::consts::PI.powi(2);
    let mut v = l * l / 8.0 - l * l2s + pi2 / 6.0 + 2.0 * l2s * l2s;
    let mut last = 0.0f64;
    for k in 1..=truncation {
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        let e = (-(k as f64) * l / 2.0).exp();
        let term = -l * sgn / k as f64 * e + sgn * u_coeff(k, eps)? * e;
        v += term;
        last = term.abs();
    }
    // terms decay like e^{-(L/2 - eps)} per step
    let ratio = (-(l / 2.0 - eps.value())).exp();
    let tail = last * ratio / (1.0 - ratio).max(1e-300);
    Ok((v, tail))
}

/// b-weighted χ = −1 volume: the initial data of the deformed recursion.
/// b = 1 gives the total volume V⁺ + V⁻, b = 0 the orientable part.
pub fn total_chi1<R: Real>(top: Topology, lengths: &[R], eps: &RegEps, b: &R) -> Result<R> {
    if top.chi() != -1 {
        return Err(Error::UnsupportedTopology(format!("total_chi1 needs chi = -1, got {top}")));
    }
    let proto = lengths.first().ok_or_else(|| Error::invalid("need lengths"))?;
    match (top.twice_g, top.n) {
        (0, 3) => Ok(proto.of(1.0)),
        (1, 2) => {
            // b [ log(2 cosh L1/2 + 2 cosh L2/2) − 2 log(2 sinh eps/2) ]
            let core = v_minus_half_2(&lengths[0], &lengths[1], eps);
            Ok(b.clone() * core)
        }
        (2, 1) => {
            let l = &lengths[0];
            let vp = v_plus_chi1(top, lengths)?;
            let vm = v_minus_1_1(l, eps)?;
            // (1+b) Vp − b² (Vp − Vm)  [Vm = −Li2(...)]
            Ok((proto.of(1.0) + b.clone()) * vp.clone() - b.clone() * b.clone() * (vp - vm))
        }
        _ => Err(Error::UnsupportedTopology(format!("no chi = -1 case for {top}"))),
    }
}

/// Auxiliary (1/2,1) density 1/(2L tanh(L/4)) from the naive dictionary;
/// carries no ε-regularisation data and is not a Gendulphe–Norbury volume.
pub fn v_half_1_aux(l: f64) -> Result<f64> {
    if l <= 0.0 {
        return Err(Error::domain("v_half_1_aux has a pole at L = 0"));
    }
    Ok(1.0 / (2.0 * l * (l / 4.0).tanh()))
}
