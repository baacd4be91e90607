//! The b-deformed volume recursion with nested adaptive quadrature over
//! surrogate-approximated inner volumes.
//!
//! Dispatch: χ = −1 queries go straight to the closed forms; deeper
//! topologies are reduced through the three gluing channels
//!
//!   L₀ V = Σ_i ∫ p dp R(L₀,L_i,p) V(p, rest)
//!        + ½ ∫∫ p q dp dq D(L₀,p,q) [ (1+b) V_{g−1,n+2}(p,q,·) + Σ V·V ]
//!        + b ∫ p dp 𝓔(L₀,p;ε) V_{g−1/2,n+1}(p,·),
//!
//! with the p dp measure of the unfolding lemmas throughout.

use crate::chi1::{total_chi1, v_minus_1_1, v_minus_half_2};
use crate::error::{Error, Result};
use crate::kernels::{kernel_d, kernel_ecal, kernel_r, RegEps};
use crate::quad::{adaptive_quad_with_estimate, gauss_legendre};
use crate::real::Real;
use crate::surrogate::{grid_round, Surrogate, Surrogate2, SurrogateCache, SurrogateKey};
use crate::topology::{Topology, VolumeKind};
use std::sync::Arc;

/// A volume evaluation request. The first length is the distinguished L₀ of
/// the recursion.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct VolumeQuery {
    pub top: Topology,
    pub lengths: Vec<f64>,
    pub eps: RegEps,
    pub b: f64,
    pub tol: f64,
}

impl VolumeQuery {
    pub fn validate(&self) -> Result<()> {
        if self.lengths.len() != self.top.n as usize {
            return Err(Error::invalid(format!(
                "{} boundary lengths given for {}",
                self.lengths.len(),
                self.top
            )));
        }
        for &l in &self.lengths {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::invalid(format!("boundary length {l} must be finite and >= 0")));
            }
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::invalid("b must be finite and >= 0"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DispatchPath {
    ClosedForm,
    Recursion,
    UnstableZero,
}

#[derive(Debug, Clone)]
pub struct VolumeResult<R: Real> {
    pub value: R,
    /// Propagated error estimate (quadrature deltas + surrogate residuals +
    /// truncation tails).
    pub error: f64,
    pub path: DispatchPath,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EngineConfig {
    /// Gauss–Legendre order per panel of the tensor rule for the D-term.
    pub d_term_order: usize,
    /// Panel width of the tensor rule; the integrand is analytic with
    /// singularities at distance ~2π, so width ≤ 6 keeps panels spectral.
    pub d_panel_width: f64,
    pub surrogate_degree_cap: usize,
    pub cache_enabled: bool,
    /// Hard ceiling on the truncation radius.
    pub pmax_cap: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            d_term_order: 16,
            d_panel_width: 8.0,
            surrogate_degree_cap: 257,
            cache_enabled: true,
            pmax_cap: 320.0,
        }
    }
}

impl EngineConfig {
    /// Settings tuned for the ≥200-bit verification tier.
    pub fn extended_tier() -> Self {
        EngineConfig {
            d_term_order: 40,
            d_panel_width: 5.0,
            pmax_cap: 420.0,
            ..EngineConfig::default()
        }
    }
}

pub struct Engine<R: Real> {
    proto: R,
    pub cfg: EngineConfig,
    cache: SurrogateCache<R>,
}

impl Engine<f64> {
    pub fn new_f64(cfg: EngineConfig) -> Self {
        let enabled = cfg.cache_enabled;
        Engine { proto: 0.0, cfg, cache: SurrogateCache::new(enabled) }
    }

    /// Attach a disk directory for surrogate persistence (f64 tier only).
    pub fn attach_disk_cache(&mut self, dir: std::path::PathBuf) -> std::io::Result<()> {
        self.cache.attach_disk(dir)
    }
}

impl<R: Real> Engine<R> {
    /// `proto` fixes the working precision of every internal value.
    pub fn with_proto(proto: R, cfg: EngineConfig) -> Self {
        let enabled = cfg.cache_enabled;
        Engine { proto, cfg, cache: SurrogateCache::new(enabled) }
    }

    pub fn cache_entries(&self) -> usize {
        self.cache.len()
    }

    /// Total b-weighted volume V^{ε,b} (b = 0 orientable, b = 1 total).
    pub fn total_volume(&self, q: &VolumeQuery) -> Result<VolumeResult<R>> {
        q.validate()?;
        self.volume(VolumeKind::Weighted, q)
    }

    /// Gendulphe–Norbury volume V^{−,ε} via the κ-signed recursion.
    pub fn v_minus(&self, q: &VolumeQuery) -> Result<VolumeResult<R>> {
        q.validate()?;
        self.volume(VolumeKind::Minus, q)
    }

    /// Orientable V⁺ (the b = 0 point of the weighted recursion).
    pub fn v_plus(&self, q: &VolumeQuery) -> Result<VolumeResult<R>> {
        q.validate()?;
        self.volume(VolumeKind::Plus, q)
    }

    fn volume(&self, kind: VolumeKind, q: &VolumeQuery) -> Result<VolumeResult<R>> {
        let lengths: Vec<R> = q.lengths.iter().map(|&l| self.proto.of(l)).collect();
        self.volume_lifted(kind, q.top, &lengths, &q.eps, q.b, q.tol)
    }

    fn volume_lifted(
        &self,
        kind: VolumeKind,
        top: Topology,
        lengths: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
    ) -> Result<VolumeResult<R>> {
        if !top.is_stable() {
            // set to zero by convention so the bookkeeping stays total
            return Ok(VolumeResult {
                value: self.proto.of(0.0),
                error: 0.0,
                path: DispatchPath::UnstableZero,
            });
        }
        // structural zeros
        let zero = |path| {
            Ok(VolumeResult { value: self.proto.of(0.0), error: 0.0, path })
        };
        match kind {
            VolumeKind::Plus if !top.genus_is_integer() => return zero(DispatchPath::ClosedForm),
            VolumeKind::Minus if top.twice_g == 0 => return zero(DispatchPath::ClosedForm),
            _ => {}
        }
        if top.chi() == -1 {
            let v = self.chi1_value(kind, top, lengths, eps, b)?;
            return Ok(VolumeResult { value: v, error: 0.0, path: DispatchPath::ClosedForm });
        }
        self.recurse(kind, top, lengths, eps, b, tol)
    }

    fn chi1_value(&self, kind: VolumeKind, top: Topology, lengths: &[R], eps: &RegEps, b: f64) -> Result<R> {
        match kind {
            VolumeKind::Weighted => total_chi1(top, lengths, eps, &self.proto.of(b)),
            VolumeKind::Plus => total_chi1(top, lengths, eps, &self.proto.of(0.0)),
            VolumeKind::Minus => match (top.twice_g, top.n) {
                (1, 2) => Ok(v_minus_half_2(&lengths[0], &lengths[1], eps)),
                (2, 1) => v_minus_1_1(&lengths[0], eps),
                (0, 3) => Ok(self.proto.of(0.0)),
                _ => Err(Error::UnsupportedTopology(format!("chi=-1 minus volume for {top}"))),
            },
        }
    }

    fn recurse(
        &self,
        kind: VolumeKind,
        top: Topology,
        lengths: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
    ) -> Result<VolumeResult<R>> {
        // the recursion divides by L0; rotate a positive length into slot 0,
        // or extrapolate the all-zero corner from small distinguished lengths
        if lengths[0].is_zero() {
            if let Some(imax) = (0..lengths.len()).find(|&i| !lengths[i].is_zero()) {
                let mut rot = lengths.to_vec();
                rot.swap(0, imax);
                return self.recurse(kind, top, &rot, eps, b, tol);
            }
            return self.extrapolate_zero_corner(kind, top, lengths, eps, b, tol);
        }

        let l0 = lengths[0].clone();
        let rest = &lengths[1..];
        let mut sum = self.proto.of(0.0);
        let mut err = 0.0f64;

        // R-channel: one inner surface per non-distinguished boundary
        for i in 0..rest.len() {
            let mut inner_lengths: Vec<R> = Vec::with_capacity(rest.len());
            for (j, l) in rest.iter().enumerate() {
                if j != i {
                    inner_lengths.push(l.clone());
                }
            }
            let inner_top = Topology::new(top.twice_g, top.n - 1)?;
            let (v, e) = self.r_term(kind, &l0, &rest[i], inner_top, &inner_lengths, eps, b, tol)?;
            sum = sum + v;
            err += e;
        }

        // D-channel
        let (vd, ed) = self.d_term(kind, &l0, top, rest, eps, b, tol)?;
        sum = sum + vd;
        err += ed;

        // E-channel (cross-capped pair of pants)
        let (ve, ee) = self.e_term(kind, &l0, top, rest, eps, b, tol)?;
        sum = sum + ve;
        err += ee;

        let value = sum / l0.clone();
        Ok(VolumeResult { value, error: err / l0.f64().abs(), path: DispatchPath::Recursion })
    }

    /// ∫ p dp R(L0, Li, p) V_inner(p, frozen).
    fn r_term(
        &self,
        kind: VolumeKind,
        l0: &R,
        li: &R,
        inner_top: Topology,
        frozen: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
    ) -> Result<(R, f64)> {
        if self.inner_is_zero(kind, inner_top) {
            return Ok((self.proto.of(0.0), 0.0));
        }
        let pref = 4.0 * (li.f64() / 2.0).cosh() * (l0.f64() / 2.0).cosh();
        let pmax = self.truncation_radius(inner_top, pref, tol);
        let sur = self.surrogate_1d(kind, inner_top, frozen, eps, b, tol, pmax)?;
        let f = |p: &R| p.clone() * kernel_r(l0, li, p) * sur.eval(p);
        let (v, e) = adaptive_quad_with_estimate(&f, self.proto.of(0.0), self.proto.of(pmax), tol * 0.1)?;
        let kernel_l1 = pref * 2.0 * (1.0 + pmax);
        let err = e.f64() + sur.residual * kernel_l1 + self.tail_bound(pref, pmax, inner_top);
        Ok((v, err))
    }

    /// ½ ∫∫ p q dp dq D(L0,p,q) [(1+b) V_{g−1,n+2}(p,q,·) + splits].
    fn d_term(
        &self,
        kind: VolumeKind,
        l0: &R,
        top: Topology,
        rest: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
    ) -> Result<(R, f64)> {
        let n = rest.len() as u32;
        let mut err = 0.0f64;

        // connected piece coefficients per kind
        //   Weighted: (1+b) V_{g-1,n+2}
        //   Plus:     V+_{g-1,n+2}
        //   Minus:    V+_{g-1,n+2} + 2 V-_{g-1,n+2}
        let mut connected: Vec<(f64, VolumeKind, Topology)> = Vec::new();
        if top.twice_g >= 2 {
            let tc = Topology::new(top.twice_g - 2, n + 2)?;
            match kind {
                VolumeKind::Weighted => connected.push((1.0 + b, VolumeKind::Weighted, tc)),
                VolumeKind::Plus => connected.push((1.0, VolumeKind::Plus, tc)),
                VolumeKind::Minus => {
                    connected.push((1.0, VolumeKind::Plus, tc));
                    connected.push((2.0, VolumeKind::Minus, tc));
                }
            }
        }

        // split pieces: ordered (g1,J1),(g2,J2); kinds per recursion
        let splits = self.enumerate_splits(kind, top, n)?;

        if connected.iter().all(|(_, k, t)| self.inner_is_zero(*k, *t) || !t.is_stable())
            && splits.is_empty()
        {
            return Ok((self.proto.of(0.0), 0.0));
        }

        let pref = (l0.f64() / 2.0).exp().max(4.0);
        let deepest = Topology::new(top.twice_g.saturating_sub(2), n + 2).unwrap_or(top);
        let pmax = self.truncation_radius(deepest, pref, tol);

        // connected part: (0,3) inners are the constant 1; anything deeper
        // needs a genuine 2D surrogate
        let mut const_weight = 0.0f64;
        let mut inner2: Vec<(f64, Arc2<R>)> = Vec::new();
        for (w, k, t) in &connected {
            if self.inner_is_zero(*k, *t) || !t.is_stable() {
                continue;
            }
            if (t.twice_g, t.n) == (0, 3) {
                const_weight += *w;
                continue;
            }
            let s2 = self.surrogate_2d(*k, *t, rest, eps, b, tol, pmax)?;
            err += s2.residual * pref * (1.0 + pmax).powi(2);
            inner2.push((*w, s2));
        }
        // split part: products of 1D surrogates
        let mut inner_pairs: Vec<(Arc<Surrogate<R>>, Arc<Surrogate<R>>)> = Vec::new();
        for (t1, j1, t2, j2) in &splits {
            let f1: Vec<R> = j1.iter().map(|&i| rest[i].clone()).collect();
            let f2: Vec<R> = j2.iter().map(|&i| rest[i].clone()).collect();
            for (ka, kb) in split_kind_pairs(kind) {
                if self.inner_is_zero(ka, *t1) || self.inner_is_zero(kb, *t2) {
                    continue;
                }
                let s1 = self.surrogate_1d(ka, *t1, &f1, eps, b, tol, pmax)?;
                let s2 = self.surrogate_1d(kb, *t2, &f2, eps, b, tol, pmax)?;
                err += (s1.residual + s2.residual) * pref * (1.0 + pmax).powi(2);
                inner_pairs.push((s1, s2));
            }
        }
        if const_weight == 0.0 && inner2.is_empty() && inner_pairs.is_empty() {
            return Ok((self.proto.of(0.0), 0.0));
        }

        let varying: Option<Box<dyn Fn(&R, &R) -> R + '_>> =
            if inner2.is_empty() && inner_pairs.is_empty() {
                None
            } else {
                Some(Box::new(move |p: &R, q: &R| -> R {
                    let mut acc = p.of(0.0);
                    for (w, s2) in &inner2 {
                        acc = acc + s2.eval(p, q) * p.of(*w);
                    }
                    for (s1, s2) in &inner_pairs {
                        acc = acc + s1.eval(p) * s2.eval(q);
                    }
                    acc
                }))
            };
        let vbound = (1.0 + pmax).powf(2.0 * (deepest.level() as f64 + 1.0));
        let cell_floor = tol * 1e-4 / (1.0 + pmax).powi(2);
        let (v, quad_est) =
            self.d_tensor(l0, pmax, self.cfg.d_term_order, const_weight, varying.as_deref(), vbound, cell_floor);
        err += quad_est;
        err += self.tail_bound(pref, pmax, deepest);
        Ok((v * self.proto.of(0.5), err))
    }

    /// b ∫ p dp 𝓔(L0,p;ε) V_{g−1/2,n+1}(p,·)  (Weighted), and the κ-signed
    /// variants for Minus.
    fn e_term(
        &self,
        kind: VolumeKind,
        l0: &R,
        top: Topology,
        rest: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
    ) -> Result<(R, f64)> {
        if top.twice_g == 0 {
            return Ok((self.proto.of(0.0), 0.0));
        }
        let inner_top = Topology::new(top.twice_g - 1, top.n)?;
        let weight_kinds: Vec<(f64, VolumeKind)> = match kind {
            VolumeKind::Plus => return Ok((self.proto.of(0.0), 0.0)),
            VolumeKind::Weighted => {
                if b == 0.0 {
                    return Ok((self.proto.of(0.0), 0.0));
                }
                vec![(b, VolumeKind::Weighted)]
            }
            // V+ of a half-integer complement vanishes; listing both keeps
            // the integer/half-integer cases uniform
            VolumeKind::Minus => vec![(1.0, VolumeKind::Plus), (1.0, VolumeKind::Minus)],
        };
        let pref = (l0.f64().powi(2) / 2.0 + 2.0 * l0.f64() + 4.0).max(4.0);
        let pmax = self.truncation_radius(inner_top, pref, tol);
        let mut total = self.proto.of(0.0);
        let mut err = 0.0f64;
        for (w, k) in weight_kinds {
            if self.inner_is_zero(k, inner_top) || !inner_top.is_stable() {
                continue;
            }
            let sur = self.surrogate_1d(k, inner_top, rest, eps, b, tol, pmax)?;
            let f = |p: &R| p.clone() * kernel_ecal(l0, p, eps) * sur.eval(p);
            let (v, e) =
                adaptive_quad_with_estimate(&f, self.proto.of(0.0), self.proto.of(pmax), tol * 0.1)?;
            total = total + v * self.proto.of(w);
            err += e.f64() + sur.residual * pref * (1.0 + pmax) + self.tail_bound(pref, pmax, inner_top);
        }
        Ok((total, err))
    }

    /// Tensor quadrature of p q D(L0,p,q) [c + f(p,q)] with per-axis
    /// hoisting: with A = cosh(·/2), B± = cosh((L0±·)/2),
    ///   D(x,p,q) = x + ln[ (A_p+B⁻_q)(A_q+B⁻_p) / ((A_p+B⁺_q)(A_q+B⁺_p)) ],
    /// one log per cell. The integrand is symmetric, so cells are summed
    /// over j ≤ i, and far-tail cells below the decay bound are skipped.
    /// Returns (value, error estimate from the panel analyticity bound).
    fn d_tensor(
        &self,
        l0: &R,
        pmax: f64,
        order: usize,
        const_inner: f64,
        varying: Option<&(dyn Fn(&R, &R) -> R + '_)>,
        vbound: f64,
        cell_floor: f64,
    ) -> (R, f64) {
        let proto = &self.proto;
        let panels = (pmax / self.cfg.d_panel_width).ceil().max(2.0) as usize;
        let (gn, gw) = gauss_legendre(order, proto);
        let half = proto.of(0.5);
        let x = l0.clone();
        let x_f = l0.f64();
        struct Axis<R> {
            node: R,
            w: R,
            a: R,
            bp: R,
            bm: R,
            node_f: f64,
            w_f: f64,
        }
        let mut axis: Vec<Axis<R>> = Vec::with_capacity(panels * order);
        let edges: Vec<R> = (0..=panels)
            .map(|i| proto.of(pmax) * proto.of(i as f64) / proto.of(panels as f64))
            .collect();
        for pnl in 0..panels {
            let x0 = &edges[pnl];
            let x1 = &edges[pnl + 1];
            let mid = (x0.clone() + x1.clone()) * half.clone();
            let rad = (x1.clone() - x0.clone()) * half.clone();
            for (t, w) in gn.iter().zip(&gw) {
                let node = mid.clone() + rad.clone() * t.clone();
                let a = (node.clone() * half.clone()).cosh();
                let bp = ((x.clone() + node.clone()) * half.clone()).cosh();
                let bm = ((x.clone() - node.clone()) * half.clone()).cosh();
                let wt = w.clone() * rad.clone();
                axis.push(Axis {
                    node_f: node.f64(),
                    w_f: wt.f64() * node.f64(),
                    node,
                    w: wt,
                    a,
                    bp,
                    bm,
                });
            }
        }
        let mut sum = proto.of(0.0);
        let mut abs_mass = 0.0f64;
        let mut skipped = 0.0f64;
        for i in 0..axis.len() {
            let ai = &axis[i];
            for j in 0..=i {
                let aj = &axis[j];
                // cheap skip: |D| <= (x+4) 8 cosh(x/2) e^{-max(p,q)/2} beyond x+10
                let pq = ai.node_f.max(aj.node_f);
                if pq > x_f + 10.0 {
                    let dbound = (x_f + 4.0) * 8.0 * (x_f / 2.0).exp() * (-pq / 2.0).exp();
                    let cell_bound = (ai.w_f * aj.w_f).abs() * dbound * vbound;
                    if cell_bound < cell_floor {
                        skipped += cell_bound;
                        continue;
                    }
                }
                let num = (ai.a.clone() + aj.bm.clone()) * (aj.a.clone() + ai.bm.clone());
                let den = (ai.a.clone() + aj.bp.clone()) * (aj.a.clone() + ai.bp.clone());
                let d = x.clone() + (num / den).ln();
                let mut inner = proto.of(const_inner);
                if let Some(f) = varying {
                    inner = inner + f(&ai.node, &aj.node);
                }
                let cell = ai.w.clone() * aj.w.clone() * ai.node.clone() * aj.node.clone() * d * inner;
                let mult = if i == j { 1.0 } else { 2.0 };
                abs_mass += cell.abs().f64() * mult;
                sum = if i == j { sum + cell } else { sum + cell * proto.of(2.0) };
            }
        }
        // Bernstein bound: nearest complex singularity of the integrand sits
        // ~2π away in each length, so a width-w panel at order o converges
        // like rho^{-2o}
        let sdist = 1.0 + 2.0 * 6.0 / self.cfg.d_panel_width;
        let rho = sdist + (sdist * sdist - 1.0).sqrt();
        let est = abs_mass * rho.powi(-2 * (order as i32)) * 64.0 + skipped;
        (sum, est)
    }

    fn enumerate_splits(
        &self,
        kind: VolumeKind,
        top: Topology,
        n: u32,
    ) -> Result<Vec<(Topology, Vec<usize>, Topology, Vec<usize>)>> {
        let _ = kind;
        let mut out = Vec::new();
        for t1 in 0..=top.twice_g {
            let t2 = top.twice_g - t1;
            for mask in 0..(1u32 << n) {
                let j1: Vec<usize> = (0..n as usize).filter(|&i| mask & (1 << i) != 0).collect();
                let j2: Vec<usize> = (0..n as usize).filter(|&i| mask & (1 << i) == 0).collect();
                let top1 = Topology::new(t1, j1.len() as u32 + 1)?;
                let top2 = Topology::new(t2, j2.len() as u32 + 1)?;
                if top1.is_stable() && top2.is_stable() {
                    out.push((top1, j1, top2, j2));
                }
            }
        }
        Ok(out)
    }

    fn inner_is_zero(&self, kind: VolumeKind, top: Topology) -> bool {
        if !top.is_stable() {
            return true;
        }
        match kind {
            VolumeKind::Plus => !top.genus_is_integer(),
            VolumeKind::Minus => top.twice_g == 0,
            VolumeKind::Weighted => false,
        }
    }

    fn surrogate_1d(
        &self,
        kind: VolumeKind,
        top: Topology,
        frozen: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
        pmax: f64,
    ) -> Result<Arc<Surrogate<R>>> {
        let key = SurrogateKey {
            kind,
            top,
            frozen: frozen.iter().map(|l| grid_round(l.f64())).collect(),
            eps_bits: eps.value().to_bits(),
            b_bits: b.to_bits(),
            tol_mag: tol.log10().round() as i32,
            pmax_bits: grid_round(pmax),
            two_dim: false,
        };
        self.cache.get_or_build(&key, || {
            let f = |p: &R| -> R {
                let mut lengths = Vec::with_capacity(frozen.len() + 1);
                lengths.push(p.clone());
                lengths.extend(frozen.iter().cloned());
                self.volume_lifted(kind, top, &lengths, eps, b, tol)
                    .map(|r| r.value)
                    .unwrap_or_else(|_| p.of(f64::NAN))
            };
            let (cheb, residual) = crate::cheb::Chebyshev::fit_adaptive(
                &f,
                self.proto.of(0.0),
                self.proto.of(pmax),
                tol * 0.1,
                self.cfg.surrogate_degree_cap,
            )?;
            Ok(Surrogate { cheb, residual, key: key.clone() })
        })
    }

    fn surrogate_2d(
        &self,
        kind: VolumeKind,
        top: Topology,
        frozen: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
        pmax: f64,
    ) -> Result<Arc2<R>> {
        // χ = −2 connected inners are constants; detect and shortcut so the
        // common case stays 1D-cheap.
        let f = |p: &R, q: &R| -> R {
            let mut lengths = Vec::with_capacity(frozen.len() + 2);
            lengths.push(p.clone());
            lengths.push(q.clone());
            lengths.extend(frozen.iter().cloned());
            self.volume_lifted(kind, top, &lengths, eps, b, tol)
                .map(|r| r.value)
                .unwrap_or_else(|_| p.of(f64::NAN))
        };
        let n = if top.chi() == -1 { 6 } else { 20 };
        let s = Surrogate2::fit(&f, &self.proto.of(pmax), n)?;
        Ok(Arc::new(s))
    }

    fn truncation_radius(&self, inner_top: Topology, pref: f64, tol: f64) -> f64 {
        // kernels decay like e^{-p/2}; volumes grow at most polynomially with
        // log^2 corrections bounded by the level-based degree
        let d = 2.0 * (inner_top.level() as f64 + 2.0);
        let mut p = 40.0f64;
        for _ in 0..5 {
            p = 2.0 * ((pref.max(1.0) / (tol * 1e-2)).ln() + d * (1.0 + p).ln() + (1.0 + p).ln());
        }
        p.min(self.cfg.pmax_cap).max(30.0)
    }

    fn tail_bound(&self, pref: f64, pmax: f64, inner_top: Topology) -> f64 {
        let d = 2.0 * (inner_top.level() as f64 + 2.0);
        pref * (1.0 + pmax).powf(d + 1.0) * (-pmax / 2.0).exp() * 2.0
    }

    fn extrapolate_zero_corner(
        &self,
        kind: VolumeKind,
        top: Topology,
        lengths: &[R],
        eps: &RegEps,
        b: f64,
        tol: f64,
    ) -> Result<VolumeResult<R>> {
        // V is an even analytic function of the distinguished length;
        // Richardson in t² from t = 0.8, 0.4, 0.2.
        let ts = [0.8, 0.4, 0.2];
        let mut vals = Vec::new();
        let mut err = 0.0f64;
        for &t in &ts {
            let mut ls = lengths.to_vec();
            ls[0] = self.proto.of(t);
            let r = self.recurse(kind, top, &ls, eps, b, tol)?;
            err = err.max(r.error);
            vals.push(r.value);
        }
        // two levels of h^2-extrapolation with ratio 2
        let l1a = (vals[1].clone() * self.proto.of(4.0) - vals[0].clone()) / self.proto.of(3.0);
        let l1b = (vals[2].clone() * self.proto.of(4.0) - vals[1].clone()) / self.proto.of(3.0);
        let l2 = (l1b.clone() * self.proto.of(16.0) - l1a.clone()) / self.proto.of(15.0);
        let extrap_err = (l1b - l2.clone()).abs().f64();
        Ok(VolumeResult { value: l2, error: err + extrap_err, path: DispatchPath::Recursion })
    }
}

type Arc2<R> = Arc<Surrogate2<R>>;

/// κ-pairs contributing to a split: Weighted and Plus pair like kinds,
/// Minus sums over κ ≠ (+,+).
fn split_kind_pairs(kind: VolumeKind) -> Vec<(VolumeKind, VolumeKind)> {
    match kind {
        VolumeKind::Weighted => vec![(VolumeKind::Weighted, VolumeKind::Weighted)],
        VolumeKind::Plus => vec![(VolumeKind::Plus, VolumeKind::Plus)],
        VolumeKind::Minus => vec![
            (VolumeKind::Plus, VolumeKind::Minus),
            (VolumeKind::Minus, VolumeKind::Plus),
            (VolumeKind::Minus, VolumeKind::Minus),
        ],
    }
}
