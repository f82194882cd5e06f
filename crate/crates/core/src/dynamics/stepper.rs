//! Single-step kernels on interleaved `|g,n⟩, |e,n⟩` amplitude vectors.

use num_complex::Complex64 as C64;

use crate::pulse::PulseTrain;

use super::DRIVE_CUTOFF_SIGMAS;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Triple-jump weights lifting a symmetric second-order step to fourth order.
const W1: f64 = 1.351_207_191_959_657_8;
const W0: f64 = -1.702_414_383_919_315_5;

/// Two-level drive sub-steps per unit of `|Δt| / dt` inside a split step.
const DRIVE_SUBSTEPS_PER_DT: f64 = 2.0;

type Mat2 = [[C64; 2]; 2];

/// Pulse data with sorted centers and the integrator's support cutoff.
#[derive(Debug, Clone)]
pub(crate) struct DriveProfile {
    centers: Vec<f64>,
    inv_two_sigma_sq: f64,
    reach: f64,
    amp: f64,
    omegap: f64,
}

impl DriveProfile {
    pub(crate) fn new(train: &PulseTrain) -> Self {
        Self {
            centers: train.sorted_centers(),
            inv_two_sigma_sq: 1.0 / (2.0 * train.sigma * train.sigma),
            reach: DRIVE_CUTOFF_SIGMAS * train.sigma,
            amp: train.omega0_amp,
            omegap: train.omegap,
        }
    }

    pub(crate) fn reach(&self) -> f64 {
        self.reach
    }

    /// Drive amplitude with every pulse truncated at its support.
    pub(crate) fn amplitude(&self, t: f64) -> f64 {
        let mut env = 0.0;
        for &c in &self.centers {
            let d = t - c;
            if d.abs() <= self.reach {
                env += (-d * d * self.inv_two_sigma_sq).exp();
            }
        }
        if env == 0.0 {
            0.0
        } else {
            self.amp * env * (self.omegap * t).cos()
        }
    }

    /// True when no pulse support intersects `[a, b]` (either order).
    pub(crate) fn is_free(&self, a: f64, b: f64) -> bool {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.centers.iter().all(|&c| hi < c - self.reach || lo > c + self.reach)
    }
}

/// Model constants shared by all kernels.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    pub omega: f64,
    pub omega0: f64,
    pub half_detuning: f64,
    pub sqrt_n: Vec<f64>,
}

impl Kernel {
    pub(crate) fn new(omega: f64, omega0: f64, n_max: usize) -> Self {
        Self { omega, omega0, half_detuning: 0.5 * (omega0 - omega), sqrt_n: (0..=n_max + 1).map(|n| (n as f64).sqrt()).collect() }
    }

    /// `out = -i H'(t) psi` in the frame rotating at `ω`, where `drive` is
    /// the instantaneous `Ω(t)`.
    pub(crate) fn corotating_derivative(&self, t: f64, drive: f64, psi: &[C64], out: &mut [C64]) {
        let levels = psi.len() / 2;
        let sq = &self.sqrt_n;
        let hd = self.half_detuning;
        let d = if drive == 0.0 { ZERO } else { C64::from_polar(drive, self.omega * t) };
        let dc = d.conj();
        for n in 0..levels {
            let g = psi[2 * n];
            let e = psi[2 * n + 1];
            let mut he = e * hd + d * g;
            if n + 1 < levels {
                he += psi[2 * n + 2] * sq[n + 1];
            }
            let mut hg = dc * e - g * hd;
            if n > 0 {
                hg += psi[2 * n - 1] * sq[n];
            }
            out[2 * n] = C64::new(hg.im, -hg.re);
            out[2 * n + 1] = C64::new(he.im, -he.re);
        }
    }

    /// `out = -i H(t) psi` for the lab-frame Hamiltonian.
    pub(crate) fn lab_derivative(&self, drive: f64, psi: &[C64], out: &mut [C64]) {
        let levels = psi.len() / 2;
        let sq = &self.sqrt_n;
        let (w, half) = (self.omega, 0.5 * self.omega0);
        for n in 0..levels {
            let g = psi[2 * n];
            let e = psi[2 * n + 1];
            let nf = n as f64;
            let mut he = e * (w * nf + half) + g * drive;
            if n + 1 < levels {
                he += psi[2 * n + 2] * sq[n + 1];
            }
            let mut hg = g * (w * nf - half) + e * drive;
            if n > 0 {
                hg += psi[2 * n - 1] * sq[n];
            }
            out[2 * n] = C64::new(hg.im, -hg.re);
            out[2 * n + 1] = C64::new(he.im, -he.re);
        }
    }

    /// Closed-form propagator of the undriven co-rotating Hamiltonian
    /// `(Δ/2)σ_z + σ₋a† + σ₊a` over `tau`.
    pub(crate) fn doublet_table(&self, tau: f64, levels: usize) -> DoubletTable {
        let hd = self.half_detuning;
        let mut blocks = Vec::with_capacity(levels.saturating_sub(1));
        for n in 0..levels - 1 {
            let s = self.sqrt_n[n + 1];
            let r = (hd * hd + s * s).sqrt();
            let (sn, cs) = (r * tau).sin_cos();
            let k = sn / r;
            // cos(rτ) - i sin(rτ)/r · [[Δ/2, s], [s, -Δ/2]]
            blocks.push([C64::new(cs, -k * hd), C64::new(0.0, -k * s), C64::new(cs, k * hd)]);
        }
        DoubletTable {
            tau,
            resonant: (hd == 0.0).then(|| blocks.iter().map(|b| (b[0].re, -b[1].im)).collect()),
            blocks,
            ground_edge: C64::from_polar(1.0, hd * tau),
            excited_edge: C64::from_polar(1.0, -hd * tau),
        }
    }
}

/// Precomputed doublet rotations for one duration.
#[derive(Debug, Clone)]
pub(crate) struct DoubletTable {
    tau: f64,
    /// `(u_ee, u_eg = u_ge, u_gg)` for `{|e,n⟩, |g,n+1⟩}`.
    blocks: Vec<[C64; 3]>,
    /// On resonance the blocks are `cos - i sin σ_x`; `(cos, sin)` pairs.
    resonant: Option<Vec<(f64, f64)>>,
    ground_edge: C64,
    excited_edge: C64,
}

impl DoubletTable {
    #[inline(always)]
    fn block(&self, n: usize, psi: &mut [C64]) {
        let e = psi[2 * n + 1];
        let g = psi[2 * n + 2];
        match &self.resonant {
            Some(cs) => {
                let (c, s) = cs[n];
                psi[2 * n + 1] = C64::new(c * e.re + s * g.im, c * e.im - s * g.re);
                psi[2 * n + 2] = C64::new(c * g.re + s * e.im, c * g.im - s * e.re);
            }
            None => {
                let [uee, ueg, ugg] = self.blocks[n];
                psi[2 * n + 1] = uee * e + ueg * g;
                psi[2 * n + 2] = ueg * e + ugg * g;
            }
        }
    }

    fn edges(&self, psi: &mut [C64]) {
        let last = psi.len() - 1;
        psi[0] *= self.ground_edge;
        psi[last] *= self.excited_edge;
    }

    pub(crate) fn apply(&self, psi: &mut [C64]) {
        self.edges(psi);
        for n in 0..self.blocks.len() {
            self.block(n, psi);
        }
    }

    /// `A · (u ⊗ 1) · psi` in a single pass.
    fn apply_after(&self, u: &Mat2, psi: &mut [C64]) {
        let [[u00, u01], [u10, u11]] = *u;
        let last = psi.len() - 1;
        let (head, rest) = psi.split_at_mut(2);
        let (g0, e0) = (head[0], head[1]);
        head[0] = (u00 * g0 + u01 * e0) * self.ground_edge;
        // excited amplitude of the previous level after `u`, before its block
        let mut carry = u10 * g0 + u11 * e0;
        let mut prev_e = &mut head[1];
        match &self.resonant {
            Some(cs) => {
                for (pair, &(c, s)) in rest.chunks_exact_mut(2).zip(cs) {
                    let (g, e) = (pair[0], pair[1]);
                    let gr = u00 * g + u01 * e;
                    let er = u10 * g + u11 * e;
                    *prev_e = C64::new(c * carry.re + s * gr.im, c * carry.im - s * gr.re);
                    pair[0] = C64::new(c * gr.re + s * carry.im, c * gr.im - s * carry.re);
                    carry = er;
                    prev_e = &mut pair[1];
                }
            }
            None => {
                for (pair, &[uee, ueg, ugg]) in rest.chunks_exact_mut(2).zip(&self.blocks) {
                    let (g, e) = (pair[0], pair[1]);
                    let gr = u00 * g + u01 * e;
                    let er = u10 * g + u11 * e;
                    *prev_e = uee * carry + ueg * gr;
                    pair[0] = ueg * carry + ugg * gr;
                    carry = er;
                    prev_e = &mut pair[1];
                }
            }
        }
        *prev_e = carry * self.excited_edge;
        debug_assert!(last == 2 * self.blocks.len() + 1);
    }
}

/// Scratch buffers and doublet tables reused across the steps of one run.
pub(crate) struct Workspace {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
    tables: Vec<DoubletTable>,
    plans: Vec<SplitPlan>,
}

impl Workspace {
    pub(crate) fn new(dim: usize) -> Self {
        let z = vec![ZERO; dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z, tables: Vec::new(), plans: Vec::new() }
    }

    fn table_index(&mut self, kernel: &Kernel, tau: f64, levels: usize) -> usize {
        match self.tables.iter().position(|t| t.tau == tau) {
            Some(p) => p,
            None => {
                self.tables.push(kernel.doublet_table(tau, levels));
                self.tables.len() - 1
            }
        }
    }

    fn plan_index(&mut self, kernel: &Kernel, profile: &DriveProfile, h: f64, levels: usize) -> usize {
        if let Some(p) = self.plans.iter().position(|p| p.h == h) {
            return p;
        }
        let plan = SplitPlan::new(h, kernel.omega, profile.omegap);
        let tables = plan.rotations.map(|r| self.table_index(kernel, r, levels));
        self.plans.push(SplitPlan { tables, ..plan });
        self.plans.len() - 1
    }

    /// Exact undriven co-rotating evolution over `tau`.
    pub(crate) fn free_evolution(&mut self, kernel: &Kernel, psi: &mut [C64], tau: f64) {
        let i = self.table_index(kernel, tau, psi.len() / 2);
        self.tables[i].apply(psi);
    }
}

/// Classic RK4 step of `dψ/dt = f(t, ψ)` where `f` is chosen by `lab`.
pub(crate) fn rk4_step(kernel: &Kernel, lab: bool, psi: &mut [C64], profile: &DriveProfile, t: f64, h: f64, ws: &mut Workspace) {
    let Workspace { k1, k2, k3, k4, tmp, .. } = ws;
    let half = 0.5 * h;
    let (d0, dm, d1) = (profile.amplitude(t), profile.amplitude(t + half), profile.amplitude(t + h));
    let f = |t: f64, d: f64, x: &[C64], out: &mut [C64]| {
        if lab {
            kernel.lab_derivative(d, x, out)
        } else {
            kernel.corotating_derivative(t, d, x, out)
        }
    };
    f(t, d0, psi, k1);
    axpy_into(tmp, psi, half, k1);
    f(t + half, dm, tmp, k2);
    axpy_into(tmp, psi, half, k2);
    f(t + half, dm, tmp, k3);
    axpy_into(tmp, psi, h, k3);
    f(t + h, d1, tmp, k4);
    let sixth = h / 6.0;
    for i in 0..psi.len() {
        psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * sixth;
    }
}

fn axpy_into(out: &mut [C64], x: &[C64], a: f64, y: &[C64]) {
    for i in 0..out.len() {
        out[i] = x[i] + y[i] * a;
    }
}

/// Node layout of one split step of length `h`.
#[derive(Debug, Clone)]
struct SplitPlan {
    h: f64,
    rotations: [f64; 4],
    tables: [usize; 4],
    /// Sub-step length and node range of each drive segment.
    segments: [(f64, usize, usize); 3],
    /// Gauss-Legendre node offsets from the step start.
    nodes: Vec<f64>,
    /// `e^{iω o}` and `e^{iω_p o}` at each node offset.
    field_phase: Vec<C64>,
    carrier_phase: Vec<C64>,
    span: (f64, f64),
}

impl SplitPlan {
    fn new(h: f64, omega: f64, omegap: f64) -> Self {
        let marks = [0.0, W1 * h, (W1 + W0) * h, h];
        let c = 3f64.sqrt() / 6.0;
        let max_sub = (h / DRIVE_SUBSTEPS_PER_DT).abs();
        let mut nodes = Vec::new();
        let mut segments = [(0.0, 0, 0); 3];
        for k in 0..3 {
            let span = marks[k + 1] - marks[k];
            let m = (span.abs() / max_sub).ceil().max(1.0) as usize;
            let sub = span / m as f64;
            let first = nodes.len();
            for j in 0..m {
                let s = marks[k] + j as f64 * sub;
                nodes.push(s + (0.5 - c) * sub);
                nodes.push(s + (0.5 + c) * sub);
            }
            segments[k] = (sub, first, nodes.len());
        }
        let lo = nodes.iter().copied().fold(0.0_f64, f64::min);
        let hi = nodes.iter().copied().fold(h, f64::max);
        Self {
            h,
            rotations: [0.5 * W1 * h, 0.5 * (W1 + W0) * h, 0.5 * (W0 + W1) * h, 0.5 * W1 * h],
            tables: [0; 4],
            segments,
            field_phase: nodes.iter().map(|&o| C64::from_polar(1.0, omega * o)).collect(),
            carrier_phase: nodes.iter().map(|&o| C64::from_polar(1.0, omegap * o)).collect(),
            nodes,
            span: (lo.min(hi), hi.max(lo)),
        }
    }
}

/// Fourth-order split step from `t` to `t + h` in the co-rotating frame.
///
/// Symmetric Strang step `A(τ/2) B(s, s+τ) A(τ/2)` composed as a triple
/// jump, with `A` the exact doublet rotation and `B` the exact two-level
/// drive propagator (the drive acts identically on every Fock level).
pub(crate) fn split_step(kernel: &Kernel, psi: &mut [C64], profile: &DriveProfile, t: f64, h: f64, ws: &mut Workspace) {
    let p = ws.plan_index(kernel, profile, h, psi.len() / 2);
    let Workspace { plans, tables, .. } = ws;
    let plan = &plans[p];
    let couplings = node_couplings(kernel, profile, plan, t);
    tables[plan.tables[0]].apply(psi);
    for k in 0..3 {
        let (sub, first, last) = plan.segments[k];
        let table = &tables[plan.tables[k + 1]];
        match couplings.as_ref().and_then(|b| segment_propagator(&b[first..last], sub)) {
            Some(u) => table.apply_after(&u, psi),
            None => table.apply(psi),
        }
    }
}

/// Per-step drive propagators of a fixed pulse set, indexed by grid step.
#[derive(Debug, Clone, Default)]
pub(crate) struct DriveCache {
    steps: Vec<Option<[Option<Mat2>; 3]>>,
}

/// How [`split_run`] treats the drive propagators of each step.
pub(crate) enum DriveReuse<'a> {
    Compute,
    /// Compute and store every step's propagators.
    Record(&'a mut DriveCache),
    /// Reuse stored propagators for steps whose nodes all lie outside
    /// `[lo, hi]`, the support of the one pulse missing from the cache.
    Reuse {
        cache: &'a DriveCache,
        lo: f64,
        hi: f64,
    },
}

/// Consecutive split steps `first, first + 1, …` of length `h`, the j-th
/// starting at `times[j]`. The closing rotation of one step is fused with the
/// opening rotation of the next, so the result equals repeated
/// [`split_step`] up to rounding. With `skip_free` a step the drive never
/// reaches is a single exact rotation.
#[allow(clippy::too_many_arguments)]
pub(crate) fn split_run(
    kernel: &Kernel,
    psi: &mut [C64],
    profile: &DriveProfile,
    first: usize,
    times: &[f64],
    h: f64,
    skip_free: bool,
    ws: &mut Workspace,
    mut reuse: DriveReuse,
) {
    let levels = psi.len() / 2;
    let p = ws.plan_index(kernel, profile, h, levels);
    let half = ws.plans[p].rotations[3];
    let opening = ws.plans[p].rotations[0];
    let free = ws.table_index(kernel, h, levels);
    let into_split = ws.table_index(kernel, half + opening, levels);
    let into_free = ws.table_index(kernel, half + h, levels);
    let is_free: Vec<bool> = times.iter().map(|&t| skip_free && profile.is_free(t, t + h)).collect();
    let Workspace { plans, tables, .. } = ws;
    let plan = &plans[p];
    let mut absorbed = false;
    for (j, &t) in times.iter().enumerate() {
        if is_free[j] {
            if !absorbed {
                tables[free].apply(psi);
            }
            absorbed = false;
            continue;
        }
        if !absorbed {
            tables[plan.tables[0]].apply(psi);
        }
        let step = first + j;
        let stored = match &reuse {
            DriveReuse::Reuse { cache, lo, hi } if t + plan.span.1 < *lo || t + plan.span.0 > *hi => {
                cache.steps.get(step).copied().flatten()
            }
            _ => None,
        };
        let us = stored.unwrap_or_else(|| {
            let couplings = node_couplings(kernel, profile, plan, t);
            plan.segments.map(|(sub, a, b)| couplings.as_ref().and_then(|c| segment_propagator(&c[a..b], sub)))
        });
        if let DriveReuse::Record(cache) = &mut reuse {
            if cache.steps.len() <= step {
                cache.steps.resize(step + 1, None);
            }
            cache.steps[step] = Some(us);
        }
        for (k, u) in us.iter().enumerate() {
            let index = match (k, is_free.get(j + 1)) {
                (2, Some(false)) => into_split,
                (2, Some(true)) => into_free,
                _ => plan.tables[k + 1],
            };
            let table = &tables[index];
            match u {
                Some(u) => table.apply_after(u, psi),
                None => table.apply(psi),
            }
        }
        absorbed = j + 1 < times.len();
    }
}

/// `Ω(t) e^{iωt}` at every node of the step starting at `t`; `None` when no
/// pulse reaches any node.
fn node_couplings(kernel: &Kernel, profile: &DriveProfile, plan: &SplitPlan, t: f64) -> Option<Vec<C64>> {
    let (lo, hi) = (t + plan.span.0, t + plan.span.1);
    let active: Vec<f64> = profile.centers.iter().copied().filter(|&c| hi >= c - profile.reach && lo <= c + profile.reach).collect();
    if active.is_empty() {
        return None;
    }
    let field = C64::from_polar(1.0, kernel.omega * t);
    let carrier = C64::from_polar(1.0, profile.omegap * t);
    let out = plan
        .nodes
        .iter()
        .enumerate()
        .map(|(j, &o)| {
            let tj = t + o;
            let mut env = 0.0;
            for &c in &active {
                let d = tj - c;
                if d.abs() <= profile.reach {
                    env += (-d * d * profile.inv_two_sigma_sq).exp();
                }
            }
            if env == 0.0 {
                ZERO
            } else {
                let cos_p = (carrier * plan.carrier_phase[j]).re;
                field * plan.field_phase[j] * (profile.amp * env * cos_p)
            }
        })
        .collect();
    Some(out)
}

/// Fourth-order Magnus propagator of `[[0, b̄], [b, 0]]` over consecutive
/// sub-steps of length `h`, given two Gauss nodes per sub-step. `None` when
/// the drive vanishes on every node.
fn segment_propagator(b: &[C64], h: f64) -> Option<Mat2> {
    let mut u: Option<Mat2> = None;
    let k = 3f64.sqrt() * h * h / 12.0;
    for pair in b.chunks_exact(2) {
        let (b1, b2) = (pair[0], pair[1]);
        if b1 == ZERO && b2 == ZERO {
            continue;
        }
        // [B2, B1] = diag(b̄2 b1 - b̄1 b2, -(…)); H_eff = h/2 (B1 + B2) - i (√3 h²/12) [B2, B1]
        let off = (b1 + b2) * (0.5 * h);
        let w = b2.conj() * b1 - b1.conj() * b2;
        let step = exp_traceless(-k * w.im, off);
        u = Some(match u {
            Some(prev) => mul(&step, &prev),
            None => step,
        });
    }
    u
}

/// `exp(-i H)` for `H = [[-a, b̄], [b, a]]` in `(g, e)` ordering.
fn exp_traceless(a: f64, b: C64) -> Mat2 {
    let r = (a * a + b.norm_sqr()).sqrt();
    let (cs, k) = if r < 0.05 {
        // series through r⁸; truncation below 1e-19
        let r2 = r * r;
        let cs = 1.0 - r2 / 2.0 * (1.0 - r2 / 12.0 * (1.0 - r2 / 30.0 * (1.0 - r2 / 56.0)));
        let k = 1.0 - r2 / 6.0 * (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0 * (1.0 - r2 / 72.0)));
        (cs, k)
    } else {
        let (sn, cs) = r.sin_cos();
        (cs, sn / r)
    };
    let mi = C64::new(0.0, -k);
    [[C64::new(cs, 0.0) + mi * (-a), mi * b.conj()], [mi * b, C64::new(cs, 0.0) + mi * a]]
}

fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        }
    }
    out
}
