//! Output intensities assembled from the closed-form kernels.
//!
//! Every stage output is a linear combination of independent inputs: the
//! initial spin-wave vacuum, the Langevin noise, the boundary field and (in
//! the second stage) the seeded correlations. Second moments are sums of
//! products of kernel weights over that input basis. Spin inputs are sampled
//! at the `n_z` cell centres with midpoint weights; noise is sampled at the
//! time midpoints `t̃_{k+½}`; the boundary field at the time nodes with
//! trapezoid weights.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{ge_value, gs_value, h_value, q_of_t, KernelContext};
use crate::matrix::CMatrix;
use crate::params::{trapezoid_weights, Grid, PhysicalParams, TwoStageCoefficients};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Where a [`CorrelationState`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLabel {
    Vacuum,
    /// Outputs of the first (SRS) pulse, still in its own frame.
    Stage1Output,
    /// First-pulse outputs transformed into second-pulse inputs.
    Stage2Seed,
}

/// Second moments of a field/spin-wave pair.
///
/// * `c_ee[a][b] = ⟨e†(t̃_a) e(t̃_b)⟩` on the time nodes;
/// * `c_ss[i][j] = ⟨s†(ζ_i) s(ζ_j)⟩` on the spin cells;
/// * `c_es[a][j] = ⟨e(t̃_a) s(ζ_j)⟩`; the family `⟨e† s†⟩` is its conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationState {
    /// Time nodes of the field rows and spin cells of the spin rows.
    pub grid: Grid,
    pub c_ee: CMatrix,
    pub c_ss: CMatrix,
    pub c_es: CMatrix,
    pub label: StateLabel,
    /// Stokes phase already folded into `c_es`.
    pub seed_phase: f64,
}

impl CorrelationState {
    pub fn vacuum(grid: Grid) -> Self {
        let nt = grid.n_t + 1;
        Self {
            grid,
            c_ee: CMatrix::zeros(nt, nt),
            c_ss: CMatrix::zeros(grid.n_z, grid.n_z),
            c_es: CMatrix::zeros(nt, grid.n_z),
            label: StateLabel::Vacuum,
            seed_phase: 0.0,
        }
    }

    /// `⟨e†(t̃_a) s†(ζ_j)⟩`.
    pub fn anti_cross(&self, a: usize, j: usize) -> Complex64 {
        self.c_es[(a, j)].conj()
    }

    /// Copy with the light–atom cross block removed.
    pub fn uncorrelated(&self) -> Self {
        let mut s = self.clone();
        s.c_es = CMatrix::zeros(s.c_es.rows(), s.c_es.cols());
        s
    }

    /// Copy keeping only the seeded light.
    pub fn seed_only(&self) -> Self {
        let mut s = self.uncorrelated();
        s.c_ss = CMatrix::zeros(s.c_ss.rows(), s.c_ss.cols());
        s
    }

    /// Copy keeping only the stored spin wave.
    pub fn spin_only(&self) -> Self {
        let mut s = self.uncorrelated();
        s.c_ee = CMatrix::zeros(s.c_ee.rows(), s.c_ee.cols());
        s
    }

    /// Seed amplitude scaled by `eta`: `c_ee → η² c_ee`, `c_es → η c_es`.
    pub fn attenuated(&self, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && (0.0..=2.0).contains(&eta)) {
            return Err(Error::param("attenuation_eta", format!("must lie in [0, 2], got {eta}")));
        }
        let mut s = self.clone();
        s.c_ee.scale(Complex64::new(eta * eta, 0.0));
        s.c_es.scale(Complex64::new(eta, 0.0));
        Ok(s)
    }

    /// Spin coordinate reversed, ζ → 1 − ζ.
    pub fn flipped(&self) -> Self {
        let n = self.grid.n_z;
        let mut s = self.clone();
        s.c_ss = CMatrix::from_fn(n, n, |i, j| self.c_ss[(n - 1 - i, n - 1 - j)]);
        s.c_es = CMatrix::from_fn(self.c_es.rows(), n, |a, j| self.c_es[(a, n - 1 - j)]);
        s
    }

    /// Largest violation of `|⟨e s⟩|² ≤ ⟨e e†⟩⟨s s†⟩`, using the discrete
    /// vacuum offsets `1/ω_a` (field node) and `1/Δζ` (spin cell) for the
    /// antinormal moments. Nonpositive means the bound holds everywhere.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        let w = self.grid.time_weights();
        let dz = self.grid.dz();
        let mut worst = f64::NEG_INFINITY;
        for a in 0..self.c_es.rows() {
            let ee = self.c_ee[(a, a)].re + 1.0 / w[a.min(w.len() - 1)];
            for j in 0..self.grid.n_z {
                let ss = self.c_ss[(j, j)].re + 1.0 / dz;
                let lhs = self.c_es[(a, j)].norm_sqr();
                worst = worst.max((lhs - ee * ss) / (ee * ss));
            }
        }
        worst
    }

    /// Hermitian and positive semidefinite diagonal blocks, to `rel_tol`.
    pub fn blocks_are_physical(&self, rel_tol: f64) -> bool {
        self.c_ee.hermitian_defect() <= rel_tol
            && self.c_ss.hermitian_defect() <= rel_tol
            && self.c_ee.is_positive_semidefinite(rel_tol)
            && self.c_ss.is_positive_semidefinite(rel_tol)
    }

    fn check_compatible(&self, ctx: &KernelContext) -> Result<()> {
        let dt_ok = (self.grid.dt() - ctx.grid.dt()).abs() <= 1e-9 * ctx.grid.dt();
        if self.grid.n_z != ctx.grid.n_z || !dt_ok {
            return Err(Error::GridMismatch(format!(
                "state has n_z = {}, dt = {}; stage has n_z = {}, dt = {}",
                self.grid.n_z,
                self.grid.dt(),
                ctx.grid.n_z,
                ctx.grid.dt()
            )));
        }
        Ok(())
    }
}

/// The four contributions to the second-stage Stokes intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityBreakdown {
    pub i_spon: f64,
    pub i_seed: f64,
    pub i_spin_wave: f64,
    pub i_light_atom: f64,
    pub i_total: f64,
    pub t: f64,
    pub delta_phi: f64,
}

impl IntensityBreakdown {
    pub fn from_parts(t: f64, delta_phi: f64, i_spon: f64, i_seed: f64, i_spin_wave: f64, i_light_atom: f64) -> Self {
        Self {
            i_spon,
            i_seed,
            i_spin_wave,
            i_light_atom,
            i_total: i_spon + i_seed + i_spin_wave + i_light_atom,
            t,
            delta_phi,
        }
    }

    /// Intensity without the light–atom interference.
    pub fn uncorrelated_sum(&self) -> f64 {
        self.i_spon + self.i_seed + self.i_spin_wave
    }
}

/// Phase-independent parts of a second-stage output plus the complex cross
/// amplitude `X`, normalised so that `i_light_atom(Δφ) = 2 Re(e^{iΔφ} X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CersTerms {
    pub t: f64,
    pub i_spon: f64,
    pub i_seed: f64,
    pub i_spin_wave: f64,
    pub cross: Complex64,
}

/// Result of [`phase_offset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseOffset {
    /// φ₀ with the fringe `C + D cos(Δφ + φ₀)`; maximal at Δφ = −φ₀.
    Offset(f64),
    /// The cross amplitude vanishes: the output does not depend on Δφ.
    NoInterference,
}

impl PhaseOffset {
    pub fn value(self) -> Option<f64> {
        match self {
            PhaseOffset::Offset(p) => Some(p),
            PhaseOffset::NoInterference => None,
        }
    }
}

impl CersTerms {
    pub fn at_phase(&self, delta_phi: f64) -> IntensityBreakdown {
        let i_la = 2.0 * (Complex64::from_polar(1.0, delta_phi) * self.cross).re;
        IntensityBreakdown::from_parts(self.t, delta_phi, self.i_spon, self.i_seed, self.i_spin_wave, i_la)
    }

    pub fn phase_offset(&self) -> PhaseOffset {
        let bound = (self.i_seed * self.i_spin_wave).abs().sqrt() + self.i_seed.abs() + self.i_spin_wave.abs();
        let x = self.cross.norm();
        if x == 0.0 || x <= 1e-14 * bound {
            PhaseOffset::NoInterference
        } else {
            PhaseOffset::Offset(self.cross.arg())
        }
    }

    /// Fringe mean C and amplitude D of `i_total(Δφ) = C + D cos(Δφ + φ₀)`.
    pub fn fringe_mean_amplitude(&self) -> (f64, f64) {
        (self.i_spon + self.i_seed + self.i_spin_wave, 2.0 * self.cross.norm())
    }
}

/// Σ_m H(Δq̃, 1 − ζ_m)² over the spin cells.
fn propagation_sum(n_z: usize, dz: f64, dq: f64) -> Result<f64> {
    let mut s = 0.0;
    for m in 0..n_z {
        let h = h_value(dq, (n_z as f64 - m as f64 - 0.5) * dz)?;
        s += h * h;
    }
    Ok(s)
}

/// Number of sub-steps covering [0, t] and their width.
fn sub_steps(ctx: &KernelContext, t: f64) -> (usize, f64) {
    let steps = ctx
        .grid
        .node_index(t)
        .unwrap_or_else(|| (t / ctx.grid.dt()).ceil() as usize)
        .max(1);
    (steps, t / steps as f64)
}

/// Spontaneous output `⟨e†e⟩(ζ = 1, t̃)` of a stage started from vacuum and
/// ground-state atoms.
pub fn srs_intensity(ctx: &KernelContext, t: f64) -> Result<f64> {
    ctx.check_time(t)?;
    let t = t.clamp(0.0, ctx.grid.t_max);
    let gain = ctx.coeffs.gain();
    if gain == 0.0 {
        return Ok(0.0);
    }
    let n_z = ctx.grid.n_z;
    let dz = ctx.grid.dz();
    let q_t = q_of_t(ctx, t)?;
    let spin = ctx.decay_factor(t, 0.0).norm_sqr() * gain * dz * propagation_sum(n_z, dz, q_t)?;
    let strength = ctx.coeffs.noise_strength();
    let mut noise = 0.0;
    if strength > 0.0 && t > 0.0 {
        let (steps, h) = sub_steps(ctx, t);
        for k in 0..steps {
            let tau = (k as f64 + 0.5) * h;
            let dq = q_t - q_of_t(ctx, tau)?;
            noise += ctx.decay_factor(t, tau).norm_sqr() * propagation_sum(n_z, dz, dq)?;
        }
        noise *= strength * h * gain * dz;
    }
    let total = spin + noise;
    if !total.is_finite() {
        return Err(Error::NonFinite("srs_intensity"));
    }
    Ok(total)
}

/// [`srs_intensity`] on every time node of the context.
pub fn srs_curve(ctx: &KernelContext) -> Result<Vec<f64>> {
    (0..=ctx.grid.n_t).map(|k| srs_intensity(ctx, ctx.grid.time(k))).collect()
}

/// v(m) = i g e^{−Γ̃ t_n} H(q̃_n, 1 − ζ_m) at output node `n`.
fn spin_to_field_row(ctx: &KernelContext, n: usize) -> Result<Vec<Complex64>> {
    let n_z = ctx.grid.n_z;
    let dz = ctx.grid.dz();
    let pre = I * ctx.coeffs.coupling * ctx.decay_factor(ctx.grid.time(n), 0.0);
    let q = ctx.q_table[n];
    (0..n_z)
        .map(|m| Ok(pre * h_value(q, (n_z as f64 - m as f64 - 0.5) * dz)?))
        .collect()
}

/// ũ(a) = δ_{an} + ω_a |g|² W_a e^{−Γ̃(t_n − t_a)} G_e(q̃_n − q̃_a, 1) for a ≤ n,
/// with trapezoid weights ω over [0, t_n].
fn seed_to_field_row(ctx: &KernelContext, n: usize) -> Result<Vec<Complex64>> {
    let mut u = vec![ZERO; n + 1];
    u[n] = Complex64::new(1.0, 0.0);
    let gain = ctx.coeffs.gain();
    if n == 0 || gain == 0.0 {
        return Ok(u);
    }
    let w = trapezoid_weights(n, ctx.grid.dt());
    let t_n = ctx.grid.time(n);
    for (a, ua) in u.iter_mut().enumerate() {
        let dq = ctx.q_table[n] - ctx.q_table[a];
        if dq < 0.0 {
            return Err(Error::NegativeRadicand { radicand: dq });
        }
        *ua += w[a] * gain * ctx.w_table[a] * ctx.decay_factor(t_n, ctx.grid.time(a)) * ge_value(dq, 1.0)?;
    }
    Ok(u)
}

fn try_matrix(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Result<Complex64>) -> Result<CMatrix> {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = f(i, j)?;
        }
    }
    Ok(m)
}

/// Spatial quadrature weight of input cell `m` for output cell `c` in the
/// U_a/F_a integral over [0, ζ_c].
fn lambda(c: usize, m: usize, dz: f64) -> f64 {
    match m.cmp(&c) {
        std::cmp::Ordering::Less => dz,
        std::cmp::Ordering::Equal => 0.5 * dz,
        std::cmp::Ordering::Greater => 0.0,
    }
}

/// Spin response `[m][c]`: pass-through plus the G_S integral, for a
/// source at time `t_in` observed at `t_out`, times `scale`.
fn spin_response(ctx: &KernelContext, t_out: f64, q_out: f64, t_in: f64, q_in: f64, scale: f64) -> Result<CMatrix> {
    let n_z = ctx.grid.n_z;
    let dz = ctx.grid.dz();
    let dq = q_out - q_in;
    let gs = (0..n_z).map(|d| gs_value(dq, d as f64 * dz)).collect::<Result<Vec<_>>>()?;
    let dec = ctx.decay_factor(t_out, t_in) * scale;
    Ok(CMatrix::from_fn(n_z, n_z, |m, c| {
        if c < m {
            ZERO
        } else {
            let pass = if c == m { 1.0 } else { 0.0 };
            dec * (pass + lambda(c, m, dz) * gs[c - m])
        }
    }))
}

/// Second moments of the field leaving the medium on `[0, T]` and of the spin
/// wave left behind at `T`, for a stage started from vacuum.
pub fn stage1_output_correlations(ctx: &KernelContext, t_end: f64) -> Result<CorrelationState> {
    let k_end = ctx
        .grid
        .node_index(t_end)
        .ok_or_else(|| Error::GridMismatch(format!("pulse end {t_end} is not a time node")))?;
    let t_end = ctx.grid.time(k_end);
    let grid = Grid::new(ctx.grid.n_z, k_end, t_end)
        .map_err(|_| Error::GridTooCoarse(format!("pulse end {t_end} spans fewer than 2 time steps")))?;
    let mut state = CorrelationState::vacuum(grid);
    state.label = StateLabel::Stage1Output;
    let gain = ctx.coeffs.gain();
    if gain == 0.0 {
        return Ok(state);
    }
    let g = ctx.coeffs.coupling;
    let n_z = grid.n_z;
    let nt = k_end + 1;
    let dz = grid.dz();
    let dt = grid.dt();
    let q_end = ctx.q_table[k_end];
    let depth = |m: usize| (n_z as f64 - m as f64 - 0.5) * dz;

    let mut c_ee = CMatrix::zeros(nt, nt);
    let mut anti = CMatrix::zeros(nt, n_z);

    // initial spin vacuum, normalised cell modes
    let a_spin = try_matrix(n_z, nt, |m, a| {
        let t = ctx.grid.time(a);
        Ok(dz.sqrt() * I * g * ctx.decay_factor(t, 0.0) * h_value(ctx.q_table[a], depth(m))?)
    })?;
    let b_spin = spin_response(ctx, t_end, q_end, 0.0, 0.0, 1.0 / dz.sqrt())?;
    c_ee.accumulate_cross(&a_spin, &a_spin, 1.0);
    anti.accumulate_cross(&a_spin, &b_spin, 1.0);

    // Langevin noise cells at the time midpoints
    let strength = ctx.coeffs.noise_strength();
    if strength > 0.0 {
        let amp_field = (strength * dz * dt).sqrt();
        let amp_spin = (strength * dt / dz).sqrt();
        for k in 0..k_end {
            let tau = (k as f64 + 0.5) * dt;
            let q_tau = q_of_t(ctx, tau)?;
            let f_k = try_matrix(n_z, k_end - k, |m, j| {
                let a = k + 1 + j;
                let t = ctx.grid.time(a);
                Ok(amp_field * I * g * ctx.decay_factor(t, tau) * h_value(ctx.q_table[a] - q_tau, depth(m))?)
            })?;
            let s_k = spin_response(ctx, t_end, q_end, tau, q_tau, amp_spin)?;
            c_ee.accumulate_cross_block(&f_k, &f_k, 1.0, k + 1, k + 1);
            anti.accumulate_cross_block(&f_k, &s_k, 1.0, k + 1, 0);
        }
    }

    // boundary-field vacuum feeding the spin wave
    let w = trapezoid_weights(k_end, dt);
    let b_field = try_matrix(nt, n_z, |k, c| {
        let t = ctx.grid.time(k);
        let h = h_value(q_end - ctx.q_table[k], (c as f64 + 0.5) * dz)?;
        Ok(w[k].sqrt() * -I * g.conj() * ctx.w_table[k] * ctx.decay_factor(t_end, t) * h)
    })?;
    let mut ss = CMatrix::zeros(n_z, n_z);
    ss.accumulate_cross(&b_field, &b_field, 1.0);

    state.c_ee = c_ee;
    state.c_ss = ss.conj();
    state.c_es = anti.conj();
    if !(state.c_ee.all_finite() && state.c_ss.all_finite() && state.c_es.all_finite()) {
        return Err(Error::NonFinite("stage-1 correlations"));
    }
    Ok(state)
}

/// Map first-pulse outputs onto second-pulse inputs: reverse the spin
/// coordinate (the pumps counter-propagate), attach the Stokes phase to the
/// seed, and multiply the spin wave by `spin_factor` per spin index
/// (`s† → spin_factor · s†`).
pub fn seed_stage2(state: &CorrelationState, seed_phase: f64, spin_factor: Complex64) -> CorrelationState {
    let mut s = state.flipped();
    s.c_ss.scale(Complex64::new(spin_factor.norm_sqr(), 0.0));
    s.c_es.scale(Complex64::from_polar(1.0, seed_phase) * spin_factor.conj());
    s.seed_phase = state.seed_phase + seed_phase;
    s.label = StateLabel::Stage2Seed;
    s
}

/// Collisional decay factor of the stored spin wave over the pulse delay.
/// The pump is off between pulses, so only γ_S0 acts.
pub fn delay_factor(params: &PhysicalParams) -> Complex64 {
    if params.apply_delay_decay {
        Complex64::new((-params.coherence_decay * params.delay_time).exp(), 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

pub fn apply_stage2_initial_conditions(state: &CorrelationState, params: &PhysicalParams) -> CorrelationState {
    seed_stage2(state, params.phase_stokes, delay_factor(params))
}

/// Phase-independent terms and cross amplitude of the second-stage output at
/// time node `t`.
pub fn cers_terms(ctx: &KernelContext, seeded: &CorrelationState, t: f64) -> Result<CersTerms> {
    seeded.check_compatible(ctx)?;
    ctx.check_time(t)?;
    let n = ctx
        .grid
        .node_index(t)
        .ok_or_else(|| Error::GridMismatch(format!("t̃ = {t} is not a time node")))?;
    let t = ctx.grid.time(n);
    let i_spon = srs_intensity(ctx, t)?;
    let u = seed_to_field_row(ctx, n)?;
    let dz = ctx.grid.dz();
    let v: Vec<Complex64> = spin_to_field_row(ctx, n)?.into_iter().map(|x| x * dz).collect();
    let rows = seeded.c_ee.rows().min(n + 1);

    let mut i_seed = ZERO;
    for a in 0..rows {
        let mut inner = ZERO;
        let row = seeded.c_ee.row(a);
        for b in 0..rows {
            inner += row[b] * u[b];
        }
        i_seed += u[a].conj() * inner;
    }

    let mut i_spin = ZERO;
    for b in 0..v.len() {
        let row = seeded.c_ss.row(b);
        let mut inner = ZERO;
        for a in 0..v.len() {
            inner += v[a].conj() * row[a];
        }
        i_spin += v[b] * inner;
    }

    let mut x = ZERO;
    for a in 0..rows {
        let row = seeded.c_es.row(a);
        let mut inner = ZERO;
        for (vb, e) in v.iter().zip(row) {
            inner += vb * e.conj();
        }
        x += u[a].conj() * inner;
    }
    let embedded = ctx.coeffs.coupling.arg() - seeded.seed_phase;
    let cross = x * Complex64::from_polar(1.0, -embedded);

    let terms = CersTerms {
        t,
        i_spon,
        i_seed: i_seed.re,
        i_spin_wave: i_spin.re,
        cross,
    };
    if !(terms.i_seed.is_finite() && terms.i_spin_wave.is_finite() && cross.re.is_finite() && cross.im.is_finite()) {
        return Err(Error::NonFinite("cers_terms"));
    }
    Ok(terms)
}

/// [`cers_terms`] on every time node of the context.
pub fn cers_curve(ctx: &KernelContext, seeded: &CorrelationState) -> Result<Vec<CersTerms>> {
    (0..=ctx.grid.n_t).map(|k| cers_terms(ctx, seeded, ctx.grid.time(k))).collect()
}

pub fn cers_intensity(ctx: &KernelContext, seeded: &CorrelationState, t: f64, delta_phi: f64) -> Result<IntensityBreakdown> {
    Ok(cers_terms(ctx, seeded, t)?.at_phase(delta_phi))
}

pub fn phase_offset(ctx: &KernelContext, seeded: &CorrelationState, t: f64) -> Result<PhaseOffset> {
    Ok(cers_terms(ctx, seeded, t)?.phase_offset())
}

/// Kernel contexts of both pulses on a common time step.
#[derive(Debug, Clone)]
pub struct TwoStageSetup {
    pub coeffs: TwoStageCoefficients,
    pub stage1: KernelContext,
    pub stage2: KernelContext,
    /// First-pulse duration T.
    pub pulse_end: f64,
}

impl TwoStageSetup {
    /// Stage 2 uses `grid`; stage 1 runs for T = `params.stage1_duration()`
    /// on the same time step, so T must be a whole number of steps.
    pub fn new(params: &PhysicalParams, grid: Grid) -> Result<Self> {
        let coeffs = TwoStageCoefficients::from_params(params)?;
        let t1 = params.stage1_duration();
        let steps = (t1 / grid.dt()).round();
        if (steps * grid.dt() - t1).abs() > 1e-9 * grid.dt() {
            return Err(Error::GridMismatch(format!(
                "pulse_duration {t1} is not a whole number of time steps {}",
                grid.dt()
            )));
        }
        let grid1 = Grid::new(grid.n_z, steps as usize, t1)
            .map_err(|_| Error::GridTooCoarse("pulse_duration spans fewer than 2 time steps".into()))?;
        Ok(Self {
            coeffs,
            stage1: KernelContext::new(coeffs.srs, grid1)?,
            stage2: KernelContext::new(coeffs.cers, grid)?,
            pulse_end: t1,
        })
    }
}

/// Seeded second-pulse input state from the analytic first-pulse outputs.
pub fn seeded_state(setup: &TwoStageSetup, params: &PhysicalParams) -> Result<CorrelationState> {
    let s1 = stage1_output_correlations(&setup.stage1, setup.pulse_end)?;
    Ok(apply_stage2_initial_conditions(&s1, params))
}
