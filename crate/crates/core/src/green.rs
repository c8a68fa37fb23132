//! Direct integration of the light–atom equations and numerical impulse
//! responses.
//!
//! The field lives on the `n_z + 1` cell faces and the spin wave on the cell
//! centres. At each time level the field is integrated along ζ,
//! `e_{c+1} = e_c + i g Δζ s†_c`, while the spin wave is advanced with the
//! trapezoidal (Crank–Nicolson) rule using the face-averaged field. The new
//! spin value of cell `c` depends only on faces `≤ c + 1`, so each level is
//! solved by one sweep in ζ.
//!
//! The coefficients do not depend on ζ, so the scheme is exactly
//! translation invariant in space: the response to an impulse in cell `m` is
//! the response to an impulse in cell 0 shifted by `m` cells. One march
//! therefore yields every spin-impulse column, and one march per time step
//! yields every noise column of that step.

use num_complex::Complex64;

use crate::analytic::{
    apply_stage2_initial_conditions, CersTerms, CorrelationState, IntensityBreakdown, StateLabel, TwoStageSetup,
};
use crate::error::{Error, Result};
use crate::fringe::{fit_fringe, phase_grid, FringeSummary};
use crate::kernels::KernelContext;
use crate::matrix::CMatrix;
use crate::params::{trapezoid_weights, Grid, PhysicalParams};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest allowed Re(Γ̃)·Δt̃ and |g|²·Δt̃.
pub const MAX_STEP_PRODUCT: f64 = 0.1;

/// Impulse responses of one stage on its grid.
///
/// Responses are per unit input value: a boundary field of 1 at one time
/// node, an initial spin value of 1 in one cell, or a spin source of 1 added
/// over one time step in one cell. "Final" means the last time node.
#[derive(Debug, Clone)]
pub struct GreenTable {
    pub grid: Grid,
    /// `[n][k]`: exit field at node `n` from the boundary field at node `k`.
    pub field_from_seed: CMatrix,
    /// `[n][m]`: exit field at node `n` from the initial spin in cell `m`.
    pub field_from_spin: CMatrix,
    /// `[c][k]`: final spin in cell `c` from the boundary field at node `k`.
    pub spin_from_seed: CMatrix,
    /// `[c][m]`: final spin in cell `c` from the initial spin in cell `m`.
    pub spin_from_spin: CMatrix,
    /// `Σ |exit field|²` over all noise cells per output node, for a noise of
    /// unit strength (`⟨f f†⟩ = δδ`).
    pub noise_field_power: Vec<f64>,
    /// Noise contribution to `⟨e†e⟩`, unit strength. Only built on request.
    pub noise_field_field: Option<CMatrix>,
    /// Noise contribution to `⟨e† s†_final⟩`, unit strength. Only built on request.
    pub noise_field_spin: Option<CMatrix>,
    /// The stage's own noise strength 2 Re(Γ̃).
    pub noise_strength: f64,
    /// Pump phase carried by the coupling.
    pub coupling_phase: f64,
}

/// Spin source added over one step.
#[derive(Clone, Copy)]
enum Source<'a> {
    None,
    Cell0(Complex64),
    Cells(&'a [Complex64]),
}

struct Marcher<'a> {
    ctx: &'a KernelContext,
    g: Complex64,
    gamma: Complex64,
    dz: f64,
    half_dt: f64,
}

impl<'a> Marcher<'a> {
    fn new(ctx: &'a KernelContext) -> Self {
        Self {
            ctx,
            g: ctx.coeffs.coupling,
            gamma: ctx.coeffs.decay,
            dz: ctx.grid.dz(),
            half_dt: 0.5 * ctx.grid.dt(),
        }
    }

    /// Field faces from the boundary value and the spin cells.
    fn faces(&self, boundary: Complex64, spin: &[Complex64], faces: &mut [Complex64]) {
        faces[0] = boundary;
        let step = I * self.g * self.dz;
        for (c, s) in spin.iter().enumerate() {
            faces[c + 1] = faces[c] + step * s;
        }
    }

    /// Advance level `k` → `k + 1`. `faces`/`spin` hold level `k` on entry
    /// and level `k + 1` on exit.
    fn step(&self, k: usize, boundary_next: Complex64, source: Source, spin: &mut [Complex64], faces: &mut [Complex64]) {
        let a = self.half_dt;
        let w0 = self.ctx.w_table[k];
        let w1 = self.ctx.w_table[k + 1];
        let gc = self.g.conj();
        let keep = 1.0 - a * self.gamma;
        let denom = 1.0 + a * self.gamma - a * w1 * self.g.norm_sqr() * self.dz * 0.5;
        let old_coupling = -I * gc * (a * w0);
        let new_coupling = -I * gc * (a * w1);
        let field_step = I * self.g * self.dz;
        let mut e_old_left = faces[0];
        faces[0] = boundary_next;
        for c in 0..spin.len() {
            let e_old_right = faces[c + 1];
            let e_bar = 0.5 * (e_old_left + e_old_right);
            let mut rhs = spin[c] * keep + old_coupling * e_bar + new_coupling * faces[c];
            rhs += match source {
                Source::None => ZERO,
                Source::Cell0(v) => {
                    if c == 0 {
                        v
                    } else {
                        ZERO
                    }
                }
                Source::Cells(v) => v[c],
            };
            spin[c] = rhs / denom;
            faces[c + 1] = faces[c] + field_step * spin[c];
            e_old_left = e_old_right;
        }
    }
}

/// Check the resolution constraint of the scheme.
pub fn check_resolution(ctx: &KernelContext) -> Result<()> {
    let dt = ctx.grid.dt();
    let decay = ctx.coeffs.decay.re * dt;
    let gain = ctx.coeffs.gain() * dt;
    if decay > MAX_STEP_PRODUCT || gain > MAX_STEP_PRODUCT {
        return Err(Error::GridTooCoarse(format!(
            "Re(Γ̃)Δt̃ = {decay:.3e} and |g|²Δt̃ = {gain:.3e} must both be <= {MAX_STEP_PRODUCT}"
        )));
    }
    Ok(())
}

/// Marches from a spin impulse in cell 0 at `t = 0`: exit-face history
/// `[n][j]` over all faces, and the final spin.
fn spin_impulse(m: &Marcher, n_t: usize, n_z: usize) -> (CMatrix, Vec<Complex64>) {
    let mut spin = vec![ZERO; n_z];
    spin[0] = Complex64::new(1.0, 0.0);
    let mut faces = vec![ZERO; n_z + 1];
    m.faces(ZERO, &spin, &mut faces);
    let mut hist = CMatrix::zeros(n_t + 1, n_z + 1);
    hist.row_mut(0).copy_from_slice(&faces);
    for k in 0..n_t {
        m.step(k, ZERO, Source::None, &mut spin, &mut faces);
        hist.row_mut(k + 1).copy_from_slice(&faces);
    }
    (hist, spin)
}

fn check_finite(values: &[Complex64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Build all impulse-response tables of one stage. With `noise_correlations`
/// the noise contributions to `⟨e†e⟩` and `⟨e† s†⟩` are accumulated too,
/// which costs O(n_z n_t³ + n_z² n_t²).
pub fn build_green_table(ctx: &KernelContext, noise_correlations: bool) -> Result<GreenTable> {
    check_resolution(ctx)?;
    let grid = ctx.grid;
    let (n_z, n_t) = (grid.n_z, grid.n_t);
    let dz = grid.dz();
    let dt = grid.dt();
    let m = Marcher::new(ctx);

    let (hist, final_spin) = spin_impulse(&m, n_t, n_z);
    check_finite(hist.as_slice(), "spin impulse response")?;
    let field_from_spin = CMatrix::from_fn(n_t + 1, n_z, |n, c| hist[(n, n_z - c)]);
    let spin_from_spin = CMatrix::from_fn(n_z, n_z, |c, j| if c >= j { final_spin[c - j] } else { ZERO });

    let mut field_from_seed = CMatrix::zeros(n_t + 1, n_t + 1);
    let mut spin_from_seed = CMatrix::zeros(n_z, n_t + 1);
    let mut spin = vec![ZERO; n_z];
    let mut faces = vec![ZERO; n_z + 1];
    for k in 0..=n_t {
        // a boundary value at node k also enters the step that ends at k
        spin.fill(ZERO);
        if k == 0 {
            m.faces(Complex64::new(1.0, 0.0), &spin, &mut faces);
        } else {
            faces.fill(ZERO);
            m.step(k - 1, Complex64::new(1.0, 0.0), Source::None, &mut spin, &mut faces);
        }
        field_from_seed[(k, k)] = faces[n_z];
        for n in k..n_t {
            m.step(n, ZERO, Source::None, &mut spin, &mut faces);
            field_from_seed[(n + 1, k)] = faces[n_z];
        }
        check_finite(&spin, "seed impulse response")?;
        for c in 0..n_z {
            spin_from_seed[(c, k)] = spin[c];
        }
    }

    let mut noise_field_power = vec![0.0; n_t + 1];
    let mut nff = noise_correlations.then(|| CMatrix::zeros(n_t + 1, n_t + 1));
    let mut nfs = noise_correlations.then(|| CMatrix::zeros(n_t + 1, n_z));
    // a unit-strength noise cell carries a spin source of √(Δt/Δζ)
    let amp = (dt / dz).sqrt();
    for k in 0..n_t {
        spin.fill(ZERO);
        faces.fill(ZERO);
        let rows = n_t - k;
        let mut f_k = CMatrix::zeros(n_z, rows);
        for (j, n) in (k..n_t).enumerate() {
            let src = if n == k { Source::Cell0(Complex64::new(amp, 0.0)) } else { Source::None };
            m.step(n, ZERO, src, &mut spin, &mut faces);
            for c in 0..n_z {
                let v = faces[n_z - c];
                f_k[(c, j)] = v;
                noise_field_power[n + 1] += v.norm_sqr();
            }
        }
        check_finite(f_k.as_slice(), "noise impulse response")?;
        if let (Some(ff), Some(fs)) = (nff.as_mut(), nfs.as_mut()) {
            let s_k = CMatrix::from_fn(n_z, n_z, |c0, c| if c >= c0 { spin[c - c0] } else { ZERO });
            ff.accumulate_cross_block(&f_k, &f_k, 1.0, k + 1, k + 1);
            fs.accumulate_cross_block(&f_k, &s_k, 1.0, k + 1, 0);
        }
    }

    Ok(GreenTable {
        grid,
        field_from_seed,
        field_from_spin,
        spin_from_seed,
        spin_from_spin,
        noise_field_power,
        noise_field_field: nff,
        noise_field_spin: nfs,
        noise_strength: ctx.coeffs.noise_strength(),
        coupling_phase: ctx.coeffs.coupling.arg(),
    })
}

/// Field response at every face and time to a unit spin impulse in cell `m`
/// at `t = 0`, by a direct march (no translation shortcut).
pub fn spin_impulse_history(ctx: &KernelContext, m: usize) -> Result<CMatrix> {
    check_resolution(ctx)?;
    let (n_z, n_t) = (ctx.grid.n_z, ctx.grid.n_t);
    if m >= n_z {
        return Err(Error::Domain(format!("cell {m} outside 0..{n_z}")));
    }
    let marcher = Marcher::new(ctx);
    let mut spin = vec![ZERO; n_z];
    spin[m] = Complex64::new(1.0, 0.0);
    let mut faces = vec![ZERO; n_z + 1];
    marcher.faces(ZERO, &spin, &mut faces);
    let mut hist = CMatrix::zeros(n_t + 1, n_z + 1);
    hist.row_mut(0).copy_from_slice(&faces);
    for k in 0..n_t {
        marcher.step(k, ZERO, Source::None, &mut spin, &mut faces);
        hist.row_mut(k + 1).copy_from_slice(&faces);
    }
    Ok(hist)
}

/// Run the scheme for arbitrary inputs: boundary field per node, initial
/// spin per cell, and spin sources `[k][c]` added over step `k`. Returns the
/// exit field per node and the final spin.
pub fn simulate(
    ctx: &KernelContext,
    boundary: &[Complex64],
    initial_spin: &[Complex64],
    sources: Option<&CMatrix>,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_resolution(ctx)?;
    let (n_z, n_t) = (ctx.grid.n_z, ctx.grid.n_t);
    let bad_sources = sources.is_some_and(|m| m.shape() != (n_t, n_z));
    if boundary.len() != n_t + 1 || initial_spin.len() != n_z || bad_sources {
        return Err(Error::GridMismatch("input lengths do not match the grid".into()));
    }
    let m = Marcher::new(ctx);
    let mut spin = initial_spin.to_vec();
    let mut faces = vec![ZERO; n_z + 1];
    m.faces(boundary[0], &spin, &mut faces);
    let mut out = vec![faces[n_z]; n_t + 1];
    for k in 0..n_t {
        let src = match sources {
            Some(m) => Source::Cells(m.row(k)),
            None => Source::None,
        };
        m.step(k, boundary[k + 1], src, &mut spin, &mut faces);
        out[k + 1] = faces[n_z];
    }
    Ok((out, spin))
}

/// Stage-1 output correlations from the impulse tables of a table built with
/// noise correlations on the stage-1 grid.
pub fn green_stage1_correlations(table: &GreenTable) -> Result<CorrelationState> {
    let (ff, fs) = match (&table.noise_field_field, &table.noise_field_spin) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Domain("green table was built without noise correlations".into())),
    };
    let grid = table.grid;
    let (n_z, n_t) = (grid.n_z, grid.n_t);
    let dz = grid.dz();
    let inv = 1.0 / dz.sqrt();
    // normalised spin-vacuum modes: initial spin 1/√Δζ per cell
    let a = CMatrix::from_fn(n_z, n_t + 1, |m, n| table.field_from_spin[(n, m)] * inv);
    let b = CMatrix::from_fn(n_z, n_z, |m, c| table.spin_from_spin[(c, m)] * inv);
    let mut c_ee = ff.scaled(Complex64::new(table.noise_strength, 0.0));
    let mut anti = fs.scaled(Complex64::new(table.noise_strength, 0.0));
    c_ee.accumulate_cross(&a, &a, 1.0);
    anti.accumulate_cross(&a, &b, 1.0);
    // boundary vacuum: nodal values with ⟨e e†⟩ = 1/ω_k
    let w = trapezoid_weights(n_t, grid.dt());
    let r = CMatrix::from_fn(n_t + 1, n_z, |k, c| table.spin_from_seed[(c, k)] / w[k].sqrt());
    let mut ss = CMatrix::zeros(n_z, n_z);
    ss.accumulate_cross(&r, &r, 1.0);
    let state = CorrelationState {
        grid,
        c_ee,
        c_ss: ss.conj(),
        c_es: anti.conj(),
        label: StateLabel::Stage1Output,
        seed_phase: 0.0,
    };
    if !(state.c_ee.all_finite() && state.c_ss.all_finite() && state.c_es.all_finite()) {
        return Err(Error::NonFinite("green stage-1 correlations"));
    }
    Ok(state)
}

/// Phase-independent terms at output node `n`, the counterpart of
/// [`crate::analytic::cers_terms`]. `noise_weight` multiplies the unit-strength
/// noise power; pass `table.noise_strength` for the physical value.
pub fn green_terms(table: &GreenTable, state: &CorrelationState, n: usize, noise_weight: f64) -> Result<CersTerms> {
    let grid = table.grid;
    let dt_ok = (state.grid.dt() - grid.dt()).abs() <= 1e-9 * grid.dt();
    if state.grid.n_z != grid.n_z || !dt_ok {
        return Err(Error::GridMismatch("correlation state and green table grids differ".into()));
    }
    if n > grid.n_t {
        return Err(Error::OutOfRange {
            t: grid.time(n.min(usize::MAX / 2)),
            t_max: grid.t_max,
        });
    }
    let n_z = grid.n_z;
    let dz = grid.dz();
    let spin_row = table.field_from_spin.row(n);
    let seed_row = table.field_from_seed.row(n);
    let rows = state.c_ee.rows().min(n + 1);

    let spon_vac: f64 = spin_row.iter().map(|v| v.norm_sqr()).sum::<f64>() / dz;
    let i_spon = spon_vac + noise_weight * table.noise_field_power[n];

    let mut i_seed = ZERO;
    for a in 0..rows {
        let row = state.c_ee.row(a);
        let mut inner = ZERO;
        for b in 0..rows {
            inner += row[b] * seed_row[b];
        }
        i_seed += seed_row[a].conj() * inner;
    }
    let mut i_spin = ZERO;
    for b in 0..n_z {
        let row = state.c_ss.row(b);
        let mut inner = ZERO;
        for a in 0..n_z {
            inner += spin_row[a].conj() * row[a];
        }
        i_spin += spin_row[b] * inner;
    }
    let mut x = ZERO;
    for a in 0..rows {
        let row = state.c_es.row(a);
        let mut inner = ZERO;
        for (r, e) in spin_row.iter().zip(row) {
            inner += r * e.conj();
        }
        x += seed_row[a].conj() * inner;
    }
    let embedded = table.coupling_phase - state.seed_phase;
    Ok(CersTerms {
        t: grid.time(n),
        i_spon,
        i_seed: i_seed.re,
        i_spin_wave: i_spin.re,
        cross: x * Complex64::from_polar(1.0, -embedded),
    })
}

pub fn intensity_from_green(
    table: &GreenTable,
    state: &CorrelationState,
    t: f64,
    delta_phi: f64,
    noise_weight: f64,
) -> Result<IntensityBreakdown> {
    let n = table
        .grid
        .node_index(t)
        .ok_or_else(|| Error::GridMismatch(format!("t̃ = {t} is not a time node")))?;
    Ok(green_terms(table, state, n, noise_weight)?.at_phase(delta_phi))
}

/// Spontaneous output of a stage on every node.
pub fn green_srs_curve(table: &GreenTable) -> Result<Vec<f64>> {
    let vac = CorrelationState::vacuum(table.grid);
    (0..=table.grid.n_t)
        .map(|n| green_terms(table, &vac, n, table.noise_strength).map(|t| t.i_spon))
        .collect()
}

/// End-to-end result of the direct solver.
#[derive(Debug, Clone)]
pub struct GreenRun {
    pub seeded: CorrelationState,
    pub stage2: GreenTable,
    /// Terms at every stage-2 node.
    pub terms: Vec<CersTerms>,
    /// Intensity breakdown at the configured Δφ.
    pub curve: Vec<IntensityBreakdown>,
    /// Fringe over Δφ at the last node.
    pub fringe: FringeSummary,
}

pub fn run_two_stage_green(params: &PhysicalParams, grid: Grid) -> Result<GreenRun> {
    run_two_stage_green_with(&TwoStageSetup::new(params, grid)?, params, 64)
}

pub fn run_two_stage_green_with(setup: &TwoStageSetup, params: &PhysicalParams, fringe_points: usize) -> Result<GreenRun> {
    let t1 = build_green_table(&setup.stage1, true)?;
    let s1 = green_stage1_correlations(&t1)?;
    let seeded = apply_stage2_initial_conditions(&s1, params);
    let stage2 = build_green_table(&setup.stage2, false)?;
    let terms = (0..=stage2.grid.n_t)
        .map(|n| green_terms(&stage2, &seeded, n, stage2.noise_strength))
        .collect::<Result<Vec<_>>>()?;
    let dphi = params.delta_phi();
    let curve = terms.iter().map(|t| t.at_phase(dphi)).collect();
    let last = terms[terms.len() - 1];
    let samples: Vec<_> = phase_grid(fringe_points.max(8))
        .into_iter()
        .map(|p| (p, last.at_phase(p).i_total))
        .collect();
    let fringe = fit_fringe(&samples)?;
    Ok(GreenRun {
        seeded,
        stage2,
        terms,
        curve,
        fringe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{seeded_state, srs_intensity, stage1_output_correlations};
    use crate::kernels::{coeff_kernel, CoeffKernel, Point};
    use crate::params::StageCoefficients;

    fn ideal_ctx(n: usize, t_max: f64) -> KernelContext {
        KernelContext::new(StageCoefficients::ideal(), Grid::new(n, n, t_max).unwrap()).unwrap()
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let ctx = ideal_ctx(8, 2.0);
        assert!(matches!(build_green_table(&ctx, false), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn zero_coupling_decouples() {
        let mut c = StageCoefficients::ideal();
        c.coupling = ZERO;
        c.decay = Complex64::new(0.3, -0.2);
        let ctx = KernelContext::new(c, Grid::new(16, 64, 1.0).unwrap()).unwrap();
        let t = build_green_table(&ctx, false).unwrap();
        for n in 0..=64 {
            for k in 0..=64 {
                let expect = if n == k { 1.0 } else { 0.0 };
                assert_eq!(t.field_from_seed[(n, k)], Complex64::new(expect, 0.0));
            }
        }
        assert!(t.field_from_spin.is_zero());
        let decayed = t.spin_from_spin[(3, 3)];
        assert!((decayed - (-c.decay).exp()).norm() < 1e-4);
    }

    #[test]
    fn superposition() {
        let ctx = KernelContext::new(
            default_coefficients().cers,
            Grid::new(16, 32, 2.0).unwrap(),
        )
        .unwrap();
        let n = 33;
        let b1: Vec<_> = (0..n).map(|k| Complex64::new((k as f64 * 0.3).sin(), 0.1)).collect();
        let b2: Vec<_> = (0..n).map(|k| Complex64::new(0.2, (k as f64).cos())).collect();
        let s1: Vec<_> = (0..16).map(|c| Complex64::new(c as f64 * 0.01, 0.0)).collect();
        let s2: Vec<_> = (0..16).map(|c| Complex64::new(0.0, 1.0 - c as f64 * 0.02)).collect();
        let sum_b: Vec<_> = b1.iter().zip(&b2).map(|(a, b)| a + b).collect();
        let sum_s: Vec<_> = s1.iter().zip(&s2).map(|(a, b)| a + b).collect();
        let (o1, f1) = simulate(&ctx, &b1, &s1, None).unwrap();
        let (o2, f2) = simulate(&ctx, &b2, &s2, None).unwrap();
        let (o, f) = simulate(&ctx, &sum_b, &sum_s, None).unwrap();
        for k in 0..n {
            assert!((o[k] - o1[k] - o2[k]).norm() <= 1e-12 * o[k].norm().max(1.0));
        }
        for c in 0..16 {
            assert!((f[c] - f1[c] - f2[c]).norm() <= 1e-12 * f[c].norm().max(1.0));
        }
    }

    #[allow(non_snake_case)]
    fn default_coefficients() -> crate::params::TwoStageCoefficients {
        crate::params::TwoStageCoefficients::from_params(&PhysicalParams::default()).unwrap()
    }

    #[test]
    fn table_columns_match_direct_simulation() {
        let ctx = KernelContext::new(default_coefficients().cers, Grid::new(12, 24, 2.0).unwrap()).unwrap();
        let t = build_green_table(&ctx, false).unwrap();
        // seed column 5
        let mut b = vec![ZERO; 25];
        b[5] = Complex64::new(1.0, 0.0);
        let (o, fin) = simulate(&ctx, &b, &vec![ZERO; 12], None).unwrap();
        for n in 0..=24 {
            assert!((o[n] - t.field_from_seed[(n, 5)]).norm() < 1e-13);
        }
        for c in 0..12 {
            assert!((fin[c] - t.spin_from_seed[(c, 5)]).norm() < 1e-13);
        }
        // spin impulse in cell 7 equals the shifted cell-0 response
        let hist = spin_impulse_history(&ctx, 7).unwrap();
        for n in 0..=24 {
            assert!((hist[(n, 12)] - t.field_from_spin[(n, 7)]).norm() < 1e-13);
        }
        // a source in cell 4 over step 9
        let mut src = CMatrix::zeros(24, 12);
        src[(9, 4)] = Complex64::new(1.0, 0.0);
        let (o, _) = simulate(&ctx, &vec![ZERO; 25], &vec![ZERO; 12], Some(&src)).unwrap();
        assert!(o[..=9].iter().all(|v| *v == ZERO));
        assert!(o[10].norm() > 0.0);
        // noise power at node 10: every cell of steps 0..=9, one at a time
        let amp = (ctx.grid.dt() / ctx.grid.dz()).sqrt();
        let mut power = 0.0;
        for k in 0..10 {
            for c in 0..12 {
                let mut src = CMatrix::zeros(24, 12);
                src[(k, c)] = Complex64::new(amp, 0.0);
                power += simulate(&ctx, &vec![ZERO; 25], &vec![ZERO; 12], Some(&src)).unwrap().0[10].norm_sqr();
            }
        }
        assert!((power - t.noise_field_power[10]).abs() < 1e-12 * power);
    }

    #[test]
    fn causality() {
        let ctx = KernelContext::new(default_coefficients().srs, Grid::new(16, 32, 2.0).unwrap()).unwrap();
        let t = build_green_table(&ctx, false).unwrap();
        for n in 0..=32 {
            for k in (n + 1)..=32 {
                assert_eq!(t.field_from_seed[(n, k)], ZERO);
            }
        }
        assert_eq!(t.noise_field_power[0], 0.0);
    }

    #[test]
    fn phase_covariance() {
        let mut c = default_coefficients().cers;
        let grid = Grid::new(12, 32, 2.0).unwrap();
        let t0 = build_green_table(&KernelContext::new(c, grid).unwrap(), false).unwrap();
        let theta = 0.9;
        c.coupling *= Complex64::from_polar(1.0, theta);
        let t1 = build_green_table(&KernelContext::new(c, grid).unwrap(), false).unwrap();
        let rot = Complex64::from_polar(1.0, theta);
        for n in 0..=32 {
            for m in 0..12 {
                assert!((t1.field_from_spin[(n, m)] - rot * t0.field_from_spin[(n, m)]).norm() < 1e-12);
            }
            for k in 0..=32 {
                assert!((t1.field_from_seed[(n, k)].norm() - t0.field_from_seed[(n, k)].norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spin_response_matches_kernel_at_fine_grid() {
        let ctx = ideal_ctx(256, 1.0);
        let t = build_green_table(&ctx, false).unwrap();
        let dz = ctx.grid.dz();
        for (n, m) in [(256, 0), (256, 100), (128, 30), (40, 200)] {
            let z = ctx.grid.z_center(m);
            let k = coeff_kernel(&ctx, CoeffKernel::SpinToField, Point::new(1.0, ctx.grid.time(n)), Point::new(z, 0.0))
                .unwrap();
            let got = t.field_from_spin[(n, m)].norm() / dz;
            assert!((got - k.weight.norm()).abs() < 0.01 * k.weight.norm(), "n={n} m={m}");
        }
    }

    #[test]
    fn srs_agrees_with_analytic_and_converges() {
        let p = PhysicalParams::default();
        let err = |n: usize| {
            let s = TwoStageSetup::new(&p, Grid::new(n, n, 2.0).unwrap()).unwrap();
            let table = build_green_table(&s.stage1, false).unwrap();
            let g = green_srs_curve(&table).unwrap();
            let mut worst = 0.0f64;
            for k in 0..=n {
                let t = s.stage1.grid.time(k);
                if t < 0.1 - 1e-12 {
                    continue;
                }
                let a = srs_intensity(&s.stage1, t).unwrap();
                worst = worst.max(((g[k] - a) / a).abs());
            }
            worst
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e2 < 0.02);
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn stage1_correlations_match_analytic() {
        let p = PhysicalParams::default();
        let s = TwoStageSetup::new(&p, Grid::new(48, 48, 2.0).unwrap()).unwrap();
        let table = build_green_table(&s.stage1, true).unwrap();
        let g = green_stage1_correlations(&table).unwrap();
        let a = stage1_output_correlations(&s.stage1, s.pulse_end).unwrap();
        let rel = |x: &CMatrix, y: &CMatrix| {
            let mut d = x.clone();
            for (o, v) in d.as_mut_slice().iter_mut().zip(y.as_slice()) {
                *o -= v;
            }
            d.max_abs() / y.max_abs()
        };
        assert!(rel(&g.c_ee, &a.c_ee) < 0.02);
        assert!(rel(&g.c_ss, &a.c_ss) < 0.02);
        assert!(rel(&g.c_es, &a.c_es) < 0.02);
        assert!(g.blocks_are_physical(1e-10));
    }

    #[test]
    fn two_stage_matches_analytic() {
        let p = PhysicalParams::default();
        let grid = Grid::new(48, 48, 2.0).unwrap();
        let setup = TwoStageSetup::new(&p, grid).unwrap();
        let run = run_two_stage_green_with(&setup, &p, 32).unwrap();
        let seeded = seeded_state(&setup, &p).unwrap();
        let a = crate::analytic::cers_intensity(&setup.stage2, &seeded, 2.0, 0.0).unwrap();
        let g = run.curve[48];
        assert!(((g.i_total - a.i_total) / a.i_total).abs() < 0.03);
        assert!(run.fringe.residual < 1e-9);
        let unc = green_terms(&run.stage2, &run.seeded.uncorrelated(), 48, run.stage2.noise_strength).unwrap();
        assert_eq!(unc.cross, ZERO);
    }
}
