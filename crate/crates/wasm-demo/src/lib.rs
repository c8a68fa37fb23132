//! Browser bindings: Stokes intensity curves, the Δφ fringe and the
//! visibility-vs-attenuation sweep on a small grid.
//!
//! Tables are returned flattened row by row so JavaScript receives a plain
//! `Float64Array`.

use cers_core::analytic::{cers_terms, seeded_state, CersTerms, CorrelationState, TwoStageSetup};
use cers_core::fringe::{fit_fringe, phase_grid};
use cers_core::params::{Grid, PhysicalParams};
use wasm_bindgen::prelude::*;

pub const MIN_GRID: usize = 8;
pub const MAX_GRID: usize = 96;

/// Columns of [`Demo::curves`].
pub const CURVE_COLUMNS: usize = 6;
/// Columns of [`Demo::visibility_sweep`].
pub const SWEEP_COLUMNS: usize = 4;

#[wasm_bindgen]
pub struct Demo {
    setup: TwoStageSetup,
    seeded: CorrelationState,
    terms: Vec<CersTerms>,
}

impl Demo {
    /// Default cell and pump settings with `n` cells in space and time and
    /// the given storage delay in microseconds.
    pub fn build(n: usize, delay_us: f64) -> cers_core::Result<Demo> {
        if !(MIN_GRID..=MAX_GRID).contains(&n) {
            return Err(cers_core::Error::InvalidParameter {
                name: "grid",
                reason: format!("must lie in [{MIN_GRID}, {MAX_GRID}], got {n}"),
            });
        }
        let params = PhysicalParams {
            delay_time: delay_us * 1e-6,
            apply_delay_decay: delay_us > 0.0,
            ..PhysicalParams::default()
        };
        params.validate()?;
        let grid = Grid::new(n, n, params.pulse_duration_dimensionless)?;
        let setup = TwoStageSetup::new(&params, grid)?;
        let seeded = seeded_state(&setup, &params)?;
        let terms = (0..=n)
            .map(|k| cers_terms(&setup.stage2, &seeded, grid.time(k)))
            .collect::<cers_core::Result<Vec<_>>>()?;
        Ok(Demo { setup, seeded, terms })
    }

    fn end(&self) -> &CersTerms {
        &self.terms[self.terms.len() - 1]
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, delay_us: f64) -> Result<Demo, JsError> {
        Demo::build(n, delay_us).map_err(|e| JsError::new(&e.to_string()))
    }

    /// Rows `[t̃, spontaneous, seed only, spin only, uncorrelated sum, total]`
    /// at phase difference `delta_phi`.
    pub fn curves(&self, delta_phi: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.terms.len() * CURVE_COLUMNS);
        for t in &self.terms {
            let b = t.at_phase(delta_phi);
            out.extend_from_slice(&[
                b.t,
                b.i_spon,
                b.i_spon + b.i_seed,
                b.i_spon + b.i_spin_wave,
                b.uncorrelated_sum(),
                b.i_total,
            ]);
        }
        out
    }

    /// Phase offset φ₀ at the end of the pulse; NaN when there is no fringe.
    pub fn phase_offset(&self) -> f64 {
        self.end().phase_offset().value().unwrap_or(f64::NAN)
    }

    /// Rows `[Δφ, total]` over `points` phases in [0, 2π).
    pub fn fringe(&self, points: usize) -> Vec<f64> {
        let end = self.end();
        phase_grid(points.max(2))
            .into_iter()
            .flat_map(|p| [p, end.at_phase(p).i_total])
            .collect()
    }

    /// Rows `[η, visibility, seed, spin wave]` for η over [0, 2].
    pub fn visibility_sweep(&self, points: usize) -> Vec<f64> {
        let points = points.max(2);
        let t_end = self.setup.stage2.grid.t_max;
        let phases = phase_grid(16);
        let mut out = Vec::with_capacity(points * SWEEP_COLUMNS);
        for j in 0..points {
            let eta = 2.0 * j as f64 / (points - 1) as f64;
            let row = self
                .seeded
                .attenuated(eta)
                .and_then(|s| cers_terms(&self.setup.stage2, &s, t_end))
                .and_then(|t| {
                    let samples: Vec<_> = phases.iter().map(|&p| (p, t.at_phase(p).i_total)).collect();
                    Ok([eta, fit_fringe(&samples)?.visibility, t.i_seed, t.i_spin_wave])
                })
                .unwrap_or([eta, f64::NAN, f64::NAN, f64::NAN]);
            out.extend_from_slice(&row);
        }
        out
    }
}
