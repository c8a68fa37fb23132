//! Physical inputs, the pump-derived rates, and the shared space–time grid.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Physical constants of the two-pulse experiment, in SI units unless noted.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Single-photon detuning Δ (1/s). Must be nonzero.
    pub detuning: f64,
    /// Pump Rabi frequency of the SRS pulse |Ω_P1| (1/s).
    pub rabi_p1: f64,
    /// Pump Rabi frequency of the CERS pulse |Ω_P2| (1/s).
    pub rabi_p2: f64,
    /// Ng²/c (1/(m·s)).
    pub coupling_density: f64,
    /// Excited-state decay γ (1/s).
    pub excited_decay: f64,
    /// Ground-state coherence decay γ_S0 (1/s).
    pub coherence_decay: f64,
    /// Population difference W(0) at the start of the CERS pulse.
    /// The SRS pulse always starts from the fully prepared ground state, W(0) = 1.
    pub initial_population_diff: f64,
    /// Cell length L (m).
    pub cell_length: f64,
    /// Speed of light c (m/s).
    pub light_speed: f64,
    /// Length of the CERS time window in units of `t̃`.
    pub pulse_duration_dimensionless: f64,
    /// Length T of the SRS pulse in units of `t̃`; `None` means the same as
    /// `pulse_duration_dimensionless`.
    pub stage1_duration_dimensionless: Option<f64>,
    /// Delay δt between the pulses (s).
    pub delay_time: f64,
    /// Apply the collisional decay of the stored spin wave over `delay_time`.
    pub apply_delay_decay: bool,
    /// Phase φ_P picked up by the pump between the pulses (rad).
    pub phase_pump: f64,
    /// Phase φ_S picked up by the Stokes seed between the pulses (rad).
    pub phase_stokes: f64,
}

impl Default for PhysicalParams {
    /// Reference parameter set, with L = 5 cm.
    fn default() -> Self {
        Self {
            detuning: 1.2e9,
            rabi_p1: 2.5e8,
            rabi_p2: 2.5e8,
            coupling_density: 1.0e12,
            excited_decay: 2.0 * std::f64::consts::PI * 5.746e6,
            coherence_decay: 1.0e4,
            initial_population_diff: 0.99,
            cell_length: 0.05,
            light_speed: 299_792_458.0,
            pulse_duration_dimensionless: 2.0,
            stage1_duration_dimensionless: None,
            delay_time: 0.0,
            apply_delay_decay: false,
            phase_pump: 0.0,
            phase_stokes: 0.0,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

fn nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {v}")))
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !self.detuning.is_finite() || self.detuning == 0.0 {
            return Err(Error::param(
                "delta",
                format!("detuning must be finite and nonzero (large-detuning model), got {}", self.detuning),
            ));
        }
        nonnegative("rabi_p1", self.rabi_p1)?;
        nonnegative("rabi_p2", self.rabi_p2)?;
        positive("coupling_density", self.coupling_density)?;
        positive("gamma", self.excited_decay)?;
        positive("gamma_s0", self.coherence_decay)?;
        if self.initial_population_diff.is_nan() || self.initial_population_diff.abs() > 1.0 {
            return Err(Error::param(
                "w0",
                format!("population difference must lie in [-1, 1], got {}", self.initial_population_diff),
            ));
        }
        positive("cell_length", self.cell_length)?;
        positive("light_speed", self.light_speed)?;
        positive("t_tilde_max", self.pulse_duration_dimensionless)?;
        if let Some(t1) = self.stage1_duration_dimensionless {
            positive("pulse_duration", t1)?;
        }
        nonnegative("delay_time", self.delay_time)?;
        for (name, phase) in [("phase_pump", self.phase_pump), ("phase_stokes", self.phase_stokes)] {
            if !phase.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn stage1_duration(&self) -> f64 {
        self.stage1_duration_dimensionless
            .unwrap_or(self.pulse_duration_dimensionless)
    }

    /// Relative phase Δφ = φ_P − φ_S applied between the pulses.
    pub fn delta_phi(&self) -> f64 {
        self.phase_pump - self.phase_stokes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// First pulse: spontaneous scattering from vacuum and ground-state atoms.
    Srs,
    /// Second pulse, seeded by the first pulse's Stokes light and spin wave.
    Cers,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Srs => "srs",
            Stage::Cers => "cers",
        }
    }
}

/// Pump-dependent rates of one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// χ²L/c = (Ng²/c)(Ω_P/Δ)²L, in 1/s.
    pub gain_rate: f64,
    /// Phase of χ, inherited from the pump.
    pub pump_phase: f64,
    /// γ_L = γ|Ω_P|²/Δ².
    pub optical_pumping_rate: f64,
    /// δ_L = |Ω_P|²/Δ.
    pub stark_shift: f64,
    /// γ_S = γ_S0 + γ_L.
    pub total_coherence_decay: f64,
    /// Γ_S = γ_S − iδ_L.
    pub complex_decay: Complex64,
}

pub fn derive_rates(params: &PhysicalParams, stage: Stage) -> Result<DerivedRates> {
    params.validate()?;
    let (rabi, pump_phase) = match stage {
        Stage::Srs => (params.rabi_p1, 0.0),
        Stage::Cers => (params.rabi_p2, params.phase_pump),
    };
    let delta = params.detuning;
    let ratio_sq = (rabi / delta).powi(2);
    let optical_pumping_rate = params.excited_decay * ratio_sq;
    let stark_shift = rabi * rabi / delta;
    let total_coherence_decay = params.coherence_decay + optical_pumping_rate;
    Ok(DerivedRates {
        gain_rate: params.coupling_density * ratio_sq * params.cell_length,
        pump_phase,
        optical_pumping_rate,
        stark_shift,
        total_coherence_decay,
        complex_decay: Complex64::new(total_coherence_decay, -stark_shift),
    })
}

/// t̃ = t·χ²L/c.
pub fn dimensionless_time(rates: &DerivedRates, t_seconds: f64) -> f64 {
    t_seconds * rates.gain_rate
}

/// Inverse of [`dimensionless_time`].
pub fn physical_time(rates: &DerivedRates, t_tilde: f64) -> Result<f64> {
    if rates.gain_rate == 0.0 {
        return Err(Error::param(
            "rabi_p1",
            "zero coupling χ has no dimensionless time scale",
        ));
    }
    Ok(t_tilde / rates.gain_rate)
}

/// Dimensionless coefficients of one stage's equations
///
/// ```text
/// ∂_ζ e  = i g s†
/// ∂_t̃ s† = −Γ̃ s† − i W g* e + f†,   ⟨f f†⟩ = 2 Re(Γ̃) δ(ζ−ζ')δ(t̃−t̃')
/// ∂_t̃ W  = −γ̃_L (W + 1)
/// ```
///
/// where rates are divided by the reference gain rate χ₁²L/c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageCoefficients {
    /// g = (χ/χ₁)·e^{iφ_P}.
    pub coupling: Complex64,
    /// Γ̃ = Γ_S / (χ₁²L/c).
    pub decay: Complex64,
    /// γ̃_L = γ_L / (χ₁²L/c).
    pub pumping: f64,
    /// W(0).
    pub initial_population: f64,
}

impl StageCoefficients {
    pub fn from_rates(rates: &DerivedRates, reference_gain_rate: f64, initial_population: f64) -> Result<Self> {
        if !(reference_gain_rate.is_finite() && reference_gain_rate > 0.0) {
            return Err(Error::param(
                "rabi_p1",
                "the SRS coupling sets the time scale and must be nonzero",
            ));
        }
        let magnitude = (rates.gain_rate / reference_gain_rate).sqrt();
        Ok(Self {
            coupling: Complex64::from_polar(magnitude, rates.pump_phase),
            decay: rates.complex_decay / reference_gain_rate,
            pumping: rates.optical_pumping_rate / reference_gain_rate,
            initial_population,
        })
    }

    /// Lossless, pumping-free stage with unit coupling and W ≡ 1.
    pub fn ideal() -> Self {
        Self {
            coupling: Complex64::new(1.0, 0.0),
            decay: Complex64::new(0.0, 0.0),
            pumping: 0.0,
            initial_population: 1.0,
        }
    }

    pub fn gain(&self) -> f64 {
        self.coupling.norm_sqr()
    }

    /// Strength 2γ̃_S of the δ-correlated Langevin source.
    pub fn noise_strength(&self) -> f64 {
        2.0 * self.decay.re
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling.re.is_finite() && self.coupling.im.is_finite()) {
            return Err(Error::param("coupling", "must be finite"));
        }
        if !(self.decay.re.is_finite() && self.decay.im.is_finite()) || self.decay.re < 0.0 {
            return Err(Error::param("decay", "Re(Γ̃) must be finite and >= 0"));
        }
        if !(self.pumping.is_finite() && self.pumping >= 0.0) {
            return Err(Error::param("pumping", "must be finite and >= 0"));
        }
        if self.initial_population.is_nan() || self.initial_population.abs() > 1.0 {
            return Err(Error::param("w0", "must lie in [-1, 1]"));
        }
        Ok(())
    }
}

/// Both stages of an experiment expressed in the SRS time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageCoefficients {
    pub srs: StageCoefficients,
    pub cers: StageCoefficients,
    /// χ₁²L/c in 1/s.
    pub reference_gain_rate: f64,
}

impl TwoStageCoefficients {
    pub fn from_params(params: &PhysicalParams) -> Result<Self> {
        let r1 = derive_rates(params, Stage::Srs)?;
        let r2 = derive_rates(params, Stage::Cers)?;
        let reference = r1.gain_rate;
        Ok(Self {
            srs: StageCoefficients::from_rates(&r1, reference, 1.0)?,
            cers: StageCoefficients::from_rates(&r2, reference, params.initial_population_diff)?,
            reference_gain_rate: reference,
        })
    }
}

/// Uniform grid: `n_z` spatial cells on ζ ∈ [0, 1] and `n_t` time steps on
/// t̃ ∈ [0, t_max]. Fields live on the `n_z + 1` cell faces and `n_t + 1` time
/// nodes; spin waves live on the `n_z` cell centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n_z: usize,
    pub n_t: usize,
    pub t_max: f64,
}

impl Grid {
    pub fn new(n_z: usize, n_t: usize, t_max: f64) -> Result<Self> {
        if n_z < 2 {
            return Err(Error::param("n_z", format!("need at least 2 cells, got {n_z}")));
        }
        if n_t < 2 {
            return Err(Error::param("n_t", format!("need at least 2 steps, got {n_t}")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::param("t_tilde_max", format!("must be > 0, got {t_max}")));
        }
        Ok(Self { n_z, n_t, t_max })
    }

    pub fn dz(&self) -> f64 {
        1.0 / self.n_z as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_t as f64
    }

    /// Physical cell width for a cell of length `cell_length`.
    pub fn dz_physical(&self, cell_length: f64) -> f64 {
        cell_length / self.n_z as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_t {
            self.t_max
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_t).map(|k| self.time(k)).collect()
    }

    /// Centre of spin cell `j`.
    pub fn z_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dz()
    }

    pub fn z_face(&self, j: usize) -> f64 {
        j as f64 * self.dz()
    }

    /// Trapezoid weights of the time nodes over [0, t_max].
    pub fn time_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_t, self.dt())
    }

    /// Grid index of `t` when it coincides with a node (to 1e-9 of a step).
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let x = t / self.dt();
        let k = x.round();
        if k >= 0.0 && k <= self.n_t as f64 && (x - k).abs() < 1e-9 {
            Some(k as usize)
        } else {
            None
        }
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.n_z == other.n_z && self.n_t == other.n_t && (self.t_max - other.t_max).abs() <= 1e-12 * self.t_max
    }
}

/// Trapezoid weights for `n` intervals of width `h` (n + 1 nodes).
pub(crate) fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n + 1];
    w[0] = 0.5 * h;
    w[n] = 0.5 * h;
    w
}
