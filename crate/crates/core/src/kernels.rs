//! Scalar building blocks of the integral solution: the population difference
//! W(t̃), the accumulated gain q(t̃), the decay exponents Γ(t̃) and Γ_L(t̃), and
//! the Bessel propagation kernels H, G_S, G_e.
//!
//! All quantities are dimensionless. With ζ = z/L and t̃ = t χ₁²L/c the
//! kernel radicand [q(t′)−q(t″)](z′−z″)/c becomes `Δq̃ · Δζ` where
//! q̃(t̃) = ∫₀^t̃ |g|² W dt̃.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Grid, StageCoefficients};
use crate::specfun::{i0_of_sqrt, i1_over_sqrt};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Closed-form population difference for a constant pumping rate:
/// W(t̃) = (W(0) + 1) e^{−γ̃_L t̃} − 1.
pub fn population_difference(coeffs: &StageCoefficients, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    Ok((coeffs.initial_population + 1.0) * (-coeffs.pumping * t).exp() - 1.0)
}

/// The same quantity from its integral representation
/// W(t) = W(0)e^{−Γ_L(t)} − ∫₀^t γ_L e^{−[Γ_L(t)−Γ_L(t″)]} dt″,
/// evaluated with composite Simpson quadrature. Valid for any pumping
/// history `pumping(t)`; `Γ_L` is integrated alongside.
pub fn population_difference_quadrature(
    initial_population: f64,
    pumping: impl Fn(f64) -> f64,
    t: f64,
) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(initial_population);
    }
    const PANELS: usize = 2048;
    let h = t / PANELS as f64;
    // Γ_L on the Simpson nodes by cumulative Simpson over half panels.
    let nodes = 2 * PANELS + 1;
    let hh = 0.5 * h;
    let rate: Vec<f64> = (0..nodes).map(|i| pumping(i as f64 * hh)).collect();
    let mut big_gamma = vec![0.0; nodes];
    for i in 1..nodes {
        // trapezoid on the half-step with a Simpson correction using the
        // neighbouring midpoint where available
        let mid = pumping((i as f64 - 0.5) * hh);
        big_gamma[i] = big_gamma[i - 1] + hh / 6.0 * (rate[i - 1] + 4.0 * mid + rate[i]);
    }
    let total = big_gamma[nodes - 1];
    let mut integral = 0.0;
    for p in 0..PANELS {
        let f = |i: usize| rate[i] * (-(total - big_gamma[i])).exp();
        let (a, m, b) = (2 * p, 2 * p + 1, 2 * p + 2);
        integral += h / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    }
    Ok(initial_population * (-total).exp() - integral)
}

/// Precomputed per-stage tables on the time nodes.
#[derive(Debug, Clone)]
pub struct KernelContext {
    pub coeffs: StageCoefficients,
    pub grid: Grid,
    /// W(t̃_k).
    pub w_table: Vec<f64>,
    /// q̃(t̃_k), cumulative trapezoid of |g|²W.
    pub q_table: Vec<f64>,
    /// Γ(t̃_k) = Γ̃ t̃_k.
    pub gamma_table: Vec<Complex64>,
    /// Γ_L(t̃_k) = γ̃_L t̃_k.
    pub gamma_l_table: Vec<f64>,
}

impl KernelContext {
    pub fn new(coeffs: StageCoefficients, grid: Grid) -> Result<Self> {
        coeffs.validate()?;
        let times = grid.times();
        let w_table = times
            .iter()
            .map(|&t| population_difference(&coeffs, t))
            .collect::<Result<Vec<_>>>()?;
        let gain = coeffs.gain();
        let dt = grid.dt();
        let mut q_table = vec![0.0; times.len()];
        for k in 1..times.len() {
            q_table[k] = q_table[k - 1] + 0.5 * dt * gain * (w_table[k - 1] + w_table[k]);
        }
        let gamma_table = times.iter().map(|&t| coeffs.decay * t).collect();
        let gamma_l_table = times.iter().map(|&t| coeffs.pumping * t).collect();
        let ctx = Self {
            coeffs,
            grid,
            w_table,
            q_table,
            gamma_table,
            gamma_l_table,
        };
        if ctx.w_table.iter().any(|w| w.is_nan() || w.abs() > 1.0) {
            return Err(Error::NonFinite("population difference table"));
        }
        Ok(ctx)
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * self.grid.t_max;
        if t.is_finite() && t >= -slack && t <= self.grid.t_max + slack {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                t,
                t_max: self.grid.t_max,
            })
        }
    }

    /// W at an arbitrary time in range.
    pub fn w_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        population_difference(&self.coeffs, t.max(0.0))
    }

    /// Γ(t̃) = ∫₀^t̃ Γ̃ dt̃ for the step-on pump.
    pub fn gamma_at(&self, t: f64) -> Complex64 {
        self.coeffs.decay * t
    }

    /// e^{−[Γ(t′) − Γ(t″)]}.
    pub fn decay_factor(&self, t_out: f64, t_in: f64) -> Complex64 {
        (-(self.coeffs.decay * (t_out - t_in))).exp()
    }
}

/// q̃(t̃) by the composite trapezoid rule on the context's grid, with a
/// partial trapezoid on the last sub-interval for off-node times.
pub fn q_of_t(ctx: &KernelContext, t: f64) -> Result<f64> {
    ctx.check_time(t)?;
    let t = t.clamp(0.0, ctx.grid.t_max);
    let dt = ctx.grid.dt();
    let k = ((t / dt).floor() as usize).min(ctx.grid.n_t);
    let tk = ctx.grid.time(k);
    let rest = t - tk;
    if rest <= 0.0 {
        return Ok(ctx.q_table[k]);
    }
    let gain = ctx.coeffs.gain();
    let w_end = population_difference(&ctx.coeffs, t)?;
    Ok(ctx.q_table[k] + 0.5 * rest * gain * (ctx.w_table[k] + w_end))
}

/// Output/input point in (ζ, t̃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub z: f64,
    pub t: f64,
}

impl Point {
    pub fn new(z: f64, t: f64) -> Self {
        Self { z, t }
    }
}

fn check_z(z: f64) -> Result<()> {
    if z.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&z) {
        Ok(())
    } else {
        Err(Error::Domain(format!("position ζ = {z} outside [0, 1]")))
    }
}

/// Kernel radicand pieces (Δq̃, Δζ) after the causality checks.
fn radicand(ctx: &KernelContext, z_out: f64, z_in: f64, t_out: f64, t_in: f64) -> Result<(f64, f64)> {
    check_z(z_out)?;
    check_z(z_in)?;
    if z_out < z_in {
        return Err(Error::Acausal(format!("z′ = {z_out} < z″ = {z_in}")));
    }
    if t_out < t_in {
        return Err(Error::Acausal(format!("t′ = {t_out} < t″ = {t_in}")));
    }
    let dq = q_of_t(ctx, t_out)? - q_of_t(ctx, t_in)?;
    let dz = z_out - z_in;
    if dq < 0.0 {
        return Err(Error::NegativeRadicand { radicand: dq * dz });
    }
    Ok((dq, dz))
}

/// H = I₀(2√(Δq̃ Δζ)).
pub fn h_value(dq: f64, dz: f64) -> Result<f64> {
    i0_of_sqrt(dq * dz)
}

/// G_S = √(Δq̃/Δζ) I₁(2√(Δq̃ Δζ)) = Δq̃ · I₁(2√x)/√x with x = Δq̃Δζ.
/// Tends to Δq̃ as Δζ → 0 and vanishes with Δq̃.
pub fn gs_value(dq: f64, dz: f64) -> Result<f64> {
    Ok(dq * i1_over_sqrt(dq * dz)?)
}

/// G_e = (Δζ/Δq̃) G_S = Δζ · I₁(2√x)/√x. Tends to Δζ as Δq̃ → 0.
pub fn ge_value(dq: f64, dz: f64) -> Result<f64> {
    Ok(dz * i1_over_sqrt(dq * dz)?)
}

pub fn kernel_h(ctx: &KernelContext, z_out: f64, z_in: f64, t_out: f64, t_in: f64) -> Result<f64> {
    let (dq, dz) = radicand(ctx, z_out, z_in, t_out, t_in)?;
    h_value(dq, dz)
}

pub fn kernel_gs(ctx: &KernelContext, z_out: f64, z_in: f64, t_out: f64, t_in: f64) -> Result<f64> {
    let (dq, dz) = radicand(ctx, z_out, z_in, t_out, t_in)?;
    gs_value(dq, dz)
}

pub fn kernel_ge(ctx: &KernelContext, z_out: f64, z_in: f64, t_out: f64, t_in: f64) -> Result<f64> {
    let (dq, dz) = radicand(ctx, z_out, z_in, t_out, t_in)?;
    ge_value(dq, dz)
}

/// The six input→output maps of the integral solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffKernel {
    /// U_S: boundary field e(0, t″) → field e(ζ, t′).
    SeedToField,
    /// V_S: initial spin s†(ζ″, 0) → field.
    SpinToField,
    /// U_a: initial spin → spin s†(ζ, t′).
    SpinToSpin,
    /// V_a: boundary field → spin.
    SeedToSpin,
    /// F_S: Langevin source f†(ζ″, t″) → field.
    NoiseToField,
    /// F_a: Langevin source → spin.
    NoiseToSpin,
}

impl CoeffKernel {
    pub const ALL: [CoeffKernel; 6] = [
        CoeffKernel::SeedToField,
        CoeffKernel::SpinToField,
        CoeffKernel::SpinToSpin,
        CoeffKernel::SeedToSpin,
        CoeffKernel::NoiseToField,
        CoeffKernel::NoiseToSpin,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CoeffKernel::SeedToField => "U_S",
            CoeffKernel::SpinToField => "V_S",
            CoeffKernel::SpinToSpin => "U_a",
            CoeffKernel::SeedToSpin => "V_a",
            CoeffKernel::NoiseToField => "F_S",
            CoeffKernel::NoiseToSpin => "F_a",
        }
    }
}

impl fmt::Display for CoeffKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for CoeffKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoeffKernel::ALL
            .into_iter()
            .find(|k| k.symbol().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown kernel tag `{s}`")))
    }
}

/// A kernel value split into its smooth integrand weight and the coefficient
/// of the endpoint δ-term. The δ-terms of U_S (in time) and of U_a, F_a (in
/// space) sit on the boundary of their integration range and act as a direct
/// pass-through of the input; `pass_through` is nonzero only when the input
/// point coincides with the output point along that coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelWeight {
    pub weight: Complex64,
    pub pass_through: Complex64,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

pub fn coeff_kernel(ctx: &KernelContext, which: CoeffKernel, output: Point, input: Point) -> Result<KernelWeight> {
    let g = ctx.coeffs.coupling;
    let zero = Complex64::new(0.0, 0.0);
    let needs_boundary_field = matches!(which, CoeffKernel::SeedToField | CoeffKernel::SeedToSpin);
    let needs_initial_spin = matches!(which, CoeffKernel::SpinToField | CoeffKernel::SpinToSpin);
    if needs_boundary_field && !same(input.z, 0.0) {
        return Err(Error::Domain(format!("{which} takes its input on ζ = 0, got ζ″ = {}", input.z)));
    }
    if needs_initial_spin && !same(input.t, 0.0) {
        return Err(Error::Domain(format!("{which} takes its input at t̃ = 0, got t″ = {}", input.t)));
    }
    let (dq, dz) = radicand(ctx, output.z, input.z, output.t, input.t)?;
    let decay = ctx.decay_factor(output.t, input.t);
    Ok(match which {
        CoeffKernel::SeedToField => {
            let w_in = ctx.w_at(input.t)?;
            KernelWeight {
                weight: g.norm_sqr() * w_in * decay * ge_value(dq, dz)?,
                pass_through: if same(input.t, output.t) { Complex64::new(1.0, 0.0) } else { zero },
            }
        }
        CoeffKernel::SpinToField => KernelWeight {
            weight: I * g * decay * h_value(dq, dz)?,
            pass_through: zero,
        },
        CoeffKernel::SpinToSpin => KernelWeight {
            weight: decay * gs_value(dq, dz)?,
            pass_through: if same(input.z, output.z) { decay } else { zero },
        },
        CoeffKernel::SeedToSpin => {
            let w_in = ctx.w_at(input.t)?;
            KernelWeight {
                weight: -I * g.conj() * w_in * decay * h_value(dq, dz)?,
                pass_through: zero,
            }
        }
        CoeffKernel::NoiseToField => KernelWeight {
            weight: I * g * decay * h_value(dq, dz)?,
            pass_through: zero,
        },
        CoeffKernel::NoiseToSpin => KernelWeight {
            weight: decay * gs_value(dq, dz)?,
            pass_through: if same(input.z, output.z) { decay } else { zero },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{PhysicalParams, TwoStageCoefficients};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn ctx_with(coeffs: StageCoefficients, n: usize, t_max: f64) -> KernelContext {
        KernelContext::new(coeffs, Grid::new(n, n, t_max).unwrap()).unwrap()
    }

    fn default_stage() -> StageCoefficients {
        TwoStageCoefficients::from_params(&PhysicalParams::default()).unwrap().cers
    }

    /// RK4 on dW/dt = −γ_L (W + 1), an oracle independent of the closed form.
    fn rk4_w(w0: f64, gamma_l: f64, t: f64, steps: usize) -> f64 {
        let f = |w: f64| -gamma_l * (w + 1.0);
        let h = t / steps as f64;
        let mut w = w0;
        for _ in 0..steps {
            let k1 = f(w);
            let k2 = f(w + 0.5 * h * k1);
            let k3 = f(w + 0.5 * h * k2);
            let k4 = f(w + h * k3);
            w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        w
    }

    #[test]
    fn population_difference_values() {
        let mut c = StageCoefficients::ideal();
        c.initial_population = 0.99;
        assert_eq!(population_difference(&c, 0.0).unwrap(), 0.99);
        assert_eq!(population_difference(&c, 7.0).unwrap(), 0.99);
        c.pumping = 0.5;
        let w = population_difference(&c, 2.0).unwrap();
        assert!((w - (-0.267_919_912_068_829_8)).abs() < 1e-14);
        assert!((w - rk4_w(0.99, 0.5, 2.0, 4000)).abs() < 1e-12);
        let quad = population_difference_quadrature(0.99, |_| 0.5, 2.0).unwrap();
        assert!((quad - w).abs() < 1e-10);
    }

    #[test]
    fn q_matches_closed_form() {
        let c = default_stage();
        let ctx = ctx_with(c, 64, 2.0);
        assert_eq!(q_of_t(&ctx, 0.0).unwrap(), 0.0);
        let g = c.gain();
        let gl = c.pumping;
        let exact = |t: f64| g * ((c.initial_population + 1.0) * (1.0 - (-gl * t).exp()) / gl - t);
        for t in [0.5, 1.0, 1.37, 2.0] {
            assert!(rel(q_of_t(&ctx, t).unwrap(), exact(t)) < 1e-9, "t={t}");
        }
        let ideal = ctx_with(StageCoefficients::ideal(), 16, 3.0);
        for t in [0.0, 0.1, 1.5, 3.0] {
            assert!((q_of_t(&ideal, t).unwrap() - t).abs() < 1e-14);
        }
        assert!(q_of_t(&ideal, 3.5).is_err());
    }

    #[test]
    fn kernel_limits() {
        let ctx = ctx_with(StageCoefficients::ideal(), 8, 2.0);
        assert_eq!(kernel_h(&ctx, 0.7, 0.2, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(kernel_h(&ctx, 0.4, 0.4, 1.5, 0.0).unwrap(), 1.0);
        // Δq = 1, Δζ = 1
        assert!(rel(kernel_h(&ctx, 1.0, 0.0, 1.0, 0.0).unwrap(), 2.279_585_302_336_067_3) < 1e-14);
        assert!(rel(kernel_gs(&ctx, 1.0, 0.0, 1.0, 0.0).unwrap(), 1.590_636_854_637_329_1) < 1e-14);
        assert_eq!(kernel_gs(&ctx, 0.9, 0.1, 1.2, 1.2).unwrap(), 0.0);
        // Δζ → 0: G_S → Δq
        assert!(rel(kernel_gs(&ctx, 0.5, 0.5, 0.5, 0.0).unwrap(), 0.5) < 1e-15);
        // Δq → 0: G_e → Δζ
        assert!(rel(kernel_ge(&ctx, 0.8, 0.3, 1.0, 1.0).unwrap(), 0.5) < 1e-15);
        assert!(matches!(kernel_h(&ctx, 0.2, 0.3, 1.0, 0.0), Err(Error::Acausal(_))));
        assert!(matches!(kernel_h(&ctx, 0.3, 0.2, 0.5, 1.0), Err(Error::Acausal(_))));
    }

    #[test]
    fn negative_radicand_is_rejected() {
        // strong pumping drives W below zero, so q decreases
        let c = StageCoefficients {
            pumping: 5.0,
            initial_population: 0.5,
            ..StageCoefficients::ideal()
        };
        let ctx = ctx_with(c, 32, 2.0);
        assert!(matches!(kernel_h(&ctx, 1.0, 0.0, 2.0, 1.0), Err(Error::NegativeRadicand { .. })));
    }

    #[test]
    fn coeff_kernels_at_zero_coupling() {
        let c = StageCoefficients {
            coupling: Complex64::new(0.0, 0.0),
            ..StageCoefficients::ideal()
        };
        let ctx = ctx_with(c, 8, 1.0);
        let out = Point::new(1.0, 0.75);
        for t_in in [0.0, 0.25, 0.75] {
            let k = coeff_kernel(&ctx, CoeffKernel::SeedToField, out, Point::new(0.0, t_in)).unwrap();
            assert_eq!(k.weight, Complex64::new(0.0, 0.0));
            let expected = if t_in == 0.75 { 1.0 } else { 0.0 };
            assert_eq!(k.pass_through, Complex64::new(expected, 0.0));
        }
    }

    #[test]
    fn spin_to_field_at_switch_on() {
        let c = StageCoefficients {
            coupling: Complex64::from_polar(0.8, 0.3),
            ..StageCoefficients::ideal()
        };
        let ctx = ctx_with(c, 8, 1.0);
        for z in [0.0, 0.3, 0.9] {
            let k = coeff_kernel(&ctx, CoeffKernel::SpinToField, Point::new(1.0, 0.0), Point::new(z, 0.0)).unwrap();
            assert!((k.weight - I * c.coupling).norm() < 1e-15);
        }
    }

    #[test]
    fn spin_to_spin_closed_form() {
        let c = default_stage();
        let ctx = ctx_with(c, 64, 2.0);
        // pick t′ on a node with q̃ close to 1
        let k = ctx.q_table.iter().position(|&q| q >= 1.0).unwrap();
        let t = ctx.grid.time(k);
        let q = ctx.q_table[k];
        let kw = coeff_kernel(&ctx, CoeffKernel::SpinToSpin, Point::new(1.0, t), Point::new(0.0, 0.0)).unwrap();
        let expected = (-(c.decay * t)).exp() * q.sqrt() * crate::specfun::bessel_i1(2.0 * q.sqrt()).unwrap();
        assert!((kw.weight - expected).norm() < 1e-13 * expected.norm());
        assert_eq!(kw.pass_through, Complex64::new(0.0, 0.0));
        let diag = coeff_kernel(&ctx, CoeffKernel::SpinToSpin, Point::new(0.4, t), Point::new(0.4, 0.0)).unwrap();
        assert!((diag.pass_through - (-(c.decay * t)).exp()).norm() < 1e-15);
    }

    #[test]
    fn kernel_tag_parsing() {
        assert_eq!("V_S".parse::<CoeffKernel>().unwrap(), CoeffKernel::SpinToField);
        assert_eq!("f_a".parse::<CoeffKernel>().unwrap(), CoeffKernel::NoiseToSpin);
        assert!("X_Y".parse::<CoeffKernel>().is_err());
        let ctx = ctx_with(StageCoefficients::ideal(), 8, 1.0);
        // V_S needs its input at t = 0
        assert!(coeff_kernel(&ctx, CoeffKernel::SpinToField, Point::new(1.0, 0.5), Point::new(0.2, 0.1)).is_err());
        assert!(coeff_kernel(&ctx, CoeffKernel::SeedToField, Point::new(1.0, 0.5), Point::new(0.2, 0.1)).is_err());
    }

    #[test]
    fn degenerate_spin_to_field_magnitude() {
        let c = StageCoefficients {
            coupling: Complex64::from_polar(1.3, -0.4),
            initial_population: 0.9,
            ..StageCoefficients::ideal()
        };
        let ctx = ctx_with(c, 16, 2.0);
        for (z, t) in [(0.0, 0.5), (0.25, 1.0), (0.5, 2.0)] {
            let k = coeff_kernel(&ctx, CoeffKernel::SpinToField, Point::new(1.0, t), Point::new(z, 0.0)).unwrap();
            let x = c.gain() * 0.9 * t * (1.0 - z);
            let expected = c.coupling.norm() * i0_of_sqrt(x).unwrap();
            assert!(rel(k.weight.norm(), expected) < 1e-13);
        }
    }

    #[test]
    fn gain_is_monotone_in_time() {
        let ctx = ctx_with(default_stage(), 32, 2.0);
        for (z_out, z_in) in [(1.0, 0.0), (0.6, 0.1), (0.3, 0.29)] {
            let mut prev = [0.0f64; 3];
            for k in 0..=32 {
                let t = ctx.grid.time(k);
                let cur = [
                    kernel_h(&ctx, z_out, z_in, t, 0.0).unwrap(),
                    kernel_gs(&ctx, z_out, z_in, t, 0.0).unwrap(),
                    kernel_ge(&ctx, z_out, z_in, t, 0.0).unwrap(),
                ];
                for i in 0..3 {
                    assert!(cur[i] >= prev[i]);
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn q_quadrature_converges_at_second_order() {
        // strong pumping makes the trapezoid error visible
        let c = StageCoefficients {
            pumping: 0.4,
            initial_population: 0.99,
            ..StageCoefficients::ideal()
        };
        let exact = (0.99 + 1.0) * (1.0 - (-0.4f64 * 2.0).exp()) / 0.4 - 2.0;
        let err = |n| (q_of_t(&ctx_with(c, n, 2.0), 2.0).unwrap() - exact).abs();
        let (e1, e2, e3) = (err(8), err(16), err(32));
        assert!(e1 / e2 >= 3.5 && e2 / e3 >= 3.5, "{e1} {e2} {e3}");
    }

    #[test]
    fn context_tables() {
        let ctx = ctx_with(default_stage(), 16, 2.0);
        assert_eq!(ctx.q_table[0], 0.0);
        assert_eq!(ctx.gamma_table[0], Complex64::new(0.0, 0.0));
        assert_eq!(ctx.gamma_l_table[0], 0.0);
        assert!(ctx.w_table.iter().all(|w| w.abs() <= 1.0));
        assert!(ctx.q_table.windows(2).all(|p| p[1] >= p[0]));
    }
}
