//! Modified Bessel functions of the first kind, orders 0 and 1, for real
//! nonnegative arguments.
//!
//! Below [`ASYMPTOTIC_CROSSOVER`] the ascending power series is summed
//! directly; every term is positive, so the sum keeps full relative precision.
//! Above it the Hankel large-argument expansion is summed up to its smallest
//! term, whose size is roughly e^{-2x} and negligible at the crossover.

use crate::error::{Error, Result};

/// Argument at which evaluation switches from the power series to the
/// large-argument expansion.
pub const ASYMPTOTIC_CROSSOVER: f64 = 30.0;

/// Below this `x`, [`i1_over_sqrt`] uses its short Taylor polynomial.
pub const I1_OVER_SQRT_SWITCH: f64 = 1.0e-8;

const MAX_TERMS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselMethod {
    Series,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub value: f64,
    pub method: BesselMethod,
}

fn check_arg(x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "modified Bessel argument must be finite and >= 0, got {x}"
        )))
    }
}

/// Σ_k (x²/4)^k / (k! (k+ν)!) for ν ∈ {0, 1}.
fn series_core(x: f64, order: u32) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= y / (kf * (kf + order as f64));
        sum += term;
        if term < f64::EPSILON * 0.01 * sum {
            break;
        }
    }
    sum
}

/// √(2πx) e^{-x} I_ν(x) from the Hankel expansion, ν ∈ {0, 1}.
fn asymptotic_core(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0f64;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < f64::EPSILON * 0.01 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn bessel_i0_eval(x: f64) -> Result<BesselEval> {
    check_arg(x)?;
    Ok(if x < ASYMPTOTIC_CROSSOVER {
        BesselEval {
            value: series_core(x, 0),
            method: BesselMethod::Series,
        }
    } else {
        BesselEval {
            value: x.exp() / (2.0 * std::f64::consts::PI * x).sqrt() * asymptotic_core(x, 0),
            method: BesselMethod::Asymptotic,
        }
    })
}

pub fn bessel_i1_eval(x: f64) -> Result<BesselEval> {
    check_arg(x)?;
    Ok(if x < ASYMPTOTIC_CROSSOVER {
        BesselEval {
            value: 0.5 * x * series_core(x, 1),
            method: BesselMethod::Series,
        }
    } else {
        BesselEval {
            value: x.exp() / (2.0 * std::f64::consts::PI * x).sqrt() * asymptotic_core(x, 1),
            method: BesselMethod::Asymptotic,
        }
    })
}

/// I₀(x).
pub fn bessel_i0(x: f64) -> Result<f64> {
    bessel_i0_eval(x).map(|e| e.value)
}

/// I₁(x).
pub fn bessel_i1(x: f64) -> Result<f64> {
    bessel_i1_eval(x).map(|e| e.value)
}

/// e^{-x} I₀(x); finite for every finite x ≥ 0.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(if x < ASYMPTOTIC_CROSSOVER {
        series_core(x, 0) * (-x).exp()
    } else {
        asymptotic_core(x, 0) / (2.0 * std::f64::consts::PI * x).sqrt()
    })
}

/// e^{-x} I₁(x); finite for every finite x ≥ 0.
pub fn bessel_i1_scaled(x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(if x < ASYMPTOTIC_CROSSOVER {
        0.5 * x * series_core(x, 1) * (-x).exp()
    } else {
        asymptotic_core(x, 1) / (2.0 * std::f64::consts::PI * x).sqrt()
    })
}

/// I₀(2√x), the propagation kernel as a function of its radicand.
pub fn i0_of_sqrt(x: f64) -> Result<f64> {
    check_arg(x)?;
    bessel_i0(2.0 * x.sqrt())
}

/// I₁(2√x)/√x, with the removable singularity at x = 0 filled in (value 1).
pub fn i1_over_sqrt(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x <= I1_OVER_SQRT_SWITCH {
        Ok(1.0 + x * (0.5 + x / 12.0))
    } else {
        let r = x.sqrt();
        Ok(bessel_i1(2.0 * r)? / r)
    }
}
