//! Least-squares fit of an interference fringe `C + D cos(Δφ + φ₀)`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Below this D/C a fringe is reported flat.
pub const FLAT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeSummary {
    /// φ₀ in (−π, π]; the fitted maximum sits at Δφ = −φ₀.
    pub offset: f64,
    pub mean: f64,
    pub amplitude: f64,
    /// D/C, or 0 for a flat fringe.
    pub visibility: f64,
    /// Largest |sample − fit| relative to |C|.
    pub residual: f64,
    pub flat: bool,
    pub max_intensity: f64,
    pub max_phase: f64,
    pub min_intensity: f64,
    pub min_phase: f64,
}

impl FringeSummary {
    /// (I_max − I_min)/(I_max + I_min) over the samples.
    pub fn sample_visibility(&self) -> f64 {
        let s = self.max_intensity + self.min_intensity;
        if s == 0.0 {
            0.0
        } else {
            (self.max_intensity - self.min_intensity) / s
        }
    }

    pub fn value_at(&self, phi: f64) -> f64 {
        self.mean + self.amplitude * (phi + self.offset).cos()
    }
}

fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Fit `(Δφ, I)` samples. Needs at least 8 samples spanning a full period
/// (the span plus one mean spacing must reach 2π).
pub fn fit_fringe(samples: &[(f64, f64)]) -> Result<FringeSummary> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::Domain(format!("fringe fit needs at least 8 samples, got {n}")));
    }
    if samples.iter().any(|(p, i)| !(p.is_finite() && i.is_finite())) {
        return Err(Error::NonFinite("fringe samples"));
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span + span / ((n - 1) as f64) < TAU * (1.0 - 1e-9) {
        return Err(Error::Domain(format!("fringe samples span {span} rad, less than one period")));
    }

    // normal equations for I ≈ C + a cos φ + b sin φ
    let mut m = [[0.0; 4]; 3];
    for &(phi, y) in samples {
        let basis = [1.0, phi.cos(), phi.sin()];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * y;
        }
    }
    let [c, a, b] = solve3(m).ok_or_else(|| Error::Domain("singular fringe fit".into()))?;
    let d = a.hypot(b);
    let offset = (-b).atan2(a);
    let scale = c.abs().max(f64::MIN_POSITIVE);
    let residual = samples
        .iter()
        .map(|&(phi, y)| (y - (c + d * (phi + offset).cos())).abs())
        .fold(0.0, f64::max)
        / scale;
    let flat = c == 0.0 || d / c.abs() < FLAT_THRESHOLD;
    let (mut max_i, mut max_p, mut min_i, mut min_p) = (f64::NEG_INFINITY, 0.0, f64::INFINITY, 0.0);
    for &(phi, y) in samples {
        if y > max_i {
            max_i = y;
            max_p = phi;
        }
        if y < min_i {
            min_i = y;
            min_p = phi;
        }
    }
    Ok(FringeSummary {
        offset,
        mean: c,
        amplitude: if flat { 0.0 } else { d },
        visibility: if flat { 0.0 } else { d / c },
        residual,
        flat,
        max_intensity: max_i,
        max_phase: max_p,
        min_intensity: min_i,
        min_phase: min_p,
    })
}

/// `k` equally spaced phases on [0, 2π).
pub fn phase_grid(k: usize) -> Vec<f64> {
    (0..k).map(|j| j as f64 * TAU / k as f64).collect()
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_cosine() {
        let s: Vec<_> = phase_grid(16).into_iter().map(|p| (p, 3.0 + 2.0 * (p + 0.7).cos())).collect();
        let f = fit_fringe(&s).unwrap();
        assert!((f.mean - 3.0).abs() < 1e-12);
        assert!((f.amplitude - 2.0).abs() < 1e-12);
        assert!((f.offset - 0.7).abs() < 1e-12);
        assert!((f.visibility - 2.0 / 3.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!(!f.flat);
    }

    #[test]
    fn constant_is_flat() {
        let s: Vec<_> = phase_grid(8).into_iter().map(|p| (p, 5.0)).collect();
        let f = fit_fringe(&s).unwrap();
        assert!(f.flat);
        assert_eq!(f.visibility, 0.0);
    }

    #[test]
    fn visibility_matches_extremes() {
        let s: Vec<_> = phase_grid(360).into_iter().map(|p| (p, 1.0 + 0.4 * (p - 2.0).cos())).collect();
        let f = fit_fringe(&s).unwrap();
        assert!((f.sample_visibility() - f.visibility).abs() < 1e-4);
        assert!(angle_distance(f.max_phase, -f.offset) <= TAU / 360.0);
    }

    #[test]
    fn rejects_short_or_narrow_input() {
        let s: Vec<_> = phase_grid(7).into_iter().map(|p| (p, p.cos())).collect();
        assert!(fit_fringe(&s).is_err());
        let narrow: Vec<_> = (0..10).map(|j| (j as f64 * 0.1, 1.0)).collect();
        assert!(fit_fringe(&narrow).is_err());
    }
}
