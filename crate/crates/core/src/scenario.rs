//! Configuration files, scenario runs and CSV output.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{cers_curve, cers_terms, seeded_state, srs_curve, srs_intensity, PhaseOffset, TwoStageSetup};
use crate::error::{Error, Result};
use crate::fringe::{fit_fringe, phase_grid, FringeSummary};
use crate::green::{build_green_table, green_srs_curve, run_two_stage_green_with};
use crate::kernels::KernelContext;
use crate::params::{Grid, PhysicalParams};

pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_SWEEP_POINTS: usize = 64;
pub const MIN_SWEEP_POINTS: usize = 8;
/// `validate` tolerance on the second-stage total intensity.
pub const VALIDATE_TOLERANCE: f64 = 0.03;
/// `validate` tolerance on the first-stage spontaneous intensity.
pub const VALIDATE_SRS_TOLERANCE: f64 = 0.02;
/// `validate` compares times from here on.
pub const VALIDATE_T_MIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Srs,
    Cers,
    SweepPhase,
    SweepSeed,
    Validate,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Srs,
        ScenarioKind::Cers,
        ScenarioKind::SweepPhase,
        ScenarioKind::SweepSeed,
        ScenarioKind::Validate,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ScenarioKind::Srs => "srs",
            ScenarioKind::Cers => "cers",
            ScenarioKind::SweepPhase => "sweep-phase",
            ScenarioKind::SweepSeed => "sweep-seed",
            ScenarioKind::Validate => "validate",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| {
                let tags: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.tag()).collect();
                format!("unknown scenario `{s}` (expected one of {})", tags.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: PhysicalParams,
    pub n_z: usize,
    pub n_t: usize,
    pub scenario: ScenarioKind,
    pub sweep_points: usize,
    pub out: Option<PathBuf>,
    /// Keys that were filled from defaults.
    pub defaulted: Vec<&'static str>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::default(),
            n_z: DEFAULT_GRID,
            n_t: DEFAULT_GRID,
            scenario: ScenarioKind::Cers,
            sweep_points: DEFAULT_SWEEP_POINTS,
            out: None,
            defaulted: KEYS.to_vec(),
        }
    }
}

pub const KEYS: [&str; 20] = [
    "delta",
    "rabi_p1",
    "rabi_p2",
    "coupling_density",
    "gamma",
    "gamma_s0",
    "w0",
    "cell_length",
    "light_speed",
    "t_tilde_max",
    "pulse_duration",
    "delay_time",
    "apply_delay_decay",
    "phase_pump",
    "phase_stokes",
    "n_z",
    "n_t",
    "scenario",
    "sweep_points",
    "out",
];

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| config_err(line, format!("`{key}` expects a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(config_err(line, format!("`{key}` must be finite")));
    }
    Ok(x)
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| config_err(line, format!("`{key}` expects a nonnegative integer, got `{v}`")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(config_err(line, format!("`{key}` expects true or false, got `{v}`"))),
    }
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut seen: Vec<&'static str> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{body}`")))?;
        let (k, v) = (k.trim(), v.trim());
        let key = *KEYS
            .iter()
            .find(|known| **known == k)
            .ok_or_else(|| config_err(line, format!("unknown key `{k}`")))?;
        if seen.contains(&key) {
            return Err(config_err(line, format!("duplicate key `{key}`")));
        }
        seen.push(key);
        let p = &mut cfg.params;
        match key {
            "delta" => p.detuning = parse_f64(line, key, v)?,
            "rabi_p1" => p.rabi_p1 = parse_f64(line, key, v)?,
            "rabi_p2" => p.rabi_p2 = parse_f64(line, key, v)?,
            "coupling_density" => p.coupling_density = parse_f64(line, key, v)?,
            "gamma" => p.excited_decay = parse_f64(line, key, v)?,
            "gamma_s0" => p.coherence_decay = parse_f64(line, key, v)?,
            "w0" => p.initial_population_diff = parse_f64(line, key, v)?,
            "cell_length" => p.cell_length = parse_f64(line, key, v)?,
            "light_speed" => p.light_speed = parse_f64(line, key, v)?,
            "t_tilde_max" => p.pulse_duration_dimensionless = parse_f64(line, key, v)?,
            "pulse_duration" => p.stage1_duration_dimensionless = Some(parse_f64(line, key, v)?),
            "delay_time" => p.delay_time = parse_f64(line, key, v)?,
            "apply_delay_decay" => p.apply_delay_decay = parse_bool(line, key, v)?,
            "phase_pump" => p.phase_pump = parse_f64(line, key, v)?,
            "phase_stokes" => p.phase_stokes = parse_f64(line, key, v)?,
            "n_z" => cfg.n_z = parse_usize(line, key, v)?,
            "n_t" => cfg.n_t = parse_usize(line, key, v)?,
            "scenario" => cfg.scenario = v.parse().map_err(|e: String| config_err(line, e))?,
            "sweep_points" => cfg.sweep_points = parse_usize(line, key, v)?,
            "out" => cfg.out = Some(PathBuf::from(v)),
            _ => unreachable!("key list and match arms out of sync"),
        }
    }
    cfg.defaulted = KEYS.iter().copied().filter(|k| !seen.contains(k)).collect();
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid()?;
        if self.sweep_points < MIN_SWEEP_POINTS {
            return Err(Error::param(
                "sweep_points",
                format!("need at least {MIN_SWEEP_POINTS} for a fringe fit, got {}", self.sweep_points),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_z, self.n_t, self.params.pulse_duration_dimensionless)
    }

    /// Effective values of every key, in file order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        KEYS.iter()
            .map(|&k| {
                let v = match k {
                    "delta" => p.detuning.to_string(),
                    "rabi_p1" => p.rabi_p1.to_string(),
                    "rabi_p2" => p.rabi_p2.to_string(),
                    "coupling_density" => p.coupling_density.to_string(),
                    "gamma" => p.excited_decay.to_string(),
                    "gamma_s0" => p.coherence_decay.to_string(),
                    "w0" => p.initial_population_diff.to_string(),
                    "cell_length" => p.cell_length.to_string(),
                    "light_speed" => p.light_speed.to_string(),
                    "t_tilde_max" => p.pulse_duration_dimensionless.to_string(),
                    "pulse_duration" => p.stage1_duration().to_string(),
                    "delay_time" => p.delay_time.to_string(),
                    "apply_delay_decay" => p.apply_delay_decay.to_string(),
                    "phase_pump" => p.phase_pump.to_string(),
                    "phase_stokes" => p.phase_stokes.to_string(),
                    "n_z" => self.n_z.to_string(),
                    "n_t" => self.n_t.to_string(),
                    "scenario" => self.scenario.tag().to_string(),
                    "sweep_points" => self.sweep_points.to_string(),
                    "out" => self.out.as_ref().map(|o| o.display().to_string()).unwrap_or_default(),
                    _ => unreachable!(),
                };
                (k, v)
            })
            .collect()
    }
}

/// Recover the effective configuration from the metadata block of an emitted CSV.
pub fn config_from_csv(csv: &str) -> Result<ScenarioConfig> {
    let mut text = String::new();
    for line in csv.lines() {
        if let Some(rest) = line.strip_prefix("#@ ") {
            // an empty `out` means stdout
            if rest.split('#').next().unwrap_or("").trim() == "out =" {
                continue;
            }
            text.push_str(rest);
            text.push('\n');
        }
    }
    parse_config(&text)
}

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub csv: String,
    /// `Some(passed)` for the `validate` scenario.
    pub verdict: Option<bool>,
}

struct CsvBuilder {
    out: String,
}

impl CsvBuilder {
    fn new(cfg: &ScenarioConfig) -> Self {
        let mut out = String::new();
        let _ = writeln!(out, "# cers {} scenario", cfg.scenario.tag());
        for (k, v) in cfg.entries() {
            let flag = if cfg.defaulted.contains(&k) { " # default" } else { "" };
            let _ = writeln!(out, "#@ {k} = {v}{flag}");
        }
        Self { out }
    }

    fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.out, "# {key}: {value}");
    }

    fn header(&mut self, cols: &[&str]) {
        self.out.push_str(&cols.join(","));
        self.out.push('\n');
    }

    fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_num(*v)).collect();
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    fn fringe(&mut self, f: &FringeSummary) {
        self.meta("fringe_mean", fmt_num(f.mean));
        self.meta("fringe_amplitude", fmt_num(f.amplitude));
        self.meta("fringe_offset", fmt_num(f.offset));
        self.meta("fringe_visibility", fmt_num(f.visibility));
        self.meta("fringe_residual", fmt_num(f.residual));
        self.meta("fringe_flat", f.flat);
        self.meta("fringe_max", format!("{} at {}", fmt_num(f.max_intensity), fmt_num(f.max_phase)));
        self.meta("fringe_min", format!("{} at {}", fmt_num(f.min_intensity), fmt_num(f.min_phase)));
    }
}

fn offset_text(p: PhaseOffset) -> String {
    match p {
        PhaseOffset::Offset(v) => fmt_num(v),
        PhaseOffset::NoInterference => "none (no interference)".into(),
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let p = &cfg.params;
    let mut csv = CsvBuilder::new(cfg);
    let mut verdict = None;
    match cfg.scenario {
        ScenarioKind::Srs => {
            let setup = TwoStageSetup::new(p, grid)?;
            let ctx = KernelContext::new(setup.coeffs.srs, grid)?;
            let curve = srs_curve(&ctx)?;
            csv.meta("reference_gain_rate_per_s", fmt_num(setup.coeffs.reference_gain_rate));
            csv.header(&["t_tilde", "i_spon"]);
            for (k, i) in curve.iter().enumerate() {
                csv.row(&[grid.time(k), *i]);
            }
        }
        ScenarioKind::Cers => {
            let setup = TwoStageSetup::new(p, grid)?;
            let seeded = seeded_state(&setup, p)?;
            let terms = cers_curve(&setup.stage2, &seeded)?;
            let last = terms[terms.len() - 1];
            csv.meta("delta_phi", fmt_num(p.delta_phi()));
            csv.meta("phase_offset_at_t_max", offset_text(last.phase_offset()));
            csv.header(&[
                "t_tilde",
                "i_spon",
                "i_seed",
                "i_spin_wave",
                "i_light_atom",
                "i_total",
                "i_uncorrelated_sum",
            ]);
            for t in &terms {
                let b = t.at_phase(p.delta_phi());
                csv.row(&[b.t, b.i_spon, b.i_seed, b.i_spin_wave, b.i_light_atom, b.i_total, b.uncorrelated_sum()]);
            }
        }
        ScenarioKind::SweepPhase => {
            let setup = TwoStageSetup::new(p, grid)?;
            let seeded = seeded_state(&setup, p)?;
            let terms = cers_terms(&setup.stage2, &seeded, grid.t_max)?;
            csv.meta("t_tilde", fmt_num(grid.t_max));
            csv.meta("phase_offset", offset_text(terms.phase_offset()));
            csv.header(&["delta_phi", "i_total", "i_light_atom"]);
            let mut samples = Vec::with_capacity(cfg.sweep_points);
            for phi in phase_grid(cfg.sweep_points) {
                let b = terms.at_phase(phi);
                csv.row(&[phi, b.i_total, b.i_light_atom]);
                samples.push((phi, b.i_total));
            }
            csv.fringe(&fit_fringe(&samples)?);
        }
        ScenarioKind::SweepSeed => {
            let setup = TwoStageSetup::new(p, grid)?;
            let seeded = seeded_state(&setup, p)?;
            let k = cfg.sweep_points;
            let phases = phase_grid(k);
            let rows = (0..k)
                .into_par_iter()
                .map(|j| {
                    let eta = 2.0 * j as f64 / (k - 1) as f64;
                    let t = cers_terms(&setup.stage2, &seeded.attenuated(eta)?, grid.t_max)?;
                    let samples: Vec<_> = phases.iter().map(|&phi| (phi, t.at_phase(phi).i_total)).collect();
                    let f = fit_fringe(&samples)?;
                    Ok([eta, t.i_seed, t.i_spin_wave, f.visibility])
                })
                .collect::<Result<Vec<_>>>()?;
            csv.meta("t_tilde", fmt_num(grid.t_max));
            csv.header(&["attenuation_eta", "i_seed", "i_spin_wave", "visibility"]);
            for r in &rows {
                csv.row(r);
            }
            let best_v = rows.iter().max_by(|a, b| a[3].total_cmp(&b[3])).map(|r| r[0]).unwrap_or(0.0);
            let balance = rows
                .iter()
                .min_by(|a, b| (a[1] - a[2]).abs().total_cmp(&(b[1] - b[2]).abs()))
                .map(|r| r[0])
                .unwrap_or(0.0);
            csv.meta("argmax_visibility_eta", fmt_num(best_v));
            csv.meta("argmin_seed_spin_difference_eta", fmt_num(balance));
        }
        ScenarioKind::Validate => {
            let report = validate(p, grid, cfg.sweep_points)?;
            csv.meta("delta_phi", fmt_num(report.delta_phi));
            csv.meta("srs_max_rel_discrepancy", fmt_num(report.srs_max_rel));
            csv.meta("green_fringe_residual", fmt_num(report.fringe_residual));
            csv.header(&["t_tilde", "i_analytic", "i_green", "rel_discrepancy"]);
            for r in &report.rows {
                csv.row(r);
            }
            let passed = report.passed();
            csv.meta(
                "verdict",
                format!(
                    "{} (max rel discrepancy {} vs tolerance {}; srs {} vs {})",
                    if passed { "PASS" } else { "FAIL" },
                    fmt_num(report.max_rel),
                    VALIDATE_TOLERANCE,
                    fmt_num(report.srs_max_rel),
                    VALIDATE_SRS_TOLERANCE
                ),
            );
            verdict = Some(passed);
        }
    }
    Ok(ScenarioOutput { csv: csv.out, verdict })
}

/// Analytic vs direct-solver comparison.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Phase at which the second-stage totals are compared (the constructive
    /// phase −φ₀ at the last node).
    pub delta_phi: f64,
    /// `[t, analytic, green, rel]` from `VALIDATE_T_MIN` on.
    pub rows: Vec<[f64; 4]>,
    pub max_rel: f64,
    pub srs_max_rel: f64,
    pub fringe_residual: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.max_rel <= VALIDATE_TOLERANCE && self.srs_max_rel <= VALIDATE_SRS_TOLERANCE
    }
}

pub fn validate(params: &PhysicalParams, grid: Grid, fringe_points: usize) -> Result<ValidationReport> {
    let setup = TwoStageSetup::new(params, grid)?;
    let seeded = seeded_state(&setup, params)?;
    let analytic = cers_curve(&setup.stage2, &seeded)?;
    let green = run_two_stage_green_with(&setup, params, fringe_points)?;
    let delta_phi = analytic[analytic.len() - 1].phase_offset().value().map(|p| -p).unwrap_or(0.0);
    let mut rows = Vec::new();
    let mut max_rel = 0.0f64;
    for (a, g) in analytic.iter().zip(&green.terms) {
        if a.t < VALIDATE_T_MIN - 1e-12 {
            continue;
        }
        let ia = a.at_phase(delta_phi).i_total;
        let ig = g.at_phase(delta_phi).i_total;
        let rel = ((ig - ia) / ia).abs();
        max_rel = max_rel.max(rel);
        rows.push([a.t, ia, ig, rel]);
    }
    let table1 = build_green_table(&setup.stage1, false)?;
    let g1 = green_srs_curve(&table1)?;
    let mut srs_max_rel = 0.0f64;
    for (k, g) in g1.iter().enumerate() {
        let t = setup.stage1.grid.time(k);
        if t < VALIDATE_T_MIN - 1e-12 {
            continue;
        }
        let a = srs_intensity(&setup.stage1, t)?;
        srs_max_rel = srs_max_rel.max(((g - a) / a).abs());
    }
    Ok(ValidationReport {
        delta_phi,
        rows,
        max_rel,
        srs_max_rel,
        fringe_residual: green.fringe.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.params, PhysicalParams::default());
        assert_eq!((c.n_z, c.n_t), (DEFAULT_GRID, DEFAULT_GRID));
        assert_eq!(c.defaulted.len(), KEYS.len());
    }

    #[test]
    fn zero_detuning_names_the_key() {
        let e = parse_config("delta = 0\n").unwrap_err();
        assert!(e.to_string().contains("delta"), "{e}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = parse_config("# hi\n\ndetla = 3\n").unwrap_err();
        match e {
            Error::Config { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("detla"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn sweep_config() {
        let c = parse_config("scenario = sweep-phase\nsweep_points = 64  # fringe\n").unwrap();
        assert_eq!(c.scenario, ScenarioKind::SweepPhase);
        assert_eq!(c.sweep_points, 64);
        assert!(parse_config("sweep_points = 4").is_err());
        assert!(parse_config("scenario = bogus").is_err());
        assert!(parse_config("n_z = 8\nn_z = 9").is_err());
        assert!(parse_config("apply_delay_decay = maybe").is_err());
    }

    #[test]
    fn entries_round_trip() {
        let c = parse_config("phase_pump = 0.3\nn_z = 32\nn_t = 40\npulse_duration = 1.5\napply_delay_decay = true\n").unwrap();
        let text: String = c.entries().iter().filter(|(k, _)| *k != "out").map(|(k, v)| format!("{k} = {v}\n")).collect();
        let back = parse_config(&text).unwrap();
        assert_eq!(back.params, PhysicalParams {
            stage1_duration_dimensionless: Some(1.5),
            ..c.params.clone()
        });
        assert_eq!((back.n_z, back.n_t), (32, 40));
    }

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}
