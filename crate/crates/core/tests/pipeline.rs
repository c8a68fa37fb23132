use std::f64::consts::TAU;
use std::sync::OnceLock;

use cers_core::analytic::{cers_terms, seeded_state, CorrelationState, TwoStageSetup};
use cers_core::fringe::{angle_distance, fit_fringe, phase_grid};
use cers_core::params::{Grid, PhysicalParams};
use cers_core::scenario::parse_config;
use proptest::prelude::*;

struct Small {
    setup: TwoStageSetup,
    seeded: CorrelationState,
}

fn small() -> &'static Small {
    static CELL: OnceLock<Small> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = PhysicalParams::default();
        let setup = TwoStageSetup::new(&p, Grid::new(24, 24, 2.0).unwrap()).unwrap();
        let seeded = seeded_state(&setup, &p).unwrap();
        Small { setup, seeded }
    })
}

#[test]
fn seed_and_spin_terms_vanish_without_seed() {
    let s = small();
    let vac = CorrelationState::vacuum(s.seeded.grid);
    let t = cers_terms(&s.setup.stage2, &vac, 2.0).unwrap();
    assert_eq!((t.i_seed, t.i_spin_wave), (0.0, 0.0));
    assert!(t.phase_offset().value().is_none());
    assert!(t.i_spon > 0.0);
}

#[test]
fn delay_decay_reduces_spin_contribution_only() {
    let mut p = PhysicalParams::default();
    let grid = Grid::new(16, 16, 2.0).unwrap();
    let setup = TwoStageSetup::new(&p, grid).unwrap();
    let fresh = cers_terms(&setup.stage2, &seeded_state(&setup, &p).unwrap(), 2.0).unwrap();
    p.apply_delay_decay = true;
    p.delay_time = 5.0e-5;
    let late = cers_terms(&setup.stage2, &seeded_state(&setup, &p).unwrap(), 2.0).unwrap();
    assert_eq!(late.i_seed, fresh.i_seed);
    assert_eq!(late.i_spon, fresh.i_spon);
    let d = (-p.coherence_decay * p.delay_time).exp();
    assert!((late.i_spin_wave / fresh.i_spin_wave - d * d).abs() < 1e-12);
    assert!((late.cross.norm() / fresh.cross.norm() - d).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fringe_fit_recovers_cosines(c in 0.5f64..100.0, v in 0.0f64..0.99, phi0 in -3.1f64..3.1, k in 8usize..80) {
        let d = v * c;
        let samples: Vec<_> = phase_grid(k).into_iter().map(|p| (p, c + d * (p + phi0).cos())).collect();
        let f = fit_fringe(&samples).unwrap();
        prop_assert!((f.mean - c).abs() <= 1e-9 * c);
        prop_assert!((f.amplitude - d).abs() <= 1e-9 * c);
        prop_assert!(f.residual < 1e-9);
        if v > 1e-6 {
            prop_assert!(angle_distance(f.offset, phi0) < 1e-6);
            prop_assert!(angle_distance(f.max_phase, -phi0) <= TAU / k as f64);
        }
    }

    #[test]
    fn attenuation_scales_seed_quadratically(eta in 0.0f64..2.0) {
        let s = small();
        let base = cers_terms(&s.setup.stage2, &s.seeded, 2.0).unwrap();
        let t = cers_terms(&s.setup.stage2, &s.seeded.attenuated(eta).unwrap(), 2.0).unwrap();
        prop_assert!((t.i_seed - eta * eta * base.i_seed).abs() <= 1e-12 * base.i_seed);
        prop_assert!((t.cross - base.cross * eta).norm() <= 1e-12 * base.cross.norm());
        prop_assert_eq!(t.i_spin_wave, base.i_spin_wave);
        prop_assert_eq!(t.i_spon, base.i_spon);
    }

    #[test]
    fn phase_moves_only_the_light_atom_term(dphi in -10.0f64..10.0) {
        let s = small();
        let t = cers_terms(&s.setup.stage2, &s.seeded, 1.5).unwrap();
        let a = t.at_phase(0.0);
        let b = t.at_phase(dphi);
        prop_assert_eq!((a.i_spon, a.i_seed, a.i_spin_wave), (b.i_spon, b.i_seed, b.i_spin_wave));
        let (_, amp) = t.fringe_mean_amplitude();
        prop_assert!(b.i_light_atom.abs() <= amp * (1.0 + 1e-12));
    }

    #[test]
    fn config_values_round_trip(
        delta in prop_oneof![1e8f64..1e10, -1e10f64..-1e8],
        rabi in 1e6f64..1e9,
        w0 in -1.0f64..=1.0,
        phase in -7.0f64..7.0,
        n in 2usize..300,
    ) {
        let text = format!("delta = {delta}\nrabi_p1 = {rabi}\nw0 = {w0}\nphase_stokes = {phase}\nn_t = {n}\n");
        let c = parse_config(&text).unwrap();
        prop_assert_eq!(c.params.detuning, delta);
        prop_assert_eq!(c.params.rabi_p1, rabi);
        prop_assert_eq!(c.params.initial_population_diff, w0);
        prop_assert_eq!(c.params.phase_stokes, phase);
        prop_assert_eq!(c.n_t, n);
        let again: String = c.entries().iter().filter(|(k, _)| *k != "out").map(|(k, v)| format!("{k} = {v}\n")).collect();
        let back = parse_config(&again).unwrap();
        prop_assert_eq!(back.params.detuning, delta);
        prop_assert_eq!(back.params.initial_population_diff, w0);
    }
}
