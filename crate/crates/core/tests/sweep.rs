//! Sweep harness behaviour on small configurations.

use std::fs;

use timeopt_core::homogenize::{CellPreset, FamilySpec, ReactionPreset};
use timeopt_core::presets::PsiPreset;
use timeopt_core::sweep::{emit_report, load_report, run_sweep, SweepConfig, CSV_HEADER};
use timeopt_core::Error;

fn small(family: FamilySpec) -> SweepConfig {
    SweepConfig {
        family,
        epsilons: vec![0.25, 0.125],
        n_interior: 63,
        ..SweepConfig::default_diffusion()
    }
}

#[test]
fn constant_family_matches_its_limit() {
    let config = SweepConfig {
        epsilons: vec![0.25],
        ..small(FamilySpec::Diffusion {
            coefficient: CellPreset::Constant { value: 1.5 },
        })
    };
    let report = run_sweep::<f64>(&config).unwrap();
    let r = &report.records[0];
    assert!(r.converged);
    assert!(r.tau_err <= 1e-9, "{}", r.tau_err);
    // Only the horizon mismatch left by the root finder separates the controls.
    let tail = config.m * r.tau_err.sqrt();
    assert!(r.ctrl_l2 <= 2.0 * tail + 1e-8, "{} {}", r.ctrl_l2, tail);
    assert!(r.ctrl_linf_trunc <= 1e-6, "{}", r.ctrl_linf_trunc);
    assert!(r.semigroup_dist <= 1e-12 && r.resolvent_dist <= 1e-12);
    assert_eq!(report.baseline.homogenized_coefficient, Some(1.5));
}

#[test]
fn records_are_ordered_and_bounded() {
    let config = small(FamilySpec::Diffusion {
        coefficient: CellPreset::Sinusoidal {
            mean: 2.0,
            amplitude: 1.0,
        },
    });
    let report = run_sweep::<f64>(&config).unwrap();
    let eps: Vec<f64> = report.records.iter().map(|r| r.epsilon).collect();
    assert_eq!(eps, config.epsilons);
    let psi_norm = (4.25f64).sqrt();
    for r in &report.records {
        assert!(r.converged);
        assert!(r.config_hash == report.config_hash);
        for d in [
            r.tau_err,
            r.ctrl_l2,
            r.ctrl_linf_trunc,
            r.semigroup_dist,
            r.resolvent_dist,
        ] {
            assert!(d >= 0.0);
        }
        assert!(r.semigroup_dist <= 2.0 * psi_norm);
        assert!(r.tau_star <= report.baseline.tau_hat * 1.5);
    }
    assert!((report.delta - 0.1 * report.baseline.tau_star).abs() < 1e-15);
}

#[test]
fn report_files_agree_on_hash_and_round_trip() {
    let config = small(FamilySpec::Reaction(ReactionPreset {
        base: 1.0,
        amplitude: 1.0,
        wavenumber: 1,
    }));
    let report = run_sweep::<f64>(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_report(&report, dir.path()).unwrap();
    let csv = fs::read_to_string(&paths.csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(csv.lines().count(), 3);
    let back = load_report::<f64>(&paths.json).unwrap();
    assert_eq!(back, report);
    let plot = fs::read_to_string(paths.plotdata.join("tau_vs_epsilon.dat")).unwrap();
    assert!(plot.contains(&report.config_hash));
    // CSV carries the same numbers at 17 significant digits.
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let tau: f64 = first[1].parse().unwrap();
    assert_eq!(tau, report.records[0].tau_star);
}

#[test]
fn hash_tracks_config_changes() {
    let a = SweepConfig::default_diffusion();
    let mut b = a.clone();
    assert_eq!(a.hash(), b.hash());
    b.r = 1.0 + 1e-12;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn unresolved_epsilon_is_rejected() {
    let config = SweepConfig {
        epsilons: vec![0.25, 0.03],
        ..small(FamilySpec::Diffusion {
            coefficient: CellPreset::Sinusoidal {
                mean: 2.0,
                amplitude: 1.0,
            },
        })
    };
    match run_sweep::<f64>(&config) {
        Err(Error::InvalidEpsilon { epsilon, .. }) => assert_eq!(epsilon, 0.03),
        other => panic!("{other:?}"),
    }
}

#[test]
fn increasing_epsilons_are_rejected() {
    let mut config = SweepConfig::default_diffusion();
    config.epsilons = vec![0.125, 0.25];
    assert!(run_sweep::<f64>(&config).is_err());
}

#[test]
fn reaction_bound_violation_names_epsilon() {
    let config = SweepConfig {
        epsilons: vec![0.25],
        ..small(FamilySpec::Reaction(ReactionPreset {
            base: 9.5,
            amplitude: 4.0,
            wavenumber: 1,
        }))
    };
    match run_sweep::<f64>(&config) {
        Err(Error::InvalidEpsilon { epsilon, reason }) => {
            assert_eq!(epsilon, 0.25);
            assert!(reason.contains("lambda_1"), "{reason}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn delta_is_validated_against_homogenized_time() {
    let mut config = small(FamilySpec::Diffusion {
        coefficient: CellPreset::Constant { value: 1.0 },
    });
    config.delta = Some(10.0);
    let err = run_sweep::<f64>(&config).unwrap_err();
    assert!(err.to_string().contains("delta"), "{err}");
}

#[test]
fn initial_state_inside_target_is_rejected() {
    let mut config = small(FamilySpec::Diffusion {
        coefficient: CellPreset::Constant { value: 1.0 },
    });
    config.psi = PsiPreset::Modes {
        coefficients: vec![0.5],
    };
    assert!(run_sweep::<f64>(&config).is_err());
}

#[test]
fn two_phase_family_is_flagged() {
    let config = SweepConfig {
        epsilons: vec![0.25],
        ..small(FamilySpec::Diffusion {
            coefficient: CellPreset::TwoPhase {
                low: 1.0,
                high: 3.0,
                fraction: 0.5,
            },
        })
    };
    let report = run_sweep::<f64>(&config).unwrap();
    assert!(report.outside_hypotheses);
    assert!((report.baseline.homogenized_coefficient.unwrap() - 1.5).abs() < 1e-14);
}
