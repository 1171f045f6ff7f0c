//! Two/three-mode instances checked against frozen independent oracles and
//! the structural identities of the J-minimizer.

mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timeopt_core::control::*;
use timeopt_core::spectral::StateVec;

// Frozen from `oracles.rs` (Nelder-Mead on J with Gauss-Legendre quadrature,
// and a 10^4-point minimal-norm curve inverted by linear interpolation).
const ETA_HAT_TAU_HALF: [f64; 2] = [-1.842923528406, -0.282143699266];
const J_MIN_TAU_HALF: f64 = -0.204683657723;
const TAU_STAR_M2: f64 = 0.324545036962;

#[test]
fn minimizer_matches_derivative_free_oracle() {
    let p = two_mode_problem();
    let m = minimize_j(&p, 0.5, &settings(), None).unwrap();
    assert!(m.diagnostics.converged, "{:?}", m.diagnostics);
    let c = p.op().project(&m.eta);
    for k in 0..2 {
        assert!((c[k] - ETA_HAT_TAU_HALF[k]).abs() < 1e-4, "{c:?}");
    }
    assert!((m.value - J_MIN_TAU_HALF).abs() < 1e-6);
}

#[test]
fn time_optimal_matches_dense_curve_inversion() {
    let p = two_mode_problem();
    let sol = time_optimal(&p, 2.0, &settings()).unwrap();
    assert!(sol.converged, "{:?}", sol.residuals);
    assert!((sol.tau_star - TAU_STAR_M2).abs() < 1e-4, "{}", sol.tau_star);
    assert!(sol.tau_star > 0.0 && sol.tau_star <= sol.tau_hat);
    assert!(sol.u_star.node_norms().iter().all(|n| (n - 2.0).abs() <= 2e-6));
    assert!(sol.residuals.transversality <= 1e-5);
    assert!(sol.residuals.max_principle <= 1e-8);
}

#[test]
fn nonzero_minimizer_whenever_target_missed() {
    let p = two_mode_problem();
    for tau in [0.05, 0.2, 0.5, 0.69] {
        assert!(p.free_norm(tau) > p.radius());
        let m = minimize_j(&p, tau, &settings(), None).unwrap();
        assert!(m.eta.norm() > 0.0);
    }
}

#[test]
fn warm_start_reaches_same_minimizer() {
    let p = two_mode_problem();
    let cold = minimize_j(&p, 0.3, &settings(), None).unwrap();
    let seed = minimize_j(&p, 0.35, &settings(), None).unwrap();
    let warm = minimize_j(&p, 0.3, &settings(), Some(&seed.eta)).unwrap();
    assert!(warm.eta.sub(&cold.eta).norm() < 1e-6);
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_problem(&mut rng);
        let k = p.op().n_modes();
        let tau = rng.gen_range(0.05..1.0) * p.tau_hat();
        let eta = p
            .op()
            .synthesize(&(0..k).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>());
        let dir = p
            .op()
            .synthesize(&(0..k).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let g = grad_smooth_part(&p, tau, &eta).unwrap();
        let analytic = g.grad.inner(&dir);
        let step = 1e-5;
        let plus = {
            let mut e = eta.clone();
            e.add_scaled(step, &dir);
            smooth_part(&p, tau, &e).unwrap()
        };
        let minus = {
            let mut e = eta.clone();
            e.add_scaled(-step, &dir);
            smooth_part(&p, tau, &e).unwrap()
        };
        let fd = (plus - minus) / (2.0 * step);
        let rel = (fd - analytic).abs() / analytic.abs().max(fd.abs());
        worst = worst.max(rel);
    }
    assert!(worst <= 1e-5, "worst relative error {worst}");
}

#[test]
fn duality_and_target_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let p = random_problem(&mut rng);
        let tau = rng.gen_range(0.1..0.9) * p.tau_hat();
        let sol = norm_optimal(&p, tau, &settings(), None).unwrap();
        assert!(sol.converged, "{:?}", sol.residuals);
        let gap = (sol.v_star + 0.5 * sol.n_star * sol.n_star).abs();
        assert!(
            gap <= 1e-8 * sol.n_star.powi(2).max(1.0),
            "gap {gap} n {} eta {} el {} tau {tau} hat {}",
            sol.n_star,
            sol.eta_hat.norm(),
            sol.residuals.el_residual,
            p.tau_hat()
        );
        assert!(sol.residuals.target_residual <= 1e-5 * p.radius());
        // bang-bang in norm
        for n in sol.control.node_norms() {
            assert!((n - sol.n_star).abs() <= 1e-9 * sol.n_star.max(1.0));
        }
    }
}

#[test]
fn inverse_relations_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let p = random_problem(&mut rng);
        let tau = rng.gen_range(0.15..0.85) * p.tau_hat();
        let n = norm_optimal(&p, tau, &settings(), None).unwrap().n_star;
        let back = time_optimal(&p, n, &settings()).unwrap();
        assert!((back.tau_star - tau).abs() <= 2e-6, "{} vs {tau}", back.tau_star);
        let curve = minimal_norm_curve(&p, &[back.tau_star], &settings()).unwrap();
        assert!((curve[0].n_star - n).abs() <= 1e-6 * n);
    }
}

#[test]
fn curve_strictly_decreasing() {
    let p = two_mode_problem();
    let taus: Vec<f64> = (1..40).map(|i| p.tau_hat() * i as f64 / 40.0).collect();
    let curve = minimal_norm_curve(&p, &taus, &settings()).unwrap();
    assert!(curve.windows(2).all(|w| w[1].n_star < w[0].n_star));
    assert!(curve[0].n_star > 10.0 * curve[38].n_star);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn j_is_midpoint_convex(
        a in proptest::collection::vec(-3.0f64..3.0, 2),
        b in proptest::collection::vec(-3.0f64..3.0, 2),
        lam in 0.01f64..0.99,
        tau in 0.05f64..0.65,
    ) {
        let p = two_mode_problem();
        let ea = p.op().synthesize(&a);
        let eb = p.op().synthesize(&b);
        let mut mix = ea.scaled(lam);
        mix.add_scaled(1.0 - lam, &eb);
        let ja = eval_j(&p, tau, &ea).unwrap();
        let jb = eval_j(&p, tau, &eb).unwrap();
        let jm = eval_j(&p, tau, &mix).unwrap();
        prop_assert!(jm <= lam * ja + (1.0 - lam) * jb + 1e-12);
        // J(lam eta) <= lam J(eta) + (1 - lam) J(0), J(0) = 0
        let js = eval_j(&p, tau, &ea.scaled(lam)).unwrap();
        prop_assert!(js <= lam * ja + 1e-12);
    }

    #[test]
    fn j_vanishes_only_at_origin_scale(tau in 0.05f64..0.65) {
        let p = two_mode_problem();
        prop_assert_eq!(eval_j(&p, tau, &StateVec::zeros(p.op().mesh())).unwrap(), 0.0);
    }
}
