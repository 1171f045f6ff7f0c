#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use timeopt_core::control::{ControlProblem, SolverSettings};
use timeopt_core::spectral::{ControlMask, DiscreteOperator, Mesh1D, StateVec};

pub const N_T: usize = 201;

/// Single mode with eigenvalue 1, full-domain control, psi = 2 phi_1, r = 1.
pub fn scalar_problem() -> ControlProblem<f64> {
    scalar_problem_with_psi(2.0)
}

pub fn scalar_problem_with_psi(amp: f64) -> ControlProblem<f64> {
    let mesh = Mesh1D::new(15).unwrap();
    let op = DiscreteOperator::with_sine_modes(&mesh, vec![1.0]).unwrap();
    let mask = ControlMask::full(&mesh);
    let psi = op.mode(0).scaled(amp);
    ControlProblem::new(op, mask, psi, 1.0, N_T).unwrap()
}

/// Modes with the given eigenvalues on discrete sines, control on omega.
pub fn modal_problem(
    eigenvalues: &[f64],
    omega: (f64, f64),
    psi_coeffs: &[f64],
    r: f64,
) -> ControlProblem<f64> {
    let mesh = Mesh1D::new(63).unwrap();
    let op = DiscreteOperator::with_sine_modes(&mesh, eigenvalues.to_vec()).unwrap();
    let mask = ControlMask::interval(&mesh, omega.0, omega.1).unwrap();
    let psi = op.synthesize(psi_coeffs);
    ControlProblem::new(op, mask, psi, r, N_T).unwrap()
}

/// lambda = {1, 4}, omega = (0.3, 0.8), psi = 2 phi_1 + phi_2, r = 1.
pub fn two_mode_problem() -> ControlProblem<f64> {
    modal_problem(&[1.0, 4.0], (0.3, 0.8), &[2.0, 1.0], 1.0)
}

pub fn settings() -> SolverSettings {
    SolverSettings::default()
}

pub fn mode_coeff(p: &ControlProblem<f64>, v: &StateVec<f64>, k: usize) -> f64 {
    p.op().project(v)[k]
}

/// Two or three modes with random spectrum, control interval, initial state
/// and a radius between 20% and 70% of `||psi||`.
pub fn random_problem(rng: &mut ChaCha8Rng) -> ControlProblem<f64> {
    let k = rng.gen_range(2..=3);
    let mut lam: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..12.0)).collect();
    lam.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let left = rng.gen_range(0.05..0.5);
    let right = rng.gen_range(left + 0.2..0.95);
    let psi: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = rng.gen_range(0.2..0.7) * norm;
    modal_problem(&lam, (left, right), &psi, r)
}
