//! Observation, input-to-state map and free-decay reach time.

use super::operator::DiscreteOperator;
use super::state::{ControlMask, ControlTrajectory, StateVec};
use crate::error::{Error, Result};
use crate::quadrature::TimeGrid;
use crate::scalar::Scalar;

/// `B* T*_{lag} eta`, i.e. the indicator of omega times `T_lag eta`.
pub fn observe<T: Scalar>(
    op: &DiscreteOperator<T>,
    mask: &ControlMask<T>,
    lag: T,
    eta: &StateVec<T>,
) -> Result<StateVec<T>> {
    Ok(mask.restrict(&op.semigroup_apply(lag, eta)?))
}

/// `Phi_tau u = int_0^tau T_{tau - s} B u(s) ds` by composite Simpson, mode by mode.
pub fn input_map<T: Scalar>(
    op: &DiscreteOperator<T>,
    mask: &ControlMask<T>,
    u: &ControlTrajectory<T>,
    grid: &TimeGrid<T>,
) -> Result<StateVec<T>> {
    check_grid(u, grid)?;
    if u.is_null() {
        return Ok(StateVec::zeros(op.mesh()));
    }
    let tau = grid.tau();
    let mut acc = vec![T::zero(); op.n_modes()];
    for ((&s, &w), sample) in grid.nodes().iter().zip(grid.weights()).zip(u.samples()) {
        let forced = op.project(&mask.restrict(sample));
        let lag = tau - s;
        for ((a, c), &l) in acc.iter_mut().zip(forced).zip(op.eigenvalues()) {
            *a += w * (-l * lag).exp() * c;
        }
    }
    Ok(op.synthesize(&acc))
}

/// `z(tau; psi, u) = T_tau psi + Phi_tau u`.
pub fn terminal_state<T: Scalar>(
    op: &DiscreteOperator<T>,
    mask: &ControlMask<T>,
    psi: &StateVec<T>,
    u: &ControlTrajectory<T>,
) -> Result<StateVec<T>> {
    if u.is_null() {
        return Ok(psi.clone());
    }
    let grid = u.grid();
    let mut z = op.semigroup_apply(grid.tau(), psi)?;
    z.add_scaled(T::one(), &input_map(op, mask, u, grid)?);
    Ok(z)
}

fn check_grid<T: Scalar>(u: &ControlTrajectory<T>, grid: &TimeGrid<T>) -> Result<()> {
    if u.grid().len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            got: u.grid().len(),
        });
    }
    let tol = T::lit(1e-12).max(T::lit(16.0) * T::epsilon()) * grid.tau().max(T::one());
    if u.grid()
        .nodes()
        .iter()
        .zip(grid.nodes())
        .any(|(a, b)| (*a - *b).abs() > tol)
    {
        return Err(Error::InvalidTimeGrid(
            "trajectory nodes differ from the quadrature grid".into(),
        ));
    }
    Ok(())
}

/// First time the free trajectory `T_t psi` enters the closed ball of radius `r`.
///
/// `t -> ||T_t psi||` is strictly decreasing for a positive self-adjoint
/// generator, and `||T_t psi|| <= e^{-lambda_1 t} ||psi||` gives a finite
/// upper bracket, so plain bisection converges to the unique crossing.
pub fn free_reach_time<T: Scalar>(op: &DiscreteOperator<T>, psi: &StateVec<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {r}"
        )));
    }
    let c = op.project(psi);
    Ok(reach_time_modal(op.eigenvalues(), &c, r))
}

pub(crate) fn decayed_norm<T: Scalar>(eigenvalues: &[T], coeffs: &[T], t: T) -> T {
    coeffs
        .iter()
        .zip(eigenvalues)
        .map(|(&c, &l)| {
            let v = c * (-l * t).exp();
            v * v
        })
        .sum::<T>()
        .sqrt()
}

pub(crate) fn reach_time_modal<T: Scalar>(eigenvalues: &[T], coeffs: &[T], r: T) -> T {
    let n0 = decayed_norm(eigenvalues, coeffs, T::zero());
    if n0 <= r {
        return T::zero();
    }
    let mut lo = T::zero();
    let mut hi = (n0 / r).ln() / eigenvalues[0];
    // The bound can land exactly on the crossing for a pure first mode.
    while decayed_norm(eigenvalues, coeffs, hi) > r {
        hi = hi * T::lit(1.0 + 1e-12) + T::epsilon();
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if decayed_norm(eigenvalues, coeffs, mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{CoefficientField, Mesh1D};

    fn single_mode() -> DiscreteOperator<f64> {
        let mesh = Mesh1D::new(15).unwrap();
        DiscreteOperator::with_sine_modes(&mesh, vec![1.0]).unwrap()
    }

    #[test]
    fn reach_time_closed_form() {
        let op = single_mode();
        let psi = op.mode(0).scaled(2.0);
        let t = free_reach_time(&op, &psi, 1.0).unwrap();
        assert!((t - 2.0_f64.ln()).abs() < 1e-8, "{t}");
    }

    #[test]
    fn reach_time_zero_inside_ball() {
        let op = single_mode();
        let psi = op.mode(0).scaled(0.5);
        assert_eq!(free_reach_time(&op, &psi, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn reach_time_monotone_in_radius() {
        let mesh = Mesh1D::<f64>::new(31).unwrap();
        let coeff = CoefficientField::constant_diffusion(1.0, &mesh).unwrap();
        let op = DiscreteOperator::assemble(&coeff, &mesh, None).unwrap();
        let psi = StateVec::from_fn(&mesh, |x| 10.0 * x * (1.0 - x) + (7.0 * x).sin());
        let mut r = 0.01;
        let mut prev = f64::INFINITY;
        while r < 4.0 {
            let t = free_reach_time(&op, &psi, r).unwrap();
            assert!(t <= prev);
            let reached = op.semigroup_apply(t, &psi).unwrap().norm();
            if t > 0.0 {
                assert!((reached - r).abs() < 1e-9 * r);
            }
            prev = t;
            r *= 2.0;
        }
    }

    #[test]
    fn observe_full_mask_at_zero_lag_is_identity() {
        let op = single_mode();
        let mask = ControlMask::full(op.mesh());
        let eta = StateVec::from_fn(op.mesh(), |x| x.sin());
        assert_eq!(observe(&op, &mask, 0.0, &eta).unwrap(), eta);
        let zero = StateVec::zeros(op.mesh());
        assert!(observe(&op, &mask, 0.7, &zero).unwrap().is_zero());
    }

    #[test]
    fn observe_contracts_on_proper_subset() {
        let mesh = Mesh1D::<f64>::new(40).unwrap();
        let coeff = CoefficientField::constant_diffusion(1.0, &mesh).unwrap();
        let op = DiscreteOperator::assemble(&coeff, &mesh, None).unwrap();
        let mask = ControlMask::interval(&mesh, 0.2, 0.6).unwrap();
        let eta = StateVec::from_fn(&mesh, |x| (5.0 * x).cos() + x);
        for lag in [0.01, 0.05, 0.2] {
            let o = observe(&op, &mask, lag, &eta).unwrap();
            assert!(o.norm() <= (-op.lambda1() * lag).exp() * eta.norm());
            for (v, m) in o.values().iter().zip(mask.indicator()) {
                if *m == 0.0 {
                    assert_eq!(*v, 0.0);
                }
            }
        }
    }

    #[test]
    fn input_map_of_zero_and_constant_mode() {
        let op = single_mode();
        let mask = ControlMask::full(op.mesh());
        let tau = 0.8;
        let grid = TimeGrid::new(tau, 101).unwrap();
        let zero = ControlTrajectory::new(grid.clone(), vec![StateVec::zeros(op.mesh()); grid.len()], &mask)
            .unwrap();
        assert!(input_map(&op, &mask, &zero, &grid).unwrap().is_zero());

        let c = 1.7;
        let u = ControlTrajectory::new(grid.clone(), vec![op.mode(0).scaled(c); grid.len()], &mask).unwrap();
        let z = input_map(&op, &mask, &u, &grid).unwrap();
        let want = op.mode(0).scaled(c * (1.0 - (-tau).exp()));
        assert!(z.sub(&want).norm() < 1e-10);
    }

    #[test]
    fn input_map_rejects_foreign_grid() {
        let op = single_mode();
        let mask = ControlMask::full(op.mesh());
        let g1 = TimeGrid::new(1.0, 5).unwrap();
        let g2 = TimeGrid::new(1.0, 7).unwrap();
        let u = ControlTrajectory::new(g1, vec![StateVec::zeros(op.mesh()); 5], &mask).unwrap();
        assert!(matches!(
            input_map(&op, &mask, &u, &g2),
            Err(Error::GridMismatch { .. })
        ));
    }
}
