use crate::error::{Error, Result};
use crate::quadrature::TimeGrid;
use crate::scalar::Scalar;
use crate::spectral::{ControlTrajectory, Mesh1D, StateVec};

/// `(||u_a - u_b||_{L2(0, horizon)}, max_{t <= horizon - delta} ||u_a(t) - u_b(t)||)`.
///
/// Controls are interpolated linearly in `t` and extended by zero past their
/// own horizons. The integral is split at the shorter horizon so the jump
/// created by the extension falls on a panel boundary: Simpson on a common
/// grid over the overlap, and on the longer control alone over the rest.
pub fn control_distance<T: Scalar>(
    u_a: &ControlTrajectory<T>,
    u_b: &ControlTrajectory<T>,
    horizon: T,
    delta: T,
) -> Result<(T, T)> {
    if !(horizon > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !(delta >= T::zero() && delta < horizon) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in [0, horizon = {horizon})"
        )));
    }
    let template = match u_a.samples().first().or_else(|| u_b.samples().first()) {
        Some(s) => s,
        None => return Ok((T::zero(), T::zero())),
    };
    let mesh = Mesh1D::new(template.len())?;
    let n = u_a.grid().len().max(u_b.grid().len()).max(3) | 1;
    let cutoff = horizon - delta;
    let end = |u: &ControlTrajectory<T>| {
        if u.is_null() {
            T::zero()
        } else {
            u.grid().tau().min(horizon)
        }
    };
    let (end_a, end_b) = (end(u_a), end(u_b));
    let overlap = end_a.min(end_b);
    let (longer, tail_end) = if end_a >= end_b {
        (u_a, end_a)
    } else {
        (u_b, end_b)
    };
    let at = |u: &ControlTrajectory<T>, t: T| u.sample_at(t).unwrap_or_else(|| StateVec::zeros(&mesh));

    let mut total = T::zero();
    let mut linf = T::zero();
    let mut segment = |from: T, to: T, diff: &dyn Fn(T) -> T| -> Result<()> {
        if !(to > from) {
            return Ok(());
        }
        let grid = TimeGrid::new(to - from, n)?;
        let mut sq = Vec::with_capacity(n);
        for &s in grid.nodes() {
            let t = from + s;
            let d = diff(t);
            sq.push(d * d);
            if t <= cutoff {
                linf = linf.max(d);
            }
        }
        total += grid.integrate(&sq);
        Ok(())
    };
    segment(T::zero(), overlap, &|t| at(u_a, t).sub(&at(u_b, t)).norm())?;
    segment(overlap, tail_end, &|t| at(longer, t).norm())?;
    Ok((total.max(T::zero()).sqrt(), linf))
}
