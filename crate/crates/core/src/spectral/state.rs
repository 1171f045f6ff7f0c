use serde::{Deserialize, Serialize};

use super::mesh::Mesh1D;
use crate::error::{Error, Result};
use crate::quadrature::TimeGrid;
use crate::scalar::Scalar;

/// Grid function on the interior nodes, an element of L^2(0, 1) with the
/// h-weighted inner product `<u, v> = h sum u_i v_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVec<T> {
    h: T,
    values: Vec<T>,
}

impl<T: Scalar> StateVec<T> {
    pub fn new(mesh: &Mesh1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.n_interior() {
            return Err(Error::LengthMismatch {
                expected: mesh.n_interior(),
                got: values.len(),
            });
        }
        Ok(Self { h: mesh.h(), values })
    }

    pub fn zeros(mesh: &Mesh1D<T>) -> Self {
        Self {
            h: mesh.h(),
            values: vec![T::zero(); mesh.n_interior()],
        }
    }

    pub fn from_fn(mesh: &Mesh1D<T>, f: impl Fn(T) -> T) -> Self {
        Self {
            h: mesh.h(),
            values: mesh.nodes().map(f).collect(),
        }
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn inner(&self, other: &Self) -> T {
        debug_assert_eq!(self.len(), other.len());
        self.h * crate::scalar::dot(&self.values, &other.values)
    }

    pub fn norm(&self) -> T {
        self.inner(self).sqrt()
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            h: self.h,
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn add_scaled(&mut self, c: T, other: &Self) {
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-T::one(), other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }
}

/// Indicator of the control region omega = (left, right); acts as both
/// the control operator B and its adjoint B*.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlMask<T> {
    left: T,
    right: T,
    indicator: Vec<T>,
}

impl<T: Scalar> ControlMask<T> {
    /// Marks the interior nodes with `left < x < right`.
    pub fn interval(mesh: &Mesh1D<T>, left: T, right: T) -> Result<Self> {
        if !(left < right) || left < T::zero() || right > T::one() {
            return Err(Error::InvalidMask(format!(
                "interval ({left}, {right}) must satisfy 0 <= left < right <= 1"
            )));
        }
        let indicator: Vec<T> = mesh
            .nodes()
            .map(|x| {
                if x > left && x < right {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        if indicator.iter().all(|v| *v == T::zero()) {
            return Err(Error::InvalidMask(format!(
                "interval ({left}, {right}) contains no mesh node"
            )));
        }
        Ok(Self {
            left,
            right,
            indicator,
        })
    }

    pub fn full(mesh: &Mesh1D<T>) -> Self {
        Self::interval(mesh, T::zero(), T::one()).expect("full domain contains every node")
    }

    pub fn bounds(&self) -> (T, T) {
        (self.left, self.right)
    }

    pub fn indicator(&self) -> &[T] {
        &self.indicator
    }

    pub fn is_full(&self) -> bool {
        self.indicator.iter().all(|v| *v == T::one())
    }

    /// Pointwise product with the indicator.
    pub fn restrict(&self, v: &StateVec<T>) -> StateVec<T> {
        StateVec {
            h: v.h,
            values: v
                .values
                .iter()
                .zip(&self.indicator)
                .map(|(&x, &m)| x * m)
                .collect(),
        }
    }

    /// `||chi_omega||` in the h-weighted norm.
    pub fn norm(&self, h: T) -> T {
        (h * self.indicator.iter().copied().sum::<T>()).sqrt()
    }
}

/// Control sampled on the nodes of a time grid; each sample is a grid
/// function supported on omega.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlTrajectory<T> {
    grid: TimeGrid<T>,
    samples: Vec<StateVec<T>>,
    sup_norm: T,
}

impl<T: Scalar> ControlTrajectory<T> {
    pub fn new(grid: TimeGrid<T>, samples: Vec<StateVec<T>>, mask: &ControlMask<T>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        for (j, s) in samples.iter().enumerate() {
            if s.len() != mask.indicator.len() {
                return Err(Error::LengthMismatch {
                    expected: mask.indicator.len(),
                    got: s.len(),
                });
            }
            if s.values
                .iter()
                .zip(&mask.indicator)
                .any(|(&v, &m)| m == T::zero() && v != T::zero())
            {
                return Err(Error::InvalidParameter(format!(
                    "control sample {j} is non-zero outside omega"
                )));
            }
        }
        let sup_norm = samples.iter().map(StateVec::norm).fold(T::zero(), T::max);
        Ok(Self {
            grid,
            samples,
            sup_norm,
        })
    }

    /// Null control on a zero horizon.
    pub fn null() -> Self {
        Self {
            grid: TimeGrid::degenerate(),
            samples: Vec::new(),
            sup_norm: T::zero(),
        }
    }

    pub fn is_null(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn samples(&self) -> &[StateVec<T>] {
        &self.samples
    }

    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    pub fn node_norms(&self) -> Vec<T> {
        self.samples.iter().map(StateVec::norm).collect()
    }

    /// Value at time `t` by linear interpolation between nodes; `None` outside
    /// `[0, tau]`. Bang-bang controls are only piecewise smooth in `t`, so
    /// interpolated values can dip below the bound between nodes.
    pub fn sample_at(&self, t: T) -> Option<StateVec<T>> {
        let nodes = self.grid.nodes();
        if self.samples.is_empty() || t < T::zero() || t > self.grid.tau() {
            return None;
        }
        let j = match nodes.binary_search_by(|x| x.partial_cmp(&t).expect("finite nodes")) {
            Ok(j) => return Some(self.samples[j].clone()),
            Err(j) => j,
        };
        let (t0, t1) = (nodes[j - 1], nodes[j]);
        let w = (t - t0) / (t1 - t0);
        let mut out = self.samples[j - 1].scaled(T::one() - w);
        out.add_scaled(w, &self.samples[j]);
        Some(out)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|s| s.scaled(c)).collect(),
            sup_norm: self.sup_norm * c.abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_h_weighted() {
        let mesh = Mesh1D::<f64>::new(3).unwrap();
        let v = StateVec::new(&mesh, vec![1.0, 1.0, 1.0]).unwrap();
        assert!((v.norm() - (0.75_f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mask_requires_a_node() {
        let mesh = Mesh1D::<f64>::new(3).unwrap();
        assert!(ControlMask::interval(&mesh, 0.3, 0.45).is_err());
        assert!(ControlMask::interval(&mesh, 0.6, 0.4).is_err());
        let m = ControlMask::interval(&mesh, 0.3, 0.8).unwrap();
        assert_eq!(m.indicator(), &[0.0, 1.0, 1.0]);
        assert!(ControlMask::full(&mesh).is_full());
    }

    #[test]
    fn trajectory_rejects_support_outside_omega() {
        let mesh = Mesh1D::<f64>::new(3).unwrap();
        let mask = ControlMask::interval(&mesh, 0.3, 0.8).unwrap();
        let grid = TimeGrid::new(1.0, 3).unwrap();
        let bad = vec![StateVec::new(&mesh, vec![1.0, 0.0, 0.0]).unwrap(); 3];
        assert!(ControlTrajectory::new(grid.clone(), bad, &mask).is_err());
        let good = vec![StateVec::new(&mesh, vec![0.0, 2.0, 0.0]).unwrap(); 3];
        let u = ControlTrajectory::new(grid, good, &mask).unwrap();
        assert!((u.sup_norm() - (2.0 * 0.5_f64)).abs() < 1e-15);
    }

    #[test]
    fn interpolation_between_nodes() {
        let mesh = Mesh1D::<f64>::new(2).unwrap();
        let mask = ControlMask::full(&mesh);
        let grid = TimeGrid::new(2.0, 3).unwrap();
        let samples = (0..3)
            .map(|j| StateVec::new(&mesh, vec![j as f64, 0.0]).unwrap())
            .collect();
        let u = ControlTrajectory::new(grid, samples, &mask).unwrap();
        assert_eq!(u.sample_at(0.5).unwrap().values()[0], 0.5);
        assert_eq!(u.sample_at(2.0).unwrap().values()[0], 2.0);
        assert!(u.sample_at(2.5).is_none());
    }
}
