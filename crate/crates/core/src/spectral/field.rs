use serde::{Deserialize, Serialize};

use super::mesh::Mesh1D;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Per-edge samples of `a` in `-(a u')'`.
    Diffusion,
    /// Per-node samples of `a` in `-u'' - a u`.
    Reaction,
}

/// Coefficient sampled on a mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField<T> {
    kind: FieldKind,
    values: Vec<T>,
    bounds: (T, T),
    /// Non-fatal diagnostics gathered while sampling (e.g. sub-grid oscillation).
    pub warnings: Vec<String>,
}

impl<T: Scalar> CoefficientField<T> {
    /// Diffusion field; `values` has one entry per edge (`n_interior + 1`).
    pub fn diffusion(values: Vec<T>, bounds: (T, T)) -> Result<Self> {
        let (lo, hi) = bounds;
        if !(lo > T::zero()) || hi < lo {
            return Err(Error::InvalidCoefficient(format!(
                "ellipticity bounds must satisfy 0 < m_low <= m_high, got ({lo}, {hi})"
            )));
        }
        // Small slack absorbs rounding in closed-form evaluators.
        let slack = T::lit(1e-12) * hi;
        if let Some((j, v)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= lo - slack && v <= hi + slack))
        {
            return Err(Error::InvalidCoefficient(format!(
                "edge {j}: value {v} outside [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            kind: FieldKind::Diffusion,
            values,
            bounds,
            warnings: Vec::new(),
        })
    }

    pub fn constant_diffusion(c: T, mesh: &Mesh1D<T>) -> Result<Self> {
        Self::diffusion(vec![c; mesh.n_interior() + 1], (c, c))
    }

    /// Reaction field; its sup-norm must stay strictly below the first
    /// eigenvalue of the discrete Dirichlet Laplacian on `mesh`.
    pub fn reaction(values: Vec<T>, mesh: &Mesh1D<T>) -> Result<Self> {
        if values.len() != mesh.n_interior() {
            return Err(Error::LengthMismatch {
                expected: mesh.n_interior(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficient("non-finite reaction sample".into()));
        }
        let sup = sup_norm(&values);
        let lambda1 = mesh.laplacian_lambda1();
        if sup >= lambda1 {
            return Err(Error::NotPositiveDefinite {
                sup_norm: sup.as_f64(),
                lambda1: lambda1.as_f64(),
            });
        }
        let lo = values.iter().copied().fold(T::infinity(), T::min);
        let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
        Ok(Self {
            kind: FieldKind::Reaction,
            values,
            bounds: (lo, hi),
            warnings: Vec::new(),
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn bounds(&self) -> (T, T) {
        self.bounds
    }

    pub fn sup_norm(&self) -> T {
        sup_norm(&self.values)
    }
}

pub(crate) fn sup_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}
