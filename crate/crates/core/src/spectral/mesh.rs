use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform grid on (0, 1) with homogeneous Dirichlet ends; only interior
/// nodes `x_i = i h`, `i = 1..=n_interior` carry unknowns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D<T> {
    n_interior: usize,
    h: T,
}

impl<T: Scalar> Mesh1D<T> {
    pub fn new(n_interior: usize) -> Result<Self> {
        if n_interior < 2 {
            return Err(Error::MeshTooCoarse(n_interior));
        }
        Ok(Self {
            n_interior,
            h: T::one() / T::from_count(n_interior + 1),
        })
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Coordinate of interior node `i` (zero-based, so `x(0) = h`).
    pub fn x(&self, i: usize) -> T {
        T::from_count(i + 1) * self.h
    }

    /// Coordinate of the edge midpoint between nodes `j` and `j + 1`
    /// (boundary nodes included), `j = 0..=n_interior`.
    pub fn edge_midpoint(&self, j: usize) -> T {
        (T::from_count(j) + T::lit(0.5)) * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_interior).map(move |i| self.x(i))
    }

    /// First eigenvalue of the discrete Dirichlet Laplacian, `(4/h^2) sin^2(pi h / 2)`.
    pub fn laplacian_lambda1(&self) -> T {
        let s = (T::PI() * self.h / T::lit(2.0)).sin();
        T::lit(4.0) * s * s / (self.h * self.h)
    }

    /// h-normalized discrete sine `sqrt(2) sin(k pi x_i)`; exact eigenvector of
    /// every constant-coefficient operator on this mesh.
    pub fn sine_mode(&self, k: usize) -> Vec<T> {
        let kk = T::from_count(k);
        self.nodes()
            .map(|x| T::SQRT_2() * (kk * T::PI() * x).sin())
            .collect()
    }
}
