//! Composite Simpson quadrature on uniform grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform composite-Simpson grid on `[0, tau]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid<T> {
    tau: T,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(tau: T, n_t: usize) -> Result<Self> {
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(Error::InvalidTimeGrid(format!(
                "horizon must be positive and finite, got {tau}"
            )));
        }
        if n_t < 3 || n_t.is_multiple_of(2) {
            return Err(Error::InvalidTimeGrid(format!(
                "Simpson needs an odd node count >= 3, got {n_t}"
            )));
        }
        let step = tau / T::from_count(n_t - 1);
        let mut nodes: Vec<T> = (0..n_t).map(|j| step * T::from_count(j)).collect();
        nodes[n_t - 1] = tau;
        Ok(Self {
            tau,
            nodes,
            weights: simpson_weights(n_t, step),
        })
    }

    /// Horizon-zero placeholder carried by null controls.
    pub fn degenerate() -> Self {
        Self {
            tau: T::zero(),
            nodes: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn integrate(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(&w, &v)| w * v).sum()
    }
}

/// Weights `step/3 * [1, 4, 2, 4, ..., 2, 4, 1]` for `n` (odd) nodes.
pub fn simpson_weights<T: Scalar>(n: usize, step: T) -> Vec<T> {
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd node count >= 3");
    let third = step / T::lit(3.0);
    (0..n)
        .map(|j| {
            if j == 0 || j == n - 1 {
                third
            } else if j % 2 == 1 {
                third * T::lit(4.0)
            } else {
                third * T::lit(2.0)
            }
        })
        .collect()
}

/// Composite Simpson integral of `f` over `[a, b]` with `n` (odd) nodes.
pub fn simpson<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, n: usize) -> T {
    let step = (b - a) / T::from_count(n - 1);
    simpson_weights(n, step)
        .into_iter()
        .enumerate()
        .map(|(j, w)| w * f(a + step * T::from_count(j)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_ordering() {
        let g = TimeGrid::new(0.7_f64, 9).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(*g.nodes().last().unwrap(), 0.7);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!((g.weights().iter().sum::<f64>() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn rejects_even_or_tiny_counts() {
        assert!(TimeGrid::new(1.0_f64, 4).is_err());
        assert!(TimeGrid::new(1.0_f64, 1).is_err());
        assert!(TimeGrid::new(0.0_f64, 5).is_err());
        assert!(TimeGrid::new(-1.0_f64, 5).is_err());
    }

    #[test]
    fn exact_for_cubics() {
        let v = simpson(|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 3);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = 1.0 - (-2.0_f64).exp();
        let e1 = (simpson(|x: f64| (-x).exp(), 0.0, 2.0, 17) - exact).abs();
        let e2 = (simpson(|x: f64| (-x).exp(), 0.0, 2.0, 33) - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 0.5, "ratio {ratio}");
    }
}
