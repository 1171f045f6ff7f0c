//! Named analytic initial states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{Mesh1D, StateVec};

/// Initial state `psi` given by a closed-form shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiPreset {
    /// `sum_k c_k sqrt(2) sin(k pi x)`, `k = 1, 2, ...`
    Modes { coefficients: Vec<f64> },
    /// `amplitude * exp(1 - 1 / (1 - s^2))` for `s = (x - center) / half_width`, `|s| < 1`.
    Bump {
        center: f64,
        half_width: f64,
        amplitude: f64,
    },
}

impl PsiPreset {
    pub fn validate(&self) -> Result<()> {
        match self {
            PsiPreset::Modes { coefficients } => {
                if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "psi mode coefficients must be a non-empty list of finite numbers".into(),
                    ));
                }
            }
            PsiPreset::Bump {
                center,
                half_width,
                amplitude,
            } => {
                if !(*half_width > 0.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "bump needs half_width > 0 and finite amplitude, got {half_width}, {amplitude}"
                    )));
                }
                if !(*center - *half_width >= 0.0 && *center + *half_width <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "bump support [{}, {}] leaves (0, 1)",
                        center - half_width,
                        center + half_width
                    )));
                }
            }
        }
        Ok(())
    }

    /// Samples the shape at the interior nodes of `mesh`.
    pub fn sample<T: Scalar>(&self, mesh: &Mesh1D<T>) -> Result<StateVec<T>> {
        self.validate()?;
        Ok(match self {
            PsiPreset::Modes { coefficients } => {
                let mut v = StateVec::zeros(mesh);
                for (k, &c) in coefficients.iter().enumerate() {
                    let mode = StateVec::new(mesh, mesh.sine_mode(k + 1))?;
                    v.add_scaled(T::lit(c), &mode);
                }
                v
            }
            PsiPreset::Bump {
                center,
                half_width,
                amplitude,
            } => {
                let (c, w, a) = (T::lit(*center), T::lit(*half_width), T::lit(*amplitude));
                StateVec::from_fn(mesh, |x| {
                    let s = (x - c) / w;
                    if s.abs() < T::one() {
                        a * (T::one() - T::one() / (T::one() - s * s)).exp()
                    } else {
                        T::zero()
                    }
                })
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_have_expected_norm() {
        let mesh = Mesh1D::<f64>::new(63).unwrap();
        let psi = PsiPreset::Modes {
            coefficients: vec![2.0, 0.5],
        }
        .sample(&mesh)
        .unwrap();
        assert!((psi.norm() - (4.25f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bump_peaks_at_center() {
        let mesh = Mesh1D::<f64>::new(99).unwrap();
        let psi = PsiPreset::Bump {
            center: 0.5,
            half_width: 0.25,
            amplitude: 3.0,
        }
        .sample(&mesh)
        .unwrap();
        assert!((psi.values()[49] - 3.0).abs() < 1e-12);
        assert_eq!(psi.values()[0], 0.0);
    }

    #[test]
    fn rejects_bad_bump() {
        let b = PsiPreset::Bump {
            center: 0.1,
            half_width: 0.2,
            amplitude: 1.0,
        };
        assert!(b.validate().is_err());
    }
}
