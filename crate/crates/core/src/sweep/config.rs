use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::control::SolverSettings;
use crate::error::{Error, Result};
use crate::homogenize::{CellPreset, FamilySpec, ReactionPreset};
use crate::presets::PsiPreset;

/// Everything that determines a sweep's numbers. Output locations are not
/// part of it, so the hash identifies the experiment rather than the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: FamilySpec,
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub n_interior: usize,
    /// Retained eigenpairs; all of them when absent.
    #[serde(default)]
    pub k_modes: Option<usize>,
    pub omega: [f64; 2],
    pub psi: PsiPreset,
    pub r: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// Truncation for the sup-norm control distance; 10% of the homogenized
    /// optimal time when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default = "default_n_t")]
    pub n_t: usize,
    #[serde(default)]
    pub settings: SolverSettings,
}

pub(crate) fn default_n_t() -> usize {
    201
}

impl SweepConfig {
    /// `a(y) = 2 + sin(2 pi y)`, eps in {1/4, 1/8, 1/16, 1/32}, 255 interior nodes.
    pub fn default_diffusion() -> Self {
        Self {
            family: FamilySpec::Diffusion {
                coefficient: CellPreset::Sinusoidal {
                    mean: 2.0,
                    amplitude: 1.0,
                },
            },
            ..Self::common()
        }
    }

    /// `a_eps(x) = 1 + eps sin(pi x)` on the same grid and epsilons.
    pub fn default_reaction() -> Self {
        Self {
            family: FamilySpec::Reaction(ReactionPreset {
                base: 1.0,
                amplitude: 1.0,
                wavenumber: 1,
            }),
            ..Self::common()
        }
    }

    fn common() -> Self {
        Self {
            family: FamilySpec::Diffusion {
                coefficient: CellPreset::Constant { value: 1.0 },
            },
            epsilons: vec![0.25, 0.125, 0.0625, 0.03125],
            n_interior: 255,
            k_modes: None,
            omega: [0.3, 0.8],
            psi: PsiPreset::Modes {
                coefficients: vec![2.0, 0.5],
            },
            r: 1.0,
            m: 2.0,
            delta: None,
            n_t: default_n_t(),
            settings: SolverSettings::default(),
        }
    }

    /// Checks that do not need the homogenized solve; `delta` is checked
    /// against the homogenized optimal time once it is known.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("r", self.r)?;
        positive("M", self.m)?;
        if let Some(d) = self.delta {
            positive("delta", d)?;
        }
        if let Some(k) = self.k_modes {
            if k == 0 || k > self.n_interior {
                return Err(Error::TooManyModes {
                    requested: k,
                    available: self.n_interior,
                });
            }
        }
        let [l, r] = self.omega;
        if !(0.0 <= l && l < r && r <= 1.0) {
            return Err(Error::InvalidMask(format!(
                "omega = ({l}, {r}) is not a subinterval of (0, 1)"
            )));
        }
        self.psi.validate()?;
        self.settings.validate()
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
