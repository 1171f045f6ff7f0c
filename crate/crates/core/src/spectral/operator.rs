//! Discrete self-adjoint generator and its exact-in-time semigroup.

use serde::{Deserialize, Serialize};

use super::field::{CoefficientField, FieldKind};
use super::mesh::Mesh1D;
use super::state::{ControlMask, StateVec};
use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigendecomposition of a discretized generator `A`. Modes are orthonormal
/// in the h-weighted inner product; the semigroup is `e^{-tA}` restricted to
/// the retained modes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscreteOperator<T> {
    mesh: Mesh1D<T>,
    eigenvalues: Vec<T>,
    modes: Vec<Vec<T>>,
    stiffness: Option<Stiffness<T>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Stiffness<T> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Scalar> DiscreteOperator<T> {
    /// Assembles the flux-form finite-difference operator for `coeff` and keeps
    /// its `k_modes` smallest eigenpairs (`None` keeps all of them).
    pub fn assemble(coeff: &CoefficientField<T>, mesh: &Mesh1D<T>, k_modes: Option<usize>) -> Result<Self> {
        let n = mesh.n_interior();
        let k = k_modes.unwrap_or(n);
        if k == 0 || k > n {
            return Err(Error::TooManyModes {
                requested: k,
                available: n,
            });
        }
        let h2 = mesh.h() * mesh.h();
        let (diag, off) = match coeff.kind() {
            FieldKind::Diffusion => {
                let a = coeff.values();
                if a.len() != n + 1 {
                    return Err(Error::LengthMismatch {
                        expected: n + 1,
                        got: a.len(),
                    });
                }
                let diag = (0..n).map(|i| (a[i] + a[i + 1]) / h2).collect();
                let off = (1..n).map(|i| -a[i] / h2).collect();
                (diag, off)
            }
            FieldKind::Reaction => {
                let a = coeff.values();
                if a.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: a.len(),
                    });
                }
                let two = T::lit(2.0);
                let diag = a.iter().map(|&ai| two / h2 - ai).collect();
                let off = vec![-T::one() / h2; n - 1];
                (diag, off)
            }
        };
        let tri = SymTridiagonal::new(diag, off)?;
        let eig = tri.eigen()?;
        if eig.values[0] <= T::zero() {
            return Err(Error::NotPositiveDefinite {
                sup_norm: coeff.sup_norm().as_f64(),
                lambda1: mesh.laplacian_lambda1().as_f64(),
            });
        }
        let scale = T::one() / mesh.h().sqrt();
        let modes = eig
            .vectors
            .into_iter()
            .take(k)
            .map(|v| v.into_iter().map(|x| x * scale).collect())
            .collect();
        Ok(Self {
            mesh: *mesh,
            eigenvalues: eig.values.into_iter().take(k).collect(),
            modes,
            stiffness: Some(Stiffness {
                diag: tri.diag,
                off: tri.off,
            }),
        })
    }

    /// Operator given directly by its spectral data. `modes` must be
    /// h-orthonormal grid functions and `eigenvalues` positive and ascending.
    pub fn from_spectrum(mesh: &Mesh1D<T>, eigenvalues: Vec<T>, modes: Vec<Vec<T>>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != modes.len() {
            return Err(Error::LengthMismatch {
                expected: eigenvalues.len(),
                got: modes.len(),
            });
        }
        if eigenvalues.len() > mesh.n_interior() {
            return Err(Error::TooManyModes {
                requested: eigenvalues.len(),
                available: mesh.n_interior(),
            });
        }
        if !(eigenvalues[0] > T::zero()) || eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "eigenvalues must be positive and ascending".into(),
            ));
        }
        for m in &modes {
            if m.len() != mesh.n_interior() {
                return Err(Error::LengthMismatch {
                    expected: mesh.n_interior(),
                    got: m.len(),
                });
            }
        }
        let op = Self {
            mesh: *mesh,
            eigenvalues,
            modes,
            stiffness: None,
        };
        let dev = op.gram_deviation();
        if dev > T::lit(1e-10).max(T::lit(64.0) * T::epsilon()) {
            return Err(Error::InvalidParameter(format!(
                "modes are not h-orthonormal (Gram deviation {dev})"
            )));
        }
        Ok(op)
    }

    /// Spectral operator whose modes are the discrete sines `sqrt(2) sin(k pi x)`.
    pub fn with_sine_modes(mesh: &Mesh1D<T>, eigenvalues: Vec<T>) -> Result<Self> {
        let modes = (1..=eigenvalues.len()).map(|k| mesh.sine_mode(k)).collect();
        Self::from_spectrum(mesh, eigenvalues, modes)
    }

    pub fn mesh(&self) -> &Mesh1D<T> {
        &self.mesh
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn lambda1(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn mode(&self, k: usize) -> StateVec<T> {
        StateVec::new(&self.mesh, self.modes[k].clone()).expect("mode length matches mesh")
    }

    /// Modal coefficients `<v, phi_k>`.
    pub fn project(&self, v: &StateVec<T>) -> Vec<T> {
        let h = self.mesh.h();
        self.modes
            .iter()
            .map(|m| h * crate::scalar::dot(m, v.values()))
            .collect()
    }

    /// Grid function `sum_k c_k phi_k`.
    pub fn synthesize(&self, coeffs: &[T]) -> StateVec<T> {
        let mut out = vec![T::zero(); self.mesh.n_interior()];
        for (c, m) in coeffs.iter().zip(&self.modes) {
            if *c == T::zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(m) {
                *o += *c * x;
            }
        }
        StateVec::new(&self.mesh, out).expect("length matches mesh")
    }

    /// Fraction of `||v||^2` captured by the retained modes.
    pub fn captured_fraction(&self, v: &StateVec<T>) -> T {
        let total = v.inner(v);
        if total == T::zero() {
            return T::one();
        }
        let c = self.project(v);
        crate::scalar::dot(&c, &c) / total
    }

    pub fn semigroup_modal(&self, t: T, coeffs: &[T]) -> Vec<T> {
        coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(&c, &l)| c * (-l * t).exp())
            .collect()
    }

    /// `T_t v = sum_k e^{-lambda_k t} <v, phi_k> phi_k`.
    pub fn semigroup_apply(&self, t: T, v: &StateVec<T>) -> Result<StateVec<T>> {
        if !(t >= T::zero()) {
            return Err(Error::NegativeTime(t.as_f64()));
        }
        if t == T::zero() {
            return Ok(v.clone());
        }
        Ok(self.synthesize(&self.semigroup_modal(t, &self.project(v))))
    }

    /// `(sI + A)^{-1} v`; `s = 0` gives `A^{-1} v`.
    pub fn resolvent_apply(&self, s: T, v: &StateVec<T>) -> Result<StateVec<T>> {
        if !(s > -self.lambda1()) {
            return Err(Error::ResolventShift {
                shift: s.as_f64(),
                neg_lambda1: -self.lambda1().as_f64(),
            });
        }
        let c: Vec<T> = self
            .project(v)
            .into_iter()
            .zip(&self.eigenvalues)
            .map(|(c, &l)| c / (s + l))
            .collect();
        Ok(self.synthesize(&c))
    }

    /// Action of the assembled matrix; spectral operators use `sum lambda_k <v,phi_k> phi_k`.
    pub fn apply_stiffness(&self, v: &StateVec<T>) -> StateVec<T> {
        match &self.stiffness {
            Some(st) => {
                let x = v.values();
                let n = x.len();
                let y = (0..n)
                    .map(|i| {
                        let mut y = st.diag[i] * x[i];
                        if i > 0 {
                            y += st.off[i - 1] * x[i - 1];
                        }
                        if i + 1 < n {
                            y += st.off[i] * x[i + 1];
                        }
                        y
                    })
                    .collect();
                StateVec::new(&self.mesh, y).expect("length matches mesh")
            }
            None => {
                let c: Vec<T> = self
                    .project(v)
                    .into_iter()
                    .zip(&self.eigenvalues)
                    .map(|(c, &l)| c * l)
                    .collect();
                self.synthesize(&c)
            }
        }
    }

    /// Max entry of `|G - I|` for the h-weighted Gram matrix of the modes.
    pub fn gram_deviation(&self) -> T {
        let h = self.mesh.h();
        let mut worst = T::zero();
        for (j, a) in self.modes.iter().enumerate() {
            for (k, b) in self.modes.iter().enumerate().skip(j) {
                let g = h * crate::scalar::dot(a, b);
                let want = if j == k { T::one() } else { T::zero() };
                worst = worst.max((g - want).abs());
            }
        }
        worst
    }

    /// Gram matrix `G_jk = <chi_omega phi_j, phi_k>`, row-major `K x K`.
    pub fn mask_gram(&self, mask: &ControlMask<T>) -> Vec<T> {
        let k = self.n_modes();
        let h = self.mesh.h();
        let ind = mask.indicator();
        let mut g = vec![T::zero(); k * k];
        for a in 0..k {
            for b in a..k {
                let v: T = self.modes[a]
                    .iter()
                    .zip(&self.modes[b])
                    .zip(ind)
                    .map(|((&x, &y), &m)| x * y * m)
                    .sum::<T>()
                    * h;
                g[a * k + b] = v;
                g[b * k + a] = v;
            }
        }
        g
    }

    /// Rayleigh quotient `<A v, v> / <v, v>` using the stiffness action.
    pub fn rayleigh(&self, v: &StateVec<T>) -> T {
        self.apply_stiffness(v).inner(v) / v.inner(v)
    }
}
