//! Epsilon-indexed coefficient families and their homogenized limits.
//!
//! In one dimension the cell problem is solvable in closed form and the
//! homogenized coefficient of `a(x/eps)` is the harmonic mean of `a` over a
//! period.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::simpson;
use crate::scalar::Scalar;
use crate::spectral::{CoefficientField, DiscreteOperator, Mesh1D, StateVec};

/// Closed-form period-1 coefficient shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum CellPreset {
    Constant {
        value: f64,
    },
    /// `mean + amplitude sin(2 pi y)`
    Sinusoidal {
        mean: f64,
        amplitude: f64,
    },
    /// `1 / (mean + amplitude sin(2 pi y))`
    InverseSinusoidal {
        mean: f64,
        amplitude: f64,
    },
    /// `low` on `[0, fraction)`, `high` on `[fraction, 1)`. Discontinuous, so it
    /// sits outside the smoothness class the convergence theory assumes.
    TwoPhase {
        low: f64,
        high: f64,
        fraction: f64,
    },
}

const BOUND_SAMPLES: usize = 4096;
const CELL_NODES: usize = 4097;

/// Positive period-1 coefficient `y -> a(y)` with recorded ellipticity bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicCoefficient1D<T> {
    preset: CellPreset,
    bounds: (T, T),
}

impl<T: Scalar> PeriodicCoefficient1D<T> {
    pub fn new(preset: CellPreset) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCoefficient(msg));
        let (lo, hi) = match preset {
            CellPreset::Constant { value } => {
                if !(value > 0.0) {
                    return bad(format!("constant coefficient must be positive, got {value}"));
                }
                (value, value)
            }
            CellPreset::Sinusoidal { mean, amplitude } => {
                if !(mean > amplitude.abs()) {
                    return bad(format!("need mean > |amplitude|, got {mean}, {amplitude}"));
                }
                (mean - amplitude.abs(), mean + amplitude.abs())
            }
            CellPreset::InverseSinusoidal { mean, amplitude } => {
                if !(mean > amplitude.abs()) {
                    return bad(format!("need mean > |amplitude|, got {mean}, {amplitude}"));
                }
                (1.0 / (mean + amplitude.abs()), 1.0 / (mean - amplitude.abs()))
            }
            CellPreset::TwoPhase { low, high, fraction } => {
                if !(low > 0.0 && high > 0.0 && fraction > 0.0 && fraction < 1.0) {
                    return bad(format!(
                        "two-phase needs positive phases and fraction in (0,1), got {low}, {high}, {fraction}"
                    ));
                }
                (low.min(high), low.max(high))
            }
        };
        let out = Self {
            preset,
            bounds: (T::lit(lo), T::lit(hi)),
        };
        let slack = T::lit(1e-12) * out.bounds.1;
        for j in 0..BOUND_SAMPLES {
            let y = T::from_count(j) / T::from_count(BOUND_SAMPLES);
            let a = out.eval(y);
            if !(a >= out.bounds.0 - slack && a <= out.bounds.1 + slack) {
                return bad(format!("sample a({y}) = {a} escapes the recorded bounds"));
            }
        }
        Ok(out)
    }

    pub fn preset(&self) -> &CellPreset {
        &self.preset
    }

    pub fn bounds(&self) -> (T, T) {
        self.bounds
    }

    /// Whether the preset is smooth (the piecewise two-phase one is not).
    pub fn is_smooth(&self) -> bool {
        !matches!(self.preset, CellPreset::TwoPhase { .. })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.preset, CellPreset::Constant { .. })
            || matches!(self.preset, CellPreset::Sinusoidal { amplitude, .. } | CellPreset::InverseSinusoidal { amplitude, .. } if amplitude == 0.0)
    }

    pub fn eval(&self, y: T) -> T {
        let y = y - y.floor();
        let s = (T::lit(2.0) * T::PI() * y).sin();
        match self.preset {
            CellPreset::Constant { value } => T::lit(value),
            CellPreset::Sinusoidal { mean, amplitude } => T::lit(mean) + T::lit(amplitude) * s,
            CellPreset::InverseSinusoidal { mean, amplitude } => {
                T::one() / (T::lit(mean) + T::lit(amplitude) * s)
            }
            CellPreset::TwoPhase { low, high, fraction } => {
                if y < T::lit(fraction) {
                    T::lit(low)
                } else {
                    T::lit(high)
                }
            }
        }
    }

    pub fn arithmetic_mean(&self) -> T {
        match self.preset {
            CellPreset::TwoPhase { low, high, fraction } => T::lit(fraction * low + (1.0 - fraction) * high),
            _ => simpson(|y| self.eval(y), T::zero(), T::one(), CELL_NODES),
        }
    }
}

/// Homogenized coefficient `(int_0^1 a(y)^{-1} dy)^{-1}`.
///
/// Smooth presets integrate by composite Simpson on 4097 nodes (spectrally
/// accurate for periodic integrands); the two-phase preset uses its exact value.
pub fn homogenized_coefficient_1d<T: Scalar>(base: &PeriodicCoefficient1D<T>) -> T {
    let inv_mean = match base.preset {
        CellPreset::TwoPhase { low, high, fraction } => T::lit(fraction / low + (1.0 - fraction) / high),
        _ => simpson(|y| T::one() / base.eval(y), T::zero(), T::one(), CELL_NODES),
    };
    let a0 = T::one() / inv_mean;
    // Quadrature rounding must not push the mean outside the bounds.
    a0.max(base.bounds.0).min(base.bounds.1)
}

/// Smallest `eps / h` ratio for which oscillations are considered resolved.
pub const MIN_CELLS_PER_PERIOD: f64 = 4.0;

pub fn is_resolved<T: Scalar>(eps: T, mesh: &Mesh1D<T>) -> bool {
    eps >= T::lit(MIN_CELLS_PER_PERIOD) * mesh.h()
}

/// Samples `a(x / eps)` at edge midpoints.
pub fn oscillating_coefficient<T: Scalar>(
    base: &PeriodicCoefficient1D<T>,
    eps: T,
    mesh: &Mesh1D<T>,
) -> Result<CoefficientField<T>> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidEpsilon {
            epsilon: eps.as_f64(),
            reason: "must be positive".into(),
        });
    }
    let values = (0..=mesh.n_interior())
        .map(|j| base.eval(mesh.edge_midpoint(j) / eps))
        .collect();
    let mut field = CoefficientField::diffusion(values, base.bounds)?;
    if !is_resolved(eps, mesh) {
        let msg = format!(
            "epsilon {eps} is below {MIN_CELLS_PER_PERIOD} h = {}; sub-grid oscillation \
             homogenizes to the wrong (arithmetic) limit",
            T::lit(MIN_CELLS_PER_PERIOD) * mesh.h()
        );
        log::warn!("{msg}");
        field.warnings.push(msg);
    }
    Ok(field)
}

/// Reaction perturbation `a_eps(x) = base + amplitude * eps * sin(wavenumber pi x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionPreset {
    pub base: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one_u32")]
    pub wavenumber: u32,
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

impl ReactionPreset {
    /// Field at `eps`; `None` is the limit `a_0 = base`.
    pub fn field<T: Scalar>(&self, eps: Option<T>, mesh: &Mesh1D<T>) -> Result<CoefficientField<T>> {
        let values = self.samples(eps, mesh);
        CoefficientField::reaction(values, mesh).map_err(|e| match (e, eps) {
            (Error::NotPositiveDefinite { sup_norm, lambda1 }, Some(eps)) => Error::InvalidEpsilon {
                epsilon: eps.as_f64(),
                reason: format!("reaction sup-norm {sup_norm} violates the bound lambda_1 = {lambda1}"),
            },
            (e, _) => e,
        })
    }

    fn samples<T: Scalar>(&self, eps: Option<T>, mesh: &Mesh1D<T>) -> Vec<T> {
        let base = T::lit(self.base);
        let k = T::from_count(self.wavenumber as usize) * T::PI();
        mesh.nodes()
            .map(|x| match eps {
                Some(e) => base + T::lit(self.amplitude) * e * (k * x).sin(),
                None => base,
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ReactionFamily<T> {
    pub members: Vec<(T, CoefficientField<T>)>,
    pub limit: CoefficientField<T>,
    /// `||a_eps - a_0||_inf` on the grid, aligned with `members`.
    pub distances: Vec<T>,
}

pub fn reaction_family<T: Scalar>(
    preset: &ReactionPreset,
    epsilons: &[T],
    mesh: &Mesh1D<T>,
) -> Result<ReactionFamily<T>> {
    let limit = preset.field(None, mesh)?;
    let mut members = Vec::with_capacity(epsilons.len());
    let mut distances = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let f = preset.field(Some(eps), mesh)?;
        let d = f
            .values()
            .iter()
            .zip(limit.values())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        members.push((eps, f));
        distances.push(d);
    }
    Ok(ReactionFamily {
        members,
        limit,
        distances,
    })
}

/// Which family an epsilon sweep runs over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Diffusion { coefficient: CellPreset },
    Reaction(ReactionPreset),
}

/// Decreasing sequence of epsilons over one coefficient family.
#[derive(Clone, Debug)]
pub struct EpsilonFamily<T> {
    epsilons: Vec<T>,
    base: FamilyBase<T>,
}

#[derive(Clone, Debug)]
enum FamilyBase<T> {
    Diffusion(PeriodicCoefficient1D<T>),
    Reaction(ReactionPreset),
}

impl<T: Scalar> EpsilonFamily<T> {
    pub fn new(spec: &FamilySpec, epsilons: Vec<T>) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::InvalidParameter("epsilon list is empty".into()));
        }
        if let Some(&e) = epsilons.iter().find(|e| !(**e > T::zero())) {
            return Err(Error::InvalidEpsilon {
                epsilon: e.as_f64(),
                reason: "must be positive".into(),
            });
        }
        if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidParameter(
                "epsilon list must be strictly decreasing".into(),
            ));
        }
        let base = match spec {
            FamilySpec::Diffusion { coefficient } => {
                FamilyBase::Diffusion(PeriodicCoefficient1D::new(coefficient.clone())?)
            }
            FamilySpec::Reaction(p) => FamilyBase::Reaction(p.clone()),
        };
        Ok(Self { epsilons, base })
    }

    pub fn epsilons(&self) -> &[T] {
        &self.epsilons
    }

    /// Rejects meshes that cannot resolve the family (`eps < 4h`) and reaction
    /// members that break the first-eigenvalue bound.
    pub fn validate_on(&self, mesh: &Mesh1D<T>) -> Result<()> {
        match &self.base {
            FamilyBase::Diffusion(_) => {
                if let Some(&e) = self.epsilons.iter().find(|&&e| !is_resolved(e, mesh)) {
                    return Err(Error::InvalidEpsilon {
                        epsilon: e.as_f64(),
                        reason: format!(
                            "unresolved on a mesh with h = {} (need eps >= {MIN_CELLS_PER_PERIOD} h)",
                            mesh.h()
                        ),
                    });
                }
                Ok(())
            }
            FamilyBase::Reaction(p) => reaction_family(p, &self.epsilons, mesh).map(|_| ()),
        }
    }

    pub fn member_field(&self, eps: T, mesh: &Mesh1D<T>) -> Result<CoefficientField<T>> {
        match &self.base {
            FamilyBase::Diffusion(b) => oscillating_coefficient(b, eps, mesh),
            FamilyBase::Reaction(p) => p.field(Some(eps), mesh),
        }
    }

    /// The homogenized (diffusion) or limiting (reaction) coefficient field.
    pub fn limit_field(&self, mesh: &Mesh1D<T>) -> Result<CoefficientField<T>> {
        match &self.base {
            FamilyBase::Diffusion(b) => {
                CoefficientField::constant_diffusion(homogenized_coefficient_1d(b), mesh)
            }
            FamilyBase::Reaction(p) => p.field(None, mesh),
        }
    }

    /// Homogenized coefficient for diffusion families.
    pub fn homogenized_value(&self) -> Option<T> {
        match &self.base {
            FamilyBase::Diffusion(b) => Some(homogenized_coefficient_1d(b)),
            FamilyBase::Reaction(_) => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        match &self.base {
            FamilyBase::Diffusion(b) => b.is_smooth(),
            FamilyBase::Reaction(_) => true,
        }
    }

    /// Assembles every member operator, in parallel, in epsilon order.
    pub fn operators(
        &self,
        mesh: &Mesh1D<T>,
        k_modes: Option<usize>,
    ) -> Result<Vec<(T, DiscreteOperator<T>)>> {
        self.epsilons
            .par_iter()
            .map(|&e| {
                let f = self.member_field(e, mesh)?;
                Ok((e, DiscreteOperator::assemble(&f, mesh, k_modes)?))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventRow<T> {
    pub epsilon: T,
    /// `max_probe ||A_eps^{-1} psi - A_0^{-1} psi||`
    pub distance: T,
}

/// Distances between inverses of each family member and the limit operator,
/// ordered by epsilon descending.
pub fn resolvent_convergence_report<T: Scalar>(
    ops: &[(T, DiscreteOperator<T>)],
    op0: &DiscreteOperator<T>,
    probes: &[StateVec<T>],
) -> Result<Vec<ResolventRow<T>>> {
    let n0 = op0.mesh().n_interior();
    let limits = probes
        .iter()
        .map(|p| op0.resolvent_apply(T::zero(), p))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(ops.len());
    for (eps, op) in ops {
        if op.mesh().n_interior() != n0 {
            return Err(Error::MeshMismatch(op.mesh().n_interior(), n0));
        }
        let mut worst = T::zero();
        for (p, l) in probes.iter().zip(&limits) {
            worst = worst.max(op.resolvent_apply(T::zero(), p)?.sub(l).norm());
        }
        rows.push(ResolventRow {
            epsilon: *eps,
            distance: worst,
        });
    }
    rows.sort_by(|a, b| b.epsilon.partial_cmp(&a.epsilon).expect("finite epsilons"));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sinusoidal() -> PeriodicCoefficient1D<f64> {
        PeriodicCoefficient1D::new(CellPreset::Sinusoidal {
            mean: 2.0,
            amplitude: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn harmonic_mean_closed_forms() {
        assert!((homogenized_coefficient_1d(&sinusoidal()) - 3.0_f64.sqrt()).abs() < 1e-8);
        let inv = PeriodicCoefficient1D::<f64>::new(CellPreset::InverseSinusoidal {
            mean: 1.0,
            amplitude: 0.5,
        })
        .unwrap();
        assert!((homogenized_coefficient_1d(&inv) - 1.0).abs() < 1e-8);
        let c = PeriodicCoefficient1D::<f64>::new(CellPreset::Constant { value: 2.5 }).unwrap();
        assert_eq!(homogenized_coefficient_1d(&c), 2.5);
        let tp = PeriodicCoefficient1D::<f64>::new(CellPreset::TwoPhase {
            low: 1.0,
            high: 4.0,
            fraction: 0.5,
        })
        .unwrap();
        assert!((homogenized_coefficient_1d(&tp) - 1.6).abs() < 1e-14);
        assert!(!tp.is_smooth());
    }

    #[test]
    fn harmonic_mean_bracketing() {
        for base in [
            sinusoidal(),
            PeriodicCoefficient1D::new(CellPreset::TwoPhase {
                low: 0.5,
                high: 3.0,
                fraction: 0.3,
            })
            .unwrap(),
        ] {
            let a0 = homogenized_coefficient_1d(&base);
            assert!(a0 > base.bounds().0);
            assert!(a0 < base.arithmetic_mean());
        }
    }

    #[test]
    fn preset_validation() {
        assert!(PeriodicCoefficient1D::<f64>::new(CellPreset::Sinusoidal {
            mean: 1.0,
            amplitude: 1.0
        })
        .is_err());
        assert!(PeriodicCoefficient1D::<f64>::new(CellPreset::Constant { value: -1.0 }).is_err());
        assert!(PeriodicCoefficient1D::<f64>::new(CellPreset::TwoPhase {
            low: 1.0,
            high: 2.0,
            fraction: 1.0
        })
        .is_err());
    }

    #[test]
    fn oscillating_samples() {
        let mesh = Mesh1D::<f64>::new(5).unwrap();
        let f = oscillating_coefficient(&sinusoidal(), 1.0, &mesh).unwrap();
        // edge 1 sits at x = 1/4
        assert!((f.values()[1] - 3.0).abs() < 1e-14);
        let c = PeriodicCoefficient1D::<f64>::new(CellPreset::Constant { value: 1.5 }).unwrap();
        let fc = oscillating_coefficient(&c, 0.37, &mesh).unwrap();
        assert!(fc.values().iter().all(|&v| v == 1.5));
        assert!(oscillating_coefficient(&c, 0.0, &mesh).is_err());
    }

    #[test]
    fn subgrid_epsilon_warns() {
        let mesh = Mesh1D::<f64>::new(63).unwrap();
        let f = oscillating_coefficient(&sinusoidal(), 0.01, &mesh).unwrap();
        assert_eq!(f.warnings.len(), 1);
        let ok = oscillating_coefficient(&sinusoidal(), 0.25, &mesh).unwrap();
        assert!(ok.warnings.is_empty());
    }

    #[test]
    fn reaction_family_distances() {
        let mesh = Mesh1D::<f64>::new(63).unwrap();
        let p = ReactionPreset {
            base: 1.0,
            amplitude: 1.0,
            wavenumber: 1,
        };
        let eps = [0.5, 0.25, 0.125];
        let fam = reaction_family(&p, &eps, &mesh).unwrap();
        // sin(pi x) peaks at the mesh node x = 1/2
        for (d, e) in fam.distances.iter().zip(eps) {
            assert!((d - e).abs() < 1e-14);
        }
        let flat = ReactionPreset {
            base: 1.0,
            amplitude: 0.0,
            wavenumber: 1,
        };
        let fam = reaction_family(&flat, &eps, &mesh).unwrap();
        assert!(fam.distances.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn reaction_bound_names_epsilon() {
        let mesh = Mesh1D::<f64>::new(63).unwrap();
        let l1 = mesh.laplacian_lambda1();
        let ok = ReactionPreset {
            base: l1 - 0.1,
            amplitude: 0.0,
            wavenumber: 1,
        };
        assert!(reaction_family(&ok, &[0.5], &mesh).is_ok());
        let over = ReactionPreset {
            base: l1 - 0.1,
            amplitude: 1.0,
            wavenumber: 1,
        };
        match reaction_family(&over, &[0.5, 0.05], &mesh) {
            Err(Error::InvalidEpsilon { epsilon, .. }) => assert_eq!(epsilon, 0.5),
            other => panic!("{other:?}"),
        }
        let limit_over = ReactionPreset {
            base: l1 + 0.1,
            amplitude: 0.0,
            wavenumber: 1,
        };
        assert!(matches!(
            reaction_family(&limit_over, &[0.5], &mesh),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn smallest_eigenvalue_bracketed_by_ellipticity() {
        let mesh = Mesh1D::<f64>::new(255).unwrap();
        let base = sinusoidal();
        let f = oscillating_coefficient(&base, 1.0 / 16.0, &mesh).unwrap();
        let op = DiscreteOperator::assemble(&f, &mesh, Some(4)).unwrap();
        let lap1 = mesh.laplacian_lambda1();
        assert!(op.lambda1() >= 1.0 * lap1 && op.lambda1() <= 3.0 * lap1);
        // direct Rayleigh evaluation on the first discrete sine
        let s1 = StateVec::new(&mesh, mesh.sine_mode(1)).unwrap();
        let rq = op.rayleigh(&s1);
        assert!(rq >= op.lambda1() && rq >= lap1 && rq <= 3.0 * lap1);
    }

    #[test]
    fn rayleigh_ratio_against_homogenized_operator() {
        let mesh = Mesh1D::<f64>::new(127).unwrap();
        let base = sinusoidal();
        let a0 = homogenized_coefficient_1d(&base);
        let op0 = DiscreteOperator::assemble(
            &CoefficientField::constant_diffusion(a0, &mesh).unwrap(),
            &mesh,
            None,
        )
        .unwrap();
        let (lo, hi) = base.bounds();
        for eps in [0.25, 0.125, 1.0 / 32.0] {
            let f = oscillating_coefficient(&base, eps, &mesh).unwrap();
            let op = DiscreteOperator::assemble(&f, &mesh, Some(1)).unwrap();
            for k in 0..op0.n_modes() {
                let v = op0.mode(k);
                let ratio = op.rayleigh(&v) / op0.rayleigh(&v);
                assert!(ratio >= lo / a0 - 1e-12 && ratio <= hi / a0 + 1e-12);
            }
        }
    }

    #[test]
    fn resolvent_report_identities() {
        let mesh = Mesh1D::<f64>::new(31).unwrap();
        let f = CoefficientField::constant_diffusion(2.0, &mesh).unwrap();
        let op0 = DiscreteOperator::assemble(&f, &mesh, None).unwrap();
        let ops = vec![(0.5, op0.clone()), (0.25, op0.clone())];
        let probe = StateVec::from_fn(&mesh, |x| (std::f64::consts::PI * x).sin());
        let rows = resolvent_convergence_report(&ops, &op0, &[probe]).unwrap();
        assert!(rows.iter().all(|r| r.distance == 0.0));
        let rows = resolvent_convergence_report(&ops, &op0, &[StateVec::zeros(&mesh)]).unwrap();
        assert!(rows.iter().all(|r| r.distance == 0.0));
        let other = DiscreteOperator::assemble(
            &CoefficientField::constant_diffusion(2.0, &Mesh1D::new(15).unwrap()).unwrap(),
            &Mesh1D::new(15).unwrap(),
            None,
        )
        .unwrap();
        assert!(resolvent_convergence_report(&[(0.1, other)], &op0, &[]).is_err());
    }

    #[test]
    fn oscillating_family_resolvent_decreases() {
        let mesh = Mesh1D::<f64>::new(255).unwrap();
        let fam = EpsilonFamily::new(
            &FamilySpec::Diffusion {
                coefficient: CellPreset::Sinusoidal {
                    mean: 2.0,
                    amplitude: 1.0,
                },
            },
            vec![0.25, 0.125, 0.0625],
        )
        .unwrap();
        let ops = fam.operators(&mesh, None).unwrap();
        let op0 = DiscreteOperator::assemble(&fam.limit_field(&mesh).unwrap(), &mesh, None).unwrap();
        let probe = StateVec::from_fn(&mesh, |x| (std::f64::consts::PI * x).sin());
        let rows = resolvent_convergence_report(&ops, &op0, &[probe]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].distance < w[0].distance));
        // first-order in epsilon: each halving of epsilon roughly halves the distance
        for w in rows.windows(2) {
            let ratio = w[1].distance / w[0].distance;
            assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn family_rejects_bad_sequences() {
        let spec = FamilySpec::Diffusion {
            coefficient: CellPreset::Constant { value: 1.0 },
        };
        assert!(EpsilonFamily::<f64>::new(&spec, vec![0.1, 0.2]).is_err());
        assert!(EpsilonFamily::<f64>::new(&spec, vec![]).is_err());
        let fam = EpsilonFamily::<f64>::new(&spec, vec![0.25, 0.01]).unwrap();
        assert!(fam.validate_on(&Mesh1D::new(63).unwrap()).is_err());
    }
}
