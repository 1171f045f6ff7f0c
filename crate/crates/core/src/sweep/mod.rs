//! Epsilon sweeps: time-optimal solves across a coefficient family compared
//! against the homogenized (limit) problem.

mod config;
mod distance;
mod report;
mod run;

pub use config::SweepConfig;
pub use distance::control_distance;
pub use report::{emit_report, load_report, ReportPaths, CSV_HEADER};
pub use run::{run_sweep, Baseline, Slopes, SweepRecord, SweepReport, REPORT_SCHEMA};

/// Serializes non-finite values as `null` and reads `null` back as NaN, so
/// failed solves survive a JSON round trip.
mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::Scalar;

    pub fn serialize<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            v.serialize(s)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        Ok(Option::<T>::deserialize(d)?.unwrap_or_else(T::nan))
    }
}
