use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::run::{SweepReport, REPORT_SCHEMA};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CSV_HEADER: [&str; 8] = [
    "epsilon",
    "tau_star",
    "tau_err",
    "ctrl_l2",
    "ctrl_linf_trunc",
    "semigroup_dist",
    "resolvent_dist",
    "converged",
];

#[derive(Clone, Debug)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plotdata: PathBuf,
}

/// Writes `sweep.csv`, `sweep.json` and `plotdata/` under `dir`.
pub fn emit_report<T: Scalar>(report: &SweepReport<T>, dir: &Path) -> Result<ReportPaths> {
    let plotdata = dir.join("plotdata");
    fs::create_dir_all(&plotdata).map_err(|e| Error::io(&plotdata, e))?;
    let paths = ReportPaths {
        csv: dir.join("sweep.csv"),
        json: dir.join("sweep.json"),
        plotdata,
    };

    let mut csv = csv::Writer::from_path(&paths.csv).map_err(|e| csv_error(&paths.csv, e))?;
    csv.write_record(CSV_HEADER)
        .map_err(|e| csv_error(&paths.csv, e))?;
    for r in &report.records {
        let row = [
            r.epsilon,
            r.tau_star,
            r.tau_err,
            r.ctrl_l2,
            r.ctrl_linf_trunc,
            r.semigroup_dist,
            r.resolvent_dist,
        ]
        .iter()
        .map(|v| sig17(*v))
        .chain(std::iter::once(r.converged.to_string()))
        .collect::<Vec<_>>();
        csv.write_record(&row).map_err(|e| csv_error(&paths.csv, e))?;
    }
    csv.flush().map_err(|e| Error::io(&paths.csv, e))?;

    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&paths.json, json).map_err(|e| Error::io(&paths.json, e))?;

    write_columns(
        &paths.plotdata.join("tau_vs_epsilon.dat"),
        &report.config_hash,
        &["epsilon", "tau_star", "tau_star_0"],
        report
            .records
            .iter()
            .map(|r| vec![r.epsilon, r.tau_star, report.baseline.tau_star]),
    )?;
    write_columns(
        &paths.plotdata.join("distances_vs_epsilon_log10.dat"),
        &report.config_hash,
        &[
            "log10_epsilon",
            "log10_tau_err",
            "log10_ctrl_l2",
            "log10_ctrl_linf_trunc",
            "log10_semigroup_dist",
            "log10_resolvent_dist",
        ],
        report.records.iter().map(|r| {
            [
                r.epsilon,
                r.tau_err,
                r.ctrl_l2,
                r.ctrl_linf_trunc,
                r.semigroup_dist,
                r.resolvent_dist,
            ]
            .iter()
            .map(|v| v.log10())
            .collect()
        }),
    )?;
    Ok(paths)
}

/// Reads a `sweep.json` written by [`emit_report`].
pub fn load_report<T: Scalar>(path: &Path) -> Result<SweepReport<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: SweepReport<T> = serde_json::from_str(&text)?;
    if report.schema != REPORT_SCHEMA {
        return Err(Error::InvalidParameter(format!(
            "{}: unsupported report schema {}",
            path.display(),
            report.schema
        )));
    }
    Ok(report)
}

fn sig17<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::InvalidParameter(format!("{}: {kind:?}", path.display())),
    }
}

fn write_columns<T: Scalar>(
    path: &Path,
    hash: &str,
    names: &[&str],
    rows: impl Iterator<Item = Vec<T>>,
) -> Result<()> {
    let mut out = format!("# config_hash {hash}\n# {}\n", names.join(" "));
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(sig17).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
