//! Machine-readable outputs: time-series CSVs, `meta.json`, field dumps.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::harness::{decay_report, DampingComparison};
use crate::solver::{RunConfig, Trajectory};
use crate::toy::ToyTrajectory;

/// Column order of `timeseries.csv`.
pub const TIMESERIES_COLUMNS: [&str; 10] = [
    "t",
    "x_norm",
    "y_norm",
    "z_norm",
    "scaled_x_norm",
    "bootstrap_lhs",
    "rhs_H",
    "rhs_C",
    "cancel_residual",
    "lambda_residual",
];

pub const TOY_COLUMNS: [&str; 4] = ["t", "triple_norm", "energy", "max_h"];

pub const COMPARISON_COLUMNS: [&str; 3] = ["t", "l2_ratio", "x_ratio"];

/// Deliberate departures of the discrete model from the half-plane problem.
pub const DEVIATIONS: [&str; 5] = [
    "x periodic with period 2*pi instead of the whole line",
    "y truncated at Ymax with u = 0 imposed there",
    "far-field Neumann condition on f imposed at Ymax by a one-sided closure",
    "quadratic products dealiased with the 2/3 rule",
    "toy model posed on the strip with homogeneous Dirichlet conditions at both ends",
];

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| LabError::Config {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| LabError::Config {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

fn csv_err(path: &Path, e: csv::Error) -> LabError {
    LabError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small or large magnitudes.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e6).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Write a header and rows of floats in round-trip formatting.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r.iter().map(|v| format_f64(*v))).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn timeseries_rows(traj: &Trajectory) -> Vec<Vec<f64>> {
    let m = &traj.monitor;
    traj.samples
        .iter()
        .zip(&traj.residuals)
        .map(|(s, r)| {
            let n = &s.norms;
            vec![
                n.t,
                n.x_norm,
                n.y_norm,
                n.z_norm,
                (0.25 * n.t).exp() * n.x_norm,
                n.bootstrap_lhs,
                m.rhs_h,
                m.rhs_c,
                r.u_relation,
                r.lambda_relation,
            ]
        })
        .collect()
}

pub fn write_timeseries(path: &Path, traj: &Trajectory) -> Result<()> {
    write_table(path, &TIMESERIES_COLUMNS, timeseries_rows(traj))
}

#[derive(Serialize)]
struct RunMeta<'a> {
    config: &'a RunConfig,
    deviations: &'a [&'a str],
    status: String,
    samples: usize,
    decay: crate::harness::DecayReport,
    first_violation_h: Option<f64>,
    first_violation_c: Option<f64>,
    /// max over samples of the |k| = K coefficient magnitude of u
    edge_mode_amplitude: f64,
}

/// Write `timeseries.csv`, `meta.json` and (if configured) field dumps into `dir`.
pub fn write_run(dir: &Path, traj: &Trajectory, status: &str) -> Result<()> {
    ensure_dir(dir)?;
    write_timeseries(&dir.join("timeseries.csv"), traj)?;
    let cfg = &traj.config;
    let meta = RunMeta {
        config: cfg,
        deviations: &DEVIATIONS,
        status: status.to_string(),
        samples: traj.samples.len(),
        decay: decay_report(&traj.norms(), &cfg.params),
        first_violation_h: traj.monitor.first_violation_h(),
        first_violation_c: traj.monitor.first_violation_c(),
        edge_mode_amplitude: traj
            .samples
            .iter()
            .map(|s| s.state.u.edge_mode_amplitude())
            .fold(0.0, f64::max),
    };
    write_json(&dir.join("meta.json"), &meta)?;
    if cfg.dump_fields {
        write_dumps(&dir.join("fields"), traj)?;
    }
    Ok(())
}

/// Dumps of u, f, 𝒰 and λ at every sample: `<dir>/<name>_<index>.{json,bin}`.
pub fn write_dumps(dir: &Path, traj: &Trajectory) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut stems = vec![];
    for (i, s) in traj.samples.iter().enumerate() {
        for (name, field) in [
            ("u", &s.state.u),
            ("f", &s.aux.f),
            ("aux_u", &s.aux.aux_u),
            ("lambda", &s.aux.lambda),
        ] {
            let stem = dir.join(format!("{name}_{i:05}"));
            field.write_dump(&stem, name, s.state.t)?;
            stems.push(stem);
        }
    }
    Ok(stems)
}

pub fn write_toy(dir: &Path, traj: &ToyTrajectory) -> Result<()> {
    ensure_dir(dir)?;
    write_table(
        &dir.join("timeseries.csv"),
        &TOY_COLUMNS,
        traj.rows.iter().map(|r| vec![r.t, r.triple_norm, r.energy, r.max_h]),
    )?;
    write_json(
        &dir.join("meta.json"),
        &serde_json::json!({ "config": traj.config, "deviations": DEVIATIONS }),
    )
}

pub fn write_comparison(dir: &Path, cfg: &RunConfig, cmp: &DampingComparison) -> Result<()> {
    ensure_dir(dir)?;
    write_table(
        &dir.join("comparison.csv"),
        &COMPARISON_COLUMNS,
        cmp.series.iter().map(|p| vec![p.t, p.l2_ratio, p.x_ratio]),
    )?;
    write_json(
        &dir.join("meta.json"),
        &serde_json::json!({ "config": cfg, "deviations": DEVIATIONS, "comparison": cmp }),
    )
}
