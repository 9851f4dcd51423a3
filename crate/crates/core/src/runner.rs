//! Runs a configuration and writes its artifacts:
//!
//! - `snapshots.csv`: one row per node and output time. Full 1D runs use the
//!   columns `t,x,u,v,theta,strain,stress` (strain and stress averaged from
//!   the cell midpoints to the nodes); slab runs use `t,x,U1,U2,V1,V2,ThetaPrime`.
//! - `diagnostics.csv`: one row per output time.
//! - `slices.csv`: slab runs with `slab.reconstruct` only; `t,x,Y,u1,u2,theta`.
//! - `config_resolved.txt`: the resolved configuration, loadable as-is.
//! - `summary.txt`: status, drift and per-cell phase labels. The labels are
//!   recomputed from `snapshots.csv` (cell strain from the `x` and `u`
//!   columns), so anyone can reproduce them offline.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Read};
use std::path::Path;

use crate::config::{PhaseThresholds, SimConfig};
use crate::error::Error;
use crate::slab::{reconstruct_fields, slab_simulate, THETA_REF};
use crate::solver1d::{midpoints_to_nodes, simulate};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] Error),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Outcome of a run whose setup was valid.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// Set when the integration aborted; the artifacts hold the partial run.
    pub failure: Option<Error>,
    pub snapshots: usize,
    pub steps: usize,
    /// Largest `|E(t) - E(0)| / |E(0)|` over the output times (full 1D only).
    pub max_energy_drift: Option<f64>,
}

/// Phase label of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Austenite,
    MartensitePlus,
    MartensiteMinus,
}

impl Phase {
    pub fn classify(eps: f64, thresholds: &PhaseThresholds) -> Self {
        if eps >= thresholds.austenite {
            Phase::MartensitePlus
        } else if eps <= -thresholds.austenite {
            Phase::MartensiteMinus
        } else {
            Phase::Austenite
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Phase::Austenite => 'A',
            Phase::MartensitePlus => '+',
            Phase::MartensiteMinus => '-',
        }
    }

    fn name(self) -> &'static str {
        match self {
            Phase::Austenite => "A",
            Phase::MartensitePlus => "M+",
            Phase::MartensiteMinus => "M-",
        }
    }
}

/// Per-snapshot cell strains recovered from a full 1D `snapshots.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainRecord {
    pub t: f64,
    pub strain: Vec<f64>,
}

/// Reads `snapshots.csv` and differences `u` across each cell.
pub fn cell_strains_from_csv(reader: impl Read) -> Result<Vec<StrainRecord>, csv::Error> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out: Vec<StrainRecord> = Vec::new();
    let mut last: Option<(f64, f64, f64)> = None;
    for row in rdr.deserialize::<(f64, f64, f64, f64, f64, f64, f64)>() {
        let (t, x, u, ..) = row?;
        match last {
            Some((lt, lx, lu)) if lt == t => {
                out.last_mut().expect("record started").strain.push((u - lu) / (x - lx));
            }
            _ => out.push(StrainRecord { t, strain: Vec::new() }),
        }
        last = Some((t, x, u));
    }
    Ok(out)
}

/// Compact description of a label sequence, e.g. `M+ A M-` for runs of
/// identical labels.
pub fn phase_pattern(labels: &[Phase]) -> String {
    let mut runs: Vec<&str> = Vec::new();
    for w in labels.iter().enumerate() {
        if w.0 == 0 || labels[w.0 - 1] != *w.1 {
            runs.push(w.1.name());
        }
    }
    runs.join(" ")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, RunError> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

/// Runs `config`, writing every artifact into `out_dir` (created if needed).
///
/// Invalid setups return [`RunError::Config`] before anything is written.
/// An abort during integration still writes the partial artifacts and is
/// reported through [`RunReport::failure`].
pub fn run(config: &SimConfig, out_dir: &Path) -> Result<RunReport, RunError> {
    std::fs::create_dir_all(out_dir)?;
    let report = match config {
        SimConfig::Full1d(c) => {
            let setup = c.build()?;
            let traj = simulate(&setup.model, &setup.initial, &setup.settings)?;
            let grid = setup.model.grid;
            let mut w = csv_writer(&out_dir.join("snapshots.csv"))?;
            w.write_record(["t", "x", "u", "v", "theta", "strain", "stress"])?;
            for snap in &traj.snapshots {
                let st = &snap.state;
                let strain = midpoints_to_nodes(&st.strain(&grid));
                let stress = midpoints_to_nodes(&st.s);
                for (i, x) in grid.nodes().enumerate() {
                    w.serialize((snap.t, x, st.u[i], st.v[i], st.theta[i], strain[i], stress[i]))?;
                }
            }
            w.flush()?;
            let mut w = csv_writer(&out_dir.join("diagnostics.csv"))?;
            w.write_record(["t", "total_energy", "max_abs_strain", "min_theta", "max_theta"])?;
            for d in &traj.diagnostics {
                w.serialize((d.t, d.total_energy, d.max_abs_strain, d.min_theta, d.max_theta))?;
            }
            w.flush()?;
            let e0 = traj.diagnostics[0].total_energy;
            let drift = traj
                .diagnostics
                .iter()
                .map(|d| ((d.total_energy - e0) / e0).abs())
                .fold(0.0, f64::max);
            RunReport {
                failure: traj.failure,
                snapshots: traj.snapshots.len(),
                steps: traj.steps,
                max_energy_drift: Some(drift),
            }
        }
        SimConfig::Slab(c) => {
            let setup = c.build()?;
            let time = &c.time;
            let traj = slab_simulate(
                &setup.params,
                &setup.domain,
                &setup.initial,
                time.dt,
                time.t_end,
                time.output_interval,
            )?;
            let dom = setup.domain;
            let mut w = csv_writer(&out_dir.join("snapshots.csv"))?;
            w.write_record(["t", "x", "U1", "U2", "V1", "V2", "ThetaPrime"])?;
            for snap in &traj.snapshots {
                let st = &snap.state;
                for (i, x) in dom.nodes().enumerate() {
                    w.serialize((snap.t, x, st.u1[i], st.u2[i], st.v1[i], st.v2[i], st.theta[i]))?;
                }
            }
            w.flush()?;
            let mut w = csv_writer(&out_dir.join("diagnostics.csv"))?;
            w.write_record(["t", "max_abs_strain", "min_theta", "max_theta"])?;
            let dx = dom.dx();
            for snap in &traj.snapshots {
                let st = &snap.state;
                let n = st.u1.len();
                let max_strain = (0..n - 1)
                    .map(|i| ((st.u1[i + 1] - st.u1[i]) / dx).abs())
                    .fold(0.0, f64::max);
                let lo = st.theta.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = st.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                w.serialize((snap.t, max_strain, THETA_REF + lo, THETA_REF + hi))?;
            }
            w.flush()?;
            if !c.slab.reconstruct.is_empty() {
                let mut w = csv_writer(&out_dir.join("slices.csv"))?;
                w.write_record(["t", "x", "Y", "u1", "u2", "theta"])?;
                for snap in &traj.snapshots {
                    for &y in &c.slab.reconstruct {
                        let s = reconstruct_fields(&setup.params, &dom, &snap.state, y)?;
                        for (i, x) in dom.nodes().enumerate() {
                            w.serialize((snap.t, x, y, s.u1[i], s.u2[i], s.theta[i]))?;
                        }
                    }
                }
                w.flush()?;
            }
            RunReport {
                failure: traj.failure,
                snapshots: traj.snapshots.len(),
                steps: traj.steps,
                max_energy_drift: None,
            }
        }
    };
    std::fs::write(out_dir.join("config_resolved.txt"), config.to_toml())?;
    std::fs::write(out_dir.join("summary.txt"), summary_text(config, &report, out_dir)?)?;
    Ok(report)
}

fn summary_text(config: &SimConfig, report: &RunReport, out_dir: &Path) -> Result<String, RunError> {
    let mut s = String::new();
    let status = match &report.failure {
        None => "completed".to_string(),
        Some(e) => format!("ABORTED (partial output): {e}"),
    };
    let model = match config {
        SimConfig::Full1d(_) => "full_1d",
        SimConfig::Slab(_) => "slab",
    };
    writeln!(s, "status: {status}").unwrap();
    writeln!(s, "model: {model}").unwrap();
    writeln!(s, "integrator: {}", config.time().integrator.name()).unwrap();
    writeln!(s, "steps: {}", report.steps).unwrap();
    writeln!(s, "snapshots: {}", report.snapshots).unwrap();
    if let Some(drift) = report.max_energy_drift {
        writeln!(s, "max_relative_energy_drift: {drift:e}").unwrap();
    }
    if let SimConfig::Full1d(c) = config {
        let th = &c.phase;
        writeln!(
            s,
            "phase labels per cell: A if |eps| < {a}, + (M+) if eps >= {a}, - (M-) if eps <= -{a}; \
             well-formed martensite cells have |eps| >= {m}",
            a = th.austenite,
            m = th.martensite
        )
        .unwrap();
        writeln!(s, "t, max_abs_strain, martensite_cells, pattern, labels").unwrap();
        let records = cell_strains_from_csv(File::open(out_dir.join("snapshots.csv"))?)?;
        for r in records {
            let labels: Vec<Phase> = r.strain.iter().map(|e| Phase::classify(*e, th)).collect();
            let max = r.strain.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            let formed = r.strain.iter().filter(|e| e.abs() >= th.martensite).count();
            let symbols: String = labels.iter().map(|l| l.symbol()).collect();
            writeln!(s, "{:e}, {max:e}, {formed}, {}, {symbols}", r.t, phase_pattern(&labels)).unwrap();
        }
    }
    Ok(s)
}
