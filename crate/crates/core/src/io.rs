//! File formats: instance JSON, assignment and solve-result JSON, and the
//! scenario comparison report.
//!
//! A report directory holds `results.json` (full breakdowns and assignments),
//! `summary.csv` (per-passenger metrics, one row per scenario), one
//! `<name>.json` per run, and `timing.csv`. Wall-clock times live only in
//! `timing.csv`, so every other file is reproducible byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    total_passengers, Assignment, Flight, Gate, GlobalParams, Instance, PassengerTotals,
    ScenarioWeights, TransferMatrix,
};
use crate::objectives::ObjectiveBreakdown;
use crate::tabu::SolveResult;

pub const SUMMARY_HEADER: [&str; 9] = [
    "scenario",
    "w_pax",
    "w_taxi",
    "w_robust",
    "transit_per_pax",
    "taxi_per_pax",
    "conflict_per_pax",
    "composite",
    "iterations",
];

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    params: GlobalParams,
    gates: Vec<Gate>,
    gate_dist: Vec<Vec<f64>>,
    flights: Vec<Flight>,
    transfers: TransferMatrix,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, e: serde_json::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Reads and validates an instance file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let f: InstanceFile = read_json(path)?;
    Instance::validated(f.gates, f.gate_dist, f.flights, f.transfers, f.params)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let f = InstanceFile {
        params: *inst.params(),
        gates: inst.gates().to_vec(),
        gate_dist: inst.gate_dist().to_vec(),
        flights: inst.flights().to_vec(),
        transfers: inst.transfers().clone(),
    };
    write_json(&f, path.as_ref())
}

/// One solved (or evaluated) scenario, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub name: String,
    pub weights: ScenarioWeights,
    /// Tabu seed used for this run; absent for evaluated baselines.
    pub seed: Option<u64>,
    pub result: SolveResult,
}

pub fn save_run(run: &ScenarioRun, path: impl AsRef<Path>) -> Result<()> {
    write_json(run, path.as_ref())
}

pub fn load_run(path: impl AsRef<Path>) -> Result<ScenarioRun> {
    read_json(path.as_ref())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AssignmentFile {
    Bare(Assignment),
    Run(ScenarioRun),
    Vector(Vec<usize>),
}

/// Reads an assignment from a bare `{"gate_of": [...]}` object, a plain gate
/// array, or a saved run, and checks that it fits `inst`.
pub fn load_assignment(path: impl AsRef<Path>, inst: &Instance) -> Result<Assignment> {
    let path = path.as_ref();
    let asg = match read_json::<AssignmentFile>(path)? {
        AssignmentFile::Bare(a) => a,
        AssignmentFile::Run(r) => r.result.assignment,
        AssignmentFile::Vector(v) => Assignment::new(v),
    };
    if asg.len() != inst.n_flights() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!(
                "assignment covers {} flights, instance has {}",
                asg.len(),
                inst.n_flights()
            ),
        });
    }
    if let Some((f, &g)) = asg.as_slice().iter().enumerate().find(|(_, &g)| g >= inst.n_gates()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("flight {f} assigned to unknown gate {g}"),
        });
    }
    Ok(asg)
}

/// Objectives divided by passenger totals, in minutes per passenger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerPassenger {
    /// Transit time over all walking passengers.
    pub transit: f64,
    /// Taxi time over arrival plus departure passengers.
    pub taxi: f64,
    /// Expected gate-conflict time over arrival passengers.
    pub conflict: f64,
}

fn ratio(x: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        x / n as f64
    }
}

pub fn per_passenger(b: &ObjectiveBreakdown, totals: &PassengerTotals) -> PerPassenger {
    PerPassenger {
        transit: ratio(b.pax, totals.transit),
        taxi: ratio(b.taxi, totals.movement),
        conflict: ratio(b.robust, totals.arrival),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(flatten)]
    pub run: ScenarioRun,
    pub per_passenger: PerPassenger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub denominators: PassengerTotals,
    pub rows: Vec<ReportRow>,
}

pub fn build_report(runs: &[ScenarioRun], inst: &Instance) -> Report {
    let denominators = total_passengers(inst);
    let rows = runs
        .iter()
        .map(|run| ReportRow {
            run: run.clone(),
            per_passenger: per_passenger(&run.result.breakdown, &denominators),
        })
        .collect();
    Report { denominators, rows }
}

pub fn load_report(path: impl AsRef<Path>) -> Result<Report> {
    read_json(path.as_ref())
}

/// Paths written by [`write_report`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub timing: PathBuf,
    pub runs: Vec<PathBuf>,
}

/// Writes the report files for `runs` into directory `dir`, creating it if
/// needed.
pub fn write_report(runs: &[ScenarioRun], inst: &Instance, dir: impl AsRef<Path>) -> Result<ReportFiles> {
    let dir = dir.as_ref();
    if runs.is_empty() {
        return Err(Error::InvalidParams("report needs at least one scenario".into()));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let report = build_report(runs, inst);

    let results = dir.join("results.json");
    write_json(&report, &results)?;

    let summary = dir.join("summary.csv");
    write_summary(&report, &summary)?;

    let timing = dir.join("timing.csv");
    let mut wtr = csv::Writer::from_path(&timing)?;
    wtr.write_record(["scenario", "wall_time_s"])?;
    for run in runs {
        wtr.write_record([run.name.clone(), format!("{:.6}", run.result.wall_time)])?;
    }
    wtr.flush().map_err(io_err(&timing))?;

    let mut run_paths = Vec::with_capacity(runs.len());
    for run in runs {
        let p = dir.join(format!("{}.json", run.name));
        save_run(run, &p)?;
        run_paths.push(p);
    }

    Ok(ReportFiles {
        results,
        summary,
        timing,
        runs: run_paths,
    })
}

fn write_summary(report: &Report, path: &Path) -> Result<()> {
    let d = &report.denominators;
    let mut out = format!(
        "# transit_per_pax = pax / {} walking passengers; taxi_per_pax = taxi / {} arrival+departure passengers; conflict_per_pax = robust / {} arrival passengers\n",
        d.transit, d.movement, d.arrival
    );
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(SUMMARY_HEADER)?;
    for row in &report.rows {
        let w = &row.run.weights;
        let pp = &row.per_passenger;
        wtr.write_record([
            row.run.name.clone(),
            w.w_pax.to_string(),
            w.w_taxi.to_string(),
            w.w_robust.to_string(),
            pp.transit.to_string(),
            pp.taxi.to_string(),
            pp.conflict.to_string(),
            row.run.result.breakdown.composite.to_string(),
            row.run.result.iterations.to_string(),
        ])?;
    }
    let body = wtr.into_inner().expect("in-memory writer");
    out.push_str(std::str::from_utf8(&body).expect("utf-8 csv"));
    fs::write(path, out).map_err(io_err(path))
}

/// Reads `summary.csv` back as `(header, rows)`, skipping the comment line.
pub fn read_summary(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path.as_ref())?;
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}
