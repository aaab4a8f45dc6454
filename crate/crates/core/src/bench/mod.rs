//! Benchmark harness: seeded multi-trial runs, time-to-target against a
//! Goemans–Williamson reference, summary tables and scaling fits.

mod instance;
mod scaling;
mod solver;

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{normalized_score, Graph};
use crate::rng::{derive_seed, label_hash};
use crate::sdp::{gw_run, solve_relaxation, GwConfig};
use crate::trace::{average_traces, linear_grid, steps_to_target, time_to_target, write_averaged_csv, RunTrace, TimeBase};

pub use instance::load_instance;
pub use scaling::{loglog_fit, scaling_report, write_scaling_csv, ScalingFit, ScalingPoint, ScalingReport, ScalingSpec};
pub use solver::{solve_once, SolverEntry, SolverSpec};

/// Simulated wall time of `round_trips` cavity round trips.
pub fn cim_clock_time(round_trips: u64, roundtrip_seconds: f64) -> f64 {
    round_trips as f64 * roundtrip_seconds
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetRule {
    /// Energy of the best-of-N hyperplane cut.
    #[default]
    Gw,
    Energy {
        value: f64,
    },
    /// Fixed budget, no target.
    None,
}

impl std::str::FromStr for TargetRule {
    type Err = Error;

    /// `gw`, `none` or `energy=E`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gw" => Ok(TargetRule::Gw),
            "none" => Ok(TargetRule::None),
            _ => s
                .strip_prefix("energy=")
                .and_then(|v| v.parse().ok())
                .map(|value| TargetRule::Energy { value })
                .ok_or_else(|| Error::InvalidParam(format!("bad target {s:?}; use gw, none or energy=E"))),
        }
    }
}

fn default_trials() -> usize {
    1
}

fn default_plot_points() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    /// File path or generator expression, see [`load_instance`].
    pub instance: String,
    pub solvers: Vec<SolverEntry>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub target: TargetRule,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Reference relaxation value for normalisation. When absent the
    /// harness solves the relaxation itself.
    #[serde(default)]
    pub u_sdp: Option<f64>,
    #[serde(default)]
    pub gw: GwConfig,
    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default = "default_plot_points")]
    pub plot_points: usize,
}

impl BenchmarkSpec {
    pub fn new(instance: impl Into<String>, solvers: Vec<SolverEntry>, trials: usize) -> Self {
        BenchmarkSpec {
            instance: instance.into(),
            solvers,
            trials,
            target: TargetRule::Gw,
            master_seed: 0,
            workers: None,
            u_sdp: None,
            gw: GwConfig::default(),
            out_dir: None,
            plot_points: default_plot_points(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParam(format!("benchmark spec: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParam("trials must be >= 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidParam("no solvers listed".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParam("workers must be >= 1".into()));
        }
        let mut labels: Vec<&str> = self.solvers.iter().map(|s| s.label()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam("solver labels must be unique".into()));
        }
        Ok(())
    }

    /// Seed of trial `trial` of solver `label`.
    pub fn trial_seed(&self, label: &str, trial: usize) -> u64 {
        derive_seed(self.master_seed, &[label_hash(label), trial as u64])
    }
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trace: RunTrace,
    pub best_cut: f64,
    pub best_energy: f64,
    pub steps_to_target: Option<u64>,
    /// In the trace's own time base.
    pub time_to_target: Option<f64>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub solver: String,
    pub trial: usize,
    pub seed: u64,
    pub result: std::result::Result<TrialRecord, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub solver: String,
    pub trials: usize,
    pub failures: usize,
    pub best_cut: f64,
    pub mean_cut: f64,
    pub u_sdp: f64,
    pub e_neg: f64,
    pub normalized_best: f64,
    pub normalized_mean: f64,
    pub target_energy: Option<f64>,
    pub success_count: usize,
    pub mean_steps_to_target: Option<f64>,
    /// Only filled for simulated clocks; wall-clock times live in the
    /// timings table.
    pub mean_time_to_target: Option<f64>,
    pub time_base: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceInfo {
    pub n: usize,
    pub m: usize,
    pub total_weight: f64,
    pub e_neg: f64,
    pub u_sdp: f64,
    pub u_sdp_source: &'static str,
    pub target_energy: Option<f64>,
    pub gw_cut: Option<f64>,
    pub gw_relaxation: Option<f64>,
    pub spectral_bound: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub spec: BenchmarkSpec,
    pub reference: ReferenceInfo,
    pub rows: Vec<SummaryRow>,
    pub trials: Vec<TrialOutcome>,
    /// Wall-clock seconds spent on the reference GW run, if any.
    pub reference_seconds: Option<f64>,
}

/// Runs every solver × trial of `spec` on one instance.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchReport> {
    spec.validate()?;
    let graph = load_instance(&spec.instance)?;
    run_benchmark_on(spec, &graph)
}

/// [`run_benchmark`] on an already loaded graph (`spec.instance` is then
/// only a label).
pub fn run_benchmark_on(spec: &BenchmarkSpec, graph: &Graph) -> Result<BenchReport> {
    spec.validate()?;
    graph.adjacency();
    let ref_seed = derive_seed(spec.master_seed, &[label_hash("reference")]);

    let t0 = Instant::now();
    let (target_energy, u_from_solver, gw) = match spec.target {
        TargetRule::Gw => {
            let r = gw_run(graph, &spec.gw, ref_seed)?;
            (Some(r.cut.ising_energy), r.relaxation_objective, Some(r))
        }
        TargetRule::Energy { value } => (Some(value), f64::NAN, None),
        TargetRule::None => (None, f64::NAN, None),
    };
    let (u_sdp, u_sdp_source) = match spec.u_sdp {
        Some(u) => (u, "given"),
        None if u_from_solver.is_finite() => (u_from_solver, "relaxation"),
        None => (solve_relaxation(graph, &spec.gw, ref_seed)?.objective, "relaxation"),
    };
    let reference_seconds = gw.as_ref().map(|_| t0.elapsed().as_secs_f64());
    let reference = ReferenceInfo {
        n: graph.n_vertices(),
        m: graph.n_edges(),
        total_weight: graph.total_weight(),
        e_neg: graph.negative_weight(),
        u_sdp,
        u_sdp_source,
        target_energy,
        gw_cut: gw.as_ref().map(|r| r.cut.cut_value),
        gw_relaxation: gw.as_ref().map(|r| r.relaxation_objective),
        spectral_bound: gw.as_ref().and_then(|r| r.spectral_bound),
    };

    let prepared = spec
        .solvers
        .iter()
        .map(|e| solver::prepare(graph, e))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..spec.solvers.len())
        .flat_map(|s| (0..spec.trials).map(move |t| (s, t)))
        .collect();
    let run_job = |&(s, t): &(usize, usize)| {
        let entry = &spec.solvers[s];
        let seed = spec.trial_seed(entry.label(), t);
        let start = Instant::now();
        let result = solver::run_solver(graph, entry, &prepared[s], seed)
            .map(|out| {
                let wall_seconds = start.elapsed().as_secs_f64();
                TrialRecord {
                    steps_to_target: target_energy.and_then(|e| steps_to_target(&out.trace, e)),
                    time_to_target: target_energy.and_then(|e| time_to_target(&out.trace, e)),
                    best_cut: out.best.cut_value,
                    best_energy: out.best.ising_energy,
                    trace: out.trace,
                    wall_seconds,
                }
            })
            .map_err(|e| e.to_string());
        TrialOutcome {
            solver: entry.label().to_string(),
            trial: t,
            seed,
            result,
        }
    };
    let trials: Vec<TrialOutcome> = match spec.workers {
        Some(1) => jobs.iter().map(run_job).collect(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidParam(e.to_string()))?
            .install(|| jobs.par_iter().map(run_job).collect()),
        None => jobs.par_iter().map(run_job).collect(),
    };

    let rows = spec
        .solvers
        .iter()
        .map(|entry| summarize(spec, &reference, entry, &trials))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport {
        spec: spec.clone(),
        reference,
        rows,
        trials,
        reference_seconds,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, k) = xs.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| sum / k as f64)
}

fn summarize(spec: &BenchmarkSpec, r: &ReferenceInfo, entry: &SolverEntry, trials: &[TrialOutcome]) -> Result<SummaryRow> {
    let label = entry.label();
    let mine: Vec<&TrialOutcome> = trials.iter().filter(|t| t.solver == label).collect();
    let ok: Vec<&TrialRecord> = mine.iter().filter_map(|t| t.result.as_ref().ok()).collect();
    let best_cut = ok.iter().map(|t| t.best_cut).fold(f64::NEG_INFINITY, f64::max);
    let mean_cut = mean(ok.iter().map(|t| t.best_cut)).unwrap_or(f64::NAN);
    let score = |c: f64| {
        if c.is_finite() {
            normalized_score(c, r.u_sdp, r.e_neg)
        } else {
            Ok(f64::NAN)
        }
    };
    let hits: Vec<&&TrialRecord> = ok.iter().filter(|t| t.steps_to_target.is_some()).collect();
    let time_base = entry.spec.time_base();
    Ok(SummaryRow {
        instance: spec.instance.clone(),
        n: r.n,
        m: r.m,
        solver: label.to_string(),
        trials: mine.len(),
        failures: mine.len() - ok.len(),
        best_cut,
        mean_cut,
        u_sdp: r.u_sdp,
        e_neg: r.e_neg,
        normalized_best: score(best_cut)?,
        normalized_mean: score(mean_cut)?,
        target_energy: r.target_energy,
        success_count: hits.len(),
        mean_steps_to_target: mean(hits.iter().filter_map(|t| t.steps_to_target).map(|s| s as f64)),
        mean_time_to_target: match time_base {
            TimeBase::SimulatedCim => mean(hits.iter().filter_map(|t| t.time_to_target)),
            TimeBase::WallClock => None,
        },
        time_base: time_base.label(),
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Summary table; every column is a deterministic function of
/// `(spec, master_seed)` as long as no solver runs on a time budget.
pub fn write_summary_csv<W: std::io::Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "instance",
        "n",
        "m",
        "solver",
        "trials",
        "failures",
        "best_cut",
        "mean_cut",
        "u_sdp",
        "e_neg",
        "normalized_best",
        "normalized_mean",
        "target_energy",
        "success_count",
        "mean_steps_to_target",
        "mean_time_to_target",
        "time_base",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record(&[
            r.instance.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.solver.clone(),
            r.trials.to_string(),
            r.failures.to_string(),
            r.best_cut.to_string(),
            r.mean_cut.to_string(),
            r.u_sdp.to_string(),
            r.e_neg.to_string(),
            r.normalized_best.to_string(),
            r.normalized_mean.to_string(),
            opt(r.target_energy),
            r.success_count.to_string(),
            opt(r.mean_steps_to_target),
            opt(r.mean_time_to_target),
            r.time_base.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Wall-clock measurements, kept apart from the summary because they vary
/// between runs.
pub fn write_timings_csv<W: std::io::Write>(report: &BenchReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["solver", "trial", "seed", "status", "wall_seconds", "wall_time_to_target"])
        .map_err(csv_err)?;
    if let Some(s) = report.reference_seconds {
        w.write_record(["reference-gw", "", "", "ok", &s.to_string(), ""])
            .map_err(csv_err)?;
    }
    for t in &report.trials {
        let (status, wall, ttt) = match &t.result {
            Ok(r) => {
                let ttt = match r.trace.time_base {
                    TimeBase::WallClock => opt(r.time_to_target),
                    TimeBase::SimulatedCim => String::new(),
                };
                ("ok".to_string(), r.wall_seconds.to_string(), ttt)
            }
            Err(e) => (format!("error: {e}"), String::new(), String::new()),
        };
        w.write_record(&[t.solver.clone(), t.trial.to_string(), t.seed.to_string(), status, wall, ttt])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `summary.csv`, `timings.csv`, `params.json`, one trace CSV per
/// trial under `traces/` and averaged curves under `plot/`.
pub fn write_report(report: &BenchReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir.join("traces"))?;
    fs::create_dir_all(dir.join("plot"))?;

    write_summary_csv(&report.rows, fs::File::create(dir.join("summary.csv"))?)?;
    write_timings_csv(report, fs::File::create(dir.join("timings.csv"))?)?;

    #[derive(Serialize)]
    struct Params<'a> {
        spec: &'a BenchmarkSpec,
        reference: &'a ReferenceInfo,
    }
    let params = serde_json::to_string_pretty(&Params {
        spec: &report.spec,
        reference: &report.reference,
    })
    .map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("params.json"), params + "\n")?;

    for t in &report.trials {
        if let Ok(r) = &t.result {
            let name = format!("{}_{:04}.csv", sanitize(&t.solver), t.trial);
            r.trace.write_csv(fs::File::create(dir.join("traces").join(name))?)?;
        }
    }

    for entry in &report.spec.solvers {
        let traces: Vec<RunTrace> = report
            .trials
            .iter()
            .filter(|t| t.solver == entry.label())
            .filter_map(|t| t.result.as_ref().ok().map(|r| r.trace.clone()))
            .collect();
        let end = traces
            .iter()
            .filter_map(|t| t.samples.last().map(|s| s.time_seconds))
            .fold(0.0, f64::max);
        if traces.is_empty() || report.spec.plot_points == 0 {
            continue;
        }
        let grid = linear_grid(0.0, end, report.spec.plot_points);
        let avg = average_traces(&traces, &grid)?;
        let name = format!("{}.csv", sanitize(entry.label()));
        write_averaged_csv(&avg, fs::File::create(dir.join("plot").join(name))?)?;
    }
    Ok(())
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
