//! Uniform solver entry points for the harness.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cim::{build_coupling, run_trial_with, CimParams, CouplingMatrix, ZeemanSchedule};
use crate::error::Result;
use crate::graph::{CutResult, Graph};
use crate::heuristics::{bls_run, sa_run, sg3_run, steepest_descent, BlsConfig, Budget, C0Rule};
use crate::rng::rng_from_seed;
use crate::sdp::{gw_run, GwConfig};
use crate::trace::{RunTrace, TimeBase};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum SolverSpec {
    Cim {
        #[serde(default)]
        params: CimParams,
        #[serde(default)]
        hysteresis: Option<ZeemanSchedule>,
    },
    Sa {
        #[serde(default)]
        c0: C0Rule,
        budget: Budget,
        /// Flip count the schedule is built for; defaults to the flip
        /// (or sweep) budget, or 10^6 under a time budget.
        #[serde(default)]
        schedule_flips: Option<u64>,
    },
    Bls {
        #[serde(default)]
        config: BlsConfig,
        budget: Budget,
    },
    Sg3,
    Descent,
    Gw {
        #[serde(default)]
        config: GwConfig,
    },
}

impl SolverSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SolverSpec::Cim { .. } => "cim",
            SolverSpec::Sa { .. } => "sa",
            SolverSpec::Bls { .. } => "bls",
            SolverSpec::Sg3 => "sg3",
            SolverSpec::Descent => "descent",
            SolverSpec::Gw { .. } => "gw",
        }
    }

    pub fn time_base(&self) -> TimeBase {
        match self {
            SolverSpec::Cim { .. } => TimeBase::SimulatedCim,
            _ => TimeBase::WallClock,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEntry {
    /// Label used in reports and for seed derivation; defaults to the
    /// solver kind.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub spec: SolverSpec,
}

impl SolverEntry {
    pub fn new(spec: SolverSpec) -> Self {
        SolverEntry { label: None, spec }
    }

    pub fn labelled(label: impl Into<String>, spec: SolverSpec) -> Self {
        SolverEntry {
            label: Some(label.into()),
            spec,
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.spec.kind())
    }
}

/// Per-instance state shared by all trials of one solver.
pub(crate) enum Prepared {
    Cim(CouplingMatrix),
    Plain,
}

pub(crate) fn prepare(graph: &Graph, entry: &SolverEntry) -> Result<Prepared> {
    Ok(match &entry.spec {
        SolverSpec::Cim { params, .. } => {
            params.validate()?;
            Prepared::Cim(build_coupling(graph, params)?)
        }
        _ => Prepared::Plain,
    })
}

pub(crate) struct SolverOutput {
    pub trace: RunTrace,
    pub best: CutResult,
}

fn single_sample(label: &str, seed: u64, best: CutResult, seconds: f64) -> SolverOutput {
    let mut trace = RunTrace::new(label, seed, TimeBase::WallClock);
    trace.record(1, seconds, best.ising_energy);
    SolverOutput { trace, best }
}

pub(crate) fn run_solver(graph: &Graph, entry: &SolverEntry, prepared: &Prepared, seed: u64) -> Result<SolverOutput> {
    let label = entry.label();
    let start = Instant::now();
    let mut out = match (&entry.spec, prepared) {
        (SolverSpec::Cim { params, hysteresis }, Prepared::Cim(coupling)) => {
            let run = run_trial_with(graph, coupling, params, hysteresis.as_ref(), seed, |_| {})?;
            SolverOutput {
                trace: run.trace,
                best: run.best,
            }
        }
        (SolverSpec::Cim { params, hysteresis }, Prepared::Plain) => {
            let coupling = build_coupling(graph, params)?;
            let run = run_trial_with(graph, &coupling, params, hysteresis.as_ref(), seed, |_| {})?;
            SolverOutput {
                trace: run.trace,
                best: run.best,
            }
        }
        (
            SolverSpec::Sa {
                c0,
                budget,
                schedule_flips,
            },
            _,
        ) => {
            let flips = schedule_flips.unwrap_or(match budget.for_size(graph.n_vertices()) {
                Budget::Flips(k) => k,
                _ => 1_000_000,
            });
            let schedule = c0.schedule(graph, flips)?;
            let run = sa_run(graph, &schedule, seed, *budget)?;
            SolverOutput {
                trace: run.trace,
                best: run.best,
            }
        }
        (SolverSpec::Bls { config, budget }, _) => {
            let run = bls_run(graph, config, seed, *budget)?;
            SolverOutput {
                trace: run.trace,
                best: run.best,
            }
        }
        (SolverSpec::Sg3, _) => {
            let best = sg3_run(graph)?;
            single_sample(label, seed, best, start.elapsed().as_secs_f64())
        }
        (SolverSpec::Descent, _) => {
            let mut rng = rng_from_seed(seed);
            let spins = crate::heuristics::random_spins(graph.n_vertices(), &mut rng);
            let best = steepest_descent(graph, &spins)?;
            single_sample(label, seed, best, start.elapsed().as_secs_f64())
        }
        (SolverSpec::Gw { config }, _) => {
            let report = gw_run(graph, config, seed)?;
            single_sample(label, seed, report.cut, start.elapsed().as_secs_f64())
        }
    };
    out.trace.solver_id = label.to_string();
    Ok(out)
}

/// Convenience wrapper for callers outside the harness.
pub fn solve_once(graph: &Graph, entry: &SolverEntry, seed: u64) -> Result<(RunTrace, CutResult)> {
    let prepared = prepare(graph, entry)?;
    let out = run_solver(graph, entry, &prepared, seed)?;
    Ok((out.trace, out.best))
}
