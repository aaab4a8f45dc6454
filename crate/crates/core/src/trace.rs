//! Best-energy traces shared by all solvers, and the time-to-target and
//! averaging operations built on them.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeBase {
    /// Round trips × round-trip duration of the modelled machine.
    SimulatedCim,
    WallClock,
}

impl TimeBase {
    pub fn label(&self) -> &'static str {
        match self {
            TimeBase::SimulatedCim => "simulated-cim",
            TimeBase::WallClock => "wall-clock",
        }
    }
}

/// One trace record. `step` counts the solver's own unit of work (round
/// trips for the CIM, spin-flip proposals for local search).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub step: u64,
    pub time_seconds: f64,
    pub best_energy: f64,
    pub current_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub solver_id: String,
    pub trial_seed: u64,
    pub time_base: TimeBase,
    pub samples: Vec<TraceSample>,
}

impl RunTrace {
    pub fn new(solver_id: impl Into<String>, trial_seed: u64, time_base: TimeBase) -> Self {
        RunTrace {
            solver_id: solver_id.into(),
            trial_seed,
            time_base,
            samples: Vec::new(),
        }
    }

    /// Appends a sample, keeping times strictly increasing and the best
    /// energy non-increasing. A sample whose time does not advance replaces
    /// the previous one.
    pub fn record(&mut self, step: u64, time_seconds: f64, current_energy: f64) {
        let best = self
            .samples
            .last()
            .map_or(current_energy, |s| s.best_energy.min(current_energy));
        let sample = TraceSample {
            step,
            time_seconds,
            best_energy: best,
            current_energy,
        };
        match self.samples.last_mut() {
            Some(last) if time_seconds <= last.time_seconds => *last = TraceSample {
                time_seconds: last.time_seconds,
                ..sample
            },
            _ => self.samples.push(sample),
        }
    }

    pub fn best_energy(&self) -> Option<f64> {
        self.samples.last().map(|s| s.best_energy)
    }

    /// Checks the ordering invariants.
    pub fn validate(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if !(w[1].time_seconds > w[0].time_seconds) {
                return Err(Error::InvalidParam(format!(
                    "trace times not strictly increasing at step {}",
                    w[1].step
                )));
            }
            if w[1].best_energy > w[0].best_energy {
                return Err(Error::InvalidParam(format!(
                    "best energy increased at step {}",
                    w[1].step
                )));
            }
        }
        Ok(())
    }

    /// CSV with columns `step,time_seconds,best_energy,current_energy`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let map = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["step", "time_seconds", "best_energy", "current_energy"])
            .map_err(map)?;
        for s in &self.samples {
            w.write_record(&[
                s.step.to_string(),
                s.time_seconds.to_string(),
                s.best_energy.to_string(),
                s.current_energy.to_string(),
            ])
            .map_err(map)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Earliest sample time at which the best energy is at or below `target`.
pub fn time_to_target(trace: &RunTrace, target_energy: f64) -> Option<f64> {
    first_hit(trace, target_energy).map(|s| s.time_seconds)
}

/// Like [`time_to_target`] but in the solver's work units.
pub fn steps_to_target(trace: &RunTrace, target_energy: f64) -> Option<u64> {
    first_hit(trace, target_energy).map(|s| s.step)
}

fn first_hit(trace: &RunTrace, target: f64) -> Option<&TraceSample> {
    // best_energy is non-increasing, so the hits form a suffix.
    let idx = trace.samples.partition_point(|s| s.best_energy > target);
    trace.samples.get(idx)
}

/// Piecewise-linear interpolation of a trace's best energy. Before the
/// first sample the first value is held; after the last, the last.
pub fn interpolate_best(trace: &RunTrace, t: f64) -> Option<f64> {
    let s = &trace.samples;
    let first = s.first()?;
    if t <= first.time_seconds {
        return Some(first.best_energy);
    }
    let k = s.partition_point(|x| x.time_seconds <= t);
    if k >= s.len() {
        return Some(s[s.len() - 1].best_energy);
    }
    let (a, b) = (&s[k - 1], &s[k]);
    let frac = (t - a.time_seconds) / (b.time_seconds - a.time_seconds);
    Some(a.best_energy + frac * (b.best_energy - a.best_energy))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedPoint {
    pub time_seconds: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean and (population) standard deviation across traces of the
/// interpolated best energy at each grid point.
pub fn average_traces(traces: &[RunTrace], grid: &[f64]) -> Result<Vec<AveragedPoint>> {
    let traces: Vec<&RunTrace> = traces.iter().filter(|t| !t.samples.is_empty()).collect();
    if traces.is_empty() {
        return Err(Error::InvalidParam("no non-empty traces to average".into()));
    }
    let k = traces.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            let vals: Vec<f64> = traces
                .iter()
                .map(|tr| interpolate_best(tr, t).expect("non-empty"))
                .collect();
            let mean = vals.iter().sum::<f64>() / k;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
            AveragedPoint {
                time_seconds: t,
                mean,
                std_dev: var.sqrt(),
                min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect())
}

/// `n` evenly spaced points on `[t0, t1]`.
pub fn linear_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..n)
            .map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn write_averaged_csv<W: Write>(points: &[AveragedPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let map = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["time_seconds", "mean", "lower", "upper"]).map_err(map)?;
    for p in points {
        w.write_record(&[
            p.time_seconds.to_string(),
            p.mean.to_string(),
            (p.mean - p.std_dev).to_string(),
            (p.mean + p.std_dev).to_string(),
        ])
        .map_err(map)?;
    }
    w.flush()?;
    Ok(())
}
