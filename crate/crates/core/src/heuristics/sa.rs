//! Single-spin-flip Metropolis annealing with logarithmic cooling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_spins, BestTracker, Budget, BudgetClock, GainTable, SearchRun};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// `T(k) = c0 / ln(2 + k)`.
    #[default]
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaSchedule {
    pub c0: f64,
    pub total_flips: u64,
    #[serde(default)]
    pub kind: ScheduleKind,
}

impl SaSchedule {
    pub fn new(c0: f64, total_flips: u64) -> Result<Self> {
        let s = SaSchedule {
            c0,
            total_flips,
            kind: ScheduleKind::Logarithmic,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::InvalidParam(format!("SA c0 must be positive, got {}", self.c0)));
        }
        if self.total_flips < 1 {
            return Err(Error::InvalidParam("SA total_flips must be >= 1".into()));
        }
        Ok(())
    }

    /// `c0 = max_i Σ_j |w_ij|`.
    pub fn max_row_sum(graph: &Graph, total_flips: u64) -> Result<Self> {
        SaSchedule::new(graph.max_abs_row_sum().max(f64::MIN_POSITIVE), total_flips)
    }

    /// Picks `c0` so that the temperature at the last flip equals
    /// `tau · sqrt(mean_i Σ_j w_ij²)`, a typical local-field magnitude.
    pub fn final_temperature(graph: &Graph, total_flips: u64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParam(format!("SA tau must be positive, got {tau}")));
        }
        let n = graph.n_vertices().max(1) as f64;
        let sq: f64 = graph.edges().iter().map(|e| e.w * e.w).sum();
        let field = (2.0 * sq / n).sqrt().max(f64::MIN_POSITIVE);
        SaSchedule::new(tau * field * (2.0 + total_flips as f64).ln(), total_flips)
    }
}

/// How a benchmark derives `c0` for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum C0Rule {
    Fixed { c0: f64 },
    MaxRowSum,
    FinalTemperature { tau: f64 },
}

impl Default for C0Rule {
    fn default() -> Self {
        C0Rule::FinalTemperature { tau: 0.2 }
    }
}

impl C0Rule {
    pub fn schedule(&self, graph: &Graph, total_flips: u64) -> Result<SaSchedule> {
        match *self {
            C0Rule::Fixed { c0 } => SaSchedule::new(c0, total_flips),
            C0Rule::MaxRowSum => SaSchedule::max_row_sum(graph, total_flips),
            C0Rule::FinalTemperature { tau } => SaSchedule::final_temperature(graph, total_flips, tau),
        }
    }
}

pub fn log_temperature(flip_index: u64, schedule: &SaSchedule) -> f64 {
    match schedule.kind {
        ScheduleKind::Logarithmic => schedule.c0 / (2.0 + flip_index as f64).ln(),
    }
}

/// Metropolis rule with `k_B` absorbed into `temp`.
pub fn metropolis_accept(delta_e: f64, temp: f64, rng: &mut SimRng) -> Result<bool> {
    if !(temp > 0.0) {
        return Err(Error::InvalidParam(format!("temperature must be positive, got {temp}")));
    }
    Ok(accept(delta_e, temp, rng))
}

#[inline]
fn accept(delta_e: f64, temp: f64, rng: &mut SimRng) -> bool {
    delta_e <= 0.0 || rng.random::<f64>() < (-delta_e / temp).exp()
}

/// Simulated annealing from uniformly random spins. Each proposal flips a
/// uniformly chosen vertex; the flip index drives the schedule.
pub fn sa_run(graph: &Graph, schedule: &SaSchedule, seed: u64, budget: Budget) -> Result<SearchRun> {
    schedule.validate()?;
    let n = graph.n_vertices();
    let mut clock = BudgetClock::new(budget, n);
    let mut rng = rng_from_seed(seed);
    let mut table = GainTable::new(graph, random_spins(n, &mut rng));
    let mut best = BestTracker::new("sa", seed, &table, &clock);

    while !clock.exhausted() {
        let k = clock.used();
        let v = rng.random_range(0..n);
        let temp = log_temperature(k, schedule);
        clock.charge(1);
        if accept(table.delta(v), temp, &mut rng) {
            table.flip(v);
            best.observe(&table, &clock);
        }
    }
    best.finish(graph, &table, &clock)
}
