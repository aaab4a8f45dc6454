//! Classical MAX-CUT baselines: simulated annealing, SG3 greedy,
//! steepest descent and a breakout-local-search style escape heuristic.

mod gain;
mod local;
mod sa;
mod sg3;

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{CutResult, SpinConfig};
use crate::rng::SimRng;
use crate::trace::{RunTrace, TimeBase};

pub use gain::GainTable;
pub use local::{bls_run, steepest_descent, BlsConfig};
pub use sa::{log_temperature, metropolis_accept, sa_run, C0Rule, SaSchedule, ScheduleKind};
pub use sg3::sg3_run;

/// Stopping rule for the stochastic local-search solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// Number of single-spin flip proposals (or executed flips for BLS).
    Flips(u64),
    Seconds(f64),
    /// `k · N` flips on an `N`-vertex graph.
    Sweeps(u64),
}

impl Budget {
    /// Resolves [`Budget::Sweeps`] into a flip count.
    pub fn for_size(self, n: usize) -> Budget {
        match self {
            Budget::Sweeps(k) => Budget::Flips(k.saturating_mul(n as u64)),
            b => b,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchRun {
    pub trace: RunTrace,
    pub best: CutResult,
    /// Work units consumed.
    pub flips: u64,
}

pub(crate) fn random_spins(n: usize, rng: &mut SimRng) -> SpinConfig {
    SpinConfig::new((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
        .expect("±1 by construction")
}

/// Budget bookkeeping shared by SA and BLS; the clock is read only every
/// 256 polls.
pub(crate) struct BudgetClock {
    budget: Budget,
    start: Instant,
    used: u64,
    polls: u64,
    expired: bool,
}

impl BudgetClock {
    pub fn new(budget: Budget, n: usize) -> Self {
        BudgetClock {
            budget: budget.for_size(n),
            start: Instant::now(),
            used: 0,
            polls: 0,
            expired: false,
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn charge(&mut self, units: u64) {
        self.used += units;
    }

    pub fn exhausted(&mut self) -> bool {
        if self.expired {
            return true;
        }
        self.polls += 1;
        self.expired = match self.budget {
            Budget::Flips(k) => self.used >= k,
            Budget::Seconds(s) => self.polls % 256 == 0 && self.elapsed() >= s,
            Budget::Sweeps(_) => unreachable!("resolved in new"),
        };
        self.expired
    }
}

/// Wall-clock trace recorder that only writes on improvement.
pub(crate) struct BestTracker {
    pub trace: RunTrace,
    pub best_energy: f64,
    pub best_spins: SpinConfig,
}

impl BestTracker {
    pub fn new(solver: &str, seed: u64, table: &GainTable<'_>, clock: &BudgetClock) -> Self {
        let mut trace = RunTrace::new(solver, seed, TimeBase::WallClock);
        trace.record(0, clock.elapsed(), table.energy());
        BestTracker {
            trace,
            best_energy: table.energy(),
            best_spins: table.spins().clone(),
        }
    }

    #[inline]
    pub fn observe(&mut self, table: &GainTable<'_>, clock: &BudgetClock) {
        if table.energy() < self.best_energy {
            self.best_energy = table.energy();
            self.best_spins.clone_from(table.spins());
            self.trace.record(clock.used(), clock.elapsed(), table.energy());
        }
    }

    pub fn finish(
        mut self,
        graph: &crate::graph::Graph,
        table: &GainTable<'_>,
        clock: &BudgetClock,
    ) -> crate::error::Result<SearchRun> {
        self.trace.record(clock.used(), clock.elapsed(), table.energy());
        Ok(SearchRun {
            trace: self.trace,
            best: CutResult::evaluate(graph, self.best_spins)?,
            flips: clock.used(),
        })
    }
}
