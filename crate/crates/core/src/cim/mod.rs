//! Coherent Ising machine: a network of degenerate optical parametric
//! oscillator pulses with measurement-feedback coupling, integrated one
//! cavity round trip per Euler–Maruyama step.

mod coupling;
mod sde;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CutResult, Graph, SpinConfig};
use crate::heuristics::GainTable;
use crate::rng::rng_from_seed;
use crate::trace::{RunTrace, TimeBase};

pub use coupling::{build_coupling, CouplingMatrix};
pub use sde::{CimState, Field};

/// Round-trip duration of a 2 km fibre ring (100 kHz clock).
pub const DEFAULT_ROUNDTRIP_SECONDS: f64 = 10e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CimParams {
    /// Normalised pump rate; 1 is the oscillation threshold.
    pub p: f64,
    /// Coupling scale ξ.
    pub xi: f64,
    /// Saturation amplitude; the noise magnitude is `1/a_s`. Infinity
    /// disables all noise.
    pub a_s: f64,
    /// Output-coupler power transmission `T`.
    pub t_coupler: f64,
    /// Normalised time per round trip.
    pub dt: f64,
    pub round_trips: u64,
    pub normalize_by_degree: bool,
    pub roundtrip_seconds: f64,
}

impl Default for CimParams {
    fn default() -> Self {
        CimParams {
            p: 1.6,
            xi: -0.06,
            a_s: 100.0,
            t_coupler: 0.1,
            dt: 0.05,
            round_trips: 5000,
            normalize_by_degree: true,
            roundtrip_seconds: DEFAULT_ROUNDTRIP_SECONDS,
        }
    }
}

impl CimParams {
    /// Small-network demo setting: `p = 1.1`, `ξ = −0.1`, raw couplings.
    pub fn k4_demo() -> Self {
        CimParams {
            p: 1.1,
            xi: -0.1,
            normalize_by_degree: false,
            round_trips: 1000,
            ..CimParams::default()
        }
    }

    /// Below-threshold pump with strong degree-normalised feedback, so the
    /// network only oscillates through the coupling. Used for complete
    /// graphs and small dense instances.
    pub fn complete_graph() -> Self {
        CimParams {
            p: 0.2,
            xi: -2.0,
            round_trips: 1000,
            ..CimParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParam(m.into()));
        if !(self.a_s > 0.0) {
            return bad("a_s must be positive");
        }
        if !(self.t_coupler > 0.0 && self.t_coupler < 1.0) {
            return bad("t_coupler must lie in (0, 1)");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if self.round_trips < 1 {
            return bad("round_trips must be at least 1");
        }
        if !(self.p.is_finite() && self.xi.is_finite()) {
            return bad("p and xi must be finite");
        }
        if !(self.roundtrip_seconds > 0.0) {
            return bad("roundtrip_seconds must be positive");
        }
        Ok(())
    }

    /// `1/A_s`, zero in the classical limit.
    pub fn noise_scale(&self) -> f64 {
        if self.a_s.is_infinite() {
            0.0
        } else {
            1.0 / self.a_s
        }
    }

    /// Standard deviation of the homodyne error `c̃ − c`.
    pub fn measurement_noise(&self) -> f64 {
        ((1.0 - self.t_coupler) / self.t_coupler).max(0.0).sqrt() * self.noise_scale()
    }
}

/// Hysteretic optimisation: after `free_roundtrips`, `cycles` rounds of a
/// square-wave external field along a fresh random ±1 pattern, with the
/// amplitude shrinking by `decay` each cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZeemanSchedule {
    pub free_roundtrips: u64,
    pub cycles: u64,
    pub cycle_roundtrips: u64,
    pub amplitude0: f64,
    pub decay: f64,
    /// Sign changes per cycle; the cycle splits into `flips_per_cycle + 1`
    /// equal segments of alternating sign, starting positive.
    pub flips_per_cycle: u64,
}

impl Default for ZeemanSchedule {
    fn default() -> Self {
        ZeemanSchedule {
            free_roundtrips: 1000,
            cycles: 4,
            cycle_roundtrips: 1000,
            amplitude0: 0.2,
            decay: 0.5,
            flips_per_cycle: 2,
        }
    }
}

impl ZeemanSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.free_roundtrips < 1
            || self.cycles < 1
            || self.cycle_roundtrips < 1
            || self.flips_per_cycle < 1
        {
            return Err(Error::InvalidParam("Zeeman schedule counts must be >= 1".into()));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::InvalidParam("Zeeman decay must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn total_roundtrips(&self) -> u64 {
        self.free_roundtrips + self.cycles * self.cycle_roundtrips
    }

    /// Field at the given (0-based) round trip: `(cycle, h)`, or `None`
    /// outside the hysteresis window.
    pub fn field_at(&self, round_trip: u64) -> Option<(u64, f64)> {
        let t = round_trip.checked_sub(self.free_roundtrips)?;
        let cycle = t / self.cycle_roundtrips;
        if cycle >= self.cycles {
            return None;
        }
        let within = t % self.cycle_roundtrips;
        let segment = within * (self.flips_per_cycle + 1) / self.cycle_roundtrips;
        let sign = if segment % 2 == 0 { 1.0 } else { -1.0 };
        Some((cycle, sign * self.amplitude0 * self.decay.powi(cycle as i32)))
    }
}

#[derive(Debug, Clone)]
pub struct CimRun {
    pub trace: RunTrace,
    pub best: CutResult,
    /// Readout after the last round trip.
    pub final_spins: SpinConfig,
}

/// Runs one trial from vacuum for `params.round_trips` round trips,
/// tracking the best Ising energy of the sign readout at every trip.
pub fn run_trial(
    graph: &Graph,
    params: &CimParams,
    schedule: Option<&ZeemanSchedule>,
    seed: u64,
) -> Result<CimRun> {
    let coupling = build_coupling(graph, params)?;
    run_trial_with(graph, &coupling, params, schedule, seed, |_| {})
}

/// [`run_trial`] with a prebuilt coupling matrix and a per-round-trip
/// observer of the state (after the step).
pub fn run_trial_with(
    graph: &Graph,
    coupling: &CouplingMatrix,
    params: &CimParams,
    schedule: Option<&ZeemanSchedule>,
    seed: u64,
    mut observe: impl FnMut(&CimState),
) -> Result<CimRun> {
    params.validate()?;
    if let Some(s) = schedule {
        s.validate()?;
    }
    let n = graph.n_vertices();
    if coupling.n() != n {
        return Err(Error::InvalidParam("coupling size differs from graph".into()));
    }

    let mut state = CimState::new(n, seed);
    // Field patterns come from a separate stream so that adding a schedule
    // leaves the SDE noise sequence untouched.
    let mut pattern_rng = rng_from_seed(crate::rng::derive_seed(seed, &[0x5a_ee_aa]));
    let mut pattern: Vec<i8> = vec![1; n];
    let mut pattern_cycle = None;

    let mut table = GainTable::new(graph, state.readout());
    let mut trace = RunTrace::new("cim", seed, TimeBase::SimulatedCim);
    let mut best_energy = f64::INFINITY;
    let mut best_spins: SpinConfig = table.spins().clone();

    for rt in 0..params.round_trips {
        let field = match schedule.and_then(|s| s.field_at(rt)) {
            Some((cycle, h)) => {
                if pattern_cycle != Some(cycle) {
                    pattern
                        .iter_mut()
                        .for_each(|e| *e = if pattern_rng.random_bool(0.5) { 1 } else { -1 });
                    pattern_cycle = Some(cycle);
                }
                Some(Field {
                    pattern: &pattern,
                    strength: h,
                })
            }
            None => None,
        };
        state.step_with_field(coupling, params, field)?;
        observe(&state);

        for (i, &c) in state.c.iter().enumerate() {
            let sigma = if c < 0.0 { -1 } else { 1 };
            if sigma != table.spins().get(i) {
                table.flip(i);
            }
        }
        let energy = table.energy();
        if energy < best_energy {
            best_energy = energy;
            best_spins.clone_from(table.spins());
        }
        trace.record(
            state.round_trip,
            state.round_trip as f64 * params.roundtrip_seconds,
            energy,
        );
    }

    let best = CutResult::evaluate(graph, best_spins)?;
    Ok(CimRun {
        trace,
        best,
        final_spins: table.into_spins(),
    })
}

/// Four-body demo trial on four pulses; returns the final readout.
pub fn run_four_body_trial(j1234: f64, params: &CimParams, seed: u64) -> Result<SpinConfig> {
    params.validate()?;
    let mut state = CimState::new(4, seed);
    for _ in 0..params.round_trips {
        state.four_body_step(j1234, params)?;
    }
    Ok(state.readout())
}
