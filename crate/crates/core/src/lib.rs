//! MAX-CUT solvers built around a simulated coherent Ising machine, with
//! classical baselines (simulated annealing, SG3, breakout local search,
//! Goemans–Williamson on a low-rank relaxation) and a benchmark harness
//! for time-to-target comparisons.

pub mod bench;
pub mod cim;
pub mod error;
pub mod graph;
pub mod heuristics;
pub mod rng;
pub mod sdp;
pub mod trace;

pub use error::{Error, Result};
pub use graph::{CutResult, Graph, SpinConfig};
