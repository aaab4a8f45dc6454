//! Instance sources: G-set files or seeded generator expressions.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{gen_complete_pm1, gen_random_graph, gen_toroidal_grid, read_gset_file, Graph, WeightKind};

/// Loads an instance from either a file path or a generator expression:
///
/// * `complete:N:SEED` – `K_N` with ±1 weights
/// * `torus:R:C:SEED` / `torus-unit:R:C` – toroidal grid, ±1 or unit weights
/// * `random:N:P:SEED` / `random-unit:N:P:SEED` – Erdős–Rényi graph
///
/// Anything else is read as a G-set file.
pub fn load_instance(source: &str) -> Result<Graph> {
    let parts: Vec<&str> = source.split(':').collect();
    let bad = || Error::InvalidParam(format!("malformed generator expression {source:?}"));
    let int = |s: &str| s.parse::<u64>().map_err(|_| bad());
    let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        ["complete", n, seed] => gen_complete_pm1(int(n)? as usize, int(seed)?),
        ["torus", r, c, seed] => gen_toroidal_grid(int(r)? as usize, int(c)? as usize, WeightKind::PlusMinusOne, int(seed)?),
        ["torus-unit", r, c] => gen_toroidal_grid(int(r)? as usize, int(c)? as usize, WeightKind::Unit, 0),
        ["random", n, p, seed] => gen_random_graph(int(n)? as usize, real(p)?, WeightKind::PlusMinusOne, int(seed)?),
        ["random-unit", n, p, seed] => gen_random_graph(int(n)? as usize, real(p)?, WeightKind::Unit, int(seed)?),
        [kind, ..] if is_generator(kind) => Err(bad()),
        _ => {
            if !Path::new(source).exists() {
                return Err(Error::Io(format!("instance file {source:?} not found")));
            }
            read_gset_file(source)
        }
    }
}

fn is_generator(kind: &str) -> bool {
    matches!(kind, "complete" | "torus" | "torus-unit" | "random" | "random-unit")
}
