//! Independent census by exhaustive growth of explicit edge sets.
//!
//! Level `n+1` is every normalised `A ∪ {f}` for `A` in level `n` and `f`
//! an outlying edge of `A`, deduplicated as sets. Every connected edge set
//! has an edge whose removal leaves it connected, so the levels are
//! complete. Nothing here shares code with the backtracking enumerator
//! beyond [`compute_stats`].

use std::collections::BTreeSet;

use super::CensusTable;
use crate::error::{Error, Result};
use crate::lattice::{compute_stats, normalize_lex_min, Animal, Edge, Vertex};

pub const ORACLE_N_MAX_LIMIT: usize = 6;

pub fn brute_force_census(d: usize, n_max: usize) -> Result<CensusTable> {
    if n_max > ORACLE_N_MAX_LIMIT {
        return Err(Error::OracleTooLarge {
            n_max,
            limit: ORACLE_N_MAX_LIMIT,
        });
    }
    let mut table = CensusTable::new(d, n_max)?;
    let origin = Vertex::origin(d);
    let mut level: BTreeSet<Animal> = (0..d)
        .map(|axis| Animal::new(d, [Edge::new(origin.clone(), axis)?]))
        .collect::<Result<_>>()?;
    for n in 1..=n_max {
        for a in &level {
            let s = compute_stats(a)?;
            table.add(n, s.m, 1, s.v as u64)?;
        }
        if n == n_max {
            break;
        }
        let mut next = BTreeSet::new();
        for a in &level {
            for v in a.vertices() {
                for f in Edge::incident(&v) {
                    if a.contains(&f) {
                        continue;
                    }
                    let mut edges = a.edges().clone();
                    edges.insert(f);
                    next.insert(normalize_lex_min(&Animal::new(d, edges)?)?);
                }
            }
        }
        level = next;
    }
    Ok(table)
}
