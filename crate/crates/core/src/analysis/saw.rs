//! Self-avoiding paths from the origin and the `p_c` lower bound built on
//! them.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Vertex;
use crate::report::Status;

/// Refuse counts whose non-backtracking upper bound `2d(2d-1)^{k-1}`
/// exceeds this many paths.
pub const SAW_WORK_LIMIT: f64 = 5e9;

fn check(d: usize, k: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let work = 2.0 * d as f64 * ((2 * d - 1) as f64).powi(k.saturating_sub(1) as i32);
    if work > SAW_WORK_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "self-avoiding paths of length {k} in d = {d} exceed the work limit"
        )));
    }
    Ok(())
}

struct Walker {
    strides: Vec<isize>,
    seen: Vec<bool>,
}

impl Walker {
    fn count(&mut self, at: usize, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        for s in 0..self.strides.len() {
            let next = (at as isize + self.strides[s]) as usize;
            if !self.seen[next] {
                self.seen[next] = true;
                total += self.count(next, left - 1);
                self.seen[next] = false;
            }
        }
        total
    }
}

/// `R_k`: self-avoiding paths with `k` edges from the origin, by
/// backtracking on a dense box. The first step is fixed and the count
/// multiplied by `2d`.
pub fn saw_count(d: usize, k: usize) -> Result<u64> {
    check(d, k)?;
    if k == 0 {
        return Ok(1);
    }
    let side = 2 * k + 3;
    let mut strides = Vec::new();
    let mut s = 1isize;
    for _ in 0..d {
        strides.push(s);
        strides.push(-s);
        s *= side as isize;
    }
    let size = side.pow(d as u32);
    let centre = (0..d).map(|j| k as isize * side.pow(j as u32) as isize + side.pow(j as u32) as isize).sum::<isize>() as usize;
    let mut w = Walker {
        strides,
        seen: vec![false; size],
    };
    w.seen[centre] = true;
    let first = centre + 1;
    w.seen[first] = true;
    Ok(2 * d as u64 * w.count(first, k - 1))
}

/// Independent count by growing explicit paths level by level.
pub fn saw_count_oracle(d: usize, k: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if k > 8 {
        return Err(Error::ResourceLimit("oracle is limited to k <= 8".into()));
    }
    let mut paths: Vec<Vec<Vertex>> = vec![vec![Vertex::origin(d)]];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &paths {
            let tip = p.last().expect("nonempty");
            let on_path: HashSet<&Vertex> = p.iter().collect();
            for axis in 0..d {
                for sign in [1, -1] {
                    let v = tip.step(axis, sign);
                    if !on_path.contains(&v) {
                        let mut q = p.clone();
                        q.push(v);
                        next.push(q);
                    }
                }
            }
        }
        paths = next;
    }
    Ok(paths.len() as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct PcBoundRow {
    pub k: usize,
    pub path_length: usize,
    /// `R_{3k+1}` by exhaustive count.
    pub r: u64,
    /// `2d [(2d-1)^3 (1 - (2d-1)^{-2})]^k`.
    pub rhs: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PcBoundReport {
    pub d: usize,
    /// `1 / ((2d-1)(1 - (2d-1)^{-2})^{1/3})`.
    pub bound: f64,
    /// `(2d)^3 − (2d)^2 − (2d−1)2d − (2d−1)^2 − (2d−1)`, the printed
    /// per-three-step extension count.
    pub printed_extension_count: i64,
    pub rows: Vec<PcBoundRow>,
    /// Rows of the path inequality that fail, reported as-is.
    pub discrepancies: Vec<String>,
    /// Always diagnostic: the rows test a printed inequality, not this code.
    pub status: Status,
}

pub fn pc_lower_bound(d: usize, k_max: usize) -> Result<PcBoundReport> {
    check(d, 3 * k_max + 1)?;
    let q = (2 * d - 1) as f64;
    let bound = 1.0 / (q * (1.0 - 1.0 / (q * q)).cbrt());
    let dd = 2 * d as i64;
    let printed = dd.pow(3) - dd * dd - (dd - 1) * dd - (dd - 1) * (dd - 1) - (dd - 1);
    let mut rows = Vec::new();
    let mut discrepancies = Vec::new();
    for k in 0..=k_max {
        let len = 3 * k + 1;
        let r = saw_count(d, len)?;
        let rhs = 2.0 * d as f64 * (q.powi(3) * (1.0 - 1.0 / (q * q))).powi(k as i32);
        let violated = r as f64 > rhs;
        if violated {
            discrepancies.push(format!("k = {k}: R_{len} = {r} exceeds the printed bound {rhs}"));
        }
        rows.push(PcBoundRow {
            k,
            path_length: len,
            r,
            rhs,
            violated,
        });
    }
    Ok(PcBoundReport {
        d,
        bound,
        printed_extension_count: printed,
        rows,
        discrepancies,
        status: Status::Diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let r: Vec<u64> = (1..=4).map(|k| saw_count(2, k).unwrap()).collect();
        assert_eq!(r, vec![4, 12, 36, 100]);
        assert_eq!(saw_count(2, 0).unwrap(), 1);
        assert_eq!(saw_count(3, 2).unwrap(), 30);
    }

    #[test]
    fn matches_oracle() {
        for d in [2, 3] {
            for k in 0..=6 {
                assert_eq!(saw_count(d, k).unwrap(), saw_count_oracle(d, k).unwrap(), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn refuses_large() {
        assert!(saw_count(2, 40).is_err());
    }

    #[test]
    fn pc_bound_square() {
        let r = pc_lower_bound(2, 2).unwrap();
        assert!((r.bound - 0.34668).abs() < 5e-6, "{}", r.bound);
        assert_eq!(r.printed_extension_count, 24);
        assert!(!r.rows[0].violated && r.rows[0].r == 4);
        assert!(r.rows[1].violated && r.rows[1].r == 100 && r.rows[1].rhs == 96.0);
        assert!(!r.discrepancies.is_empty());
    }
}
