//! Monte Carlo growth of the open cluster at the origin.
//!
//! Replicate `r` draws its edge states from a ChaCha8 stream keyed by
//! `(seed, r)`, one draw per edge in breadth-first discovery order. That
//! order depends only on the states already drawn, so every replicate is a
//! pure function of `(d, p, seed, r, cluster_cap)` regardless of how
//! replicates are spread over threads.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CLUSTER_CAP: usize = 100_000;
const MAX_D: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationRun {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub samples: u64,
    pub cluster_cap: usize,
}

impl PercolationRun {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_D).contains(&self.d) {
            return Err(Error::Parameter(format!(
                "Monte Carlo supports 2 <= d <= {MAX_D}, got d = {}",
                self.d
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p = {} not in [0, 1]", self.p)));
        }
        if self.samples == 0 {
            return Err(Error::Parameter("samples must be positive".into()));
        }
        if self.cluster_cap == 0 {
            return Err(Error::Parameter("cluster_cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterOutcome {
    /// Edge count of the open cluster of the origin.
    Size(usize),
    /// Exploration passed `cluster_cap` edges.
    Capped,
}

fn key(c: &[i32; MAX_D]) -> u128 {
    c.iter()
        .fold(0u128, |acc, &x| (acc << 32) | x as u32 as u128)
}

/// Explore the origin's open cluster for one replicate.
pub fn grow_cluster(run: &PercolationRun, replicate: u64) -> ClusterOutcome {
    let d = run.d;
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    rng.set_stream(replicate);
    // false: queued, true: all incident edges decided.
    let mut done: FxHashMap<u128, bool> = FxHashMap::default();
    let origin = [0i32; MAX_D];
    done.insert(key(&origin), false);
    let mut queue = VecDeque::from([origin]);
    let mut edges = 0usize;
    while let Some(v) = queue.pop_front() {
        done.insert(key(&v), true);
        for axis in 0..d {
            for sign in [1, -1] {
                let mut w = v;
                w[axis] += sign;
                let kw = key(&w);
                if done.get(&kw) == Some(&true) {
                    continue; // edge was decided from the other end
                }
                if !rng.random_bool(run.p) {
                    continue;
                }
                edges += 1;
                if edges > run.cluster_cap {
                    return ClusterOutcome::Capped;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = done.entry(kw) {
                    e.insert(false);
                    queue.push_back(w);
                }
            }
        }
    }
    ClusterOutcome::Size(edges)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClusterHistogram {
    pub samples: u64,
    pub capped: u64,
    /// Size in edges → number of replicates.
    pub counts: BTreeMap<usize, u64>,
}

impl ClusterHistogram {
    fn push(&mut self, o: ClusterOutcome) {
        self.samples += 1;
        match o {
            ClusterOutcome::Size(s) => *self.counts.entry(s).or_default() += 1,
            ClusterOutcome::Capped => self.capped += 1,
        }
    }

    fn merge(mut self, other: ClusterHistogram) -> ClusterHistogram {
        self.samples += other.samples;
        self.capped += other.capped;
        for (s, c) in other.counts {
            *self.counts.entry(s).or_default() += c;
        }
        self
    }

    pub fn count(&self, n: usize) -> u64 {
        self.counts.get(&n).copied().unwrap_or(0)
    }
}

const CHUNK: u64 = 4096;

/// Run replicates `0..samples` on `parallelism` threads.
pub fn simulate(run: &PercolationRun, parallelism: usize) -> Result<ClusterHistogram> {
    run.validate()?;
    let chunks = run.samples.div_ceil(CHUNK);
    let work = |c: u64| {
        let mut h = ClusterHistogram::default();
        for r in c * CHUNK..((c + 1) * CHUNK).min(run.samples) {
            h.push(grow_cluster(run, r));
        }
        h
    };
    if parallelism <= 1 {
        return Ok((0..chunks).map(work).fold(ClusterHistogram::default(), ClusterHistogram::merge));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(work)
            .reduce(ClusterHistogram::default, ClusterHistogram::merge)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PnEstimate {
    pub n: usize,
    pub estimate: f64,
    /// Binomial standard error `sqrt(P(1-P)/samples)`.
    pub se: f64,
    pub hits: u64,
    pub samples: u64,
}

impl ClusterHistogram {
    /// Frequency of exact size `n`. Capped replicates stay in the
    /// denominator but never count as hits.
    pub fn estimate(&self, n: usize) -> PnEstimate {
        let hits = self.count(n);
        let est = hits as f64 / self.samples as f64;
        PnEstimate {
            n,
            estimate: est,
            se: (est * (1.0 - est) / self.samples as f64).sqrt(),
            hits,
            samples: self.samples,
        }
    }
}

pub fn estimate_pn(run: &PercolationRun, n: usize, parallelism: usize) -> Result<PnEstimate> {
    if run.cluster_cap <= n {
        return Err(Error::Parameter(format!(
            "cluster_cap = {} must exceed n = {n}",
            run.cluster_cap
        )));
    }
    Ok(simulate(run, parallelism)?.estimate(n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QEstimate {
    /// Least-squares slope of `-log P_n` against `n`.
    pub q: Option<f64>,
    /// Standard error of the slope from the point errors.
    pub se: Option<f64>,
    pub intercept: Option<f64>,
    pub window: Vec<usize>,
    /// "ok" or "insufficient-data".
    pub status: &'static str,
    pub note: Option<String>,
}

/// Fit `-log P_n = q n + c` over `(n, P_n, se(P_n))` points. Points with
/// zero `P_n` make the window unusable. Point errors are propagated as
/// `se/P` on the log scale; exact points carry zero error.
pub fn q_fit(points: &[(usize, f64, f64)]) -> QEstimate {
    let window: Vec<usize> = points.iter().map(|p| p.0).collect();
    let insufficient = |why: &str| QEstimate {
        q: None,
        se: None,
        intercept: None,
        window: window.clone(),
        status: "insufficient-data",
        note: Some(why.to_string()),
    };
    if points.len() < 2 {
        return insufficient("fewer than two points");
    }
    if let Some(z) = points.iter().find(|p| !(p.1 > 0.0)) {
        return insufficient(&format!("no probability mass at n = {}", z.0));
    }
    let k = points.len() as f64;
    let xbar = points.iter().map(|p| p.0 as f64).sum::<f64>() / k;
    let ybar = points.iter().map(|p| -p.1.ln()).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - xbar).powi(2)).sum();
    let slope = points
        .iter()
        .map(|p| (p.0 as f64 - xbar) * (-p.1.ln() - ybar))
        .sum::<f64>()
        / sxx;
    let var: f64 = points
        .iter()
        .map(|p| ((p.0 as f64 - xbar) / sxx).powi(2) * (p.2 / p.1).powi(2))
        .sum();
    QEstimate {
        q: Some(slope),
        se: Some(var.sqrt()),
        intercept: Some(ybar - slope * xbar),
        window,
        status: "ok",
        note: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(p: f64, samples: u64) -> PercolationRun {
        PercolationRun {
            d: 2,
            p,
            seed: 7,
            samples,
            cluster_cap: DEFAULT_CLUSTER_CAP,
        }
    }

    #[test]
    fn trivial_probabilities() {
        for r in 0..20 {
            assert_eq!(grow_cluster(&run(0.0, 1), r), ClusterOutcome::Size(0));
            let capped = PercolationRun { cluster_cap: 500, ..run(1.0, 1) };
            assert_eq!(grow_cluster(&capped, r), ClusterOutcome::Capped);
        }
        assert_eq!(estimate_pn(&run(0.0, 100), 3, 1).unwrap().estimate, 0.0);
    }

    #[test]
    fn replicates_are_reproducible() {
        let r = run(0.4, 1);
        for rep in 0..50 {
            assert_eq!(grow_cluster(&r, rep), grow_cluster(&r, rep));
        }
        let a = simulate(&run(0.3, 20_000), 1).unwrap();
        let b = simulate(&run(0.3, 20_000), 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_edge_frequency() {
        let h = simulate(&run(0.1, 200_000), 4).unwrap();
        let e = h.estimate(1);
        let exact = 4.0 * 0.1 * 0.9f64.powi(6);
        assert!((e.estimate - exact).abs() < 4.0 * e.se, "{e:?} vs {exact}");
    }

    #[test]
    fn validation() {
        assert!(simulate(&run(0.3, 0), 1).is_err());
        assert!(simulate(&PercolationRun { d: 1, ..run(0.3, 1) }, 1).is_err());
        assert!(estimate_pn(&PercolationRun { cluster_cap: 3, ..run(0.3, 10) }, 3, 1).is_err());
    }

    #[test]
    fn q_fit_recovers_slope() {
        let pts: Vec<_> = (1..=6).map(|n| (n, (-0.7 * n as f64 - 0.2).exp(), 0.0)).collect();
        let q = q_fit(&pts);
        assert!((q.q.unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(q_fit(&[(1, 0.1, 0.0), (2, 0.0, 0.0)]).status, "insufficient-data");
    }
}
