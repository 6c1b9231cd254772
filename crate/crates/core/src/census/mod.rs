//! Exact counts of edge animals by edge count `n` and perimeter `m`.
//!
//! The enumeration produces one representative per translation class: the
//! translate whose lexicographically minimal vertex is the origin. For each
//! `(n, m)` the table keeps
//!
//! * `sigma_prime` — the number of translation classes, and
//! * `vertex_weighted` — the sum of vertex counts over those classes,
//!
//! and the origin-incident count `σ_{n,m}` is the vertex-weighted sum: a
//! class with `v` vertices has exactly `v` translates that contain the
//! origin.

mod enumerate;
mod io;
mod oracle;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::AnimalStats;
use crate::ratio::Beta;

pub use enumerate::{audit_identities, enumerate_census, enumerate_with_visitor, AnimalVisitor, Frame, IdentityAudit};
pub use io::{from_json_str, load_census, save_census, to_json_string, write_csv, CENSUS_FORMAT_VERSION};
pub use oracle::{brute_force_census, ORACLE_N_MAX_LIMIT};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub sigma_prime: u64,
    pub vertex_weighted: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    d: usize,
    n_max: usize,
    entries: BTreeMap<(usize, usize), CensusEntry>,
}

impl CensusTable {
    pub fn new(d: usize, n_max: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if n_max == 0 {
            return Err(Error::Parameter("n_max must be at least 1".into()));
        }
        Ok(CensusTable {
            d,
            n_max,
            entries: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Add `count` classes with `vertices` vertices each.
    pub fn add(&mut self, n: usize, m: usize, count: u64, vertex_sum: u64) -> Result<()> {
        if n == 0 || n > self.n_max || m == 0 || m > AnimalStats::max_perimeter(self.d, n) {
            return Err(Error::Parameter(format!(
                "entry (n={n}, m={m}) is outside the admissible range for d={}, n_max={}",
                self.d, self.n_max
            )));
        }
        let e = self.entries.entry((n, m)).or_default();
        e.sigma_prime = e
            .sigma_prime
            .checked_add(count)
            .ok_or_else(|| Error::ResourceLimit("64-bit class count overflow".into()))?;
        e.vertex_weighted = e
            .vertex_weighted
            .checked_add(vertex_sum)
            .ok_or_else(|| Error::ResourceLimit("64-bit vertex-weighted count overflow".into()))?;
        Ok(())
    }

    pub fn entry(&self, n: usize, m: usize) -> CensusEntry {
        self.entries.get(&(n, m)).copied().unwrap_or_default()
    }

    /// `σ'_{n,m}`: translation classes.
    pub fn sigma_prime(&self, n: usize, m: usize) -> u64 {
        self.entry(n, m).sigma_prime
    }

    /// `σ_{n,m}`: animals containing the origin.
    pub fn sigma(&self, n: usize, m: usize) -> u64 {
        self.entry(n, m).vertex_weighted
    }

    /// Nonzero entries in `(n, m)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), CensusEntry)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Nonzero `(m, entry)` pairs of row `n`.
    pub fn row(&self, n: usize) -> impl Iterator<Item = (usize, CensusEntry)> + '_ {
        self.entries
            .range((n, 0)..(n + 1, 0))
            .map(|(&(_, m), &e)| (m, e))
    }

    pub fn classes(&self, n: usize) -> u64 {
        self.row(n).map(|(_, e)| e.sigma_prime).sum()
    }

    /// Check the structural invariants every valid table satisfies.
    pub fn validate(&self) -> Result<()> {
        for ((n, m), e) in self.entries() {
            if n == 0 || n > self.n_max || m == 0 || m > AnimalStats::max_perimeter(self.d, n) {
                return Err(Error::Verification(format!("entry (n={n}, m={m}) out of range")));
            }
            let upper = e.sigma_prime.checked_mul(n as u64 + 1);
            if e.sigma_prime == 0
                || e.vertex_weighted < e.sigma_prime
                || upper.is_some_and(|u| e.vertex_weighted > u)
            {
                return Err(Error::Verification(format!(
                    "entry (n={n}, m={m}) violates sigma' <= sigma <= (n+1) sigma'"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn from_entries(
        d: usize,
        n_max: usize,
        entries: BTreeMap<(usize, usize), CensusEntry>,
    ) -> Self {
        CensusTable { d, n_max, entries }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateValues {
    /// `σ_{n,⌊βn⌋}^{1/n}`.
    pub f_n: f64,
    /// `σ'_{n,⌊βn⌋}^{1/n}`.
    pub f_prime_n: f64,
    /// `f_n(β) β^β / (β+1)^{β+1}`, a finite-n stand-in for `g(β)`.
    pub g_hat_n: f64,
}

/// `β^β / (β+1)^{β+1}` with `0^0 = 1`.
pub fn delyon_factor(beta: f64) -> f64 {
    let bb = if beta == 0.0 { 1.0 } else { beta.powf(beta) };
    bb / (beta + 1.0).powf(beta + 1.0)
}

pub fn rate_values(table: &CensusTable, n: usize, beta: Beta) -> Result<RateValues> {
    if n == 0 || n > table.n_max {
        return Err(Error::BeyondCensus { n, n_max: table.n_max });
    }
    // Finite-n rows reach ratios up to 2(d-1) + 2d (a single edge), so the
    // domain is (0, 4d-2] rather than the asymptotic (0, 2(d-1)).
    let top = 4 * table.d as i64 - 2;
    if !beta.is_positive() || beta.value() > top as f64 {
        return Err(Error::Domain(format!("beta = {beta} not in (0, {top}]")));
    }
    let m = beta.floor_times(n as u64) as usize;
    let root = |x: u64| (x as f64).powf(1.0 / n as f64);
    let f_n = root(table.sigma(n, m));
    Ok(RateValues {
        f_n,
        f_prime_n: root(table.sigma_prime(n, m)),
        g_hat_n: f_n * delyon_factor(beta.value()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DelyonReport {
    pub entries_checked: usize,
    /// Largest `σ_{n,m} n^n m^m / (n+m)^{n+m}` over the table.
    pub max_ratio: f64,
    pub max_ratio_at: Option<(usize, usize)>,
}

/// Check `σ_{n,m} n^n m^m ≤ (n+m)^{n+m}` exactly for every entry.
pub fn delyon_check(table: &CensusTable) -> Result<DelyonReport> {
    let mut report = DelyonReport {
        entries_checked: 0,
        max_ratio: 0.0,
        max_ratio_at: None,
    };
    for ((n, m), e) in table.entries() {
        let (nb, mb) = (BigUint::from(n), BigUint::from(m));
        let lhs = BigUint::from(e.vertex_weighted) * nb.pow(n as u32) * mb.pow(m as u32);
        let rhs = BigUint::from(n + m).pow((n + m) as u32);
        if lhs > rhs {
            return Err(Error::Verification(format!(
                "sigma_{{{n},{m}}} = {} exceeds (n+m)^(n+m)/(n^n m^m)",
                e.vertex_weighted
            )));
        }
        let (nf, mf) = (n as f64, m as f64);
        let log_ratio = (e.vertex_weighted as f64).ln() + nf * nf.ln() + mf * mf.ln()
            - (nf + mf) * (nf + mf).ln();
        let ratio = log_ratio.exp();
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.max_ratio_at = Some((n, m));
        }
        report.entries_checked += 1;
    }
    if report.entries_checked == 0 {
        return Err(Error::Parameter("census table is empty".into()));
    }
    Ok(report)
}
