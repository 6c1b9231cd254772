//! Exact perimeter correction for a concatenated pair.
//!
//! `τ = γ1 * R2 * γ2 * R2 * ρ_d^{a⃗} * R2 * S_k^i * R2 * φ_{s,…,s}` with
//! `2d-1` chamber bits `a⃗`. By the closed forms and the `+2(d-2)` per link,
//!
//! ```text
//! e(τ) = n1 + n2 + K,   K = e(ρ) + e(S) + e(φ) + 8
//! o(τ) = m1 + m2 + o(ρ) + o(S) + o(φ) + 8(d-2)
//! ```
//!
//! and each chamber bit moves `o(τ)` by exactly one, so once `(k, i, s)`
//! put `⌊β e(τ)⌋ - o(τ)|_{a⃗=0}` into `0..=2d-1`, the bits finish the job.
//! Every result is rebuilt and checked with `compute_stats`.

use serde::Serialize;

use super::{build_phi, build_rho_d, build_s, concat_all, phi_stats, r2, rho_d_stats, s_stats};
use crate::error::{Error, Result};
use crate::lattice::{compute_stats, lex_extreme_vertices, Animal, Vertex};
use crate::ratio::Beta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    /// Cube side tied to `k` through the scale `a`, `i ∈ 1..=k-2`.
    Analytic,
    /// Bounded scan over `k`, `i`, chamber bits and cube side.
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionParams {
    pub a_vec: Vec<u8>,
    pub k: usize,
    pub i: usize,
    pub q_vec: Vec<usize>,
    /// The scale `a` with `q_j = ⌊(ak)^{1/d}⌋`; absent for brute-force finds.
    pub cube_scale: Option<f64>,
    #[serde(rename = "K")]
    pub big_k: usize,
    pub method: SearchMethod,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchBounds {
    pub k_cap: usize,
    /// Largest cube side tried by the brute-force stage.
    pub s_cap: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { k_cap: 64, s_cap: 64 }
    }
}

/// Where `γ1` ends and `γ2` begins and ends inside `τ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Joints {
    pub gamma1_max: Vertex,
    pub gamma2_min: Vertex,
    pub gamma2_max: Vertex,
}

#[derive(Clone, Debug, Serialize)]
pub struct Correction {
    pub tau: Animal,
    pub params: ConstructionParams,
    pub joints: Joints,
    /// `(e(τ), o(τ))`, confirmed by `compute_stats`.
    pub target: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found(Box<Correction>),
    NotFound { bounds: SearchBounds },
}

impl SearchOutcome {
    pub fn found(self) -> Option<Correction> {
        match self {
            SearchOutcome::Found(c) => Some(*c),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

/// Lowest-lex bit vector of length `len` with `ones` bits set.
fn low_bits(len: usize, ones: usize) -> Vec<u8> {
    (0..len).map(|j| u8::from(j >= len - ones)).collect()
}

struct Base {
    d: usize,
    beta: Beta,
    n: usize,
    m: usize,
}

impl Base {
    /// Chamber-bit sum needed for `(k, i, s)`, if it is attainable.
    fn bits_needed(&self, k: usize, i: usize, s: usize) -> Option<(usize, usize)> {
        let d = self.d;
        let chambers = 2 * d - 1;
        let (re, ro) = rho_d_stats(d, chambers, 0);
        let (se, so) = s_stats(d, k, i);
        let (pe, po) = phi_stats(&vec![s; d]);
        let big_k = re + se + pe + 8;
        let target = self.beta.floor_times((self.n + big_k) as u64);
        let fixed = (self.m + ro + so + po + 8 * (d - 2)) as i64;
        let need = target - fixed;
        (0..=chambers as i64).contains(&need).then_some((need as usize, big_k))
    }

    fn params(&self, k: usize, i: usize, s: usize, scale: Option<f64>, method: SearchMethod) -> Option<ConstructionParams> {
        let (ones, big_k) = self.bits_needed(k, i, s)?;
        Some(ConstructionParams {
            a_vec: low_bits(2 * self.d - 1, ones),
            k,
            i,
            q_vec: vec![s; self.d],
            cube_scale: scale,
            big_k,
            method,
        })
    }

    /// Midpoint of the positive part of the admissible interval for `a`.
    fn cube_scale(&self) -> Option<f64> {
        let d = self.d as f64;
        let b = self.beta.value();
        let x = (4.0 * (d - 1.0) - 2.0 * b) / (b * d);
        let y = (4.0 * (d - 1.0) + 2.0 * (d - 2.0) - 3.0 * b) / (b * d);
        let (lo, hi) = (x.min(y).max(0.0), x.max(y));
        (hi > lo && b != 2.0 * (d - 2.0)).then_some(0.5 * (lo + hi))
    }

    fn analytic(&self, bounds: &SearchBounds) -> Option<ConstructionParams> {
        let a = self.cube_scale()?;
        for k in 3..=bounds.k_cap {
            let s = ((a * k as f64).powf(1.0 / self.d as f64).floor() as usize).max(1);
            for i in 1..=k - 2 {
                if let Some(p) = self.params(k, i, s, Some(a), SearchMethod::Analytic) {
                    return Some(p);
                }
            }
        }
        None
    }

    /// Lowest `(k, i, a⃗, s)` that works.
    fn brute(&self, bounds: &SearchBounds) -> Option<ConstructionParams> {
        for k in 2..=bounds.k_cap {
            for i in 0..=k - 2 {
                let best = (1..=bounds.s_cap)
                    .filter_map(|s| self.params(k, i, s, None, SearchMethod::BruteForce))
                    .min_by(|x, y| (&x.a_vec, x.q_vec[0]).cmp(&(&y.a_vec, y.q_vec[0])));
                if best.is_some() {
                    return best;
                }
            }
        }
        None
    }
}

fn assemble(g1: &Animal, g2: &Animal, p: &ConstructionParams) -> Result<(Animal, Joints)> {
    let d = g1.dim();
    let link = r2(d)?;
    let rho = build_rho_d(d, p.a_vec.len(), &p.a_vec)?;
    let s = build_s(d, p.k, p.i)?;
    let phi = build_phi(&p.q_vec)?;
    let tau = concat_all([g1, &link, g2, &link, &rho, &link, &s, &link, &phi])?;
    let (_, j1) = lex_extreme_vertices(g1)?;
    let (_, top2) = lex_extreme_vertices(g2)?;
    let gamma2_min = j1.step(0, 2);
    let gamma2_max = gamma2_min.offset(top2.coords());
    Ok((
        tau,
        Joints {
            gamma1_max: j1,
            gamma2_min,
            gamma2_max,
        },
    ))
}

fn search(beta: Beta, g1: &Animal, g2: &Animal, n: usize, m: usize, bounds: SearchBounds) -> Result<SearchOutcome> {
    let d = g1.dim();
    let base = Base { d, beta, n, m };
    let Some(params) = base.analytic(&bounds).or_else(|| base.brute(&bounds)) else {
        return Ok(SearchOutcome::NotFound { bounds });
    };
    let (tau, joints) = assemble(g1, g2, &params)?;
    let st = compute_stats(&tau)?;
    let want = (n + params.big_k, beta.floor_times((n + params.big_k) as u64) as usize);
    if (st.n, st.m) != want {
        return Err(Error::Verification(format!(
            "correction {params:?} built (e, o) = ({}, {}), expected {want:?}",
            st.n, st.m
        )));
    }
    Ok(SearchOutcome::Found(Box::new(Correction {
        tau,
        params,
        joints,
        target: want,
    })))
}

fn check_beta(beta: Beta, d: usize) -> Result<()> {
    if !beta.in_open_range(2 * (d as i64 - 1)) {
        return Err(Error::Domain(format!("beta = {beta} not in (0, {})", 2 * (d - 1))));
    }
    Ok(())
}

/// Find `τ` with `(e, o) = (n1+n2+K, ⌊β(n1+n2+K)⌋)`, requiring
/// `m_j = ⌊β n_j⌋` for both inputs.
pub fn correction_search(beta: Beta, g1: &Animal, g2: &Animal, bounds: SearchBounds) -> Result<SearchOutcome> {
    let d = g1.dim();
    check_beta(beta, d)?;
    let (s1, s2) = (compute_stats(g1)?, compute_stats(g2)?);
    for s in [&s1, &s2] {
        if s.m as i64 != beta.floor_times(s.n as u64) {
            return Err(Error::Parameter(format!(
                "animal with (n, m) = ({}, {}) is not at ratio {beta}: floor(beta n) = {}",
                s.n,
                s.m,
                beta.floor_times(s.n as u64)
            )));
        }
    }
    search(beta, g1, g2, s1.n + s2.n, s1.m + s2.m, bounds)
}

/// Same construction without the ratio precondition on the inputs.
pub fn correct_pair(beta: Beta, g1: &Animal, g2: &Animal, bounds: SearchBounds) -> Result<SearchOutcome> {
    check_beta(beta, g1.dim())?;
    let (s1, s2) = (compute_stats(g1)?, compute_stats(g2)?);
    search(beta, g1, g2, s1.n + s2.n, s1.m + s2.m, bounds)
}

/// Recover `(γ1, γ2)` from `τ` by cutting at the joints.
pub fn decompose(tau: &Animal, joints: &Joints) -> Result<(Animal, Animal)> {
    let d = tau.dim();
    let g1 = tau.edges().iter().filter(|e| e.tip() <= joints.gamma1_max).cloned();
    let g1 = Animal::new(d, g1)?;
    let back: Vec<i32> = joints.gamma2_min.coords().iter().map(|c| -c).collect();
    let g2 = tau
        .edges()
        .iter()
        .filter(|e| *e.base() >= joints.gamma2_min && e.tip() <= joints.gamma2_max)
        .map(|e| e.translate(&back));
    Ok((g1, Animal::new(d, g2)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct LogConcavityReport {
    pub beta1: Beta,
    pub beta2: Beta,
    pub lambda: Beta,
    pub mixed: Beta,
    pub n1: usize,
    pub n2: usize,
    pub outcome: SearchOutcome,
}

/// Splice an animal at ratio `β1` to one at `β2` and correct to the
/// mixture `λβ1 + (1-λ)β2`. Requires `m_j = ⌊β_j n_j⌋`.
pub fn log_concavity_diagnostic(
    beta1: Beta,
    beta2: Beta,
    lambda: Beta,
    g1: &Animal,
    g2: &Animal,
    bounds: SearchBounds,
) -> Result<LogConcavityReport> {
    let d = g1.dim();
    if lambda.value() < 0.0 || lambda.value() > 1.0 {
        return Err(Error::Domain(format!("lambda = {lambda} not in [0, 1]")));
    }
    let mixed = Beta::mix(lambda, beta1, beta2);
    check_beta(mixed, d)?;
    let (s1, s2) = (compute_stats(g1)?, compute_stats(g2)?);
    for (s, b) in [(&s1, beta1), (&s2, beta2)] {
        if s.m as i64 != b.floor_times(s.n as u64) {
            return Err(Error::Parameter(format!(
                "animal with (n, m) = ({}, {}) is not at ratio {b}",
                s.n, s.m
            )));
        }
    }
    let outcome = search(mixed, g1, g2, s1.n + s2.n, s1.m + s2.m, bounds)?;
    Ok(LogConcavityReport {
        beta1,
        beta2,
        lambda,
        mixed,
        n1: s1.n,
        n2: s2.n,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_phi;

    #[test]
    fn block_pair_at_ratio_one() {
        // The 2x2 block has (n, m) = (12, 12).
        let block = build_phi(&[2, 2]).unwrap();
        let c = correction_search(Beta::exact(1, 1), &block, &block, SearchBounds::default())
            .unwrap()
            .found()
            .expect("found");
        let (e, o) = c.target;
        assert_eq!(o, e);
        let (a, b) = decompose(&c.tau, &c.joints).unwrap();
        assert_eq!((a, b), (block.clone(), block));
    }

    #[test]
    fn rejects_off_ratio_inputs() {
        let sq = build_phi(&[1, 1]).unwrap();
        assert!(matches!(
            correction_search(Beta::exact(1, 1), &sq, &sq, SearchBounds::default()),
            Err(Error::Parameter(_))
        ));
        assert!(correction_search(Beta::exact(2, 1), &sq, &sq, SearchBounds::default()).is_err());
    }

    #[test]
    fn unattainable_bounds_report_not_found() {
        let block = build_phi(&[2, 2]).unwrap();
        let out = correction_search(Beta::exact(1, 1), &block, &block, SearchBounds { k_cap: 2, s_cap: 1 }).unwrap();
        assert!(matches!(out, SearchOutcome::NotFound { .. }));
    }
}
