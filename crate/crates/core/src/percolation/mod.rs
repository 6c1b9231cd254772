//! Bond percolation at the origin: exact cluster-size probabilities from a
//! census, the subcritical maximisers `t_n`, and a Monte Carlo sampler.

mod mc;

use serde::Serialize;

use crate::census::CensusTable;
use crate::error::{Error, Result};

pub use mc::{
    estimate_pn, grow_cluster, q_fit, simulate, ClusterHistogram, ClusterOutcome, PercolationRun, PnEstimate,
    QEstimate, DEFAULT_CLUSTER_CAP,
};

/// Bond threshold of the square lattice (exact).
pub const PC_SQUARE: f64 = 0.5;
/// Bond threshold of the simple cubic lattice (numerical literature value).
pub const PC_CUBIC: f64 = 0.2488126;

/// Default `p_c` per dimension, with a note on where the number comes from.
pub fn default_pc(d: usize) -> Option<(f64, &'static str)> {
    match d {
        2 => Some((PC_SQUARE, "external constant: exact square-lattice bond threshold")),
        3 => Some((PC_CUBIC, "external constant: numerical simple-cubic bond threshold")),
        _ => None,
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} not in [0, 1]")));
    }
    Ok(())
}

/// Neumaier-compensated sum.
#[derive(Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// `P_p(|C(0)| = n) = Σ_m σ_{n,m} p^n (1-p)^m`. For `n = 0` this is
/// `(1-p)^{2d}`, the empty-animal term.
pub fn exact_pn(table: &CensusTable, p: f64, n: usize) -> Result<f64> {
    check_p(p)?;
    if n > table.n_max() {
        return Err(Error::BeyondCensus { n, n_max: table.n_max() });
    }
    if n == 0 {
        return Ok((1.0 - p).powi(2 * table.dim() as i32));
    }
    let mut sum = Sum::default();
    let pn = p.powi(n as i32);
    for (m, e) in table.row(n) {
        sum.add(e.vertex_weighted as f64 * pn * (1.0 - p).powi(m as i32));
    }
    Ok(sum.value())
}

/// `σ_N(p) = Σ_{n ≤ N} P_p(|C(0)| = n)`, including `n = 0`.
pub fn sigma_n(table: &CensusTable, p: f64, big_n: usize) -> Result<f64> {
    let mut sum = Sum::default();
    for n in 0..=big_n {
        sum.add(exact_pn(table, p, n)?);
    }
    Ok(sum.value())
}

/// `Σ_{n ≤ N} n P_p(|C(0)| = n)`, a lower bound on the mean cluster size.
pub fn chi_truncated(table: &CensusTable, p: f64, big_n: usize) -> Result<f64> {
    let mut sum = Sum::default();
    for n in 1..=big_n {
        sum.add(n as f64 * exact_pn(table, p, n)?);
    }
    Ok(sum.value())
}

/// Composite Simpson estimate of `∫_0^{p_hi} χ_N(p)^{1/2} dp` with
/// `intervals` (rounded up to even) panels. Truncation makes it a lower
/// bound on the untruncated integral over the same range.
pub fn newman_integral(table: &CensusTable, big_n: usize, p_hi: f64, intervals: usize) -> Result<f64> {
    check_p(p_hi)?;
    let k = (intervals.max(2) + 1) & !1;
    let h = p_hi / k as f64;
    let mut sum = Sum::default();
    for j in 0..=k {
        let w = if j == 0 || j == k {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum.add(w * chi_truncated(table, j as f64 * h, big_n)?.sqrt());
    }
    Ok(sum.value() * h / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubcriticalMax {
    pub n: usize,
    pub t_n: f64,
    /// `1/t_n - 1`.
    pub alpha_n: f64,
    pub p_c: f64,
    /// `P_{t_n}(|C(0)| = n)`.
    pub value: f64,
    /// True when the maximiser sits at `p_c`.
    pub clamped: bool,
}

const GRID: usize = 10_000;

/// The least maximiser of `P_p(|C(0)| = n)` over `(0, p_c]`.
///
/// A single-perimeter row is maximised in closed form at `n/(n+m)`. In
/// general the maximum of a 10^4-point grid is refined by bisection on the
/// sign of the derivative inside the neighbouring grid cells.
pub fn find_tn(table: &CensusTable, n: usize, p_c: f64) -> Result<SubcriticalMax> {
    if !(p_c > 0.0 && p_c < 1.0) {
        return Err(Error::Domain(format!("p_c = {p_c} not in (0, 1)")));
    }
    if n == 0 || n > table.n_max() {
        return Err(Error::BeyondCensus { n, n_max: table.n_max() });
    }
    let row: Vec<(usize, f64)> = table.row(n).map(|(m, e)| (m, e.vertex_weighted as f64)).collect();
    let value = |p: f64| exact_pn(table, p, n).expect("validated");
    let finish = |t: f64| {
        let t = t.min(p_c);
        SubcriticalMax {
            n,
            t_n: t,
            alpha_n: 1.0 / t - 1.0,
            p_c,
            value: value(t),
            clamped: t == p_c,
        }
    };
    if row.len() == 1 {
        let m = row[0].0;
        return Ok(finish(n as f64 / (n + m) as f64));
    }
    // Sign of d/dp P_p, rescaled by p^{1-n} (1-p)^{1-m_min} > 0.
    let m_min = row[0].0;
    let slope = |p: f64| -> f64 {
        let mut s = Sum::default();
        for &(m, w) in &row {
            s.add(w * (1.0 - p).powi((m - m_min) as i32) * (n as f64 - (n + m) as f64 * p));
        }
        s.value()
    };
    let h = p_c / GRID as f64;
    let (mut best, mut best_v) = (1, f64::NEG_INFINITY);
    for j in 1..=GRID {
        let v = value(j as f64 * h);
        if v > best_v {
            best = j;
            best_v = v;
        }
    }
    let mut lo = (best - 1) as f64 * h;
    let mut hi = ((best + 1) as f64 * h).min(p_c);
    if slope(hi) > 0.0 {
        return Ok(finish(hi));
    }
    if slope(lo.max(f64::MIN_POSITIVE)) < 0.0 {
        return Ok(finish(best as f64 * h));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(finish(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::enumerate_census;
    use approx::assert_relative_eq;

    #[test]
    fn exact_examples() {
        let t = enumerate_census(2, 2, 1).unwrap();
        assert_relative_eq!(exact_pn(&t, 0.5, 1).unwrap(), 0.03125, max_relative = 1e-15);
        assert_relative_eq!(exact_pn(&t, 0.1, 2).unwrap(), 18.0 * 0.01 * 0.9f64.powi(8), max_relative = 1e-15);
        assert_relative_eq!(exact_pn(&t, 1e-9, 1).unwrap() / 1e-9, 4.0, max_relative = 1e-7);
        assert!(exact_pn(&t, 0.1, 3).is_err());
        assert_relative_eq!(sigma_n(&t, 0.5, 0).unwrap(), 0.0625);
        let chi = chi_truncated(&t, 0.1, 2).unwrap();
        assert_relative_eq!(chi, 0.3675, epsilon = 1e-4);
    }

    #[test]
    fn tn_closed_forms() {
        let t = enumerate_census(2, 3, 1).unwrap();
        let t1 = find_tn(&t, 1, 0.5).unwrap();
        assert_relative_eq!(t1.t_n, 1.0 / 7.0, max_relative = 1e-12);
        assert_relative_eq!(t1.alpha_n, 6.0, max_relative = 1e-12);
        assert_relative_eq!(find_tn(&t, 2, 0.5).unwrap().t_n, 0.2, max_relative = 1e-12);
        let clamped = find_tn(&t, 1, 0.1).unwrap();
        assert!(clamped.clamped && clamped.t_n == 0.1);
    }

    #[test]
    fn tn_general_row_is_stationary() {
        let t = enumerate_census(2, 6, 1).unwrap();
        for n in 3..=6 {
            let r = find_tn(&t, n, 0.5).unwrap();
            let f = |p: f64| exact_pn(&t, p, n).unwrap();
            assert!(r.t_n <= 0.5);
            for j in 1..=500 {
                assert!(f(j as f64 * 0.001) <= r.value * (1.0 + 1e-12));
            }
            if !r.clamped {
                let eps = 1e-6;
                assert!((f(r.t_n + eps) - f(r.t_n - eps)).abs() < 1e-9 * r.value);
            }
        }
    }

    #[test]
    fn newman_integral_grows_with_range() {
        let t = enumerate_census(2, 4, 1).unwrap();
        let a = newman_integral(&t, 4, 0.2, 100).unwrap();
        let b = newman_integral(&t, 4, 0.4, 100).unwrap();
        assert!(0.0 < a && a < b);
    }
}
