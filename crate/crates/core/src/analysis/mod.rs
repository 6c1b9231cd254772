//! Rate functions and their expansions, the self-avoiding-path bound on
//! `p_c`, and finite-size probes of the scaling exponents.
//!
//! The rate functions are evaluated in `log1p` form so that they vanish
//! exactly on their zero sets and keep relative accuracy near them.

mod probes;
mod saw;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Status;

pub use probes::{
    probe_lambda, probe_rho, probe_sigma_hat, theorem43_brackets, window_sums, Bracket, BracketReport, WindowSums,
    ExponentProbe, FProxy, Fit, TnWindow, EXPLORATORY,
};
pub use saw::{pc_lower_bound, saw_count, saw_count_oracle, PcBoundReport, PcBoundRow, SAW_WORK_LIMIT};

fn domain(what: &str) -> Error {
    Error::Domain(what.to_string())
}

/// `φ(β, γ) = (γ+1)log(γ+1) − γ log γ + γ log β − (γ+1)log(β+1)`, with
/// `0 log 0 = 0`. Never positive; zero exactly at `γ = β`.
pub fn phi(beta: f64, gamma: f64) -> Result<f64> {
    if !(beta > 0.0) || !(gamma >= 0.0) || !beta.is_finite() || !gamma.is_finite() {
        return Err(domain("phi needs beta > 0 and gamma >= 0"));
    }
    let x = gamma - beta;
    let tail = if gamma == 0.0 { 0.0 } else { gamma * (x / beta).ln_1p() };
    Ok((gamma + 1.0) * (x / (beta + 1.0)).ln_1p() - tail)
}

/// `∂φ/∂γ = log(1 + 1/γ) − log(1 + 1/β)`.
pub fn phi_dgamma(beta: f64, gamma: f64) -> Result<f64> {
    if !(beta > 0.0) || !(gamma > 0.0) {
        return Err(domain("phi_dgamma needs beta, gamma > 0"));
    }
    Ok((1.0 / gamma).ln_1p() - (1.0 / beta).ln_1p())
}

/// `ξ(p, β) = β log β − (β+1) log(β+1) − log p − β log(1−p)`, evaluated
/// straight from the formula (it equals `−φ(1/p − 1, β)`).
pub fn xi(p: f64, beta: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) || !(beta > 0.0) {
        return Err(domain("xi needs p in (0, 1) and beta > 0"));
    }
    Ok(beta * beta.ln() - (beta + 1.0) * beta.ln_1p() - p.ln() - beta * (-p).ln_1p())
}

/// `Φ(γ, α, β) = β log γ − (β+1) log(γ+1) − β log α + (β+1) log(α+1)`.
pub fn capital_phi(gamma: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(gamma > 0.0) || !(alpha > 0.0) || !(beta >= 0.0) {
        return Err(domain("capital_phi needs gamma, alpha > 0 and beta >= 0"));
    }
    let x = gamma - alpha;
    Ok(beta * (x / alpha).ln_1p() - (beta + 1.0) * (x / (alpha + 1.0)).ln_1p())
}

/// Linear plus quadratic terms of `Φ` about `γ = α`.
pub fn capital_phi_expansion(gamma: f64, alpha: f64, beta: f64) -> f64 {
    let x = gamma - alpha;
    x * (beta - alpha) / (alpha * (alpha + 1.0))
        - 0.5 * x * x * (beta / (alpha * alpha) - (beta + 1.0) / ((alpha + 1.0) * (alpha + 1.0)))
}

/// `(β+1)^{β+1} / β^β`.
pub fn delyon_bound(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(domain("delyon_bound needs beta > 0"));
    }
    Ok(((beta + 1.0) * beta.ln_1p() - beta * beta.ln()).exp())
}

#[derive(Clone, Debug, Serialize)]
pub struct RemainderReport {
    /// `(offset, remainder / offset^3)` in the order given.
    pub ratios: Vec<(f64, f64)>,
    /// Exact cubic coefficient, when known in closed form.
    pub expected: Option<f64>,
    /// `(max − min) / max |ratio|` over the grid.
    pub variation: f64,
    pub status: Status,
}

fn remainder_report(ratios: Vec<(f64, f64)>, expected: Option<f64>, tolerance: f64) -> RemainderReport {
    let lo = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let scale = ratios.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let variation = if scale == 0.0 { 0.0 } else { (hi - lo) / scale };
    let finite = ratios.iter().all(|r| r.1.is_finite());
    RemainderReport {
        ratios,
        expected,
        variation,
        status: Status::from_bool(finite && variation < tolerance),
    }
}

/// Check `φ(α, α+γ) = −γ²/(2α(α+1)) + O(γ³)`: the remainder over `γ³`
/// must stay within 10% across the grid. The limit of that ratio is
/// `(1/α² − 1/(α+1)²)/6`.
pub fn lemma32_check(alpha: f64, gammas: &[f64]) -> Result<RemainderReport> {
    if !(alpha > 0.0) || gammas.is_empty() {
        return Err(domain("lemma32_check needs alpha > 0 and a nonempty grid"));
    }
    let mut ratios = Vec::new();
    for &g in gammas {
        if !(g > 0.0 && g < alpha / 2.0) {
            return Err(domain("grid points must lie in (0, alpha/2)"));
        }
        let rem = phi(alpha, alpha + g)? + g * g / (2.0 * alpha * (alpha + 1.0));
        ratios.push((g, rem / (g * g * g)));
    }
    let c3 = (1.0 / (alpha * alpha) - 1.0 / ((alpha + 1.0) * (alpha + 1.0))) / 6.0;
    Ok(remainder_report(ratios, Some(c3), 0.1))
}

/// Same check for the printed second-order expansion of `Φ` about `γ = α`.
pub fn capital_phi_expansion_check(alpha: f64, beta: f64, offsets: &[f64]) -> Result<RemainderReport> {
    let mut ratios = Vec::new();
    for &x in offsets {
        let rem = capital_phi(alpha + x, alpha, beta)? - capital_phi_expansion(alpha + x, alpha, beta);
        ratios.push((x, rem / (x * x * x)));
    }
    // Third-order coefficient of β log(1+x/α) − (β+1) log(1+x/(α+1)).
    let c3 = (beta / alpha.powi(3) - (beta + 1.0) / (alpha + 1.0).powi(3)) / 3.0;
    Ok(remainder_report(ratios, Some(c3), 0.1))
}

#[derive(Clone, Debug, Serialize)]
pub struct RateGridReport {
    pub points: usize,
    pub max_phi: f64,
    pub max_phi_on_diagonal: f64,
    pub max_xi_identity_error: f64,
    pub max_xi_zero_error: f64,
    pub max_derivative_rel_error: f64,
    pub status: Status,
}

/// Grid sweep of the sign, zero-set, derivative and `ξ = −φ` identities.
/// `resolution` points per axis; `β ∈ (0, 6]`, `p ∈ (0, 1)`.
pub fn rate_function_grid(resolution: usize) -> Result<RateGridReport> {
    let r = resolution.max(2);
    let mut rep = RateGridReport {
        points: 0,
        max_phi: f64::NEG_INFINITY,
        max_phi_on_diagonal: 0.0,
        max_xi_identity_error: 0.0,
        max_xi_zero_error: 0.0,
        max_derivative_rel_error: 0.0,
        status: Status::Pass,
    };
    for i in 1..=r {
        let beta = 6.0 * i as f64 / r as f64;
        let p = i as f64 / (r + 1) as f64;
        rep.max_phi_on_diagonal = rep.max_phi_on_diagonal.max(phi(beta, beta)?.abs());
        rep.max_xi_zero_error = rep.max_xi_zero_error.max(xi(p, 1.0 / p - 1.0)?.abs());
        for j in 1..=r {
            let gamma = 6.0 * j as f64 / r as f64 + 0.013;
            let v = phi(beta, gamma)?;
            rep.max_phi = rep.max_phi.max(v);
            let h = 1e-5 * gamma;
            let fd = (phi(beta, gamma + h)? - phi(beta, gamma - h)?) / (2.0 * h);
            let exact = phi_dgamma(beta, gamma)?;
            if exact.abs() > 1e-3 {
                rep.max_derivative_rel_error = rep.max_derivative_rel_error.max(((fd - exact) / exact).abs());
            }
            let q = j as f64 / (r + 1) as f64;
            let e = (xi(q, beta)? + phi(1.0 / q - 1.0, beta)?).abs();
            rep.max_xi_identity_error = rep.max_xi_identity_error.max(e);
            rep.points += 1;
        }
    }
    let ok = rep.max_phi <= 0.0
        && rep.max_phi_on_diagonal <= 1e-12
        && rep.max_xi_zero_error <= 1e-12
        && rep.max_xi_identity_error <= 1e-12
        && rep.max_derivative_rel_error <= 1e-6;
    rep.status = Status::from_bool(ok);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1.0, 1.0).unwrap(), 0.0);
        for b in [0.5, 1.0, 2.5] {
            assert_eq!(phi(b, b).unwrap(), 0.0);
        }
        let direct = 3.0 * 3f64.ln() - 5.0 * 2f64.ln();
        assert_relative_eq!(phi(1.0, 2.0).unwrap(), direct, max_relative = 1e-14);
        assert_relative_eq!(phi(1.0, 2.0).unwrap(), -0.16989, epsilon = 1e-5);
        assert_relative_eq!(phi(2.0, 0.0).unwrap(), -(3f64.ln()), max_relative = 1e-15);
        assert!(phi(0.0, 1.0).is_err());
    }

    #[test]
    fn xi_examples() {
        for p in [0.3, 0.5] {
            assert!(xi(p, 1.0 / p - 1.0).unwrap().abs() < 1e-12);
        }
        assert_relative_eq!(xi(0.5, 2.0).unwrap(), -phi(1.0, 2.0).unwrap(), max_relative = 1e-12);
        assert!(xi(1.0, 1.0).is_err());
    }

    #[test]
    fn capital_phi_examples() {
        for b in [0.0, 0.7, 3.0] {
            assert_eq!(capital_phi(1.3, 1.3, b).unwrap(), 0.0);
        }
        let r = capital_phi_expansion_check(1.0, 1.0, &[0.1, 0.05, 0.025]).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }

    #[test]
    fn lemma32_examples() {
        let r = lemma32_check(1.0, &[1e-2, 5e-3, 2.5e-3]).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_relative_eq!(r.ratios[2].1, 0.125, max_relative = 1e-2);
        let g = 1e-4;
        assert!((phi(1.0, 1.0 + g).unwrap() + g * g / 4.0).abs() <= 1e-11);
        let g = 1e-3;
        let lead = -phi(6.0, 6.0 + g).unwrap() / (g * g);
        // Four significant digits: the cubic term shifts the fifth.
        assert_relative_eq!(lead, 1.0 / (2.0 * 6.0 * 7.0), max_relative = 2e-4);
    }

    #[test]
    fn delyon_examples() {
        assert_relative_eq!(delyon_bound(1.0).unwrap(), 4.0, max_relative = 1e-14);
        assert_relative_eq!(delyon_bound(4.0).unwrap(), 3125.0 / 256.0, max_relative = 1e-14);
        assert!(18f64.sqrt() <= delyon_bound(4.0).unwrap());
    }

    #[test]
    fn grid_sweep() {
        let r = rate_function_grid(100).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }

    proptest! {
        #[test]
        fn phi_nonpositive(b in 0.01f64..8.0, g in 0.0f64..8.0) {
            prop_assert!(phi(b, g).unwrap() <= 0.0);
        }

        #[test]
        fn xi_is_minus_phi(p in 0.01f64..0.99, b in 0.01f64..8.0) {
            let lhs = xi(p, b).unwrap();
            let rhs = -phi(1.0 / p - 1.0, b).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
