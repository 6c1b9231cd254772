use std::path::Path;

use serde_json::json;

use animals_core::constructions::{
    build_phi, build_rho_d, build_s, correct_pair, correction_search, decompose, phi_stats, r2 as build_r2, rho_d_stats,
    s_stats, SearchBounds, SearchOutcome,
};
use animals_core::lattice::{compute_stats, Animal};
use animals_core::ratio::Beta;
use animals_core::report::{Check, Status};

use crate::config::RunConfig;
use crate::output::Report;
use crate::CliError;

/// Emit a built shape with its statistics, checked against `closed`.
fn shape(command: &str, cfg: &RunConfig, animal: Animal, closed: Option<(usize, usize)>) -> Result<i32, CliError> {
    let stats = compute_stats(&animal)?;
    let mut checks = Vec::new();
    if let Some(c) = closed {
        checks.push(Check::new(
            "closed-form",
            Status::from_bool((stats.n, stats.m) == c),
            json!({ "closed_form": { "e": c.0, "o": c.1 }, "computed": { "e": stats.n, "o": stats.m } }),
        ));
    }
    let out = cfg.out.clone();
    Report::new(command, cfg, Vec::new(), checks, json!({ "animal": animal, "stats": stats })).emit(out.as_deref())
}

pub fn r2(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let d = cfg.dim(2)?;
    shape("construct r2", cfg, build_r2(d)?, None)
}

pub fn rho(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let d = cfg.dim(2)?;
    // One bit per chamber; `k` follows the bit vector when only that is given.
    let k = *cfg.shape_k.get_or_insert(cfg.a.as_ref().map_or(2, Vec::len));
    let a = cfg.a.get_or_insert_with(|| vec![0; k]).clone();
    let sum = a.iter().map(|&x| x as usize).sum();
    let animal = build_rho_d(d, k, &a)?;
    shape("construct rho", cfg, animal, Some(rho_d_stats(d, k, sum)))
}

pub fn s(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let d = cfg.dim(2)?;
    let k = *cfg.shape_k.get_or_insert(3);
    let i = *cfg.i.get_or_insert(0);
    shape("construct s", cfg, build_s(d, k, i)?, Some(s_stats(d, k, i)))
}

pub fn phi(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let q = cfg.q.get_or_insert_with(|| vec![1, 1]).clone();
    shape("construct phi", cfg, build_phi(&q)?, Some(phi_stats(&q)))
}

fn read_animal(path: &Path) -> Result<Animal, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("animal fixture {}: {e}", path.display())))
}

pub fn correction(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let beta_s = cfg.beta.get_or_insert_with(|| "1".into()).clone();
    let beta: Beta = beta_s
        .parse()
        .map_err(|e| CliError::Usage(format!("beta {beta_s:?}: {e}")))?;
    let (p1, p2) = match (cfg.g1.clone(), cfg.g2.clone()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::Usage("correction needs --g1 and --g2 fixture files".into())),
    };
    let (g1, g2) = (read_animal(&p1)?, read_animal(&p2)?);
    let bounds = SearchBounds {
        k_cap: *cfg.k_cap.get_or_insert(SearchBounds::default().k_cap),
        s_cap: *cfg.s_cap.get_or_insert(SearchBounds::default().s_cap),
    };
    let any_ratio = *cfg.any_ratio.get_or_insert(false);
    let outcome = if any_ratio {
        correct_pair(beta, &g1, &g2, bounds)?
    } else {
        correction_search(beta, &g1, &g2, bounds)?
    };
    let mut checks = Vec::new();
    match &outcome {
        SearchOutcome::Found(c) => {
            let s = compute_stats(&c.tau)?;
            let n = g1.len() + g2.len() + c.params.big_k;
            let m = beta.floor_times(n as u64);
            checks.push(Check::new(
                "target",
                Status::from_bool(s.n == n && s.m as i64 == m),
                json!({ "wanted": [n, m], "computed": [s.n, s.m] }),
            ));
            let back = decompose(&c.tau, &c.joints)?;
            checks.push(Check::new("decompose", Status::from_bool(back == (g1.clone(), g2.clone())), json!(null)));
        }
        SearchOutcome::NotFound { bounds } => {
            checks.push(Check::new("search", Status::Fail, json!({ "not_found_within": bounds })));
        }
    }
    let out = cfg.out.clone();
    Report::new("construct correction", cfg, Vec::new(), checks, json!(outcome)).emit(out.as_deref())
}
