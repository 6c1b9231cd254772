use serde::Serialize;
use serde_json::json;

use animals_core::percolation::{
    chi_truncated, exact_pn, find_tn, q_fit, simulate, PercolationRun, DEFAULT_CLUSTER_CAP,
};
use animals_core::report::{Check, Status};

use crate::config::{parse_range, resolve_census, Format, RunConfig};
use crate::output::{csv_with_header, write_text, Report};
use crate::CliError;

#[derive(Serialize)]
struct Cell {
    n: usize,
    p_hat: f64,
    /// Binomial SE of the estimate.
    se: f64,
    hits: u64,
    exact: f64,
    /// Binomial SE at the exact value; the agreement test uses this one.
    se_exact: f64,
    z: f64,
    within_3se: bool,
}

#[derive(Serialize)]
struct Series {
    p: f64,
    samples: u64,
    capped: u64,
    cells: Vec<Cell>,
    /// Mean edge count over uncapped replicates.
    mean_size_uncapped: f64,
    chi_truncated_exact: f64,
    q_monte_carlo: animals_core::percolation::QEstimate,
    q_exact: animals_core::percolation::QEstimate,
}

pub fn run(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let samples = *cfg.samples.get_or_insert(100_000);
    if samples == 0 {
        return Err(CliError::Usage("samples must be positive".into()));
    }
    let seed = *cfg.seed.get_or_insert(1);
    let cap = *cfg.cluster_cap.get_or_insert(DEFAULT_CLUSTER_CAP);
    let ps = cfg.p.get_or_insert_with(|| vec![0.3]).clone();
    if ps.is_empty() || ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(CliError::Usage(format!("p values must lie in [0, 1], got {ps:?}")));
    }
    let format = *cfg.format.get_or_insert(Format::Json);
    let n_top = match cfg.n_max {
        Some(n) => n,
        None if cfg.census.is_some() => 0,
        None => 8,
    };
    let (table, source) = resolve_census(cfg, 2, n_top.max(1))?;
    let n_max = *cfg.n_max.get_or_insert(table.n_max());
    let d = table.dim();
    let par = cfg.parallelism();

    let mut series = Vec::new();
    let (mut cells, mut within) = (0usize, 0usize);
    for &p in &ps {
        let run = PercolationRun {
            d,
            p,
            seed,
            samples,
            cluster_cap: cap,
        };
        let h = simulate(&run, par)?;
        let mut row = Vec::new();
        for n in 1..=n_max {
            let est = h.estimate(n);
            let exact = exact_pn(&table, p, n)?;
            let se_exact = (exact * (1.0 - exact) / samples as f64).sqrt();
            let diff = (est.estimate - exact).abs();
            let z = if se_exact > 0.0 {
                diff / se_exact
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            cells += 1;
            within += usize::from(z <= 3.0);
            row.push(Cell {
                n,
                p_hat: est.estimate,
                se: est.se,
                hits: est.hits,
                exact,
                se_exact,
                z,
                within_3se: z <= 3.0,
            });
        }
        let uncapped = h.samples - h.capped;
        let mean = if uncapped == 0 {
            f64::NAN
        } else {
            h.counts.iter().map(|(s, c)| *s as f64 * *c as f64).sum::<f64>() / uncapped as f64
        };
        let mc_pts: Vec<_> = row.iter().map(|c| (c.n, c.p_hat, c.se)).collect();
        let ex_pts: Vec<_> = row.iter().map(|c| (c.n, c.exact, 0.0)).collect();
        series.push(Series {
            p,
            samples,
            capped: h.capped,
            cells: row,
            mean_size_uncapped: mean,
            chi_truncated_exact: chi_truncated(&table, p, n_max)?,
            q_monte_carlo: q_fit(&mc_pts),
            q_exact: q_fit(&ex_pts),
        });
    }
    let ok = within as f64 >= 0.95 * cells as f64;
    let checks = vec![Check::new(
        "mc-agreement",
        Status::from_bool(ok),
        json!({ "cells": cells, "within_3se": within, "required_fraction": 0.95 }),
    )];
    let out = cfg.out.clone();
    match format {
        Format::Json => {
            let result = json!({ "census": source, "series": series });
            Report::new("percolate", cfg, Vec::new(), checks, result).emit(out.as_deref())
        }
        Format::Csv => {
            let rows: Vec<String> = series
                .iter()
                .flat_map(|s| {
                    s.cells.iter().map(move |c| {
                        format!(
                            "{},{},{},{},{},{},{},{}",
                            s.p, c.n, c.p_hat, c.se, c.exact, c.se_exact, c.z, c.within_3se
                        )
                    })
                })
                .collect();
            let text = csv_with_header(cfg, "p,n,p_hat,se,exact,se_exact,z,within_3se", &rows);
            write_text(out.as_deref(), &text)?;
            Ok(i32::from(!ok))
        }
    }
}

pub fn run_tn(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let range = cfg.n.get_or_insert_with(|| "1..8".into()).clone();
    let (lo, hi) = parse_range(&range)?;
    let format = *cfg.format.get_or_insert(Format::Json);
    let (table, source) = resolve_census(cfg, 2, hi)?;
    let d = table.dim();
    let mut constants = Vec::new();
    let p_c = cfg.p_c(d, &mut constants)?;

    let mut rows = Vec::new();
    for n in lo..=hi {
        rows.push(find_tn(&table, n, p_c)?);
    }
    let mut checks = vec![Check::new(
        "t_n <= p_c",
        Status::from_bool(rows.iter().all(|r| r.t_n <= p_c)),
        json!(null),
    )];
    // One edge has 4d − 2 outlying edges, so t_1 = 1/(4d − 1) unless clamped.
    if let Some(r1) = rows.iter().find(|r| r.n == 1 && !r.clamped) {
        let want = 1.0 / (4 * d - 1) as f64;
        let ok = ((r1.t_n - want) / want).abs() < 1e-10;
        checks.push(Check::new("t_1 closed form", Status::from_bool(ok), json!({ "t_1": r1.t_n, "expected": want })));
    }
    let out = cfg.out.clone();
    match format {
        Format::Json => {
            let result = json!({ "census": source, "rows": rows });
            Report::new("tn", cfg, constants, checks, result).emit(out.as_deref())
        }
        Format::Csv => {
            let lines: Vec<String> = rows
                .iter()
                .map(|r| format!("{},{},{},{},{},{}", r.n, r.t_n, r.alpha_n, r.p_c, r.value, r.clamped))
                .collect();
            write_text(out.as_deref(), &csv_with_header(cfg, "n,t_n,alpha_n,p_c,value,clamped", &lines))?;
            Ok(i32::from(animals_core::report::any_failed(&checks)))
        }
    }
}
