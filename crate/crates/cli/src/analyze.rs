use serde_json::json;

use animals_core::analysis::{
    capital_phi_expansion_check, lemma32_check, pc_lower_bound, probe_lambda, probe_rho, probe_sigma_hat,
    rate_function_grid, saw_count, saw_count_oracle, theorem43_brackets, FProxy, EXPLORATORY,
};
use animals_core::percolation::{exact_pn, q_fit};
use animals_core::report::{Check, Status};

use crate::config::{resolve_census, RunConfig};
use crate::output::Report;
use crate::CliError;

const DEFAULT_OFFSETS: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

fn emit(
    command: &str,
    cfg: &RunConfig,
    constants: Vec<serde_json::Value>,
    checks: Vec<Check>,
    result: serde_json::Value,
) -> Result<i32, CliError> {
    let out = cfg.out.clone();
    Report::new(command, cfg, constants, checks, result).emit(out.as_deref())
}

pub fn pc_bound(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let d = cfg.dim(2)?;
    let k_max = *cfg.k_max.get_or_insert(if d == 2 { 4 } else { 2 });
    let report = pc_lower_bound(d, k_max)?;
    // The level-by-level oracle holds every path in memory.
    let oracle_len = (3 * k_max + 1).min(if d == 2 { 8 } else { 6 });
    let mut mismatched = Vec::new();
    for k in 0..=oracle_len {
        let (fast, slow) = (saw_count(d, k)?, saw_count_oracle(d, k)?);
        if fast != slow {
            mismatched.push(json!({ "k": k, "backtracking": fast, "oracle": slow }));
        }
    }
    let checks = vec![
        Check::new(
            "path-count-oracle",
            Status::from_bool(mismatched.is_empty()),
            json!({ "lengths": format!("0..={oracle_len}"), "mismatches": mismatched }),
        ),
        Check::new("pc-bound", report.status, json!({ "discrepancies": report.discrepancies })),
    ];
    emit("analyze pc-bound", cfg, Vec::new(), checks, json!(report))
}

fn alpha(cfg: &mut RunConfig) -> Result<f64, CliError> {
    let a = *cfg.alpha.get_or_insert(1.0);
    if a.is_nan() || a <= 0.0 {
        return Err(CliError::Usage(format!("alpha must be positive, got {a}")));
    }
    Ok(a)
}

pub fn rate_functions(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let grid = cfg.grid.get_or_insert_with(|| "default".into()).clone();
    let resolution = match grid.as_str() {
        "default" => 100,
        s => s
            .parse::<usize>()
            .ok()
            .filter(|&r| r >= 2)
            .ok_or_else(|| CliError::Usage(format!("grid must be `default` or an integer >= 2, got {s:?}")))?,
    };
    let a = alpha(cfg)?;
    let g = rate_function_grid(resolution)?;
    let l = lemma32_check(a, &DEFAULT_OFFSETS)?;
    let mut checks = vec![
        Check::new("rate-grid", g.status, &g),
        Check::new("lemma32-remainder", l.status, &l),
    ];
    for beta in [0.5 * a, 2.0 * a] {
        let r = capital_phi_expansion_check(a, beta, &DEFAULT_OFFSETS)?;
        checks.push(Check::new(format!("capital-phi-expansion beta={beta}"), r.status, &r));
    }
    emit("analyze rate-functions", cfg, Vec::new(), checks, json!({ "resolution": resolution }))
}

pub fn lemma32(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let a = alpha(cfg)?;
    let gammas = cfg.gammas.get_or_insert_with(|| DEFAULT_OFFSETS.to_vec()).clone();
    let r = lemma32_check(a, &gammas)?;
    let checks = vec![Check::new("lemma32-remainder", r.status, &r)];
    emit("analyze lemma32", cfg, Vec::new(), checks, json!(r))
}

pub fn probes(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let need = if cfg.census.is_some() { cfg.n_max.unwrap_or(1) } else { *cfg.n_max.get_or_insert(10) };
    let (table, source) = resolve_census(cfg, 2, need)?;
    let n_max = *cfg.n_max.get_or_insert(table.n_max());
    let d = table.dim();
    let mut constants = Vec::new();
    let p_c = cfg.p_c(d, &mut constants)?;
    let alpha = 1.0 / p_c - 1.0;
    let n_lo = *cfg.n_lo.get_or_insert(3.min(n_max));
    let n_hi = *cfg.n_hi.get_or_insert(n_max);
    let g = *cfg.window_g.get_or_insert(3.0);
    if n_hi > table.n_max() {
        return Err(CliError::Usage(format!("n_hi = {n_hi} exceeds the census depth {}", table.n_max())));
    }

    let lambda = probe_lambda(&table, p_c, n_lo, n_hi, g)?;
    let sigma = probe_sigma_hat(&table, alpha, cfg.deltas.as_deref())?;
    let rho_p = cfg
        .rho_p
        .get_or_insert_with(|| [0.5, 0.6, 0.7, 0.8].iter().map(|f| f * p_c).collect())
        .clone();
    // Decay rate from the exact P_n over the upper half of the census.
    let window: Vec<usize> = (n_max.div_ceil(2).max(1)..=n_max).collect();
    let mut decay = Vec::new();
    let mut series = Vec::new();
    for &p in &rho_p {
        let pts = window
            .iter()
            .map(|&n| Ok((n, exact_pn(&table, p, n)?, 0.0)))
            .collect::<animals_core::Result<Vec<_>>>()?;
        let q = q_fit(&pts);
        if let Some(v) = q.q {
            series.push((p, v));
        }
        decay.push(json!({ "p": p, "fit": q }));
    }
    let rho = probe_rho(p_c, &series);
    let checks = vec![
        Check::new("lambda", lambda.status, json!({ "value": lambda.value })),
        Check::new("varsigma", sigma.status, json!({ "value": sigma.value })),
        Check::new("rho", rho.status, json!({ "value": rho.value })),
    ];
    let result = json!({
        "label": EXPLORATORY,
        "census": source,
        "alpha": alpha,
        "lambda": lambda,
        "varsigma": sigma,
        "rho": rho,
        "decay_rates": { "n_window": window, "fits": decay },
    });
    emit("analyze probes", cfg, constants, checks, result)
}

pub fn brackets(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let n_req: Option<usize> = match &cfg.n {
        Some(s) => Some(s.parse().map_err(|_| CliError::Usage(format!("n must be an integer, got {s:?}")))?),
        None => None,
    };
    let need = match (n_req, cfg.census.is_some()) {
        (Some(n), _) => n,
        (None, true) => 1,
        (None, false) => 10,
    };
    let (table, source) = resolve_census(cfg, 2, need)?;
    let n = n_req.unwrap_or(table.n_max());
    cfg.n = Some(n.to_string());
    let d = table.dim();
    let mut constants = Vec::new();
    let p_c = cfg.p_c(d, &mut constants)?;
    let g = *cfg.window_g.get_or_insert(3.0);
    let k = *cfg.tail_k.get_or_insert(6.0);
    let proxy = FProxy::parse(cfg.proxy.get_or_insert_with(|| FProxy::default().id().to_string()))?;
    let r = theorem43_brackets(&table, n, p_c, g, k, proxy)?;
    let checks = vec![Check::new("brackets", r.status, json!({ "label": r.label }))];
    emit("analyze brackets", cfg, constants, checks, json!({ "census": source, "report": r }))
}
