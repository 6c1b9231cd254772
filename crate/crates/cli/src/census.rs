use animals_core::census::{delyon_check, enumerate_census, save_census, write_csv};
use animals_core::report::{Check, Status};
use serde_json::json;

use crate::config::{default_census_path, RunConfig, CENSUS_DIR_ENV};
use crate::output::Report;
use crate::CliError;

pub fn run(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let d = cfg.dim(2)?;
    let n_max = *cfg.n_max.get_or_insert(8);
    if n_max == 0 {
        return Err(CliError::Usage("n_max must be at least 1".into()));
    }
    let out = match cfg.out.clone().or_else(|| default_census_path(d, n_max)) {
        Some(p) => p,
        None => return Err(CliError::Usage(format!("no --out given and {CENSUS_DIR_ENV} is not set"))),
    };
    cfg.out = Some(out.clone());
    let par = cfg.parallelism();

    let table = enumerate_census(d, n_max, par)?;
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    save_census(&table, &out)?;
    if let Some(csv) = &cfg.csv {
        write_csv(&table, std::io::BufWriter::new(std::fs::File::create(csv)?))?;
    }

    let mut checks = vec![match table.validate() {
        Ok(()) => Check::new("table-invariants", Status::Pass, json!(null)),
        Err(e) => Check::error("table-invariants", &e),
    }];
    checks.push(match delyon_check(&table) {
        Ok(r) => Check::new("delyon", Status::Pass, r),
        Err(e) => Check::error("delyon", &e),
    });
    let rows: Vec<_> = (1..=n_max)
        .map(|n| {
            let row: Vec<_> = table.row(n).collect();
            json!({
                "n": n,
                "classes": table.classes(n),
                "sigma_sum": row.iter().map(|(_, e)| e.vertex_weighted).sum::<u64>(),
                "m_min": row.first().map(|r| r.0),
                "m_max": row.last().map(|r| r.0),
            })
        })
        .collect();
    let result = json!({ "census_file": out, "d": d, "n_max": n_max, "rows": rows });
    Report::new("census", cfg, Vec::new(), checks, result).emit(None)
}
