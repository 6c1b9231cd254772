//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use animals_core::census::{enumerate_census, load_census, save_census, CensusTable};

use crate::CliError;

/// Directory searched for cached census files when `--census` is absent.
pub const CENSUS_DIR_ENV: &str = "ANIMALS_CENSUS_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

macro_rules! run_config {
    ($($(#[$doc:meta])* $field:ident: $ty:ty,)*) => {
        /// Every knob any command reads. Unset fields take command defaults;
        /// the resolved values are echoed into each output.
        #[derive(Clone, Debug, Default, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct RunConfig {
            $($(#[$doc])* pub $field: Option<$ty>,)*
        }

        impl RunConfig {
            /// `flags` wins wherever it is set.
            pub fn overlay(self, flags: RunConfig) -> RunConfig {
                RunConfig { $($field: flags.$field.or(self.$field),)* }
            }
        }
    };
}

run_config! {
    d: usize,
    n_max: usize,
    parallelism: usize,
    census: PathBuf,
    out: PathBuf,
    csv: PathBuf,
    format: Format,
    seed: u64,
    samples: u64,
    p: Vec<f64>,
    p_c: f64,
    cluster_cap: usize,
    /// `a..b` (inclusive) or a single `n`.
    n: String,
    k_cap: usize,
    s_cap: usize,
    /// Window width `G`.
    window_g: f64,
    /// Tail power `K`.
    tail_k: f64,
    k_max: usize,
    grid: String,
    proxy: String,
    only: Vec<String>,
    fixture: PathBuf,
    pairs: usize,
    alpha: f64,
    gammas: Vec<f64>,
    n_lo: usize,
    n_hi: usize,
    deltas: Vec<f64>,
    rho_p: Vec<f64>,
    beta: String,
    g1: PathBuf,
    g2: PathBuf,
    shape_k: usize,
    a: Vec<u8>,
    i: usize,
    q: Vec<usize>,
    any_ratio: bool,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// The effective configuration as JSON, unset knobs omitted.
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serialises");
        if let serde_json::Value::Object(map) = &mut v {
            map.retain(|_, x| !x.is_null());
        }
        v
    }

    pub fn parallelism(&mut self) -> usize {
        *self
            .parallelism
            .get_or_insert_with(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn dim(&mut self, default: usize) -> Result<usize, CliError> {
        let d = *self.d.get_or_insert(default);
        if d < 2 {
            return Err(CliError::Usage(format!("d must be at least 2, got {d}")));
        }
        Ok(d)
    }

    /// `p_c` from the config, else the literature default for `d`.
    pub fn p_c(&mut self, d: usize, constants: &mut Vec<serde_json::Value>) -> Result<f64, CliError> {
        if let Some(p) = self.p_c {
            if !(p > 0.0 && p < 1.0) {
                return Err(CliError::Usage(format!("p_c = {p} not in (0, 1)")));
            }
            return Ok(p);
        }
        let (p, note) = animals_core::percolation::default_pc(d)
            .ok_or_else(|| CliError::Usage(format!("no default p_c for d = {d}; pass --pc")))?;
        constants.push(serde_json::json!({ "name": "p_c", "value": p, "source": note }));
        self.p_c = Some(p);
        Ok(p)
    }
}

/// Parse `a..b`, `a..=b` (both inclusive) or `n`.
pub fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("bad range {s:?}: expected a..b or n"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Accept `1000000` as well as `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15 => Ok(x as u64),
        _ => Err(format!("{s:?} is not a nonnegative integer")),
    }
}

fn cache_name(d: usize, n_max: usize) -> String {
    format!("census-d{d}-n{n_max}.json")
}

pub fn default_census_path(d: usize, n_max: usize) -> Option<PathBuf> {
    std::env::var_os(CENSUS_DIR_ENV).map(|dir| PathBuf::from(dir).join(cache_name(d, n_max)))
}

/// The cached file for `d` with the smallest depth of at least `need`.
fn find_cached(d: usize, need: usize) -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os(CENSUS_DIR_ENV)?);
    let prefix = format!("census-d{d}-n");
    std::fs::read_dir(&dir)
        .ok()?
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            let n: usize = name.strip_prefix(&prefix)?.strip_suffix(".json")?.parse().ok()?;
            (n >= need).then_some((n, dir.join(name)))
        })
        .min()
        .map(|(_, p)| p)
}

/// A census of depth at least `need`: the `census` file if configured,
/// else a cached file, else a fresh enumeration (cached when the cache
/// directory is set). Fixes `cfg.d` from the file when one is given.
pub fn resolve_census(
    cfg: &mut RunConfig,
    default_d: usize,
    need: usize,
) -> Result<(CensusTable, serde_json::Value), CliError> {
    if let Some(path) = cfg.census.clone() {
        let table = load_census(&path)?;
        match cfg.d {
            Some(d) if d != table.dim() => {
                return Err(CliError::Usage(format!(
                    "census {} has d = {}, but d = {d} was requested",
                    path.display(),
                    table.dim()
                )))
            }
            _ => cfg.d = Some(table.dim()),
        }
        if table.n_max() < need {
            return Err(CliError::Usage(format!(
                "census {} reaches n = {}, need n = {need}",
                path.display(),
                table.n_max()
            )));
        }
        let source = serde_json::json!({ "path": path, "d": table.dim(), "n_max": table.n_max() });
        return Ok((table, source));
    }
    let d = cfg.dim(default_d)?;
    if let Some(path) = find_cached(d, need) {
        let table = load_census(&path)?;
        let source = serde_json::json!({ "path": path, "cached": true, "d": d, "n_max": table.n_max() });
        return Ok((table, source));
    }
    let par = cfg.parallelism();
    let table = enumerate_census(d, need, par)?;
    let mut source = serde_json::json!({ "computed": true, "d": d, "n_max": need });
    if let Some(path) = default_census_path(d, need) {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        save_census(&table, &path)?;
        source["cached_to"] = serde_json::json!(path);
    }
    Ok((table, source))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..8").unwrap(), (1, 8));
        assert_eq!(parse_range("2..=5").unwrap(), (2, 5));
        assert_eq!(parse_range("4").unwrap(), (4, 4));
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("5..2").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn flags_win_and_unknown_keys_fail() {
        let file: RunConfig = toml::from_str("d = 3\nseed = 5").unwrap();
        let flags = RunConfig {
            d: Some(2),
            ..Default::default()
        };
        let c = file.overlay(flags);
        assert_eq!((c.d, c.seed), (Some(2), Some(5)));
        assert!(toml::from_str::<RunConfig>("dee = 3").is_err());
    }
}
