use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use animals_core::census::{
    audit_identities, brute_force_census, delyon_check, enumerate_census, enumerate_with_visitor, load_census, Frame,
};
use animals_core::constructions::{flip_deltas, lemma62_check, verify_table3, Table3Sweep};
use animals_core::lattice::{compute_stats, Animal};
use animals_core::report::{Check, Status};

use crate::config::RunConfig;
use crate::output::Report;
use crate::CliError;

const ALL: [&str; 8] = ["oracle", "identities", "delyon", "table3", "lemma62", "flips", "census", "fixture"];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Expected {
    n: Option<usize>,
    m: Option<usize>,
    v: Option<usize>,
    c: Option<usize>,
    k_contacts: Option<usize>,
    s_solvents: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Case {
    label: String,
    animal: Animal,
    expect: Expected,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsFixture {
    format_version: u32,
    cases: Vec<Case>,
}

fn fixture_check(path: &Path) -> Result<Check, CliError> {
    let text = std::fs::read_to_string(path)?;
    let fx: StatsFixture = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("fixture {}: {e}", path.display())))?;
    if fx.format_version != 1 {
        return Err(CliError::Usage(format!("fixture format_version {} unsupported", fx.format_version)));
    }
    let mut mismatches = Vec::new();
    for (idx, case) in fx.cases.iter().enumerate() {
        let s = compute_stats(&case.animal)?;
        let e = &case.expect;
        let fields = [
            ("n", e.n, s.n),
            ("m", e.m, s.m),
            ("v", e.v, s.v),
            ("c", e.c, s.c),
            ("k_contacts", e.k_contacts, s.k_contacts),
            ("s_solvents", e.s_solvents, s.s_solvents),
        ];
        for (name, want, got) in fields {
            if want.is_some_and(|w| w != got) {
                mismatches.push(json!({
                    "location": format!("{}: cases[{idx}]", path.display()),
                    "label": case.label,
                    "field": name,
                    "expected": want,
                    "computed": got,
                }));
            }
        }
    }
    let status = Status::from_bool(mismatches.is_empty());
    Ok(Check::new(
        "fixture",
        status,
        json!({ "cases": fx.cases.len(), "mismatches": mismatches }),
    ))
}

fn outcome<T: serde::Serialize>(name: &str, r: animals_core::Result<T>) -> Check {
    match r {
        Ok(v) => Check::new(name, Status::Pass, v),
        Err(e) => Check::error(name, &e),
    }
}

pub fn run(cfg: &mut RunConfig) -> Result<i32, CliError> {
    let explicit_d = cfg.d.is_some() || cfg.n_max.is_some();
    let selected: Vec<String> = match &cfg.only {
        Some(list) => {
            for name in list {
                if !ALL.contains(&name.as_str()) {
                    return Err(CliError::Usage(format!("unknown check {name:?}; choose from {}", ALL.join(", "))));
                }
            }
            list.clone()
        }
        None => {
            let mut v: Vec<String> = ALL[..6].iter().map(|s| s.to_string()).collect();
            if cfg.census.is_some() {
                v.push("census".into());
            }
            if cfg.fixture.is_some() {
                v.push("fixture".into());
            }
            v
        }
    };
    let wants = |name: &str| selected.iter().any(|s| s == name);
    let d = cfg.dim(2)?;
    let n_max = *cfg.n_max.get_or_insert(8);
    if n_max == 0 {
        return Err(CliError::Usage("n_max must be at least 1".into()));
    }
    let par = cfg.parallelism();
    let mut checks = Vec::new();

    if wants("oracle") {
        let cases: Vec<(usize, usize)> = if explicit_d {
            vec![(d, n_max.min(if d == 2 { 5 } else { 3 }))]
        } else {
            vec![(2, 5), (3, 3)]
        };
        let mut detail = Vec::new();
        let mut ok = true;
        for (dd, nn) in cases {
            let same = enumerate_census(dd, nn, par)? == brute_force_census(dd, nn)?;
            ok &= same;
            detail.push(json!({ "d": dd, "n_max": nn, "equal": same }));
        }
        checks.push(Check::new("oracle", Status::from_bool(ok), detail));
    }
    if wants("identities") {
        let a = audit_identities(d, n_max)?;
        let ok = a.bound_violations == 0 && a.identity_violations == 0;
        checks.push(Check::new("identities", Status::from_bool(ok), json!({ "d": d, "n_max": n_max, "audit": a })));
    }
    if wants("delyon") {
        let t = enumerate_census(d, n_max, par)?;
        checks.push(outcome("delyon", delyon_check(&t)));
    }
    if wants("table3") {
        let sweep = Table3Sweep::default();
        let r = verify_table3(&sweep).map(|r| json!({ "sweep": sweep, "checked": r }));
        checks.push(outcome("table3", r));
    }
    if wants("lemma62") {
        let pairs = *cfg.pairs.get_or_insert(1000);
        let seed = *cfg.seed.get_or_insert(1);
        let depth = n_max.min(6);
        let mut pool: Vec<Animal> = Vec::new();
        enumerate_with_visitor(d, depth, |f: &Frame<'_>| pool.push(f.to_animal()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        for _ in 0..pairs {
            let g1 = &pool[rng.random_range(0..pool.len())];
            let g2 = &pool[rng.random_range(0..pool.len())];
            let r = lemma62_check(g1, g2)?;
            if !r.holds && failures.len() < 10 {
                failures.push(json!({ "report": r, "g1": g1, "g2": g2 }));
            }
        }
        checks.push(Check::new(
            "lemma62",
            Status::from_bool(failures.is_empty()),
            json!({ "pairs": pairs, "pool": { "d": d, "n_max": depth, "animals": pool.len() }, "failures": failures }),
        ));
    }
    if wants("flips") {
        let mut count = 0;
        let mut bad = Vec::new();
        for dd in [2, 3] {
            for k in 1..=5 {
                for delta in flip_deltas(dd, k)? {
                    count += 1;
                    if delta != (0, 1) {
                        bad.push(json!({ "d": dd, "k": k, "delta": delta }));
                    }
                }
            }
        }
        checks.push(Check::new(
            "flips",
            Status::from_bool(bad.is_empty()),
            json!({ "flips": count, "wrong": bad }),
        ));
    }
    if wants("census") {
        let path = cfg
            .census
            .clone()
            .ok_or_else(|| CliError::Usage("the census check needs --census".into()))?;
        let check = match load_census(&path) {
            Ok(t) => {
                let fresh = enumerate_census(t.dim(), t.n_max(), par)?;
                let same = fresh == t;
                let valid = t.validate();
                Check::new(
                    "census",
                    Status::from_bool(same && valid.is_ok()),
                    json!({
                        "path": path,
                        "d": t.dim(),
                        "n_max": t.n_max(),
                        "matches_enumeration": same,
                        "invariants": valid.err().map(|e| e.to_string()),
                    }),
                )
            }
            Err(e) => Check::error("census", &e),
        };
        checks.push(check);
    }
    if wants("fixture") {
        let path = cfg
            .fixture
            .clone()
            .ok_or_else(|| CliError::Usage("the fixture check needs --fixture".into()))?;
        checks.push(fixture_check(&path)?);
    }
    let out = cfg.out.clone();
    Report::new("verify", cfg, Vec::new(), checks, json!({ "selected": selected })).emit(out.as_deref())
}
