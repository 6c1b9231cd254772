//! Census files.
//!
//! ```json
//! {"format_version": 1, "d": 2, "n_max": 8,
//!  "entries": [[n, m, sigma_prime, vertex_weighted], ...],
//!  "checksum": "<sha256 hex>"}
//! ```
//!
//! The checksum is SHA-256 over the compact JSON of the same object with
//! the `checksum` field omitted. Files are written in a fixed layout so
//! equal tables give byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CensusEntry, CensusTable};
use crate::error::{Error, Result};

pub const CENSUS_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct Body<'a> {
    format_version: u32,
    d: usize,
    n_max: usize,
    entries: &'a [[u64; 4]],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CensusFile {
    format_version: u32,
    d: usize,
    n_max: usize,
    entries: Vec<[u64; 4]>,
    checksum: String,
}

fn checksum(d: usize, n_max: usize, entries: &[[u64; 4]]) -> Result<String> {
    let body = serde_json::to_vec(&Body {
        format_version: CENSUS_FORMAT_VERSION,
        d,
        n_max,
        entries,
    })?;
    Ok(hex::encode(Sha256::digest(&body)))
}

fn rows(table: &CensusTable) -> Vec<[u64; 4]> {
    table
        .entries()
        .map(|((n, m), e)| [n as u64, m as u64, e.sigma_prime, e.vertex_weighted])
        .collect()
}

/// Serialise to the census file layout.
pub fn to_json_string(table: &CensusTable) -> Result<String> {
    let entries = rows(table);
    let sum = checksum(table.dim(), table.n_max(), &entries)?;
    let mut out = format!(
        "{{\n  \"format_version\": {CENSUS_FORMAT_VERSION},\n  \"d\": {},\n  \"n_max\": {},\n  \"entries\": [\n",
        table.dim(),
        table.n_max()
    );
    for (i, r) in entries.iter().enumerate() {
        let sep = if i + 1 == entries.len() { "" } else { "," };
        out.push_str(&format!("    [{}, {}, {}, {}]{sep}\n", r[0], r[1], r[2], r[3]));
    }
    out.push_str(&format!("  ],\n  \"checksum\": \"{sum}\"\n}}\n"));
    Ok(out)
}

pub fn from_json_str(text: &str) -> Result<CensusTable> {
    let raw: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::CensusFormat(format!("not valid JSON: {e}")))?;
    match raw.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == CENSUS_FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(Error::CensusFormat(format!(
                "unsupported format_version {v} (this build reads version {CENSUS_FORMAT_VERSION})"
            )))
        }
        None => return Err(Error::CensusFormat("missing format_version".into())),
    }
    let file: CensusFile = serde_json::from_value(raw)
        .map_err(|e| Error::CensusFormat(format!("schema mismatch: {e}")))?;
    let expected = checksum(file.d, file.n_max, &file.entries)?;
    if expected != file.checksum {
        return Err(Error::CensusFormat(format!(
            "checksum mismatch (file says {}, content hashes to {expected})",
            file.checksum
        )));
    }
    let mut entries = BTreeMap::new();
    for [n, m, sp, vw] in file.entries {
        let prev = entries.insert(
            (n as usize, m as usize),
            CensusEntry {
                sigma_prime: sp,
                vertex_weighted: vw,
            },
        );
        if prev.is_some() {
            return Err(Error::CensusFormat(format!("duplicate entry (n={n}, m={m})")));
        }
    }
    if file.d < 2 || file.n_max == 0 {
        return Err(Error::CensusFormat("invalid d or n_max".into()));
    }
    let table = CensusTable::from_entries(file.d, file.n_max, entries);
    table
        .validate()
        .map_err(|e| Error::CensusFormat(e.to_string()))?;
    Ok(table)
}

/// Write atomically: the file appears only once fully written.
pub fn save_census(table: &CensusTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = to_json_string(table)?;
    let tmp = path.with_extension("json.partial");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_census(path: impl AsRef<Path>) -> Result<CensusTable> {
    from_json_str(&std::fs::read_to_string(path)?)
}

/// `n,m,sigma_prime,sigma` rows for plotting.
pub fn write_csv<W: Write>(table: &CensusTable, mut out: W) -> Result<()> {
    writeln!(out, "n,m,sigma_prime,sigma")?;
    for ((n, m), e) in table.entries() {
        writeln!(out, "{n},{m},{},{}", e.sigma_prime, e.vertex_weighted)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::enumerate_census;

    #[test]
    fn round_trip() {
        let t = enumerate_census(2, 4, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        save_census(&t, &p).unwrap();
        assert_eq!(load_census(&p).unwrap(), t);
        let again = dir.path().join("c2.json");
        save_census(&t, &again).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let t = enumerate_census(2, 3, 1).unwrap();
        let s = to_json_string(&t).unwrap();
        let cut = &s[..s.len() / 2];
        assert!(matches!(from_json_str(cut), Err(Error::CensusFormat(_))));
    }

    #[test]
    fn wrong_version_names_the_version() {
        let t = enumerate_census(2, 2, 1).unwrap();
        let s = to_json_string(&t).unwrap().replace("\"format_version\": 1", "\"format_version\": 7");
        let err = from_json_str(&s).unwrap_err().to_string();
        assert!(err.contains("format_version 7"), "{err}");
    }

    #[test]
    fn tampered_count_fails_checksum() {
        let t = enumerate_census(2, 2, 1).unwrap();
        let s = to_json_string(&t).unwrap().replace("[2, 8, 6, 18]", "[2, 8, 6, 19]");
        let err = from_json_str(&s).unwrap_err().to_string();
        assert!(err.contains("checksum"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let t = enumerate_census(2, 1, 1).unwrap();
        let s = to_json_string(&t).unwrap().replace("\"d\": 2,", "\"d\": 2, \"extra\": 0,");
        assert!(from_json_str(&s).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = enumerate_census(2, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,m,sigma_prime,sigma\n1,6,2,4\n2,8,6,18\n");
    }
}
