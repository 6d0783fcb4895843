//! Profile and report I/O.
//!
//! A profile is stored as a CSV file with header `r,u,ur,flux` (values in
//! `{:.16e}` format, which round-trips every `f64`) next to a JSON sidecar
//! `<stem>.meta.json` holding the problem parameters and provenance. Every JSON
//! document written here carries a `schema_version` field.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use crate::nonlinearity::Nonlinearity;
use crate::profile::{ProfileMeta, ProfileOrigin, RadialProfile};

/// Version of every JSON schema emitted by the crate.
pub const SCHEMA_VERSION: u32 = 1;
/// Header of profile CSV files.
pub const PROFILE_HEADER: [&str; 4] = ["r", "u", "ur", "flux"];

/// The sidecar describing a profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSidecar {
    pub schema_version: u32,
    pub params: ProblemParams,
    pub nodes: usize,
    pub meta: ProfileMeta,
}

/// `out.csv` → `out.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Formats a value the way every CSV in the crate does.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV table with the given header; values use [`format_value`].
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Format(format!(
                "row of length {} under a header of length {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(|v| format_value(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV table, checking the header.
pub fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let found: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if found != header {
        return Err(Error::Format(format!(
            "expected header {}, found {}",
            header.join(","),
            found.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| {
                    Error::Format(format!("row {}: cannot parse {field:?}: {e}", line + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Serialises `value` to pretty JSON with a leading `schema_version` field.
pub fn versioned_json<T: Serialize>(value: &T) -> Result<String> {
    let body = serde_json::to_value(value)?;
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    match body {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                if k != "schema_version" {
                    doc.insert(k, v);
                }
            }
        }
        other => {
            doc.insert("data".into(), other);
        }
    }
    Ok(serde_json::to_string_pretty(&serde_json::Value::Object(
        doc,
    ))?)
}

/// Writes [`versioned_json`] to `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(versioned_json(value)?.as_bytes())?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

/// Reads a JSON document written by [`write_json`], checking the version.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        other => {
            return Err(Error::Format(format!(
                "unsupported schema_version {other:?} in {}",
                path.display()
            )))
        }
    }
    Ok(serde_json::from_value(value)?)
}

/// Writes the profile CSV and its sidecar.
pub fn write_profile(path: &Path, profile: &RadialProfile) -> Result<()> {
    let rows: Vec<Vec<f64>> = (0..profile.len())
        .map(|i| {
            vec![
                profile.r()[i],
                profile.u()[i],
                profile.ur()[i],
                profile.flux()[i],
            ]
        })
        .collect();
    write_table(path, &PROFILE_HEADER, &rows)?;
    let sidecar = ProfileSidecar {
        schema_version: SCHEMA_VERSION,
        params: *profile.params(),
        nodes: profile.len(),
        meta: profile.meta().clone(),
    };
    write_json(&sidecar_path(path), &sidecar)
}

/// Reads a profile CSV. Parameters and provenance come from the sidecar when
/// it exists; otherwise `params` must be given. When the nonlinearity is known
/// the flux derivative is taken from the equation, else from finite
/// differences. The stored flux is checked against the stored slope.
pub fn read_profile(path: &Path, params: Option<ProblemParams>) -> Result<RadialProfile> {
    let side = sidecar_path(path);
    let (params, meta) = if side.exists() {
        let sc: ProfileSidecar = read_json(&side)?;
        if let Some(given) = params {
            if given != sc.params {
                return Err(Error::Config(format!(
                    "parameters {given:?} contradict the sidecar {:?}",
                    sc.params
                )));
            }
        }
        (sc.params, sc.meta)
    } else {
        let params = params.ok_or_else(|| {
            Error::Format(format!(
                "{} has no sidecar {}; problem parameters must be supplied",
                path.display(),
                side.display()
            ))
        })?;
        (params, ProfileMeta::new(ProfileOrigin::Imported, None))
    };
    let rows = read_table(path, &PROFILE_HEADER)?;
    if rows.len() < 2 {
        return Err(Error::Format("a profile needs at least two nodes".into()));
    }
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let nl = meta
        .nonlinearity
        .as_ref()
        .and_then(|spec| Nonlinearity::from_spec(spec).ok());
    let mut profile =
        RadialProfile::from_parts(params, col(0), col(1), col(2), col(3), None, meta)?;
    profile.validate_flux()?;
    if let Some(nl) = nl {
        let meta = profile.meta().clone();
        profile = profile.with_equation(&nl).with_meta(meta);
    }
    Ok(profile)
}
