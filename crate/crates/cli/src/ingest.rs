//! Newform dataset ingestion: JSON schema, validation, builtin tables.
//!
//! A dataset file carries integer Fourier coefficients as decimal strings
//! (they routinely overflow `i64`), the level and weight, an optional
//! nebentypus table, and two flags recorded by whoever produced the data:
//! `eigenform` (normalized Hecke eigenform, so `a_1 = 1` is enforced) and
//! `cm` (the form has complex multiplication). Flags default to `false`;
//! a missing nebentypus defaults to the trivial character with a warning.

use num_bigint::BigInt;
use num_traits::One;
use serde::Deserialize;
use std::fs;

use padic_forms::newform::NewformData;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NebFile {
    modulus: u64,
    /// Pairs `(unit residue, value)` ascending, covering every unit mod
    /// the modulus; values are decimal integer strings.
    values: Vec<(u64, String)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewformFile {
    level: u64,
    weight: u32,
    #[serde(default)]
    nebentypus: Option<NebFile>,
    coeffs: Vec<String>,
    #[serde(default)]
    eigenform: bool,
    #[serde(default)]
    cm: bool,
}

/// A validated dataset plus everything ingestion wants to tell the user.
#[derive(Debug)]
pub struct Loaded {
    pub record: NewformData,
    /// Where the data came from: a path or `builtin:<name>`.
    pub source: String,
    pub warnings: Vec<String>,
}

fn parse_bigint(s: &str, what: &str) -> Result<BigInt, CliError> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| CliError::Data(format!("{what}: {s:?} is not a decimal integer")))
}

/// Parses and validates a dataset file.
///
/// Unreadable paths are configuration errors; everything wrong *inside*
/// the file (unknown keys, non-numeric strings, `a_1 != 1` under the
/// eigenform flag) is a data error. With `strict`, coprime
/// multiplicativity spot-check failures are promoted from warnings to a
/// data error.
pub fn load_file(path: &str, strict: bool) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    let file: NewformFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{path}: schema violation: {e}")))?;

    let mut warnings = Vec::new();
    let (neb_modulus, neb_values) = match file.nebentypus {
        Some(neb) => {
            let values = neb
                .values
                .iter()
                .map(|(u, s)| Ok((*u, parse_bigint(s, "nebentypus value")?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            (neb.modulus, values)
        }
        None => {
            warnings.push(
                "nebentypus missing; assuming the trivial character".to_string(),
            );
            (1, vec![(1u64, BigInt::one())])
        }
    };
    let coeffs = file
        .coeffs
        .iter()
        .map(|s| parse_bigint(s, "coefficient"))
        .collect::<Result<Vec<_>, CliError>>()?;

    let record = NewformData::new(
        file.level,
        file.weight,
        neb_modulus,
        neb_values,
        coeffs,
        file.eigenform,
        file.cm,
    )
    .map_err(|e| CliError::Data(format!("{path}: {e}")))?;

    let mult = record.multiplicativity_warnings(40);
    if strict && !mult.is_empty() {
        return Err(CliError::Data(format!(
            "{path}: multiplicativity spot check failed: {}",
            mult.join("; ")
        )));
    }
    warnings.extend(mult);

    Ok(Loaded {
        record,
        source: path.to_string(),
        warnings,
    })
}

/// Resolves a `--newform` argument: the builtin names `delta` and `cm32`
/// (generated to `n_hint` coefficients) or a path to a dataset file.
pub fn resolve(newform: &str, n_hint: usize, strict: bool) -> Result<Loaded, CliError> {
    match newform {
        "delta" => Ok(Loaded {
            record: NewformData::delta(n_hint),
            source: "builtin:delta".into(),
            warnings: Vec::new(),
        }),
        "cm32" => Ok(Loaded {
            record: NewformData::cm32(n_hint),
            source: "builtin:cm32".into(),
            warnings: Vec::new(),
        }),
        path => load_file(path, strict),
    }
}
