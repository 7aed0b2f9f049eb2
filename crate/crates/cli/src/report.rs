//! JSON report shapes shared by every command.
//!
//! Serialization order is struct declaration order and no data section
//! carries a timestamp, so identical configs and inputs produce
//! byte-identical reports.

use serde::Serialize;

/// One verified identity: a stable anchor name, the parameters it ran
/// with, and the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub params: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs a check body and folds errors into a failed result instead of
/// aborting the suite.
pub fn run_check<E: std::fmt::Display>(
    name: &str,
    params: String,
    body: impl FnOnce() -> Result<(bool, String), E>,
) -> CheckResult {
    match body() {
        Ok((passed, detail)) => CheckResult { name: name.into(), params, passed, detail },
        Err(e) => CheckResult {
            name: name.into(),
            params,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub command: String,
    pub tool_version: String,
    pub suite: String,
    pub p: u64,
    pub k: u32,
    pub trunc: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IngestReport {
    pub command: String,
    pub tool_version: String,
    pub input: String,
    pub level: u64,
    pub weight: u32,
    pub neb_modulus: u64,
    pub coeff_count: usize,
    pub eigenform: bool,
    pub cm: bool,
    pub warnings: Vec<String>,
    pub passed: bool,
}

/// A split value `unit * p^v`; the unit is the canonical residue mod
/// `p^k`, printed in decimal.
#[derive(Clone, Debug, Serialize)]
pub struct ValueAtP {
    pub v: i64,
    pub unit: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailJson {
    pub conductor: u32,
    /// Character table on unit residues, `[residue, value]` pairs.
    pub unit_values: Vec<(u64, String)>,
    pub value_at_p: ValueAtP,
    pub valuation: i64,
    pub a: u32,
    pub b: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralCharJson {
    pub conductor: u32,
    pub value_at_p: ValueAtP,
    pub power: i64,
    /// The whole character evaluated at `p`, twist included.
    pub normalized_at_p: ValueAtP,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisibilityJson {
    /// Indices `1..=checked` were examined.
    pub checked: usize,
    /// Indices whose coefficient misses the required `p`-power.
    pub failures: Vec<usize>,
    /// Whether the ingestion metadata marks the source as CM.
    pub cm_verified: bool,
    /// A failure blocks only when the source is verified CM.
    pub blocking: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictReport {
    pub command: String,
    pub tool_version: String,
    pub newform: String,
    pub p: u64,
    pub k: u32,
    pub weight: u32,
    pub splitness: String,
    pub m_window: u32,
    pub ordinary: bool,
    /// Valuation of `a_p`, capped at `k`.
    pub ap_valuation: u32,
    pub kind: Option<String>,
    pub irreducible: Option<bool>,
    pub jacquet_dim: Option<u32>,
    pub alpha: Option<ValueAtP>,
    pub central_char: Option<CentralCharJson>,
    pub lower: Vec<TailJson>,
    pub upper: Vec<TailJson>,
    pub companion_divisibility: Option<DivisibilityJson>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Pretty JSON with a trailing newline; the single rendering used for
/// stdout and `-o` files alike.
pub fn render<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}
