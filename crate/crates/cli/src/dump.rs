//! CSV dumps of coefficient tables and predicted germ lines.
//!
//! Residues are printed as symmetric signed lifts (the representative in
//! `(-p^k/2, p^k/2]`), so small negative integers read back as
//! themselves: the sixth coefficient of the weight-12 form prints as
//! `-6048`, not as its canonical residue.

use num_bigint::{BigInt, BigUint};

use padic_forms::padic::pk_modulus;
use padic_forms::qexp::is_prime;
use padic_forms::scalar::Scalar;
use padic_forms::smoothrep::Splitness;

use crate::ingest;
use crate::predict::{run_predict, PredictArgs};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct DumpArgs {
    /// What to dump: `qexp` or `tails`.
    pub object: String,
    pub newform: String,
    pub p: u64,
    pub k: u32,
    pub n: usize,
    /// Only consulted by `tails` (it feeds the prediction).
    pub splitness: Splitness,
}

fn sym_lift_str(canonical: &str, modulus: &BigInt) -> String {
    match canonical.parse::<BigInt>() {
        Ok(r) if &r * 2 > *modulus => (r - modulus).to_string(),
        Ok(r) => r.to_string(),
        // Vector-valued entry: keep it raw but CSV-safe.
        Err(_) => canonical.replace(", ", ";"),
    }
}

fn sym_scalar(s: &Scalar) -> String {
    match s.as_plain() {
        Some(x) => x.symmetric_lift().to_string(),
        None => {
            let parts: Vec<String> = s.residue_key().iter().map(BigUint::to_string).collect();
            format!("[{}]", parts.join(";"))
        }
    }
}

pub fn run_dump(args: &DumpArgs) -> Result<String, CliError> {
    if !is_prime(args.p) {
        return Err(CliError::Config(format!("p = {} is not prime", args.p)));
    }
    if args.k < 1 {
        return Err(CliError::Config("precision k must be at least 1".into()));
    }
    match args.object.as_str() {
        "qexp" => dump_qexp(args),
        "tails" => dump_tails(args),
        other => Err(CliError::Config(format!(
            "unknown dump object {other:?}; expected qexp or tails"
        ))),
    }
}

fn dump_qexp(args: &DumpArgs) -> Result<String, CliError> {
    let loaded = ingest::resolve(&args.newform, args.n, false)?;
    if loaded.record.trunc() < args.n {
        return Err(CliError::Data(format!(
            "dataset stores {} coefficients, {} requested",
            loaded.record.trunc(),
            args.n
        )));
    }
    let f = loaded.record.expansion(args.p, args.k, args.n);
    let mut out = String::from("n,a_n\n");
    for i in 1..=args.n {
        out.push_str(&format!("{i},{}\n", sym_scalar(f.coeff(i))));
    }
    Ok(out)
}

fn dump_tails(args: &DumpArgs) -> Result<String, CliError> {
    let report = run_predict(&PredictArgs {
        newform: args.newform.clone(),
        p: args.p,
        k: args.k,
        splitness: args.splitness,
        m_window: 0,
        n_hint: args.n,
    })?;
    let modulus = BigInt::from(pk_modulus(args.p, args.k));
    let mut out = String::from("conductor,a,b,valuation,unit\n");
    for t in &report.lower {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.conductor,
            t.a,
            t.b,
            t.valuation,
            sym_lift_str(&t.value_at_p.unit, &modulus)
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(object: &str, newform: &str, p: u64, k: u32, n: usize) -> DumpArgs {
        DumpArgs {
            object: object.into(),
            newform: newform.into(),
            p,
            k,
            n,
            splitness: Splitness::Unknown,
        }
    }

    #[test]
    fn qexp_rows_are_signed_lifts() {
        let csv = run_dump(&args("qexp", "delta", 11, 5, 10)).expect("dumps");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,a_n");
        assert_eq!(lines[1], "1,1");
        assert_eq!(lines[6], "6,-6048");
        assert_eq!(lines.len(), 11);
    }

    #[test]
    fn tails_table_headers_only_when_nothing_survives() {
        // Non-ordinary prime: no germ line beyond the compact part.
        let csv = run_dump(&args("tails", "delta", 7, 4, 60)).expect("dumps");
        assert_eq!(csv, "conductor,a,b,valuation,unit\n");
        // Ordinary prime: exactly the unit line, conductor 0, degree 0.
        let csv = run_dump(&args("tails", "delta", 11, 5, 60)).expect("dumps");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("0,0,0,0,"));
    }

    #[test]
    fn unknown_object_is_a_config_error() {
        assert!(matches!(
            run_dump(&args("spectra", "delta", 11, 5, 10)),
            Err(CliError::Config(_))
        ));
    }
}
