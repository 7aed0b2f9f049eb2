//! The `predict` command: read a newform dataset, classify its local
//! situation at `p`, and bound the completed germ space.
//!
//! The pipeline only handles `p` prime to the level, where both local
//! characters are unramified: the unit eigenvalue comes from the Hensel
//! root of `x^2 - a_p x + chi(p) p^{w-1}`, the companion is pinned by the
//! product. Non-ordinary input short-circuits to the empty prediction
//! (the compactly supported part is always present and left implicit).

use num_bigint::BigInt;
use num_traits::Zero;

use padic_forms::charfn::{CharTail, SmoothChar};
use padic_forms::newform::NewformData;
use padic_forms::ordinary::{stabilize, RootChoice};
use padic_forms::padic::{hensel_unit_root, int_valuation, PadicApprox};
use padic_forms::scalar::{PValue, Scalar};
use padic_forms::smoothrep::{
    central_char, classify, jacquet, predict_w, LocalParams, ReprKind, Splitness,
};
use padic_forms::CoreError;

use crate::ingest;
use crate::report::{
    tool_version, CentralCharJson, DivisibilityJson, PredictReport, TailJson, ValueAtP,
};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct PredictArgs {
    /// Builtin name (`delta`, `cm32`) or a dataset path.
    pub newform: String,
    pub p: u64,
    pub k: u32,
    pub splitness: Splitness,
    pub m_window: u32,
    /// Coefficient count for builtin generation and the divisibility probe.
    pub n_hint: usize,
}

pub fn splitness_name(s: Splitness) -> &'static str {
    match s {
        Splitness::Split => "split",
        Splitness::NonSplit => "nonsplit",
        Splitness::Unknown => "unknown",
    }
}

fn render_scalar(s: &Scalar) -> String {
    let key = s.residue_key();
    if key.len() == 1 {
        key[0].to_string()
    } else {
        // Cyclotomic value: coefficients on the zeta-power basis.
        let parts: Vec<String> = key.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }
}

fn render_pvalue(v: &PValue) -> ValueAtP {
    ValueAtP {
        v: v.v(),
        unit: render_scalar(v.unit()),
    }
}

fn render_tail(t: &CharTail) -> TailJson {
    TailJson {
        conductor: t.chi.conductor(),
        unit_values: t
            .chi
            .unit_table()
            .entries()
            .into_iter()
            .map(|(u, s)| (u, render_scalar(&s)))
            .collect(),
        value_at_p: render_pvalue(t.chi.value_at_p()),
        valuation: t.chi.value_at_p().v(),
        a: t.a,
        b: t.b,
    }
}

fn kind_name(kind: ReprKind) -> &'static str {
    match kind {
        ReprKind::PrincipalSeries => "principal-series",
        ReprKind::Special => "special",
        ReprKind::Supercuspidal => "supercuspidal",
        ReprKind::OneDimensional => "one-dimensional",
    }
}

/// Coincident-lines errors deserve a precision hint instead of a bare
/// refusal; everything else maps to a data error verbatim.
fn map_model_error(e: CoreError) -> CliError {
    match e {
        CoreError::Unsupported(msg) => CliError::Data(format!(
            "{msg}; the two Frobenius lines coincide at this precision, raise k to separate them"
        )),
        other => CliError::Data(other.to_string()),
    }
}

/// Re-verifies, coefficient by coefficient, that the companion
/// stabilization gained the `p`-power its eigenvalue valuation promises:
/// `v(b_n) >= min(k, v_p(n) (w-1))` for `n <= checked`.
fn divisibility_probe(
    record: &NewformData,
    p: u64,
    k: u32,
    n: usize,
) -> Result<DivisibilityJson, CoreError> {
    let stab = stabilize(record, p, k, n, RootChoice::NonUnit)?;
    let w = record.weight();
    let step = u64::from(w - 1);
    let mut failures = Vec::new();
    for idx in 1..=n {
        let j = int_valuation(p, &BigInt::from(idx)).expect("idx >= 1");
        let need = (j * step).min(u64::from(k)) as u32;
        if stab.expansion.coeff(idx).valuation() < need {
            failures.push(idx);
        }
    }
    let cm_verified = record.is_cm();
    let blocking = cm_verified && !failures.is_empty();
    Ok(DivisibilityJson {
        checked: n,
        failures,
        cm_verified,
        blocking,
    })
}

pub fn run_predict(args: &PredictArgs) -> Result<PredictReport, CliError> {
    if !padic_forms::qexp::is_prime(args.p) {
        return Err(CliError::Config(format!("p = {} is not prime", args.p)));
    }
    if args.k < 1 {
        return Err(CliError::Config("precision k must be at least 1".into()));
    }
    let (p, k) = (args.p, args.k);
    let n_hint = args.n_hint.max(p as usize + 1);
    let loaded = ingest::resolve(&args.newform, n_hint, false)?;
    let record = loaded.record;
    let mut warnings = loaded.warnings;

    if record.level() % p == 0 {
        return Err(CliError::Config(format!(
            "p = {p} divides the level {}; only primes away from the level are handled",
            record.level()
        )));
    }
    if record.trunc() < p as usize {
        return Err(CliError::Data(format!(
            "dataset stores {} coefficients but a_p at p = {p} is needed",
            record.trunc()
        )));
    }
    let w = record.weight();
    let ap = record.a(p as usize).clone();
    let ap_valuation = if ap.is_zero() {
        k
    } else {
        int_valuation(p, &ap).expect("nonzero").min(u64::from(k)) as u32
    };
    let ordinary = ap_valuation == 0;

    let mut report = PredictReport {
        command: "predict".into(),
        tool_version: tool_version(),
        newform: loaded.source,
        p,
        k,
        weight: w,
        splitness: splitness_name(args.splitness).into(),
        m_window: args.m_window,
        ordinary,
        ap_valuation,
        kind: None,
        irreducible: None,
        jacquet_dim: None,
        alpha: None,
        central_char: None,
        lower: Vec::new(),
        upper: Vec::new(),
        companion_divisibility: None,
        warnings: Vec::new(),
        passed: true,
    };

    if !ordinary {
        // No unit eigenvalue: nothing survives completion, so the
        // prediction is the implicit compact part alone.
        if args.splitness == Splitness::Split {
            warnings.push(
                "split asserted on a non-ordinary form; no germ line survives completion"
                    .into(),
            );
        }
        report.warnings = warnings;
        return Ok(report);
    }

    // chi(p) must be a unit once p is prime to the level; a dataset whose
    // nebentypus breaks this is malformed.
    let chi_p = record.chi(p);
    if int_valuation(p, &chi_p) != Some(0) {
        return Err(CliError::Data(format!(
            "nebentypus value {chi_p} at p = {p} is not a unit"
        )));
    }

    let alpha = hensel_unit_root(
        &PadicApprox::new(p, k, &ap),
        &PadicApprox::new(p, k, &(chi_p.clone() * BigInt::from(p).pow(w - 1))),
    )
    .map_err(|e| CliError::Data(e.to_string()))?;
    let alpha_scalar = Scalar::Plain(alpha.clone());
    let beta_unit = Scalar::from_int(p, k, &chi_p).mul(
        &alpha_scalar
            .inverse()
            .map_err(|e| CliError::Data(e.to_string()))?,
    );
    let alpha_char = SmoothChar::unramified(p, k, PValue::new(0, alpha_scalar));
    let beta_char = SmoothChar::unramified(p, k, PValue::new(i64::from(w) - 1, beta_unit));
    let params = LocalParams::principal_series(alpha_char, beta_char, Some(w))
        .map_err(|e| CliError::Data(e.to_string()))?;

    let classification = classify(&params);
    report.kind = Some(kind_name(classification.kind).into());
    report.irreducible = Some(classification.irreducible);
    if let Some(witness) = &classification.witness {
        warnings.push(format!("reducibility witness: {witness}"));
    }
    let module = jacquet(&params).map_err(map_model_error)?;
    report.jacquet_dim = Some(module.dim());
    report.alpha = Some(ValueAtP {
        v: 0,
        unit: alpha.residue().to_string(),
    });

    let central = central_char(&params, w).map_err(map_model_error)?;
    report.central_char = Some(CentralCharJson {
        conductor: central.smooth().conductor(),
        value_at_p: render_pvalue(central.smooth().value_at_p()),
        power: central.power(),
        normalized_at_p: render_pvalue(&central.eval_at_p()),
    });

    let predicted = predict_w(&params, w, args.splitness, args.m_window).map_err(map_model_error)?;
    report.lower = predicted.lower.iter().map(render_tail).collect();
    report.upper = predicted.upper.iter().map(render_tail).collect();
    warnings.extend(predicted.warnings);

    if args.splitness == Splitness::Split {
        let window = record.trunc().min(600);
        let div = divisibility_probe(&record, p, k, window)
            .map_err(|e| CliError::Data(e.to_string()))?;
        report.passed = !div.blocking;
        report.companion_divisibility = Some(div);
    }

    report.warnings = warnings;
    Ok(report)
}
