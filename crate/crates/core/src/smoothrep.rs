//! Local parameter records for smooth GL2(Q_p) representations and the
//! germ-space predictions they drive.
//!
//! A record stores its characters in combined form: the half-twist that
//! normally rides along is folded into each stored value at `p`, so the
//! recorded values are exactly the Frobenius eigenvalues (with their
//! valuations split out) and no square root of `p` is ever materialized.
//! On top of the records sit the classification of the four kinds, the
//! torus-coinvariant lines, the germ lines of the Kirillov realization,
//! the sub-line that survives `p`-adic completion, the central character
//! in split form, and a windowed lower/upper prediction for the completed
//! germ space.

use crate::charfn::{CharTail, SmoothChar};
use crate::error::CoreError;
use crate::qexp::is_prime;
use crate::scalar::{PValue, Scalar};

/// The four kinds of parameter records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReprKind {
    PrincipalSeries,
    Special,
    Supercuspidal,
    OneDimensional,
}

/// Parameter record for one smooth representation.
///
/// Principal series store two characters, special and one-dimensional
/// records store one, supercuspidal records store none (the tag is all the
/// downstream consumers need). The optional weight pins the eigenvalue
/// valuations at construction time; see [`LocalParams::principal_series`].
#[derive(Clone, Debug)]
pub struct LocalParams {
    p: u64,
    k: u32,
    kind: ReprKind,
    chars: Vec<SmoothChar>,
    weight: Option<u32>,
}

fn check_weight(weight: Option<u32>) -> Result<(), CoreError> {
    match weight {
        Some(w) if w < 2 => Err(CoreError::InvalidParams(format!(
            "weight {w} is below 2 and is rejected rather than guessed"
        ))),
        _ => Ok(()),
    }
}

/// Valuation bookkeeping implied by a weight: the two principal-series
/// eigenvalues multiply to `p^(w-1)` times a unit, a special eigenvalue
/// squares to `p^(w-2)` times a unit.
fn check_valuations(kind: ReprKind, chars: &[SmoothChar], w: u32) -> Result<(), CoreError> {
    match kind {
        ReprKind::PrincipalSeries => {
            let sum = chars[0].value_at_p().v() + chars[1].value_at_p().v();
            if sum != i64::from(w) - 1 {
                return Err(CoreError::InvalidParams(format!(
                    "eigenvalue valuations sum to {sum}, expected weight - 1 = {}",
                    i64::from(w) - 1
                )));
            }
        }
        ReprKind::Special => {
            let v = chars[0].value_at_p().v();
            if 2 * v != i64::from(w) - 2 {
                return Err(CoreError::InvalidParams(format!(
                    "special eigenvalue valuation {v} needs 2v = weight - 2 = {}",
                    i64::from(w) - 2
                )));
            }
        }
        ReprKind::Supercuspidal | ReprKind::OneDimensional => {}
    }
    Ok(())
}

/// Full equality of characters: same restriction to units and the same
/// split value at `p`, compared at the smaller precision.
fn chars_equal(x: &SmoothChar, y: &SmoothChar) -> bool {
    x.same_unit_part(y) && x.value_at_p().eq_mod(y.value_at_p(), x.k().min(y.k()))
}

impl LocalParams {
    /// Two combined characters. When a weight is supplied, their values at
    /// `p` must have valuations summing to `weight - 1`.
    pub fn principal_series(
        alpha: SmoothChar,
        beta: SmoothChar,
        weight: Option<u32>,
    ) -> Result<Self, CoreError> {
        if alpha.p() != beta.p() || alpha.k() != beta.k() {
            return Err(CoreError::InvalidParams(
                "the two characters must share p and precision".into(),
            ));
        }
        check_weight(weight)?;
        let chars = vec![alpha, beta];
        if let Some(w) = weight {
            check_valuations(ReprKind::PrincipalSeries, &chars, w)?;
        }
        Ok(LocalParams {
            p: chars[0].p(),
            k: chars[0].k(),
            kind: ReprKind::PrincipalSeries,
            chars,
            weight,
        })
    }

    /// One combined character; its value at `p` is the eigenvalue of the
    /// single new vector, whose square has valuation `weight - 2`.
    pub fn special(chi: SmoothChar, weight: Option<u32>) -> Result<Self, CoreError> {
        check_weight(weight)?;
        let chars = vec![chi];
        if let Some(w) = weight {
            check_valuations(ReprKind::Special, &chars, w)?;
        }
        Ok(LocalParams {
            p: chars[0].p(),
            k: chars[0].k(),
            kind: ReprKind::Special,
            chars,
            weight,
        })
    }

    /// Bare tag: no character data is stored or needed downstream.
    pub fn supercuspidal(p: u64, k: u32, weight: Option<u32>) -> Result<Self, CoreError> {
        if !is_prime(p) || k == 0 {
            return Err(CoreError::InvalidParams(format!(
                "need a prime p and positive precision, got p = {p}, k = {k}"
            )));
        }
        check_weight(weight)?;
        Ok(LocalParams { p, k, kind: ReprKind::Supercuspidal, chars: Vec::new(), weight })
    }

    /// A character composed with the determinant.
    pub fn one_dimensional(chi: SmoothChar, weight: Option<u32>) -> Result<Self, CoreError> {
        check_weight(weight)?;
        Ok(LocalParams {
            p: chi.p(),
            k: chi.k(),
            kind: ReprKind::OneDimensional,
            chars: vec![chi],
            weight,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn kind(&self) -> ReprKind {
        self.kind
    }

    pub fn weight(&self) -> Option<u32> {
        self.weight
    }

    /// The stored combined characters: two, one, or none by kind.
    pub fn characters(&self) -> &[SmoothChar] {
        &self.chars
    }
}

/// Kind tag plus an irreducibility verdict; `witness` spells out the
/// character relation that causes reducibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub kind: ReprKind,
    pub irreducible: bool,
    pub witness: Option<String>,
}

/// Irreducibility of a principal-series record: reducible exactly when the
/// ratio of the two characters is the norm character or its inverse, i.e.
/// the unit data agree and the valuations differ by one. Every other kind
/// passes through as irreducible.
pub fn classify(params: &LocalParams) -> Classification {
    if params.kind != ReprKind::PrincipalSeries {
        return Classification { kind: params.kind, irreducible: true, witness: None };
    }
    let (a, b) = (&params.chars[0], &params.chars[1]);
    let d = a.value_at_p().v() - b.value_at_p().v();
    let units_match = a.same_unit_part(b)
        && a.value_at_p().unit().sub(b.value_at_p().unit()).is_zero();
    if units_match && d.abs() == 1 {
        // chi1/chi2 sends p to p^d with trivial unit data, which is the
        // norm character to the power -d.
        Classification {
            kind: ReprKind::PrincipalSeries,
            irreducible: false,
            witness: Some(format!("chi1/chi2 = |.|^({})", -d)),
        }
    } else {
        Classification { kind: ReprKind::PrincipalSeries, irreducible: true, witness: None }
    }
}

/// Shape of one torus-coinvariant line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineShape {
    Simple,
    /// A non-split self-extension; the line counts twice in the dimension.
    SelfExtension,
}

/// The torus coinvariants: at most two character lines.
#[derive(Clone, Debug)]
pub struct JacquetModule {
    lines: Vec<(SmoothChar, LineShape)>,
}

impl JacquetModule {
    pub fn lines(&self) -> &[(SmoothChar, LineShape)] {
        &self.lines
    }

    pub fn dim(&self) -> u32 {
        self.lines
            .iter()
            .map(|(_, shape)| match shape {
                LineShape::Simple => 1,
                LineShape::SelfExtension => 2,
            })
            .sum()
    }
}

/// Torus coinvariants of an irreducible record: dimension 2 for principal
/// series (a self-extension when the two characters coincide), 1 for
/// special, 0 for supercuspidal.
///
/// # Errors
/// `NoKirillovModel` for one-dimensional records; `Unsupported` for
/// reducible principal-series parameters (take a constituent instead).
pub fn jacquet(params: &LocalParams) -> Result<JacquetModule, CoreError> {
    match params.kind {
        ReprKind::OneDimensional => Err(CoreError::NoKirillovModel),
        ReprKind::Supercuspidal => Ok(JacquetModule { lines: Vec::new() }),
        ReprKind::Special => Ok(JacquetModule {
            lines: vec![(params.chars[0].clone(), LineShape::Simple)],
        }),
        ReprKind::PrincipalSeries => {
            let verdict = classify(params);
            if !verdict.irreducible {
                return Err(CoreError::Unsupported(format!(
                    "reducible parameters ({}); classify and take a constituent",
                    verdict.witness.unwrap_or_default()
                )));
            }
            let (a, b) = (&params.chars[0], &params.chars[1]);
            let lines = if chars_equal(a, b) {
                vec![(a.clone(), LineShape::SelfExtension)]
            } else {
                let mut two = vec![
                    (a.clone(), LineShape::Simple),
                    (b.clone(), LineShape::Simple),
                ];
                two.sort_by_key(|x| x.0.sort_key());
                two
            };
            Ok(JacquetModule { lines })
        }
    }
}

/// Germ lines of the Kirillov realization near zero, one tail per
/// coinvariant line. A self-extension contributes the same character with
/// valuation degrees 0 and 1.
pub fn kirillov_lines(params: &LocalParams) -> Result<Vec<CharTail>, CoreError> {
    let module = jacquet(params)?;
    let one = Scalar::one(params.p, params.k);
    let mut tails = Vec::new();
    for (chi, shape) in module.lines() {
        tails.push(CharTail::from_char(chi.clone()));
        if *shape == LineShape::SelfExtension {
            tails.push(CharTail::new(chi.clone(), 1, 0, one.clone()));
        }
    }
    Ok(tails)
}

/// The germ lines that survive `p`-adic completion: exactly those whose
/// character has a unit value at `p`.
///
/// At most one line can survive; two survivors mean the eigenvalue
/// valuations contradict the weight bookkeeping, and that is reported as
/// an error rather than silently returned.
pub fn completion_basis(params: &LocalParams) -> Result<Vec<CharTail>, CoreError> {
    let survivors: Vec<CharTail> = kirillov_lines(params)?
        .into_iter()
        .filter(|t| t.chi.value_at_p().v() == 0)
        .collect();
    if survivors.len() > 1 {
        return Err(CoreError::InvalidParams(format!(
            "{} unit-valuation germ lines; eigenvalue valuations violate the weight bookkeeping",
            survivors.len()
        )));
    }
    Ok(survivors)
}

/// A central character in split form `z -> smooth(z) * z^power`.
///
/// The smooth part's value at `p` already contains the modulus correction,
/// so `eval_at_p` is the honest value of the whole character at `z = p`.
#[derive(Clone, Debug)]
pub struct CentralChar {
    smooth: SmoothChar,
    power: i64,
}

impl CentralChar {
    pub fn smooth(&self) -> &SmoothChar {
        &self.smooth
    }

    pub fn power(&self) -> i64 {
        self.power
    }

    /// Value on a unit `u`: `smooth(u) * u^power`.
    pub fn eval_unit(&self, u: u64) -> Result<Scalar, CoreError> {
        let z = Scalar::from_i64(self.smooth.p(), self.smooth.k(), u as i64);
        Ok(self.smooth.eval_unit(u).mul(&z.pow_i64(self.power)?))
    }

    /// Value at `z = p`, valuation and unit part split.
    pub fn eval_at_p(&self) -> PValue {
        let shift = PValue::new(self.power, Scalar::one(self.smooth.p(), self.smooth.k()));
        self.smooth.value_at_p().mul(&shift)
    }
}

/// The central character of the record twisted by `z -> z^(-weight)`.
///
/// The smooth part is the product of the stored characters with the value
/// at `p` corrected by the modulus bookkeeping: one extra factor of `p`
/// for principal series. A special record stores only one of its two
/// eigenvalues; the companion is `p` times the stored one, so the
/// correction there is two factors of `p`. With the weight valuation
/// bookkeeping in force the corrected value at `p` has valuation exactly
/// `weight`, and the twisted character is unit-valued everywhere.
pub fn central_char(params: &LocalParams, weight: u32) -> Result<CentralChar, CoreError> {
    check_weight_consistency(params, weight)?;
    let (product, correction) = match params.kind {
        ReprKind::PrincipalSeries => (params.chars[0].mul(&params.chars[1])?, 1),
        ReprKind::Special => (params.chars[0].mul(&params.chars[0])?, 2),
        ReprKind::Supercuspidal | ReprKind::OneDimensional => {
            return Err(CoreError::Unsupported(
                "central character needs stored eigenvalue data".into(),
            ));
        }
    };
    let shift = PValue::new(correction, Scalar::one(product.p(), product.k()));
    let value = product.value_at_p().mul(&shift);
    Ok(CentralChar {
        smooth: product.with_value_at_p(value),
        power: -i64::from(weight),
    })
}

/// Validates a caller-supplied weight against the record: it must match a
/// stored weight, be at least 2, and satisfy the valuation bookkeeping if
/// construction never checked it.
fn check_weight_consistency(params: &LocalParams, weight: u32) -> Result<(), CoreError> {
    check_weight(Some(weight))?;
    match params.weight {
        Some(w) if w != weight => Err(CoreError::InvalidParams(format!(
            "weight {weight} disagrees with the stored weight {w}"
        ))),
        Some(_) => Ok(()),
        None => check_valuations(params.kind, &params.chars, weight),
    }
}

/// Whether the two-dimensional source of the parameters splits as a direct
/// sum of characters. Not computable from local data; callers assert it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitness {
    Split,
    NonSplit,
    Unknown,
}

/// Predicted germ lines beyond the compactly supported part, which is
/// always present and left implicit. `lower` lines are certain, `upper`
/// lines bound what can occur within the declared window.
#[derive(Clone, Debug)]
pub struct PredictedSpace {
    pub lower: Vec<CharTail>,
    pub upper: Vec<CharTail>,
    pub warnings: Vec<String>,
}

fn tail_order(x: &CharTail, y: &CharTail) -> std::cmp::Ordering {
    x.chi
        .sort_key()
        .cmp(&y.chi.sort_key())
        .then(x.a.cmp(&y.a))
        .then(x.b.cmp(&y.b))
}

/// Windowed prediction for the completed germ space.
///
/// The lower bound holds the completion survivor, plus the companion
/// character's plain line when the caller asserts a split source. The
/// upper bound fattens the same characters (both characters under `Split`
/// or `Unknown`) by all valuation-degree and log-degree exponents up to
/// `m_window`. When no line survives completion the source is forced
/// irreducible and both bounds are empty; demanding `Split` there is
/// accepted with a warning. At `p = 2` the log-degree exponent is pinned
/// to 0 (the log interaction is not modeled there).
pub fn predict_w(
    params: &LocalParams,
    weight: u32,
    splitness: Splitness,
    m_window: u32,
) -> Result<PredictedSpace, CoreError> {
    check_weight_consistency(params, weight)?;
    if params.kind == ReprKind::OneDimensional {
        return Err(CoreError::NoKirillovModel);
    }
    let mut warnings = Vec::new();
    let completion = completion_basis(params)?;
    let mut lower = completion.clone();
    let mut upper_chars: Vec<SmoothChar> = completion.iter().map(|t| t.chi.clone()).collect();

    if completion.is_empty() {
        if splitness == Splitness::Split {
            warnings.push(
                "split asserted, but every stored eigenvalue has positive valuation; \
                 no germ line survives completion"
                    .into(),
            );
        }
    } else {
        let survivor = &completion[0].chi;
        let companions: Vec<&SmoothChar> = params
            .chars
            .iter()
            .filter(|c| !chars_equal(c, survivor))
            .collect();
        match splitness {
            Splitness::NonSplit => {}
            Splitness::Split => {
                if companions.is_empty() {
                    warnings.push(
                        "split asserted, but the record has no companion character line".into(),
                    );
                } else {
                    for c in &companions {
                        lower.push(CharTail::from_char((*c).clone()));
                        upper_chars.push((*c).clone());
                    }
                }
            }
            Splitness::Unknown => {
                for c in &companions {
                    upper_chars.push((*c).clone());
                }
            }
        }
    }

    let b_max = if params.p == 2 {
        if m_window > 0 && !upper_chars.is_empty() {
            warnings.push("p = 2: log-degree lines are not modeled; b is pinned to 0".into());
        }
        0
    } else {
        m_window
    };
    let one = Scalar::one(params.p, params.k);
    let mut upper = Vec::new();
    for chi in &upper_chars {
        for a in 0..=m_window {
            for b in 0..=b_max {
                upper.push(CharTail::new(chi.clone(), a, b, one.clone()));
            }
        }
    }
    lower.sort_by(tail_order);
    upper.sort_by(tail_order);
    debug_assert!(lower.iter().all(|t| upper.contains(t)), "lower must sit inside upper");
    Ok(PredictedSpace { lower, upper, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{hensel_unit_root, PadicApprox};
    use num_bigint::BigInt;

    fn unram(p: u64, k: u32, v: i64, unit: i64) -> SmoothChar {
        SmoothChar::unramified(p, k, PValue::new(v, Scalar::from_i64(p, k, unit)))
    }

    /// The eigenvalue pair at p = 11 for the weight-12 cusp form: the unit
    /// root of x^2 - 534612 x + 11^11 and its complement.
    fn weight_twelve_pair(k: u32) -> (SmoothChar, SmoothChar) {
        let p = 11u64;
        let a = PadicApprox::new(p, k, &BigInt::from(534612u64));
        let c = PadicApprox::new(p, k, &BigInt::from(11u64.pow(11)));
        let alpha = hensel_unit_root(&a, &c).unwrap();
        let alpha_unit = Scalar::Plain(alpha);
        let beta_unit = alpha_unit.inverse().unwrap();
        (
            SmoothChar::unramified(p, k, PValue::new(0, alpha_unit)),
            SmoothChar::unramified(p, k, PValue::new(11, beta_unit)),
        )
    }

    /// Weight-2 pair at p = 5 with a_5 = -2 (unit root of x^2 + 2x + 5).
    fn weight_two_pair(k: u32) -> (SmoothChar, SmoothChar) {
        let p = 5u64;
        let a = PadicApprox::new(p, k, &BigInt::from(-2));
        let c = PadicApprox::new(p, k, &BigInt::from(5));
        let alpha = hensel_unit_root(&a, &c).unwrap();
        let alpha_unit = Scalar::Plain(alpha);
        let beta_unit = alpha_unit.inverse().unwrap();
        (
            SmoothChar::unramified(p, k, PValue::new(0, alpha_unit)),
            SmoothChar::unramified(p, k, PValue::new(1, beta_unit)),
        )
    }

    #[test]
    fn classification_matches_the_ratio_test() {
        let p = 7;
        let k = 4;
        // Values 1 and p with matching unit data: reducible.
        let red = LocalParams::principal_series(unram(p, k, 0, 1), unram(p, k, 1, 1), Some(2))
            .unwrap();
        let verdict = classify(&red);
        assert!(!verdict.irreducible);
        assert_eq!(verdict.witness.as_deref(), Some("chi1/chi2 = |.|^(1)"));

        let red_flip =
            LocalParams::principal_series(unram(p, k, 1, 1), unram(p, k, 0, 1), Some(2)).unwrap();
        assert_eq!(classify(&red_flip).witness.as_deref(), Some("chi1/chi2 = |.|^(-1)"));

        // Same valuations: a unit ratio is never the norm character.
        let irr = LocalParams::principal_series(unram(p, k, 0, 1), unram(p, k, 0, -1), None)
            .unwrap();
        assert!(classify(&irr).irreducible);

        // Valuation gap 1 but different unit parts at p: irreducible.
        let twisted =
            LocalParams::principal_series(unram(p, k, 0, 1), unram(p, k, 1, 3), Some(2)).unwrap();
        assert!(classify(&twisted).irreducible);

        // Valuation gap 1 but ramified against unramified: irreducible.
        let chi = SmoothChar::teichmuller_char(p, k, PValue::new(1, Scalar::one(p, k))).unwrap();
        let mixed = LocalParams::principal_series(unram(p, k, 0, 1), chi, Some(2)).unwrap();
        assert!(classify(&mixed).irreducible);

        // Valuation gap 2: irreducible.
        let gap = LocalParams::principal_series(unram(p, k, 0, 1), unram(p, k, 2, 1), Some(3))
            .unwrap();
        assert!(classify(&gap).irreducible);

        let sc = LocalParams::supercuspidal(p, k, Some(2)).unwrap();
        assert!(classify(&sc).irreducible);
        assert_eq!(classify(&sc).kind, ReprKind::Supercuspidal);
    }

    #[test]
    fn construction_guards() {
        let p = 5;
        let k = 3;
        assert!(matches!(
            LocalParams::principal_series(unram(p, k, 0, 1), unram(p, k, 0, 2), Some(1)),
            Err(CoreError::InvalidParams(_))
        ));
        // Valuation sum 0 is not weight - 1 = 11.
        assert!(matches!(
            LocalParams::principal_series(unram(p, k, 0, 1), unram(p, k, 0, 2), Some(12)),
            Err(CoreError::InvalidParams(_))
        ));
        assert!(matches!(
            LocalParams::special(unram(p, k, 1, 1), Some(2)),
            Err(CoreError::InvalidParams(_))
        ));
        assert!(LocalParams::special(unram(p, k, 0, 1), Some(2)).is_ok());
        assert!(matches!(
            LocalParams::supercuspidal(6, k, None),
            Err(CoreError::InvalidParams(_))
        ));

        // Every split of weight - 1 across the pair constructs; any other
        // sum is rejected.
        for w in 2u32..=12 {
            for v in 0..w {
                let ok = LocalParams::principal_series(
                    unram(p, k, i64::from(v), 1),
                    unram(p, k, i64::from(w) - 1 - i64::from(v), 2),
                    Some(w),
                );
                assert!(ok.is_ok());
                let bad = LocalParams::principal_series(
                    unram(p, k, i64::from(v) + 1, 1),
                    unram(p, k, i64::from(w) - 1 - i64::from(v), 2),
                    Some(w),
                );
                assert!(bad.is_err());
            }
        }
    }

    #[test]
    fn jacquet_dimension_table() {
        let p = 5;
        let k = 3;
        let ps = LocalParams::principal_series(unram(p, k, 0, 2), unram(p, k, 1, 1), Some(2))
            .unwrap();
        let m = jacquet(&ps).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.lines().len(), 2);
        assert!(m.lines().iter().all(|(_, s)| *s == LineShape::Simple));

        // Coincident characters: one line, counted twice.
        let twin = LocalParams::principal_series(unram(p, k, 0, 2), unram(p, k, 0, 2), None)
            .unwrap();
        let m = jacquet(&twin).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.lines().len(), 1);
        assert_eq!(m.lines()[0].1, LineShape::SelfExtension);

        let sp = LocalParams::special(unram(p, k, 0, 1), Some(2)).unwrap();
        assert_eq!(jacquet(&sp).unwrap().dim(), 1);

        let sc = LocalParams::supercuspidal(p, k, None).unwrap();
        assert_eq!(jacquet(&sc).unwrap().dim(), 0);

        let one_dim = LocalParams::one_dimensional(unram(p, k, 0, 1), None).unwrap();
        assert!(matches!(jacquet(&one_dim), Err(CoreError::NoKirillovModel)));

        let red = LocalParams::principal_series(unram(p, k, 0, 1), unram(p, k, 1, 1), Some(2))
            .unwrap();
        assert!(matches!(jacquet(&red), Err(CoreError::Unsupported(_))));
    }

    #[test]
    fn germ_lines_by_kind() {
        let p = 5;
        let k = 3;
        let ps = LocalParams::principal_series(unram(p, k, 0, 2), unram(p, k, 1, 1), Some(2))
            .unwrap();
        let lines = kirillov_lines(&ps).unwrap();
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|t| t.a == 0 && t.b == 0));

        let twin = LocalParams::principal_series(unram(p, k, 1, 2), unram(p, k, 1, 2), None)
            .unwrap();
        let lines = kirillov_lines(&twin).unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!((lines[0].a, lines[1].a), (0, 1));
        assert!(chars_equal(&lines[0].chi, &lines[1].chi));

        let sp = LocalParams::special(unram(p, k, 0, 1), Some(2)).unwrap();
        assert_eq!(kirillov_lines(&sp).unwrap().len(), 1);

        let sc = LocalParams::supercuspidal(p, k, None).unwrap();
        assert!(kirillov_lines(&sc).unwrap().is_empty());
    }

    #[test]
    fn completion_keeps_at_most_one_line() {
        let (alpha, beta) = weight_twelve_pair(5);
        let expected = alpha.value_at_p().clone();
        let ps = LocalParams::principal_series(alpha, beta, Some(12)).unwrap();
        let surv = completion_basis(&ps).unwrap();
        assert_eq!(surv.len(), 1);
        assert_eq!(surv[0].chi.value_at_p(), &expected);
        // The frozen unit eigenvalue mod 11^5.
        assert_eq!(
            expected.unit().clone(),
            Scalar::from_i64(11, 5, 51459),
            "unit root of the frozen quadratic"
        );

        // Both valuations positive: nothing survives.
        let ps = LocalParams::principal_series(unram(2, 4, 3, 1), unram(2, 4, 8, 3), Some(12))
            .unwrap();
        assert!(completion_basis(&ps).unwrap().is_empty());

        // Two unit lines cannot both survive; only constructible without a
        // weight, and flagged as a bookkeeping violation.
        let twin = LocalParams::principal_series(unram(5, 3, 0, 2), unram(5, 3, 0, 2), None)
            .unwrap();
        assert!(matches!(completion_basis(&twin), Err(CoreError::InvalidParams(_))));

        let sp = LocalParams::special(unram(5, 3, 0, 4), Some(2)).unwrap();
        assert_eq!(completion_basis(&sp).unwrap().len(), 1);
    }

    #[test]
    fn central_char_weight_twelve_is_trivial_at_p() {
        let (alpha, beta) = weight_twelve_pair(5);
        let ps = LocalParams::principal_series(alpha, beta, Some(12)).unwrap();
        let omega = central_char(&ps, 12).unwrap();
        // Product of the eigenvalues is 11^11 with unit part 1; corrected
        // by one factor of p it has valuation 12, so the twist cancels it.
        assert_eq!(omega.smooth().value_at_p().v(), 12);
        let at_p = omega.eval_at_p();
        assert_eq!(at_p.v(), 0);
        assert!(at_p.unit().is_one());
        // Trivial unit data: on units the character is u -> u^(-12).
        let two = Scalar::from_i64(11, 5, 2);
        assert_eq!(omega.eval_unit(2).unwrap(), two.pow_i64(-12).unwrap());
        assert!(omega.eval_unit(1).unwrap().is_one());
    }

    #[test]
    fn central_char_of_special_records() {
        // Weight-2 record with eigenvalue -1: the companion eigenvalue is
        // -p, the corrected product is p^2, and the twist cancels it.
        let sp = LocalParams::special(unram(7, 4, 0, -1), Some(2)).unwrap();
        let omega = central_char(&sp, 2).unwrap();
        let at_p = omega.eval_at_p();
        assert_eq!(at_p.v(), 0);
        assert!(at_p.unit().is_one());

        let sc = LocalParams::supercuspidal(7, 4, None).unwrap();
        assert!(matches!(central_char(&sc, 2), Err(CoreError::Unsupported(_))));

        // Weight disagreement with the stored record is rejected.
        let (alpha, beta) = weight_twelve_pair(4);
        let ps = LocalParams::principal_series(alpha, beta, Some(12)).unwrap();
        assert!(matches!(central_char(&ps, 10), Err(CoreError::InvalidParams(_))));
    }

    #[test]
    fn predictor_window_bounds() {
        // Ordinary weight-12 record, no split assertion: one certain line,
        // and the window fattens only that character.
        let (alpha, beta) = weight_twelve_pair(5);
        let ps = LocalParams::principal_series(alpha, beta, Some(12)).unwrap();
        let flat = predict_w(&ps, 12, Splitness::NonSplit, 0).unwrap();
        assert_eq!(flat.lower.len(), 1);
        assert_eq!(flat.upper, flat.lower);
        assert!(flat.warnings.is_empty());

        let fat = predict_w(&ps, 12, Splitness::NonSplit, 2).unwrap();
        assert_eq!(fat.lower.len(), 1);
        assert_eq!(fat.upper.len(), 9);
        assert!(fat.lower.iter().all(|t| fat.upper.contains(t)));

        // Unknown splitness: the companion character enters the upper
        // bound but not the lower one.
        let hedged = predict_w(&ps, 12, Splitness::Unknown, 1).unwrap();
        assert_eq!(hedged.lower.len(), 1);
        assert_eq!(hedged.upper.len(), 8);

        // Split assertion (the weight-2 shape): both lines are certain and
        // the eigenvalue product is p times a unit.
        let (alpha, beta) = weight_two_pair(4);
        let product = alpha.value_at_p().mul(beta.value_at_p());
        assert_eq!(product.v(), 1);
        let cm = LocalParams::principal_series(alpha, beta, Some(2)).unwrap();
        let split = predict_w(&cm, 2, Splitness::Split, 1).unwrap();
        assert_eq!(split.lower.len(), 2);
        assert_eq!(split.upper.len(), 8);
        assert!(split.warnings.is_empty());
        assert!(split.lower.iter().all(|t| split.upper.contains(t)));

        // Supercuspidal: both bounds are the bare compactly supported part.
        let sc = LocalParams::supercuspidal(5, 3, None).unwrap();
        let bare = predict_w(&sc, 12, Splitness::NonSplit, 3).unwrap();
        assert!(bare.lower.is_empty() && bare.upper.is_empty());
    }

    #[test]
    fn predictor_warnings_and_refusals() {
        // Positive valuations on both eigenvalues force irreducibility; a
        // split assertion is accepted with a warning and empty bounds.
        let ps = LocalParams::principal_series(unram(2, 4, 3, 1), unram(2, 4, 8, 3), Some(12))
            .unwrap();
        let w = predict_w(&ps, 12, Splitness::Split, 2).unwrap();
        assert!(w.lower.is_empty() && w.upper.is_empty());
        assert_eq!(w.warnings.len(), 1);
        assert!(w.warnings[0].contains("positive valuation"));

        // p = 2 with a surviving line: b is pinned to 0 and a warning says so.
        let ps = LocalParams::principal_series(unram(2, 4, 0, 1), unram(2, 4, 11, 3), Some(12))
            .unwrap();
        let w = predict_w(&ps, 12, Splitness::NonSplit, 2).unwrap();
        assert_eq!(w.upper.len(), 3);
        assert!(w.upper.iter().all(|t| t.b == 0));
        assert!(w.warnings.iter().any(|s| s.contains("pinned")));

        // A special record has no companion line to split off.
        let sp = LocalParams::special(unram(7, 4, 0, -1), Some(2)).unwrap();
        let w = predict_w(&sp, 2, Splitness::Split, 0).unwrap();
        assert_eq!(w.lower.len(), 1);
        assert!(w.warnings.iter().any(|s| s.contains("companion")));

        let one_dim = LocalParams::one_dimensional(unram(5, 3, 0, 1), None).unwrap();
        assert!(matches!(
            predict_w(&one_dim, 2, Splitness::Unknown, 0),
            Err(CoreError::NoKirillovModel)
        ));
    }
}
