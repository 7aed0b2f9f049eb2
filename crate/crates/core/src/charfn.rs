//! Smooth characters of `Q_p^x` at finite precision, and the two-parameter
//! family of character tails `chi_{a,b}`.
//!
//! A smooth character is determined by its table on `(Z/p^m)^x` (conductor
//! exponent `m`) together with its value at `p`, which is stored in split
//! `unit * p^v` form so that non-unit values keep an exact unit part. The
//! class-field normalization is fixed once and for all: the value at `p`
//! is the value on geometric Frobenius.

use num_bigint::BigInt;

use crate::error::CoreError;
use crate::locfn::{domain_residues, Domain, LocConstFn};
use crate::padic::{plog, teichmuller, PadicApprox};
use crate::scalar::{PValue, Scalar};

/// A character of `Q_p^x` trivial on `1 + p^m Z_p`.
///
/// The table is kept at the canonical (minimal) conductor with canonical
/// scalar representations, so derived equality is equality of characters
/// at equal precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothChar {
    p: u64,
    k: u32,
    table: LocConstFn,
    value_at_p: PValue,
}

/// A generator of the cyclic group `(Z/p^m)^x` for odd `p` (or `m <= 1`).
pub fn unit_group_generator(p: u64, m: u32) -> u64 {
    assert!(p % 2 == 1, "the p = 2 unit group is not cyclic for m >= 3");
    assert!(m >= 1);
    let pm = p.pow(m);
    let phi = (p - 1) * p.pow(m - 1);
    let mut prime_factors = Vec::new();
    let mut rest = phi;
    let mut d = 2;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            prime_factors.push(d);
            while rest.is_multiple_of(d) {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        prime_factors.push(rest);
    }
    let powmod = |g: u64, e: u64| -> u64 {
        let mut acc = 1u128;
        let mut base = g as u128 % pm as u128;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % pm as u128;
            }
            base = base * base % pm as u128;
            e >>= 1;
        }
        acc as u64
    };
    (2..pm)
        .filter(|g| g % p != 0)
        .find(|&g| prime_factors.iter().all(|&q| powmod(g, phi / q) != 1))
        .expect("cyclic group has a generator")
}

/// Elements whose powers and products generate `(Z/p^m)^x`.
fn generating_set(p: u64, m: u32) -> Vec<u64> {
    if m == 0 {
        return Vec::new();
    }
    if p != 2 {
        return vec![unit_group_generator(p, m)];
    }
    match m {
        1 => Vec::new(),
        2 => vec![3],
        _ => vec![2u64.pow(m) - 1, 5],
    }
}

impl SmoothChar {
    /// Builds a character from a value table indexed by the units mod
    /// `p^m` in increasing residue order.
    ///
    /// Verifies `chi(1) = 1`, that all values are units, and
    /// multiplicativity against a generating set of the unit group; then
    /// canonicalizes the conductor and the scalar representations.
    pub fn new(
        p: u64,
        k: u32,
        m: u32,
        values: Vec<Scalar>,
        value_at_p: PValue,
    ) -> Result<Self, CoreError> {
        let canon: Vec<Scalar> = values.iter().map(|s| s.canonicalize_level()).collect();
        let table = LocConstFn::new(p, k, m, Domain::ZpUnits, canon);
        if !table.eval_u64(1).is_one() {
            return Err(CoreError::InvalidParams("character must send 1 to 1".into()));
        }
        for (r, v) in table.entries() {
            if !v.is_unit() {
                return Err(CoreError::NonUnit(format!(
                    "character value at {r} is not a unit"
                )));
            }
        }
        let pm = p.pow(m);
        for g in generating_set(p, m) {
            let chi_g = table.eval_u64(g);
            for (u, chi_u) in table.entries() {
                let lhs = table.eval_u64(g * u % pm);
                if !lhs.sub(&chi_g.mul(&chi_u)).is_zero() {
                    return Err(CoreError::InvalidParams(format!(
                        "table is not multiplicative at ({g}, {u})"
                    )));
                }
            }
        }
        Ok(SmoothChar {
            p,
            k,
            table: table.canonicalize_level(),
            value_at_p,
        })
    }

    /// The unramified character with the given Frobenius value.
    pub fn unramified(p: u64, k: u32, value_at_p: PValue) -> Self {
        SmoothChar {
            p,
            k,
            table: LocConstFn::new(p, k, 0, Domain::ZpUnits, vec![Scalar::one(p, k)]),
            value_at_p,
        }
    }

    pub fn trivial(p: u64, k: u32) -> Self {
        Self::unramified(p, k, PValue::one(p, k))
    }

    /// The character sending a unit to its root-of-unity component, with a
    /// chosen value at `p`.
    pub fn teichmuller_char(p: u64, k: u32, value_at_p: PValue) -> Result<Self, CoreError> {
        assert!(p % 2 == 1);
        let values = domain_residues(p, 1, Domain::ZpUnits)
            .into_iter()
            .map(|u| {
                teichmuller(&PadicApprox::from_u64(p, k, u)).map(|d| Scalar::Plain(d.teich))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(p, k, 1, values, value_at_p)
    }

    /// Character with `chi(g) = teich(g)^s * zeta_{p^{m-1}}^t` on the
    /// cyclic generator `g`, for odd `p`.
    pub fn from_exponents(
        p: u64,
        k: u32,
        m: u32,
        s: u64,
        t: u64,
        value_at_p: PValue,
    ) -> Result<Self, CoreError> {
        assert!(p % 2 == 1, "exponent construction needs a cyclic unit group");
        assert!(m >= 1);
        let g = unit_group_generator(p, m);
        let teich_g = teichmuller(&PadicApprox::from_u64(p, k, g))?.teich;
        let chi_g = if m >= 2 {
            Scalar::Plain(teich_g.pow(s)).mul(&Scalar::zeta(p, k, m - 1, t as i64))
        } else {
            assert!(t == 0, "level-1 characters have no wild part");
            Scalar::Plain(teich_g.pow(s))
        };
        let pm = p.pow(m);
        let phi = (p - 1) * p.pow(m - 1);
        // Walk the powers of g once, then reorder by residue.
        let mut by_residue = vec![Scalar::zero(p, k); pm as usize];
        let mut pow_g = 1u64;
        let mut chi_pow = Scalar::one(p, k);
        for _ in 0..phi {
            by_residue[pow_g as usize] = chi_pow.clone();
            pow_g = pow_g * g % pm;
            chi_pow = chi_pow.mul(&chi_g);
        }
        let values = domain_residues(p, m, Domain::ZpUnits)
            .into_iter()
            .map(|r| by_residue[r as usize].clone())
            .collect();
        Self::new(p, k, m, values, value_at_p)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Canonical conductor exponent; 0 means unramified.
    pub fn conductor(&self) -> u32 {
        self.table.level()
    }

    pub fn is_unramified(&self) -> bool {
        self.conductor() == 0
    }

    pub fn value_at_p(&self) -> &PValue {
        &self.value_at_p
    }

    /// Same behavior on units, replaced value at `p`.
    pub fn with_value_at_p(&self, value_at_p: PValue) -> Self {
        SmoothChar { value_at_p, ..self.clone() }
    }

    pub fn unit_table(&self) -> &LocConstFn {
        &self.table
    }

    /// Value on a unit residue.
    ///
    /// # Panics
    /// Panics when `u` is divisible by `p`.
    pub fn eval_unit(&self, u: u64) -> Scalar {
        self.table.eval_u64(u)
    }

    pub fn eval_unit_int(&self, u: &BigInt) -> Scalar {
        self.table.eval(u)
    }

    /// Value at `p^v * u` in split form (unit part times power of `p`).
    pub fn eval_split(&self, v: i64, u: u64) -> Result<PValue, CoreError> {
        Ok(self
            .value_at_p
            .pow_i64(v)?
            .mul_scalar_unit(&self.eval_unit(u)))
    }

    /// Value at `p^v * u` as a scalar, the ordinary evaluation.
    ///
    /// Fails when the total power of `p` is negative, which happens exactly
    /// for `v < 0` with a non-invertible value at `p`.
    pub fn eval(&self, v: i64, u: u64) -> Result<Scalar, CoreError> {
        self.eval_split(v, u)?.eval_scalar()
    }

    /// Pointwise product of characters.
    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        assert_eq!(self.p, other.p, "mixed primes");
        let m = self.conductor().max(other.conductor());
        let k = self.k.min(other.k);
        let values = domain_residues(self.p, m, Domain::ZpUnits)
            .into_iter()
            .map(|u| self.eval_unit(u).mul(&other.eval_unit(u)).reduce_to(k))
            .collect();
        Self::new(
            self.p,
            k,
            m,
            values,
            self.value_at_p.mul(&other.value_at_p),
        )
    }

    pub fn inverse(&self) -> Result<Self, CoreError> {
        let m = self.conductor();
        let values = domain_residues(self.p, m, Domain::ZpUnits)
            .into_iter()
            .map(|u| self.eval_unit(u).inverse())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.p, self.k, m, values, self.value_at_p.inverse()?)
    }

    /// Whether the restrictions to `Z_p^x` agree (values compared at the
    /// smaller precision).
    pub fn same_unit_part(&self, other: &Self) -> bool {
        if self.p != other.p || self.conductor() != other.conductor() {
            return false;
        }
        let k = self.k.min(other.k);
        domain_residues(self.p, self.conductor(), Domain::ZpUnits)
            .into_iter()
            .all(|u| {
                self.eval_unit(u)
                    .reduce_to(k)
                    .sub(&other.eval_unit(u).reduce_to(k))
                    .is_zero()
            })
    }

    /// Deterministic ordering key: conductor, value at p, then the table.
    pub fn sort_key(&self) -> impl Ord {
        let table_key: Vec<_> = self
            .table
            .table()
            .iter()
            .map(|s| s.residue_key())
            .collect();
        (
            self.conductor(),
            self.value_at_p.v(),
            self.value_at_p.unit().residue_key(),
            table_key,
        )
    }
}

/// One term `coeff * chi_{a,b}` of a Kirillov tail: the function
/// `p^v u |-> coeff * chi(p)^v * v^a * chi(zeta) * chi(t) * log(t)^b`
/// where `u = zeta * t` is the Teichmuller factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharTail {
    pub chi: SmoothChar,
    pub a: u32,
    pub b: u32,
    pub coeff: Scalar,
}

impl CharTail {
    pub fn new(chi: SmoothChar, a: u32, b: u32, coeff: Scalar) -> Self {
        CharTail { chi, a, b, coeff }
    }

    /// Plain `1_{Z_p} * chi` germ.
    pub fn from_char(chi: SmoothChar) -> Self {
        let (p, k) = (chi.p(), chi.k());
        CharTail { chi, a: 0, b: 0, coeff: Scalar::one(p, k) }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        CharTail {
            chi: self.chi.clone(),
            a: self.a,
            b: self.b,
            coeff: self.coeff.mul(c),
        }
    }

    pub fn p(&self) -> u64 {
        self.chi.p()
    }

    pub fn k(&self) -> u32 {
        self.chi.k()
    }
}

/// Evaluates a tail at `p^v * u`, per the displayed formula.
///
/// The unit is factored as `u = zeta * t` (root of unity times principal
/// unit) and the character is evaluated on the two factors separately; a
/// property test pins this against the collapsed form `chi(u)`.
///
/// # Errors
/// `Unsupported` at `p = 2` (the root-of-unity/log interaction is not
/// modeled there); precision errors propagate from `chi(p)^v`.
pub fn chi_ab_eval(tail: &CharTail, v: i64, u: &PadicApprox) -> Result<Scalar, CoreError> {
    let p = tail.p();
    if p == 2 {
        return Err(CoreError::Unsupported(
            "chi_{a,b} tails are not defined at p = 2".into(),
        ));
    }
    let decomp = teichmuller(u)?;
    let chi_zeta = tail
        .chi
        .eval_unit_int(&BigInt::from(decomp.teich.residue().clone()));
    let chi_t = tail
        .chi
        .eval_unit_int(&BigInt::from(decomp.principal.residue().clone()));
    let log_t = plog(&decomp.principal)?;
    let va = BigInt::from(v).pow(tail.a);
    let chi_p_pow = tail.chi.value_at_p().pow_i64(v)?.eval_scalar()?;
    Ok(tail
        .coeff
        .mul(&chi_p_pow)
        .mul_int(&va)
        .mul(&chi_zeta)
        .mul(&chi_t)
        .mul(&Scalar::Plain(log_t.pow(tail.b as u64))))
}

/// Tabulates a tail on the valuation-`v` shell as a unit-domain function.
///
/// The level is the conductor for `b = 0`; a positive log power makes the
/// value depend on the unit mod `p^k`.
pub fn tail_shell(tail: &CharTail, v: i64) -> Result<LocConstFn, CoreError> {
    let p = tail.p();
    let k = tail.k();
    let level = if tail.b > 0 {
        tail.chi.conductor().max(k)
    } else {
        tail.chi.conductor()
    };
    let table = domain_residues(p, level, Domain::ZpUnits)
        .into_iter()
        .map(|u| chi_ab_eval(tail, v, &PadicApprox::from_u64(p, k, u.max(1))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LocConstFn::new(p, k, level, Domain::ZpUnits, table))
}

/// Sums evaluations of a tail list at `p^v * u`.
pub fn tails_eval(
    tails: &[CharTail],
    v: i64,
    u: &PadicApprox,
) -> Result<Scalar, CoreError> {
    let mut acc = Scalar::zero(u.p(), u.k());
    for t in tails {
        acc = acc.add(&chi_ab_eval(t, v, u)?);
    }
    Ok(acc)
}

/// Canonical form of a tail list: merge equal `(chi, a, b)` terms, drop
/// zero coefficients, sort deterministically.
pub fn merge_tails(tails: Vec<CharTail>) -> Vec<CharTail> {
    let mut out: Vec<CharTail> = Vec::new();
    for t in tails {
        if let Some(existing) = out
            .iter_mut()
            .find(|e| e.chi == t.chi && e.a == t.a && e.b == t.b)
        {
            existing.coeff = existing.coeff.add(&t.coeff);
        } else {
            out.push(t);
        }
    }
    out.retain(|t| !t.coeff.is_zero());
    out.sort_by(|x, y| {
        (x.chi.sort_key(), x.a, x.b)
            .cmp(&(y.chi.sort_key(), y.a, y.b))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_char(rng: &mut ChaCha8Rng, p: u64, k: u32, max_m: u32) -> SmoothChar {
        let m = rng.gen_range(1..=max_m);
        let s = rng.gen_range(0..p - 1);
        let t = if m >= 2 { rng.gen_range(0..p.pow(m - 1)) } else { 0 };
        let alpha = loop {
            let a = rng.gen_range(1..p.pow(k));
            if a % p != 0 {
                break a;
            }
        };
        let vp = PValue::new(
            rng.gen_range(0..3),
            Scalar::from_i64(p, k, alpha as i64),
        );
        SmoothChar::from_exponents(p, k, m, s, t, vp).unwrap()
    }

    #[test]
    fn trivial_character_is_one_everywhere() {
        let chi = SmoothChar::trivial(5, 3);
        assert_eq!(chi.conductor(), 0);
        for v in -3..=3 {
            for u in [1u64, 2, 3, 4, 6] {
                assert!(chi.eval(v, u).unwrap().is_one());
            }
        }
    }

    #[test]
    fn unramified_character_powers_frobenius() {
        let alpha = Scalar::from_i64(5, 3, 7);
        let chi = SmoothChar::unramified(5, 3, PValue::from_unit_scalar(alpha.clone()));
        assert_eq!(chi.eval(2, 13).unwrap(), alpha.mul(&alpha));
        assert_eq!(chi.eval(-1, 1).unwrap(), alpha.inverse().unwrap());
    }

    #[test]
    fn negative_valuation_needs_invertible_frobenius_value() {
        let chi = SmoothChar::unramified(
            5,
            3,
            PValue::new(1, Scalar::one(5, 3)),
        );
        assert!(chi.eval(1, 1).is_ok());
        assert!(matches!(
            chi.eval(-1, 1),
            Err(CoreError::NegativeValuation(_))
        ));
    }

    #[test]
    fn teichmuller_character_matches_decomposition() {
        let chi = SmoothChar::teichmuller_char(5, 2, PValue::one(5, 2)).unwrap();
        for u in [1u64, 2, 3, 4, 6, 7, 13, 24] {
            let d = teichmuller(&PadicApprox::from_u64(5, 2, u)).unwrap();
            assert_eq!(chi.eval(0, u).unwrap(), Scalar::Plain(d.teich));
        }
    }

    #[test]
    fn multiplicativity_exhaustive_on_random_characters() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let p = [3u64, 5][rng.gen_range(0..2)];
            let k = rng.gen_range(2..=3);
            let chi = rand_char(&mut rng, p, k, 2);
            let m = chi.conductor().max(1);
            let pm = p.pow(m);
            for u in domain_residues(p, m, Domain::ZpUnits) {
                for w in domain_residues(p, m, Domain::ZpUnits) {
                    let lhs = chi.eval_unit(u * w % pm);
                    let rhs = chi.eval_unit(u).mul(&chi.eval_unit(w));
                    assert!(lhs.sub(&rhs).is_zero());
                }
            }
        }
    }

    #[test]
    fn constructor_rejects_non_multiplicative_tables() {
        // Table on (Z/5)^x sending 1,2,3,4 to 1,2,1,1 is not a character.
        let vals = [1i64, 2, 1, 1]
            .iter()
            .map(|&n| Scalar::from_i64(5, 2, n))
            .collect();
        assert!(SmoothChar::new(5, 2, 1, vals, PValue::one(5, 2)).is_err());
    }

    #[test]
    fn conductor_canonicalization() {
        // A tame character built at level 2 has conductor 1.
        let chi = SmoothChar::from_exponents(5, 3, 2, 1, 0, PValue::one(5, 3)).unwrap();
        assert_eq!(chi.conductor(), 1);
        // s = 0, t = 0 is trivial on units.
        let chi = SmoothChar::from_exponents(5, 3, 2, 0, 0, PValue::one(5, 3)).unwrap();
        assert_eq!(chi.conductor(), 0);
        // A wild character keeps conductor 2.
        let chi = SmoothChar::from_exponents(5, 3, 2, 0, 1, PValue::one(5, 3)).unwrap();
        assert_eq!(chi.conductor(), 2);
    }

    #[test]
    fn wild_character_order() {
        // Conductor-2 wild part has order p at level 1 of the value ring.
        let chi = SmoothChar::from_exponents(3, 3, 2, 0, 1, PValue::one(3, 3)).unwrap();
        let g = unit_group_generator(3, 2);
        let val = chi.eval_unit(g);
        let mut acc = Scalar::one(3, 3);
        for _ in 0..3 {
            acc = acc.mul(&val);
        }
        assert!(acc.is_one());
        assert!(!val.is_one());
    }

    #[test]
    fn tail_with_zero_exponents_is_char_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let p = [3u64, 5][rng.gen_range(0..2)];
            let k = 3;
            let chi = rand_char(&mut rng, p, k, 2);
            let tail = CharTail::from_char(chi.clone());
            let m = chi.conductor().max(1);
            for v in -3i64..=3 {
                for u in domain_residues(p, m, Domain::ZpUnits) {
                    let via_tail = chi_ab_eval(&tail, v, &PadicApprox::from_u64(p, k, u));
                    let direct = chi.eval(v, u);
                    match (via_tail, direct) {
                        (Ok(x), Ok(y)) => assert!(x.sub(&y).is_zero()),
                        (Err(_), Err(_)) => {}
                        other => panic!("routes disagree: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn tail_examples() {
        // Trivial chi, a=1: only v^a survives.
        let tail = CharTail::new(
            SmoothChar::trivial(5, 3),
            1,
            0,
            Scalar::one(5, 3),
        );
        let got = chi_ab_eval(&tail, 2, &PadicApprox::from_u64(5, 3, 7)).unwrap();
        assert_eq!(got, Scalar::from_i64(5, 3, 2));
        // Trivial chi, b=1 at v=0, u=6: the log of 6.
        let tail = CharTail::new(
            SmoothChar::trivial(5, 3),
            0,
            1,
            Scalar::one(5, 3),
        );
        let got = chi_ab_eval(&tail, 0, &PadicApprox::from_u64(5, 3, 6)).unwrap();
        assert_eq!(got, Scalar::from_i64(5, 3, 55));
    }

    #[test]
    fn split_char_route_matches_collapsed_route() {
        // chi(zeta) * chi(t) must equal chi(u): the formula's split is a
        // genuinely different code path from a direct table lookup.
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..30 {
            let p = [3u64, 5][rng.gen_range(0..2)];
            let k = rng.gen_range(2..=4);
            let chi = rand_char(&mut rng, p, k, 2);
            let tail = CharTail::from_char(chi.clone());
            for _ in 0..10 {
                let u = loop {
                    let u = rng.gen_range(1..p.pow(k));
                    if u % p != 0 {
                        break u;
                    }
                };
                let split = chi_ab_eval(&tail, 0, &PadicApprox::from_u64(p, k, u)).unwrap();
                let collapsed = chi.eval_unit_int(&BigInt::from(u));
                assert!(split.sub(&collapsed).is_zero());
            }
        }
    }

    #[test]
    fn p2_tails_are_rejected() {
        let tail = CharTail::from_char(SmoothChar::trivial(2, 4));
        assert!(matches!(
            chi_ab_eval(&tail, 0, &PadicApprox::from_u64(2, 4, 5)),
            Err(CoreError::Unsupported(_))
        ));
    }

    #[test]
    fn merge_tails_canonicalizes() {
        let chi = SmoothChar::trivial(5, 3);
        let t1 = CharTail::new(chi.clone(), 0, 0, Scalar::from_i64(5, 3, 2));
        let t2 = CharTail::new(chi.clone(), 0, 0, Scalar::from_i64(5, 3, 3));
        let t3 = CharTail::new(chi.clone(), 1, 0, Scalar::from_i64(5, 3, -3));
        let merged = merge_tails(vec![t3.clone(), t1, t2]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].a, 0);
        assert_eq!(merged[0].coeff, Scalar::from_i64(5, 3, 5));
        assert_eq!(merged[1].a, 1);
        // Cancellation drops terms.
        let merged = merge_tails(vec![
            t3.clone(),
            CharTail::new(chi, 1, 0, Scalar::from_i64(5, 3, 3)),
        ]);
        assert!(merged.is_empty());
    }

    #[test]
    fn character_product_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..20 {
            let p = 5;
            let k = 3;
            let c1 = rand_char(&mut rng, p, k, 2);
            let c2 = rand_char(&mut rng, p, k, 2);
            let prod = c1.mul(&c2).unwrap();
            for u in domain_residues(p, 2, Domain::ZpUnits) {
                let lhs = prod.eval_unit(u);
                let rhs = c1.eval_unit(u).mul(&c2.eval_unit(u));
                assert!(lhs.sub(&rhs).is_zero());
            }
            let id = c1.mul(&c1.inverse().unwrap()).unwrap();
            assert_eq!(id.conductor(), 0);
            assert!(id.value_at_p().unit().is_one());
            assert_eq!(id.value_at_p().v(), 0);
        }
    }
}
