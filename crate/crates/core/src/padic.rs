//! Elements of `Z/p^k` with valuation tracking.
//!
//! A [`PadicApprox`] is a residue modulo `p^k` together with the prime `p`
//! and the precision `k` it carries. Arithmetic is exact modulo `p^k`;
//! binary operations on operands of different precision first reduce both
//! to the smaller precision. Residues are arbitrary-size integers, so
//! numbers like `11^11` survive intermediate products.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::CoreError;

/// An element of `Z/p^k`, stored as its canonical residue in `[0, p^k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    p: u64,
    k: u32,
    residue: BigUint,
}

impl PadicApprox {
    /// Builds the element of `Z/p^k` represented by `value`.
    ///
    /// # Panics
    /// Panics if `p < 2` or `k == 0`.
    pub fn new(p: u64, k: u32, value: &BigInt) -> Self {
        assert!(p >= 2, "prime must be at least 2");
        assert!(k >= 1, "precision must be positive");
        let modulus = BigInt::from(pk_modulus(p, k));
        let residue = value.mod_floor(&modulus);
        PadicApprox {
            p,
            k,
            residue: residue.to_biguint().expect("mod_floor is non-negative"),
        }
    }

    /// Convenience constructor from an unsigned machine integer.
    pub fn from_u64(p: u64, k: u32, value: u64) -> Self {
        Self::new(p, k, &BigInt::from(value))
    }

    /// Convenience constructor from a signed machine integer.
    pub fn from_i64(p: u64, k: u32, value: i64) -> Self {
        Self::new(p, k, &BigInt::from(value))
    }

    pub fn zero(p: u64, k: u32) -> Self {
        Self::from_u64(p, k, 0)
    }

    pub fn one(p: u64, k: u32) -> Self {
        Self::from_u64(p, k, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The canonical residue in `[0, p^k)`.
    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    /// `p^k` for this value's precision.
    pub fn modulus(&self) -> BigUint {
        pk_modulus(self.p, self.k)
    }

    /// The symmetric lift in `(-p^k/2, p^k/2]`, used by CSV dumps.
    pub fn symmetric_lift(&self) -> BigInt {
        let m = BigInt::from(self.modulus());
        let r = BigInt::from(self.residue.clone());
        if &r * 2 > m {
            r - m
        } else {
            r
        }
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.residue.is_one()
    }

    /// `min(k, max { e : p^e divides the residue })`; the zero residue
    /// returns `k`.
    pub fn valuation(&self) -> u32 {
        if self.residue.is_zero() {
            return self.k;
        }
        let p = BigUint::from(self.p);
        let mut v = 0u32;
        let mut r = self.residue.clone();
        while v < self.k {
            let (q, rem) = r.div_rem(&p);
            if !rem.is_zero() {
                break;
            }
            r = q;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == 0
    }

    /// Reduces to precision `k2 <= k`.
    pub fn reduce_to(&self, k2: u32) -> Self {
        assert!(k2 >= 1 && k2 <= self.k, "can only reduce precision");
        if k2 == self.k {
            return self.clone();
        }
        PadicApprox {
            p: self.p,
            k: k2,
            residue: &self.residue % pk_modulus(self.p, k2),
        }
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.p, other.p, "mixed primes");
        let k = self.k.min(other.k);
        (self.reduce_to(k), other.reduce_to(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let m = a.modulus();
        PadicApprox {
            p: a.p,
            k: a.k,
            residue: (a.residue + b.residue) % m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let m = a.modulus();
        let r = (a.residue + (&m - b.residue)) % &m;
        PadicApprox { p: a.p, k: a.k, residue: r }
    }

    pub fn neg(&self) -> Self {
        Self::zero(self.p, self.k).sub(self)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let m = a.modulus();
        PadicApprox {
            p: a.p,
            k: a.k,
            residue: (a.residue * b.residue) % m,
        }
    }

    /// Multiplies by an exact integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        self.mul(&PadicApprox::new(self.p, self.k, n))
    }

    pub fn pow(&self, e: u64) -> Self {
        if e == 0 {
            return Self::one(self.p, self.k);
        }
        let m = self.modulus();
        PadicApprox {
            p: self.p,
            k: self.k,
            residue: self.residue.modpow(&BigUint::from(e), &m),
        }
    }

    /// `self^e` with negative exponents allowed for units.
    pub fn pow_i64(&self, e: i64) -> Result<Self, CoreError> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    /// The inverse modulo `p^k`; errors on non-units.
    pub fn inverse(&self) -> Result<Self, CoreError> {
        if !self.is_unit() {
            return Err(CoreError::NonUnit(format!(
                "cannot invert {} mod {}^{}",
                self.residue, self.p, self.k
            )));
        }
        let m = BigInt::from(self.modulus());
        let r = BigInt::from(self.residue.clone());
        let e = r.extended_gcd(&m);
        debug_assert!(e.gcd.is_one(), "unit residue must be coprime to p^k");
        Ok(PadicApprox::new(self.p, self.k, &e.x))
    }

    /// Equality after reducing both sides to precision `k2`.
    pub fn eq_mod(&self, other: &Self, k2: u32) -> bool {
        assert_eq!(self.p, other.p, "mixed primes");
        self.reduce_to(k2.min(self.k)) == other.reduce_to(k2.min(other.k))
    }

    /// Exact division by `p^e`; the result keeps precision `k - e`.
    ///
    /// Errors if the residue is not divisible by `p^e` or if no precision
    /// would remain.
    pub fn div_exact_p_pow(&self, e: u32) -> Result<Self, CoreError> {
        if e == 0 {
            return Ok(self.clone());
        }
        if e >= self.k {
            return Err(CoreError::InvalidParams(format!(
                "dividing by p^{e} leaves no precision at k={}",
                self.k
            )));
        }
        let pe = pk_modulus(self.p, e);
        let (q, r) = self.residue.div_rem(&pe);
        if !r.is_zero() {
            return Err(CoreError::NotDivisible(format!(
                "{} is not divisible by {}^{}",
                self.residue, self.p, e
            )));
        }
        Ok(PadicApprox { p: self.p, k: self.k - e, residue: q })
    }
}

/// `p^k` as a big integer.
pub fn pk_modulus(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// The p-adic valuation of an exact integer; `None` for zero.
pub fn int_valuation(p: u64, n: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u64;
    let mut r = n.abs();
    loop {
        let (q, rem) = r.div_rem(&p);
        if !rem.is_zero() {
            return Some(v);
        }
        r = q;
        v += 1;
    }
}

/// Reduces an exact rational with p-integral value modulo `p^k`.
///
/// Errors if the value has negative p-adic valuation.
pub fn rational_mod(p: u64, k: u32, x: &BigRational) -> Result<PadicApprox, CoreError> {
    if x.is_zero() {
        return Ok(PadicApprox::zero(p, k));
    }
    let vnum = int_valuation(p, x.numer()).expect("nonzero numerator");
    let vden = int_valuation(p, x.denom()).expect("nonzero denominator");
    if vnum < vden {
        return Err(CoreError::NegativeValuation(format!(
            "rational has valuation {}",
            vnum as i64 - vden as i64
        )));
    }
    let pb = BigInt::from(p);
    let num = x.numer() / pb.pow(vden as u32);
    let den = x.denom() / pb.pow(vden as u32);
    let den_inv = PadicApprox::new(p, k, &den).inverse()?;
    Ok(PadicApprox::new(p, k, &num).mul(&den_inv))
}

/// The unit root of `X^2 - aX + c` when `a` is a unit and `c` is not.
///
/// Iterates `alpha <- a - c * alpha^{-1}` starting from `alpha = a` until the
/// value is stable modulo `p^k`; the limit satisfies `alpha^2 - a*alpha + c = 0`
/// and `alpha = a (mod p)`.
///
/// # Errors
/// `NonOrdinary` if `a` is not a unit (no unit root exists), and
/// `AmbiguousRoots` if `c` is a unit (both roots are units).
pub fn hensel_unit_root(a: &PadicApprox, c: &PadicApprox) -> Result<PadicApprox, CoreError> {
    assert_eq!(a.p(), c.p(), "mixed primes");
    let k = a.k().min(c.k());
    let a = a.reduce_to(k);
    let c = c.reduce_to(k);
    if !a.is_unit() {
        return Err(CoreError::NonOrdinary(format!(
            "coefficient a has valuation {} > 0",
            a.valuation()
        )));
    }
    if c.valuation() == 0 {
        return Err(CoreError::AmbiguousRoots(
            "constant term is a unit, so both roots are units".into(),
        ));
    }
    let mut alpha = a.clone();
    // One step per precision gained; val(c) >= 1 gives at most k rounds.
    for _ in 0..=k {
        let next = a.sub(&c.mul(&alpha.inverse()?));
        if next == alpha {
            let check = alpha.mul(&alpha).sub(&a.mul(&alpha)).add(&c);
            debug_assert!(check.is_zero(), "unit root must satisfy the quadratic");
            return Ok(alpha);
        }
        alpha = next;
    }
    Err(CoreError::RaisePrecision(
        "unit-root iteration failed to stabilize".into(),
    ))
}

/// A unit split into its root-of-unity and principal parts.
///
/// `teich * principal` reconstructs the original unit; for odd `p` the
/// Teichmuller part satisfies `teich^(p-1) = 1` and the principal part lies
/// in `1 + pZ_p`. For `p = 2` the split is over `{1, -1} x (1 + 4Z_2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitDecomp {
    pub teich: PadicApprox,
    pub principal: PadicApprox,
}

/// Splits a unit into Teichmuller and principal parts.
///
/// For odd `p` the Teichmuller component is the limit of `u^(p^n)`, computed
/// by iterating `x -> x^p` to a fixed point modulo `p^k`. For `p = 2` the
/// component is the sign determined by `u mod 4` (taken to be `1` when
/// `k = 1`, where the sign is invisible).
pub fn teichmuller(u: &PadicApprox) -> Result<UnitDecomp, CoreError> {
    if !u.is_unit() {
        return Err(CoreError::NonUnit(format!(
            "teichmuller needs a unit, got valuation {}",
            u.valuation()
        )));
    }
    let p = u.p();
    let k = u.k();
    let teich = if p == 2 {
        if k == 1 {
            PadicApprox::one(2, 1)
        } else {
            let mod4 = u.residue() % BigUint::from(4u32);
            if mod4 == BigUint::from(1u32) {
                PadicApprox::one(2, k)
            } else {
                PadicApprox::one(2, k).neg()
            }
        }
    } else {
        let mut x = u.clone();
        let mut steps = 0u32;
        loop {
            let y = x.pow(p);
            if y == x {
                break x;
            }
            x = y;
            steps += 1;
            assert!(steps <= k + 4, "p-th power iteration must stabilize");
        }
    };
    let principal = u.mul(&teich.inverse()?);
    debug_assert!(
        teich.pow(if p == 2 { 2 } else { p - 1 }).is_one(),
        "Teichmuller part is a root of unity"
    );
    Ok(UnitDecomp { teich, principal })
}

/// The p-adic logarithm of a principal unit.
///
/// Sums the alternating series `sum_{n>=1} (-1)^(n+1) (u-1)^n / n` over exact
/// rationals on the canonical lift, keeping terms until every dropped term
/// has valuation at least `k`; the result is then reduced modulo `p^k`.
/// The term count is chosen from `n*v - log_p(n) >= k` with
/// `v = val(u - 1)`, so the division by `n` is accounted for exactly.
pub fn plog(u: &PadicApprox) -> Result<PadicApprox, CoreError> {
    let p = u.p();
    let k = u.k();
    let one = PadicApprox::one(p, k);
    let x = u.sub(&one);
    if x.is_zero() {
        return Ok(PadicApprox::zero(p, k));
    }
    let v = x.valuation();
    if p == 2 {
        if k < 2 {
            return Err(CoreError::InvalidParams(
                "p=2 logarithm needs k >= 2 to certify 1 + 4Z_2".into(),
            ));
        }
        if v < 2 {
            return Err(CoreError::NotPrincipalUnit(format!(
                "{} is not 1 mod 4",
                u.residue()
            )));
        }
    } else if v < 1 {
        return Err(CoreError::NotPrincipalUnit(format!(
            "{} is not 1 mod {}",
            u.residue(),
            p
        )));
    }

    // Dropped terms have valuation n*v - v_p(n) >= n*v - log_p(n), which is
    // increasing in n; stop once it clears k.
    let mut cut = 1u64;
    loop {
        let next = cut + 1;
        let phi = next as i64 * v as i64 - ilog_p(p, next) as i64;
        if phi >= k as i64 {
            break;
        }
        cut = next;
        assert!(cut <= 8 * k as u64 + 16, "series cutoff must be reached");
    }

    let xi = BigInt::from(x.residue().clone());
    let mut sum = BigRational::zero();
    let mut pow = BigInt::one();
    for n in 1..=cut {
        pow *= &xi;
        let term = BigRational::new(pow.clone(), BigInt::from(n));
        if n % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    rational_mod(p, k, &sum)
}

fn ilog_p(p: u64, n: u64) -> u32 {
    let mut v = 0u32;
    let mut m = p;
    while m <= n {
        v += 1;
        match m.checked_mul(p) {
            Some(next) => m = next,
            None => break,
        }
    }
    v
}
