//! Scalars that are either plain elements of `Z/p^k` or cyclotomic ones,
//! plus an exact split form `unit * p^v` for values whose p-power part must
//! survive division.
//!
//! Mixed plain/cyclotomic arithmetic promotes the plain operand into the
//! cyclotomic ring; two cyclotomic operands must share a level.

use num_bigint::BigInt;

use crate::cyclo::CycloElem;
use crate::error::CoreError;
use crate::padic::PadicApprox;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Plain(PadicApprox),
    Cyclo(CycloElem),
}

impl Scalar {
    pub fn zero(p: u64, k: u32) -> Self {
        Scalar::Plain(PadicApprox::zero(p, k))
    }

    pub fn one(p: u64, k: u32) -> Self {
        Scalar::Plain(PadicApprox::one(p, k))
    }

    pub fn from_int(p: u64, k: u32, n: &BigInt) -> Self {
        Scalar::Plain(PadicApprox::new(p, k, n))
    }

    pub fn from_i64(p: u64, k: u32, n: i64) -> Self {
        Scalar::Plain(PadicApprox::from_i64(p, k, n))
    }

    /// `zeta_{p^m}^j` as a level-`m` scalar.
    pub fn zeta(p: u64, k: u32, m: u32, j: i64) -> Self {
        Scalar::Cyclo(CycloElem::zeta_pow(p, k, m, j))
    }

    pub fn p(&self) -> u64 {
        match self {
            Scalar::Plain(x) => x.p(),
            Scalar::Cyclo(x) => x.p(),
        }
    }

    pub fn k(&self) -> u32 {
        match self {
            Scalar::Plain(x) => x.k(),
            Scalar::Cyclo(x) => x.k(),
        }
    }

    /// Cyclotomic level; plain scalars report 0.
    pub fn level(&self) -> u32 {
        match self {
            Scalar::Plain(_) => 0,
            Scalar::Cyclo(x) => x.level(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Plain(x) => x.is_zero(),
            Scalar::Cyclo(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Plain(x) => x.is_one(),
            Scalar::Cyclo(x) => x.as_plain().is_some_and(|c| c.is_one()),
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            Scalar::Plain(x) => x.is_unit(),
            Scalar::Cyclo(x) => x.is_unit(),
        }
    }

    /// Minimum valuation of the coefficients (the plain case has one
    /// coefficient).
    pub fn valuation(&self) -> u32 {
        match self {
            Scalar::Plain(x) => x.valuation(),
            Scalar::Cyclo(x) => x.gauss_valuation(),
        }
    }

    /// The plain view, when no root of unity actually occurs.
    pub fn as_plain(&self) -> Option<PadicApprox> {
        match self {
            Scalar::Plain(x) => Some(x.clone()),
            Scalar::Cyclo(x) => x.as_plain(),
        }
    }

    /// Re-embeds into the level-`m` cyclotomic ring.
    ///
    /// # Panics
    /// Panics when the value lives at a level above `m`.
    pub fn promote_to_level(&self, m: u32) -> CycloElem {
        match self {
            Scalar::Plain(x) => CycloElem::from_plain(x, m),
            Scalar::Cyclo(x) => x.raise_level(m),
        }
    }

    /// Canonical representation at the smallest level containing the value.
    pub fn canonicalize_level(&self) -> Self {
        let mut cur = self.clone();
        while let Scalar::Cyclo(x) = &cur {
            if let Some(lower) = x.try_lower_level() {
                cur = Scalar::Cyclo(lower);
            } else if let Some(plain) = x.as_plain() {
                cur = Scalar::Plain(plain);
            } else {
                break;
            }
        }
        cur
    }

    /// Coefficient residues, for deterministic ordering and serialization.
    pub fn residue_key(&self) -> Vec<num_bigint::BigUint> {
        match self {
            Scalar::Plain(x) => vec![x.residue().clone()],
            Scalar::Cyclo(x) => x.coeffs().iter().map(|c| c.residue().clone()).collect(),
        }
    }

    pub fn reduce_to(&self, k2: u32) -> Self {
        match self {
            Scalar::Plain(x) => Scalar::Plain(x.reduce_to(k2)),
            Scalar::Cyclo(x) => Scalar::Cyclo(x.reduce_to(k2)),
        }
    }

    fn binop(
        &self,
        other: &Self,
        fp: impl Fn(&PadicApprox, &PadicApprox) -> PadicApprox,
        fc: impl Fn(&CycloElem, &CycloElem) -> CycloElem,
    ) -> Self {
        match (self, other) {
            (Scalar::Plain(a), Scalar::Plain(b)) => Scalar::Plain(fp(a, b)),
            (a, b) => {
                let m = a.level().max(b.level());
                Scalar::Cyclo(fc(&a.promote_to_level(m), &b.promote_to_level(m)))
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binop(other, PadicApprox::add, CycloElem::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binop(other, PadicApprox::sub, CycloElem::sub)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.binop(other, PadicApprox::mul, CycloElem::mul)
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Plain(x) => Scalar::Plain(x.neg()),
            Scalar::Cyclo(x) => Scalar::Cyclo(x.neg()),
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        self.mul(&Scalar::from_int(self.p(), self.k(), n))
    }

    pub fn inverse(&self) -> Result<Self, CoreError> {
        match self {
            Scalar::Plain(x) => Ok(Scalar::Plain(x.inverse()?)),
            Scalar::Cyclo(x) => Ok(Scalar::Cyclo(x.inverse()?)),
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        match self {
            Scalar::Plain(x) => Scalar::Plain(x.pow(e)),
            Scalar::Cyclo(x) => Scalar::Cyclo(x.pow(e)),
        }
    }

    pub fn pow_i64(&self, e: i64) -> Result<Self, CoreError> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    pub fn eq_mod(&self, other: &Self, k2: u32) -> bool {
        self.reduce_to(k2.min(self.k()))
            .sub(&other.reduce_to(k2.min(other.k())))
            .is_zero()
    }
}

/// An exactly factored value `unit * p^v` with `unit` invertible mod `p^k`.
///
/// The split survives arithmetic that would otherwise destroy the unit part:
/// dividing `p^5 * u` by `p^5` recovers `u` at full precision, whereas the
/// reduced residue alone would be 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PValue {
    v: i64,
    unit: Scalar,
}

impl PValue {
    /// # Panics
    /// Panics if `unit` is not invertible.
    pub fn new(v: i64, unit: Scalar) -> Self {
        assert!(unit.is_unit(), "PValue unit part must be invertible");
        PValue { v, unit }
    }

    /// A unit scalar, exponent 0.
    pub fn from_unit_scalar(unit: Scalar) -> Self {
        Self::new(0, unit)
    }

    pub fn one(p: u64, k: u32) -> Self {
        Self::new(0, Scalar::one(p, k))
    }

    pub fn v(&self) -> i64 {
        self.v
    }

    pub fn unit(&self) -> &Scalar {
        &self.unit
    }

    pub fn p(&self) -> u64 {
        self.unit.p()
    }

    pub fn k(&self) -> u32 {
        self.unit.k()
    }

    pub fn mul(&self, other: &Self) -> Self {
        PValue {
            v: self.v + other.v,
            unit: self.unit.mul(&other.unit),
        }
    }

    pub fn inverse(&self) -> Result<Self, CoreError> {
        Ok(PValue { v: -self.v, unit: self.unit.inverse()? })
    }

    pub fn pow_i64(&self, e: i64) -> Result<Self, CoreError> {
        Ok(PValue {
            v: self.v * e,
            unit: self.unit.pow_i64(e)?,
        })
    }

    pub fn mul_scalar_unit(&self, s: &Scalar) -> Self {
        Self::new(self.v, self.unit.mul(s))
    }

    /// Collapses to an ordinary scalar; only possible for `v >= 0`.
    pub fn eval_scalar(&self) -> Result<Scalar, CoreError> {
        if self.v < 0 {
            return Err(CoreError::NegativeValuation(
                "insufficient precision for negative valuation".into(),
            ));
        }
        let p = self.p();
        let k = self.k();
        let pv = PadicApprox::from_u64(p, k, p).pow(self.v as u64);
        Ok(self.unit.mul(&Scalar::Plain(pv)))
    }

    pub fn eq_mod(&self, other: &Self, k2: u32) -> bool {
        self.v == other.v && self.unit.eq_mod(&other.unit, k2)
    }
}
