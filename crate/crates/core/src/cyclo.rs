//! Arithmetic in `Z[zeta]/p^k` for a p-power root of unity `zeta`.
//!
//! Elements are polynomials in `zeta` of degree below `phi(p^m)`, reduced
//! modulo the `p^m`-th cyclotomic polynomial
//! `1 + x^{p^{m-1}} + ... + x^{(p-1)p^{m-1}}`. Only p-power levels exist
//! here; prime-to-p roots of unity never enter any computation.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::padic::PadicApprox;

/// An element of `Z[zeta_{p^m}]` modulo `p^k`, as a coefficient vector of
/// length `(p-1)p^{m-1}` in the basis `1, zeta, ..., zeta^{e-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloElem {
    p: u64,
    m: u32,
    k: u32,
    coeffs: Vec<PadicApprox>,
}

/// `phi(p^m) = (p-1) p^{m-1}`, the rank of the level-`m` ring.
pub fn phi_pm(p: u64, m: u32) -> usize {
    ((p - 1) * p.pow(m - 1)) as usize
}

/// Reduces an arbitrary-degree integer polynomial modulo the `p^m`-th
/// cyclotomic polynomial, returning exactly `phi(p^m)` coefficients.
///
/// Uses `x^e = -(1 + x^s + ... + x^{(p-2)s})` with `s = p^{m-1}` and
/// `e = (p-1)s`, walking degrees downward; every rewrite lands strictly
/// below the degree being cleared.
fn reduce_poly(p: u64, m: u32, mut poly: Vec<BigInt>) -> Vec<BigInt> {
    let e = phi_pm(p, m);
    let s = p.pow(m - 1) as usize;
    let mut d = poly.len();
    while d > e {
        d -= 1;
        let c = std::mem::replace(&mut poly[d], BigInt::zero());
        if c.is_zero() {
            continue;
        }
        for i in 0..(p - 1) as usize {
            poly[d - e + i * s] -= &c;
        }
    }
    poly.resize(e, BigInt::zero());
    poly
}

impl CycloElem {
    /// Builds an element from a polynomial in `zeta` of any degree.
    ///
    /// # Panics
    /// Panics if `m == 0`; level-0 values are plain `PadicApprox`.
    pub fn new(p: u64, k: u32, m: u32, poly: &[BigInt]) -> Self {
        assert!(m >= 1, "cyclotomic level must be positive");
        let reduced = reduce_poly(p, m, poly.to_vec());
        CycloElem {
            p,
            m,
            k,
            coeffs: reduced
                .iter()
                .map(|c| PadicApprox::new(p, k, c))
                .collect(),
        }
    }

    pub fn zero(p: u64, k: u32, m: u32) -> Self {
        Self::new(p, k, m, &[])
    }

    pub fn one(p: u64, k: u32, m: u32) -> Self {
        Self::new(p, k, m, &[BigInt::one()])
    }

    /// Embeds a plain scalar as the constant polynomial.
    pub fn from_plain(x: &PadicApprox, m: u32) -> Self {
        Self::new(x.p(), x.k(), m, &[BigInt::from(x.residue().clone())])
    }

    /// `zeta^j`, with `j` taken modulo `p^m`.
    pub fn zeta_pow(p: u64, k: u32, m: u32, j: i64) -> Self {
        let order = p.pow(m) as i64;
        let j = j.rem_euclid(order) as usize;
        let mut poly = vec![BigInt::zero(); j + 1];
        poly[j] = BigInt::one();
        Self::new(p, k, m, &poly)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The cyclotomic level `m`.
    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[PadicApprox] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Constant-coefficient view; `Some` exactly when all higher
    /// coefficients vanish.
    pub fn as_plain(&self) -> Option<PadicApprox> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Minimum coefficient valuation; the zero element returns `k`.
    pub fn gauss_valuation(&self) -> u32 {
        self.coeffs.iter().map(|c| c.valuation()).min().unwrap_or(self.k)
    }

    /// Units of the local ring are detected by the augmentation: the
    /// coefficient sum must be prime to p.
    pub fn is_unit(&self) -> bool {
        let mut sum = PadicApprox::zero(self.p, self.k);
        for c in &self.coeffs {
            sum = sum.add(c);
        }
        sum.is_unit()
    }

    pub fn reduce_to(&self, k2: u32) -> Self {
        if k2 == self.k {
            return self.clone();
        }
        CycloElem {
            p: self.p,
            m: self.m,
            k: k2,
            coeffs: self.coeffs.iter().map(|c| c.reduce_to(k2)).collect(),
        }
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.p, other.p, "mixed primes");
        assert_eq!(self.m, other.m, "mixed cyclotomic levels");
        let k = self.k.min(other.k);
        (self.reduce_to(k), other.reduce_to(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.align(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.add(y);
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (mut a, b) = self.align(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.sub(y);
        }
        a
    }

    pub fn neg(&self) -> Self {
        Self::zero(self.p, self.k, self.m).sub(self)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let e = a.coeffs.len();
        let mut prod = vec![BigInt::zero(); 2 * e - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let xi = BigInt::from(x.residue().clone());
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                prod[i + j] += &xi * BigInt::from(y.residue().clone());
            }
        }
        Self::new(a.p, a.k, a.m, &prod)
    }

    pub fn scalar_mul(&self, c: &PadicApprox) -> Self {
        assert_eq!(self.p, c.p(), "mixed primes");
        let k = self.k.min(c.k());
        let mut out = self.reduce_to(k);
        let c = c.reduce_to(k);
        for x in out.coeffs.iter_mut() {
            *x = x.mul(&c);
        }
        out
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.p, self.k, self.m);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn eq_mod(&self, other: &Self, k2: u32) -> bool {
        let (a, b) = self.align(other);
        a.reduce_to(k2.min(a.k)) == b.reduce_to(k2.min(b.k))
    }

    /// Multiplication by `zeta^j` as an index rotation; O(e*p) instead of a
    /// full product.
    pub fn mul_by_zeta_pow(&self, j: i64) -> Self {
        let order = self.p.pow(self.m) as i64;
        let t = j.rem_euclid(order) as usize;
        if t == 0 {
            return self.clone();
        }
        let e = self.coeffs.len();
        let mut poly = vec![BigInt::zero(); e + t];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[i + t] = BigInt::from(c.residue().clone());
            }
        }
        Self::new(self.p, self.k, self.m, &poly)
    }

    /// Re-expresses this element in the level-`m2` ring via
    /// `zeta_{p^m} = zeta_{p^{m2}}^{p^{m2-m}}`.
    pub fn raise_level(&self, m2: u32) -> Self {
        assert!(m2 >= self.m, "levels only increase here");
        if m2 == self.m {
            return self.clone();
        }
        let stride = self.p.pow(m2 - self.m) as usize;
        let mut poly = vec![BigInt::zero(); (self.coeffs.len() - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * stride] = BigInt::from(c.residue().clone());
        }
        Self::new(self.p, self.k, m2, &poly)
    }

    /// Rewrites the element one level down when it lies in the subring
    /// generated by `zeta^p`; `None` otherwise. Level-1 elements lower to
    /// plain constants only, reported through [`CycloElem::as_plain`].
    pub fn try_lower_level(&self) -> Option<Self> {
        if self.m <= 1 {
            return None;
        }
        let stride = self.p as usize;
        if self
            .coeffs
            .iter()
            .enumerate()
            .any(|(i, c)| i % stride != 0 && !c.is_zero())
        {
            return None;
        }
        let poly: Vec<BigInt> = self
            .coeffs
            .iter()
            .step_by(stride)
            .map(|c| BigInt::from(c.residue().clone()))
            .collect();
        let lowered = Self::new(self.p, self.k, self.m - 1, &poly);
        debug_assert_eq!(lowered.raise_level(self.m), *self);
        Some(lowered)
    }

    /// Exact division of every coefficient by `p^e`, dropping precision to
    /// `k - e`.
    pub fn div_exact_p_pow(&self, e: u32) -> Result<Self, CoreError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.div_exact_p_pow(e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycloElem { p: self.p, m: self.m, k: self.k - e, coeffs })
    }

    /// Multiplicative inverse, when one exists.
    ///
    /// Solves `self * x = 1` by Gaussian elimination on the multiplication
    /// matrix, always pivoting on unit entries; failure to find a unit pivot
    /// certifies the element is not invertible (the ring is local).
    pub fn inverse(&self) -> Result<Self, CoreError> {
        let e = self.coeffs.len();
        // Column j holds the coefficients of self * zeta^j.
        let mut mat = vec![vec![PadicApprox::zero(self.p, self.k); e + 1]; e];
        for j in 0..e {
            let col = self.mul(&Self::zeta_pow(self.p, self.k, self.m, j as i64));
            for (row, c) in mat.iter_mut().zip(&col.coeffs) {
                row[j] = c.clone();
            }
        }
        mat[0][e] = PadicApprox::one(self.p, self.k);

        for col in 0..e {
            let pivot = (col..e).find(|&r| mat[r][col].is_unit()).ok_or_else(|| {
                CoreError::NonUnit("cyclotomic element is not invertible".into())
            })?;
            mat.swap(col, pivot);
            let inv = mat[col][col].inverse()?;
            for x in mat[col].iter_mut() {
                *x = x.mul(&inv);
            }
            let pivot_row = mat[col].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (x, pv) in row.iter_mut().zip(&pivot_row) {
                    *x = x.sub(&f.mul(pv));
                }
            }
        }
        let coeffs = (0..e).map(|i| mat[i][e].clone()).collect();
        let out = CycloElem { p: self.p, m: self.m, k: self.k, coeffs };
        debug_assert!(self.mul(&out).as_plain().is_some_and(|c| c.is_one()));
        Ok(out)
    }
}

/// `(1/p^m) * sum_j zeta^{-a j} values[j]`, at precision `k - m`.
///
/// The list must be indexed by `j in [0, p^m)` with every entry sharing
/// `(p, m, k)` and `k > m`. Non-divisibility by `p^m` signals an upstream
/// inconsistency (for example a mismatched character level) and is an error
/// carrying the first offending coefficient index.
pub fn cyclo_average(values: &[CycloElem], a: i64) -> Result<CycloElem, CoreError> {
    let first = values.first().ok_or_else(|| {
        CoreError::InvalidParams("cyclo_average needs a non-empty list".into())
    })?;
    let (p, m, k) = (first.p, first.m, first.k);
    let order = p.pow(m);
    if values.len() != order as usize {
        return Err(CoreError::InvalidParams(format!(
            "expected {} values at level {}, got {}",
            order,
            m,
            values.len()
        )));
    }
    if k <= m {
        return Err(CoreError::InvalidParams(format!(
            "averaging needs k > m, got k={k}, m={m}"
        )));
    }
    let mut sum = CycloElem::zero(p, k, m);
    for (j, v) in values.iter().enumerate() {
        assert!(v.p == p && v.m == m && v.k == k, "values must share (p, m, k)");
        sum = sum.add(&v.mul_by_zeta_pow(-a * j as i64));
    }
    match sum.div_exact_p_pow(m) {
        Ok(avg) => Ok(avg),
        Err(_) => {
            let pm = BigUint::from(p).pow(m);
            let bad = sum
                .coeffs
                .iter()
                .position(|c| !(c.residue() % &pm).is_zero())
                .unwrap_or(0);
            Err(CoreError::NotDivisible(format!(
                "average not divisible by {p}^{m} at coefficient {bad}"
            )))
        }
    }
}

/// Symmetric integer lifts of all coefficients, for dumps.
pub fn symmetric_lifts(x: &CycloElem) -> Vec<BigInt> {
    x.coeffs.iter().map(|c| c.symmetric_lift()).collect()
}

/// Fails loudly if `x` is not exactly a plain scalar.
pub fn expect_plain(x: &CycloElem) -> Result<PadicApprox, CoreError> {
    x.as_plain().ok_or_else(|| {
        CoreError::InvalidParams("expected a constant-coefficient cyclotomic value".into())
    })
}
