//! Locally constant functions on `Z_p` and `Z_p^x` at finite precision,
//! with Mahler (binomial-basis) transforms.
//!
//! A function of level `m` is constant on cosets of `p^m Z_p` and is stored
//! as its value table. Mahler coefficients are computed with the exact
//! finite-difference formula; binomials are built by Pascal recursion
//! modulo `p^k`, which agrees with exact integer binomials reduced mod
//! `p^k` because the recursion is addition-only.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::padic::PadicApprox;
use crate::scalar::Scalar;

/// Where a function lives: all of `Z_p`, or only the units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Zp,
    ZpUnits,
}

/// A level-`m` locally constant function given by its value table.
///
/// For domain `Zp` the table has `p^m` entries indexed by residues; for
/// `ZpUnits` it has `phi(p^m)` entries indexed by unit residues in
/// increasing order (one entry at level 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocConstFn {
    p: u64,
    k: u32,
    m: u32,
    domain: Domain,
    table: Vec<Scalar>,
}

/// Residues mod `p^m` in increasing order, restricted by domain.
pub fn domain_residues(p: u64, m: u32, domain: Domain) -> Vec<u64> {
    let pm = p.pow(m);
    match domain {
        Domain::Zp => (0..pm).collect(),
        Domain::ZpUnits => {
            if m == 0 {
                vec![0]
            } else {
                (0..pm).filter(|r| r % p != 0).collect()
            }
        }
    }
}

fn table_len(p: u64, m: u32, domain: Domain) -> usize {
    domain_residues(p, m, domain).len()
}

/// Index of a residue in the domain enumeration; `None` when it is outside
/// the domain (a non-unit for `ZpUnits`).
fn residue_index(p: u64, m: u32, domain: Domain, r: u64) -> Option<usize> {
    match domain {
        Domain::Zp => Some(r as usize),
        Domain::ZpUnits => {
            if m == 0 {
                return Some(0);
            }
            if r.is_multiple_of(p) {
                return None;
            }
            // Non-multiples of p strictly below r.
            Some((r - 1 - (r - 1) / p) as usize)
        }
    }
}

impl LocConstFn {
    pub fn new(p: u64, k: u32, m: u32, domain: Domain, table: Vec<Scalar>) -> Self {
        assert_eq!(
            table.len(),
            table_len(p, m, domain),
            "table length must match the domain cardinality"
        );
        for s in &table {
            assert_eq!(s.p(), p, "scalar prime mismatch");
        }
        LocConstFn { p, k, m, domain, table }
    }

    /// The constant function on `Z_p`.
    pub fn constant(p: u64, k: u32, c: Scalar) -> Self {
        Self::new(p, k, 0, Domain::Zp, vec![c])
    }

    /// `1_{a + p^m Z_p}` on `Z_p`.
    pub fn indicator(p: u64, k: u32, a: u64, m: u32) -> Self {
        let pm = p.pow(m);
        let table = (0..pm)
            .map(|r| {
                if r == a % pm {
                    Scalar::one(p, k)
                } else {
                    Scalar::zero(p, k)
                }
            })
            .collect();
        Self::new(p, k, m, Domain::Zp, table)
    }

    pub fn zero_fn(p: u64, k: u32, domain: Domain) -> Self {
        let table = vec![Scalar::zero(p, k); table_len(p, 0, domain)];
        Self::new(p, k, 0, domain, table)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn table(&self) -> &[Scalar] {
        &self.table
    }

    /// (residue, value) pairs in table order.
    pub fn entries(&self) -> Vec<(u64, Scalar)> {
        domain_residues(self.p, self.m, self.domain)
            .into_iter()
            .zip(self.table.iter().cloned())
            .collect()
    }

    pub fn eval_u64(&self, x: u64) -> Scalar {
        self.eval(&BigInt::from(x))
    }

    /// Evaluates at any integer representative; depends only on
    /// `x mod p^m`.
    ///
    /// # Panics
    /// Panics when a `ZpUnits` function is evaluated at a non-unit.
    pub fn eval(&self, x: &BigInt) -> Scalar {
        let pm = BigInt::from(self.p.pow(self.m));
        let r = x.mod_floor(&pm);
        let r: u64 = (&r).try_into().expect("residue fits in u64");
        let idx = residue_index(self.p, self.m, self.domain, r)
            .expect("unit-domain function evaluated at a non-unit");
        self.table[idx].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|s| s.is_zero())
    }

    /// Minimum valuation over the table; the zero function returns `k`.
    pub fn min_valuation(&self) -> u32 {
        self.table
            .iter()
            .map(|s| s.valuation())
            .min()
            .unwrap_or(self.k)
    }

    /// Same function re-tabulated at a finer level `m2 >= m`.
    pub fn raise_level(&self, m2: u32) -> Self {
        assert!(m2 >= self.m, "levels only increase");
        if m2 == self.m {
            return self.clone();
        }
        let table = domain_residues(self.p, m2, self.domain)
            .into_iter()
            .map(|r| self.eval_u64(r))
            .collect();
        Self::new(self.p, self.k, m2, self.domain, table)
    }

    /// Smallest-level representation of the same function.
    pub fn canonicalize_level(&self) -> Self {
        let mut cur = self.clone();
        'outer: while cur.m > 0 {
            let lower = domain_residues(cur.p, cur.m - 1, cur.domain);
            let mut table = Vec::with_capacity(lower.len());
            let pm1 = cur.p.pow(cur.m - 1);
            for r in lower {
                let mut rep: Option<Scalar> = None;
                for t in 0..cur.p {
                    let lift = r + t * pm1;
                    if residue_index(cur.p, cur.m, cur.domain, lift).is_none() {
                        continue;
                    }
                    let v = cur.eval_u64(lift);
                    match &rep {
                        None => rep = Some(v),
                        Some(w) if *w == v => {}
                        Some(_) => break 'outer,
                    }
                }
                table.push(rep.expect("every coset meets the domain"));
            }
            cur = Self::new(cur.p, cur.k, cur.m - 1, cur.domain, table);
        }
        cur
    }

    /// Restriction of a `Zp` function to the units.
    pub fn restrict_to_units(&self) -> Self {
        assert_eq!(self.domain, Domain::Zp);
        let table = domain_residues(self.p, self.m, Domain::ZpUnits)
            .into_iter()
            .map(|r| self.eval_u64(r))
            .collect();
        Self::new(self.p, self.k, self.m, Domain::ZpUnits, table)
    }

    /// Extension of a `ZpUnits` function by zero to all of `Z_p`.
    pub fn extend_by_zero(&self) -> Self {
        assert_eq!(self.domain, Domain::ZpUnits);
        let m = self.m.max(1);
        let lifted = self.raise_level(m);
        let table = (0..self.p.pow(m))
            .map(|r| {
                if r % self.p == 0 {
                    Scalar::zero(self.p, self.k)
                } else {
                    lifted.eval_u64(r)
                }
            })
            .collect();
        Self::new(self.p, self.k, m, Domain::Zp, table)
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.p, other.p, "mixed primes");
        assert_eq!(self.domain, other.domain, "mixed domains");
        let m = self.m.max(other.m);
        (self.raise_level(m), other.raise_level(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.align(other);
        for (x, y) in a.table.iter_mut().zip(&b.table) {
            *x = x.add(y);
        }
        a.k = a.k.min(b.k);
        a
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        let (mut a, b) = self.align(other);
        for (x, y) in a.table.iter_mut().zip(&b.table) {
            *x = x.mul(y);
        }
        a.k = a.k.min(b.k);
        a
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        let mut out = self.clone();
        for x in out.table.iter_mut() {
            *x = x.mul(c);
        }
        out.k = out.k.min(c.k());
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for x in out.table.iter_mut() {
            *x = x.neg();
        }
        out
    }

    /// Function equality (representation-independent).
    pub fn func_eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.domain != other.domain {
            return false;
        }
        let (a, b) = self.align(other);
        a.table == b.table
    }
}

/// Pascal's triangle modulo `p^k`: `row(n)[j] = C(n, j)`.
///
/// Rows are built by the addition recurrence, so every entry equals the
/// exact integer binomial reduced mod `p^k`.
pub struct BinomTriangle {
    rows: Vec<Vec<PadicApprox>>,
}

impl BinomTriangle {
    pub fn new(p: u64, k: u32, n_max: usize) -> Self {
        let one = PadicApprox::one(p, k);
        let mut rows: Vec<Vec<PadicApprox>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![one.clone()]);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(one.clone());
            for j in 1..n {
                row.push(prev[j - 1].add(&prev[j]));
            }
            row.push(one.clone());
            rows.push(row);
        }
        BinomTriangle { rows }
    }

    /// `C(n, j) mod p^k`; zero outside `0 <= j <= n`.
    pub fn get(&self, n: usize, j: usize) -> PadicApprox {
        let p = self.rows[0][0].p();
        let k = self.rows[0][0].k();
        if j > n {
            return PadicApprox::zero(p, k);
        }
        self.rows[n][j].clone()
    }
}

/// First `count` Mahler coefficients of a function on `Z_p`:
/// `c_n = sum_j (-1)^(n-j) C(n,j) f(j)`.
pub fn mahler_coeffs(f: &LocConstFn, count: usize) -> Vec<Scalar> {
    assert_eq!(f.domain(), Domain::Zp, "Mahler transform needs a Z_p function");
    let (p, k) = (f.p(), f.k());
    if count == 0 {
        return Vec::new();
    }
    let tri = BinomTriangle::new(p, k, count - 1);
    let values: Vec<Scalar> = (0..count as u64).map(|j| f.eval_u64(j)).collect();
    (0..count)
        .map(|n| {
            let mut c = Scalar::zero(p, k);
            for (j, fj) in values.iter().enumerate().take(n + 1) {
                let term = fj.mul(&Scalar::Plain(tri.get(n, j)));
                c = if (n - j) % 2 == 0 { c.add(&term) } else { c.sub(&term) };
            }
            c
        })
        .collect()
}

/// `sum_n coeffs[n] * C(x, n)` for a non-negative lift `x`.
pub fn mahler_eval(p: u64, k: u32, coeffs: &[Scalar], x: u64) -> Scalar {
    let n_max = (x as usize).min(coeffs.len().saturating_sub(1));
    let tri = BinomTriangle::new(p, k, x as usize);
    let mut acc = Scalar::zero(p, k);
    for (n, c) in coeffs.iter().enumerate().take(n_max + 1) {
        acc = acc.add(&c.mul(&Scalar::Plain(tri.get(x as usize, n))));
    }
    acc
}

/// Evaluates a Mahler series at every residue mod `p^m`, sharing one
/// binomial triangle, and returns the resulting level-`m` function.
pub fn mahler_interpolate(p: u64, k: u32, m: u32, coeffs: &[Scalar]) -> LocConstFn {
    let pm = p.pow(m);
    let tri = BinomTriangle::new(p, k, (pm as usize).max(coeffs.len()) - 1);
    let table = (0..pm)
        .map(|x| {
            let mut acc = Scalar::zero(p, k);
            for (n, c) in coeffs.iter().enumerate() {
                if n > x as usize {
                    break;
                }
                acc = acc.add(&c.mul(&Scalar::Plain(tri.get(x as usize, n))));
            }
            acc
        })
        .collect();
    LocConstFn::new(p, k, m, Domain::Zp, table)
}
