//! Newform coefficient records: exact integer Hecke data with level,
//! weight, and nebentypus, plus the two built-in datasets (the
//! discriminant form and a weight-2 CM form) used throughout the test
//! suites.
//!
//! Records are plain data; reduction mod `p^k` happens only when a record
//! is materialized as a [`QExpansion`].

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::qexp::{is_prime, tau_coeffs, QExpansion};
use crate::scalar::Scalar;

/// An eigenform (or candidate) given by exact coefficients `a_1..a_N`.
#[derive(Clone, Debug)]
pub struct NewformData {
    level: u64,
    weight: u32,
    /// Nebentypus modulus; 1 means the trivial character.
    neb_modulus: u64,
    /// Value at each unit residue mod `neb_modulus`, ascending by residue.
    neb_values: Vec<(u64, BigInt)>,
    coeffs: Vec<BigInt>,
    eigenform: bool,
    cm: bool,
}

impl NewformData {
    pub fn new(
        level: u64,
        weight: u32,
        neb_modulus: u64,
        neb_values: Vec<(u64, BigInt)>,
        coeffs: Vec<BigInt>,
        eigenform: bool,
        cm: bool,
    ) -> Result<Self, CoreError> {
        if level == 0 || weight < 2 || neb_modulus == 0 || coeffs.is_empty() {
            return Err(CoreError::InvalidParams(
                "newform needs level >= 1, weight >= 2, and coefficients".into(),
            ));
        }
        let units: Vec<u64> =
            (1..=neb_modulus).filter(|u| gcd(*u, neb_modulus) == 1).collect();
        let given: Vec<u64> = neb_values.iter().map(|(u, _)| *u).collect();
        if given != units {
            return Err(CoreError::InvalidParams(format!(
                "nebentypus table must list each unit residue mod {neb_modulus} once, ascending"
            )));
        }
        if eigenform && !coeffs[0].is_one() {
            return Err(CoreError::InvalidParams(
                "eigenform flag requires a_1 = 1".into(),
            ));
        }
        Ok(NewformData {
            level,
            weight,
            neb_modulus,
            neb_values,
            coeffs,
            eigenform,
            cm,
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn neb_modulus(&self) -> u64 {
        self.neb_modulus
    }

    pub fn neb_values(&self) -> &[(u64, BigInt)] {
        &self.neb_values
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_eigenform(&self) -> bool {
        self.eigenform
    }

    pub fn is_cm(&self) -> bool {
        self.cm
    }

    /// `a_n` (1-based).
    pub fn a(&self, n: usize) -> &BigInt {
        assert!(n >= 1 && n <= self.coeffs.len(), "index {n} outside data");
        &self.coeffs[n - 1]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Nebentypus value at `l`; zero when `l` shares a factor with the
    /// modulus (in particular at primes dividing the level part recorded
    /// in the modulus).
    pub fn chi(&self, l: u64) -> BigInt {
        let r = l % self.neb_modulus;
        if gcd(r.max(1), self.neb_modulus) != 1 || r == 0 && self.neb_modulus > 1 {
            return BigInt::zero();
        }
        // Modulus 1: every value is 1.
        if self.neb_modulus == 1 {
            return BigInt::one();
        }
        self.neb_values
            .iter()
            .find(|(u, _)| *u == r)
            .map(|(_, v)| v.clone())
            .expect("unit residue present by construction")
    }

    /// Reduction mod `p^k`, truncated at `n` coefficients.
    pub fn expansion(&self, p: u64, k: u32, n: usize) -> QExpansion {
        assert!(n <= self.coeffs.len(), "requested window exceeds stored data");
        QExpansion::from_ints(p, k, &self.coeffs[..n])
    }

    /// Nebentypus value at `l` as a scalar mod `p^k` (for Hecke `T_l`).
    pub fn chi_scalar(&self, p: u64, k: u32, l: u64) -> Scalar {
        Scalar::from_int(p, k, &self.chi(l))
    }

    /// Coprime-multiplicativity spot check: one warning per failing pair
    /// `(m, n)`, capped so ingestion stays fast on long tables.
    pub fn multiplicativity_warnings(&self, max_pairs: usize) -> Vec<String> {
        let n_max = self.coeffs.len();
        let mut warnings = Vec::new();
        let mut checked = 0usize;
        'outer: for m in 2..n_max {
            for n in (m + 1)..=n_max / m {
                if gcd(m as u64, n as u64) != 1 {
                    continue;
                }
                checked += 1;
                if self.a(m) * self.a(n) != *self.a(m * n) {
                    warnings.push(format!(
                        "multiplicativity fails at coprime pair ({m}, {n})"
                    ));
                }
                if checked >= max_pairs || warnings.len() >= 8 {
                    break 'outer;
                }
            }
        }
        warnings
    }

    /// The discriminant form: level 1, weight 12, trivial character.
    pub fn delta(n: usize) -> Self {
        NewformData::new(
            1,
            12,
            1,
            vec![(1, BigInt::one())],
            tau_coeffs(n),
            true,
            false,
        )
        .expect("built-in data is well-formed")
    }

    /// The weight-2 CM form attached to `y^2 = x^3 - x` (conductor 32,
    /// trivial character, CM by the Gaussian order).
    pub fn cm32(n: usize) -> Self {
        NewformData::new(
            32,
            2,
            1,
            vec![(1, BigInt::one())],
            cm32_coeffs(n),
            true,
            true,
        )
        .expect("built-in data is well-formed")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (b % p) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// Legendre symbol via Euler's criterion.
fn legendre(t: u64, p: u64) -> i64 {
    if t.is_multiple_of(p) {
        return 0;
    }
    if pow_mod(t, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Trace of Frobenius at `p` for `y^2 = x^3 - x` by direct point count;
/// zero at the bad prime 2.
fn cm32_ap(p: u64) -> i64 {
    if p == 2 {
        return 0;
    }
    let mut affine = 0i64;
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % p as u128) as u64;
    for x in 0..p {
        let t = (mul(mul(x, x), x) + p - x) % p;
        affine += 1 + legendre(t, p);
    }
    // a_p = p + 1 - (#affine + 1).
    p as i64 - affine
}

/// `a_1..a_n` for the conductor-32 CM form: point counts at primes, the
/// weight-2 Hecke recurrence at prime powers, multiplicative fill-in.
fn cm32_coeffs(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut a = vec![BigInt::zero(); n + 1];
    a[1] = BigInt::one();
    for p in 2..=n as u64 {
        if !is_prime(p) {
            continue;
        }
        a[p as usize] = BigInt::from(cm32_ap(p));
        // chi(p) p^{w-1} = p for good p, 0 at p = 2 (the level prime).
        let cp = if p == 2 { BigInt::zero() } else { BigInt::from(p) };
        let mut q = p as usize;
        while q <= n / p as usize {
            let prev = a[q].clone();
            let prev2 = if q / (p as usize) >= 1 {
                a[q / p as usize].clone()
            } else {
                BigInt::zero()
            };
            q *= p as usize;
            a[q] = a[p as usize].clone() * prev - &cp * prev2;
        }
    }
    // Multiplicative extension over the prime-power values.
    for m in 2..=n {
        let p = smallest_prime_factor(m as u64) as usize;
        let mut q = 1usize;
        let mut rest = m;
        while rest % p == 0 {
            q *= p;
            rest /= p;
        }
        if rest > 1 {
            a[m] = a[q].clone() * a[rest].clone();
        }
    }
    a.remove(0);
    a
}

fn smallest_prime_factor(m: u64) -> u64 {
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::{eta_delta, hecke_u};

    #[test]
    fn delta_record_matches_eta_product() {
        let f = NewformData::delta(50);
        assert_eq!(f.level(), 1);
        assert_eq!(f.weight(), 12);
        let exp = f.expansion(11, 5, 50);
        assert!(exp.eq_window(&eta_delta(11, 5, 50), 50, 5));
        assert!(f.multiplicativity_warnings(500).is_empty());
    }

    #[test]
    fn cm_dataset_frozen_traces() {
        // Point counts on y^2 = x^3 - x: a_5 = -2 (8 points over F_5),
        // zero at inert primes (p = 3 mod 4), a_13 = 6, a_17 = 2.
        let f = NewformData::cm32(100);
        assert_eq!(*f.a(2), BigInt::zero());
        assert_eq!(*f.a(3), BigInt::zero());
        assert_eq!(*f.a(5), BigInt::from(-2));
        assert_eq!(*f.a(7), BigInt::zero());
        assert_eq!(*f.a(13), BigInt::from(6));
        assert_eq!(*f.a(17), BigInt::from(2));
        // Prime-power recurrence: a_25 = a_5^2 - 5, a_4 = 0 (bad prime).
        assert_eq!(*f.a(25), BigInt::from(-1));
        assert_eq!(*f.a(4), BigInt::zero());
        // Multiplicative: a_65 = a_5 a_13.
        assert_eq!(*f.a(65), BigInt::from(-12));
        assert!(f.multiplicativity_warnings(2000).is_empty());
    }

    #[test]
    fn cm_dataset_is_a_u2_eigenvector_with_eigenvalue_zero() {
        // At the level prime the form is U_2-eigen with eigenvalue a_2 = 0.
        let f = NewformData::cm32(64);
        let exp = f.expansion(5, 3, 64);
        assert!(hecke_u(2, &exp).unwrap().is_zero());
    }

    #[test]
    fn eigenform_flag_enforces_normalization() {
        let bad = NewformData::new(
            1,
            12,
            1,
            vec![(1, BigInt::one())],
            vec![BigInt::from(2), BigInt::from(5)],
            true,
            false,
        );
        assert!(bad.is_err());
        // Same data without the flag is accepted.
        let ok = NewformData::new(
            1,
            12,
            1,
            vec![(1, BigInt::one())],
            vec![BigInt::from(2), BigInt::from(5)],
            false,
            false,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn multiplicativity_check_catches_corruption() {
        let mut coeffs = tau_coeffs(30);
        coeffs[5] += 1; // break a_6 = a_2 a_3
        let f = NewformData::new(
            1,
            12,
            1,
            vec![(1, BigInt::one())],
            coeffs,
            true,
            false,
        )
        .unwrap();
        let warnings = f.multiplicativity_warnings(500);
        assert!(warnings.iter().any(|w| w.contains("(2, 3)")));
    }

    #[test]
    fn nebentypus_table_shape_is_validated() {
        // Modulus 4 has one unit residue class missing here.
        let bad = NewformData::new(
            32,
            2,
            4,
            vec![(1, BigInt::one())],
            vec![BigInt::one()],
            false,
            false,
        );
        assert!(bad.is_err());
        let good = NewformData::new(
            32,
            2,
            4,
            vec![(1, BigInt::one()), (3, BigInt::from(-1))],
            vec![BigInt::one()],
            false,
            false,
        )
        .unwrap();
        assert_eq!(good.chi(3), BigInt::from(-1));
        assert_eq!(good.chi(7), BigInt::from(-1));
        assert_eq!(good.chi(2), BigInt::zero());
    }
}
