//! Truncated cuspidal q-expansions mod `p^k` and the operator algebra on
//! them: `U_l`, `T_l`, `S_l`, theta, twists, and the `mu_{p^m}` circle
//! action, together with the coefficient-reading map into valuation shells
//! and the double-coset identity verifier.
//!
//! Coefficients run over `a_1..a_N`; the constant term is absent by
//! construction, so every expansion is cuspidal. Operators declare their
//! output truncation (`floor(N/l)` for `U_l` and `T_l`, `N` otherwise);
//! indices past the declared window are never consulted.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cyclo::{cyclo_average, CycloElem};
use crate::error::CoreError;
use crate::locfn::{Domain, LocConstFn};
use crate::scalar::Scalar;

/// A cuspidal q-expansion `sum_{n=1}^{N} a_n q^{n/p^r}` mod `p^k`.
///
/// The denominator exponent `r` is nonzero only inside
/// [`verify_double_coset`]; public operators require `r = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    p: u64,
    k: u32,
    denom_exp: u32,
    coeffs: Vec<Scalar>,
}

impl QExpansion {
    pub fn new(p: u64, k: u32, coeffs: Vec<Scalar>) -> Self {
        for c in &coeffs {
            assert_eq!(c.p(), p, "coefficient prime mismatch");
        }
        QExpansion { p, k, denom_exp: 0, coeffs }
    }

    /// Fractional-index expansion (indices `n / p^r`); transient use only.
    pub fn with_denom_exp(p: u64, k: u32, r: u32, coeffs: Vec<Scalar>) -> Self {
        let mut f = Self::new(p, k, coeffs);
        f.denom_exp = r;
        f
    }

    pub fn from_ints(p: u64, k: u32, ints: &[BigInt]) -> Self {
        Self::new(
            p,
            k,
            ints.iter().map(|n| Scalar::from_int(p, k, n)).collect(),
        )
    }

    pub fn zero(p: u64, k: u32, n: usize) -> Self {
        Self::new(p, k, vec![Scalar::zero(p, k); n])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Truncation: the number of stored coefficients.
    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    /// `a_n` (1-based).
    ///
    /// # Panics
    /// Panics outside the truncation window; using unavailable indices is a
    /// caller bug, not a silent zero.
    pub fn coeff(&self, n: usize) -> &Scalar {
        assert!(n >= 1 && n <= self.coeffs.len(), "index {n} outside window");
        &self.coeffs[n - 1]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest cyclotomic level appearing among the coefficients.
    pub fn scalar_level(&self) -> u32 {
        self.coeffs.iter().map(|c| c.level()).max().unwrap_or(0)
    }

    pub fn reduce_to(&self, k2: u32) -> Self {
        QExpansion {
            p: self.p,
            k: k2,
            denom_exp: self.denom_exp,
            coeffs: self.coeffs.iter().map(|c| c.reduce_to(k2)).collect(),
        }
    }

    pub fn truncate(&self, n: usize) -> Self {
        assert!(n <= self.coeffs.len(), "cannot extend a truncation");
        QExpansion {
            p: self.p,
            k: self.k,
            denom_exp: self.denom_exp,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        assert_eq!(self.denom_exp, other.denom_exp, "mixed index scales");
        let n = self.trunc().min(other.trunc());
        let coeffs = (0..n)
            .map(|i| self.coeffs[i].add(&other.coeffs[i]))
            .collect();
        QExpansion {
            p: self.p,
            k: self.k.min(other.k),
            denom_exp: self.denom_exp,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scalar_mul(&Scalar::from_i64(other.p, other.k, -1)))
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        QExpansion {
            p: self.p,
            k: self.k.min(c.k()),
            denom_exp: self.denom_exp,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    /// Coefficientwise equality on `1..=n` at precision `k2`.
    pub fn eq_window(&self, other: &Self, n: usize, k2: u32) -> bool {
        assert!(n <= self.trunc() && n <= other.trunc(), "window exceeds data");
        (1..=n).all(|i| {
            self.coeff(i)
                .reduce_to(k2.min(self.k))
                .sub(&other.coeff(i).reduce_to(k2.min(other.k)))
                .is_zero()
        })
    }
}

pub fn is_prime(l: u64) -> bool {
    if l < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= l {
        if l.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn require_prime(l: u64) -> Result<(), CoreError> {
    if is_prime(l) {
        Ok(())
    } else {
        Err(CoreError::InvalidParams(format!("{l} is not prime")))
    }
}

/// `U_l`: `a_n <- a_{ln}`, truncation `floor(N/l)`.
pub fn hecke_u(l: u64, f: &QExpansion) -> Result<QExpansion, CoreError> {
    require_prime(l)?;
    assert_eq!(f.denom_exp, 0, "operators act on integer-indexed expansions");
    let n2 = f.trunc() / l as usize;
    let coeffs = (1..=n2).map(|n| f.coeff(l as usize * n).clone()).collect();
    Ok(QExpansion::new(f.p, f.k, coeffs))
}

/// `T_l`: `a_n <- a_{ln} + chi(l) l^{w-1} a_{n/l}`, truncation `floor(N/l)`.
pub fn hecke_t(
    l: u64,
    f: &QExpansion,
    weight: u32,
    chi_l: &Scalar,
) -> Result<QExpansion, CoreError> {
    require_prime(l)?;
    assert_eq!(f.denom_exp, 0, "operators act on integer-indexed expansions");
    let scale = chi_l.mul_int(&BigInt::from(l).pow(weight - 1));
    let n2 = f.trunc() / l as usize;
    let coeffs = (1..=n2)
        .map(|n| {
            let mut c = f.coeff(l as usize * n).clone();
            if n % l as usize == 0 {
                c = c.add(&scale.mul(f.coeff(n / l as usize)));
            }
            c
        })
        .collect();
    Ok(QExpansion::new(f.p, f.k, coeffs))
}

/// `S_l`: multiplication by the scalar `chi(l) l^{w-1}`, so that
/// `X^2 - T_l X + S_l` has root product of valuation `w - 1`.
pub fn hecke_s(
    l: u64,
    f: &QExpansion,
    weight: u32,
    chi_l: &Scalar,
) -> Result<QExpansion, CoreError> {
    require_prime(l)?;
    Ok(f.scalar_mul(&chi_l.mul_int(&BigInt::from(l).pow(weight - 1))))
}

/// `q |-> q^d` dilation: `a_n` moves to index `dn`, other indices vanish.
/// Output truncation grows to `dN` so the input window is fully visible.
pub fn dilate(f: &QExpansion, d: u64) -> QExpansion {
    assert!(d >= 1);
    assert_eq!(f.denom_exp, 0, "operators act on integer-indexed expansions");
    let n = f.trunc() * d as usize;
    let mut coeffs = vec![Scalar::zero(f.p, f.k); n];
    for (i, c) in f.coeffs.iter().enumerate() {
        coeffs[(i + 1) * d as usize - 1] = c.clone();
    }
    QExpansion::new(f.p, f.k, coeffs)
}

/// `theta = q d/dq`: `a_n <- n a_n`.
pub fn theta(f: &QExpansion) -> QExpansion {
    assert_eq!(f.denom_exp, 0, "operators act on integer-indexed expansions");
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c.mul_int(&BigInt::from(i + 1)))
        .collect();
    QExpansion::new(f.p, f.k, coeffs)
}

/// Twist by a locally constant function: `a_n <- kappa(n) a_n`.
///
/// A unit-domain `kappa` is extended by zero on the non-units; a
/// `Z_p`-domain one is evaluated everywhere.
pub fn twist(f: &QExpansion, kappa: &LocConstFn) -> QExpansion {
    assert_eq!(f.denom_exp, 0, "operators act on integer-indexed expansions");
    assert_eq!(f.p, kappa.p(), "mixed primes");
    let on_zp = match kappa.domain() {
        Domain::Zp => kappa.clone(),
        Domain::ZpUnits => kappa.extend_by_zero(),
    };
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c.mul(&on_zp.eval(&BigInt::from(i + 1))))
        .collect();
    QExpansion::new(f.p, f.k, coeffs)
}

/// The `mu_{p^m}` circle action: `a_n <- zeta_{p^m}^{jn} a_n`.
///
/// Takes plain-coefficient input to a level-`m` cyclotomic expansion. The
/// coefficient rule is definitional here and pinned against the averaging
/// identity (see [`CircleOrbit::average`]).
pub fn circle_act(j: i64, m: u32, f: &QExpansion) -> QExpansion {
    assert_eq!(f.denom_exp, 0, "operators act on integer-indexed expansions");
    if m == 0 {
        return f.clone();
    }
    let order = f.p.pow(m) as i64;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let e = (j % order) * ((i as i64 + 1) % order);
            Scalar::Cyclo(c.promote_to_level(m).mul_by_zeta_pow(e)).canonicalize_level()
        })
        .collect();
    QExpansion::new(f.p, f.k, coeffs)
}

/// The full circle orbit of one expansion, cached so that averages for
/// every weight reuse the same acted family.
pub struct CircleOrbit {
    m: u32,
    acted: Vec<QExpansion>,
}

impl CircleOrbit {
    pub fn new(f: &QExpansion, m: u32) -> Self {
        let order = f.p.pow(m);
        CircleOrbit {
            m,
            acted: (0..order as i64).map(|j| circle_act(j, m, f)).collect(),
        }
    }

    /// `(1/p^m) sum_j zeta^{-aj} (j * f)`, coefficient by coefficient, at
    /// precision `k - m`.
    pub fn average(&self, a: i64) -> Result<QExpansion, CoreError> {
        let f0 = &self.acted[0];
        let (p, k, n) = (f0.p, f0.k, f0.trunc());
        let mut coeffs = Vec::with_capacity(n);
        for i in 1..=n {
            let values: Vec<CycloElem> = self
                .acted
                .iter()
                .map(|g| g.coeff(i).promote_to_level(self.m))
                .collect();
            let avg = cyclo_average(&values, a).map_err(|e| match e {
                CoreError::NotDivisible(_) => CoreError::NotDivisible(format!(
                    "circle average fails exact division at coefficient {i}"
                )),
                other => other,
            })?;
            coeffs.push(Scalar::Cyclo(avg).canonicalize_level());
        }
        Ok(QExpansion::new(p, k - self.m, coeffs))
    }
}

/// Exact coefficients `tau(1..n)` of `Delta = q prod (1 - q^j)^24`.
///
/// The eta factor is expanded by the pentagonal-number recursion and raised
/// to the 24th power by repeated squaring over exact integers.
pub fn tau_coeffs(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    // prod (1 - q^j) as a sparse signed sum, truncated below degree n.
    let mut eta = vec![BigInt::zero(); n];
    eta[0] = BigInt::one();
    let mut k = 1i64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 as usize >= n && g2 as usize >= n {
            break;
        }
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        for g in [g1, g2] {
            if (g as usize) < n {
                eta[g as usize] += &sign;
            }
        }
        k += 1;
    }
    let e2 = poly_mul_trunc(&eta, &eta, n);
    let e3 = poly_mul_trunc(&e2, &eta, n);
    let e6 = poly_mul_trunc(&e3, &e3, n);
    let e12 = poly_mul_trunc(&e6, &e6, n);
    let e24 = poly_mul_trunc(&e12, &e12, n);
    // Delta = q * eta^24, so tau(m) is the degree m-1 coefficient.
    e24
}

fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if y.is_zero() {
                continue;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// `Delta` truncated at `q^n`, reduced mod `p^k`.
pub fn eta_delta(p: u64, k: u32, n: usize) -> QExpansion {
    QExpansion::from_ints(p, k, &tau_coeffs(n))
}

/// The coefficient-reading map: `n |-> a_n`, addressable by valuation
/// shells `p^v * u`.
pub struct KirTotal {
    p: u64,
    k: u32,
    coeffs: Vec<Scalar>,
}

impl KirTotal {
    pub fn new(f: &QExpansion) -> Self {
        assert_eq!(f.denom_exp, 0, "shell reading needs integer indices");
        KirTotal { p: f.p, k: f.k, coeffs: f.coeffs.clone() }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_n`, if inside the window.
    pub fn at_index(&self, n: u64) -> Option<&Scalar> {
        if n >= 1 && n <= self.coeffs.len() as u64 {
            Some(&self.coeffs[n as usize - 1])
        } else {
            None
        }
    }

    /// Value on the shell point `p^v * u`, if inside the window.
    pub fn at_shell(&self, v: u32, u: u64) -> Option<&Scalar> {
        debug_assert!(!u.is_multiple_of(self.p), "shell coordinate must be a unit");
        self.p
            .checked_pow(v)
            .and_then(|pv| pv.checked_mul(u))
            .and_then(|n| self.at_index(n))
    }
}

/// Checks the double-coset identity `(1/p) sum_i f(zeta_p^i q^{1/p}) =
/// U_p f` on the shared window, at precision `k - 1`.
///
/// The left side is assembled from fractional-index expansions and
/// averaged with [`cyclo_average`]; a failed exact division is reported as
/// an error naming the offending index, a value mismatch returns
/// `Ok(false)`.
pub fn verify_double_coset(f: &QExpansion) -> Result<bool, CoreError> {
    let p = f.p;
    let k = f.k;
    if k < 2 {
        return Err(CoreError::InvalidParams(
            "double-coset verification needs k >= 2".into(),
        ));
    }
    assert_eq!(f.denom_exp, 0);
    let n = f.trunc();
    // f(zeta^i q^{1/p}) for i < p: fractional indices n/p, coefficient
    // zeta^{in} a_n.
    let stretched: Vec<QExpansion> = (0..p as i64)
        .map(|i| {
            let coeffs = f
                .coeffs
                .iter()
                .enumerate()
                .map(|(idx, c)| {
                    let e = i * ((idx as i64 + 1) % p as i64);
                    Scalar::Cyclo(c.promote_to_level(1).mul_by_zeta_pow(e))
                })
                .collect();
            QExpansion::with_denom_exp(p, k, 1, coeffs)
        })
        .collect();
    let up = hecke_u(p, f)?;
    for idx in 1..=n {
        let values: Vec<CycloElem> = stretched
            .iter()
            .map(|g| g.coeff(idx).promote_to_level(1))
            .collect();
        let avg = cyclo_average(&values, 0).map_err(|e| match e {
            CoreError::NotDivisible(_) => CoreError::NotDivisible(format!(
                "double-coset average fails exact division at index {idx}/{p}"
            )),
            other => other,
        })?;
        if idx % p as usize != 0 {
            // Fractional index survives only if the average vanishes.
            if !avg.is_zero() {
                return Ok(false);
            }
            continue;
        }
        let plain = match avg.as_plain() {
            Some(c) => c,
            None => return Ok(false),
        };
        let rhs = up.coeff(idx / p as usize);
        if !Scalar::Plain(plain).sub(&rhs.reduce_to(k - 1)).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
