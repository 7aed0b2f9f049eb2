//! Hecke-stable lattices of q-expansions, the `U_p` matrix, the ordinary
//! projector `e = lim U_p^{t!}`, kernel characterization, p-stabilizations,
//! and unit-eigenvalue tail reports for the coinvariants.
//!
//! Matrices follow the column convention: `U_p(b_j) = sum_i M[i][j] b_i`,
//! so coefficient columns transform as `x -> Mx` and kernels are right
//! kernels. All module computations run over `Z/p^k` via Howell forms.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::charfn::CharTail;
use crate::error::CoreError;
use crate::howell::{
    charpoly, poly_eval, rank_mod_p, right_kernel, solve_left_or_residue, PkMatrix,
};
use crate::newform::NewformData;
use crate::padic::{hensel_unit_root, int_valuation, pk_modulus, PadicApprox};
use crate::qexp::{hecke_u, is_prime, QExpansion};
use crate::scalar::{PValue, Scalar};

/// A finite lattice of cuspidal expansions, certified independent mod p^k
/// and (on demand) U_p-stable at its truncation.
#[derive(Debug)]
pub struct HeckeLattice {
    p: u64,
    k: u32,
    n: usize,
    basis: Vec<QExpansion>,
    up: OnceLock<PkMatrix>,
}

impl HeckeLattice {
    /// Certifies full row rank of the coefficient matrix: d rows are
    /// independent over `Z/p^k` exactly when they stay independent mod p.
    pub fn new(p: u64, k: u32, n: usize, basis: Vec<QExpansion>) -> Result<Self, CoreError> {
        if basis.is_empty() || n == 0 {
            return Err(CoreError::InvalidParams("empty lattice".into()));
        }
        for (i, f) in basis.iter().enumerate() {
            if f.p() != p || f.k() < k {
                return Err(CoreError::InvalidParams(format!(
                    "basis vector {i} does not carry precision (p, k)"
                )));
            }
            if f.trunc() < n {
                return Err(CoreError::WindowTooSmall(format!(
                    "basis vector {i} stops before index {n}"
                )));
            }
        }
        let mat = coeff_matrix(p, k, &basis, n)?;
        if rank_mod_p(&mat) < basis.len() {
            return Err(CoreError::RankDeficient(format!(
                "{} basis vectors span less than full rank at truncation {n}",
                basis.len()
            )));
        }
        Ok(HeckeLattice { p, k, n, basis, up: OnceLock::new() })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn trunc(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QExpansion] {
        &self.basis
    }

    /// The element with coefficient column `x` (entries mod p^k).
    pub fn element(&self, x: &[BigUint]) -> QExpansion {
        assert_eq!(x.len(), self.dim());
        let mut acc = QExpansion::zero(self.p, self.k, self.n);
        for (c, b) in x.iter().zip(&self.basis) {
            let s = Scalar::from_int(self.p, self.k, &BigInt::from(c.clone()));
            acc = acc.add(&b.truncate(self.n).scalar_mul(&s));
        }
        acc
    }

    /// Matrix of U_p in the basis (columns are images), solved over
    /// `Z/p^k` on the window `N/p` and cached.
    pub fn up_matrix(&self) -> Result<PkMatrix, CoreError> {
        if let Some(m) = self.up.get() {
            return Ok(m.clone());
        }
        let w = self.n / self.p as usize;
        if w == 0 {
            return Err(CoreError::WindowTooSmall(
                "truncation below p leaves U_p no window".into(),
            ));
        }
        let window_mat = coeff_matrix(self.p, self.k, &self.basis, w)?;
        let d = self.dim();
        let mut m = PkMatrix::zero(self.p, self.k, d, d);
        for j in 0..d {
            let img = hecke_u(self.p, &self.basis[j].truncate(self.n))?;
            let img_row = expansion_coeff_row(self.p, self.k, &img, w)?;
            match solve_left_or_residue(&window_mat, &img_row) {
                Ok(x) => {
                    for (i, v) in x.into_iter().enumerate() {
                        m.set(i, j, v);
                    }
                }
                Err(residue) => {
                    let at = residue.iter().position(|r| !r.is_zero()).unwrap_or(0);
                    return Err(CoreError::NotStable(format!(
                        "U_p of basis vector {j} leaves the span, first residual at index {}",
                        at + 1
                    )));
                }
            }
        }
        let _ = self.up.set(m.clone());
        Ok(m)
    }
}

/// Rows = expansions, columns = coefficients 1..n, plain scalars required.
fn coeff_matrix(
    p: u64,
    k: u32,
    basis: &[QExpansion],
    n: usize,
) -> Result<PkMatrix, CoreError> {
    let mut out = PkMatrix::zero(p, k, basis.len(), n);
    for (i, f) in basis.iter().enumerate() {
        let row = expansion_coeff_row(p, k, f, n)?;
        for (j, v) in row.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

fn expansion_coeff_row(
    p: u64,
    k: u32,
    f: &QExpansion,
    n: usize,
) -> Result<Vec<BigUint>, CoreError> {
    debug_assert_eq!(f.p(), p, "mixed primes");
    (1..=n)
        .map(|i| {
            f.coeff(i).reduce_to(k).as_plain().map(|x| x.residue().clone()).ok_or_else(
                || {
                    CoreError::InvalidParams(format!(
                        "lattice work needs plain coefficients, index {i} is cyclotomic"
                    ))
                },
            )
        })
        .collect()
}

/// Hida's ordinary projector `e = lim M^{t!}`, by literal factorial powers.
///
/// Exit needs both a fixed point and idempotency: equality of consecutive
/// iterates alone can park on a cycle (M = [2] mod 5 reaches 4, 4, .. with
/// 4^2 = 1), so `E_{t+1} = E_t` without `E^2 = E` is not convergence.
pub fn ordinary_projector(m: &PkMatrix) -> Result<PkMatrix, CoreError> {
    assert_eq!(m.rows(), m.cols(), "projector of a square matrix");
    let dim = m.rows() as u64;
    let cap = dim
        .saturating_mul(m.k() as u64)
        .saturating_mul(m.p().saturating_pow(m.rows() as u32));
    let mut e = m.clone();
    let mut t: u64 = 1;
    loop {
        let next = e.pow(t + 1);
        if next == e && e.mul(&e) == e {
            debug_assert_eq!(e.mul(m), m.mul(&e), "projector commutes with M");
            return Ok(e);
        }
        e = next;
        t += 1;
        if t > cap {
            // Unreachable for honest inputs: the matrix semigroup over
            // Z/p^k is finite, so the factorial sequence must settle.
            return Err(CoreError::InvalidParams(
                "ordinary projector exceeded its iteration cap".into(),
            ));
        }
    }
}

/// Rank of an idempotent: its image is a free direct summand, so the
/// mod-p rank is the whole answer.
pub fn projector_rank(e: &PkMatrix) -> usize {
    debug_assert_eq!(e.mul(e), *e, "rank shortcut needs an idempotent");
    rank_mod_p(e)
}

/// Result of comparing ker(e) with the U_p-nilpotence module.
pub struct KernelReport {
    /// Howell generators of ker(e) (rows are coefficient vectors).
    pub kernel: PkMatrix,
    /// Howell generators of ker(M^{n0}).
    pub up_power_kernel: PkMatrix,
    pub n0: u32,
    /// Module equality of the two kernels.
    pub verdict: bool,
    /// For each kernel generator, the first s with U_p^s g = 0, confirmed
    /// on the actual expansion window.
    pub confirmations: Vec<u32>,
}

/// Verifies ker(e) = {v : U_p^{n0} v = 0 mod p^k}, n0 = dim*k, both as
/// Howell modules and per generator on the expansion window.
pub fn kernel_check(l: &HeckeLattice, e: &PkMatrix) -> Result<KernelReport, CoreError> {
    let m = l.up_matrix()?;
    let dim = l.dim();
    let n0 = (dim as u32) * l.k();
    let kernel = right_kernel(e);
    let up_power_kernel = right_kernel(&m.pow(n0 as u64));
    let verdict = kernel == up_power_kernel;

    let mut confirmations = Vec::with_capacity(kernel.rows());
    for g in 0..kernel.rows() {
        let x: Vec<BigUint> = kernel.row(g).to_vec();
        // Minimal s with M^s x = 0, found on the matrix side first.
        let col = PkMatrix::zero(l.p(), l.k(), dim, 1);
        let mut col = col;
        for (i, v) in x.iter().enumerate() {
            col.set(i, 0, v.clone());
        }
        let mut s = 0u32;
        let mut cur = col;
        while !cur.is_zero() {
            cur = m.mul(&cur);
            s += 1;
            if s > n0 {
                return Err(CoreError::NotStable(format!(
                    "kernel generator {g} is not annihilated by U_p^{n0}"
                )));
            }
        }
        // Independent confirmation on the expansion itself.
        let usable = l.trunc() / (l.p() as usize).pow(s);
        if usable < dim {
            return Err(CoreError::WindowTooSmall(format!(
                "confirming U_p^{s} on generator {g} needs window >= {dim}"
            )));
        }
        let mut f = l.element(&x);
        for _ in 0..s {
            f = hecke_u(l.p(), &f)?;
        }
        if !f.is_zero() {
            return Err(CoreError::NotStable(format!(
                "matrix route says U_p^{s} kills generator {g}, expansion disagrees"
            )));
        }
        confirmations.push(s);
    }
    Ok(KernelReport { kernel, up_power_kernel, n0, verdict, confirmations })
}

/// A unit generalized eigenvalue class of `e M` with its Jordan bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitEigenClass {
    /// Unit eigenvalue mod p^k.
    pub alpha: BigUint,
    /// Nilpotency index of (A - alpha) on its primary block; tails carry
    /// degrees `a` in `0..jordan`.
    pub jordan: u32,
}

impl UnitEigenClass {
    /// The unramified character tails describing this class in the
    /// coinvariants: chi(p) = alpha, degrees a < jordan, no log factor.
    pub fn tails(&self, p: u64, k: u32) -> Vec<CharTail> {
        let alpha = Scalar::Plain(PadicApprox::new(p, k, &BigInt::from(self.alpha.clone())));
        let chi = crate::charfn::SmoothChar::unramified(
            p,
            k,
            PValue::from_unit_scalar(alpha),
        );
        (0..self.jordan)
            .map(|a| CharTail::new(chi.clone(), a, 0, Scalar::one(p, k)))
            .collect()
    }
}

/// Unit-eigenvalue classes of `A = e M`, by Hensel lifting the roots of
/// the characteristic polynomial's unit part.
///
/// Repeated mod-p roots are handled through the (mu-1)-th derivative and
/// then certified by exact division; failure to certify means the unit
/// part does not split at this precision ("raise precision"). Unit
/// factors irreducible over F_p are out of scope.
pub fn coinvariant_classes(
    m: &PkMatrix,
    e: &PkMatrix,
) -> Result<Vec<UnitEigenClass>, CoreError> {
    let a = e.mul(m);
    let p = a.p();
    let k = a.k();
    let modulus = a.modulus();
    let c = charpoly(&a);

    // Unit part mod p: strip the power of x, then find roots in F_p^x.
    let cbar: Vec<u64> = c.iter().map(|x| (x % p).to_u64().expect("< p")).collect();
    let z = cbar.iter().position(|&x| x != 0).expect("monic polynomial");
    let mut h: Vec<u64> = cbar[z..].to_vec();
    let unit_degree = h.len() - 1;

    let mut found = Vec::new();
    for r in 1..p {
        let mut mu = 0u32;
        while h.len() > 1 && poly_eval_fp(&h, r, p) == 0 {
            h = synthetic_div_fp(&h, r, p);
            mu += 1;
        }
        if mu > 0 {
            found.push((r, mu));
        }
    }
    let split: u32 = found.iter().map(|(_, mu)| mu).sum();
    if (split as usize) < unit_degree {
        return Err(CoreError::Unsupported(format!(
            "unit factor of degree {} is irreducible over F_{p}",
            unit_degree - split as usize
        )));
    }

    let mut classes = Vec::new();
    for (r, mu) in found {
        let alpha = if mu == 1 {
            newton_lift(&c, r, p, k)?
        } else {
            if p <= mu as u64 {
                return Err(CoreError::Unsupported(format!(
                    "unit eigenvalue with multiplicity {mu} >= p"
                )));
            }
            let d = poly_derivative_n(&c, mu - 1, &modulus);
            let alpha = newton_lift(&d, r, p, k)?;
            // Certify (x - alpha)^mu divides the characteristic polynomial
            // exactly mod p^k; otherwise the congruent roots are distinct
            // at this precision and Hensel cannot split them.
            let mut q = c.clone();
            for _ in 0..mu {
                let (quot, rem) = synthetic_div_pk(&q, &alpha, &modulus);
                if !rem.is_zero() {
                    return Err(CoreError::RaisePrecision(format!(
                        "unit part has root {r} mod {p} of multiplicity {mu} \
                         that does not lift to a single class mod p^{k}"
                    )));
                }
                q = quot;
            }
            alpha
        };
        // Jordan bound: kernel growth of (A - alpha)^j over Z/p^k.
        let mut b = a.clone();
        for i in 0..b.rows() {
            let cur = b.entry(i, i).clone();
            b.set(i, i, (cur + &modulus - &alpha) % &modulus);
        }
        let mut jordan = 1u32;
        let mut power = b.clone();
        let mut size = kernel_log_size(&power);
        loop {
            power = power.mul(&b);
            let next = kernel_log_size(&power);
            if next == size {
                break;
            }
            size = next;
            jordan += 1;
            debug_assert!(jordan <= mu, "nilpotency exceeds certified multiplicity");
        }
        classes.push(UnitEigenClass { alpha, jordan });
    }
    classes.sort_by(|x, y| x.alpha.cmp(&y.alpha));
    Ok(classes)
}

/// log_p of the cardinality of the right kernel, from Howell pivots.
fn kernel_log_size(a: &PkMatrix) -> u64 {
    let h = right_kernel(a);
    let mut total = 0u64;
    for i in 0..h.rows() {
        let row = h.row(i);
        let c = row.iter().position(|x| !x.is_zero()).expect("howell rows nonzero");
        let e = int_valuation(h.p(), &BigInt::from(row[c].clone()))
            .map(|v| v as u32)
            .unwrap_or(h.k())
            .min(h.k());
        total += (h.k() - e) as u64;
    }
    total
}

fn poly_eval_fp(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u128;
    for c in coeffs.iter().rev() {
        acc = (acc * x as u128 + *c as u128) % p as u128;
    }
    acc as u64
}

/// Divide by (X - r) over F_p; caller guarantees r is a root.
fn synthetic_div_fp(coeffs: &[u64], r: u64, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; coeffs.len() - 1];
    let mut carry = 0u128;
    for i in (0..coeffs.len() - 1).rev() {
        carry = (coeffs[i + 1] as u128 + carry * r as u128) % p as u128;
        out[i] = carry as u64;
    }
    debug_assert_eq!(
        (coeffs[0] as u128 + carry * r as u128) % p as u128,
        0,
        "r was a root"
    );
    out
}

/// Divide by (X - alpha) mod p^k, returning (quotient, remainder).
fn synthetic_div_pk(coeffs: &[BigUint], alpha: &BigUint, m: &BigUint) -> (Vec<BigUint>, BigUint) {
    let mut out = vec![BigUint::zero(); coeffs.len() - 1];
    let mut carry = BigUint::zero();
    for i in (0..coeffs.len() - 1).rev() {
        carry = (&coeffs[i + 1] + carry * alpha) % m;
        out[i] = carry.clone();
    }
    let rem = (&coeffs[0] + carry * alpha) % m;
    (out, rem)
}

fn poly_derivative_n(coeffs: &[BigUint], n: u32, m: &BigUint) -> Vec<BigUint> {
    let mut cur = coeffs.to_vec();
    for _ in 0..n {
        cur = cur
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigUint::from(i) % m)
            .collect();
    }
    cur
}

/// Newton iteration from a simple root mod p to a root mod p^k.
fn newton_lift(coeffs: &[BigUint], r: u64, p: u64, k: u32) -> Result<BigUint, CoreError> {
    let m = pk_modulus(p, k);
    let deriv = poly_derivative_n(coeffs, 1, &m);
    let mut x = BigUint::from(r);
    for _ in 0..=k + 2 {
        let fx = poly_eval(coeffs, &x, &m);
        if fx.is_zero() {
            return Ok(x);
        }
        let dfx = poly_eval(&deriv, &x, &m);
        let dfx_p = PadicApprox::new(p, k, &BigInt::from(dfx.clone()));
        if !dfx_p.is_unit() {
            return Err(CoreError::RaisePrecision(format!(
                "derivative vanishes mod p at candidate root {r}"
            )));
        }
        let step = fx * dfx_p.inverse().expect("unit").residue() % &m;
        x = (&x + (&m - step)) % &m;
    }
    Err(CoreError::RaisePrecision(format!(
        "Newton iteration from root {r} mod {p} did not settle"
    )))
}

/// Which root of `x^2 - a_p x + chi(p) p^{w-1}` labels the stabilization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootChoice {
    /// The unit (ordinary) root.
    Unit,
    /// The complementary root of valuation weight - 1.
    NonUnit,
    /// Whichever exists; on non-ordinary input falls back to a root
    /// search mod p^k.
    Either,
}

#[derive(Debug)]
pub struct Stabilization {
    pub expansion: QExpansion,
    pub eigenvalue: Scalar,
    pub ordinary: bool,
}

/// Classical p-stabilization `f(q) - (other root) f(q^p)`, verified to be
/// U_p-eigen with the chosen root on the window.
pub fn stabilize(
    f: &NewformData,
    p: u64,
    k: u32,
    n: usize,
    choice: RootChoice,
) -> Result<Stabilization, CoreError> {
    if !is_prime(p) {
        return Err(CoreError::InvalidParams(format!("{p} is not prime")));
    }
    if f.level().is_multiple_of(p) {
        return Err(CoreError::InvalidParams(
            "stabilization needs p prime to the level".into(),
        ));
    }
    if n > f.trunc() || n < p as usize {
        return Err(CoreError::WindowTooSmall(format!(
            "need p <= n <= {} stored coefficients",
            f.trunc()
        )));
    }
    let modulus = pk_modulus(p, k);
    let ap = PadicApprox::new(p, k, f.a(p as usize));
    let c_int = f.chi(p) * BigInt::from(p).pow(f.weight() - 1);
    let c = PadicApprox::new(p, k, &c_int);

    let (root, other, ordinary) = if ap.is_unit() {
        let alpha = hensel_unit_root(&ap, &c)?;
        let beta = c.mul(&alpha.inverse()?);
        debug_assert!(ap.sub(&alpha.add(&beta)).is_zero(), "Vieta sum");
        match choice {
            RootChoice::Unit | RootChoice::Either => (alpha, beta, true),
            RootChoice::NonUnit => (beta, alpha, true),
        }
    } else {
        if choice == RootChoice::Unit {
            return Err(CoreError::NonOrdinary(
                "no unit root: a_p has positive valuation".into(),
            ));
        }
        let size = modulus.to_u64().filter(|&s| s <= 10_000_000).ok_or_else(|| {
            CoreError::Unsupported(
                "non-ordinary root search needs p^k <= 10^7".into(),
            )
        })?;
        let a_res = ap.residue().to_u64().expect("reduced");
        let c_res = c.residue().to_u64().expect("reduced");
        let root = (0..size)
            .find(|&r| {
                let r = r as u128;
                let s = size as u128;
                (r * r + c_res as u128 + (s - a_res as u128) * r % s).is_multiple_of(s)
            })
            .ok_or_else(|| {
                CoreError::InvalidParams(
                    "characteristic polynomial has no root mod p^k".into(),
                )
            })?;
        let other = (a_res + size - root) % size;
        (
            PadicApprox::from_u64(p, k, root),
            PadicApprox::from_u64(p, k, other),
            false,
        )
    };

    // b_n = a_n - other * a_{n/p}.
    let other_s = Scalar::Plain(other);
    let root_s = Scalar::Plain(root);
    let coeffs: Vec<Scalar> = (1..=n)
        .map(|i| {
            let mut v = Scalar::from_int(p, k, f.a(i));
            if i % p as usize == 0 {
                let prev = Scalar::from_int(p, k, f.a(i / p as usize));
                v = v.sub(&other_s.mul(&prev));
            }
            v
        })
        .collect();
    let expansion = QExpansion::new(p, k, coeffs);

    // Post-construction eigencheck on the window.
    let lhs = hecke_u(p, &expansion)?;
    let rhs = expansion.scalar_mul(&root_s).truncate(lhs.trunc());
    if !lhs.eq_window(&rhs, lhs.trunc(), k) {
        return Err(CoreError::NotStable(
            "stabilization is not U_p-eigen on the window; input is not an eigenform at p"
                .into(),
        ));
    }
    Ok(Stabilization { expansion, eigenvalue: root_s, ordinary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::howell::howell_form;
    use crate::qexp::{dilate, eta_delta, tau_coeffs};
    use num_traits::One;

    fn delta_lattice(p: u64, k: u32, n: usize) -> HeckeLattice {
        let f = eta_delta(p, k, n);
        let fp = dilate(&eta_delta(p, k, n / p as usize + 1), p);
        HeckeLattice::new(p, k, n, vec![f, fp.truncate(n)]).unwrap()
    }

    #[test]
    fn up_matrix_frozen_delta_lattice() {
        // Spec of the recurrence: U_11 Delta = tau(11) Delta - 11^11 Delta(q^11),
        // U_11 Delta(q^11) = Delta. Columns are images.
        let l = delta_lattice(11, 12, 242);
        let m = l.up_matrix().unwrap();
        let modulus = pk_modulus(11, 12);
        let tau11 = BigUint::from(534612u64);
        assert_eq!(*m.entry(0, 0), tau11);
        assert_eq!(*m.entry(0, 1), BigUint::one());
        assert_eq!(
            *m.entry(1, 0),
            (&modulus - BigUint::from(11u64).pow(11)) % &modulus
        );
        assert_eq!(*m.entry(1, 1), BigUint::zero());

        // At k = 5 the lower-left entry collapses to 0.
        let l5 = delta_lattice(11, 5, 242);
        let m5 = l5.up_matrix().unwrap();
        assert_eq!(*m5.entry(0, 0), BigUint::from(51459u64));
        assert_eq!(*m5.entry(1, 0), BigUint::zero());
    }

    #[test]
    fn duplicate_basis_vector_is_rank_deficient() {
        let f = eta_delta(11, 5, 100);
        let err = HeckeLattice::new(11, 5, 100, vec![f.clone(), f]).unwrap_err();
        assert!(matches!(err, CoreError::RankDeficient(_)));
    }

    #[test]
    fn eigenform_gives_one_by_one_matrix() {
        // Stabilized CM form at p = 5 is U_5-eigen; its lattice matrix is [alpha].
        let f = NewformData::cm32(200);
        let st = stabilize(&f, 5, 3, 200, RootChoice::Unit).unwrap();
        let l = HeckeLattice::new(5, 3, 200, vec![st.expansion.clone()]).unwrap();
        let m = l.up_matrix().unwrap();
        let alpha = st.eigenvalue.as_plain().unwrap();
        assert_eq!(*m.entry(0, 0), *alpha.residue());
        assert_eq!(alpha.residue() % 5u64, BigUint::from(3u64));
    }

    #[test]
    fn projector_diagonal_and_nilpotent_cases() {
        let d = PkMatrix::from_i64_rows(5, 3, &[vec![2, 0], vec![0, 5]]);
        let e = ordinary_projector(&d).unwrap();
        assert_eq!(e, PkMatrix::from_i64_rows(5, 3, &[vec![1, 0], vec![0, 0]]));

        let nil = PkMatrix::from_i64_rows(5, 2, &[vec![5, 1], vec![0, 5]]);
        let e = ordinary_projector(&nil).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn projector_requires_idempotency_not_just_a_fixed_step() {
        // M = [2] mod 5: M^{2!} = 4 and M^{3!} = 4 agree, but 4 is not
        // idempotent; the true limit is 1.
        let m = PkMatrix::from_i64_rows(5, 1, &[vec![2]]);
        let e = ordinary_projector(&m).unwrap();
        assert_eq!(e, PkMatrix::from_i64_rows(5, 1, &[vec![1]]));
    }

    #[test]
    fn projector_on_delta_lattice_has_rank_one() {
        let l = delta_lattice(11, 5, 242);
        let m = l.up_matrix().unwrap();
        let e = ordinary_projector(&m).unwrap();
        assert_eq!(e.mul(&e), e);
        assert_eq!(e.mul(&m), m.mul(&e));
        assert_eq!(projector_rank(&e), 1);
    }

    #[test]
    fn kernel_check_on_delta_lattice() {
        let l = delta_lattice(11, 5, 242);
        let m = l.up_matrix().unwrap();
        let e = ordinary_projector(&m).unwrap();
        let report = kernel_check(&l, &e).unwrap();
        assert!(report.verdict);
        assert_eq!(report.kernel.rows(), 1);
        // beta has valuation 11 >= k, so one application of U_p kills the
        // stabilization.
        assert_eq!(report.confirmations, vec![1]);
        // The kernel generator is Delta(q) - alpha Delta(q^11) up to unit:
        // its second coordinate is -alpha times the first.
        let alpha = BigUint::from(51459u64);
        let g = report.kernel.row(0);
        let modulus = pk_modulus(11, 5);
        assert_eq!(g[1].clone(), (&modulus - &g[0] * &alpha % &modulus) % &modulus);
    }

    #[test]
    fn kernel_and_image_span_the_lattice() {
        let l = delta_lattice(11, 5, 242);
        let m = l.up_matrix().unwrap();
        let e = ordinary_projector(&m).unwrap();
        let ker = right_kernel(&e);
        // Rows of e^T span im(e) as coefficient vectors.
        let im = e.transpose();
        let mut rows = Vec::new();
        for i in 0..ker.rows() {
            rows.push(ker.row(i).to_vec());
        }
        for i in 0..im.rows() {
            rows.push(im.row(i).to_vec());
        }
        let combined = PkMatrix::from_int_rows(
            11,
            5,
            &rows
                .iter()
                .map(|r| r.iter().map(|x| BigInt::from(x.clone())).collect())
                .collect::<Vec<_>>(),
        );
        let h = howell_form(&combined);
        assert_eq!(h, PkMatrix::identity(11, 5, 2), "ker + im = everything");
    }

    #[test]
    fn kernel_of_non_ordinary_and_ordinary_eigenforms() {
        // Single ordinary eigenform: kernel of e is 0.
        let f = NewformData::cm32(200);
        let st = stabilize(&f, 5, 3, 200, RootChoice::Unit).unwrap();
        let l = HeckeLattice::new(5, 3, 200, vec![st.expansion]).unwrap();
        let e = ordinary_projector(&l.up_matrix().unwrap()).unwrap();
        let report = kernel_check(&l, &e).unwrap();
        assert!(report.verdict);
        assert_eq!(report.kernel.rows(), 0);

        // Single non-ordinary vector: kernel is everything.
        let st = stabilize(&f, 5, 3, 200, RootChoice::NonUnit).unwrap();
        let l = HeckeLattice::new(5, 3, 200, vec![st.expansion]).unwrap();
        let e = ordinary_projector(&l.up_matrix().unwrap()).unwrap();
        assert!(e.is_zero());
        let report = kernel_check(&l, &e).unwrap();
        assert!(report.verdict);
        assert_eq!(report.kernel, PkMatrix::identity(5, 3, 1));
    }

    #[test]
    fn coinvariant_classes_examples() {
        // Rank-1 projector from the Delta lattice: one class, a = 0 only.
        let l = delta_lattice(11, 5, 242);
        let m = l.up_matrix().unwrap();
        let e = ordinary_projector(&m).unwrap();
        let classes = coinvariant_classes(&m, &e).unwrap();
        assert_eq!(
            classes,
            vec![UnitEigenClass { alpha: BigUint::from(51459u64), jordan: 1 }]
        );
        let tails = classes[0].tails(11, 5);
        assert_eq!(tails.len(), 1);

        // Zero projector: no classes.
        let nil = PkMatrix::from_i64_rows(5, 3, &[vec![5, 0], vec![0, 5]]);
        let e = ordinary_projector(&nil).unwrap();
        let classes = coinvariant_classes(&nil, &e).unwrap();
        assert!(classes.is_empty());

        // Unipotent times alpha: Jordan bound 2, tails a in {0, 1}.
        let j = PkMatrix::from_i64_rows(5, 3, &[vec![2, 1], vec![0, 2]]);
        let e = PkMatrix::identity(5, 3, 2);
        let classes = coinvariant_classes(&j, &e).unwrap();
        assert_eq!(
            classes,
            vec![UnitEigenClass { alpha: BigUint::from(2u64), jordan: 2 }]
        );
        assert_eq!(classes[0].tails(5, 3).len(), 2);
    }

    #[test]
    fn jordan_bound_sees_p_scaled_nilpotence() {
        // (A - 2) = [[0, 5], [0, 0]] vanishes mod 5 but not mod 125: the
        // kernel-growth bound must report 2, not 1.
        let a = PkMatrix::from_i64_rows(5, 3, &[vec![2, 5], vec![0, 2]]);
        let e = PkMatrix::identity(5, 3, 2);
        let classes = coinvariant_classes(&a, &e).unwrap();
        assert_eq!(classes[0].jordan, 2);

        // Plain diagonal: semisimple, bound 1.
        let d = PkMatrix::from_i64_rows(5, 3, &[vec![2, 0], vec![0, 2]]);
        let classes = coinvariant_classes(&d, &e).unwrap();
        assert_eq!(classes[0].jordan, 1);
    }

    #[test]
    fn congruent_but_distinct_roots_need_more_precision() {
        let a = PkMatrix::from_i64_rows(5, 3, &[vec![1, 0], vec![0, 6]]);
        let e = PkMatrix::identity(5, 3, 2);
        let err = coinvariant_classes(&a, &e).unwrap_err();
        assert!(matches!(err, CoreError::RaisePrecision(_)));
    }

    #[test]
    fn irreducible_unit_factor_is_rejected() {
        // x^2 + x + 1 is irreducible over F_5; companion matrix.
        let a = PkMatrix::from_i64_rows(5, 3, &[vec![0, -1], vec![1, -1]]);
        let e = PkMatrix::identity(5, 3, 2);
        let err = coinvariant_classes(&a, &e).unwrap_err();
        assert!(matches!(err, CoreError::Unsupported(_)));
    }

    #[test]
    fn stabilize_toy_weight_two() {
        // a_5 = 6, weight 2: x^2 - 6x + 5 = (x-1)(x-5), alpha = 1 exactly.
        let mut coeffs = vec![BigInt::one(); 100];
        let a5j = |j: u32| -> BigInt {
            // a_{5^j} from the recurrence with a_5 = 6, c = 5.
            let (mut prev2, mut prev) = (BigInt::one(), BigInt::from(6));
            for _ in 1..j {
                let next = BigInt::from(6) * &prev - BigInt::from(5) * &prev2;
                prev2 = std::mem::replace(&mut prev, next);
            }
            if j == 0 {
                BigInt::one()
            } else {
                prev
            }
        };
        for (i, c) in coeffs.iter_mut().enumerate() {
            let mut n = i + 1;
            let mut j = 0u32;
            while n % 5 == 0 {
                n /= 5;
                j += 1;
            }
            *c = a5j(j);
        }
        let f = NewformData::new(1, 2, 1, vec![(1, BigInt::one())], coeffs, true, false)
            .unwrap();
        let st = stabilize(&f, 5, 4, 100, RootChoice::Unit).unwrap();
        assert!(st.ordinary);
        assert!(st.eigenvalue.is_one());
    }

    #[test]
    fn stabilize_cm_branches_and_vieta() {
        let f = NewformData::cm32(300);
        let a = stabilize(&f, 5, 4, 300, RootChoice::Unit).unwrap();
        let b = stabilize(&f, 5, 4, 300, RootChoice::NonUnit).unwrap();
        assert!(a.ordinary && b.ordinary);
        // Vieta: product of the eigenvalues is chi(5) 5^{w-1} = 5.
        let prod = a.eigenvalue.mul(&b.eigenvalue);
        assert!(prod.sub(&Scalar::from_i64(5, 4, 5)).is_zero());
        // alpha = 3 mod 5.
        assert_eq!(
            a.eigenvalue.as_plain().unwrap().residue() % 5u64,
            BigUint::from(3u64)
        );
        // The beta-stabilization gains a factor p per level of p | n.
        for n in 1..=60usize {
            let v = b.expansion.coeff(n).valuation();
            let mut expect = 0u32;
            let mut m = n;
            while m % 5 == 0 {
                m /= 5;
                expect += 1;
            }
            assert!(v >= expect.min(4), "index {n}");
        }
    }

    #[test]
    fn stabilize_non_ordinary_paths() {
        let f = NewformData::cm32(100);
        // a_3 = 0: unit choice refuses.
        let err = stabilize(&f, 3, 1, 100, RootChoice::Unit).unwrap_err();
        assert!(matches!(err, CoreError::NonOrdinary(_)));
        // Either at k = 1 finds the double root 0 and flags non-ordinary.
        let st = stabilize(&f, 3, 1, 100, RootChoice::Either).unwrap();
        assert!(!st.ordinary);
        assert!(st.eigenvalue.is_zero());
    }

    #[test]
    fn delta_tau_frozen_value_used_here() {
        // Guard the frozen constants above against the generator.
        let tau = tau_coeffs(11);
        assert_eq!(tau[10], BigInt::from(534612));
        assert_eq!(BigInt::from(534612) % BigInt::from(161051), BigInt::from(51459));
    }
}
