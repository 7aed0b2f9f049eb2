//! Matrices over `Z/p^k` and Howell normal form.
//!
//! `Z/p^k` is not a field: row spans are modules, kernels can contain
//! torsion generators invisible to plain Gaussian elimination, and two
//! generating sets are equal iff their Howell forms agree literally.
//! Pivoting is by minimal valuation, pivots are normalized to exact powers
//! `p^e`, and each placed row contributes its annihilator multiple
//! `p^{k-e} * row` back into the worklist so the span is closed under
//! "later-supported" elements.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::padic::{int_valuation, pk_modulus};

/// A dense matrix over `Z/p^k`, entries reduced, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkMatrix {
    p: u64,
    k: u32,
    rows: usize,
    cols: usize,
    entries: Vec<BigUint>,
}

fn reduce(n: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from(modulus.clone());
    let mut r = n % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_biguint().expect("reduced representative is nonnegative")
}

/// Inverse of a unit mod `p^k` by extended gcd.
fn inv_mod(u: &BigUint, modulus: &BigUint) -> BigUint {
    let e = BigInt::from(u.clone()).extended_gcd(&BigInt::from(modulus.clone()));
    assert!(e.gcd.is_one(), "inverse of a non-unit");
    reduce(&e.x, modulus)
}

impl PkMatrix {
    pub fn zero(p: u64, k: u32, rows: usize, cols: usize) -> Self {
        PkMatrix { p, k, rows, cols, entries: vec![BigUint::zero(); rows * cols] }
    }

    pub fn identity(p: u64, k: u32, n: usize) -> Self {
        let mut m = Self::zero(p, k, n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigUint::one();
        }
        m
    }

    pub fn from_int_rows(p: u64, k: u32, rows: &[Vec<BigInt>]) -> Self {
        let modulus = pk_modulus(p, k);
        let cols = rows.first().map_or(0, Vec::len);
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().map(|n| reduce(n, &modulus))
            })
            .collect();
        PkMatrix { p, k, rows: rows.len(), cols, entries }
    }

    pub fn from_i64_rows(p: u64, k: u32, rows: &[Vec<i64>]) -> Self {
        let lifted: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&n| BigInt::from(n)).collect())
            .collect();
        Self::from_int_rows(p, k, &lifted)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> BigUint {
        pk_modulus(self.p, self.k)
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigUint) {
        debug_assert!(v < self.modulus(), "entry not reduced");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigUint] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.p, self.k, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.entry(i, j).clone();
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b, m| (a + b) % m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b, m| (a + (m - b)) % m)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&BigUint, &BigUint, &BigUint) -> BigUint,
    ) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        assert_eq!((self.p, self.k), (other.p, other.k));
        let m = self.modulus();
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b, &m))
            .collect();
        PkMatrix { entries, ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert_eq!((self.p, self.k), (other.p, other.k));
        let m = self.modulus();
        let mut out = Self::zero(self.p, self.k, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.entry(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = &out.entries[i * other.cols + j] + a * other.entry(l, j);
                    out.entries[i * other.cols + j] = cur % &m;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> Self {
        assert_eq!(self.rows, self.cols, "powering needs a square matrix");
        let mut acc = Self::identity(self.p, self.k, self.rows);
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

    pub fn scalar_mul(&self, c: &BigUint) -> Self {
        let m = self.modulus();
        let entries = self.entries.iter().map(|a| a * c % &m).collect();
        PkMatrix { entries, ..self.clone() }
    }

    pub fn reduce_to(&self, k2: u32) -> Self {
        assert!(k2 <= self.k, "cannot gain precision");
        let m = pk_modulus(self.p, k2);
        PkMatrix {
            p: self.p,
            k: k2,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a % &m).collect(),
        }
    }

    /// Glue `other` to the right of `self`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        assert_eq!((self.p, self.k), (other.p, other.k));
        let cols = self.cols + other.cols;
        let mut out = Self::zero(self.p, self.k, self.rows, cols);
        for i in 0..self.rows {
            out.entries[i * cols..i * cols + self.cols]
                .clone_from_slice(self.row(i));
            out.entries[i * cols + self.cols..(i + 1) * cols]
                .clone_from_slice(other.row(i));
        }
        out
    }

    /// Column block `[lo, hi)` of every row.
    pub fn col_block(&self, lo: usize, hi: usize) -> Self {
        assert!(lo <= hi && hi <= self.cols);
        let mut out = Self::zero(self.p, self.k, self.rows, hi - lo);
        for i in 0..self.rows {
            out.entries[i * (hi - lo)..(i + 1) * (hi - lo)]
                .clone_from_slice(&self.row(i)[lo..hi]);
        }
        out
    }
}

fn val(x: &BigUint, p: u64, k: u32) -> u32 {
    match int_valuation(p, &BigInt::from(x.clone())) {
        None => k,
        Some(v) => (v as u32).min(k),
    }
}

fn row_scale(row: &mut [BigUint], c: &BigUint, m: &BigUint) {
    for x in row.iter_mut() {
        *x = &*x * c % m;
    }
}

/// `dst -= c * src` mod m.
fn row_submul(dst: &mut [BigUint], src: &[BigUint], c: &BigUint, m: &BigUint) {
    for (d, s) in dst.iter_mut().zip(src) {
        let sub = c * s % m;
        *d = (&*d + (m - sub)) % m;
    }
}

/// Howell normal form of the row span.
///
/// Output rows have strictly increasing pivot columns, each pivot is an
/// exact power `p^e`, entries above a pivot are reduced mod that power,
/// and every span element supported past column `j` is a combination of
/// the output rows supported past `j`. Two row spans are equal iff their
/// Howell forms are identical.
pub fn howell_form(mat: &PkMatrix) -> PkMatrix {
    let (p, k) = (mat.p, mat.k);
    let m = mat.modulus();
    let cols = mat.cols;
    let mut work: Vec<Vec<BigUint>> =
        (0..mat.rows).map(|i| mat.row(i).to_vec()).collect();
    let mut placed: Vec<Vec<BigUint>> = Vec::new();

    for c in 0..cols {
        // Rows in `work` are zero before column c by induction.
        let best = work
            .iter()
            .enumerate()
            .filter(|(_, r)| !r[c].is_zero())
            .min_by_key(|(_, r)| val(&r[c], p, k))
            .map(|(i, _)| i);
        let Some(i) = best else { continue };
        let mut pivot = work.swap_remove(i);
        let e = val(&pivot[c], p, k);
        // Normalize the pivot entry to exactly p^e.
        let unit = &pivot[c] / pk_modulus(p, e);
        row_scale(&mut pivot, &inv_mod(&unit, &m), &m);
        debug_assert_eq!(pivot[c], pk_modulus(p, e), "pivot normalized");
        for r in work.iter_mut() {
            if !r[c].is_zero() {
                debug_assert!(val(&r[c], p, k) >= e, "pivot had minimal valuation");
                let q = &r[c] / pk_modulus(p, e);
                row_submul(r, &pivot, &q, &m);
            }
        }
        // Annihilator closure: p^{k-e} * pivot re-enters with support > c.
        if e > 0 {
            let mut ann = pivot.clone();
            row_scale(&mut ann, &pk_modulus(p, k - e), &m);
            if ann.iter().any(|x| !x.is_zero()) {
                work.push(ann);
            }
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
        placed.push(pivot);
    }

    // Reduce entries above each pivot mod the pivot power.
    for j in 0..placed.len() {
        let (c, e) = pivot_of(&placed[j], p, k).expect("placed rows are nonzero");
        let pe = pk_modulus(p, e);
        for i in 0..j {
            let q = &placed[i][c] / &pe;
            if !q.is_zero() {
                let src = placed[j].clone();
                row_submul(&mut placed[i], &src, &q, &m);
            }
        }
    }

    let rows = placed.len();
    PkMatrix { p, k, rows, cols, entries: placed.into_iter().flatten().collect() }
}

/// Pivot column and valuation of a nonzero reduced row.
fn pivot_of(row: &[BigUint], p: u64, k: u32) -> Option<(usize, u32)> {
    row.iter()
        .position(|x| !x.is_zero())
        .map(|c| (c, val(&row[c], p, k)))
}

/// Row-span equality via canonical forms.
pub fn row_module_eq(a: &PkMatrix, b: &PkMatrix) -> bool {
    howell_form(a) == howell_form(b)
}

/// Rank of the reduction mod p (the free-rank certificate: d rows are
/// independent over `Z/p^k` iff their mod-p reduction has rank d).
pub fn rank_mod_p(mat: &PkMatrix) -> usize {
    let p = BigUint::from(mat.p);
    let mut work: Vec<Vec<BigUint>> = (0..mat.rows)
        .map(|i| mat.row(i).iter().map(|x| x % &p).collect())
        .collect();
    let mut rank = 0;
    for c in 0..mat.cols {
        let Some(i) = (rank..work.len()).find(|&i| !work[i][c].is_zero()) else {
            continue;
        };
        work.swap(rank, i);
        let inv = inv_mod(&work[rank][c].clone(), &p);
        row_scale(&mut work[rank], &inv, &p);
        for i in 0..work.len() {
            if i != rank && !work[i][c].is_zero() {
                let q = work[i][c].clone();
                let src = work[rank].clone();
                row_submul(&mut work[i], &src, &q, &p);
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}

/// Reduce `v` against a Howell form; returns the (unique) residue with no
/// component reducible by any pivot. Zero residue means membership.
fn reduce_against(h: &PkMatrix, v: &[BigUint]) -> Vec<BigUint> {
    let m = h.modulus();
    let mut r = v.to_vec();
    for i in 0..h.rows {
        let (c, e) = pivot_of(h.row(i), h.p, h.k).expect("howell rows nonzero");
        if r[c].is_zero() {
            continue;
        }
        if val(&r[c], h.p, h.k) >= e {
            let q = &r[c] / pk_modulus(h.p, e);
            row_submul(&mut r, h.row(i), &q, &m);
        }
    }
    r
}

/// Membership of `v` in the row span of `h` (any generating set).
pub fn row_module_contains(h: &PkMatrix, v: &[BigUint]) -> bool {
    let hf = howell_form(h);
    reduce_against(&hf, v).iter().all(Zero::is_zero)
}

/// Solve `x A = b` over `Z/p^k`; on failure, hand back the irreducible
/// residual of `b` against the row span.
///
/// Works on the Howell form of `[A | I]`: reducing `(b | 0)` against it
/// drives the left block to zero exactly when `b` is in the row span, and
/// the right block then carries `-x`.
pub fn solve_left_or_residue(
    a: &PkMatrix,
    b: &[BigUint],
) -> Result<Vec<BigUint>, Vec<BigUint>> {
    assert_eq!(b.len(), a.cols);
    let m = a.modulus();
    let aug = a.hcat(&PkMatrix::identity(a.p, a.k, a.rows));
    let h = howell_form(&aug);
    let mut r: Vec<BigUint> = b.to_vec();
    r.extend(vec![BigUint::zero(); a.rows]);
    // Only pivots inside the left block may be used for reduction.
    for i in 0..h.rows {
        let (c, e) = pivot_of(h.row(i), h.p, h.k).expect("howell rows nonzero");
        if c >= a.cols {
            break;
        }
        if !r[c].is_zero() && val(&r[c], h.p, h.k) >= e {
            let q = &r[c] / pk_modulus(h.p, e);
            row_submul(&mut r, h.row(i), &q, &m);
        }
    }
    if r[..a.cols].iter().any(|x| !x.is_zero()) {
        return Err(r[..a.cols].to_vec());
    }
    // (b|0) - (xA|x) = (0|r) so x = -r on the right block.
    Ok(r[a.cols..].iter().map(|x| (&m - x) % &m).collect())
}

/// Solve `x A = b` over `Z/p^k`, returning one solution row if any.
pub fn solve_left(a: &PkMatrix, b: &[BigUint]) -> Option<Vec<BigUint>> {
    solve_left_or_residue(a, b).ok()
}

/// Left kernel `{x : x A = 0}` as a Howell-canonical matrix (possibly
/// zero rows x cols when the kernel is trivial).
///
/// Rows of the Howell form of `[A | I]` whose left block vanishes have
/// right blocks generating the kernel; the Howell closure property makes
/// that generating set complete.
pub fn left_kernel(a: &PkMatrix) -> PkMatrix {
    let aug = a.hcat(&PkMatrix::identity(a.p, a.k, a.rows));
    let h = howell_form(&aug);
    let mut rows: Vec<Vec<BigUint>> = Vec::new();
    for i in 0..h.rows {
        if h.row(i)[..a.cols].iter().all(Zero::is_zero) {
            rows.push(h.row(i)[a.cols..].to_vec());
        }
    }
    let kernel = PkMatrix {
        p: a.p,
        k: a.k,
        rows: rows.len(),
        cols: a.rows,
        entries: rows.into_iter().flatten().collect(),
    };
    howell_form(&kernel)
}

/// Right kernel `{x : A x = 0}`, rows of the result are the generators.
pub fn right_kernel(a: &PkMatrix) -> PkMatrix {
    left_kernel(&a.transpose())
}

/// Characteristic polynomial of a square matrix mod `p^k`, lowest degree
/// first, leading coefficient 1.
///
/// Computed by the Faddeev-LeVerrier recurrence on exact integer lifts;
/// every division is exact over Z, so the reduction is faithful.
pub fn charpoly(a: &PkMatrix) -> Vec<BigUint> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let lift: Vec<Vec<BigInt>> = (0..n)
        .map(|i| a.row(i).iter().map(|x| BigInt::from(x.clone())).collect())
        .collect();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    // M_0 = A, c_{n-i} = -tr(M_{i-1})/i, M_i = A (M_{i-1} + c_{n-i} I).
    let mut m = lift.clone();
    for i in 1..=n {
        let tr: BigInt = (0..n).map(|j| m[j][j].clone()).sum();
        let (c, rem) = (-tr).div_rem(&BigInt::from(i));
        debug_assert!(rem.is_zero(), "Faddeev-LeVerrier division is exact");
        coeffs[n - i] = c.clone();
        if i == n {
            break;
        }
        for (j, row) in m.iter_mut().enumerate() {
            row[j] += &c;
        }
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for r in 0..n {
            for l in 0..n {
                if lift[r][l].is_zero() {
                    continue;
                }
                for s in 0..n {
                    let add = &lift[r][l] * &m[l][s];
                    next[r][s] += add;
                }
            }
        }
        m = next;
    }
    let modulus = a.modulus();
    coeffs.iter().map(|c| reduce(c, &modulus)).collect()
}

/// Evaluate a polynomial (lowest degree first) at `x` mod `p^k`.
pub fn poly_eval(coeffs: &[BigUint], x: &BigUint, modulus: &BigUint) -> BigUint {
    let mut acc = BigUint::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c) % modulus;
    }
    acc
}
