//! Seeded random generators for the verification suites.
//!
//! Everything here is a pure function of the RNG state, so a suite run is
//! reproducible from its seed alone. The generators produce well-formed
//! values by construction (units where units are required, valuation
//! bookkeeping satisfied, irreducible parameter records), never by
//! rejection against downstream validators, with one documented exception
//! in [`rand_params`].

use num_bigint::{BigInt, BigUint};
use rand::Rng;

use crate::charfn::{CharTail, SmoothChar};
use crate::howell::PkMatrix;
use crate::kirillov::KirillovFn;
use crate::locfn::{domain_residues, Domain, LocConstFn};
use crate::qexp::QExpansion;
use crate::scalar::{PValue, Scalar};
use crate::smoothrep::{classify, LocalParams, ReprKind};

/// Uniform residue mod `p^k`, built digit by digit so large moduli never
/// overflow.
pub fn rand_residue(rng: &mut impl Rng, p: u64, k: u32) -> BigUint {
    let mut x = BigUint::from(0u32);
    for _ in 0..k {
        x = x * p + rng.gen_range(0..p);
    }
    x
}

/// Uniform plain scalar mod `p^k`.
pub fn rand_scalar(rng: &mut impl Rng, p: u64, k: u32) -> Scalar {
    Scalar::from_int(p, k, &BigInt::from(rand_residue(rng, p, k)))
}

/// Uniform unit mod `p^k` (the bottom digit is forced away from 0).
pub fn rand_unit(rng: &mut impl Rng, p: u64, k: u32) -> Scalar {
    let x = rand_residue(rng, p, k.saturating_sub(1)) * p + rng.gen_range(1..p);
    Scalar::from_int(p, k, &BigInt::from(x))
}

/// Cuspidal expansion with uniform plain coefficients `a_1..a_n`.
pub fn rand_expansion(rng: &mut impl Rng, p: u64, k: u32, n: usize) -> QExpansion {
    QExpansion::new(p, k, (0..n).map(|_| rand_scalar(rng, p, k)).collect())
}

/// Locally constant function with a uniform table at level `m`.
pub fn rand_locfn(
    rng: &mut impl Rng,
    p: u64,
    k: u32,
    m: u32,
    domain: Domain,
) -> LocConstFn {
    let table = domain_residues(p, m, domain)
        .iter()
        .map(|_| rand_scalar(rng, p, k))
        .collect();
    LocConstFn::new(p, k, m, domain, table)
}

/// Smooth character of conductor exponent `m` with a uniform unit value
/// of the given valuation at `p`. Ramified draws need odd `p`.
pub fn rand_char(rng: &mut impl Rng, p: u64, k: u32, m: u32, v_at_p: i64) -> SmoothChar {
    let value = PValue::new(v_at_p, rand_unit(rng, p, k));
    if m == 0 {
        SmoothChar::unramified(p, k, value)
    } else {
        let s = rng.gen_range(0..p - 1);
        let t = rng.gen_range(0..p.pow(m - 1));
        SmoothChar::from_exponents(p, k, m, s, t, value)
            .expect("exponent data always yields a character")
    }
}

/// Uniform matrix over `Z/p^k`.
pub fn rand_matrix(rng: &mut impl Rng, p: u64, k: u32, rows: usize, cols: usize) -> PkMatrix {
    let mut m = PkMatrix::zero(p, k, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rand_residue(rng, p, k));
        }
    }
    m
}

/// Compactly supported Kirillov-side function: 1 to 3 random shells at a
/// random starting valuation in `[-2, 1]`, levels up to 2, no germ.
pub fn rand_compact_kirillov(rng: &mut impl Rng, p: u64, k: u32) -> KirillovFn {
    let min_v = rng.gen_range(-2..=1);
    let len = rng.gen_range(1..=3);
    let shells = (0..len)
        .map(|_| {
            let m = rng.gen_range(0..=2);
            rand_locfn(rng, p, k, m, Domain::ZpUnits)
        })
        .collect();
    KirillovFn::from_shells(p, k, min_v, shells)
}

/// Kirillov-side function that may carry a germ: a compact part plus, with
/// probability about a half, one random character tail with valuation
/// degree up to 1. Needs odd `p` when the drawn tail is ramified.
pub fn rand_kirillov(rng: &mut impl Rng, p: u64, k: u32) -> KirillovFn {
    let compact = rand_compact_kirillov(rng, p, k);
    if rng.gen_bool(0.5) {
        return compact;
    }
    let (m, v) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
    let chi = rand_char(rng, p, k, m, v);
    let a = rng.gen_range(0..=1);
    let tail = CharTail::new(chi, a, 0, rand_unit(rng, p, k));
    compact
        .add(&KirillovFn::from_tails(p, k, vec![tail]))
        .expect("same ambient parameters")
}

/// Well-formed irreducible parameter record of the requested kind at the
/// given weight, with the valuation bookkeeping satisfied by construction.
///
/// Principal-series draws place a random valuation split across the two
/// characters and re-roll (the one rejection loop in this module) in the
/// measure-zero event that the drawn pair lands on a reducible ratio.
/// Special records need an even weight. Ramified draws need odd `p`.
pub fn rand_params(
    rng: &mut impl Rng,
    p: u64,
    k: u32,
    kind: ReprKind,
    weight: u32,
) -> LocalParams {
    assert!(weight >= 2, "weights below 2 are rejected by construction");
    match kind {
        ReprKind::PrincipalSeries => loop {
            let v1 = rng.gen_range(0..i64::from(weight));
            let v2 = i64::from(weight) - 1 - v1;
            let (m1, m2) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
            let alpha = rand_char(rng, p, k, m1, v1);
            let beta = rand_char(rng, p, k, m2, v2);
            let params = LocalParams::principal_series(alpha, beta, Some(weight))
                .expect("valuation split sums to weight - 1");
            if classify(&params).irreducible {
                return params;
            }
        },
        ReprKind::Special => {
            assert!(weight.is_multiple_of(2), "special records need an even weight");
            let m = rng.gen_range(0..=1);
            let chi = rand_char(rng, p, k, m, i64::from(weight / 2) - 1);
            LocalParams::special(chi, Some(weight)).expect("valuation fixed by weight")
        }
        ReprKind::Supercuspidal => {
            LocalParams::supercuspidal(p, k, Some(weight)).expect("prime and precision hold")
        }
        ReprKind::OneDimensional => {
            let (m, v) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
            let chi = rand_char(rng, p, k, m, v);
            LocalParams::one_dimensional(chi, Some(weight)).expect("weight already checked")
        }
    }
}
