//! Identity check suites behind `verify`.
//!
//! Each suite runs a fixed batch of checks and reports one line per
//! anchor name. Randomized batches draw from a ChaCha stream seeded per
//! suite from the configured seed, so `--suite all` produces exactly the
//! per-suite reports concatenated, and two runs with the same flags are
//! byte-identical.

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_forms::charfn::{CharTail, SmoothChar};
use padic_forms::howell::PkMatrix;
use padic_forms::kirillov::{fn_mul_action, kir_up, KirillovFn};
use padic_forms::locfn::{mahler_coeffs, mahler_interpolate, Domain, LocConstFn};
use padic_forms::newform::NewformData;
use padic_forms::ordinary::{
    coinvariant_classes, kernel_check, ordinary_projector, projector_rank, stabilize,
    HeckeLattice, RootChoice,
};
use padic_forms::padic::{hensel_unit_root, int_valuation, PadicApprox};
use padic_forms::qexp::{
    dilate, eta_delta, hecke_u, is_prime, theta, twist, verify_double_coset, CircleOrbit,
    KirTotal, QExpansion,
};
use padic_forms::sampling::{
    rand_char, rand_compact_kirillov, rand_expansion, rand_kirillov, rand_locfn, rand_matrix,
    rand_params, rand_unit,
};
use padic_forms::scalar::{PValue, Scalar};
use padic_forms::smoothrep::{
    classify, completion_basis, jacquet, predict_w, LocalParams, ReprKind, Splitness,
};
use padic_forms::CoreError;

use crate::report::{run_check, tool_version, CheckResult, VerifyReport};
use crate::CliError;

/// Validated run configuration shared by all suites.
#[derive(Clone, Copy, Debug)]
pub struct JobConfig {
    pub p: u64,
    pub k: u32,
    /// Coefficient window for the q-expansion checks.
    pub n: usize,
    pub seed: u64,
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !is_prime(self.p) {
            return Err(CliError::Config(format!("p = {} is not prime", self.p)));
        }
        if self.k < 1 {
            return Err(CliError::Config("precision k must be at least 1".into()));
        }
        if self.n < self.p as usize {
            return Err(CliError::Config(format!(
                "window N = {} is smaller than p = {}",
                self.n, self.p
            )));
        }
        Ok(())
    }
}

pub const SUITE_NAMES: [&str; 5] = ["fourier", "kirillov", "ordinary", "doublecoset", "local"];

/// Runs one named suite (or `all`) and assembles the report.
pub fn run_suite(suite: &str, cfg: &JobConfig) -> Result<VerifyReport, CliError> {
    cfg.validate()?;
    let checks = match suite {
        "fourier" => fourier_suite(cfg),
        "kirillov" => kirillov_suite(cfg),
        "ordinary" => ordinary_suite(cfg),
        "doublecoset" => doublecoset_suite(cfg),
        "local" => local_suite(cfg),
        "all" => {
            let mut all = Vec::new();
            all.extend(fourier_suite(cfg));
            all.extend(kirillov_suite(cfg));
            all.extend(ordinary_suite(cfg));
            all.extend(doublecoset_suite(cfg));
            all.extend(local_suite(cfg));
            all
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown suite {other:?}; expected one of fourier, kirillov, ordinary, \
                 doublecoset, local, all"
            )))
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        command: "verify".into(),
        tool_version: tool_version(),
        suite: suite.into(),
        p: cfg.p,
        k: cfg.k,
        trunc: cfg.n,
        seed: cfg.seed,
        checks,
        warnings: Vec::new(),
        passed,
    })
}

// ---------------------------------------------------------------------
// fourier: circle-average versus indicator-twist, Mahler transform.
// ---------------------------------------------------------------------

/// One duality window: averaging the `p^m` circle rotations of `f`
/// against the character at `a` must equal twisting `f` by the indicator
/// of `a + p^m Z_p`, exactly at precision `k - m`.
fn duality_window(f: &QExpansion, m: u32, a: u64) -> Result<bool, CoreError> {
    let (p, k, n) = (f.p(), f.k(), f.trunc());
    let orbit = CircleOrbit::new(f, m);
    let lhs = orbit.average(a as i64)?;
    let rhs = twist(f, &LocConstFn::indicator(p, k, a, m));
    Ok(lhs.eq_window(&rhs, n, k - m))
}

pub fn fourier_suite(cfg: &JobConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    checks.push(run_check(
        "fourier.duality.delta",
        "p in {3,5}, m in {1,2}, 200 coefficients, exact at k-m".into(),
        || -> Result<(bool, String), CoreError> {
            let mut windows = 0usize;
            for &p in &[3u64, 5] {
                for m in 1..=2u32 {
                    let k = cfg.k.min(5).max(m + 1);
                    let f = eta_delta(p, k, 200);
                    let orbit = CircleOrbit::new(&f, m);
                    for a in 0..p.pow(m) {
                        let lhs = orbit.average(a as i64)?;
                        let rhs = twist(&f, &LocConstFn::indicator(p, k, a, m));
                        if !lhs.eq_window(&rhs, 200, k - m) {
                            return Ok((false, format!("mismatch at p={p} m={m} a={a}")));
                        }
                        windows += 1;
                    }
                }
            }
            Ok((true, format!("{windows} residue windows matched")))
        },
    ));

    checks.push(run_check(
        "fourier.duality.random",
        "50 random expansions, one residue window each".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..50 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let m = rng.gen_range(1..=2u32);
                let k = cfg.k.min(5).max(m + 1);
                let f = rand_expansion(&mut rng, p, k, 120);
                let a = rng.gen_range(0..p.pow(m));
                if !duality_window(&f, m, a)? {
                    return Ok((false, format!("draw {i}: mismatch at p={p} m={m} a={a}")));
                }
            }
            Ok((true, "50 random windows matched".into()))
        },
    ));

    checks.push(run_check(
        "fourier.mahler.roundtrip",
        "500 random step functions: interpolation round-trip and isometry".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..500 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let m = rng.gen_range(0..=2u32);
                let k = rng.gen_range(1..=cfg.k.clamp(1, 4));
                let f = rand_locfn(&mut rng, p, k, m, Domain::Zp);
                let pm = p.pow(m) as usize;
                let coeffs = mahler_coeffs(&f, pm);
                let back = mahler_interpolate(p, k, m, &coeffs);
                if !back.func_eq(&f) {
                    return Ok((false, format!("draw {i}: round-trip failed (p={p} m={m})")));
                }
                let cmin = coeffs.iter().map(|c| c.valuation()).min().expect("pm >= 1");
                if f.min_valuation() != cmin {
                    return Ok((false, format!("draw {i}: sup-norm mismatch (p={p} m={m})")));
                }
            }
            Ok((true, "500 functions round-tripped; sup-norms matched".into()))
        },
    ));

    checks
}

// ---------------------------------------------------------------------
// kirillov: shell shift, theta multiplier, pointwise action, Jordan index.
// ---------------------------------------------------------------------

pub fn kirillov_suite(cfg: &JobConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    checks.push(run_check(
        "kirillov.up.shells",
        "100 random expansions: coefficient shells shift down one step".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..100 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let k = cfg.k.min(5);
                let f = rand_expansion(&mut rng, p, k, 150);
                let uf = hecke_u(p, &f)?;
                let (kt_f, kt_uf) = (KirTotal::new(&f), KirTotal::new(&uf));
                for v in 0..4u32 {
                    let pv = p.pow(v);
                    for u in (1..=kt_uf.trunc() as u64 / pv.max(1)).filter(|u| u % p != 0) {
                        if let (Some(a), Some(b)) = (kt_uf.at_shell(v, u), kt_f.at_shell(v + 1, u))
                        {
                            if !a.sub(b).is_zero() {
                                return Ok((false, format!("draw {i}: p={p} v={v} u={u}")));
                            }
                        }
                    }
                }
            }
            Ok((true, "all populated shells shifted correctly".into()))
        },
    ));

    checks.push(run_check(
        "kirillov.up.functions",
        "100 random shell functions: (Ug)(x) = g(px) pointwise".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..100 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let k = rng.gen_range(1..=cfg.k.clamp(1, 4));
                let g = rand_kirillov(&mut rng, p, k);
                let h = kir_up(&g)?;
                let pk = p.pow(k);
                for v in -1..=(h.v_cut() + 3) {
                    for _ in 0..4 {
                        let u = loop {
                            let u = rng.gen_range(1..pk);
                            if u % p != 0 {
                                break u;
                            }
                        };
                        let lhs = h.eval_u64(v, u)?;
                        let rhs = if v < 0 {
                            Scalar::zero(p, k)
                        } else {
                            g.eval_u64(v + 1, u)?
                        };
                        if !lhs.sub(&rhs).is_zero() {
                            return Ok((false, format!("draw {i}: p={p} v={v} u={u}")));
                        }
                    }
                }
            }
            Ok((true, "shift identity held at every sampled point".into()))
        },
    ));

    checks.push(run_check(
        "kirillov.theta.multiplier",
        "100 random expansions: theta multiplies shell n by n".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..100 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let k = cfg.k.min(5);
                let f = rand_expansion(&mut rng, p, k, 120);
                let (kt_f, kt_tf) = (KirTotal::new(&f), KirTotal::new(&theta(&f)));
                for n in 1..=120u64 {
                    let lhs = kt_tf.at_index(n).expect("inside window");
                    let rhs = kt_f
                        .at_index(n)
                        .expect("inside window")
                        .mul(&Scalar::from_i64(p, k, n as i64));
                    if !lhs.sub(&rhs).is_zero() {
                        return Ok((false, format!("draw {i}: p={p} n={n}")));
                    }
                }
            }
            Ok((true, "theta acted as the index multiplier everywhere".into()))
        },
    ));

    checks.push(run_check(
        "kirillov.mul.pointwise",
        "100 random pairs: multiplication by a step function on Z_p".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..100 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let k = rng.gen_range(1..=cfg.k.clamp(1, 4));
                let g = rand_compact_kirillov(&mut rng, p, k);
                let m = rng.gen_range(0..=2u32);
                let f = rand_locfn(&mut rng, p, k, m, Domain::Zp);
                let h = fn_mul_action(&f, &g)?;
                let pk = p.pow(k);
                for v in (g.min_v() - 1)..=(h.v_cut().max(g.v_cut()) + 2) {
                    for _ in 0..3 {
                        let u = loop {
                            let u = rng.gen_range(1..pk);
                            if u % p != 0 {
                                break u;
                            }
                        };
                        let lhs = h.eval_u64(v, u)?;
                        let rhs = if v < 0 {
                            Scalar::zero(p, k)
                        } else {
                            let x = BigInt::from(p).pow(v as u32) * BigInt::from(u);
                            f.eval(&x).mul(&g.eval_u64(v, u)?)
                        };
                        if !lhs.sub(&rhs).is_zero() {
                            return Ok((false, format!("draw {i}: p={p} v={v} u={u}")));
                        }
                    }
                }
            }
            Ok((true, "action matched pointwise, off-support killed".into()))
        },
    ));

    checks.push(run_check(
        "kirillov.jordan.index",
        "50 random character tails: (U - chi(p)) nilpotency index is a+1".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..50 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let a = rng.gen_range(0..=3u32);
                // (U - chi(p))^a leaves a! * chi(p)^a * coeff on the degree-0
                // tail, so "not yet zero" needs v_p(a!) < k.
                let vfact = (1..=a as u64).map(|j| int_valuation(p, &BigInt::from(j)).unwrap_or(0)).sum::<u64>() as u32;
                let lo = vfact + 1;
                let k = rng.gen_range(lo..=cfg.k.min(4).max(lo));
                let m = rng.gen_range(0..=1u32);
                let chi = rand_char(&mut rng, p, k, m, 0);
                let coeff = rand_unit(&mut rng, p, k);
                let g = KirillovFn::from_tails(p, k, vec![CharTail::new(chi.clone(), a, 0, coeff)]);
                let chi_p = chi.value_at_p().eval_scalar()?;
                let zero = KirillovFn::zero(p, k);
                let mut h = g;
                for _ in 0..a {
                    h = kir_up(&h)?.add(&h.scalar_mul(&chi_p.neg()))?;
                }
                if h.fn_eq(&zero)? {
                    return Ok((false, format!("draw {i}: killed before step a={a} (p={p})")));
                }
                h = kir_up(&h)?.add(&h.scalar_mul(&chi_p.neg()))?;
                if !h.fn_eq(&zero)? {
                    return Ok((false, format!("draw {i}: survived step a+1={} (p={p})", a + 1)));
                }
            }
            Ok((true, "nilpotency index matched the tail degree on all draws".into()))
        },
    ));

    checks
}

// ---------------------------------------------------------------------
// ordinary: projector laws, the two-dimensional desk lattice, stabilization.
// ---------------------------------------------------------------------

/// Everything the desk check extracts from the lattice spanned by
/// `f(q), f(q^p)` for the weight-12 level-1 form.
pub struct DeskReport {
    pub rank: usize,
    /// Expected ordinarity, read off the valuation of the p-th coefficient.
    pub ordinary: bool,
    pub kernel_verdict: bool,
    pub n0: u32,
    /// Unit eigenvalue and its Jordan block size, when the rank is positive.
    pub alpha: Option<BigUint>,
    pub jordan: Option<u32>,
}

/// Builds the `{f(q), f(q^p)}` lattice for the weight-12 level-1 form and
/// runs the projector, kernel, and coinvariant analysis at `(p, k, n)`.
pub fn delta_desk(p: u64, k: u32, n: usize) -> Result<DeskReport, CoreError> {
    let f = eta_delta(p, k, n);
    let fp = dilate(&eta_delta(p, k, n / p as usize + 1), p).truncate(n);
    let lat = HeckeLattice::new(p, k, n, vec![f, fp])?;
    let m = lat.up_matrix()?;
    let e = ordinary_projector(&m)?;
    let rank = projector_rank(&e);
    let tau_p = NewformData::delta(p as usize).a(p as usize).clone();
    let ordinary = int_valuation(p, &tau_p) == Some(0);
    let report = kernel_check(&lat, &e)?;
    let (alpha, jordan) = if rank > 0 {
        let classes = coinvariant_classes(&m, &e)?;
        debug_assert_eq!(classes.len(), 1, "two-dimensional lattice, one unit class");
        (
            classes.first().map(|c| c.alpha.clone()),
            classes.first().map(|c| c.jordan),
        )
    } else {
        (None, None)
    };
    Ok(DeskReport {
        rank,
        ordinary,
        kernel_verdict: report.verdict,
        n0: report.n0,
        alpha,
        jordan,
    })
}

/// The unit root of `x^2 - a_p x + p^11` for the weight-12 form, mod `p^k`.
pub fn delta_unit_root(p: u64, k: u32) -> Result<BigUint, CoreError> {
    let tau_p = NewformData::delta(p as usize).a(p as usize).clone();
    let a = PadicApprox::new(p, k, &tau_p);
    let c = PadicApprox::new(p, k, &BigInt::from(p).pow(11));
    Ok(hensel_unit_root(&a, &c)?.residue().clone())
}

pub fn ordinary_suite(cfg: &JobConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    checks.push(run_check(
        "ordinary.projector.laws",
        "200 random matrices plus diagonal and nilpotent shapes: e^2 = e, eM = Me".into(),
        || -> Result<(bool, String), CoreError> {
            for i in 0..200 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let k = rng.gen_range(1..=cfg.k.clamp(1, 4));
                let d = rng.gen_range(1..=6usize);
                let m = rand_matrix(&mut rng, p, k, d, d);
                let e = ordinary_projector(&m)?;
                if e.mul(&e) != e {
                    return Ok((false, format!("draw {i}: e^2 != e (p={p} dim={d})")));
                }
                if e.mul(&m) != m.mul(&e) {
                    return Ok((false, format!("draw {i}: e does not commute (p={p} dim={d})")));
                }
            }
            let k = cfg.k.clamp(1, 4);
            let diag = diag_matrix(5, k, &[2, 5, 7, 10]);
            let e = ordinary_projector(&diag)?;
            if e != diag_matrix(5, k, &[1, 0, 1, 0]) {
                return Ok((false, "diagonal projector should keep exactly the unit slots".into()));
            }
            let nil = PkMatrix::from_i64_rows(
                3,
                k,
                &[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]],
            );
            let e = ordinary_projector(&nil)?;
            if e != PkMatrix::zero(3, k, 3, 3) {
                return Ok((false, "nilpotent input should project to zero".into()));
            }
            Ok((true, "202 projectors idempotent and central".into()))
        },
    ));

    checks.push(run_check(
        "ordinary.desk.lattice",
        format!("p={}, k={}, N={}: rank, kernel, unit eigenvalue", cfg.p, cfg.k, cfg.n),
        || -> Result<(bool, String), CoreError> {
            let desk = delta_desk(cfg.p, cfg.k, cfg.n)?;
            let want_rank = usize::from(desk.ordinary);
            if desk.rank != want_rank {
                return Ok((false, format!("rank {} but expected {want_rank}", desk.rank)));
            }
            if !desk.kernel_verdict {
                return Ok((false, "kernel_verdict=split: ker(e) differs from the U_p-nilpotent module".into()));
            }
            let mut detail = format!(
                "rank={} kernel_verdict=equal n0={}",
                desk.rank, desk.n0
            );
            if desk.ordinary {
                let expect = delta_unit_root(cfg.p, cfg.k)?;
                if desk.alpha.as_ref() != Some(&expect) {
                    return Ok((false, "unit eigenvalue disagrees with the Hensel root".into()));
                }
                if desk.jordan != Some(1) {
                    return Ok((false, format!("jordan={:?} but expected 1", desk.jordan)));
                }
                detail.push_str(&format!(" alpha={expect} jordan=1"));
            }
            Ok((true, detail))
        },
    ));

    checks.push(run_check(
        "ordinary.stabilize.cm32",
        "weight-2 CM form at p=5: both stabilizations, eigenvalue product 5".into(),
        || -> Result<(bool, String), CoreError> {
            let n = 200usize;
            let f = NewformData::cm32(n);
            let k = cfg.k.clamp(2, 5);
            let unit = stabilize(&f, 5, k, n, RootChoice::Unit)?;
            if !unit.ordinary || unit.eigenvalue.valuation() != 0 {
                return Ok((false, "unit stabilization lost ordinarity".into()));
            }
            if !unit
                .eigenvalue
                .reduce_to(1)
                .sub(&Scalar::from_i64(5, 1, 3))
                .is_zero()
            {
                return Ok((false, "unit eigenvalue is not 3 mod 5".into()));
            }
            let non = stabilize(&f, 5, k, n, RootChoice::NonUnit)?;
            if non.eigenvalue.valuation() != 1 {
                return Ok((false, "complementary eigenvalue should have valuation 1".into()));
            }
            let product = unit.eigenvalue.mul(&non.eigenvalue);
            if !product.sub(&Scalar::from_i64(5, k, 5)).is_zero() {
                return Ok((false, "eigenvalue product should be 5".into()));
            }
            Ok((true, "alpha = 3 mod 5, v(beta) = 1, alpha*beta = 5".into()))
        },
    ));

    checks
}

fn diag_matrix(p: u64, k: u32, entries: &[i64]) -> PkMatrix {
    let d = entries.len();
    let rows: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { entries[i] } else { 0 }).collect())
        .collect();
    PkMatrix::from_i64_rows(p, k, &rows)
}

// ---------------------------------------------------------------------
// doublecoset: the averaged fractional-index identity against U_p.
// ---------------------------------------------------------------------

pub fn doublecoset_suite(cfg: &JobConfig) -> Vec<CheckResult> {
    let mut grid: Vec<(u64, u32, usize)> = [3u64, 5, 7]
        .iter()
        .map(|&p| (p, 4u32, 500usize))
        .collect();
    if !matches!(cfg.p, 3 | 5 | 7) {
        grid.push((cfg.p, cfg.k.clamp(2, 5), cfg.n.min(600)));
    }
    grid.into_iter()
        .map(|(p, k, n)| {
            run_check(
                &format!("doublecoset.delta.p{p}"),
                format!("p={p}, k={k}, N={n}, exact at k-1"),
                || -> Result<(bool, String), CoreError> {
                    let ok = verify_double_coset(&eta_delta(p, k, n))?;
                    Ok((
                        ok,
                        if ok {
                            format!("{n} coefficients matched at precision {}", k - 1)
                        } else {
                            "coefficient mismatch".into()
                        },
                    ))
                },
            )
        })
        .collect()
}

// ---------------------------------------------------------------------
// local: classification, germ dimensions, completion filter, predictor.
// ---------------------------------------------------------------------

fn same_tail(x: &CharTail, y: &CharTail) -> bool {
    x.a == y.a && x.b == y.b && x.chi.sort_key().cmp(&y.chi.sort_key()).is_eq()
}

fn tails_subset(xs: &[CharTail], ys: &[CharTail]) -> bool {
    xs.iter().all(|x| ys.iter().any(|y| same_tail(x, y)))
}

fn unram(p: u64, k: u32, v: i64, unit: i64) -> SmoothChar {
    SmoothChar::unramified(p, k, PValue::new(v, Scalar::from_i64(p, k, unit)))
}

pub fn local_suite(cfg: &JobConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    checks.push(run_check(
        "local.jacquet.dims",
        "200 random records per kind: germ dimensions 2, 1, 0".into(),
        || -> Result<(bool, String), CoreError> {
            let table = [
                (ReprKind::PrincipalSeries, 2u32),
                (ReprKind::Special, 1),
                (ReprKind::Supercuspidal, 0),
            ];
            for (kind, want) in table {
                for i in 0..200 {
                    let p = [3u64, 5][rng.gen_range(0..2)];
                    let k = rng.gen_range(1..=cfg.k.clamp(1, 4));
                    let weight = match kind {
                        ReprKind::Special => 2 * rng.gen_range(1..=6u32),
                        _ => rng.gen_range(2..=12u32),
                    };
                    let params = rand_params(&mut rng, p, k, kind, weight);
                    let c = classify(&params);
                    if c.kind != kind || !c.irreducible {
                        return Ok((false, format!("draw {i}: misclassified {kind:?}")));
                    }
                    let j = jacquet(&params)?;
                    if j.dim() != want {
                        return Ok((false, format!("draw {i}: {kind:?} gave dim {}", j.dim())));
                    }
                }
            }
            let chi = rand_char(&mut rng, 3, 2, 0, 0);
            let od = LocalParams::one_dimensional(chi, Some(2))?;
            if jacquet(&od).is_ok() {
                return Ok((false, "one-dimensional records must refuse the model".into()));
            }
            Ok((true, "600 dimensions matched; one-dimensional refused".into()))
        },
    ));

    checks.push(run_check(
        "local.completion.bound",
        "200 random records: completion keeps at most one line, always a unit one".into(),
        || -> Result<(bool, String), CoreError> {
            let kinds = [
                ReprKind::PrincipalSeries,
                ReprKind::Special,
                ReprKind::Supercuspidal,
            ];
            for i in 0..200 {
                let kind = kinds[rng.gen_range(0..3)];
                let p = [3u64, 5][rng.gen_range(0..2)];
                let k = rng.gen_range(1..=cfg.k.clamp(1, 4));
                let weight = match kind {
                    ReprKind::Special => 2 * rng.gen_range(1..=6u32),
                    _ => rng.gen_range(2..=12u32),
                };
                let params = rand_params(&mut rng, p, k, kind, weight);
                let basis = completion_basis(&params)?;
                if basis.len() > 1 {
                    return Ok((false, format!("draw {i}: {} survivors", basis.len())));
                }
                if let Some(t) = basis.first() {
                    if t.chi.value_at_p().v() != 0 {
                        return Ok((false, format!("draw {i}: non-unit survivor")));
                    }
                }
            }
            Ok((true, "survivor count was 0 or 1 on every draw, all units".into()))
        },
    ));

    checks.push(run_check(
        "local.completion.grid",
        "exhaustive valuation splits at p=5, weights 2..=12".into(),
        || -> Result<(bool, String), CoreError> {
            let p = 5u64;
            let k = cfg.k.clamp(2, 4);
            let mut splits = 0usize;
            for kw in 2..=12u32 {
                for v1 in 0..i64::from(kw) {
                    let v2 = i64::from(kw) - 1 - v1;
                    let alpha = unram(p, k, v1, 2);
                    let beta = unram(p, k, v2, 3);
                    let params = LocalParams::principal_series(alpha, beta, Some(kw))?;
                    let basis = completion_basis(&params)?;
                    let want = usize::from(v1 == 0) + usize::from(v2 == 0);
                    if basis.len() != want {
                        return Ok((
                            false,
                            format!("weight {kw}, split ({v1},{v2}): {} survivors", basis.len()),
                        ));
                    }
                    if want == 1 {
                        let val = basis[0].chi.value_at_p();
                        let expect = if v1 == 0 { 2 } else { 3 };
                        if val.v() != 0
                            || !val
                                .unit()
                                .sub(&Scalar::from_i64(p, k, expect))
                                .is_zero()
                        {
                            return Ok((
                                false,
                                format!("weight {kw}, split ({v1},{v2}): wrong survivor"),
                            ));
                        }
                    }
                    splits += 1;
                }
            }
            Ok((true, format!("{splits} splits filtered on the unit slot")))
        },
    ));

    checks.push(run_check(
        "local.predictor.nesting",
        "50 ordinary-shaped records: lower within upper, window growth monotone".into(),
        || -> Result<(bool, String), CoreError> {
            let mut done = 0usize;
            while done < 50 {
                let p = [3u64, 5][rng.gen_range(0..2)];
                let k = rng.gen_range(1..=cfg.k.clamp(1, 4));
                let kw = rng.gen_range(2..=12u32);
                let alpha =
                    SmoothChar::unramified(p, k, PValue::new(0, rand_unit(&mut rng, p, k)));
                let beta = SmoothChar::unramified(
                    p,
                    k,
                    PValue::new(i64::from(kw) - 1, rand_unit(&mut rng, p, k)),
                );
                let params = LocalParams::principal_series(alpha, beta, Some(kw))?;
                if !classify(&params).irreducible {
                    continue;
                }
                done += 1;
                let m = rng.gen_range(0..=2u32);
                let w0 = predict_w(&params, kw, Splitness::NonSplit, 0)?;
                if !(tails_subset(&w0.lower, &w0.upper) && tails_subset(&w0.upper, &w0.lower)) {
                    return Ok((false, "window 0, nonsplit: bounds should coincide".into()));
                }
                let wu = predict_w(&params, kw, Splitness::Unknown, m)?;
                let ws = predict_w(&params, kw, Splitness::Split, m)?;
                for (label, w) in [("unknown", &wu), ("split", &ws)] {
                    if !tails_subset(&w.lower, &w.upper) {
                        return Ok((false, format!("{label}: lower escapes upper")));
                    }
                }
                if !tails_subset(&wu.lower, &ws.lower) {
                    return Ok((false, "split must strengthen the certain part".into()));
                }
                let wu_next = predict_w(&params, kw, Splitness::Unknown, m + 1)?;
                if !tails_subset(&wu.upper, &wu_next.upper) {
                    return Ok((false, "upper bound should grow with the window".into()));
                }
            }
            Ok((true, "50 records nested correctly across windows".into()))
        },
    ));

    checks
}
