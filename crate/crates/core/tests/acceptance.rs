//! End-to-end acceptance checks. Runs as a plain binary and prints one line per
//! criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mfree::block_model::{BlockStructure, CovarianceProfile, EnsembleKind};
use mfree::combinatorics::{
    boxtimes_moments, catalan, fuss_narayana_eval, fuss_narayana_q, jacobi_moments,
    mp_density_moment_quadrature, mp_moment, narayana, JacobiParams, MomentSequence, Poly,
};
use mfree::families::{
    assign_covariances, family_operator, limit_moment, meixner_gamma, FamilyTag, MeixnerModel,
    OperatorExpr,
};
use mfree::fock::{vacuum_expectation, weighted_state, CovarianceTable};
use mfree::rational::{self, from_biguint, int, ratio, Rational};
use mfree::rmt::{
    estimate_moment, exact_moment_wick, product_ensemble_moments, EnsembleSpec, ProductSpec,
};
use mfree::surd::Surd;
use mfree::word::{parse_word, BlockWord};
use mfree::Execution;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: mfree::Error) -> String {
    e.to_string()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_rational(rng: &mut ChaCha8Rng, num: std::ops::RangeInclusive<i64>, den: i64) -> Rational {
    ratio(rng.random_range(num), rng.random_range(1..=den))
}

/// Positive dimensions summing to one.
fn rand_dims(rng: &mut ChaCha8Rng, r: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..r).map(|_| rng.random_range(1..=12)).collect();
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| ratio(x, total)).collect()
}

fn rand_profile(rng: &mut ChaCha8Rng, r: usize, hermitian: bool) -> CovarianceProfile {
    let mut m = vec![vec![Rational::zero(); r]; r];
    for p in 0..r {
        for q in 0..r {
            if hermitian && q < p {
                m[p][q] = m[q][p].clone();
            } else {
                m[p][q] = rand_rational(rng, 1..=20, 7);
            }
        }
    }
    CovarianceProfile::new(r, BTreeMap::from([("1".to_string(), m)]), hermitian).unwrap()
}

fn word(s: &str) -> BlockWord {
    parse_word(s).unwrap()
}

fn criterion_1() -> Check {
    let mut g = rng(101);
    for _ in 0..5 {
        let d = rand_dims(&mut g, 3);
        let p = g.random_range(1..=3usize);
        let q = (p + g.random_range(1..=2usize) - 1) % 3 + 1;
        let (dp, dq) = (&d[p - 1], &d[q - 1]);

        let v = rand_profile(&mut g, 3, true);
        let w = word(&format!("S[{q},{p}] S[{p},{q}] S[{q},{p}] S[{p},{q}]"));
        let got = limit_moment(&w, q, EnsembleKind::Hermitian, &d, &v).map_err(err)?;
        let vpq = v.get("1", p, q).unwrap();
        let want = (dp * dp + dp * dq) * vpq * vpq;
        ensure(got == want, || format!("hermitian p={p} q={q}: {got} != {want}"))?;

        let v = rand_profile(&mut g, 3, false);
        let w = word(&format!("S[{p},{q}]* S[{q},{p}]* S[{q},{p}] S[{p},{q}]"));
        let got = limit_moment(&w, q, EnsembleKind::Ginibre, &d, &v).map_err(err)?;
        let want = dp * dq * v.get("1", p, q).unwrap() * v.get("1", q, p).unwrap();
        ensure(got == want, || format!("ginibre p={p} q={q}: {got} != {want}"))?;
    }
    Ok("5 + 5 randomized parameter sets".into())
}

/// `(T_{1,2} ... T_{p,p+1} T*_{p,p+1} ... T*_{1,2})^k` on blocks `1..=p+1`, block `a`
/// carrying `d_{a-1}`.
fn embedded_product_word(p: usize, k: usize) -> BlockWord {
    let forward: Vec<String> = (1..=p).map(|j| format!("T[{j},{}]", j + 1)).collect();
    let backward: Vec<String> = (1..=p).rev().map(|j| format!("T[{j},{}]*", j + 1)).collect();
    let one = [forward, backward].concat().join(" ");
    word(&vec![one; k].join(" "))
}

fn criterion_2() -> Check {
    let mut g = rng(202);
    let mut cases = 0;
    for p in 1..=3usize {
        let v = CovarianceProfile::uniform(p + 1, &["1"], int(1), false).unwrap();
        for k in 1..=5usize {
            let d: Vec<Rational> = (0..=p).map(|_| rand_rational(&mut g, 1..=9, 5)).collect();
            let w = embedded_product_word(p, k);
            let fock = limit_moment(&w, 1, EnsembleKind::Ginibre, &d, &v).map_err(err)?;
            let closed = fuss_narayana_eval(k as u64, &d).map_err(err)?;
            ensure(fock == closed, || format!("p={p} k={k}: Fock {fock} != P_k {closed}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (p, k) cases"))
}

fn criterion_3() -> Check {
    for p in 1..=3usize {
        let ts: Vec<Poly> = (1..=p).map(|i| Poly::var(&format!("t{i}"))).collect();
        let laws: Vec<MomentSequence<Poly>> = ts
            .iter()
            .map(|t| MomentSequence::from_tail((1..=6u64).map(|j| mp_moment(j, t))))
            .collect();
        let mut acc = laws[0].clone();
        for nu in &laws[1..] {
            acc = boxtimes_moments(&acc, nu, 6).map_err(err)?;
        }
        let mut d = vec![Poly::one()];
        d.extend(ts.iter().cloned());
        for k in 1..=6u64 {
            let want = fuss_narayana_eval(k, &d).map_err(err)?;
            let got = acc.get(k as usize).unwrap();
            ensure(got == &want, || format!("p={p} k={k}: {got} != {want}"))?;
        }
    }
    Ok("k <= 6, p <= 3 as polynomials in t_i".into())
}

fn criterion_4() -> Check {
    let t = Poly::var("t");
    for k in 1..=10u64 {
        let p = fuss_narayana_eval(k, &[Poly::one(), t.clone()]).map_err(err)?;
        ensure(p == narayana(k, &t), || format!("P_{k}(1,t) != N_{k}(t)"))?;
        for p in 1..=3u64 {
            let mut d = vec![Poly::one(); p as usize];
            d.push(t.clone());
            let lhs = fuss_narayana_q(k, p, &t);
            let rhs = fuss_narayana_eval(k, &d).map_err(err)?;
            ensure(lhs == rhs, || format!("Q_{k} != P_{k}(1,..,1,t) for p={p}"))?;
        }
    }
    Ok("k <= 10".into())
}

fn covariance_table(tag: FamilyTag, d: &[Rational], v: &CovarianceProfile) -> CovarianceTable<Surd> {
    let mut tbl = CovarianceTable::new(v.r());
    for u in v.labels() {
        assign_covariances(tag, d, v, u).unwrap().extend_table(&mut tbl).unwrap();
    }
    tbl
}

fn sum_family(tag: FamilyTag, r: usize) -> OperatorExpr {
    let parts: Vec<OperatorExpr> = (1..=r)
        .flat_map(|p| (1..=r).map(move |q| family_operator(tag, p, q, "1").unwrap()))
        .collect();
    OperatorExpr::sum(&parts)
}

fn surd_rational(x: Surd) -> Result<Rational, String> {
    x.to_rational().ok_or_else(|| format!("irrational value {x}"))
}

fn criterion_5() -> Check {
    let choices = [
        vec![ratio(1, 2), ratio(1, 2)],
        vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)],
        vec![int(0), ratio(1, 4), ratio(3, 4)],
    ];
    for d in &choices {
        let r = d.len();
        let v = CovarianceProfile::uniform(r, &["1"], int(1), false).unwrap();
        let omega = sum_family(FamilyTag::MfGaussian, r);
        let tbl = covariance_table(FamilyTag::MfGaussian, d, &v);
        for m in 1..=12usize {
            let got = surd_rational(weighted_state(d, &vec![omega.clone(); m], &tbl).map_err(err)?)?;
            let want = if m % 2 == 0 { from_biguint(catalan(m as u64 / 2)) } else { int(0) };
            ensure(got == want, || format!("semicircle d={d:?} m={m}: {got} != {want}"))?;
        }
        let eta = sum_family(FamilyTag::RCircular, r);
        let eta_star = eta.adjoint();
        let tbl = covariance_table(FamilyTag::RCircular, d, &v);
        for k in 1..=6usize {
            let ops: Vec<OperatorExpr> = (0..k).flat_map(|_| [eta_star.clone(), eta.clone()]).collect();
            let got = surd_rational(weighted_state(d, &ops, &tbl).map_err(err)?)?;
            let want = from_biguint(catalan(k as u64));
            ensure(got == want, || format!("circular d={d:?} k={k}: {got} != {want}"))?;
        }
    }
    Ok("k <= 6, three dimension vectors".into())
}

fn criterion_6() -> Check {
    let d = vec![int(0), int(1)];
    let v = CovarianceProfile::uniform(2, &["1", "2"], int(1), true).unwrap();
    let tbl = covariance_table(FamilyTag::MfGaussian, &d, &v);
    let a = family_operator(FamilyTag::MfGaussian, 2, 1, "1").unwrap();
    let b = family_operator(FamilyTag::MfGaussian, 2, 1, "2")
        .unwrap()
        .plus(&family_operator(FamilyTag::MfGaussian, 2, 2, "2").unwrap());
    let psi = |ops: &[OperatorExpr]| -> Result<Rational, String> {
        if ops.is_empty() {
            return Ok(int(1));
        }
        surd_rational(vacuum_expectation(ops, 1, &tbl).map_err(err)?)
    };
    let mut g = rng(606);
    let mut nonzero = 0;
    for case in 0..50 {
        // a_1 = a^i, b_1 = b^l, a_2 = a^j; w_1, w_2 words in {a, b}. Odd cases are
        // uniform; even cases are sandwiches w_1 a^i b^l a^i rev(w_1), which are far
        // more often nonzero.
        let sandwich = case % 2 == 0;
        let i = g.random_range(1..=2);
        let j = if sandwich { i } else { g.random_range(1..=2) };
        let l = if sandwich { 2 } else { g.random_range(1..=3) };
        let spare = 8 - (i + l + j);
        let len1 = g.random_range(0..=if sandwich { spare / 2 } else { spare });
        let pick = |g: &mut ChaCha8Rng, n: usize| -> Vec<OperatorExpr> {
            (0..n).map(|_| if g.random_bool(0.5) { a.clone() } else { b.clone() }).collect()
        };
        let w1 = pick(&mut g, len1);
        let w2 = if sandwich {
            w1.iter().rev().cloned().collect()
        } else {
            // odd total degree is trivially zero on both sides, so keep it even
            let mut len2 = g.random_range(0..=spare - len1);
            if (i + l + j + len1 + len2) % 2 == 1 {
                len2 = if len2 > 0 { len2 - 1 } else { len2 + 1 };
            }
            pick(&mut g, len2)
        };
        let rep = |x: &OperatorExpr, n: usize| vec![x.clone(); n];
        let full = [w1.clone(), rep(&a, i), rep(&b, l), rep(&a, j), w2.clone()].concat();
        let reduced = [w1, rep(&a, i), rep(&a, j), w2].concat();
        let lhs = psi(&full)?;
        let rhs = psi(&rep(&b, l))? * psi(&reduced)?;
        ensure(lhs == rhs, || format!("case {case}: {lhs} != {rhs}"))?;
        if !lhs.is_zero() {
            nonzero += 1;
        }
    }
    ensure(nonzero >= 10, || format!("only {nonzero} nonzero instances"))?;
    for k in 1..=5usize {
        let got = psi(&vec![b.clone(); 2 * k])?;
        let want = from_biguint(catalan(k as u64));
        ensure(got == want, || format!("Ψ1(b^{}) = {got} != {want}", 2 * k))?;
    }
    Ok(format!("50 words ({nonzero} nonzero), Catalan k <= 5"))
}

fn criterion_7() -> Check {
    let mut g = rng(707);
    for _ in 0..5 {
        let a1 = rand_rational(&mut g, -6..=6, 4);
        let a2 = rand_rational(&mut g, -6..=6, 4);
        let b1 = rand_rational(&mut g, 1..=8, 5);
        let b2 = rand_rational(&mut g, 1..=8, 5);
        let model: MeixnerModel<Surd> = meixner_gamma("1", &a1, &a2, &b1, &b2).map_err(err)?;
        let jp = JacobiParams::free_meixner(&a1, &a2, &b1, &b2, 6).map_err(err)?;
        for k in 0..=10usize {
            let fock = model.moment(k).map_err(err)?;
            let jac = jacobi_moments(&jp, k).map_err(err)?;
            ensure(fock == jac, || format!("k={k}: Fock {fock} != Jacobi {jac}"))?;
        }
    }
    Ok("5 quadruples, k <= 10".into())
}

/// Words and sectors used by the sampler check.
const SUITE: [(&str, usize); 10] = [
    ("S[2,1] S[1,2]", 2),
    ("S[2,1] S[1,2] S[2,1] S[1,2]", 2),
    ("S[1,2]* S[2,1]* S[2,1] S[1,2]", 2),
    ("T[1,2] T[1,2]", 1),
    ("T[1,2] T[1,2] T[1,2] T[1,2]", 2),
    ("T[1,1] T[1,2](b) T[1,2](b) T[1,1]", 1),
    ("T[2,2] T[2,2] T[2,2] T[2,2] T[2,2] T[2,2]", 2),
    ("S[1,2] S[2,2] S[2,1]", 1),
    ("T[1,2]* T[2,2] T[1,2] T[2,2]*", 1),
    ("S[1,1]* S[1,1] S[1,1]* S[1,1]", 1),
];

fn two_label_profile(hermitian: bool) -> CovarianceProfile {
    let m1 = vec![vec![ratio(3, 2), ratio(1, 2)], vec![if hermitian { ratio(1, 2) } else { int(2) }, int(1)]];
    let m2 = vec![vec![int(1), ratio(2, 3)], vec![if hermitian { ratio(2, 3) } else { ratio(1, 4) }, ratio(5, 4)]];
    CovarianceProfile::new(2, BTreeMap::from([("1".into(), m1), ("b".into(), m2)]), hermitian).unwrap()
}

fn spec_at(kind: EnsembleKind, d: &[Rational], dims: Vec<usize>, profile: CovarianceProfile, seed: u64) -> EnsembleSpec {
    let s = BlockStructure::normalized(d.to_vec()).unwrap().with_finite_dims(dims).unwrap();
    EnsembleSpec::new(kind, s, profile, seed).unwrap()
}

fn criterion_8() -> Check {
    let d = [ratio(3, 8), ratio(5, 8)];
    let mut worst: f64 = 0.0;
    for kind in [EnsembleKind::Hermitian, EnsembleKind::Ginibre] {
        let spec = spec_at(kind, &d, vec![3, 5], two_label_profile(kind == EnsembleKind::Hermitian), 808);
        for (w, q) in SUITE {
            let w = word(w);
            let exact = rational::to_f64(&exact_moment_wick(&spec, &w, q).map_err(err)?);
            let est = estimate_moment(&spec, &w, q, 20_000, Execution::Parallel).map_err(err)?;
            let dev = (est.mean - exact).norm();
            ensure(dev <= 4.0 * est.std_error, || {
                format!("{kind} {w} q={q}: MC {} ± {} vs Wick {exact}", est.mean, est.std_error)
            })?;
            if est.std_error > 0.0 {
                worst = worst.max(dev / est.std_error);
            }
        }
    }
    Ok(format!("20 comparisons, worst deviation {worst:.2} SE"))
}

fn criterion_9() -> Check {
    let d = [ratio(1, 3), ratio(2, 3)];
    let cases: [(EnsembleKind, &str, usize); 5] = [
        (EnsembleKind::Hermitian, "S[2,1] S[1,2] S[2,1] S[1,2]", 2),
        (EnsembleKind::Ginibre, "S[1,2]* S[2,1]* S[2,1] S[1,2]", 2),
        (EnsembleKind::Hermitian, "T[1,2] T[1,2]", 1),
        (EnsembleKind::Hermitian, "T[1,2] T[1,2]", 2),
        (EnsembleKind::Ginibre, "T[1,2]* T[1,2]", 1),
    ];
    let mut summary = Vec::new();
    for (i, (kind, w, q)) in cases.into_iter().enumerate() {
        let profile = two_label_profile(kind == EnsembleKind::Hermitian);
        let w = word(w);
        let limit = rational::to_f64(&limit_moment(&w, q, kind, &d, &profile).map_err(err)?);
        let mut errs = Vec::new();
        for n in [64usize, 128, 256] {
            let dims = mfree::block_model::finite_partition(n, &d, Default::default()).map_err(err)?;
            let spec = spec_at(kind, &d, dims, profile.clone(), 900 + i as u64);
            let est = estimate_moment(&spec, &w, q, 200, Execution::Parallel).map_err(err)?;
            errs.push(((est.mean - limit).norm(), est.std_error, n));
        }
        let (e64, e256, se256) = (errs[0].0, errs[2].0, errs[2].1);
        ensure(e256 < e64, || format!("{kind} {w}: error {e256:.3e} at n=256 not below {e64:.3e} at n=64"))?;
        let bound = (4.0 * se256).max(10.0 / 256.0);
        ensure(e256 < bound, || format!("{kind} {w}: error {e256:.3e} at n=256 above {bound:.3e}"))?;
        summary.push(format!("{:.1e}->{:.1e}", e64, e256));
    }
    Ok(format!("errors n=64->256: {}", summary.join(", ")))
}

fn criterion_10() -> Check {
    let mut worst: f64 = 0.0;
    for t in [ratio(1, 2), int(1), int(2)] {
        for k in 1..=8u32 {
            let exact = rational::to_f64(&mp_moment(k as u64, &t));
            let q = mp_density_moment_quadrature(k, rational::to_f64(&t)).map_err(err)?;
            let rel = ((q - exact) / exact).abs();
            worst = worst.max(rel);
            ensure(rel < 1e-6, || format!("k={k} t={t}: {q} vs {exact}"))?;
        }
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

fn criterion_11() -> Check {
    let n = 256usize;
    let setups: [Vec<usize>; 3] = [vec![256, 128], vec![256, 384], vec![256, 192, 320]];
    let mut worst: f64 = 0.0;
    for (i, dims) in setups.iter().enumerate() {
        let spec = ProductSpec::new(dims.clone(), n, 1100 + i as u64).map_err(err)?;
        let ests = product_ensemble_moments(&spec, 100, 3, Execution::Parallel).map_err(err)?;
        let d: Vec<Rational> = dims.iter().map(|&m| ratio(m as i64, n as i64)).collect();
        for (k, est) in (1..=3u64).zip(&ests) {
            let want = rational::to_f64(&fuss_narayana_eval(k, &d).map_err(err)?);
            let dev = (est.mean - want).norm();
            let tol = (4.0 * est.std_error).max(0.05 * want);
            worst = worst.max(dev / want);
            ensure(dev <= tol, || format!("dims {dims:?} k={k}: {} vs P_k {want}", est.mean))?;
        }
    }
    Ok(format!("worst relative deviation {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 11] = [
        ("worked examples, exact limits", criterion_1, Duration::from_secs(1)),
        ("Fuss-Narayana vs Fock", criterion_2, Duration::from_secs(60)),
        ("boxtimes identity", criterion_3, Duration::from_secs(30)),
        ("Narayana / Fuss-Narayana identities", criterion_4, Duration::MAX),
        ("semicircle / circular recovery", criterion_5, Duration::MAX),
        ("monotone independence", criterion_6, Duration::MAX),
        ("Meixner vs Jacobi", criterion_7, Duration::MAX),
        ("sampler vs Wick", criterion_8, Duration::from_secs(300)),
        ("convergence trend", criterion_9, Duration::from_secs(600)),
        ("MP density quadrature", criterion_10, Duration::from_secs(10)),
        ("product ensemble MC", criterion_11, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(note) if elapsed > *budget => Err(format!("{note}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(note) => println!("criterion {:>2} PASS  {name}: {note} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
