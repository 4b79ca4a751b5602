use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use mfree::block_model::{finite_partition, BlockStructure, CovarianceProfile, EnsembleKind, EvanescentSchedule};
use mfree::combinatorics::{
    boxtimes_moments, enumerate_nc, free_cumulants_to_moments, kreweras, moments_to_free_cumulants,
    MomentSequence,
};
use mfree::families::{limit_moment, OperatorExpr};
use mfree::fock::Label;
use mfree::rational::{int, ratio, Rational};
use mfree::rmt::{exact_moment_wick, EnsembleSpec};
use mfree::word::{BlockSymbol, BlockWord, Term};

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(a, b)| ratio(a, b))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=6).prop_map(|(a, b)| ratio(a, b))
}

fn normalize(w: Vec<Rational>) -> Vec<Rational> {
    let total: Rational = w.iter().cloned().sum();
    w.into_iter().map(|x| x / &total).collect()
}

fn profile(r: usize, entries: Vec<Rational>, hermitian: bool) -> CovarianceProfile {
    let mut m = vec![vec![Rational::zero(); r]; r];
    for p in 0..r {
        for q in 0..r {
            m[p][q] = if hermitian && q < p { m[q][p].clone() } else { entries[p * r + q].clone() };
        }
    }
    CovarianceProfile::new(r, BTreeMap::from([("1".to_string(), m)]), hermitian).unwrap()
}

fn term(r: usize) -> impl Strategy<Value = Term> {
    (any::<bool>(), 1..=r, 1..=r, any::<bool>()).prop_map(|(sym, a, b, star)| {
        let (symbol, p, q) = if sym { (BlockSymbol::T, a.min(b), a.max(b)) } else { (BlockSymbol::S, a, b) };
        Term { symbol, p, q, label: "1".into(), star }
    })
}

fn word(r: usize, max_len: usize) -> impl Strategy<Value = BlockWord> {
    proptest::collection::vec(term(r), 1..=max_len).prop_map(|t| BlockWord::new(t).unwrap())
}

fn kind() -> impl Strategy<Value = EnsembleKind> {
    prop_oneof![Just(EnsembleKind::Hermitian), Just(EnsembleKind::Ginibre)]
}

fn symbol_expr() -> impl Strategy<Value = OperatorExpr> {
    (0..3u8, 1..=2usize, 1..=2usize, 0..3u8).prop_map(|(tag, p, q, variant)| {
        let label = match variant {
            0 => Label::plain("u"),
            1 => Label::prime("u"),
            _ => Label::double_prime("u"),
        };
        match tag {
            0 => OperatorExpr::create(p, q, label),
            1 => OperatorExpr::annihilate(p, q, label),
            _ => OperatorExpr::project(q),
        }
    })
}

fn expr() -> impl Strategy<Value = OperatorExpr> {
    proptest::collection::vec(
        (rational(), proptest::collection::vec(symbol_expr(), 0..4)),
        1..4,
    )
    .prop_map(|parts| {
        let mut acc = OperatorExpr::zero();
        for (c, factors) in parts {
            let product = factors.iter().fold(OperatorExpr::identity(), |a, b| a.times(b));
            acc = acc.plus(&product.scale(&c));
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_an_antilinear_involution(a in expr(), b in expr()) {
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        prop_assert_eq!(a.times(&b).adjoint(), b.adjoint().times(&a.adjoint()));
        prop_assert_eq!(a.plus(&b).adjoint(), a.adjoint().plus(&b.adjoint()));
    }

    #[test]
    fn limit_moment_of_adjoint_word_matches(
        kind in kind(),
        w in word(2, 4),
        q in 1..=2usize,
        d in proptest::collection::vec(positive(), 2),
        v in proptest::collection::vec(positive(), 4),
    ) {
        let d = normalize(d);
        let v = profile(2, v, kind == EnsembleKind::Hermitian);
        let direct = limit_moment(&w, q, kind, &d, &v).unwrap();
        let adjoint = limit_moment(&w.adjoint(), q, kind, &d, &v).unwrap();
        prop_assert_eq!(direct, adjoint);
    }

    #[test]
    fn limit_moment_of_odd_hermitian_word_vanishes(
        w in word(2, 5),
        q in 1..=2usize,
        d in proptest::collection::vec(positive(), 2),
        v in proptest::collection::vec(positive(), 4),
    ) {
        prop_assume!(w.len() % 2 == 1);
        let d = normalize(d);
        let v = profile(2, v, true);
        prop_assert!(limit_moment(&w, q, EnsembleKind::Hermitian, &d, &v).unwrap().is_zero());
    }

    #[test]
    fn wick_moment_of_adjoint_word_matches(
        kind in kind(),
        w in word(2, 4),
        q in 1..=2usize,
        dims in proptest::collection::vec(1usize..=3, 2),
        v in proptest::collection::vec(positive(), 4),
    ) {
        let n = dims.iter().sum::<usize>() as i64;
        let d: Vec<Rational> = dims.iter().map(|&x| ratio(x as i64, n)).collect();
        let s = BlockStructure::normalized(d).unwrap().with_finite_dims(dims).unwrap();
        let v = profile(2, v, kind == EnsembleKind::Hermitian);
        let spec = EnsembleSpec::new(kind, s, v, 0).unwrap();
        prop_assert_eq!(
            exact_moment_wick(&spec, &w, q).unwrap(),
            exact_moment_wick(&spec, &w.adjoint(), q).unwrap()
        );
    }

    #[test]
    fn finite_partition_covers_every_row(
        n in 8usize..2000,
        d in proptest::collection::vec(0i64..=5, 1..5),
        alpha in 0.0f64..0.9,
    ) {
        prop_assume!(d.iter().any(|&x| x > 0));
        let d: Vec<Rational> = d.into_iter().map(int).collect();
        let schedule = EvanescentSchedule { alpha };
        match finite_partition(n, &d, schedule) {
            Ok(dims) => {
                prop_assert_eq!(dims.len(), d.len());
                prop_assert_eq!(dims.iter().sum::<usize>(), n);
                prop_assert!(dims.iter().all(|&x| x >= 1));
                for (x, dq) in dims.iter().zip(&d) {
                    if dq.is_zero() {
                        prop_assert_eq!(*x, schedule.size(n));
                    }
                }
                let zeros = d.iter().filter(|x| x.is_zero()).count();
                if zeros == 0 {
                    let total: Rational = d.iter().cloned().sum();
                    for (x, dq) in dims.iter().zip(&d) {
                        let target = dq / &total * int(n as i64);
                        let gap = (int(*x as i64) - target).abs();
                        prop_assert!(gap < int(1), "block {} vs target {}", x, dq);
                    }
                }
            }
            Err(e) => prop_assert!(d.iter().any(|x| x.is_zero()), "unexpected error {e}"),
        }
    }

    #[test]
    fn cumulants_round_trip(m in proptest::collection::vec(rational(), 1..=8)) {
        let mu = MomentSequence::from_tail(m);
        let kappa = moments_to_free_cumulants(&mu).unwrap();
        prop_assert_eq!(free_cumulants_to_moments(&kappa).unwrap(), mu);
    }

    #[test]
    fn boxtimes_with_unit_mass_is_identity(m in proptest::collection::vec(rational(), 1..=7)) {
        let k = m.len();
        let mu = MomentSequence::from_tail(m);
        let delta = MomentSequence::from_tail(vec![Rational::one(); k]);
        prop_assert_eq!(boxtimes_moments(&mu, &delta, k).unwrap(), mu.clone());
        prop_assert_eq!(boxtimes_moments(&delta, &mu, k).unwrap(), mu);
    }

    #[test]
    fn boxtimes_is_commutative(
        a in proptest::collection::vec(rational(), 6),
        b in proptest::collection::vec(rational(), 6),
    ) {
        let mu = MomentSequence::from_tail(a);
        let nu = MomentSequence::from_tail(b);
        prop_assert_eq!(boxtimes_moments(&mu, &nu, 6).unwrap(), boxtimes_moments(&nu, &mu, 6).unwrap());
    }

    #[test]
    fn kreweras_complement_sizes(n in 1usize..=8, pick in any::<prop::sample::Index>()) {
        let all = enumerate_nc(n).unwrap();
        let p = &all[pick.index(all.len())];
        let k = kreweras(p);
        prop_assert!(k.is_noncrossing());
        prop_assert_eq!(p.len() + k.len(), n + 1);
        prop_assert_eq!(kreweras(&k).len(), p.len());
    }
}
