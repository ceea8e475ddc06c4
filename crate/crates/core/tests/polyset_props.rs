mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vo_lab::polyset::{
    factorial, parse_polynomial, parse_polyset, parse_smtlib_atoms, Permutation, PolySet, Polynomial, VariableOrdering,
};
use vo_lab::Error;

fn poly_strategy(nvars: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..5, nvars), -50i64..50), 1..6).prop_filter_map(
        "nonzero",
        move |terms| {
            let p = Polynomial::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, BigInt::from(c))));
            (!p.is_zero()).then_some(p)
        },
    )
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    (0..factorial(n)).prop_map(move |i| {
        let o = VariableOrdering::from_index(n, i).unwrap();
        Permutation::new(o.as_slice().to_vec()).unwrap()
    })
}

proptest! {
    #[test]
    fn display_parses_back(p in poly_strategy(3)) {
        let text = p.to_string();
        prop_assert_eq!(parse_polynomial(&text, 3).unwrap(), p);
    }

    #[test]
    fn set_display_parses_back(ps in prop::collection::vec(poly_strategy(4), 1..5)) {
        let s = PolySet::new(4, ps).unwrap();
        prop_assert_eq!(parse_polyset(&s.to_string(), 4).unwrap(), s);
    }

    #[test]
    fn renaming_composes(ps in prop::collection::vec(poly_strategy(4), 1..4), s in perm_strategy(4), t in perm_strategy(4)) {
        let set = PolySet::new(4, ps).unwrap();
        let twice = set.apply_permutation(&s).apply_permutation(&t);
        prop_assert_eq!(&twice, &set.apply_permutation(&t.compose(&s)));
        prop_assert_eq!(set.apply_permutation(&s).apply_permutation(&s.inverse()), set);
    }

    #[test]
    fn transport_composes(i in 0usize..24, s in perm_strategy(4), t in perm_strategy(4)) {
        let o = VariableOrdering::from_index(4, i).unwrap();
        prop_assert_eq!(o.transport(&s).transport(&t), o.transport(&t.compose(&s)));
    }

    #[test]
    fn renaming_preserves_degrees(p in poly_strategy(3), s in perm_strategy(3)) {
        let q = p.permute(&s);
        prop_assert_eq!(q.total_degree(), p.total_degree());
        for v in 0..3 {
            prop_assert_eq!(q.var_degree(s.image(v)), p.var_degree(v));
        }
    }
}

#[test]
fn ordering_indices_are_lexicographic() {
    for n in 1..=5 {
        let all = VariableOrdering::all(n);
        assert_eq!(all.len(), factorial(n));
        for (i, o) in all.iter().enumerate() {
            assert_eq!(o.index(), i);
            assert_eq!(&VariableOrdering::from_index(n, i).unwrap(), o);
        }
        assert!(all.windows(2).all(|w| w[0].as_slice() < w[1].as_slice()));
    }
    let names: Vec<String> = VariableOrdering::all(3).iter().map(|o| o.to_string()).collect();
    assert_eq!(names, ["x1>x2>x3", "x1>x3>x2", "x2>x1>x3", "x2>x3>x1", "x3>x1>x2", "x3>x2>x1"]);
}

#[test]
fn parse_errors() {
    assert!(matches!(parse_polyset("x1 + * x2", 2), Err(Error::Syntax { .. })));
    assert!(matches!(parse_polyset("x0 + 1", 2), Err(Error::Syntax { .. })));
    assert!(matches!(parse_polyset("x3 + 1", 2), Err(Error::VariableOutOfRange { index: 2, nvars: 2 })));
    assert!(matches!(parse_polynomial("x1 - x1", 1), Err(Error::ZeroPolynomial)));
    match parse_polyset("x1 + 2 $", 1) {
        Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 7),
        other => panic!("{other:?}"),
    }
}

#[test]
fn smtlib_atoms() {
    let script = "(set-logic QF_NRA)\n(declare-fun a () Real)\n(declare-fun b () Real)\n\
                  (assert (and (> (* a a) b) (or (= (+ a b) 1) (not (< (* 2 b) (/ 1 3))))))\n(check-sat)\n";
    let s = parse_smtlib_atoms(script).unwrap();
    assert_eq!(s, parse_polyset("x1^2 - x2; x1 + x2 - 1; 6x2 - 1", 2).unwrap());
    assert!(parse_smtlib_atoms("(declare-fun a () Real)(assert (> (exp a) 0))").is_err());
    assert!(parse_smtlib_atoms("(assert (> c 0))").is_err());
}

#[test]
fn random_sets_are_well_formed() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let s = common::random_polyset(&mut rng, 3, 4, 5);
        assert!(s.polys().windows(2).all(|w| w[0] < w[1]));
        assert!(s.polys().iter().all(|p| !p.is_zero()));
    }
}
