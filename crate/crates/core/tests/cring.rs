use cinfty::cring::*;
use cinfty::rational::{int, rat};
use cinfty::termlang::{parse_term, RatBox, Term};
use cinfty::zerocert::{check_verdict, QueryBudget, Verdict};
use proptest::prelude::*;

fn t(s: &str, n: usize) -> Term {
    parse_term(s, n).unwrap()
}

fn b(s: &str) -> RatBox {
    RatBox::parse(s).unwrap()
}

fn budget() -> QueryBudget {
    QueryBudget::default()
}

fn free1() -> Presentation {
    Presentation::free(b("-2,2"))
}

fn ok(v: Verdict) -> Verdict {
    check_verdict(&v).unwrap();
    v
}

#[test]
fn quotient_examples() {
    let (q, hom) = free1().quotient(&[t("x0", 1)]).unwrap();
    assert_eq!(q.relations(), &[t("x0", 1)]);
    assert_eq!(hom.apply(&t("x0 + 1", 1)), t("x0 + 1", 1));
    let (twice, _) = q.quotient(&[t("x0", 1)]).unwrap();
    assert_eq!(twice, q);
    let (empty, _) = Presentation::free(b("-10,10")).quotient(&[t("x0^2 + 1", 1)]).unwrap();
    assert!(ok(empty.is_trivial(&budget())).is_proved());
    assert!(matches!(free1().quotient(&[t("x1", 2)]), Err(CringError::Arity { index: 1, arity: 1 })));
}

#[test]
fn adjoin_examples() {
    let (p, iota) = free1().adjoin_variables(1);
    assert_eq!(p.arity(), 2);
    assert!(p.is_free());
    assert_eq!(p.region().lo(1), &int(-10));
    assert_eq!(iota.images, vec![Term::var(0)]);
    let (same, _) = free1().adjoin_variables(0);
    assert_eq!(same, free1());
    let q = Presentation::new(1, vec![t("x0^2 - 1", 1)], b("-2,2")).unwrap();
    let two_then_one = q.adjoin_variables(2).0.adjoin_variables(1).0;
    let three = q.adjoin_variables(3).0;
    assert!(find_renaming(&two_then_one, &three).unwrap().is_some());
    assert_eq!(two_then_one, three);
}

#[test]
fn coproduct_examples() {
    let (p, _, _) = free1().coproduct(&free1());
    assert_eq!(p, Presentation::free(b("-2,2;-2,2")));
    let a = free1().quotient(&[t("x0", 1)]).unwrap().0;
    let c = free1().quotient(&[t("x0 - 1", 1)]).unwrap().0;
    let (p, i1, i2) = a.coproduct(&c);
    assert_eq!(p.relations(), &[t("x0", 2), t("x1 - 1", 2)]);
    assert_eq!(i2.apply(&t("x0", 1)), t("x1", 2));
    assert_eq!(i1.apply(&t("x0", 1)), t("x0", 2));
    let pts = p.sample_points(10, &budget());
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0].as_rationals(), Some(vec![int(0), int(1)]));
    let (copy, _, _) = a.coproduct(&Presentation::initial());
    assert_eq!(copy, a);
}

#[test]
fn localize_examples() {
    let l = free1().localize(&t("x0", 1)).unwrap();
    assert_eq!(l.ring.arity(), 2);
    assert_eq!(l.ring.relations(), &[t("x0*x1 - 1", 2)]);
    assert_eq!(l.fresh, vec![1]);
    assert_eq!(l.ring.region().hi(1), &cinfty::rational::pow2(20));
    // Inverting a unit does not change the zero set.
    let u = free1().quotient(&[t("x0^2 - 1", 1)]).unwrap().0.localize(&Term::one()).unwrap();
    let pts = u.ring.sample_points(10, &budget());
    assert_eq!(pts.len(), 2);
    assert!(pts.iter().all(|p| p.as_rationals().unwrap()[1] == int(1)));
    // Inverting zero in C∞(R)/<x> gives the trivial ring.
    let z = free1().quotient(&[t("x0", 1)]).unwrap().0.localize(&t("x0", 1)).unwrap();
    assert!(ok(z.ring.is_trivial(&budget())).is_proved());
}

#[test]
fn localize_chain_examples() {
    for (bt, ct) in [("x0", "x0 - 1"), ("x0", "x0"), ("1", "x0^2 - 1/4")] {
        let r = localize_chain(&free1(), &t(bt, 1), &t(ct, 1), 20, &budget()).unwrap();
        assert!(ok(r.verdict.clone()).is_proved(), "{bt}, {ct}: {:?}", r.verdict);
        assert!(r.samples >= 20, "{bt}, {ct}: {}", r.samples);
        assert!(r.max_deviation <= 1e-9, "{}", r.max_deviation);
    }
}

#[test]
fn quotient_localize_examples() {
    let r = quotient_localize_commute(&free1(), &[t("x0*(x0 - 1)", 1)], &t("x0", 1), &budget()).unwrap();
    assert!(r.renaming.is_some());
    assert_eq!(r.left.relations().len(), 2);
    assert!(ok(r.fraction_form).is_proved());
    let r = quotient_localize_commute(&free1(), &[], &t("x0^2 + 1", 1), &budget()).unwrap();
    assert_eq!(r.left, free1().localize(&t("x0^2 + 1", 1)).unwrap().ring);
    assert!(r.renaming.is_some());
    let r = quotient_localize_commute(&free1(), &[t("x0", 1)], &t("x0 - 1", 1), &budget()).unwrap();
    assert!(r.renaming.is_some());
    let pts = r.left.sample_points(5, &budget());
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0].as_rationals(), Some(vec![int(0), int(-1)]));
}

#[test]
fn coproduct_localize_examples() {
    let r = coproduct_localize_commute(&free1(), &[], &free1(), &[], 20, &budget()).unwrap();
    assert!(r.renaming.is_some());
    let r = coproduct_localize_commute(&free1(), &[t("x0", 1)], &free1(), &[t("x0 - 1", 1)], 20, &budget()).unwrap();
    assert!(r.renaming.is_some());
    assert!(r.samples >= 20);
    assert!(r.max_deviation <= 1e-9);
    let a = free1().quotient(&[t("x0^2 - 1", 1)]).unwrap().0;
    let c = free1().quotient(&[t("x0*(x0 - 1/2)", 1)]).unwrap().0;
    let r = coproduct_localize_commute(&a, &[t("x0 + 2", 1)], &c, &[t("x0 + 1", 1)], 20, &budget()).unwrap();
    assert!(r.renaming.is_some());
    assert_eq!(r.samples, 4);
    assert!(r.max_deviation <= 1e-9);
}

#[test]
fn invertibility_examples() {
    let q = Presentation::free(b("-1,1")).quotient(&[t("x0 - 1", 1)]).unwrap().0;
    assert!(ok(q.is_invertible(&t("1 + x0^2", 1), &budget())).is_proved());
    assert!(ok(q.is_invertible(&t("x0", 1), &budget())).is_proved());
    let v = ok(Presentation::free(b("-1,1")).is_invertible(&t("x0", 1), &budget()));
    assert_eq!(v.witness().unwrap().point.as_rationals(), Some(vec![int(0)]));
}

#[test]
fn idempotent_examples() {
    let p = free1().quotient(&[t("x0^2 - x0", 1)]).unwrap().0;
    let r = invert_idempotent(&p, &t("x0", 1), &budget()).unwrap();
    assert!(ok(r.verdict).is_proved());
    let pts = r.quotient.sample_points(5, &budget());
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0].as_rationals(), Some(vec![int(1)]));
    let r = invert_idempotent(&p, &Term::one(), &budget()).unwrap();
    assert_eq!(r.quotient, p);
    assert!(r.verdict.is_proved());
    let r = invert_idempotent(&p, &Term::zero(), &budget()).unwrap();
    assert!(r.quotient.is_trivial(&budget()).is_proved());
    assert!(r.localized.is_trivial(&budget()).is_proved());
    assert!(r.verdict.is_proved());
    assert!(matches!(invert_idempotent(&free1(), &t("x0", 1), &budget()), Err(CringError::NotIdempotent(_))));
}

#[test]
fn fraction_axiom_examples() {
    let l = free1().localize(&t("x0", 1)).unwrap();
    let samples = [t("x1", 2), t("x0^2 + 3", 2), t("x0*(1 - x1*x0)", 2), t("exp(x1)", 2)];
    let checks = check_fraction_axioms(&l, &samples, &budget()).unwrap();
    assert_eq!(checks[0].multiplier, t("x0", 1));
    assert_eq!(checks[0].numerator, Term::one());
    assert!(checks[0].verdict.is_proved());
    assert_eq!(checks[1].multiplier, Term::one());
    assert_eq!(checks[1].numerator, t("x0^2 + 3", 1));
    assert!(checks[1].verdict.is_proved());
    assert_eq!(checks[2].multiplier, t("x0", 1));
    assert!(checks[2].numerator.is_zero());
    assert!(checks[2].kernel.as_ref().unwrap().is_proved());
    assert!(checks[3].verdict.is_unknown());
}

#[test]
fn lift_examples() {
    let p = Presentation::lift_from_cring(1, vec![t("x0^2 - 2", 1)], b("-2,2")).unwrap();
    let pts = p.sample_points(5, &budget());
    assert_eq!(pts.len(), 2);
    assert!((pts[1].approx()[0] - 2f64.sqrt()).abs() < 1e-9);
    assert!(Presentation::lift_from_cring(1, vec![], b("-2,2")).unwrap().is_free());
    let h = Presentation::lift_from_cring(1, vec![t("2*x0 - 1", 1)], b("-2,2")).unwrap();
    assert_eq!(h.sample_points(5, &budget())[0].as_rationals(), Some(vec![rat(1, 2)]));
    assert!(Presentation::lift_from_cring(1, vec![t("x0 - 1/2", 1)], b("-2,2")).is_err());
}

#[test]
fn hom_examples() {
    let p = free1();
    let sq = Hom::new(p.clone(), p.clone(), vec![t("x0^2", 1)]).unwrap();
    assert_eq!(sq.apply(&t("x0 - 1", 1)), t("x0^2 - 1", 1));
    assert!(sq.after(&Hom::identity(&Presentation::free(b("0,1")))).is_err());
    // Into C∞(R)/<x0^2 - x0>, x0 -> x0^3 is well defined; x0 -> x0 + 1 is not.
    let q = p.quotient(&[t("x0^2 - x0", 1)]).unwrap().0;
    let cube = Hom::new(q.clone(), q.clone(), vec![t("x0^3", 1)]).unwrap();
    assert!(ok(cube.well_defined(&budget())).is_proved());
    let shift = Hom::new(q.clone(), q.clone(), vec![t("x0 + 1", 1)]).unwrap();
    assert!(ok(shift.well_defined(&budget())).is_refuted());
    assert!(ok(shift.after(&cube).unwrap().well_defined(&budget())).is_refuted());
    assert!(ok(cube.after(&cube).unwrap().well_defined(&budget())).is_proved());
}

fn small_poly() -> impl Strategy<Value = Term> {
    prop::collection::vec(-3i64..=3, 1..4).prop_map(|cs| {
        Term::sum(cs.iter().enumerate().map(|(k, c)| Term::int(*c) * Term::var(0).pow(k as u32)).collect()).normalize()
    })
}

fn any_term() -> impl Strategy<Value = Term> {
    (small_poly(), 0usize..3).prop_map(|(p, k)| match k {
        0 => p,
        1 => Term::exp(p.clone()) - Term::one(),
        _ => Term::sin(p),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Composition of homs is substitution of substitutions.
    #[test]
    fn composition_is_substitution(g in any_term(), h in any_term(), e in any_term()) {
        let p = free1();
        let hh = Hom::new(p.clone(), p.clone(), vec![h]).unwrap();
        let gg = Hom::new(p.clone(), p.clone(), vec![g]).unwrap();
        prop_assert_eq!(gg.after(&hh).unwrap().apply(&e), gg.apply(&hh.apply(&e)));
    }

    /// Quotient and localization commute on the nose.
    #[test]
    fn quotient_localize_is_structural(rels in prop::collection::vec(small_poly(), 0..3), a in any_term()) {
        let r = quotient_localize_commute(&free1(), &rels, &a, &QueryBudget { max_depth: 8, ..budget() }).unwrap();
        prop_assert!(r.renaming.is_some());
    }

    /// Radical-equal elements stay equal after localizing.
    #[test]
    fn localization_preserves_equality(f in small_poly(), g in small_poly(), r in small_poly(), a in small_poly()) {
        let p = free1().quotient(&[r]).unwrap().0;
        if p.equal(&f, &g, &budget()).is_proved() {
            let l = p.localize(&a).unwrap();
            let v = l.ring.equal(&l.inclusion.apply(&f), &l.inclusion.apply(&g), &budget());
            prop_assert!(v.is_proved(), "{:?}", v);
        }
    }

    /// The localization is trivial exactly when the inverted element is radical-zero.
    #[test]
    fn trivial_localization(r in small_poly(), a in small_poly()) {
        let p = free1().quotient(&[r]).unwrap().0;
        let zero = p.radical_zero(&a, &budget());
        let trivial = p.localize(&a).unwrap().ring.is_trivial(&budget());
        if zero.is_decided() && trivial.is_decided() {
            prop_assert_eq!(zero.is_proved(), trivial.is_proved());
        }
    }

    /// Well-definedness is preserved by composition.
    #[test]
    fn well_definedness_composes(g in small_poly(), h in small_poly()) {
        let q = free1().quotient(&[t("x0^3 - x0", 1)]).unwrap().0;
        let gg = Hom::new(q.clone(), q.clone(), vec![g]).unwrap();
        let hh = Hom::new(q.clone(), q.clone(), vec![h]).unwrap();
        if gg.well_defined(&budget()).is_proved() && hh.well_defined(&budget()).is_proved() {
            prop_assert!(gg.after(&hh).unwrap().well_defined(&budget()).is_proved());
        }
    }
}
