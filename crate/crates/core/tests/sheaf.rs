use cinfty::cring::{find_renaming, Presentation};
use cinfty::rational::{int, rat};
use cinfty::sheaf::*;
use cinfty::spectrum::{BasicOpen, SpectrumPoint};
use cinfty::termlang::{parse_term, RatBox, Term};
use cinfty::zerocert::{Point, QueryBudget};
use proptest::prelude::*;

fn t(s: &str) -> Term {
    parse_term(s, 1).unwrap()
}

fn free() -> Presentation {
    Presentation::free(RatBox::parse("-3,3").unwrap())
}

fn open(a: &str) -> BasicOpen {
    BasicOpen::new(&free(), t(a)).unwrap()
}

fn b() -> QueryBudget {
    QueryBudget::default()
}

fn at(q: num_rational::BigRational) -> SpectrumPoint {
    SpectrumPoint::new(&free(), Point::exact(vec![q]))
}

#[test]
fn section_ring_examples() {
    let l = section_ring(&open("x0")).unwrap();
    assert_eq!(l.ring.arity(), 2);
    assert_eq!(l.ring.relations(), &[parse_term("x1*x0 - 1", 2).unwrap()]);
    let global = section_ring(&BasicOpen::whole(&free())).unwrap();
    assert!(global.ring.is_trivial(&b()).is_refuted());
    // Global sections: x1 = 1 is forced, so the ring is A again.
    assert!(global.ring.equal(&Term::var(1), &Term::one(), &b()).is_proved());
    assert!(find_renaming(&global.ring, &global.ring).unwrap().is_some());
    assert!(section_ring(&open("0")).unwrap().ring.is_trivial(&b()).is_proved());
}

#[test]
fn restrict_examples() {
    let s = SectionOnBasic::new(&open("x0"), Term::one(), t("x0"), &b()).unwrap();
    let r = restrict(&s, &open("x0*(x0 - 1)"), &b()).unwrap();
    assert!(r.leq.is_proved());
    assert_eq!((&r.section.numerator, &r.section.denominator), (&s.numerator, &s.denominator));
    assert!(r.samples >= 20 && r.inside_source && r.max_deviation <= 1e-9);
    assert_eq!(germ_eval(&r.section, &at(int(2))).unwrap().value.as_exact(), Some(&rat(1, 2)));
    assert_eq!(germ_eval(&s, &at(int(2))).unwrap().value.as_exact(), Some(&rat(1, 2)));

    let same = restrict(&s, &s.open, &b()).unwrap();
    assert_eq!(same.section, s);

    let g = SectionOnBasic::global(&open("1"), t("x0^2 + 1"), &b()).unwrap();
    let r = restrict(&g, &open("x0 - 2"), &b()).unwrap();
    assert_eq!(r.section.denominator, Term::one());
    assert_eq!(r.section.numerator, t("x0^2 + 1"));

    match restrict(&s, &open("x0 - 1"), &b()) {
        Err(SheafError::NotSmaller(v)) => assert!(v.is_refuted()),
        other => panic!("{other:?}"),
    }
    assert!(matches!(SectionOnBasic::new(&open("x0"), Term::one(), t("x0 - 1"), &b()), Err(SheafError::Denominator(_))));
}

#[test]
fn germ_examples() {
    let s = SectionOnBasic::new(&open("x0"), t("x0 + 1"), t("x0"), &b()).unwrap();
    let g = germ_eval(&s, &at(int(2))).unwrap();
    assert_eq!(g.value.as_exact(), Some(&rat(3, 2)));
    assert!(g.invertible.is_proved());
    let one = SectionOnBasic::global(&open("1"), Term::one(), &b()).unwrap();
    assert_eq!(germ_eval(&one, &at(rat(-7, 3))).unwrap().value.as_exact(), Some(&int(1)));
    let s = SectionOnBasic::new(&open("x0"), t("x0 - 1"), t("x0"), &b()).unwrap();
    let g = germ_eval(&s, &at(int(1))).unwrap();
    assert_eq!(g.value.as_exact(), Some(&int(0)));
    assert!(g.invertible.is_refuted());
    assert!(matches!(germ_eval(&s, &at(int(0))), Err(SheafError::NotInOpen(_))));
    let e = SectionOnBasic::new(&open("x0"), t("exp(x0)"), t("x0"), &b()).unwrap();
    let g = germ_eval(&e, &at(int(1))).unwrap();
    assert!((g.approx() - std::f64::consts::E).abs() < 1e-12);
}

#[test]
fn functoriality_examples() {
    let (a, bo, c) = (open("x0*(x0 - 1)*(x0 - 2)"), open("x0*(x0 - 1)"), open("x0"));
    let s = SectionOnBasic::new(&c, Term::one(), t("x0"), &b()).unwrap();
    let k = SectionOnBasic::global(&c, Term::int(5), &b()).unwrap();
    for case in functoriality_check(&a, &bo, &c, &[s.clone(), k], &b()).unwrap() {
        assert!(case.syntactic && case.samples >= 20 && case.max_deviation <= 1e-9);
    }
    for case in functoriality_check(&c, &c, &c, &[s], &b()).unwrap() {
        assert!(case.syntactic);
    }
}

#[test]
fn sums_clear_denominators() {
    let o = open("x0*(x0 + 1)");
    let u = SectionOnBasic::new(&o, Term::one(), t("x0"), &b()).unwrap();
    let v = SectionOnBasic::new(&o, Term::one(), t("x0 + 1"), &b()).unwrap();
    let w = u.add(&v, &b()).unwrap();
    assert_eq!(w.denominator.normalize(), t("x0*(x0 + 1)"));
    let g = germ_eval(&w, &at(int(1))).unwrap();
    assert_eq!(g.value.as_exact(), Some(&rat(3, 2)));
    let p = u.mul(&v, &b()).unwrap();
    assert_eq!(germ_eval(&p, &at(int(1))).unwrap().value.as_exact(), Some(&rat(1, 2)));
}

fn opens() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 1..3)
}

fn product(roots: &[i64]) -> Term {
    Term::product(roots.iter().map(|r| t("x0") - Term::constant(rat(*r, 2))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn naturality_and_local_dichotomy(roots in opens(), extra in opens(), num in -3i64..=3, transcendental in any::<bool>()) {
        let big = BasicOpen::new(&free(), product(&roots)).unwrap();
        let mut all = roots.clone();
        all.extend(&extra);
        let small = BasicOpen::new(&free(), product(&all)).unwrap();
        let numerator = if transcendental { t("sin(x0)") - Term::int(num) } else { t("x0") - Term::constant(rat(num, 2)) };
        let s = SectionOnBasic::new(&big, numerator, product(&roots), &b()).unwrap();
        let r = restrict(&s, &small, &b()).unwrap();
        prop_assert!(r.inside_source && r.max_deviation <= 1e-9);
        prop_assert_eq!(restrict(&s, &big, &b()).unwrap().section, s.clone());
        for x in open_points(&small, 8, &b()).unwrap() {
            let (u, v) = (germ_eval(&s, &x).unwrap(), germ_eval(&r.section, &x).unwrap());
            prop_assert!((u.approx() - v.approx()).abs() <= 1e-9);
            // Exactly one of the two certifications (or neither).
            let zero = cinfty::zerocert::Verdict::from_sign(&x.point, &s.numerator, cinfty::zerocert::SignClaim::Zero);
            prop_assert!(!(u.invertible.is_proved() && zero.is_proved()));
            prop_assert_eq!(u.invertible.is_refuted(), zero.is_proved());
        }
    }
}
