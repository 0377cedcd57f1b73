use cinfty::cring::Presentation;
use cinfty::radical::*;
use cinfty::rational::{from_f64, int, rat, simplest_in};
use cinfty::termlang::{abs_at_least, eval, parse_term, RatBox, Term};
use cinfty::zerocert::{check_verdict, QueryBudget, Verdict};
use proptest::prelude::*;

fn t(s: &str) -> Term {
    parse_term(s, 1).unwrap()
}

fn ring(rels: &[&str]) -> Presentation {
    Presentation::new(1, rels.iter().map(|r| t(r)).collect(), RatBox::parse("-2,2").unwrap()).unwrap()
}

fn budget() -> QueryBudget {
    QueryBudget::default()
}

fn ok(v: Verdict) -> Verdict {
    check_verdict(&v).unwrap();
    v
}

#[test]
fn radical_member_examples() {
    let p = ring(&["x0^2*(x0 - 1)^2"]);
    assert!(ok(radical_member(&p, &t("x0*(x0 - 1)"), &budget()).unwrap()).is_proved());
    let v = ok(radical_member(&p, &t("x0"), &budget()).unwrap());
    assert_eq!(v.witness().unwrap().point.as_rationals(), Some(vec![int(1)]));
    assert!(radical_member(&p, &Term::zero(), &budget()).unwrap().is_proved());
}

#[test]
fn saturation_member_examples() {
    let free = ring(&[]);
    assert!(ok(saturation_member(&free, &[t("x0^2 - 1")], &t("x0 - 1"), &budget()).unwrap()).is_proved());
    let v = ok(saturation_member(&free, &[t("x0 - 1")], &t("x0^2 - 1"), &budget()).unwrap());
    assert_eq!(v.witness().unwrap().point.as_rationals(), Some(vec![int(-1)]));
}

/// `h = bump(x0) - c` with `c` a rational inside the enclosure of bump(1/2).
fn bump_h() -> Term {
    let iv = eval(&t("bump(x0)"), &[rat(1, 2)]).interval();
    let c = simplest_in(&from_f64(iv.lo).unwrap(), &from_f64(iv.hi).unwrap());
    assert!((iv.hi - iv.lo) < 1e-12);
    t("bump(x0)") - Term::constant(c)
}

#[test]
fn bump_saturation_in_quotient_and_free_ring() {
    let h = bump_h();
    let s = [t("bump(x0)")];
    let quotient = ring(&["x0"]);
    assert!(ok(saturation_member(&quotient, &s, &h, &budget()).unwrap()).is_proved());
    assert!(ok(saturation_member(&ring(&[]), &s, &h, &budget()).unwrap()).is_refuted());
    assert!(abs_at_least(&h, &[int(0)], &rat(1, 10)));
    let h0 = eval(&h, &[int(0)]).approx();
    assert!((h0 - ((-1f64).exp() - (-4f64 / 3.0).exp())).abs() < 1e-12);
}

#[test]
fn radical_compare_examples() {
    let i = ring(&["x0"]);
    let j = ring(&["x0*(x0 - 1)"]);
    // Z(I) = {0} ⊆ Z(J) = {0, 1}: radical of J inside radical of I.
    assert!(ok(radical_compare(&j, &i, &budget()).unwrap()).is_proved());
    assert!(ok(radical_compare(&i, &j, &budget()).unwrap()).is_refuted());
    assert!(radical_compare(&i, &i, &budget()).unwrap().is_proved());
    let k = ring(&["x0 - 1"]);
    assert!(radical_compare(&i, &k, &budget()).unwrap().is_refuted());
    assert!(radical_compare(&k, &i, &budget()).unwrap().is_refuted());
    let other = Presentation::free(RatBox::parse("0,1").unwrap());
    assert_eq!(radical_compare(&i, &other, &budget()).unwrap_err(), RadicalError::Incompatible);
}

#[test]
fn nullstellensatz_examples() {
    assert!(ok(nullstellensatz_check(&ring(&["x0^2 + 1"]), &budget())).is_proved());
    assert!(ok(nullstellensatz_check(&ring(&["x0^2", "(x0 - 1)^2"]), &budget())).is_proved());
    let v = ok(nullstellensatz_check(&ring(&["x0"]), &budget()));
    assert_eq!(v.witness().unwrap().point.as_rationals(), Some(vec![int(0)]));
}

#[test]
fn separation_examples() {
    let p = ring(&["x0"]);
    let r = separation_check(&p, &[t("x0")], &budget()).unwrap();
    assert!(r.agree() && r.meets_monoid.is_proved());
    let r = separation_check(&p, &[t("x0 - 1")], &budget()).unwrap();
    assert!(r.agree() && r.meets_monoid.is_refuted());
    let r = separation_check(&p, &[Term::one()], &budget()).unwrap();
    assert!(r.agree() && r.meets_monoid.is_refuted());
    let r = separation_check(&ring(&["x0^2 + 1"]), &[Term::one()], &budget()).unwrap();
    assert!(r.agree() && r.meets_monoid.is_proved());
}

#[test]
fn semireal_examples() {
    assert!(ok(semireal_check(&ring(&[]), &[t("x0")], &budget()).unwrap()).is_proved());
    assert!(semireal_check(&ring(&["x0*(x0 - 1)"]), &[t("x0"), t("x0 - 1")], &budget()).unwrap().is_proved());
    assert!(semireal_check(&ring(&[]), &[], &budget()).unwrap().is_proved());
}

fn root() -> impl Strategy<Value = i64> {
    -4i64..=4
}

/// Product of `(x0 - r/2)`, optionally times `x0^2 + 1`.
fn poly(roots: &[i64], positive_factor: bool) -> Term {
    let mut factors: Vec<Term> = roots.iter().map(|r| t("x0") - Term::constant(rat(*r, 2))).collect();
    if positive_factor {
        factors.push(t("x0^2 + 1"));
    }
    Term::product(factors).normalize()
}

fn poly_strategy() -> impl Strategy<Value = Term> {
    (prop::collection::vec(root(), 0..3), any::<bool>()).prop_map(|(r, p)| poly(&r, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn closure_operator_laws(gens in prop::collection::vec(poly_strategy(), 1..3), more in poly_strategy(), f in poly_strategy()) {
        let bud = budget();
        let i = Presentation::new(1, gens.clone(), RatBox::parse("-3,3").unwrap()).unwrap();
        for g in i.relations() {
            prop_assert!(radical_member(&i, g, &bud).unwrap().is_proved());
        }
        let j = i.quotient(&[more]).unwrap().0;
        let in_i = radical_member(&i, &f, &bud).unwrap();
        let in_j = radical_member(&j, &f, &bud).unwrap();
        if in_i.is_proved() {
            prop_assert!(in_j.is_proved());
        }
        // Adding a radical member to the generators changes nothing.
        if in_i.is_proved() {
            let closed = i.quotient(std::slice::from_ref(&f)).unwrap().0;
            for probe in [t("x0"), t("x0 - 1"), t("x0^2 - 1"), gens[0].clone()] {
                prop_assert_eq!(
                    radical_member(&closed, &probe, &bud).unwrap().kind(),
                    radical_member(&i, &probe, &bud).unwrap().kind()
                );
            }
        }
    }

    #[test]
    fn product_and_intersection_shadow(a in poly_strategy(), b in poly_strategy(), f in poly_strategy()) {
        let bud = budget();
        let region = RatBox::parse("-3,3").unwrap();
        let prod = Presentation::new(1, vec![a.clone() * b.clone()], region.clone()).unwrap();
        let pa = Presentation::new(1, vec![a], region.clone()).unwrap();
        let pb = Presentation::new(1, vec![b], region).unwrap();
        let both = radical_member(&pa, &f, &bud).unwrap().and(radical_member(&pb, &f, &bud).unwrap());
        let via_product = radical_member(&prod, &f, &bud).unwrap();
        prop_assert!(both.is_decided() && via_product.is_decided());
        prop_assert_eq!(both.is_proved(), via_product.is_proved());
    }

    #[test]
    fn saturation_laws(s in prop::collection::vec(poly_strategy(), 1..3), extra in poly_strategy(), g in poly_strategy()) {
        let bud = budget();
        let p = Presentation::free(RatBox::parse("-3,3").unwrap());
        prop_assert!(saturation_member(&p, &s, &t("x0^2 + 1"), &bud).unwrap().is_proved());
        for x in &s {
            prop_assert!(saturation_member(&p, &s, x, &bud).unwrap().is_proved());
        }
        let in_s = saturation_member(&p, &s, &g, &bud).unwrap();
        let mut bigger = s.clone();
        bigger.push(extra);
        if in_s.is_proved() {
            prop_assert!(saturation_member(&p, &bigger, &g, &bud).unwrap().is_proved());
            let mut with_g = s.clone();
            with_g.push(g.clone());
            for probe in [t("x0"), t("x0 - 1/2"), t("x0^2 - 1")] {
                prop_assert_eq!(
                    saturation_member(&p, &with_g, &probe, &bud).unwrap().kind(),
                    saturation_member(&p, &s, &probe, &bud).unwrap().kind()
                );
            }
        }
        let product = [Term::product(s.clone())];
        prop_assert_eq!(in_s.kind(), saturation_member(&p, &product, &g, &bud).unwrap().kind());
    }
}
