use cinfty::cring::Presentation;
use cinfty::order::*;
use cinfty::rational::{int, rat};
use cinfty::spectrum::{sample_points, SpectrumPoint};
use cinfty::termlang::{parse_term, RatBox, Term};
use cinfty::zerocert::{check_verdict, Point, QueryBudget};
use proptest::prelude::*;

fn t(s: &str) -> Term {
    parse_term(s, 1).unwrap()
}

fn ring(rels: &[&str]) -> Presentation {
    Presentation::new(1, rels.iter().map(|r| t(r)).collect(), RatBox::parse("-2,2").unwrap()).unwrap()
}

fn b() -> QueryBudget {
    QueryBudget::default()
}

fn ordering_at(p: &Presentation, q: num_rational::BigRational) -> PointOrdering {
    PointOrdering::new(SpectrumPoint::new(p, Point::exact(vec![q])))
}

#[test]
fn precedes_examples() {
    let p = ring(&["x0^2 - 1"]);
    let v = precedes(&Term::zero(), &t("x0^2"), &p, &b()).unwrap();
    check_verdict(&v).unwrap();
    assert!(v.is_proved());
    assert!(precedes(&t("x0"), &Term::int(2), &p, &b()).unwrap().is_proved());
    let v = precedes(&t("x0"), &t("x0"), &p, &b()).unwrap();
    check_verdict(&v).unwrap();
    assert!(v.is_refuted());
    let v = precedes(&Term::zero(), &t("x0"), &p, &b()).unwrap();
    assert_eq!(v.witness().unwrap().point.as_rationals(), Some(vec![int(-1)]));
    // Vacuous on the trivial ring.
    assert!(precedes(&t("x0"), &t("x0"), &ring(&["x0^2 + 1"]), &b()).unwrap().is_proved());
}

#[test]
fn ordering_and_harrison_examples() {
    let p = ring(&[]);
    let one = ordering_at(&p, int(1));
    assert!(harrison_member(&one, &t("x0 + 1")).is_proved());
    assert!(ordering_member(&one, &t("-x0")).is_refuted());
    assert!(ordering_member(&one, &t("x0 - 1")).is_proved());
    assert!(harrison_member(&one, &t("x0 - 1")).is_refuted());
}

#[test]
fn support_examples() {
    let p = ring(&[]);
    let (zero, one) = (ordering_at(&p, int(0)), ordering_at(&p, int(1)));
    assert_eq!(supp_of(&zero).point.as_rationals(), Some(vec![int(0)]));
    assert_eq!(supp_of(&one).point.as_rationals(), Some(vec![int(1)]));
    assert_ne!(supp_of(&zero), supp_of(&one));
    assert!(zero.support_contains(&t("x0")).is_proved());
    assert!(one.support_contains(&t("x0")).is_refuted());
}

#[test]
fn supp_spectral_examples() {
    let p = ring(&["x0^2 - 1"]);
    let pts = sample_points(&p, 4, &b());
    let cases = supp_spectral_check(&p, &t("x0"), &pts).unwrap();
    assert_eq!(cases.len(), 2);
    assert!(cases.iter().all(|c| c.agree() && c.in_open.is_proved()));
    assert!(cases[0].negative.is_proved() && cases[1].positive.is_proved());
    assert!(supp_spectral_check(&p, &Term::one(), &pts).unwrap().iter().all(|c| c.positive.is_proved()));
    let free = ring(&[]);
    let c = &supp_spectral_check(&free, &t("x0"), &[SpectrumPoint::new(&free, Point::exact(vec![int(0)]))]).unwrap()[0];
    assert!(c.agree() && c.in_open.is_refuted() && c.positive.is_refuted() && c.negative.is_refuted());
}

#[test]
fn supp_bijection_examples() {
    let two = supp_bijection_check(&sample_points(&ring(&["x0*(x0 - 1)"]), 4, &b()));
    assert!(two.orderings == 2 && two.injective && two.onto_samples);
    let none = supp_bijection_check(&sample_points(&ring(&["x0^2 + 1"]), 4, &b()));
    assert!(none.orderings == 0 && none.injective && none.onto_samples);
    let grid = supp_bijection_check(&sample_points(&ring(&[]), 6, &b()));
    assert!(grid.orderings == 7 && grid.injective && grid.onto_samples);
    let conj = supp_bijection_check(&sample_points(&ring(&["x0^2 - 2"]), 4, &b()));
    assert!(conj.orderings == 2 && conj.injective);
}

#[test]
fn semireal_consequence() {
    let p = ring(&["x0*(x0 - 1)"]);
    let fs = [t("x0"), t("exp(x0)")];
    assert!(cinfty::radical::semireal_check(&p, &fs, &b()).unwrap().is_proved());
}

fn term() -> impl Strategy<Value = Term> {
    (-3i64..=3, -3i64..=3, 0u8..3).prop_map(|(a, c, shape)| {
        let (a, c) = (Term::constant(rat(a, 2)), Term::constant(rat(c, 2)));
        match shape {
            0 => t("x0") * a + c,
            1 => t("x0^2") * a + c,
            _ => t("exp(x0)") * a + c,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn compatibility_and_irreflexivity(f in term(), g in term(), rel in 0u8..3) {
        let p = match rel { 0 => ring(&["x0^2 - 1"]), 1 => ring(&["x0*(x0 - 1/2)"]), _ => ring(&["x0 - 3/2"]) };
        prop_assert!(precedes(&f, &f, &p, &b()).unwrap().is_refuted());
        let pf = precedes(&Term::zero(), &f, &p, &b()).unwrap();
        let pg = precedes(&Term::zero(), &g, &p, &b()).unwrap();
        if pf.is_proved() && pg.is_proved() {
            prop_assert!(precedes(&Term::zero(), &(f.clone() + g.clone()), &p, &b()).unwrap().is_proved());
            prop_assert!(precedes(&Term::zero(), &(f.clone() * g.clone()), &p, &b()).unwrap().is_proved());
        }
        if let Some(w) = pf.witness() {
            prop_assert!(check_verdict(&pf).is_ok());
            prop_assert!(w.point.within(p.region()));
        }
    }

    #[test]
    fn ordering_axioms_at_points(f in term(), g in term(), k in -8i64..=8) {
        let o = ordering_at(&ring(&[]), rat(k, 4));
        let (inf, ing) = (o.contains(&f), o.contains(&g));
        if inf.is_proved() && ing.is_proved() {
            prop_assert!(o.contains(&(f.clone() + g.clone())).is_proved());
            prop_assert!(o.contains(&(f.clone() * g.clone())).is_proved());
        }
        prop_assert!(inf.is_proved() || o.contains(&-f.clone()).is_proved());
        if o.support_contains(&(f.clone() * g.clone())).is_proved() {
            prop_assert!(o.support_contains(&f).is_proved() || o.support_contains(&g).is_proved());
        }
        prop_assert_eq!(
            o.support_contains(&f).is_proved(),
            inf.is_proved() && o.contains(&-f.clone()).is_proved()
        );
    }
}
