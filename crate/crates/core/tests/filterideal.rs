use cinfty::cring::Presentation;
use cinfty::filterideal::*;
use cinfty::rational::{int, rat};
use cinfty::termlang::{parse_term, RatBox, Term};
use cinfty::zerocert::{check_verdict, QueryBudget, VerdictKind};
use proptest::prelude::*;

fn t(s: &str) -> Term {
    parse_term(s, 1).unwrap()
}

fn region() -> RatBox {
    RatBox::parse("-2,2").unwrap()
}

fn ring(rels: &[&str]) -> Presentation {
    Presentation::new(1, rels.iter().map(|r| t(r)).collect(), region()).unwrap()
}

fn filter(gens: &[&str]) -> ClosedSetFilter {
    ClosedSetFilter::new(region(), gens.iter().map(|g| t(g)).collect()).unwrap()
}

#[test]
fn hat_examples() {
    let b = QueryBudget::default();
    let f = hat(&ring(&["x0*(x0 - 1)"]));
    // Closed sets containing {0, 1}.
    assert!(check(&f, &t("x0*(x0 - 1)*(x0 + 1)"), &b).is_proved());
    assert!(check(&f, &t("x0 + 1"), &b).is_refuted());
    assert!(f.is_improper(&b).is_refuted());
    // The zero ideal: only the whole box.
    let whole = hat(&ring(&[]));
    assert!(check(&whole, &Term::zero(), &b).is_proved());
    assert!(check(&whole, &t("x0"), &b).is_refuted());
    assert!(hat(&ring(&["x0^2 + 1"])).is_improper(&b).is_proved());
}

#[test]
fn check_examples() {
    let b = QueryBudget::default();
    let f = hat(&ring(&["x0*(x0 - 1)"]));
    let v = check(&f, &t("x0^2*(x0 - 1)"), &b);
    check_verdict(&v).unwrap();
    assert!(v.is_proved());
    let v = check(&f, &t("x0"), &b);
    check_verdict(&v).unwrap();
    assert_eq!(v.witness().unwrap().point.as_rationals(), Some(vec![int(1)]));
    assert!(check(&filter(&["x0 - 1/3"]), &Term::zero(), &b).is_proved());
}

#[test]
fn adjunction_examples() {
    let b = QueryBudget::default();
    let p = ring(&["x0"]);
    let r = galois_adjunction_test(&p, &hat(&p), &b).unwrap();
    assert!(r.left.is_proved() && r.right.is_proved());
    let r = galois_adjunction_test(&p, &filter(&["x0 - 1"]), &b).unwrap();
    assert!(r.left.is_refuted() && r.right.is_refuted());
    let r = galois_adjunction_test(&ring(&["x0*(x0 - 1)"]), &filter(&["x0"]), &b).unwrap();
    assert!(r.left.is_proved() && r.right.is_proved());
    let other = ClosedSetFilter::new(RatBox::parse("0,1").unwrap(), vec![t("x0")]).unwrap();
    assert_eq!(galois_adjunction_test(&p, &other, &b).unwrap_err(), FilterError::Incompatible);
}

#[test]
fn closure_examples() {
    let b = QueryBudget::default();
    let p = ring(&["x0^2*(x0 - 1)^2"]);
    let samples = [t("x0*(x0 - 1)"), t("x0"), Term::zero()];
    let report = closure_equals_radical(&p, &samples, &b).unwrap();
    let kinds: Vec<VerdictKind> = report.iter().map(|s| s.via_filter.kind()).collect();
    assert_eq!(kinds, vec![VerdictKind::Proved, VerdictKind::Refuted, VerdictKind::Proved]);
    assert!(report.iter().all(|s| s.agree() && s.same_query));
}

#[test]
fn point_filters_are_principal() {
    let b = QueryBudget::default();
    let f = hat(&ring(&["x0 - 1/2"]));
    assert!(check(&f, &t("(x0 - 1/2)*exp(x0)"), &b).is_proved());
    assert!(check(&f, &t("x0^2 - 1/4"), &b).is_proved());
    assert!(check(&f, &t("x0 - 1"), &b).is_refuted());
}

fn poly() -> impl Strategy<Value = Term> {
    (prop::collection::vec(-4i64..=4, 0..3), any::<bool>()).prop_map(|(roots, shifted)| {
        let mut fs: Vec<Term> = roots.iter().map(|r| t("x0") - Term::constant(rat(*r, 2))).collect();
        if shifted {
            fs.push(t("x0^2 + 1/2"));
        }
        Term::product(fs).normalize()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn filter_axioms(gens in prop::collection::vec(poly(), 1..3), c in poly()) {
        let b = QueryBudget::default();
        let f = ClosedSetFilter::new(region(), gens).unwrap();
        prop_assert!(check(&f, &f.minimum(), &b).is_proved());
        // Adding a generator whose zero set contains the minimum changes nothing.
        if check(&f, &c, &b).is_proved() {
            let g = f.with_generator(c.clone());
            for probe in [t("x0"), t("x0 - 1"), t("x0^2 - 1"), c.clone()] {
                prop_assert_eq!(check(&g, &probe, &b).kind(), check(&f, &probe, &b).kind());
            }
        }
        // Superset closure: Z(c) in F implies Z(c * d) in F.
        if check(&f, &c, &b).is_proved() {
            prop_assert!(check(&f, &(c.clone() * t("x0 - 3/2")), &b).is_proved());
        }
    }

    #[test]
    fn adjunction_laws(gens in prop::collection::vec(poly(), 1..3), fgens in prop::collection::vec(poly(), 1..3), samples in prop::collection::vec(poly(), 1..4)) {
        let b = QueryBudget::default();
        let p = Presentation::new(1, gens, region()).unwrap();
        let unit = galois_adjunction_test(&p, &hat(&p), &b).unwrap();
        prop_assert!(unit.left.is_proved() && unit.right.is_proved());
        let f = ClosedSetFilter::new(region(), fgens).unwrap();
        let members: Vec<Term> = samples.into_iter().filter(|s| check(&f, s, &b).is_proved()).collect();
        if !members.is_empty() {
            let q = Presentation::new(1, members, region()).unwrap();
            let counit = galois_adjunction_test(&q, &f, &b).unwrap();
            prop_assert!(counit.left.is_proved());
        }
        let r = galois_adjunction_test(&p, &f, &b).unwrap();
        prop_assert!(r.agree());
    }

    #[test]
    fn closure_matches_radical(gens in prop::collection::vec(poly(), 1..3), samples in prop::collection::vec(poly(), 1..4)) {
        let b = QueryBudget::default();
        let p = Presentation::new(1, gens, region()).unwrap();
        for s in closure_equals_radical(&p, &samples, &b).unwrap() {
            prop_assert!(s.agree() && s.same_query);
            prop_assert!(s.via_filter.is_decided());
        }
    }
}
