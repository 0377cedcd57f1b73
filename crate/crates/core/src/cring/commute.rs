//! The structural isomorphisms between iterated constructions.

use num_traits::One;

use super::{find_renaming, CringError, Hom, Localized, Presentation};
use crate::termlang::{eval_f64, Atom, Poly, Term};
use crate::zerocert::{QueryBudget, Verdict};

/// Relative deviation `|u - v| / (1 + |u|)`.
fn deviation(u: f64, v: f64) -> f64 {
    (u - v).abs() / (1.0 + u.abs())
}

/// `(A{b^-1}){c^-1}` against `A{(bc)^-1}`.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub iterated: Presentation,
    pub direct: Presentation,
    /// `A{(bc)^-1} -> (A{b^-1}){c^-1}`, `z -> y1*y2`.
    pub forward: Hom,
    /// `(A{b^-1}){c^-1} -> A{(bc)^-1}`, `y1 -> z*c`, `y2 -> z*b`.
    pub backward: Hom,
    /// Both maps well defined and mutually inverse.
    pub verdict: Verdict,
    pub samples: usize,
    pub max_deviation: f64,
}

pub fn localize_chain(
    p: &Presentation,
    b: &Term,
    c: &Term,
    want: usize,
    budget: &QueryBudget,
) -> Result<ChainReport, CringError> {
    let n = p.arity();
    let first = p.localize(b)?;
    let iterated = first.ring.localize(&first.inclusion.apply(c))?.ring;
    let direct = p.localize(&(b.clone() * c.clone()))?.ring;
    let (y1, y2, z) = (Term::var(n), Term::var(n + 1), Term::var(n));
    let base: Vec<Term> = (0..n).map(Term::var).collect();
    let forward = Hom::new(direct.clone(), iterated.clone(), base.iter().cloned().chain([y1.clone() * y2.clone()]).collect())?;
    let backward = Hom::new(
        iterated.clone(),
        direct.clone(),
        base.iter().cloned().chain([z.clone() * c.clone(), z.clone() * b.clone()]).collect(),
    )?;
    let there_and_back = backward.after(&forward)?;
    let back_and_there = forward.after(&backward)?;
    let mut checks = vec![forward.well_defined(budget), backward.well_defined(budget)];
    for (i, img) in there_and_back.images.iter().enumerate() {
        checks.push(direct.equal(img, &Term::var(i), budget));
    }
    for (i, img) in back_and_there.images.iter().enumerate() {
        checks.push(iterated.equal(img, &Term::var(i), budget));
    }
    let verdict = Verdict::all(checks);

    let points = iterated.sample_points(want, budget);
    let probes: Vec<Term> = [b.clone(), c.clone(), z.clone(), z.clone() * b.clone() + Term::one()]
        .into_iter()
        .chain(base.iter().cloned())
        .collect();
    let mut max_deviation = 0.0f64;
    for point in &points {
        let x = point.approx();
        let q: Vec<f64> = forward.images.iter().map(|t| eval_f64(t, &x)).collect();
        for (img, xi) in backward.images.iter().zip(&x) {
            max_deviation = max_deviation.max(deviation(eval_f64(img, &q), *xi));
        }
        for r in direct.relations() {
            max_deviation = max_deviation.max(eval_f64(r, &q).abs());
        }
        for e in &probes {
            max_deviation = max_deviation.max(deviation(eval_f64(e, &q), eval_f64(&forward.apply(e), &x)));
        }
    }
    Ok(ChainReport { iterated, direct, forward, backward, verdict, samples: points.len(), max_deviation })
}

/// `(A/I){a^-1}` against `A{a^-1}/<I>`.
#[derive(Clone, Debug)]
pub struct QuotientLocalizeReport {
    pub left: Presentation,
    pub right: Presentation,
    /// Variable renaming taking the left relations to the right ones.
    pub renaming: Option<Vec<usize>>,
    /// Sampled members of `<eta(I)>` have the form `eta(b)/eta(a)^d` with `b` in `I`.
    pub fraction_form: Verdict,
}

pub fn quotient_localize_commute(
    p: &Presentation,
    extra: &[Term],
    a: &Term,
    budget: &QueryBudget,
) -> Result<QuotientLocalizeReport, CringError> {
    let left = p.quotient(extra)?.0.localize(a)?.ring;
    let loc = p.localize(a)?;
    let images: Vec<Term> = extra.iter().map(|g| loc.inclusion.apply(g)).collect();
    let right = loc.ring.quotient(&images)?.0;
    let renaming = find_renaming(&left, &right)?;
    let y = Term::var(p.arity());
    let mut checks = Vec::new();
    // Members sum_i y^{k_i} g_i with k_i = i mod 3, and each y*g_i alone.
    let mut members: Vec<Vec<(u32, Term)>> = vec![images.iter().enumerate().map(|(i, g)| ((i % 3) as u32, g.clone())).collect()];
    members.extend(images.iter().map(|g| vec![(1, g.clone())]));
    for member in members.iter().filter(|m| !m.is_empty()) {
        let d = member.iter().map(|(k, _)| *k).max().unwrap_or(0);
        let m = Term::sum(member.iter().map(|(k, g)| y.pow(*k) * g.clone()).collect());
        let b = Term::sum(member.iter().map(|(k, g)| a.pow(d - k) * g.clone()).collect());
        checks.push(right.equal(&(m * a.pow(d)), &b, budget));
    }
    Ok(QuotientLocalizeReport { left, right, renaming, fraction_form: Verdict::all(checks) })
}

/// `A1{S1^-1} ⊗ A2{S2^-1}` against `(A1 ⊗ A2){(S1 ∪ S2)^-1}`.
#[derive(Clone, Debug)]
pub struct CoproductLocalizeReport {
    pub left: Presentation,
    pub right: Presentation,
    pub renaming: Option<Vec<usize>>,
    pub samples: usize,
    /// Largest right-hand relation value at renamed left sample points.
    pub max_deviation: f64,
}

pub fn coproduct_localize_commute(
    p1: &Presentation,
    s1: &[Term],
    p2: &Presentation,
    s2: &[Term],
    want: usize,
    budget: &QueryBudget,
) -> Result<CoproductLocalizeReport, CringError> {
    let l1 = p1.localize_set(s1)?;
    let l2 = p2.localize_set(s2)?;
    let (left, _, _) = l1.ring.coproduct(&l2.ring);
    let (both, i1, i2) = p1.coproduct(p2);
    let inverted: Vec<Term> = s1.iter().map(|s| i1.apply(s)).chain(s2.iter().map(|s| i2.apply(s))).collect();
    let right = both.localize_set(&inverted)?.ring;
    let renaming = find_renaming(&left, &right)?;
    let mut samples = 0;
    let mut max_deviation = 0.0f64;
    if let Some(pi) = &renaming {
        for point in left.sample_points(want, budget) {
            let x = point.approx();
            let mut q = vec![0.0; x.len()];
            for (i, v) in x.iter().enumerate() {
                q[pi[i]] = *v;
            }
            for r in right.relations() {
                max_deviation = max_deviation.max(eval_f64(r, &q).abs());
            }
            samples += 1;
        }
    }
    Ok(CoproductLocalizeReport { left, right, renaming, samples, max_deviation })
}

/// `A{e^-1}` against `A/(1 - e)` for an idempotent `e`.
#[derive(Clone, Debug)]
pub struct IdempotentReport {
    pub quotient: Presentation,
    pub localized: Presentation,
    /// `e^2 - e` is radical-zero.
    pub idempotent: Verdict,
    /// The zero sets correspond: `e = 1` on the localization, `e` is a unit in the quotient.
    pub verdict: Verdict,
}

pub fn invert_idempotent(p: &Presentation, e: &Term, budget: &QueryBudget) -> Result<IdempotentReport, CringError> {
    p.check_term(e)?;
    let idempotent = p.radical_zero(&(e.pow(2) - e.clone()), budget);
    if let Verdict::Refuted(w) = idempotent {
        return Err(CringError::NotIdempotent(Box::new(w)));
    }
    let one_minus = Term::one() - e.clone();
    let (quotient, _) = p.quotient(std::slice::from_ref(&one_minus))?;
    let localized = p.localize(e)?.ring;
    let verdict = Verdict::all([
        idempotent.clone(),
        localized.radical_zero(&one_minus, budget),
        quotient.is_invertible(e, budget),
    ]);
    Ok(IdempotentReport { quotient, localized, idempotent, verdict })
}

/// Condition (i) of the fraction-ring characterization for one element:
/// `sample * eta(multiplier) = eta(numerator)`.
#[derive(Clone, Debug)]
pub struct FractionCheck {
    pub sample: Term,
    pub multiplier: Term,
    pub numerator: Term,
    pub verdict: Verdict,
    /// When the sample is zero in the localization: `prod(S) * numerator`
    /// is zero in the base ring (condition (ii)).
    pub kernel: Option<Verdict>,
}

pub fn check_fraction_axioms(
    l: &Localized,
    samples: &[Term],
    budget: &QueryBudget,
) -> Result<Vec<FractionCheck>, CringError> {
    let base = &l.inclusion.source;
    let mut out = Vec::new();
    for sample in samples {
        l.ring.check_term(sample)?;
        let mut numerator = Poly::from_term(sample);
        let mut multiplier = Poly::constant(num_rational::BigRational::one());
        let mut clearable = true;
        for (&var, a) in l.fresh.iter().zip(&l.inverted).rev() {
            let Some(coeffs) = numerator.coefficients_in(&Atom::Var(var)) else {
                clearable = false;
                break;
            };
            let d = coeffs.len().saturating_sub(1);
            let ap = Poly::from_term(a);
            numerator = coeffs
                .iter()
                .enumerate()
                .fold(Poly::zero(), |acc, (k, c)| acc.add(&c.mul(&ap.pow((d - k) as u32))));
            multiplier = multiplier.mul(&ap.pow(d as u32));
        }
        let (multiplier, numerator) = (multiplier.to_term(), numerator.to_term());
        if !clearable {
            out.push(FractionCheck {
                sample: sample.clone(),
                multiplier,
                numerator,
                verdict: Verdict::unknown("a fresh variable occurs inside a primitive"),
                kernel: None,
            });
            continue;
        }
        let verdict = l.ring.equal(&(sample.clone() * multiplier.clone()), &numerator, budget);
        let kernel = l.ring.radical_zero(sample, budget).is_proved().then(|| {
            let all: Term = Term::product(l.inverted.clone());
            base.radical_zero(&(all * numerator.clone()), budget)
        });
        out.push(FractionCheck { sample: sample.clone(), multiplier, numerator, verdict, kernel });
    }
    Ok(out)
}
