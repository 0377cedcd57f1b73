//! Splitting a query along the written shape of its terms.
//!
//! `Z(b^k) = Z(b)`, `Z(sum b_i^(2k_i)) = ∩ Z(b_i)` and
//! `Z(a b) = Z(a) ∪ Z(b)`; a vanishing target that is a power or a sum of
//! even powers vanishes iff each base does. Splitting removes the
//! tangential zeros that interval search cannot resolve.

use super::{Query, Target};
use crate::termlang::{Node, Term};

const MAX_PARTS: usize = 64;

/// Sub-queries that all hold iff the query holds, or `None` if the
/// shapes give nothing to split.
pub(super) fn split(q: &Query) -> Option<Vec<Query>> {
    let mut changed = false;
    let mut flat = Vec::new();
    for c in &q.constraints {
        changed |= flatten(c, &mut flat);
    }
    let mut constraint_sets = vec![flat.clone()];
    if let Some((pos, fs)) = flat.iter().enumerate().find_map(|(i, c)| factors(c).map(|fs| (i, fs))) {
        constraint_sets = fs
            .into_iter()
            .map(|f| {
                let mut cs = flat.clone();
                cs[pos] = f;
                cs
            })
            .collect();
    }
    let targets = match &q.target {
        Target::Vanishes { term } => match bases(term) {
            Some(bs) => bs.into_iter().map(|term| Target::Vanishes { term }).collect(),
            None => vec![q.target.clone()],
        },
        t => vec![t.clone()],
    };
    let parts = constraint_sets.len() * targets.len();
    if (!changed && parts == 1) || parts > MAX_PARTS {
        return None;
    }
    let mut out = Vec::with_capacity(parts);
    for cs in &constraint_sets {
        for t in &targets {
            out.push(Query { region: q.region.clone(), constraints: cs.clone(), target: t.clone() });
        }
    }
    Some(out)
}

fn even_power_base(t: &Term) -> Option<&Term> {
    match t.node() {
        Node::Pow(b, k) if k % 2 == 0 && *k > 0 => Some(b),
        _ => None,
    }
}

/// Pushes terms with the same common zero set as `c`; true if `c` was rewritten.
fn flatten(c: &Term, out: &mut Vec<Term>) -> bool {
    match c.node() {
        Node::Pow(b, k) if *k > 0 => {
            flatten(b, out);
            true
        }
        Node::Neg(b) => {
            flatten(b, out);
            true
        }
        Node::Sum(ts) if ts.len() > 1 && ts.iter().all(|t| even_power_base(t).is_some()) => {
            for t in ts {
                flatten(even_power_base(t).expect("checked"), out);
            }
            true
        }
        _ => {
            out.push(c.clone());
            false
        }
    }
}

/// The nonconstant factors of a product with at least two of them, all
/// other factors being nonzero constants.
fn factors(c: &Term) -> Option<Vec<Term>> {
    let Node::Product(ts) = c.node() else { return None };
    let mut out = Vec::new();
    for t in ts {
        match t.as_constant() {
            Some(q) if q.numer().sign() == num_bigint::Sign::NoSign => return None,
            Some(_) => {}
            None => out.push(t.clone()),
        }
    }
    (out.len() >= 2).then_some(out)
}

/// Bases whose joint vanishing is equivalent to the vanishing of `g`.
fn bases(g: &Term) -> Option<Vec<Term>> {
    let mut out = Vec::new();
    flatten(g, &mut out).then_some(out)
}
