//! Symbolic differentiation.

use super::{Node, Primitive, Term};

/// Partial derivative in `x_var`, not normalized.
pub(crate) fn derivative(t: &Term, var: usize) -> Term {
    match t.node() {
        Node::Const(_) => Term::zero(),
        Node::Var(i) => Term::int(i64::from(*i == var)),
        Node::Sum(ts) => Term::sum(ts.iter().map(|s| derivative(s, var)).collect()),
        Node::Product(ts) => {
            // Leibniz rule, one summand per factor.
            let mut parts = Vec::with_capacity(ts.len());
            for (k, f) in ts.iter().enumerate() {
                if !f.variables().contains(&var) {
                    continue;
                }
                let mut factors: Vec<Term> = ts.clone();
                factors[k] = derivative(f, var);
                parts.push(Term::product(factors));
            }
            Term::sum(parts)
        }
        Node::Neg(s) => -derivative(s, var),
        Node::Pow(_, 0) => Term::zero(),
        Node::Pow(base, e) => Term::product(vec![
            Term::int(i64::from(*e)),
            base.pow(e - 1),
            derivative(base, var),
        ]),
        Node::Prim(p, arg) => {
            if !arg.variables().contains(&var) {
                return Term::zero();
            }
            let inner = derivative(arg, var);
            let outer = match p {
                Primitive::Exp => Term::exp(arg.clone()),
                Primitive::Sin => Term::cos(arg.clone()),
                Primitive::Cos => -Term::sin(arg.clone()),
                // d/dt bump_k = -2t bump_{k+2} + 2k t bump_{k+1}
                Primitive::Bump(k) => {
                    let mut parts = vec![Term::product(vec![
                        Term::int(-2),
                        arg.clone(),
                        Term::prim(Primitive::Bump(k + 2), arg.clone()),
                    ])];
                    if *k > 0 {
                        parts.push(Term::product(vec![
                            Term::int(2 * i64::from(*k)),
                            arg.clone(),
                            Term::prim(Primitive::Bump(k + 1), arg.clone()),
                        ]));
                    }
                    Term::sum(parts)
                }
            };
            Term::product(vec![outer, inner])
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::rational::{int, rat};
    use crate::termlang::{eval, parse_term};

    fn central_difference(t: &crate::termlang::Term, x: f64) -> f64 {
        let h = 1e-6;
        (eval::eval_f64(t, &[x + h]) - eval::eval_f64(t, &[x - h])) / (2.0 * h)
    }

    #[test]
    fn polynomial_and_exponential_derivatives() {
        let t = parse_term("x0^2 - 1", 1).unwrap();
        assert_eq!(t.differentiate(0), parse_term("2*x0", 1).unwrap());
        let e = parse_term("exp(x0)", 1).unwrap();
        assert_eq!(e.differentiate(0), e);
        assert_eq!(t.differentiate(1), parse_term("0", 1).unwrap());
    }

    #[test]
    fn bump_derivative_vanishes_at_origin_and_matches_differences() {
        let b = parse_term("bump(x0)", 1).unwrap();
        let d = b.differentiate(0);
        assert_eq!(d.exact_value(&[int(0)]), Some(int(0)));
        for x in [-0.9, -0.5, -0.1, 0.3, 0.7, 0.95] {
            let exact = eval::eval_f64(&d, &[x]);
            assert!((exact - central_difference(&b, x)).abs() <= 1e-4 * (1.0 + exact.abs()), "at {x}");
        }
        // outside the support every derivative is exactly zero
        assert_eq!(d.exact_value(&[rat(3, 2)]), Some(int(0)));
    }

    #[test]
    fn higher_bump_derivatives_match_differences() {
        let b = parse_term("bump_2(x0) + sin(x0)*cos(x0)", 1).unwrap();
        let d = b.differentiate(0);
        for x in [-0.8, -0.2, 0.4, 0.85] {
            let exact = eval::eval_f64(&d, &[x]);
            assert!((exact - central_difference(&b, x)).abs() <= 1e-4 * (1.0 + exact.abs()));
        }
    }
}
