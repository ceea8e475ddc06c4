//! Projection phase of cylindrical algebraic decomposition.
//!
//! One projection step eliminates a variable `v` from a set and returns the
//! leading coefficients, discriminants and pairwise resultants with respect
//! to `v`, together with the polynomials that never mentioned `v`. Derived
//! polynomials are reduced to primitive parts with a positive leading
//! coefficient; constants are dropped.
//!
//! Resultants are computed with the subresultant PRS over `Z[other vars]`,
//! so every intermediate division is exact.
//!
//! [`proxy_cost`] sums `1 + total degree` over every polynomial of every
//! level of the projection cascade. It is a cheap, deterministic stand-in
//! for CAD running time and is not a measurement of any real CAD.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyset::{PolySet, Polynomial, VariableOrdering};

/// Dense univariate view in one variable; `coeffs[k]` multiplies `v^k`.
#[derive(Clone, Debug)]
struct UPoly {
    coeffs: Vec<Polynomial>,
}

impl UPoly {
    fn new(p: &Polynomial, var: usize) -> Self {
        let mut u = Self { coeffs: p.coefficients_in(var) };
        u.trim();
        u
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Polynomial::is_zero) {
            self.coeffs.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; only meaningful for nonzero polynomials.
    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lc(&self) -> &Polynomial {
        self.coeffs.last().expect("nonzero")
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
    fn prem(&self, b: &UPoly) -> UPoly {
        let db = b.degree();
        let delta = self.degree() + 1 - db;
        let lcb = b.lc();
        let mut r = self.clone();
        let mut steps = 0;
        while !r.is_zero() && r.degree() >= db {
            let shift = r.degree() - db;
            let lcr = r.lc().clone();
            let mut next: Vec<Polynomial> = r.coeffs.iter().map(|c| c * lcb).collect();
            for (k, bc) in b.coeffs.iter().enumerate() {
                next[k + shift] = &next[k + shift] - &(&lcr * bc);
            }
            r = UPoly { coeffs: next };
            r.trim();
            steps += 1;
        }
        let pad = lcb.pow((delta - steps) as u32);
        if !pad.is_one() {
            for c in &mut r.coeffs {
                *c = &*c * &pad;
            }
        }
        r
    }

    fn exact_div_scalar(&self, d: &Polynomial) -> UPoly {
        UPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.exact_div(d).expect("subresultant division is exact"))
                .collect(),
        }
    }
}

fn div_exact(a: &Polynomial, b: &Polynomial) -> Polynomial {
    a.exact_div(b).expect("subresultant division is exact")
}

fn subresultant(mut a: UPoly, mut b: UPoly, nvars: usize) -> Polynomial {
    let mut negate = false;
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            negate = true;
        }
    }
    let finish = |p: Polynomial, negate: bool| if negate { -&p } else { p };
    if b.degree() == 0 {
        return finish(b.lc().pow(a.degree() as u32), negate);
    }
    let mut g = Polynomial::one(nvars);
    let mut h = Polynomial::one(nvars);
    loop {
        let delta = a.degree() - b.degree();
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            negate = !negate;
        }
        let r = a.prem(&b);
        if r.is_zero() {
            return Polynomial::zero(nvars);
        }
        a = b;
        b = r.exact_div_scalar(&(&g * &h.pow(delta as u32)));
        g = a.lc().clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            d => div_exact(&g.pow(d as u32), &h.pow(d as u32 - 1)),
        };
        if b.degree() == 0 {
            break;
        }
    }
    let da = a.degree() as u32;
    let res = div_exact(&b.lc().pow(da), &h.pow(da - 1));
    finish(res, negate)
}

/// Resultant of `p` and `q` with respect to `var`.
///
/// Both must have positive degree in `var`.
pub fn resultant(p: &Polynomial, q: &Polynomial, var: usize) -> Result<Polynomial> {
    if p.var_degree(var) == 0 || q.var_degree(var) == 0 {
        return Err(Error::Precondition(format!(
            "resultant needs both arguments to contain x{}",
            var + 1
        )));
    }
    Ok(subresultant(UPoly::new(p, var), UPoly::new(q, var), p.nvars()))
}

/// `res_var(p, dp/dvar)`, not divided by the leading coefficient.
pub fn discriminant(p: &Polynomial, var: usize) -> Result<Polynomial> {
    if p.var_degree(var) < 2 {
        return Err(Error::Precondition(format!("discriminant needs degree >= 2 in x{}", var + 1)));
    }
    resultant(p, &p.derivative(var), var)
}

/// Leading coefficient of `p` viewed as a polynomial in `var`.
pub fn leading_coefficient(p: &Polynomial, var: usize) -> Polynomial {
    p.coefficients_in(var).pop().unwrap_or_else(|| Polynomial::zero(p.nvars()))
}

/// Eliminates `var` from `set`.
pub fn project_step(set: &PolySet, var: usize) -> PolySet {
    let nvars = set.nvars();
    let (with, without): (Vec<&Polynomial>, Vec<&Polynomial>) =
        set.non_constant().partition(|p| p.contains_var(var));

    let mut derived = Vec::new();
    for p in &with {
        derived.push(leading_coefficient(p, var));
        if p.var_degree(var) >= 2 {
            derived.push(discriminant(p, var).expect("degree checked"));
        }
    }
    for (i, p) in with.iter().enumerate() {
        for q in &with[i + 1..] {
            derived.push(resultant(p, q, var).expect("both contain var"));
        }
    }

    let mut seen: HashSet<Polynomial> = without.iter().map(|p| p.primitive_part()).collect();
    let mut out: Vec<Polynomial> = without.into_iter().cloned().collect();
    for d in derived {
        if d.is_constant() {
            continue;
        }
        let pp = d.primitive_part();
        if seen.insert(pp.clone()) {
            out.push(pp);
        }
    }
    PolySet::new(nvars, out).expect("same variable count")
}

/// Anything able to eliminate one variable from a polynomial set.
pub trait Projector: Sync {
    fn project(&self, set: &PolySet, var: usize) -> PolySet;
}

/// The operator of [`project_step`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ProjectionOperator;

impl Projector for ProjectionOperator {
    fn project(&self, set: &PolySet, var: usize) -> PolySet {
        project_step(set, var)
    }
}

/// Leaves the set as it is: later choices are made on the original input.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoProjection;

impl Projector for NoProjection {
    fn project(&self, set: &PolySet, _var: usize) -> PolySet {
        set.clone()
    }
}

/// The sets `S_n, S_{n-1}, ..., S_1` produced by projecting in `ordering`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionCascade {
    pub levels: Vec<PolySet>,
    pub ordering: VariableOrdering,
}

pub fn cascade(set: &PolySet, ordering: &VariableOrdering) -> ProjectionCascade {
    let mut levels = vec![set.clone()];
    for &v in &ordering.as_slice()[..ordering.nvars() - 1] {
        let next = project_step(levels.last().expect("nonempty"), v);
        levels.push(next);
    }
    ProjectionCascade { levels, ordering: ordering.clone() }
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ProxyCost(pub f64);

fn level_cost(set: &PolySet) -> u64 {
    set.non_constant().map(|p| 1 + u64::from(p.total_degree())).sum()
}

impl ProjectionCascade {
    pub fn cost(&self) -> ProxyCost {
        ProxyCost(self.levels.iter().map(level_cost).sum::<u64>() as f64)
    }
}

pub fn proxy_cost(set: &PolySet, ordering: &VariableOrdering) -> ProxyCost {
    cascade(set, ordering).cost()
}

/// Proxy costs of all `nvars!` orderings, in ordering-index order.
///
/// Cascades sharing a prefix share their projections.
pub fn proxy_costs(set: &PolySet) -> Vec<ProxyCost> {
    fn walk(set: &PolySet, remaining: &[usize], acc: u64, out: &mut Vec<u64>) {
        let acc = acc + level_cost(set);
        if remaining.len() <= 1 {
            out.push(acc);
            return;
        }
        for (i, &v) in remaining.iter().enumerate() {
            let mut rest = remaining.to_vec();
            rest.remove(i);
            walk(&project_step(set, v), &rest, acc, out);
        }
    }
    let vars: Vec<usize> = (0..set.nvars()).collect();
    if vars.len() == 1 {
        return vec![ProxyCost(level_cost(set) as f64)];
    }
    let per_first: Vec<Vec<u64>> = vars
        .par_iter()
        .map(|&v| {
            let mut rest = vars.clone();
            rest.retain(|&x| x != v);
            let mut out = Vec::new();
            walk(&project_step(set, v), &rest, level_cost(set), &mut out);
            out
        })
        .collect();
    per_first.into_iter().flatten().map(|c| ProxyCost(c as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyset::{parse_polynomial, parse_polyset, Permutation};

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, 2).unwrap()
    }

    #[test]
    fn small_resultants() {
        assert_eq!(resultant(&p("x1^2 - x2"), &p("x1 - 1"), 0).unwrap(), p("1 - x2"));
        let r = resultant(&p("x1 - x2"), &p("x1 - 3"), 0).unwrap();
        assert!(r == p("x2 - 3") || r == p("3 - x2"));
        assert_eq!(discriminant(&p("x1^2 - x2"), 0).unwrap(), p("-4x2"));
        assert!(discriminant(&p("x1^2"), 0).unwrap().is_zero());
        assert!(resultant(&p("x2"), &p("x1"), 0).is_err());
        assert!(discriminant(&p("x1 + x2"), 0).is_err());
    }

    #[test]
    fn resultant_antisymmetry_sign() {
        let a = p("x1^3 - x2x1 + 2");
        let b = p("x1^3 + x2");
        let ab = resultant(&a, &b, 0).unwrap();
        let ba = resultant(&b, &a, 0).unwrap();
        assert_eq!(ab, -&ba);
    }

    #[test]
    fn step_examples() {
        let s = parse_polyset("x1^2 - x2; x3^3 - 1", 3).unwrap();
        let t = project_step(&s, 0);
        assert_eq!(t, parse_polyset("x2; x3^3 - 1", 3).unwrap());
        let u = parse_polyset("x2^2 + x3; x3 - 5", 3).unwrap();
        assert_eq!(project_step(&u, 0), u);
        let uni = parse_polyset("x1^2 - 2; x1 + 1", 3).unwrap();
        assert!(project_step(&uni, 0).is_empty());
    }

    #[test]
    fn cascade_shapes() {
        let s = parse_polyset("x1^8 - x2; x2 - x3", 3).unwrap();
        let first = cascade(&s, &"x1>x2>x3".parse().unwrap());
        assert_eq!(first.levels.len(), 3);
        assert_eq!(first.levels[1], parse_polyset("x2^7; x2 - x3", 3).unwrap());
        assert_eq!(first.levels[2], parse_polyset("x3^7", 3).unwrap());
        assert_eq!(first.cost(), ProxyCost((9.0 + 2.0) + (8.0 + 2.0) + 8.0));
        let last = cascade(&s, &"x2>x3>x1".parse().unwrap());
        assert_eq!(last.levels[1], parse_polyset("x1^8 - x3", 3).unwrap());
        assert!(last.levels[2].is_empty());
        assert_eq!(last.cost(), ProxyCost(11.0 + 9.0));
        assert_ne!(first.cost(), last.cost());
    }

    #[test]
    fn shared_prefix_costs_match_direct_cascades() {
        let s = parse_polyset("x1^2x2 - x3 + 1; x2^2 - x1x3; x3^2 - x1", 3).unwrap();
        let shared = proxy_costs(&s);
        for o in VariableOrdering::all(3) {
            assert_eq!(shared[o.index()], proxy_cost(&s, &o));
        }
        let sigma = Permutation::new(vec![1, 2, 0]).unwrap();
        let t = s.apply_permutation(&sigma);
        for o in VariableOrdering::all(3) {
            assert_eq!(proxy_cost(&s, &o), proxy_cost(&t, &o.transport(&sigma)));
        }
    }

    #[test]
    fn univariate_single_variable_cost() {
        let s = parse_polyset("x1^3 - 2; x1 + 4", 1).unwrap();
        assert_eq!(proxy_costs(&s), vec![ProxyCost(4.0 + 2.0)]);
    }
}
