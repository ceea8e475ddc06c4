//! Ring operations on [`Polynomial`].

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Monomial, Polynomial};

fn check_nvars(a: &Polynomial, b: &Polynomial) {
    assert_eq!(a.nvars, b.nvars, "polynomials over different variable counts");
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        check_nvars(self, rhs);
        let terms = self.terms.iter().chain(&rhs.terms).map(|t| (t.exponents.clone(), t.coeff.clone()));
        Polynomial::from_terms(self.nvars, terms)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        check_nvars(self, rhs);
        let terms = self
            .terms
            .iter()
            .map(|t| (t.exponents.clone(), t.coeff.clone()))
            .chain(rhs.terms.iter().map(|t| (t.exponents.clone(), -&t.coeff)));
        Polynomial::from_terms(self.nvars, terms)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Monomial { exponents: t.exponents.clone(), coeff: -&t.coeff })
                .collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        check_nvars(self, rhs);
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for a in &self.terms {
            for b in &rhs.terms {
                let e: Vec<u32> = a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += &a.coeff * &b.coeff;
            }
        }
        Polynomial::from_terms(self.nvars, acc)
    }
}

impl Polynomial {
    pub fn scale(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Monomial { exponents: t.exponents.clone(), coeff: &t.coeff * c })
                .collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].total_degree() == 0 && self.terms[0].coeff.is_one()
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut out = Polynomial::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|t| t.exponents[var] > 0).map(|t| {
            let mut e = t.exponents.clone();
            let k = e[var];
            e[var] -= 1;
            (e, &t.coeff * BigInt::from(k))
        });
        Polynomial::from_terms(self.nvars, terms)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `var`;
    /// entry `k` multiplies `var^k`. Empty for the zero polynomial.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.var_degree(var) as usize;
        if self.is_zero() {
            return Vec::new();
        }
        let mut buckets: Vec<Vec<(Vec<u32>, BigInt)>> = vec![Vec::new(); deg + 1];
        for t in &self.terms {
            let mut e = t.exponents.clone();
            let k = e[var] as usize;
            e[var] = 0;
            buckets[k].push((e, t.coeff.clone()));
        }
        buckets.into_iter().map(|b| Polynomial::from_terms(self.nvars, b)).collect()
    }

    /// Inverse of [`Polynomial::coefficients_in`].
    pub fn from_coefficients(nvars: usize, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let terms = coeffs.iter().enumerate().flat_map(|(k, c)| {
            c.terms.iter().map(move |t| {
                let mut e = t.exponents.clone();
                e[var] += k as u32;
                (e, t.coeff.clone())
            })
        });
        Polynomial::from_terms(nvars, terms)
    }

    /// Substitutes the integer `value` for `var`.
    pub fn substitute(&self, var: usize, value: &BigInt) -> Polynomial {
        let terms = self.terms.iter().map(|t| {
            let mut e = t.exponents.clone();
            let k = e[var];
            e[var] = 0;
            (e, &t.coeff * value.pow(k))
        });
        Polynomial::from_terms(self.nvars, terms)
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        check_nvars(self, divisor);
        let lead = divisor.terms.first()?;
        let mut rem: BTreeMap<Vec<u32>, BigInt> =
            self.terms.iter().map(|t| (t.exponents.clone(), t.coeff.clone())).collect();
        let mut quotient = Vec::new();
        while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lead.exponents).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = c.div_rem(&lead.coeff);
            if !r.is_zero() {
                return None;
            }
            let qe: Vec<u32> = e.iter().zip(&lead.exponents).map(|(a, b)| a - b).collect();
            for t in &divisor.terms {
                let te: Vec<u32> = t.exponents.iter().zip(&qe).map(|(a, b)| a + b).collect();
                match rem.entry(te) {
                    Entry::Occupied(mut o) => {
                        *o.get_mut() -= &t.coeff * &q;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                    Entry::Vacant(v) => {
                        v.insert(-(&t.coeff * &q));
                    }
                }
            }
            quotient.push((qe, q));
        }
        Some(Polynomial::from_terms(self.nvars, quotient))
    }

    /// Non-negative gcd of the integer coefficients.
    pub fn content(&self) -> BigInt {
        self.terms.iter().fold(BigInt::zero(), |g, t| g.gcd(&t.coeff))
    }

    /// `self` divided by its content, with positive leading coefficient.
    pub fn primitive_part(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.terms[0].coeff.is_negative() {
            g = -g;
        }
        if g.is_one() {
            return self.clone();
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Monomial { exponents: t.exponents.clone(), coeff: &t.coeff / &g })
                .collect(),
        }
    }
}
