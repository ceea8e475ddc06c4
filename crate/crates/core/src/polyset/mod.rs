//! Sparse multivariate polynomials with arbitrary-precision integer
//! coefficients, and sets of them.
//!
//! Variables are dense indices `0..nvars`, printed as `x1..xn`. Monomials are
//! kept in lexicographically descending exponent order (`x1 > x2 > ...`), so
//! structural equality coincides with mathematical equality. A [`PolySet`]
//! keeps its polynomials sorted and free of duplicates.

mod arith;
mod ordering;
mod parse;
pub mod smtlib;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use ordering::{factorial, Permutation, VariableOrdering};
pub use parse::{parse_polynomial, parse_polyset};
pub use smtlib::parse_smtlib_atoms;

/// One term: a nonzero coefficient times a power product.
///
/// `exponents` is dense (one entry per variable of the owning polynomial).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: BigInt,
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.exponents[var]
    }

    pub fn contains(&self, var: usize) -> bool {
        self.exponents[var] > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c.into())])
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    /// The polynomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self::from_terms(nvars, [(e, BigInt::one())])
    }

    /// Builds a canonical polynomial, merging like terms and dropping zeros.
    ///
    /// Panics if an exponent vector has the wrong length.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            *acc.entry(e).or_insert_with(BigInt::zero) += c;
        }
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(exponents, coeff)| Monomial { exponents, coeff })
            .collect();
        Self { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in canonical (lex-descending) order.
    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for nonzero and zero constants alike.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.total_degree() == 0)
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.is_constant() {
            Some(self.terms[0].coeff.clone())
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Highest exponent of `var` over all monomials; 0 if absent.
    pub fn var_degree(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.exponents[var]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.iter().any(|t| t.exponents[var] > 0)
    }

    /// Indices of variables that occur in some monomial.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.contains_var(v)).collect()
    }

    /// Coefficient of the first term in canonical order.
    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.first().map(|t| &t.coeff)
    }

    /// Renames variable `i` to `sigma(i)`.
    pub fn permute(&self, sigma: &Permutation) -> Self {
        assert_eq!(sigma.len(), self.nvars, "permutation size");
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|t| {
                let mut e = vec![0; self.nvars];
                for (i, &x) in t.exponents.iter().enumerate() {
                    e[sigma.image(i)] = x;
                }
                (e, t.coeff.clone())
            }),
        )
    }
}

impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nvars.cmp(&other.nvars).then_with(|| {
            for (a, b) in self.terms.iter().zip(&other.terms) {
                let c = a.exponents.cmp(&b.exponents).then_with(|| a.coeff.cmp(&b.coeff));
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.terms.len().cmp(&other.terms.len())
        })
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = t.coeff.abs();
            let mut wrote = false;
            if !mag.is_one() || t.total_degree() == 0 {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (v, &e) in t.exponents.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    f.write_str("*")?;
                }
                write!(f, "x{}", v + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

/// A set of polynomials in `nvars` variables: sorted, no duplicates, no zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolySet {
    nvars: usize,
    polys: Vec<Polynomial>,
}

impl PolySet {
    /// Canonicalizes `polys`, dropping zeros and duplicates.
    pub fn new(nvars: usize, polys: impl IntoIterator<Item = Polynomial>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::Precondition("a polynomial set needs at least one variable".into()));
        }
        let mut out = Vec::new();
        for p in polys {
            if p.nvars != nvars {
                return Err(Error::Precondition(format!(
                    "polynomial in {} variables added to a set over {nvars}",
                    p.nvars
                )));
            }
            if !p.is_zero() {
                out.push(p);
            }
        }
        out.sort();
        out.dedup();
        Ok(Self { nvars, polys: out })
    }

    pub fn empty(nvars: usize) -> Self {
        Self { nvars, polys: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Polynomials that mention at least one variable.
    pub fn non_constant(&self) -> impl Iterator<Item = &Polynomial> {
        self.polys.iter().filter(|p| !p.is_constant())
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.polys.iter().any(|p| p.contains_var(var))
    }

    pub fn apply_permutation(&self, sigma: &Permutation) -> Self {
        let polys = self.polys.iter().map(|p| p.permute(sigma));
        Self::new(self.nvars, polys).expect("renaming preserves validity")
    }

    /// Degree of `var` in the product of all polynomials.
    pub fn product_degree(&self, var: usize) -> u32 {
        product_degree(self, var)
    }
}

impl fmt::Display for PolySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.polys.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

pub fn apply_permutation(set: &PolySet, sigma: &Permutation) -> PolySet {
    set.apply_permutation(sigma)
}

pub fn var_degree(p: &Polynomial, var: usize) -> u32 {
    p.var_degree(var)
}

pub fn product_degree(set: &PolySet, var: usize) -> u32 {
    set.polys.iter().map(|p| p.var_degree(var)).sum()
}
