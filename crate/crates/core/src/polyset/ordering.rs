//! Variable orderings and variable renamings.
//!
//! Both are permutations of `0..n`, but they play different roles: an
//! [`VariableOrdering`] lists variables in projection order (first element is
//! eliminated first), a [`Permutation`] renames variable `i` to `images[i]`.
//! Orderings of `n` variables are indexed lexicographically, so for three
//! variables index 0..6 is `123, 132, 213, 231, 312, 321`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    for &x in v {
        if x >= v.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Lexicographic rank of a permutation of `0..n` (Lehmer code).
fn lex_rank(v: &[usize]) -> usize {
    let n = v.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller_later = v[i + 1..].iter().filter(|&&x| x < v[i]).count();
        rank += smaller_later * factorial(n - 1 - i);
    }
    rank
}

fn lex_unrank(n: usize, mut rank: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial(n - 1 - i);
        let pick = rank / f;
        rank %= f;
        out.push(pool.remove(pick));
    }
    out
}

/// Projection order: `order[0]` is the first variable eliminated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VariableOrdering {
    order: Vec<usize>,
}

impl VariableOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() || !is_permutation(&order) {
            return Err(Error::InvalidOrdering(format!("{order:?} is not a permutation")));
        }
        Ok(Self { order })
    }

    pub fn identity(nvars: usize) -> Self {
        Self { order: (0..nvars).collect() }
    }

    /// The ordering with lexicographic index `index` among all `nvars!` orderings.
    pub fn from_index(nvars: usize, index: usize) -> Result<Self> {
        if index >= factorial(nvars) {
            return Err(Error::InvalidOrdering(format!(
                "index {index} out of range for {nvars} variables"
            )));
        }
        Ok(Self { order: lex_unrank(nvars, index) })
    }

    /// All orderings of `nvars` variables in index order.
    pub fn all(nvars: usize) -> Vec<Self> {
        (0..factorial(nvars))
            .map(|i| Self { order: lex_unrank(nvars, i) })
            .collect()
    }

    pub fn index(&self) -> usize {
        lex_rank(&self.order)
    }

    pub fn nvars(&self) -> usize {
        self.order.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn first(&self) -> usize {
        self.order[0]
    }

    /// The ordering of the renamed problem: every variable `v` becomes `sigma(v)`.
    pub fn transport(&self, sigma: &Permutation) -> Self {
        Self { order: self.order.iter().map(|&v| sigma.image(v)).collect() }
    }
}

impl fmt::Display for VariableOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.order.iter().enumerate() {
            if k > 0 {
                f.write_str(">")?;
            }
            write!(f, "x{}", v + 1)?;
        }
        Ok(())
    }
}

impl FromStr for VariableOrdering {
    type Err = Error;

    /// Accepts `x2>x1>x3`.
    fn from_str(s: &str) -> Result<Self> {
        let order = s
            .split('>')
            .map(|tok| {
                let tok = tok.trim();
                tok.strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d >= 1)
                    .map(|d| d - 1)
                    .ok_or_else(|| Error::InvalidOrdering(format!("bad variable `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order)
    }
}

impl TryFrom<Vec<usize>> for VariableOrdering {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<VariableOrdering> for Vec<usize> {
    fn from(o: VariableOrdering) -> Self {
        o.order
    }
}

/// A renaming of variables: `i ↦ images[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        if !is_permutation(&images) {
            return Err(Error::InvalidOrdering(format!("{images:?} is not a permutation")));
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// Transposition of `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Self { images }
    }

    /// All `n!` renamings, lexicographic in their image vectors.
    pub fn all(n: usize) -> Vec<Self> {
        (0..factorial(n)).map(|i| Self { images: lex_unrank(n, i) }).collect()
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let index = rng.gen_range(0..factorial(n));
        Self { images: lex_unrank(n, index) }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }
}
