//! Per-variable feature embedding of a polynomial set.
//!
//! For a variable `x_i` each non-constant polynomial is reduced to a list of
//! integers (an *extraction vector*), one of:
//!
//! * `I1`: degree of `x_i` in every monomial,
//! * `I2`: total degree of every monomial containing `x_i`,
//! * `I3`: 1 for every monomial containing `x_i`, 0 otherwise,
//! * `I4`: like `I2` but with a 0 for monomials without `x_i`.
//!
//! A feature is `outer_{p in S}(inner_{m in p}(I_j))` with `outer`, `inner`
//! drawn from max/sum/avg. Using `I1, I2, I3` gives 27 combinations; the
//! constant `max.max.I3` slot is dropped and the degree of `x_i` in the
//! sparsity graph is appended, for 27 features per variable.
//!
//! Slot order is fixed: outer op (max, sum, avg) major, inner op minor,
//! `j` innermost, graph degree last. See [`feature_names`].

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyset::{PolySet, VariableOrdering};

pub const FEATURES_PER_VARIABLE: usize = 27;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IVector {
    I1,
    I2,
    I3,
    I4,
}

impl IVector {
    pub fn from_index(j: u8) -> Option<Self> {
        match j {
            1 => Some(Self::I1),
            2 => Some(Self::I2),
            3 => Some(Self::I3),
            4 => Some(Self::I4),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::I1 => 1,
            Self::I2 => 2,
            Self::I3 => 3,
            Self::I4 => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Max,
    Sum,
    Avg,
}

impl Op {
    pub const ALL: [Op; 3] = [Op::Max, Op::Sum, Op::Avg];

    pub fn name(self) -> &'static str {
        match self {
            Op::Max => "max",
            Op::Sum => "sum",
            Op::Avg => "avg",
        }
    }

    fn apply(self, xs: &[BigRational]) -> BigRational {
        if xs.is_empty() {
            return BigRational::zero();
        }
        match self {
            Op::Max => xs.iter().max().cloned().expect("nonempty"),
            Op::Sum => xs.iter().sum(),
            Op::Avg => xs.iter().sum::<BigRational>() / BigRational::from_integer(BigInt::from(xs.len())),
        }
    }
}

/// `I_j` of one variable over the non-constant polynomials of a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionVectors {
    pub kind: IVector,
    pub values: Vec<Vec<u32>>,
}

pub fn extraction_vector(set: &PolySet, var: usize, kind: IVector) -> ExtractionVectors {
    let values = set
        .non_constant()
        .map(|p| {
            let terms = p.terms().iter();
            match kind {
                IVector::I1 => terms.map(|m| m.degree_in(var)).collect(),
                IVector::I2 => terms.filter(|m| m.contains(var)).map(|m| m.total_degree()).collect(),
                IVector::I3 => terms.map(|m| u32::from(m.contains(var))).collect(),
                IVector::I4 => terms
                    .map(|m| if m.contains(var) { m.total_degree() } else { 0 })
                    .collect(),
            }
        })
        .collect();
    ExtractionVectors { kind, values }
}

/// Exact value of `outer(inner(v))`. Empty sequences aggregate to 0.
pub fn aggregate_exact(outer: Op, inner: Op, v: &ExtractionVectors) -> BigRational {
    let per_poly: Vec<BigRational> = v
        .values
        .iter()
        .map(|xs| {
            let xs: Vec<BigRational> = xs.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            inner.apply(&xs)
        })
        .collect();
    outer.apply(&per_poly)
}

pub fn aggregate(outer: Op, inner: Op, v: &ExtractionVectors) -> f64 {
    aggregate_exact(outer, inner, v).to_f64().expect("finite rational")
}

/// Position of `outer.inner.I{j}` in a [`FeatureVector`], if it is a slot.
pub fn slot(outer: Op, inner: Op, kind: IVector) -> Option<usize> {
    template_slots().iter().position(|&s| s == (outer, inner, kind))
}

pub const GRAPH_DEGREE_SLOT: usize = FEATURES_PER_VARIABLE - 1;

fn template_slots() -> Vec<(Op, Op, IVector)> {
    let mut slots = Vec::with_capacity(26);
    for outer in Op::ALL {
        for inner in Op::ALL {
            for kind in [IVector::I1, IVector::I2, IVector::I3] {
                if (outer, inner, kind) != (Op::Max, Op::Max, IVector::I3) {
                    slots.push((outer, inner, kind));
                }
            }
        }
    }
    slots
}

/// Slot names, e.g. `avg.sum.I1` (outer, inner, vector), ending in `graphdeg`.
pub fn feature_names() -> Vec<String> {
    let mut names: Vec<String> = template_slots()
        .into_iter()
        .map(|(o, i, k)| format!("{}.{}.I{}", o.name(), i.name(), k.index()))
        .collect();
    names.push("graphdeg".into());
    names
}

/// CSV header for an embedding of `nvars` blocks, e.g. `v2.sum.avg.I1`, `v0.graphdeg`.
pub fn embedding_header(nvars: usize) -> Vec<String> {
    let names = feature_names();
    (0..nvars).flat_map(|k| names.iter().map(move |n| format!("v{k}.{n}"))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub variable: usize,
    pub values: Vec<f64>,
}

pub fn variable_features(set: &PolySet, var: usize) -> FeatureVector {
    let vectors = [IVector::I1, IVector::I2, IVector::I3].map(|k| extraction_vector(set, var, k));
    let mut values: Vec<f64> = template_slots()
        .into_iter()
        .map(|(outer, inner, kind)| aggregate(outer, inner, &vectors[kind.index() as usize - 1]))
        .collect();
    values.push(sparsity_graph(set).degree(var) as f64);
    FeatureVector { variable: var, values }
}

/// Variables as nodes, an edge wherever two variables share a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl SparsityGraph {
    pub fn degree(&self, var: usize) -> usize {
        self.adjacency[var].len()
    }

    pub fn neighbours(&self, var: usize) -> &BTreeSet<usize> {
        &self.adjacency[var]
    }

    /// Edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }
}

pub fn sparsity_graph(set: &PolySet) -> SparsityGraph {
    let mut adjacency = vec![BTreeSet::new(); set.nvars()];
    for p in set.polys() {
        let vars = p.variables();
        for &a in &vars {
            for &b in &vars {
                if a != b {
                    adjacency[a].insert(b);
                }
            }
        }
    }
    SparsityGraph { adjacency }
}

/// A flat model input together with the variable behind each 27-wide block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub values: Vec<f64>,
    pub blocks: Vec<usize>,
}

impl Embedding {
    pub fn from_blocks(blocks: Vec<FeatureVector>) -> Self {
        let order = blocks.iter().map(|b| b.variable).collect();
        let values = blocks.into_iter().flat_map(|b| b.values).collect();
        Self { values, blocks: order }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Blocks for `x1, x2, ...` in index order.
pub fn classification_embedding(set: &PolySet) -> Embedding {
    Embedding::from_blocks((0..set.nvars()).map(|v| variable_features(set, v)).collect())
}

/// Blocks in projection order: the first-projected variable comes first.
pub fn ordering_embedding(set: &PolySet, ordering: &VariableOrdering) -> Embedding {
    let blocks: Vec<FeatureVector> = (0..set.nvars()).map(|v| variable_features(set, v)).collect();
    Embedding::from_blocks(ordering.as_slice().iter().map(|&v| blocks[v].clone()).collect())
}

pub fn classification_embeddings(sets: &[PolySet]) -> Vec<Embedding> {
    sets.par_iter().map(classification_embedding).collect()
}

/// Column means and population standard deviations of a training matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::Data("cannot standardize an empty matrix".into()))?;
        let width = first.as_ref().len();
        if rows.iter().any(|r| r.as_ref().len() != width) {
            return Err(Error::Data("ragged feature matrix".into()));
        }
        let n = rows.len() as f64;
        let mut means = vec![0.0; width];
        for r in rows {
            for (m, x) in means.iter_mut().zip(r.as_ref()) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; width];
        for r in rows {
            for ((s, x), m) in stds.iter_mut().zip(r.as_ref()).zip(&means) {
                *s += (x - m) * (x - m);
            }
        }
        stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        Ok(Self { means, stds })
    }

    /// Zero-variance columns map to 0.
    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { 0.0 })
            .collect()
    }

    pub fn width(&self) -> usize {
        self.means.len()
    }
}

pub fn standardize_fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Standardizer> {
    Standardizer::fit(rows)
}

pub fn standardize_apply(z: &Standardizer, row: &[f64]) -> Vec<f64> {
    z.transform(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyset::{parse_polyset, Permutation};

    const F: &str = "2x1^3x2 + x1^2x2x3 + 2x1^2x3^3 - 3x1 - x2^3x3 - 4x3^2 + 7";

    #[test]
    fn worked_example_vectors() {
        let f = parse_polyset(F, 3).unwrap();
        assert_eq!(extraction_vector(&f, 0, IVector::I1).values, vec![vec![3, 2, 2, 1, 0, 0, 0]]);
        assert_eq!(extraction_vector(&f, 0, IVector::I2).values, vec![vec![4, 4, 5, 1]]);
        assert_eq!(extraction_vector(&f, 0, IVector::I3).values, vec![vec![1, 1, 1, 1, 0, 0, 0]]);
        assert_eq!(extraction_vector(&f, 0, IVector::I4).values, vec![vec![4, 4, 5, 1, 0, 0, 0]]);
        let s = parse_polyset(&format!("4x1^3x3 - x2x3 + 5x3^2 - 1; {F}"), 3).unwrap();
        let i1 = extraction_vector(&s, 0, IVector::I1);
        assert_eq!(i1.values, vec![vec![3, 0, 0, 0], vec![3, 2, 2, 1, 0, 0, 0]]);
        assert_eq!(aggregate(Op::Avg, Op::Sum, &i1), 5.5);
        let fv = variable_features(&s, 0);
        assert_eq!(fv.values[slot(Op::Avg, Op::Sum, IVector::I1).unwrap()], 5.5);
    }

    #[test]
    fn slots() {
        let names = feature_names();
        assert_eq!(names.len(), FEATURES_PER_VARIABLE);
        assert_eq!(slot(Op::Max, Op::Max, IVector::I3), None);
        assert_eq!(names[0], "max.max.I1");
        assert_eq!(names[GRAPH_DEGREE_SLOT], "graphdeg");
        assert_eq!(BTreeSet::from_iter(names.iter()).len(), 27);
    }

    #[test]
    fn graph_of_small_example() {
        let s = parse_polyset("x1^3x2 - x1 + 2; x2^4 - x3", 3).unwrap();
        let g = sparsity_graph(&s);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        let degs: Vec<f64> = (0..3).map(|v| variable_features(&s, v).values[GRAPH_DEGREE_SLOT]).collect();
        assert_eq!(degs, [1.0, 2.0, 1.0]);
        assert!(sparsity_graph(&parse_polyset("x1^2 + 1", 3).unwrap()).edges().is_empty());
        assert_eq!(sparsity_graph(&parse_polyset("x1x2x3", 3).unwrap()).edges().len(), 3);
    }

    #[test]
    fn absent_variable_gives_zero_i2_aggregates() {
        let s = parse_polyset("x2 + 1; x1x2", 3).unwrap();
        let i2 = extraction_vector(&s, 0, IVector::I2);
        assert_eq!(i2.values, vec![vec![], vec![2]]);
        assert_eq!(aggregate(Op::Sum, Op::Avg, &i2), 2.0);
        assert_eq!(aggregate(Op::Avg, Op::Max, &i2), 1.0);
        let none = extraction_vector(&s, 2, IVector::I2);
        for o in Op::ALL {
            for i in Op::ALL {
                assert_eq!(aggregate(o, i, &none), 0.0);
            }
        }
    }

    #[test]
    fn max_max_i3_is_one_when_present() {
        let s = parse_polyset("x1^2 - x2; x3^3 - 1", 3).unwrap();
        for v in 0..3 {
            assert_eq!(aggregate(Op::Max, Op::Max, &extraction_vector(&s, v, IVector::I3)), 1.0);
        }
    }

    #[test]
    fn embeddings() {
        let s = parse_polyset("x1^2 - x2; x3^3 - 1", 3).unwrap();
        let e = classification_embedding(&s);
        assert_eq!(e.len(), 81);
        assert_eq!(&e.values[27..54], variable_features(&s, 1).values.as_slice());
        assert_eq!(ordering_embedding(&s, &VariableOrdering::identity(3)), e);
        let distinct: BTreeSet<String> = VariableOrdering::all(3)
            .iter()
            .map(|o| format!("{:?}", ordering_embedding(&s, o).values))
            .collect();
        assert_eq!(distinct.len(), 6);
        let sigma = Permutation::new(vec![2, 0, 1]).unwrap();
        let t = s.apply_permutation(&sigma);
        for o in VariableOrdering::all(3) {
            assert_eq!(ordering_embedding(&s, &o).values, ordering_embedding(&t, &o.transport(&sigma)).values);
        }
    }

    #[test]
    fn standardizer() {
        let z = Standardizer::fit(&[vec![0.0, 5.0], vec![2.0, 5.0]]).unwrap();
        assert_eq!(z.transform(&[0.0, 5.0]), [-1.0, 0.0]);
        assert_eq!(z.transform(&[2.0, 7.0]), [1.0, 0.0]);
        assert!(Standardizer::fit::<Vec<f64>>(&[]).is_err());
    }
}
