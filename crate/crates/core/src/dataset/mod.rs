//! Problem records with per-ordering timings, and the transformations that
//! turn them into training data.
//!
//! Timing arrays are indexed by [`VariableOrdering::index`]; `None` marks a
//! timeout. A timed-out ordering is scored as twice the time limit.
//!
//! Renaming the variables of a record (balancing, augmentation) moves every
//! timing to the slot of the renamed ordering, so the best ordering is
//! carried along with the polynomials. The renamed record remembers its
//! transported label, which keeps exact timing ties from changing labels.

mod io;
pub mod synth;

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{classification_embedding, variable_features, Embedding, FeatureVector};
use crate::polyset::{factorial, Permutation, PolySet, VariableOrdering};
use crate::projection::project_step;

pub use io::{
    read_problems, read_raw_problems, write_atomic, write_classification_csv, write_ordering_csv,
    write_problems, write_raw_problems, write_variable_csv, RawProblem,
};

/// Seconds, or `None` for a timeout.
pub type Timing = Option<f64>;

pub fn penalized_time(t: Timing, limit: f64) -> f64 {
    t.unwrap_or(2.0 * limit)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemRecord {
    pub id: String,
    pub source: String,
    pub set: PolySet,
    pub timings: Vec<Timing>,
    pub timeout_limit: f64,
    pub cells: Option<Vec<u64>>,
    /// Label carried over from the record this one was renamed from.
    pub label: Option<VariableOrdering>,
}

impl ProblemRecord {
    pub fn new(
        id: impl Into<String>,
        source: impl Into<String>,
        set: PolySet,
        timings: Vec<Timing>,
        timeout_limit: f64,
        cells: Option<Vec<u64>>,
    ) -> Result<Self> {
        let id = id.into();
        let n = factorial(set.nvars());
        if timings.len() != n {
            return Err(Error::Data(format!(
                "record `{id}`: {} timings for {} orderings",
                timings.len(),
                n
            )));
        }
        if timings.iter().flatten().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Data(format!("record `{id}`: timings must be finite and non-negative")));
        }
        if timings.iter().all(Option::is_none) {
            return Err(Error::Data(format!("record `{id}`: every ordering timed out")));
        }
        if !(timeout_limit.is_finite() && timeout_limit > 0.0) {
            return Err(Error::Data(format!("record `{id}`: timeout limit must be positive")));
        }
        if cells.as_ref().is_some_and(|c| c.len() != n) {
            return Err(Error::Data(format!("record `{id}`: cell counts need one entry per ordering")));
        }
        Ok(Self { id, source: source.into(), set, timings, timeout_limit, cells, label: None })
    }

    pub fn nvars(&self) -> usize {
        self.set.nvars()
    }

    pub fn penalized(&self, ordering: &VariableOrdering) -> f64 {
        penalized_time(self.timings[ordering.index()], self.timeout_limit)
    }

    pub fn penalized_times(&self) -> Vec<f64> {
        self.timings.iter().map(|&t| penalized_time(t, self.timeout_limit)).collect()
    }

    /// Fastest time over all orderings.
    pub fn optimal_time(&self) -> f64 {
        self.penalized_times().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Renames variable `i` to `sigma(i)` and moves the timings accordingly.
    pub fn permute(&self, sigma: &Permutation) -> ProblemRecord {
        let n = self.nvars();
        let mut timings = vec![None; self.timings.len()];
        let mut cells = self.cells.as_ref().map(|c| vec![0; c.len()]);
        for o in VariableOrdering::all(n) {
            let to = o.transport(sigma).index();
            timings[to] = self.timings[o.index()];
            if let (Some(dst), Some(src)) = (cells.as_mut(), self.cells.as_ref()) {
                dst[to] = src[o.index()];
            }
        }
        ProblemRecord {
            id: self.id.clone(),
            source: self.source.clone(),
            set: self.set.apply_permutation(sigma),
            timings,
            timeout_limit: self.timeout_limit,
            cells,
            label: Some(best_ordering(self).transport(sigma)),
        }
    }
}

/// Lowest-index ordering attaining the minimal penalized time.
pub fn fastest_ordering(r: &ProblemRecord) -> VariableOrdering {
    let times = r.penalized_times();
    let mut best = 0;
    for (i, &t) in times.iter().enumerate() {
        if t < times[best] {
            best = i;
        }
    }
    VariableOrdering::from_index(r.nvars(), best).expect("index in range")
}

/// The record's label: its transported label if renamed, else [`fastest_ordering`].
pub fn best_ordering(r: &ProblemRecord) -> VariableOrdering {
    r.label.clone().unwrap_or_else(|| fastest_ordering(r))
}

#[derive(PartialEq, Eq, Hash)]
enum Signature {
    Cells(Vec<u64>),
    Timings(Vec<Option<u64>>),
}

/// Keeps the first of every group of records with identical cell counts
/// (or identical timing arrays when cell counts are absent).
pub fn dedup(records: &[ProblemRecord]) -> Vec<ProblemRecord> {
    let mut seen = HashSet::new();
    records
        .iter()
        .filter(|r| {
            let sig = match &r.cells {
                Some(c) => Signature::Cells(c.clone()),
                None => Signature::Timings(r.timings.iter().map(|t| t.map(f64::to_bits)).collect()),
            };
            seen.insert(sig)
        })
        .cloned()
        .collect()
}

/// Fold of every source (and so of every record).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub by_source: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, r: &ProblemRecord) -> usize {
        self.by_source[&r.source]
    }

    /// `(training, test)` records for held-out fold `fold`, each in input order.
    pub fn partition(&self, records: &[ProblemRecord], fold: usize) -> (Vec<ProblemRecord>, Vec<ProblemRecord>) {
        records.iter().cloned().partition(|r| self.fold_of(r) != fold)
    }

    pub fn fold_sizes(&self, records: &[ProblemRecord]) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for r in records {
            sizes[self.fold_of(r)] += 1;
        }
        sizes
    }
}

/// Assigns whole sources to `k` folds: largest source first, each onto the
/// currently smallest fold. Equal-sized sources are visited in seeded random order.
pub fn split_folds(records: &[ProblemRecord], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k == 0 {
        return Err(Error::Config("need at least one fold".into()));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(r.source.as_str()).or_default() += 1;
    }
    let mut groups: Vec<(&str, usize)> = counts.into_iter().collect();
    groups.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    groups.sort_by(|a, b| b.1.cmp(&a.1));
    let mut sizes = vec![0usize; k];
    let mut by_source = BTreeMap::new();
    for (source, n) in groups {
        let fold = (0..k).min_by_key(|&f| (sizes[f], f)).expect("k > 0");
        sizes[fold] += n;
        by_source.insert(source.to_string(), fold);
    }
    Ok(FoldAssignment { k, by_source })
}

/// Renames every record by an independent uniformly random permutation.
pub fn balance(records: &[ProblemRecord], seed: u64) -> Vec<ProblemRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records
        .iter()
        .map(|r| r.permute(&Permutation::random(r.nvars(), &mut rng)))
        .collect()
}

/// Every record under every renaming of its variables (`nvars!` each).
pub fn augment(records: &[ProblemRecord]) -> Vec<ProblemRecord> {
    records
        .par_iter()
        .flat_map_iter(|r| {
            Permutation::all(r.nvars()).into_iter().map(move |sigma| {
                let mut p = r.permute(&sigma);
                let tag: String = sigma.images().iter().map(|i| (i + 1).to_string()).collect();
                p.id = format!("{}~{tag}", r.id);
                p
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationInstance {
    pub embedding: Embedding,
    pub label: VariableOrdering,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingRegressionInstance {
    pub embedding: Embedding,
    pub ordering: VariableOrdering,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariableRegressionInstance {
    pub features: FeatureVector,
    pub target: f64,
}

/// How variable-regression instances are drawn from a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VariableInstances {
    /// One instance per variable, from the input set.
    #[default]
    Original,
    /// Additionally, one instance per remaining variable of every projected
    /// intermediate set, labelled by the orderings extending that prefix.
    Projected,
}

pub fn build_classification(records: &[ProblemRecord]) -> Vec<ClassificationInstance> {
    records
        .par_iter()
        .map(|r| ClassificationInstance { embedding: classification_embedding(&r.set), label: best_ordering(r) })
        .collect()
}

pub fn build_ordering_regression(records: &[ProblemRecord]) -> Vec<OrderingRegressionInstance> {
    records
        .par_iter()
        .flat_map_iter(|r| {
            let blocks: Vec<FeatureVector> = (0..r.nvars()).map(|v| variable_features(&r.set, v)).collect();
            VariableOrdering::all(r.nvars()).into_iter().map(move |o| {
                let embedding =
                    Embedding::from_blocks(o.as_slice().iter().map(|&v| blocks[v].clone()).collect());
                OrderingRegressionInstance { embedding, target: r.penalized(&o), ordering: o }
            })
        })
        .collect()
}

/// Fastest penalized time among orderings that start with `prefix`.
pub fn best_time_with_prefix(r: &ProblemRecord, prefix: &[usize]) -> f64 {
    VariableOrdering::all(r.nvars())
        .iter()
        .filter(|o| o.as_slice().starts_with(prefix))
        .map(|o| r.penalized(o))
        .fold(f64::INFINITY, f64::min)
}

pub fn build_variable_regression(records: &[ProblemRecord], mode: VariableInstances) -> Vec<VariableRegressionInstance> {
    fn walk(r: &ProblemRecord, set: &PolySet, prefix: &mut Vec<usize>, out: &mut Vec<VariableRegressionInstance>) {
        let remaining: Vec<usize> = (0..r.nvars()).filter(|v| !prefix.contains(v)).collect();
        if remaining.len() < 2 {
            return;
        }
        for &v in &remaining {
            prefix.push(v);
            out.push(VariableRegressionInstance {
                features: variable_features(set, v),
                target: best_time_with_prefix(r, prefix),
            });
            prefix.pop();
        }
        if remaining.len() > 2 {
            for &v in &remaining {
                let next = project_step(set, v);
                prefix.push(v);
                walk(r, &next, prefix, out);
                prefix.pop();
            }
        }
    }

    records
        .par_iter()
        .flat_map_iter(|r| {
            let mut out = Vec::new();
            match mode {
                VariableInstances::Original => {
                    for v in 0..r.nvars() {
                        out.push(VariableRegressionInstance {
                            features: variable_features(&r.set, v),
                            target: best_time_with_prefix(r, &[v]),
                        });
                    }
                }
                VariableInstances::Projected => walk(r, &r.set, &mut Vec::new(), &mut out),
            }
            out
        })
        .collect()
}
