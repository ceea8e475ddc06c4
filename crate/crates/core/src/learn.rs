//! k-nearest-neighbours models and the three ways of turning them into an
//! ordering choice.
//!
//! Rows are standardized with statistics from the training matrix; distance
//! is Euclidean. Neighbours are ranked by `(distance, training index)`.
//! Under inverse-distance weighting, neighbours at distance zero take over
//! the whole vote or average.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    build_classification, build_ordering_regression, build_variable_regression, ProblemRecord, VariableInstances,
};
use crate::error::{Error, Result};
use crate::features::{variable_features, Embedding, FeatureVector, Standardizer};
use crate::polyset::{factorial, VariableOrdering};
use crate::projection::{ProjectionOperator, Projector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Uniform,
    InverseDistance,
}

impl FromStr for Weighting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Weighting::Uniform),
            "distance" | "inverse-distance" => Ok(Weighting::InverseDistance),
            _ => Err(Error::Config(format!("unknown weighting `{s}`"))),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Uniform => "uniform",
            Weighting::InverseDistance => "inverse-distance",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub weighting: Weighting,
}

/// Class indices (ordering indices) or real-valued targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Targets {
    Classify { nvars: usize, labels: Vec<usize> },
    Regress { values: Vec<f64> },
}

impl Targets {
    fn len(&self) -> usize {
        match self {
            Targets::Classify { labels, .. } => labels.len(),
            Targets::Regress { values } => values.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub config: KnnConfig,
    pub standardizer: Standardizer,
    /// Standardized training rows.
    pub rows: Vec<Vec<f64>>,
    pub targets: Targets,
    /// Regression targets were stored as `ln(1 + t)`.
    #[serde(default)]
    pub log_targets: bool,
}

impl KnnModel {
    pub fn fit<R: AsRef<[f64]>>(config: KnnConfig, rows: &[R], targets: Targets) -> Result<Self> {
        if rows.len() != targets.len() {
            return Err(Error::Model(format!("{} rows but {} targets", rows.len(), targets.len())));
        }
        if config.k == 0 || config.k > rows.len() {
            return Err(Error::Model(format!("k = {} with {} training rows", config.k, rows.len())));
        }
        let standardizer = Standardizer::fit(rows)?;
        let rows = rows.iter().map(|r| standardizer.transform(r.as_ref())).collect();
        Ok(KnnModel { config, standardizer, rows, targets, log_targets: false })
    }

    pub fn fit_classifier(config: KnnConfig, records: &[ProblemRecord]) -> Result<Self> {
        let inst = build_classification(records);
        let nvars = uniform_arity(records)?;
        let rows: Vec<&[f64]> = inst.iter().map(|i| i.embedding.values.as_slice()).collect();
        let labels = inst.iter().map(|i| i.label.index()).collect();
        Self::fit(config, &rows, Targets::Classify { nvars, labels })
    }

    pub fn fit_ordering_regressor(config: KnnConfig, records: &[ProblemRecord], log_targets: bool) -> Result<Self> {
        uniform_arity(records)?;
        let inst = build_ordering_regression(records);
        let rows: Vec<&[f64]> = inst.iter().map(|i| i.embedding.values.as_slice()).collect();
        let values = inst.iter().map(|i| if log_targets { i.target.ln_1p() } else { i.target }).collect();
        let mut m = Self::fit(config, &rows, Targets::Regress { values })?;
        m.log_targets = log_targets;
        Ok(m)
    }

    pub fn fit_variable_regressor(config: KnnConfig, records: &[ProblemRecord], mode: VariableInstances) -> Result<Self> {
        let inst = build_variable_regression(records, mode);
        let rows: Vec<&[f64]> = inst.iter().map(|i| i.features.values.as_slice()).collect();
        let values = inst.iter().map(|i| i.target).collect();
        Self::fit(config, &rows, Targets::Regress { values })
    }

    pub fn width(&self) -> usize {
        self.standardizer.width()
    }

    /// The `k` nearest training rows as `(squared distance, index)`.
    pub fn neighbours(&self, row: &[f64]) -> Result<Vec<(f64, usize)>> {
        if row.len() != self.width() {
            return Err(Error::Model(format!("query has {} features, model expects {}", row.len(), self.width())));
        }
        let q = self.standardizer.transform(row);
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let k = self.config.k;
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.truncate(k);
        }
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(d)
    }

    /// Voting weights of the neighbours, in neighbour order.
    fn weights(&self, nb: &[(f64, usize)]) -> Vec<f64> {
        match self.config.weighting {
            Weighting::Uniform => vec![1.0; nb.len()],
            Weighting::InverseDistance => {
                if nb.iter().any(|n| n.0 == 0.0) {
                    nb.iter().map(|n| if n.0 == 0.0 { 1.0 } else { 0.0 }).collect()
                } else {
                    nb.iter().map(|n| 1.0 / n.0.sqrt()).collect()
                }
            }
        }
    }

    pub fn predict_class(&self, row: &[f64]) -> Result<VariableOrdering> {
        let Targets::Classify { nvars, labels } = &self.targets else {
            return Err(Error::Model("regression model asked for a class".into()));
        };
        let nb = self.neighbours(row)?;
        let mut votes = vec![0.0; factorial(*nvars)];
        for (w, (_, i)) in self.weights(&nb).into_iter().zip(&nb) {
            votes[labels[*i]] += w;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        VariableOrdering::from_index(*nvars, best)
    }

    pub fn predict_value(&self, row: &[f64]) -> Result<f64> {
        let Targets::Regress { values } = &self.targets else {
            return Err(Error::Model("classification model asked for a value".into()));
        };
        let nb = self.neighbours(row)?;
        let w = self.weights(&nb);
        let total: f64 = w.iter().sum();
        let mean = w.iter().zip(&nb).map(|(w, (_, i))| w * values[*i]).sum::<f64>() / total;
        Ok(if self.log_targets { mean.exp_m1() } else { mean })
    }
}

fn uniform_arity(records: &[ProblemRecord]) -> Result<usize> {
    let n = records.first().map(ProblemRecord::nvars).ok_or_else(|| Error::Model("no training records".into()))?;
    if records.iter().any(|r| r.nvars() != n) {
        return Err(Error::Model("training records mix variable counts".into()));
    }
    Ok(n)
}

fn check_candidates(r: &ProblemRecord, candidates: Option<&[VariableOrdering]>) -> Result<Vec<VariableOrdering>> {
    let all = VariableOrdering::all(r.nvars());
    match candidates {
        None => Ok(all),
        Some(c) => {
            let mut c: Vec<VariableOrdering> = c.iter().filter(|o| o.nvars() == r.nvars()).cloned().collect();
            c.sort_by_key(VariableOrdering::index);
            c.dedup();
            if c.is_empty() {
                Err(Error::Precondition(format!("no admissible ordering for `{}`", r.id)))
            } else {
                Ok(c)
            }
        }
    }
}

/// The predicted class. A classifier cannot rank alternatives, so a
/// prediction outside `candidates` is an error.
pub fn choose_by_classifier(
    m: &KnnModel,
    r: &ProblemRecord,
    candidates: Option<&[VariableOrdering]>,
) -> Result<VariableOrdering> {
    let allowed = check_candidates(r, candidates)?;
    let e = crate::features::classification_embedding(&r.set);
    let p = m.predict_class(&e.values)?;
    if allowed.contains(&p) {
        Ok(p)
    } else {
        Err(Error::Precondition(format!("predicted ordering {p} is not among the candidates")))
    }
}

/// Candidate with the smallest score; ties go to the lowest ordering index.
pub fn choose_by_ordering_scores<F>(
    r: &ProblemRecord,
    candidates: Option<&[VariableOrdering]>,
    mut score: F,
) -> Result<VariableOrdering>
where
    F: FnMut(&VariableOrdering) -> Result<f64>,
{
    let mut best: Option<(f64, VariableOrdering)> = None;
    for o in check_candidates(r, candidates)? {
        let s = score(&o)?;
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, o));
        }
    }
    Ok(best.expect("candidates nonempty").1)
}

pub fn choose_by_ordering_regressor(
    m: &KnnModel,
    r: &ProblemRecord,
    candidates: Option<&[VariableOrdering]>,
) -> Result<VariableOrdering> {
    let blocks: Vec<FeatureVector> = (0..r.nvars()).map(|v| variable_features(&r.set, v)).collect();
    choose_by_ordering_scores(r, candidates, |o| {
        let e = Embedding::from_blocks(o.as_slice().iter().map(|&v| blocks[v].clone()).collect());
        m.predict_value(&e.values)
    })
}

/// Greedy: score each remaining variable on the current set, take the
/// smallest (lowest index on ties), project it out, repeat.
pub fn choose_by_variable_regressor(
    m: &KnnModel,
    r: &ProblemRecord,
    projector: &dyn Projector,
) -> Result<VariableOrdering> {
    let mut set = r.set.clone();
    let mut remaining: Vec<usize> = (0..r.nvars()).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while remaining.len() > 1 {
        let mut best = (f64::INFINITY, remaining[0]);
        for &v in &remaining {
            let s = m.predict_value(&variable_features(&set, v).values)?;
            if s < best.0 {
                best = (s, v);
            }
        }
        order.push(best.1);
        remaining.retain(|&v| v != best.1);
        set = projector.project(&set, best.1);
    }
    order.extend(remaining);
    VariableOrdering::new(order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Paradigm {
    #[serde(rename = "class")]
    Classification,
    #[serde(rename = "reg-ord")]
    OrderingRegression,
    #[serde(rename = "reg-var")]
    VariableRegression,
}

impl FromStr for Paradigm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "class" => Ok(Paradigm::Classification),
            "reg-ord" => Ok(Paradigm::OrderingRegression),
            "reg-var" => Ok(Paradigm::VariableRegression),
            _ => Err(Error::Config(format!("unknown paradigm `{s}` (class, reg-ord, reg-var)"))),
        }
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Paradigm::Classification => "class",
            Paradigm::OrderingRegression => "reg-ord",
            Paradigm::VariableRegression => "reg-var",
        })
    }
}

/// Training options beyond the KNN hyperparameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub log_targets: bool,
    pub projected_instances: bool,
}

/// A fitted model together with the way it chooses orderings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selector {
    pub paradigm: Paradigm,
    pub model: KnnModel,
}

impl Selector {
    pub fn train(paradigm: Paradigm, config: KnnConfig, records: &[ProblemRecord], opts: TrainOptions) -> Result<Self> {
        let model = match paradigm {
            Paradigm::Classification => KnnModel::fit_classifier(config, records)?,
            Paradigm::OrderingRegression => KnnModel::fit_ordering_regressor(config, records, opts.log_targets)?,
            Paradigm::VariableRegression => {
                let mode =
                    if opts.projected_instances { VariableInstances::Projected } else { VariableInstances::Original };
                KnnModel::fit_variable_regressor(config, records, mode)?
            }
        };
        Ok(Selector { paradigm, model })
    }

    pub fn choose(&self, r: &ProblemRecord) -> Result<VariableOrdering> {
        match self.paradigm {
            Paradigm::Classification => choose_by_classifier(&self.model, r, None),
            Paradigm::OrderingRegression => choose_by_ordering_regressor(&self.model, r, None),
            Paradigm::VariableRegression => choose_by_variable_regressor(&self.model, r, &ProjectionOperator),
        }
    }

    /// Total penalized time of this selector's choices.
    pub fn score(&self, records: &[ProblemRecord]) -> Result<f64> {
        let times = records
            .par_iter()
            .map(|r| Ok(r.penalized(&self.choose(r)?)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(times.iter().sum())
    }
}

const MODEL_FORMAT: &str = "vo-lab-knn";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    selector: Selector,
}

impl Selector {
    pub fn to_json(&self) -> Result<String> {
        let f = ModelFile { format: MODEL_FORMAT.into(), version: MODEL_VERSION, selector: self.clone() };
        Ok(serde_json::to_string(&f)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text).map_err(|e| Error::Model(format!("bad model file: {e}")))?;
        if f.format != MODEL_FORMAT || f.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported model file {} v{}", f.format, f.version)));
        }
        Ok(f.selector)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub k_min: usize,
    pub k_max: usize,
    pub weightings: Vec<Weighting>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            k_min: 1,
            k_max: 30,
            weightings: vec![Weighting::Uniform, Weighting::InverseDistance],
            trials: 12,
            seed: 0,
        }
    }
}

impl SearchSpace {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("search needs at least one trial".into()));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::Config(format!("bad k range {}..={}", self.k_min, self.k_max)));
        }
        if self.weightings.is_empty() {
            return Err(Error::Config("no weighting options".into()));
        }
        Ok(())
    }

    /// The configurations tried, in sampling order. `k` never exceeds `max_k`.
    pub fn sample(&self, max_k: usize) -> Result<Vec<KnnConfig>> {
        self.validate()?;
        if max_k == 0 {
            return Err(Error::Model("no training instances".into()));
        }
        let hi = self.k_max.min(max_k);
        let lo = self.k_min.min(hi);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..self.trials)
            .map(|_| KnnConfig {
                k: rng.gen_range(lo..=hi),
                weighting: *self.weightings.choose(&mut rng).expect("nonempty"),
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: KnnConfig,
    pub best_score: f64,
    /// Every trial with its validation score, in sampling order.
    pub trials: Vec<(KnnConfig, f64)>,
}

/// Scores every sampled configuration by the total penalized time of its
/// choices on `validation`; the lowest wins, ties to the earliest sample.
pub fn random_search(
    space: &SearchSpace,
    train: &[ProblemRecord],
    validation: &[ProblemRecord],
    paradigm: Paradigm,
    opts: TrainOptions,
) -> Result<SearchOutcome> {
    let n = match paradigm {
        Paradigm::Classification => train.len(),
        Paradigm::OrderingRegression => train.iter().map(|r| r.timings.len()).sum(),
        Paradigm::VariableRegression => train.iter().map(ProblemRecord::nvars).sum(),
    };
    let configs = space.sample(n)?;
    let trials = configs
        .par_iter()
        .map(|&c| Ok((c, Selector::train(paradigm, c, train, opts)?.score(validation)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_best(trials))
}

/// Lowest score, earliest on ties.
pub fn pick_best(trials: Vec<(KnnConfig, f64)>) -> SearchOutcome {
    let mut best = 0;
    for (i, t) in trials.iter().enumerate() {
        if t.1 < trials[best].1 {
            best = i;
        }
    }
    SearchOutcome { best: trials[best].0, best_score: trials[best].1, trials }
}
