//! Cross-validated comparison of a trained selector against the heuristics.
//!
//! All randomness comes from one root seed. Stage `s`, item `i` uses
//! `ChaCha8Rng::seed_from_u64(root)` on stream `(s << 32) | i`, so results do
//! not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{augment, balance, dedup, read_problems, split_folds, write_atomic, ProblemRecord};
use crate::error::{Error, Result};
use crate::heuristics::{Heuristic, TieBreaker};
use crate::learn::{random_search, KnnConfig, Paradigm, SearchOutcome, SearchSpace, Selector, TrainOptions};
use crate::metrics::{average_reports, evaluate_strategy, StrategyReport};
use crate::polyset::VariableOrdering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetMode {
    Imbalanced,
    Balanced,
    Augmented,
}

impl FromStr for DatasetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imbalanced" => Ok(DatasetMode::Imbalanced),
            "balanced" => Ok(DatasetMode::Balanced),
            "augmented" => Ok(DatasetMode::Augmented),
            _ => Err(Error::Config(format!("unknown dataset mode `{s}` (imbalanced, balanced, augmented)"))),
        }
    }
}

impl fmt::Display for DatasetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetMode::Imbalanced => "imbalanced",
            DatasetMode::Balanced => "balanced",
            DatasetMode::Augmented => "augmented",
        })
    }
}

/// Seed for item `index` of pipeline stage `stage`.
pub fn stream_seed(root: u64, stage: u32, index: u32) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(((stage as u64) << 32) | index as u64);
    rng.next_u64()
}

mod stage {
    pub const OUTER_SPLIT: u32 = 1;
    pub const INNER_SPLIT: u32 = 2;
    pub const TRAIN_BALANCE: u32 = 3;
    pub const VALIDATION_BALANCE: u32 = 4;
    pub const TEST_BALANCE: u32 = 5;
    pub const SEARCH: u32 = 6;
    pub const TIE_BREAK: u32 = 7;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problems: PathBuf,
    pub output: PathBuf,
    pub seed: u64,
    pub folds: usize,
    pub mode: DatasetMode,
    pub paradigm: Paradigm,
    /// Search seed is ignored; each fold derives its own from `seed`.
    pub search: SearchSpace,
    pub baselines: Vec<Heuristic>,
    /// Test on the held-out folds as they are instead of balancing them.
    pub test_imbalanced: bool,
    pub train: TrainOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problems: PathBuf::from("problems.jsonl"),
            output: PathBuf::from("out"),
            seed: 0,
            folds: 5,
            mode: DatasetMode::Imbalanced,
            paradigm: Paradigm::Classification,
            search: SearchSpace::default(),
            baselines: Heuristic::ALL.to_vec(),
            test_imbalanced: false,
            train: TrainOptions::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Config("need at least two folds".into()));
        }
        if self.mode == DatasetMode::Augmented && self.paradigm == Paradigm::OrderingRegression {
            return Err(Error::Config(
                "augmentation adds nothing to ordering regression: it already yields one instance per ordering".into(),
            ));
        }
        if self.search.trials == 0 {
            return Err(Error::Config("search needs at least one trial".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub strategy: String,
    #[serde(flatten)]
    pub report: StrategyReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub strategy: String,
    pub id: String,
    pub ordering: VariableOrdering,
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_records: usize,
    pub test_records: usize,
    pub chosen: KnnConfig,
    pub validation_score: f64,
    pub strategies: Vec<StrategyResult>,
    #[serde(skip)]
    pub choices: Vec<Choice>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub mode: DatasetMode,
    pub paradigm: Paradigm,
    pub records: usize,
    pub folds: Vec<FoldReport>,
    /// Fold-averaged metrics per strategy.
    pub mean: Vec<StrategyResult>,
}

impl ExperimentReport {
    pub fn mean_of(&self, strategy: &str) -> Option<&StrategyReport> {
        self.mean.iter().find(|s| s.strategy == strategy).map(|s| &s.report)
    }
}

pub const MODEL_STRATEGY: &str = "knn";

fn transform(records: &[ProblemRecord], mode: DatasetMode, seed: u64) -> Vec<ProblemRecord> {
    match mode {
        DatasetMode::Imbalanced => records.to_vec(),
        DatasetMode::Balanced => balance(records, seed),
        DatasetMode::Augmented => augment(records),
    }
}

/// The selector for held-out fold `fold`, trained on the other folds only.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldModel {
    pub selector: Selector,
    pub search: SearchOutcome,
    pub train_records: usize,
}

/// Splits deduplicated `records`, searches on the training folds and refits.
/// Returns the model and the untransformed test fold.
pub fn train_fold(cfg: &ExperimentConfig, records: &[ProblemRecord], fold: usize) -> Result<(FoldModel, Vec<ProblemRecord>)> {
    let outer = split_folds(records, cfg.folds, stream_seed(cfg.seed, stage::OUTER_SPLIT, 0))?;
    let (train, test) = outer.partition(records, fold);
    let f = fold as u32;
    if train.is_empty() {
        return Err(Error::Data(format!("fold {fold} leaves no training records")));
    }

    // Hold out part of the training folds, grouped by source, for the search.
    let inner = split_folds(&train, cfg.folds - 1, stream_seed(cfg.seed, stage::INNER_SPLIT, f))?;
    let (mut fit_part, mut val_part) = inner.partition(&train, 0);
    if fit_part.is_empty() || val_part.is_empty() {
        fit_part = train.clone();
        val_part = train.clone();
    }
    let fit_part = transform(&fit_part, cfg.mode, stream_seed(cfg.seed, stage::TRAIN_BALANCE, 2 * f));
    let val_part = if cfg.test_imbalanced {
        val_part
    } else {
        balance(&val_part, stream_seed(cfg.seed, stage::VALIDATION_BALANCE, f))
    };
    let space = SearchSpace { seed: stream_seed(cfg.seed, stage::SEARCH, f), ..cfg.search.clone() };
    let search = random_search(&space, &fit_part, &val_part, cfg.paradigm, cfg.train)?;

    let full_train = transform(&train, cfg.mode, stream_seed(cfg.seed, stage::TRAIN_BALANCE, 2 * f + 1));
    let mut chosen = search.best;
    chosen.k = chosen.k.min(instance_count(cfg.paradigm, &full_train));
    let selector = Selector::train(cfg.paradigm, chosen, &full_train, cfg.train)?;
    Ok((FoldModel { selector, search, train_records: train.len() }, test))
}

fn run_fold(cfg: &ExperimentConfig, records: &[ProblemRecord], fold: usize) -> Result<FoldReport> {
    let (model, test) = train_fold(cfg, records, fold)?;
    let f = fold as u32;
    let selector = &model.selector;
    let test = if cfg.test_imbalanced { test } else { balance(&test, stream_seed(cfg.seed, stage::TEST_BALANCE, f)) };

    let mut strategies = Vec::new();
    let mut choices = Vec::new();
    let mut record = |name: &str, picks: Vec<VariableOrdering>| -> Result<()> {
        let report = evaluate_strategy(&picks, &test)?;
        for (r, o) in test.iter().zip(&picks) {
            choices.push(Choice { strategy: name.into(), id: r.id.clone(), time: r.penalized(o), ordering: o.clone() });
        }
        strategies.push(StrategyResult { strategy: name.into(), report });
        Ok(())
    };
    let picks = test.par_iter().map(|r| selector.choose(r)).collect::<Result<Vec<_>>>()?;
    record(MODEL_STRATEGY, picks)?;
    let tb = stream_seed(cfg.seed, stage::TIE_BREAK, f);
    for h in &cfg.baselines {
        let picks = test
            .par_iter()
            .enumerate()
            .map(|(i, r)| h.order(&r.set, TieBreaker::new(tb.wrapping_add(i as u64))))
            .collect();
        record(h.name(), picks)?;
    }
    Ok(FoldReport {
        fold,
        train_records: model.train_records,
        test_records: test.len(),
        chosen: selector.model.config,
        validation_score: model.search.best_score,
        strategies,
        choices,
    })
}

fn instance_count(p: Paradigm, records: &[ProblemRecord]) -> usize {
    match p {
        Paradigm::Classification => records.len(),
        Paradigm::OrderingRegression => records.iter().map(|r| r.timings.len()).sum(),
        Paradigm::VariableRegression => records.iter().map(ProblemRecord::nvars).sum(),
    }
}

/// Runs every fold on already loaded records (deduplicated first).
pub fn run_on_records(cfg: &ExperimentConfig, records: &[ProblemRecord]) -> Result<ExperimentReport> {
    cfg.validate()?;
    let records = dedup(records);
    if records.is_empty() {
        return Err(Error::Data("no problem records".into()));
    }
    let folds = (0..cfg.folds)
        .into_par_iter()
        .map(|f| run_fold(cfg, &records, f))
        .collect::<Result<Vec<_>>>()?;
    let mut by_name: BTreeMap<&str, Vec<StrategyReport>> = BTreeMap::new();
    let mut names = Vec::new();
    for fr in &folds {
        for s in &fr.strategies {
            if !by_name.contains_key(s.strategy.as_str()) {
                names.push(s.strategy.clone());
            }
            by_name.entry(s.strategy.as_str()).or_default().push(s.report.clone());
        }
    }
    let mean = names
        .iter()
        .map(|n| StrategyResult { strategy: n.clone(), report: average_reports(&by_name[n.as_str()]) })
        .collect();
    Ok(ExperimentReport { seed: cfg.seed, mode: cfg.mode, paradigm: cfg.paradigm, records: records.len(), folds, mean })
}

/// Loads the problems file, runs all folds and writes `report.json`,
/// `report.csv` and `choices.csv` into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let records = read_problems(&cfg.problems)?;
    let report = run_on_records(cfg, &records)?;
    write_reports(&report, &cfg.output)?;
    Ok(report)
}

pub fn write_reports(report: &ExperimentReport, dir: &std::path::Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    write_atomic(&dir.join("report.json"), &json)?;
    write_atomic(&dir.join("report.csv"), &report_csv(report)?)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["fold", "strategy", "id", "ordering", "time"])?;
    for f in &report.folds {
        for c in &f.choices {
            w.write_record([f.fold.to_string(), c.strategy.clone(), c.id.clone(), c.ordering.to_string(), c.time.to_string()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(&dir.join("choices.csv"), &bytes)
}

pub fn report_csv(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scope", "strategy", "records", "solved", "time_accuracy", "total_time", "markup"])?;
    let rows = report
        .folds
        .iter()
        .flat_map(|f| f.strategies.iter().map(move |s| (f.fold.to_string(), s)))
        .chain(report.mean.iter().map(|s| ("mean".to_string(), s)));
    for (scope, s) in rows {
        let r = &s.report;
        w.write_record([
            scope,
            s.strategy.clone(),
            r.records.to_string(),
            r.solved.to_string(),
            r.time_accuracy.to_string(),
            r.total_time.to_string(),
            r.markup.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ() {
        assert_ne!(stream_seed(1, 2, 3), stream_seed(1, 2, 4));
        assert_ne!(stream_seed(1, 2, 3), stream_seed(1, 3, 3));
        assert_eq!(stream_seed(1, 2, 3), stream_seed(1, 2, 3));
    }

    #[test]
    fn augmented_ordering_regression_rejected() {
        let cfg = ExperimentConfig {
            mode: DatasetMode::Augmented,
            paradigm: Paradigm::OrderingRegression,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
