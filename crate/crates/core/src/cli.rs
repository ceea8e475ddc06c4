//! The `vo-lab` command line.
//!
//! Options may also come from a flat `key = value` file given with
//! `--config`; keys are the long flag names. Flags win over the file.
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::dataset::synth::{proxy_label, synthetic_problems, CorpusConfig};
use crate::dataset::{
    augment, balance, build_classification, build_ordering_regression, build_variable_regression, dedup,
    read_problems, read_raw_problems, split_folds, write_atomic, write_classification_csv, write_ordering_csv,
    write_problems, write_raw_problems, write_variable_csv, RawProblem, VariableInstances,
};
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, DatasetMode, ExperimentConfig};
use crate::heuristics::{Heuristic, Mode, TieBreaker};
use crate::learn::{random_search, Paradigm, SearchSpace, Selector, TrainOptions, Weighting};
use crate::metrics::evaluate_strategy;
use crate::polyset::{parse_polyset, parse_smtlib_atoms};

#[derive(Parser, Debug)]
#[command(name = "vo-lab", version, about = "Variable-ordering selection for cylindrical algebraic decomposition")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normalize polynomial sets (one per line) or an SMT-LIB file.
    Parse(ParseArgs),
    /// Write the instance matrix of a labelled problems file as CSV.
    Featurize(FeaturizeArgs),
    /// Label problems with projection proxy costs.
    ProxyLabel(ProxyLabelArgs),
    /// Build and transform problem files.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Run the hand-written heuristics.
    #[command(subcommand)]
    Heuristic(HeuristicCommand),
    /// Fit a selector with a randomized hyperparameter search.
    Train(TrainArgs),
    /// Evaluate a saved selector on a problems file.
    Evaluate(EvaluateArgs),
    /// Tabulate several strategies on one problems file.
    Compare(CompareArgs),
    /// Cross-validated experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args, Debug)]
pub struct ParseArgs {
    pub input: PathBuf,
    /// Number of variables for the text grammar.
    #[arg(long)]
    pub nvars: Option<usize>,
    /// Read the input as an SMT-LIB script.
    #[arg(long)]
    pub smtlib: bool,
}

#[derive(Args, Debug)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub problems: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub paradigm: Option<String>,
    #[arg(long)]
    pub projected_instances: bool,
}

#[derive(Args, Debug)]
pub struct ProxyLabelArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Costs above this percentile of all costs count as timeouts.
    #[arg(long)]
    pub percentile: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum DatasetCommand {
    /// Unlabelled problems from SMT-LIB files or a synthetic generator.
    Build(BuildArgs),
    Dedup(IoArgs),
    /// Assign sources to folds; writes JSON.
    Split(SplitArgs),
    Balance(SeededIoArgs),
    Augment(IoArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory searched recursively for `.smt2` files.
    #[arg(long, conflicts_with = "synthetic")]
    pub smtlib_dir: Option<PathBuf>,
    /// Number of synthetic problems.
    #[arg(long)]
    pub synthetic: Option<usize>,
    #[arg(long)]
    pub sources: Option<usize>,
    /// Keep only problems with this many variables.
    #[arg(long)]
    pub nvars: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct IoArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SeededIoArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum HeuristicCommand {
    /// Print `id,ordering` for every problem.
    Run(HeuristicArgs),
}

#[derive(Args, Debug)]
pub struct HeuristicArgs {
    #[arg(long)]
    pub heuristic: Option<String>,
    #[arg(long)]
    pub problems: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Recompute the criteria on the projected set after each choice.
    #[arg(long)]
    pub projected: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SearchArgs {
    #[arg(long)]
    pub paradigm: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Comma-separated: uniform, distance.
    #[arg(long)]
    pub weightings: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// imbalanced, balanced or augmented.
    #[arg(long)]
    pub mode: Option<String>,
    /// Train ordering regressors on ln(1 + t).
    #[arg(long)]
    pub log_targets: bool,
    /// Also train variable regressors on projected sets.
    #[arg(long)]
    pub projected_instances: bool,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub problems: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Saved selectors, `name=path` or just `path`.
    #[arg(long = "model")]
    pub models: Vec<String>,
    /// Comma-separated heuristics to include.
    #[arg(long)]
    pub heuristics: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write per-record plot data here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    Run(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub problems: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Comma-separated heuristics to report alongside the model.
    #[arg(long)]
    pub baselines: Option<String>,
    #[arg(long)]
    pub test_imbalanced: bool,
    #[command(flatten)]
    pub search: SearchArgs,
}

/// Parsed `key = value` lines; `#` starts a comment. Later keys win.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected `key = value`", n + 1)))?;
            map.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(KeyValues(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::Config(format!("config key `{key}`: {e}"))))
            .transpose()
    }

    fn flag(&self, key: &str, set_on_cli: bool) -> Result<bool> {
        Ok(set_on_cli || self.get::<bool>(key)?.unwrap_or(false))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn pick<T: FromStr>(flag: Option<T>, kv: &KeyValues, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => kv.get(key),
    }
}

fn require<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required option --{key}")))
}

fn list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(T::from_str).collect()
}

const SEARCH_KEYS: &[&str] =
    &["paradigm", "trials", "k-min", "k-max", "weightings", "seed", "mode", "log-targets", "projected-instances"];

struct Search {
    paradigm: Paradigm,
    space: SearchSpace,
    mode: DatasetMode,
    opts: TrainOptions,
    seed: u64,
}

fn resolve_search(a: &SearchArgs, kv: &KeyValues) -> Result<Search> {
    let d = SearchSpace::default();
    let weightings = match pick(a.weightings.clone(), kv, "weightings")? {
        Some(s) => list::<Weighting>(&s)?,
        None => d.weightings.clone(),
    };
    let seed = pick(a.seed, kv, "seed")?.unwrap_or(0);
    Ok(Search {
        paradigm: pick(a.paradigm.clone(), kv, "paradigm")?.as_deref().unwrap_or("class").parse()?,
        space: SearchSpace {
            k_min: pick(a.k_min, kv, "k-min")?.unwrap_or(d.k_min),
            k_max: pick(a.k_max, kv, "k-max")?.unwrap_or(d.k_max),
            weightings,
            trials: pick(a.trials, kv, "trials")?.unwrap_or(d.trials),
            seed,
        },
        mode: pick(a.mode.clone(), kv, "mode")?.as_deref().unwrap_or("imbalanced").parse()?,
        opts: TrainOptions {
            log_targets: kv.flag("log-targets", a.log_targets)?,
            projected_instances: kv.flag("projected-instances", a.projected_instances)?,
        },
        seed,
    })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 1,
        _ => 2,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let kv = match &cli.config {
        Some(p) => KeyValues::load(p)?,
        None => KeyValues::default(),
    };
    match cli.command {
        Command::Parse(a) => cmd_parse(a, out),
        Command::Featurize(a) => cmd_featurize(a, &kv),
        Command::ProxyLabel(a) => cmd_proxy_label(a, &kv, out),
        Command::Dataset(d) => cmd_dataset(d, &kv, out),
        Command::Heuristic(HeuristicCommand::Run(a)) => cmd_heuristic(a, &kv, out),
        Command::Train(a) => cmd_train(a, &kv, out),
        Command::Evaluate(a) => cmd_evaluate(a, &kv, out),
        Command::Compare(a) => cmd_compare(a, &kv, out),
        Command::Experiment(ExperimentCommand::Run(a)) => cmd_experiment(a, &kv, out),
    }
}

fn cmd_parse(a: ParseArgs, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&a.input)?;
    if a.smtlib {
        let set = parse_smtlib_atoms(&text)?;
        writeln!(out, "{} {}", set.nvars(), set)?;
        return Ok(());
    }
    let nvars = require(a.nvars, "nvars")?;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        writeln!(out, "{}", parse_polyset(line, nvars)?)?;
    }
    Ok(())
}

fn cmd_featurize(a: FeaturizeArgs, kv: &KeyValues) -> Result<()> {
    kv.check_keys(&["problems", "out", "paradigm", "projected-instances"])?;
    let problems = require(pick(a.problems, kv, "problems")?, "problems")?;
    let out = require(pick(a.out, kv, "out")?, "out")?;
    let paradigm: Paradigm = pick(a.paradigm, kv, "paradigm")?.as_deref().unwrap_or("class").parse()?;
    let records = read_problems(&problems)?;
    match paradigm {
        Paradigm::Classification => {
            let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
            write_classification_csv(&out, &ids, &build_classification(&records))
        }
        Paradigm::OrderingRegression => {
            let ids: Vec<String> =
                records.iter().flat_map(|r| std::iter::repeat_n(r.id.clone(), r.timings.len())).collect();
            write_ordering_csv(&out, &ids, &build_ordering_regression(&records))
        }
        Paradigm::VariableRegression => {
            let mode = if kv.flag("projected-instances", a.projected_instances)? {
                VariableInstances::Projected
            } else {
                VariableInstances::Original
            };
            let mut ids = Vec::new();
            let mut inst = Vec::new();
            for r in &records {
                let i = build_variable_regression(std::slice::from_ref(r), mode);
                ids.extend(std::iter::repeat_n(r.id.clone(), i.len()));
                inst.extend(i);
            }
            write_variable_csv(&out, &ids, &inst)
        }
    }
}

fn cmd_proxy_label(a: ProxyLabelArgs, kv: &KeyValues, out: &mut dyn Write) -> Result<()> {
    kv.check_keys(&["input", "out", "percentile"])?;
    let input = require(pick(a.input, kv, "input")?, "input")?;
    let dest = require(pick(a.out, kv, "out")?, "out")?;
    let q = pick(a.percentile, kv, "percentile")?.unwrap_or(95.0);
    if !(q > 0.0 && q <= 100.0) {
        return Err(Error::Config("percentile must be in (0, 100]".into()));
    }
    let raw = read_raw_problems(&input)?;
    let records = proxy_label(&raw, q)?;
    write_problems(&dest, &records)?;
    writeln!(out, "labelled {} of {} problems", records.len(), raw.len())?;
    Ok(())
}

fn smt2_files(dir: &Path, acc: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            smt2_files(&p, acc)?;
        } else if p.extension().is_some_and(|e| e == "smt2") {
            acc.push(p);
        }
    }
    Ok(())
}

fn cmd_dataset(d: DatasetCommand, kv: &KeyValues, out: &mut dyn Write) -> Result<()> {
    match d {
        DatasetCommand::Build(a) => {
            kv.check_keys(&["out", "smtlib-dir", "synthetic", "sources", "nvars", "seed"])?;
            let dest = require(pick(a.out, kv, "out")?, "out")?;
            let seed = pick(a.seed, kv, "seed")?.unwrap_or(0);
            let nvars = pick(a.nvars, kv, "nvars")?;
            let raw = if let Some(dir) = pick(a.smtlib_dir, kv, "smtlib-dir")? {
                let mut files = Vec::new();
                smt2_files(&dir, &mut files)?;
                let mut raw = Vec::new();
                for f in files {
                    let set = match parse_smtlib_atoms(&fs::read_to_string(&f)?) {
                        Ok(s) => s,
                        Err(e) => {
                            writeln!(out, "skipped {}: {e}", f.display())?;
                            continue;
                        }
                    };
                    if nvars.is_some_and(|n| n != set.nvars()) {
                        continue;
                    }
                    let rel = f.strip_prefix(&dir).unwrap_or(&f);
                    let source = rel.parent().map(|p| p.display().to_string()).unwrap_or_default();
                    raw.push(RawProblem {
                        id: rel.display().to_string(),
                        source,
                        nvars: set.nvars(),
                        polys: set.to_string(),
                        timings: None,
                        timeout_limit: None,
                        cells: None,
                        label: None,
                    });
                }
                raw
            } else {
                let n = require(pick(a.synthetic, kv, "synthetic")?, "synthetic or --smtlib-dir")?;
                let mut cfg = CorpusConfig::new(n, seed);
                if let Some(s) = pick(a.sources, kv, "sources")? {
                    cfg.sources = s;
                }
                if let Some(v) = nvars {
                    cfg.nvars = v;
                }
                synthetic_problems(&cfg)
            };
            write_raw_problems(&dest, &raw)?;
            writeln!(out, "wrote {} problems", raw.len())?;
        }
        DatasetCommand::Dedup(a) => {
            kv.check_keys(&["input", "out"])?;
            let (input, dest) = io_paths(a, kv)?;
            let records = read_problems(&input)?;
            let kept = dedup(&records);
            write_problems(&dest, &kept)?;
            writeln!(out, "kept {} of {} records", kept.len(), records.len())?;
        }
        DatasetCommand::Split(a) => {
            kv.check_keys(&["input", "out", "folds", "seed"])?;
            let folds = pick(a.folds, kv, "folds")?.unwrap_or(5);
            let seed = pick(a.seed, kv, "seed")?.unwrap_or(0);
            let (input, dest) = io_paths(a.io, kv)?;
            let records = read_problems(&input)?;
            let assignment = split_folds(&records, folds, seed)?;
            let mut json = serde_json::to_vec_pretty(&assignment)?;
            json.push(b'\n');
            write_atomic(&dest, &json)?;
            writeln!(out, "fold sizes {:?}", assignment.fold_sizes(&records))?;
        }
        DatasetCommand::Balance(a) => {
            kv.check_keys(&["input", "out", "seed"])?;
            let seed = pick(a.seed, kv, "seed")?.unwrap_or(0);
            let (input, dest) = io_paths(a.io, kv)?;
            write_problems(&dest, &balance(&read_problems(&input)?, seed))?;
        }
        DatasetCommand::Augment(a) => {
            kv.check_keys(&["input", "out"])?;
            let (input, dest) = io_paths(a, kv)?;
            let aug = augment(&read_problems(&input)?);
            write_problems(&dest, &aug)?;
            writeln!(out, "wrote {} records", aug.len())?;
        }
    }
    Ok(())
}

fn io_paths(a: IoArgs, kv: &KeyValues) -> Result<(PathBuf, PathBuf)> {
    Ok((require(pick(a.input, kv, "input")?, "input")?, require(pick(a.out, kv, "out")?, "out")?))
}

fn cmd_heuristic(a: HeuristicArgs, kv: &KeyValues, out: &mut dyn Write) -> Result<()> {
    kv.check_keys(&["heuristic", "problems", "seed", "projected"])?;
    let h: Heuristic = require(pick(a.heuristic, kv, "heuristic")?, "heuristic")?.parse()?;
    let problems = require(pick(a.problems, kv, "problems")?, "problems")?;
    let seed = pick(a.seed, kv, "seed")?.unwrap_or(0);
    let mode = if kv.flag("projected", a.projected)? { Mode::Projected } else { Mode::Original };
    writeln!(out, "id,ordering")?;
    for (i, r) in read_raw_problems(&problems)?.into_iter().enumerate() {
        let set = parse_polyset(&r.polys, r.nvars)?;
        let o = h.order_with(&set, TieBreaker::new(seed.wrapping_add(i as u64)), mode);
        writeln!(out, "{},{o}", r.id)?;
    }
    Ok(())
}

fn cmd_train(a: TrainArgs, kv: &KeyValues, out: &mut dyn Write) -> Result<()> {
    let mut keys = vec!["problems", "out"];
    keys.extend(SEARCH_KEYS);
    kv.check_keys(&keys)?;
    let problems = require(pick(a.problems, kv, "problems")?, "problems")?;
    let dest = require(pick(a.out, kv, "out")?, "out")?;
    let s = resolve_search(&a.search, kv)?;
    let cfg = ExperimentConfig { mode: s.mode, paradigm: s.paradigm, ..ExperimentConfig::default() };
    cfg.validate()?;
    let records = dedup(&read_problems(&problems)?);
    let split = split_folds(&records, 5, s.seed)?;
    let (mut fit, mut val) = split.partition(&records, 0);
    if fit.is_empty() || val.is_empty() {
        fit = records.clone();
        val = records.clone();
    }
    let transform = |r: &[_], seed| match s.mode {
        DatasetMode::Imbalanced => r.to_vec(),
        DatasetMode::Balanced => balance(r, seed),
        DatasetMode::Augmented => augment(r),
    };
    let outcome =
        random_search(&s.space, &transform(&fit, s.seed), &balance(&val, s.seed ^ 1), s.paradigm, s.opts)?;
    let selector = Selector::train(s.paradigm, outcome.best, &transform(&records, s.seed ^ 2), s.opts)?;
    write_atomic(&dest, selector.to_json()?.as_bytes())?;
    writeln!(
        out,
        "k={} weighting={} validation total time {}",
        outcome.best.k, outcome.best.weighting, outcome.best_score
    )?;
    Ok(())
}

fn load_selector(path: &Path) -> Result<Selector> {
    Selector::from_json(&fs::read_to_string(path)?)
}

fn cmd_evaluate(a: EvaluateArgs, kv: &KeyValues, out: &mut dyn Write) -> Result<()> {
    kv.check_keys(&["model", "test"])?;
    let selector = load_selector(&require(pick(a.model, kv, "model")?, "model")?)?;
    let records = read_problems(&require(pick(a.test, kv, "test")?, "test")?)?;
    let choices = records.iter().map(|r| selector.choose(r)).collect::<Result<Vec<_>>>()?;
    let report = evaluate_strategy(&choices, &records)?;
    writeln!(out, "{}", serde_json::to_string(&report)?)?;
    writeln!(out, "records,solved,time_accuracy,total_time,markup")?;
    writeln!(
        out,
        "{},{},{},{},{}",
        report.records, report.solved, report.time_accuracy, report.total_time, report.markup
    )?;
    Ok(())
}

fn cmd_compare(a: CompareArgs, kv: &KeyValues, out: &mut dyn Write) -> Result<()> {
    kv.check_keys(&["test", "heuristics", "seed", "plot-data"])?;
    let records = read_problems(&require(pick(a.test, kv, "test")?, "test")?)?;
    let seed = pick(a.seed, kv, "seed")?.unwrap_or(0);
    let heuristics: Vec<Heuristic> = match pick(a.heuristics, kv, "heuristics")? {
        Some(s) => list(&s)?,
        None => Heuristic::ALL.to_vec(),
    };
    let mut strategies: Vec<(String, Vec<crate::polyset::VariableOrdering>)> = Vec::new();
    for spec in &a.models {
        let (name, path) = spec.split_once('=').unwrap_or((spec.as_str(), spec.as_str()));
        let selector = load_selector(Path::new(path))?;
        let picks = records.iter().map(|r| selector.choose(r)).collect::<Result<Vec<_>>>()?;
        strategies.push((name.to_string(), picks));
    }
    for h in heuristics {
        let picks = records
            .iter()
            .enumerate()
            .map(|(i, r)| h.order(&r.set, TieBreaker::new(seed.wrapping_add(i as u64))))
            .collect();
        strategies.push((h.name().to_string(), picks));
    }
    strategies.push(("optimal".into(), records.iter().map(crate::dataset::best_ordering).collect()));

    writeln!(out, "strategy,records,solved,time_accuracy,total_time,markup")?;
    let mut plot = csv::Writer::from_writer(Vec::new());
    plot.write_record(["strategy", "id", "ordering", "time"])?;
    for (name, picks) in &strategies {
        let r = evaluate_strategy(picks, &records)?;
        writeln!(out, "{name},{},{},{},{},{}", r.records, r.solved, r.time_accuracy, r.total_time, r.markup)?;
        for (rec, o) in records.iter().zip(picks) {
            plot.write_record([name.clone(), rec.id.clone(), o.to_string(), rec.penalized(o).to_string()])?;
        }
    }
    if let Some(p) = pick(a.plot_data, kv, "plot-data")? {
        write_atomic(&p, &plot.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
    }
    Ok(())
}

/// Builds an experiment configuration from flags over the config file.
pub fn experiment_config(a: &ExperimentArgs, kv: &KeyValues) -> Result<ExperimentConfig> {
    let mut keys = vec!["problems", "out", "folds", "baselines", "test-imbalanced"];
    keys.extend(SEARCH_KEYS);
    kv.check_keys(&keys)?;
    let s = resolve_search(&a.search, kv)?;
    let d = ExperimentConfig::default();
    let cfg = ExperimentConfig {
        problems: require(pick(a.problems.clone(), kv, "problems")?, "problems")?,
        output: require(pick(a.out.clone(), kv, "out")?, "out")?,
        seed: s.seed,
        folds: pick(a.folds, kv, "folds")?.unwrap_or(d.folds),
        mode: s.mode,
        paradigm: s.paradigm,
        search: s.space,
        baselines: match pick(a.baselines.clone(), kv, "baselines")? {
            Some(b) => list(&b)?,
            None => d.baselines,
        },
        test_imbalanced: kv.flag("test-imbalanced", a.test_imbalanced)?,
        train: s.opts,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_experiment(a: ExperimentArgs, kv: &KeyValues, out: &mut dyn Write) -> Result<()> {
    let cfg = experiment_config(&a, kv)?;
    let report = run_experiment(&cfg)?;
    writeln!(out, "strategy,solved,time_accuracy,total_time,markup")?;
    for s in &report.mean {
        let r = &s.report;
        writeln!(out, "{},{},{},{},{}", s.strategy, r.solved, r.time_accuracy, r.total_time, r.markup)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values() {
        let kv = KeyValues::parse("# c\nseed = 7\nk_max=9 # trailing\n\nmode=balanced\n").unwrap();
        assert_eq!(kv.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(kv.get::<usize>("k-max").unwrap(), Some(9));
        assert!(KeyValues::parse("novalue\n").is_err());
        assert!(kv.get::<u64>("mode").is_err());
    }

    #[test]
    fn usage_errors_exit_1() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(main_with_args(["vo-lab", "frobnicate"], &mut o, &mut e), 1);
        assert_eq!(main_with_args(["vo-lab", "train"], &mut o, &mut e), 1);
        assert_eq!(main_with_args(["vo-lab", "--help"], &mut o, &mut e), 0);
    }
}
