//! Train each selector paradigm on one fold and score it on another.

use vo_lab::dataset::synth::{synthetic_corpus, CorpusConfig};
use vo_lab::dataset::{augment, dedup, split_folds};
use vo_lab::learn::{random_search, Paradigm, SearchSpace, Selector, TrainOptions};
use vo_lab::metrics::evaluate_strategy;

fn main() -> vo_lab::Result<()> {
    let records = dedup(&synthetic_corpus(&CorpusConfig::new(300, 5))?);
    let folds = split_folds(&records, 5, 0)?;
    let (train, test) = folds.partition(&records, 0);
    let (fit, val) = split_folds(&train, 4, 1)?.partition(&train, 0);
    let space = SearchSpace { trials: 6, seed: 3, ..SearchSpace::default() };

    for paradigm in [Paradigm::Classification, Paradigm::OrderingRegression, Paradigm::VariableRegression] {
        let opts = TrainOptions { log_targets: true, ..TrainOptions::default() };
        let fit_set = if paradigm == Paradigm::OrderingRegression { fit.clone() } else { augment(&fit) };
        let search = random_search(&space, &fit_set, &val, paradigm, opts)?;
        let selector = Selector::train(paradigm, search.best, &fit_set, opts)?;
        let choices = test.iter().map(|r| selector.choose(r)).collect::<vo_lab::Result<Vec<_>>>()?;
        let rep = evaluate_strategy(&choices, &test)?;
        println!(
            "{paradigm}: k={} {} accuracy {:.3} total time {:.1} markup {:.3}",
            search.best.k, search.best.weighting, rep.time_accuracy, rep.total_time, rep.markup
        );
    }
    Ok(())
}
