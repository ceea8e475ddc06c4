//! Show how balancing and augmentation reshape a skewed label distribution.

use vo_lab::dataset::synth::{synthetic_corpus, CorpusConfig};
use vo_lab::dataset::{augment, balance, best_ordering, dedup, split_folds, ProblemRecord};
use vo_lab::polyset::factorial;

fn histogram(records: &[ProblemRecord]) -> Vec<usize> {
    let n = records.first().map_or(0, |r| factorial(r.nvars()));
    let mut h = vec![0; n];
    for r in records {
        h[best_ordering(r).index()] += 1;
    }
    h
}

fn main() -> vo_lab::Result<()> {
    let records = dedup(&synthetic_corpus(&CorpusConfig::new(240, 7))?);
    println!("labelled records: {}", records.len());
    println!("imbalanced: {:?}", histogram(&records));
    println!("balanced:   {:?}", histogram(&balance(&records, 1)));
    println!("augmented:  {:?}", histogram(&augment(&records)));

    let folds = split_folds(&records, 5, 0)?;
    println!("fold sizes (sources kept together): {:?}", folds.fold_sizes(&records));
    Ok(())
}
