//! Cross-validated comparison of the three training-set modes on a synthetic corpus.
//!
//! ```text
//! cargo run --release --example experiment -- 400
//! ```

use vo_lab::dataset::synth::{synthetic_corpus, CorpusConfig};
use vo_lab::experiment::{run_on_records, DatasetMode, ExperimentConfig};
use vo_lab::learn::SearchSpace;

fn main() -> vo_lab::Result<()> {
    let n = std::env::args().nth(1).map_or(300, |s| s.parse().expect("problem count"));
    let records = synthetic_corpus(&CorpusConfig::new(n, 11))?;
    for mode in [DatasetMode::Imbalanced, DatasetMode::Balanced, DatasetMode::Augmented] {
        let cfg = ExperimentConfig {
            mode,
            seed: 11,
            search: SearchSpace { trials: 4, seed: 11, ..SearchSpace::default() },
            ..ExperimentConfig::default()
        };
        let report = run_on_records(&cfg, &records)?;
        println!("{mode:?}");
        for s in &report.mean {
            let r = &s.report;
            println!("  {:<6} accuracy {:.3} total {:>8.1} markup {:.3}", s.strategy, r.time_accuracy, r.total_time, r.markup);
        }
    }
    Ok(())
}
