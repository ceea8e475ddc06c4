//! Seeded synthetic problem corpora, labelled by projection proxy cost.
//!
//! Each source draws its own per-variable degree caps around a common base,
//! so problems from one source resemble each other and the class
//! distribution of the corpus is skewed, as in harvested benchmark sets.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ProblemRecord, RawProblem};
use crate::error::{Error, Result};
use crate::polyset::{PolySet, Polynomial};
use crate::projection::proxy_costs;

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusConfig {
    pub problems: usize,
    pub sources: usize,
    pub nvars: usize,
    /// Per-variable exponent caps before the per-source jitter.
    pub base_caps: Vec<u32>,
    /// Cap on the total degree of a monomial.
    pub max_degree: u32,
    pub max_polys: usize,
    pub max_terms: usize,
    pub seed: u64,
}

impl CorpusConfig {
    pub fn new(problems: usize, seed: u64) -> Self {
        CorpusConfig {
            problems,
            sources: (problems / 12).max(1),
            nvars: 3,
            base_caps: vec![1, 2, 2],
            max_degree: 3,
            max_polys: 3,
            max_terms: 4,
            seed,
        }
    }
}

fn random_polynomial(rng: &mut ChaCha8Rng, caps: &[u32], cfg: &CorpusConfig) -> Polynomial {
    let n = caps.len();
    loop {
        let terms = (0..rng.gen_range(2..=cfg.max_terms.max(2))).map(|_| {
            let exps: Vec<u32> = loop {
                let e: Vec<u32> =
                    caps.iter().map(|&c| if rng.gen_bool(0.6) { rng.gen_range(0..=c) } else { 0 }).collect();
                if e.iter().sum::<u32>() <= cfg.max_degree {
                    break e;
                }
            };
            let mut c: i64 = rng.gen_range(1..=5);
            if rng.gen_bool(0.5) {
                c = -c;
            }
            (exps, BigInt::from(c))
        });
        let p = Polynomial::from_terms(n, terms);
        if !p.is_constant() {
            return p;
        }
    }
}

/// Unlabelled problems; every variable occurs in every set.
pub fn synthetic_problems(cfg: &CorpusConfig) -> Vec<RawProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.nvars;
    let sources = cfg.sources.max(1);
    let source_caps: Vec<Vec<u32>> = (0..sources)
        .map(|_| {
            (0..n)
                .map(|v| {
                    let base = cfg.base_caps.get(v).copied().unwrap_or(2) as i64;
                    (base + rng.gen_range(-1..=1)).clamp(1, 3) as u32
                })
                .collect()
        })
        .collect();
    // source s is picked with weight 1/(s+1)
    let weights: Vec<f64> = (0..sources).map(|s| 1.0 / (s as f64 + 1.0)).collect();
    let total: f64 = weights.iter().sum();
    (0..cfg.problems)
        .map(|i| {
            let mut u = rng.gen::<f64>() * total;
            let mut s = 0;
            while s + 1 < sources && u >= weights[s] {
                u -= weights[s];
                s += 1;
            }
            let set = loop {
                let k = rng.gen_range(2..=cfg.max_polys.max(2));
                let polys: Vec<Polynomial> =
                    (0..k).map(|_| random_polynomial(&mut rng, &source_caps[s], cfg)).collect();
                let set = PolySet::new(n, polys).expect("matching arity");
                if (0..n).all(|v| set.contains_var(v)) {
                    break set;
                }
            };
            RawProblem {
                id: format!("syn{}-{i}", cfg.seed),
                source: format!("src{s}"),
                nvars: n,
                polys: set.to_string(),
                timings: None,
                timeout_limit: None,
                cells: None,
                label: None,
            }
        })
        .collect()
}

/// Nearest-rank percentile of `values` (`q` in `(0, 100]`).
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q / 100.0) * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

/// Uses proxy costs as timings. Costs above the `q`-th percentile of all
/// costs become timeouts; problems where every ordering times out are dropped.
pub fn proxy_label(problems: &[RawProblem], q: f64) -> Result<Vec<ProblemRecord>> {
    if problems.is_empty() {
        return Ok(Vec::new());
    }
    let costs: Vec<(PolySet, Vec<f64>)> = problems
        .par_iter()
        .map(|p| {
            let set = crate::polyset::parse_polyset(&p.polys, p.nvars)?;
            let c = proxy_costs(&set).into_iter().map(|c| c.0).collect();
            Ok((set, c))
        })
        .collect::<Result<_>>()?;
    let all: Vec<f64> = costs.iter().flat_map(|(_, c)| c.iter().copied()).collect();
    let limit = percentile(&all, q);
    if limit <= 0.0 {
        return Err(Error::Data("proxy costs are all zero".into()));
    }
    let mut out = Vec::new();
    for (p, (set, c)) in problems.iter().zip(costs) {
        let timings = c.iter().map(|&t| (t <= limit).then_some(t)).collect::<Vec<_>>();
        if timings.iter().all(Option::is_none) {
            continue;
        }
        out.push(ProblemRecord::new(p.id.clone(), p.source.clone(), set, timings, limit, p.cells.clone())?);
    }
    Ok(out)
}

/// A labelled corpus: generate, proxy-label at the 95th percentile.
pub fn synthetic_corpus(cfg: &CorpusConfig) -> Result<Vec<ProblemRecord>> {
    proxy_label(&synthetic_problems(cfg), 95.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::best_ordering;

    #[test]
    fn corpus_is_seeded_and_skewed() {
        let cfg = CorpusConfig::new(300, 5);
        let a = synthetic_corpus(&cfg).unwrap();
        assert_eq!(a, synthetic_corpus(&cfg).unwrap());
        assert!(a.len() > 250);
        let mut counts = [0usize; 6];
        for r in &a {
            counts[best_ordering(r).index()] += 1;
        }
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        assert!(*hi > 2 * (*lo).max(1), "{counts:?}");
    }

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(percentile(&v, 95.0), 19.0);
        assert_eq!(percentile(&v, 100.0), 20.0);
        assert_eq!(percentile(&[3.0], 50.0), 3.0);
    }
}
