mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vo_lab::dataset::synth::{proxy_label, synthetic_problems, CorpusConfig};
use vo_lab::dataset::{
    augment, best_ordering, build_classification, build_ordering_regression, build_variable_regression, dedup,
    fastest_ordering, read_problems, split_folds, write_problems, ProblemRecord, VariableInstances,
};
use vo_lab::features::{classification_embedding, FEATURES_PER_VARIABLE};
use vo_lab::polyset::{factorial, parse_polyset, Permutation};

use common::{random_polyset, record, tie_free_timings};

fn random_record(seed: u64, n: usize) -> ProblemRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_polyset(&mut rng, n, 4, 4);
    let t = tie_free_timings(&mut rng, n, 30.0);
    record(&format!("r{seed}"), "s", s, t, 30.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn label_transport(seed in any::<u64>(), n in 2usize..=4) {
        let r = random_record(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let sigma = Permutation::random(n, &mut rng);
        let p = r.permute(&sigma);
        prop_assert_eq!(fastest_ordering(&p), best_ordering(&r).transport(&sigma));
        prop_assert_eq!(best_ordering(&p), fastest_ordering(&p));
        prop_assert_eq!(p.optimal_time(), r.optimal_time());
    }

    #[test]
    fn augmented_embeddings_are_block_permutations(seed in any::<u64>()) {
        let r = random_record(seed, 3);
        let base = classification_embedding(&r.set);
        for sigma in Permutation::all(3) {
            let e = classification_embedding(&r.set.apply_permutation(&sigma));
            for v in 0..3 {
                let w = sigma.image(v);
                let f = FEATURES_PER_VARIABLE;
                prop_assert_eq!(&e.values[w * f..(w + 1) * f], &base.values[v * f..(v + 1) * f]);
            }
        }
    }

    #[test]
    fn instance_counts(seeds in prop::collection::vec(any::<u64>(), 1..6), n in 2usize..=4) {
        let records: Vec<ProblemRecord> = seeds.iter().map(|&s| random_record(s, n)).collect();
        prop_assert_eq!(build_classification(&records).len(), records.len());
        prop_assert_eq!(build_ordering_regression(&records).len(), factorial(n) * records.len());
        prop_assert_eq!(build_variable_regression(&records, VariableInstances::Original).len(), n * records.len());
        let aug = augment(&records);
        prop_assert_eq!(aug.len(), factorial(n) * records.len());
        let mut counts = vec![0usize; factorial(n)];
        for a in &aug {
            counts[best_ordering(a).index()] += 1;
        }
        prop_assert!(counts.iter().all(|&c| c == records.len()));
    }

    #[test]
    fn dedup_keeps_planted_uniques(uniques in 1usize..20, copies in prop::collection::vec(0usize..20, 0..30), seed in any::<u64>()) {
        let set = parse_polyset("x1 + x2 + x3", 3).unwrap();
        let base: Vec<ProblemRecord> = (0..uniques)
            .map(|i| {
                let mut t = vec![Some(10.0); 6];
                t[i % 6] = Some(1.0 + i as f64);
                ProblemRecord::new(format!("u{i}"), "s", set.clone(), t, 30.0, Some(vec![i as u64; 6])).unwrap()
            })
            .collect();
        let mut all = base.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (j, c) in copies.iter().enumerate() {
            let mut dup = base[c % uniques].clone();
            dup.id = format!("d{j}");
            all.insert(rng.gen_range(0..=all.len()), dup);
        }
        let once = dedup(&all);
        prop_assert_eq!(once.len(), uniques);
        prop_assert_eq!(dedup(&once), once.clone());
    }

    #[test]
    fn folds_never_split_sources(sizes in prop::collection::vec(1usize..30, 1..40), seed in any::<u64>()) {
        let set = parse_polyset("x1 + x2", 2).unwrap();
        let records: Vec<ProblemRecord> = sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &n)| {
                let set = set.clone();
                (0..n).map(move |i| {
                    record(&format!("g{g}-{i}"), &format!("src{g}"), set.clone(), vec![Some(1.0), Some(2.0)], 5.0)
                })
            })
            .collect();
        let folds = split_folds(&records, 5, seed).unwrap();
        let mut seen: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
        for r in &records {
            seen.entry(r.source.as_str()).or_default().insert(folds.fold_of(r));
        }
        prop_assert!(seen.values().all(|f| f.len() == 1));
        prop_assert_eq!(folds.fold_sizes(&records).iter().sum::<usize>(), records.len());
    }

    #[test]
    fn greedy_folds_near_exhaustive_optimum(sizes in prop::collection::vec(1usize..40, 1..=8), k in 2usize..=4, seed in any::<u64>()) {
        let set = parse_polyset("x1 + x2", 2).unwrap();
        let records: Vec<ProblemRecord> = sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &n)| {
                let set = set.clone();
                (0..n).map(move |i| record(&format!("g{g}-{i}"), &format!("src{g}"), set.clone(), vec![Some(1.0), Some(2.0)], 5.0))
            })
            .collect();
        let greedy = *split_folds(&records, k, seed).unwrap().fold_sizes(&records).iter().max().unwrap();
        // exhaustive: every assignment of groups to folds
        let g = sizes.len();
        let mut best = usize::MAX;
        for code in 0..k.pow(g as u32) {
            let mut loads = vec![0usize; k];
            let mut c = code;
            for s in &sizes {
                loads[c % k] += s;
                c /= k;
            }
            best = best.min(*loads.iter().max().unwrap());
        }
        // largest-first onto the lightest fold is within 4/3 - 1/(3k) of optimal
        prop_assert!((greedy as f64) <= (4.0 / 3.0 - 1.0 / (3.0 * k as f64)) * best as f64 + 1e-9);
    }
}

#[test]
fn problems_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let records = proxy_label(&synthetic_problems(&CorpusConfig::new(40, 3)), 95.0).unwrap();
    let path = dir.path().join("p.jsonl");
    write_problems(&path, &records).unwrap();
    assert_eq!(read_problems(&path).unwrap(), records);
    let aug = augment(&records);
    write_problems(&path, &aug).unwrap();
    assert_eq!(read_problems(&path).unwrap(), aug);
}

#[test]
fn proxy_labels_are_costs_with_timeouts() {
    let raw = synthetic_problems(&CorpusConfig::new(60, 9));
    let records = proxy_label(&raw, 90.0).unwrap();
    assert!(!records.is_empty());
    let limit = records[0].timeout_limit;
    for r in &records {
        assert_eq!(r.timeout_limit, limit);
        let costs = vo_lab::projection::proxy_costs(&r.set);
        for (t, c) in r.timings.iter().zip(costs) {
            match t {
                Some(t) => assert_eq!(*t, c.0),
                None => assert!(c.0 > limit),
            }
        }
    }
}
