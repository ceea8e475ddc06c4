//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vo_lab::dataset::ProblemRecord;
use vo_lab::polyset::{factorial, PolySet, Polynomial, VariableOrdering};

pub fn random_polynomial(rng: &mut ChaCha8Rng, nvars: usize, max_deg: u32, max_terms: usize) -> Polynomial {
    loop {
        let n = rng.gen_range(1..=max_terms);
        let terms: Vec<(Vec<u32>, BigInt)> = (0..n)
            .map(|_| {
                let mut budget = rng.gen_range(0..=max_deg);
                let mut e = vec![0u32; nvars];
                while budget > 0 {
                    e[rng.gen_range(0..nvars)] += 1;
                    budget -= 1;
                }
                (e, BigInt::from(rng.gen_range(-9i64..=9)))
            })
            .collect();
        let p = Polynomial::from_terms(nvars, terms);
        if !p.is_zero() && !p.is_constant() {
            return p;
        }
    }
}

pub fn random_polyset(rng: &mut ChaCha8Rng, nvars: usize, max_polys: usize, max_deg: u32) -> PolySet {
    let k = rng.gen_range(1..=max_polys);
    let polys: Vec<Polynomial> = (0..k).map(|_| random_polynomial(rng, nvars, max_deg, 5)).collect();
    PolySet::new(nvars, polys).unwrap()
}

/// Distinct random timings with a few timeouts that never hit the minimum.
pub fn tie_free_timings(rng: &mut ChaCha8Rng, nvars: usize, limit: f64) -> Vec<Option<f64>> {
    let n = factorial(nvars);
    let mut t: Vec<f64> = Vec::with_capacity(n);
    while t.len() < n {
        let x = (rng.gen_range(1..(limit as u64) * 1000) as f64) / 1000.0;
        if !t.contains(&x) {
            t.push(x);
        }
    }
    let min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    t.into_iter()
        .map(|x| if x != min && rng.gen_bool(0.1) { None } else { Some(x) })
        .collect()
}

pub fn record(id: &str, source: &str, set: PolySet, timings: Vec<Option<f64>>, limit: f64) -> ProblemRecord {
    ProblemRecord::new(id, source, set, timings, limit, None).unwrap()
}

/// Fraction-free Gaussian elimination determinant.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Coefficients of `p` in `var`, low degree first, each evaluated at
/// `point` (all other variables).
fn coeffs_at(p: &Polynomial, var: usize, point: &[BigInt]) -> Vec<BigInt> {
    let deg = p.var_degree(var) as usize;
    let mut c = vec![BigInt::zero(); deg + 1];
    for m in p.terms() {
        let mut v = m.coeff.clone();
        for (i, &e) in m.exponents.iter().enumerate() {
            if i != var {
                v *= point[i].pow(e);
            }
        }
        c[m.exponents[var] as usize] += v;
    }
    c
}

/// Determinant of the Sylvester matrix of `p`, `q` in `var`, with the other
/// variables fixed at `point`. The formal degrees in `var` are used even if
/// a leading coefficient vanishes at the point.
pub fn sylvester_resultant_at(p: &Polynomial, q: &Polynomial, var: usize, point: &[BigInt]) -> BigInt {
    let a = coeffs_at(p, var, point);
    let b = coeffs_at(q, var, point);
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(rows)
}

pub fn eval(p: &Polynomial, point: &[BigInt]) -> BigInt {
    p.terms()
        .iter()
        .map(|m| {
            let mut v = m.coeff.clone();
            for (i, &e) in m.exponents.iter().enumerate() {
                v *= point[i].pow(e);
            }
            v
        })
        .sum()
}

fn standardize(train: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = train.len() as f64;
    let w = train[0].len();
    let mut mean = vec![0.0; w];
    for r in train {
        for j in 0..w {
            mean[j] += r[j];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut sd = vec![0.0; w];
    for r in train {
        for j in 0..w {
            sd[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
        }
    }
    for s in &mut sd {
        *s = (*s / n).sqrt();
    }
    (mean, sd)
}

fn scaled(x: &[f64], mean: &[f64], sd: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|j| if sd[j] > 0.0 { (x[j] - mean[j]) / sd[j] } else { 0.0 }).collect()
}

/// All training rows sorted by (squared distance, index), first `k`.
fn brute_neighbours(train: &[Vec<f64>], q: &[f64], k: usize) -> Vec<(f64, usize)> {
    let (mean, sd) = standardize(train);
    let qs = scaled(q, &mean, &sd);
    let mut all: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let rs = scaled(r, &mean, &sd);
            let mut d = 0.0;
            for j in 0..rs.len() {
                d += (rs[j] - qs[j]) * (rs[j] - qs[j]);
            }
            (d, i)
        })
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    all.truncate(k);
    all
}

fn brute_weights(nb: &[(f64, usize)], distance: bool) -> Vec<f64> {
    if !distance {
        return vec![1.0; nb.len()];
    }
    if nb.iter().any(|x| x.0 == 0.0) {
        return nb.iter().map(|x| if x.0 == 0.0 { 1.0 } else { 0.0 }).collect();
    }
    nb.iter().map(|x| 1.0 / x.0.sqrt()).collect()
}

pub fn brute_knn_class(train: &[Vec<f64>], labels: &[usize], classes: usize, q: &[f64], k: usize, distance: bool) -> usize {
    let nb = brute_neighbours(train, q, k);
    let w = brute_weights(&nb, distance);
    let mut votes = vec![0.0; classes];
    for (i, (_, idx)) in nb.iter().enumerate() {
        votes[labels[*idx]] += w[i];
    }
    let mut best = 0;
    for c in 1..classes {
        if votes[c] > votes[best] {
            best = c;
        }
    }
    best
}

pub fn brute_knn_value(train: &[Vec<f64>], y: &[f64], q: &[f64], k: usize, distance: bool) -> f64 {
    let nb = brute_neighbours(train, q, k);
    let w = brute_weights(&nb, distance);
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (_, idx)) in nb.iter().enumerate() {
        num += w[i] * y[*idx];
        den += w[i];
    }
    num / den
}

/// (solved, accuracy, total time, mean markup), computed in one pass.
pub fn straight_line_metrics(choices: &[VariableOrdering], records: &[ProblemRecord]) -> (usize, f64, f64, f64) {
    let mut solved = 0;
    let mut accurate = 0;
    let mut total = 0.0;
    let mut markup = 0.0;
    for (c, r) in choices.iter().zip(records) {
        let pen: Vec<f64> = r.timings.iter().map(|t| t.unwrap_or(2.0 * r.timeout_limit)).collect();
        let best = pen.iter().cloned().fold(f64::INFINITY, f64::min);
        let t = pen[c.index()];
        if r.timings[c.index()].is_some() {
            solved += 1;
        }
        if t == best {
            accurate += 1;
        }
        total += t;
        markup += (t - best) / (best + 1.0);
    }
    let n = records.len() as f64;
    (solved, accurate as f64 / n, total, markup / n)
}
