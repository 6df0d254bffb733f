//! Proposer-selection algorithms: standard greedy, completion-sampled
//! greedy, model-first greedy, the two label-level greedy variants, and
//! exhaustive search.
//!
//! All variants share the same conventions: ties break to the lowest
//! flat proposer index, every iteration is recorded in the trace, and
//! identical seeds and inputs give identical results. Candidate scoring
//! inside one iteration runs in parallel; each candidate's Monte-Carlo
//! samples use an independent derived stream, so the outcome does not
//! depend on scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetError, ResponseDataset, Split};
use crate::oracle::{OracleError, PresentationPolicy, SummarizerOracle};
use crate::stream::{StreamKey, DOM_KGREEDY, DOM_MODEL_FIRST, DOM_SURROGATE};
use crate::tree::TruthPredictor;

#[derive(Debug, thiserror::Error)]
pub enum SelectionError {
    #[error("ensemble size k = {k} exceeds pool size N = {n}")]
    InsufficientPool { k: usize, n: usize },
    #[error("ensemble size k must be at least 1")]
    ZeroK,
    #[error("C({n}, {k}) = {subsets} subsets exceed the enumeration cap {cap}")]
    TooLarge {
        n: usize,
        k: usize,
        subsets: u128,
        cap: u64,
    },
    #[error("no correct-count bin is feasible on the training split")]
    NoFeasibleBin,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// One greedy iteration: candidate scores (candidate id, score), the
/// chosen flat index, and how many random completions were sampled per
/// candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub candidate_scores: Vec<(usize, f64)>,
    pub chosen: usize,
    pub completions: u64,
}

/// Outcome of a selection run. `selected` is the sorted chosen set; the
/// trace preserves selection order; `queries_used` is the oracle ledger
/// delta over the run (zero for purely label-level methods).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<usize>,
    pub trace: Vec<IterationTrace>,
    pub queries_used: u64,
    pub seed: u64,
}

impl SelectionResult {
    fn from_trace(trace: Vec<IterationTrace>, queries_used: u64, seed: u64) -> Self {
        let mut selected: Vec<usize> = trace.iter().map(|t| t.chosen).collect();
        selected.sort_unstable();
        SelectionResult {
            selected,
            trace,
            queries_used,
            seed,
        }
    }
}

/// Argmax over (id, score) pairs with lowest-id tie-break. Assumes the
/// pairs are in ascending id order.
fn argmax_lowest(scores: &[(usize, f64)]) -> usize {
    let mut best = scores[0];
    for &(id, s) in &scores[1..] {
        if s > best.1 {
            best = (id, s);
        }
    }
    best.0
}

fn check_pool(n: usize, k: usize) -> Result<(), SelectionError> {
    if k == 0 {
        return Err(SelectionError::ZeroK);
    }
    if k > n {
        return Err(SelectionError::InsufficientPool { k, n });
    }
    Ok(())
}

/// Standard greedy on an arbitrary set function: at each step add the
/// candidate maximizing `score(S ∪ {i})`.
pub fn greedy_by_score<F>(score: F, n: usize, k: usize) -> Result<SelectionResult, SelectionError>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    check_pool(n, k)?;
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut trace = Vec::with_capacity(k);
    for _t in 1..=k {
        let candidates: Vec<usize> = (0..n).filter(|i| !selected.contains(i)).collect();
        let scores: Vec<(usize, f64)> = candidates
            .par_iter()
            .map(|&i| {
                let mut s = selected.clone();
                s.push(i);
                s.sort_unstable();
                (i, score(&s))
            })
            .collect();
        let chosen = argmax_lowest(&scores);
        trace.push(IterationTrace {
            candidate_scores: scores,
            chosen,
            completions: 0,
        });
        selected.push(chosen);
    }
    Ok(SelectionResult::from_trace(trace, 0, 0))
}

/// Standard greedy driven by live summarizer accuracy on the train
/// split: one oracle call per (candidate, train question) per iteration.
pub fn standard_greedy(
    oracle: &SummarizerOracle,
    ds: &ResponseDataset,
    split: &Split,
    k: usize,
    policy: &PresentationPolicy,
    seed: u64,
) -> Result<SelectionResult, SelectionError> {
    check_pool(ds.n_proposers(), k)?;
    let before = oracle.query_count();
    let train = &split.train;
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut trace = Vec::with_capacity(k);
    for _t in 1..=k {
        let mut scores = Vec::new();
        for i in 0..ds.n_proposers() {
            if selected.contains(&i) {
                continue;
            }
            let mut s = selected.clone();
            s.push(i);
            s.sort_unstable();
            scores.push((i, oracle.accuracy_of(ds, &s, train, policy, 1)?));
        }
        let chosen = argmax_lowest(&scores);
        trace.push(IterationTrace {
            candidate_scores: scores,
            chosen,
            completions: 0,
        });
        selected.push(chosen);
    }
    Ok(SelectionResult::from_trace(
        trace,
        oracle.query_count() - before,
        seed,
    ))
}

/// Completion-sampled greedy: each candidate's marginal is estimated at
/// the full team size k by sampling random completions.
///
/// At iteration t with current set S, a candidate i is scored by
/// averaging `score(S ∪ L') − score(S ∪ L)` over `m_reps` draws, where
/// L is a uniform size-(k−|S|) completion disjoint from S ∪ {i} and L'
/// swaps one uniform member of L for i. Both arguments always have size
/// exactly k. With k = N the completions are degenerate and the full
/// set is returned.
pub fn k_greedy<F>(
    score: F,
    n: usize,
    k: usize,
    m_reps: u32,
    seed: u64,
) -> Result<SelectionResult, SelectionError>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    check_pool(n, k)?;
    assert!(m_reps >= 1, "m_reps must be at least 1");
    if k == n {
        let trace = (0..n)
            .map(|i| IterationTrace {
                candidate_scores: Vec::new(),
                chosen: i,
                completions: 0,
            })
            .collect();
        return Ok(SelectionResult::from_trace(trace, 0, seed));
    }

    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut trace = Vec::with_capacity(k);
    for t in 1..=k {
        let need = k - selected.len();
        let candidates: Vec<usize> = (0..n).filter(|i| !selected.contains(i)).collect();
        let scores: Vec<(usize, f64)> = candidates
            .par_iter()
            .map(|&i| {
                let mut rng = StreamKey::new(seed)
                    .tag(DOM_KGREEDY)
                    .tag(t as u64)
                    .tag(i as u64)
                    .rng();
                let pool: Vec<usize> = (0..n)
                    .filter(|j| *j != i && !selected.contains(j))
                    .collect();
                let mut delta = 0.0;
                for _tau in 0..m_reps {
                    let picks = rand::seq::index::sample(&mut rng, pool.len(), need);
                    let completion: Vec<usize> = picks.iter().map(|x| pool[x]).collect();
                    let swap_out = rng.random_range(0..completion.len());

                    let mut with_completion = selected.clone();
                    with_completion.extend_from_slice(&completion);
                    with_completion.sort_unstable();

                    let mut swapped = completion.clone();
                    swapped[swap_out] = i;
                    let mut with_candidate = selected.clone();
                    with_candidate.extend_from_slice(&swapped);
                    with_candidate.sort_unstable();

                    debug_assert_eq!(with_completion.len(), k);
                    debug_assert_eq!(with_candidate.len(), k);
                    delta += score(&with_candidate) - score(&with_completion);
                }
                (i, delta / f64::from(m_reps))
            })
            .collect();
        let chosen = argmax_lowest(&scores);
        trace.push(IterationTrace {
            candidate_scores: scores,
            chosen,
            completions: u64::from(m_reps),
        });
        selected.push(chosen);
    }
    Ok(SelectionResult::from_trace(trace, 0, seed))
}

/// Knobs for model-first greedy. `train_fraction` controls the fresh
/// per-iteration partition of the labeled pool; when
/// `allow_repeated_models` is false a model already contributing a
/// proposer is skipped in later iterations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFirstOptions {
    pub train_fraction: f64,
    pub allow_repeated_models: bool,
}

impl Default for ModelFirstOptions {
    fn default() -> Self {
        ModelFirstOptions {
            train_fraction: 0.75,
            allow_repeated_models: true,
        }
    }
}

/// Model-first greedy: per iteration, re-partition the labeled pool,
/// score each model by assigning every train question to one of its
/// unselected prompts uniformly at random and measuring summarizer
/// accuracy of `S ∪ {assigned proposer}`, then take the best model's
/// best prompt (per-question estimates from the same assignment).
///
/// Consumes exactly `n_models · |train partition|` queries per iteration
/// while every model still has an unselected prompt.
pub fn model_first_greedy(
    oracle: &SummarizerOracle,
    ds: &ResponseDataset,
    split: &Split,
    k: usize,
    policy: &PresentationPolicy,
    seed: u64,
    opts: &ModelFirstOptions,
) -> Result<SelectionResult, SelectionError> {
    check_pool(ds.n_proposers(), k)?;
    let before = oracle.query_count();
    let labeled = split.labeled();
    let n_models = ds.n_models();
    let n_prompts = ds.n_prompts();

    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut trace = Vec::with_capacity(k);
    for t in 1..=k {
        // Fresh train partition of the labeled pool for this iteration.
        let mut pool = labeled.clone();
        let mut rng = StreamKey::new(seed)
            .tag(DOM_MODEL_FIRST)
            .tag(t as u64)
            .rng();
        use rand::seq::SliceRandom;
        pool.shuffle(&mut rng);
        let train_n = ((opts.train_fraction * pool.len() as f64).round() as usize)
            .clamp(1, pool.len());
        let train = &pool[..train_n];

        let mut model_scores: Vec<(usize, f64)> = Vec::new();
        let mut model_best_prompt: Vec<Option<(usize, f64)>> = vec![None; n_models];
        for model in 0..n_models {
            let available: Vec<usize> = (0..n_prompts)
                .map(|p| model * n_prompts + p)
                .filter(|flat| !selected.contains(flat))
                .collect();
            if available.is_empty() {
                continue;
            }
            if !opts.allow_repeated_models
                && selected
                    .iter()
                    .any(|&flat| flat / n_prompts == model)
            {
                continue;
            }
            let mut assign_rng = StreamKey::new(seed)
                .tag(DOM_MODEL_FIRST)
                .tag(t as u64)
                .tag(model as u64)
                .tag(1)
                .rng();
            let mut hits = 0usize;
            let mut prompt_hits = vec![0usize; n_prompts];
            let mut prompt_total = vec![0usize; n_prompts];
            for &q in train {
                let flat = available[assign_rng.random_range(0..available.len())];
                let mut set = selected.clone();
                set.push(flat);
                set.sort_unstable();
                let label = oracle.summarize_rep(ds, &set, q, policy, 0)?;
                let hit = label == ds.truth(q);
                hits += usize::from(hit);
                prompt_hits[flat % n_prompts] += usize::from(hit);
                prompt_total[flat % n_prompts] += 1;
            }
            model_scores.push((model, hits as f64 / train.len() as f64));
            // Best prompt within this model, from the same assignment,
            // restricted to the questions that prompt received.
            let mut best: Option<(usize, f64)> = None;
            for &flat in &available {
                let p = flat % n_prompts;
                let acc = if prompt_total[p] > 0 {
                    prompt_hits[p] as f64 / prompt_total[p] as f64
                } else {
                    0.0
                };
                if best.map_or(true, |(_, b)| acc > b) {
                    best = Some((flat, acc));
                }
            }
            model_best_prompt[model] = best;
        }

        if model_scores.is_empty() {
            // every model is exhausted or excluded (k > n_models with
            // repeats forbidden)
            return Err(SelectionError::InsufficientPool {
                k,
                n: selected.len(),
            });
        }
        let best_model = argmax_lowest(&model_scores);
        let (chosen, _) = model_best_prompt[best_model].expect("winning model has a prompt");
        trace.push(IterationTrace {
            candidate_scores: model_scores,
            chosen,
            completions: 0,
        });
        selected.push(chosen);
    }
    Ok(SelectionResult::from_trace(
        trace,
        oracle.query_count() - before,
        seed,
    ))
}

/// Fit the zero-query truth predictor for a proposer set.
pub fn fit_truth_predictor(
    ds: &ResponseDataset,
    set: &[usize],
    train: &[usize],
    depth: usize,
) -> TruthPredictor {
    TruthPredictor::fit(ds, set, train, depth)
}

/// Label-level greedy: completion-sampled greedy over the validation
/// accuracy of a truth predictor fit on the train split. Uses no
/// summarizer queries at all.
pub fn truth_prediction_greedy(
    ds: &ResponseDataset,
    split: &Split,
    k: usize,
    m_reps: u32,
    depth: usize,
    seed: u64,
) -> Result<SelectionResult, SelectionError> {
    let score = |set: &[usize]| -> f64 {
        TruthPredictor::fit(ds, set, &split.train, depth).accuracy(ds, set, &split.val)
    };
    k_greedy(score, ds.n_proposers(), k, m_reps, seed)
}

/// Estimated summarizer accuracy as a function of the correct count
/// only. `values[c]` is the empirical accuracy over `samples_per_bin`
/// queries whose input sets contained exactly `c` correct labels;
/// infeasible bins are linearly interpolated between the nearest
/// feasible neighbours (clamped at the ends) and flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateCurve {
    pub values: Vec<f64>,
    pub interpolated: Vec<bool>,
    pub samples_per_bin: u32,
}

impl SurrogateCurve {
    /// Mean curve value of a set's correct counts over a question set.
    pub fn score(&self, ds: &ResponseDataset, set: &[usize], qs: &[usize]) -> f64 {
        if qs.is_empty() {
            return 0.0;
        }
        let top = self.values.len() - 1;
        qs.iter()
            .map(|&q| self.values[ds.correct_count(set, q).min(top)])
            .sum::<f64>()
            / qs.len() as f64
    }
}

/// Fit the count-curve surrogate with `samples_per_bin` oracle calls per
/// feasible bin c ∈ {0..k}: sample a train question and a size-k set
/// with exactly c correct labels, query the summarizer, and average
/// correctness.
pub fn fit_surrogate(
    oracle: &SummarizerOracle,
    ds: &ResponseDataset,
    train: &[usize],
    k: usize,
    samples_per_bin: u32,
    policy: &PresentationPolicy,
    seed: u64,
) -> Result<SurrogateCurve, SelectionError> {
    check_pool(ds.n_proposers(), k)?;
    assert!(samples_per_bin >= 1);
    let correct_pools: Vec<Vec<usize>> = train
        .iter()
        .map(|&q| (0..ds.n_proposers()).filter(|&p| ds.is_correct(p, q)).collect())
        .collect();
    let wrong_pools: Vec<Vec<usize>> = train
        .iter()
        .map(|&q| (0..ds.n_proposers()).filter(|&p| !ds.is_correct(p, q)).collect())
        .collect();

    let mut values = vec![0.0f64; k + 1];
    let mut interpolated = vec![false; k + 1];
    let mut feasible_any = false;
    for c in 0..=k {
        let feasible: Vec<usize> = (0..train.len())
            .filter(|&qi| correct_pools[qi].len() >= c && wrong_pools[qi].len() >= k - c)
            .collect();
        if feasible.is_empty() {
            interpolated[c] = true;
            continue;
        }
        feasible_any = true;
        let mut rng = StreamKey::new(seed)
            .tag(DOM_SURROGATE)
            .tag(c as u64)
            .rng();
        let mut hits = 0u32;
        for s in 0..samples_per_bin {
            let qi = feasible[rng.random_range(0..feasible.len())];
            let q = train[qi];
            let mut set: Vec<usize> = rand::seq::index::sample(&mut rng, correct_pools[qi].len(), c)
                .iter()
                .map(|x| correct_pools[qi][x])
                .collect();
            set.extend(
                rand::seq::index::sample(&mut rng, wrong_pools[qi].len(), k - c)
                    .iter()
                    .map(|x| wrong_pools[qi][x]),
            );
            set.sort_unstable();
            let label = oracle.summarize_rep(ds, &set, q, policy, u64::from(s))?;
            hits += u32::from(label == ds.truth(q));
        }
        values[c] = f64::from(hits) / f64::from(samples_per_bin);
    }
    if !feasible_any {
        return Err(SelectionError::NoFeasibleBin);
    }

    // Fill infeasible bins: linear between nearest feasible neighbours,
    // clamped to the nearest feasible value at the ends.
    let feasible_idx: Vec<usize> = (0..=k).filter(|&c| !interpolated[c]).collect();
    for c in 0..=k {
        if !interpolated[c] {
            continue;
        }
        let lo = feasible_idx.iter().rev().find(|&&f| f < c);
        let hi = feasible_idx.iter().find(|&&f| f > c);
        values[c] = match (lo, hi) {
            (Some(&lo), Some(&hi)) => {
                let w = (c - lo) as f64 / (hi - lo) as f64;
                values[lo] + (values[hi] - values[lo]) * w
            }
            (Some(&lo), None) => values[lo],
            (None, Some(&hi)) => values[hi],
            (None, None) => unreachable!("at least one bin is feasible"),
        };
    }
    Ok(SurrogateCurve {
        values,
        interpolated,
        samples_per_bin,
    })
}

/// Surrogate-scored greedy: fit the count curve once on the train split,
/// then run completion-sampled greedy on the mean curve value over the
/// validation split. Queries are spent only on the fit:
/// `(k+1) · samples_per_bin` when every bin is feasible.
#[allow(clippy::too_many_arguments)]
pub fn oracle_surrogate_greedy(
    oracle: &SummarizerOracle,
    ds: &ResponseDataset,
    split: &Split,
    k: usize,
    samples_per_bin: u32,
    m_reps: u32,
    policy: &PresentationPolicy,
    seed: u64,
) -> Result<SelectionResult, SelectionError> {
    let before = oracle.query_count();
    let curve = fit_surrogate(oracle, ds, &split.train, k, samples_per_bin, policy, seed)?;
    let score = |set: &[usize]| -> f64 { curve.score(ds, set, &split.val) };
    let mut result = k_greedy(score, ds.n_proposers(), k, m_reps, seed)?;
    result.queries_used = oracle.query_count() - before;
    Ok(result)
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Exact argmax over all size-k subsets, enumerated lexicographically so
/// ties resolve to the lexicographically lowest set. Refuses pools where
/// C(N, k) exceeds the cap.
pub fn exhaustive_search<F>(
    mut score: F,
    n: usize,
    k: usize,
    cap: u64,
) -> Result<Vec<usize>, SelectionError>
where
    F: FnMut(&[usize]) -> f64,
{
    check_pool(n, k)?;
    let subsets = binomial(n, k);
    if subsets > u128::from(cap) {
        return Err(SelectionError::TooLarge { n, k, subsets, cap });
    }
    use itertools::Itertools;
    let mut best: Option<(Vec<usize>, f64)> = None;
    for combo in (0..n).combinations(k) {
        let s = score(&combo);
        if best.as_ref().map_or(true, |(_, b)| s > *b) {
            best = Some((combo, s));
        }
    }
    Ok(best.expect("at least one subset").0)
}
