//! Reference selection rules and label-level aggregation baselines.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetError, LabelId, ResponseDataset, Split};
use crate::oracle::{canonical_set_key, OracleError, PresentationPolicy, SummarizerOracle};
use crate::stream::{StreamKey, DOM_SHAPLEY, DOM_VOTE};
use crate::tree::TruthPredictor;

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("no proposer meets the accuracy threshold {tau}")]
    NoEligibleProposer { tau: f64 },
    #[error("dataset has no judge scores")]
    MissingJudgeScores,
    #[error("coalition sample count {z} is not divisible by the {sizes} coalition sizes")]
    IndivisibleSamples { z: u32, sizes: usize },
    #[error("requested {t_h} questions per coalition but the train split has {available}")]
    NotEnoughQuestions { t_h: u32, available: usize },
    #[error("k = {k} exceeds pool size {n}")]
    KTooLarge { k: usize, n: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// How `best_model` ranks models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BestModelRule {
    /// Mean accuracy over the model's prompts.
    #[default]
    MeanOverPrompts,
    /// Accuracy of the model's single best prompt.
    BestPrompt,
}

/// The full proposer set, independent of k.
pub fn input_all(ds: &ResponseDataset) -> Vec<usize> {
    (0..ds.n_proposers()).collect()
}

/// All prompts of the highest-ranked model (lowest model index on ties).
pub fn best_model(
    ds: &ResponseDataset,
    train: &[usize],
    rule: BestModelRule,
) -> Result<Vec<usize>, BaselineError> {
    if train.is_empty() {
        return Err(DatasetError::EmptyQuestionSet.into());
    }
    let np = ds.n_prompts();
    let mut best = (0usize, f64::NEG_INFINITY);
    for model in 0..ds.n_models() {
        let accs = (0..np).map(|p| ds.accuracy_flat(model * np + p, train).unwrap());
        let score = match rule {
            BestModelRule::MeanOverPrompts => accs.sum::<f64>() / np as f64,
            BestModelRule::BestPrompt => accs.fold(f64::NEG_INFINITY, f64::max),
        };
        if score > best.1 {
            best = (model, score);
        }
    }
    Ok((0..np).map(|p| best.0 * np + p).collect())
}

/// The k individually most accurate proposers (index ties ascending).
pub fn top_accuracy(
    ds: &ResponseDataset,
    train: &[usize],
    k: usize,
) -> Result<Vec<usize>, BaselineError> {
    let n = ds.n_proposers();
    if k > n {
        return Err(BaselineError::KTooLarge { k, n });
    }
    if train.is_empty() {
        return Err(DatasetError::EmptyQuestionSet.into());
    }
    let mut scored: Vec<(usize, f64)> = (0..n)
        .map(|p| (p, ds.accuracy_flat(p, train).unwrap()))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut out: Vec<usize> = scored.into_iter().take(k).map(|(p, _)| p).collect();
    out.sort_unstable();
    Ok(out)
}

/// One proposer per model: each model's most accurate prompt.
pub fn moa_per_model_top1(
    ds: &ResponseDataset,
    train: &[usize],
) -> Result<Vec<usize>, BaselineError> {
    if train.is_empty() {
        return Err(DatasetError::EmptyQuestionSet.into());
    }
    let np = ds.n_prompts();
    let mut out = Vec::with_capacity(ds.n_models());
    for model in 0..ds.n_models() {
        let mut best = (model * np, f64::NEG_INFINITY);
        for p in 0..np {
            let flat = model * np + p;
            let acc = ds.accuracy_flat(flat, train).unwrap();
            if acc > best.1 {
                best = (flat, acc);
            }
        }
        out.push(best.0);
    }
    Ok(out)
}

/// Fraction of `qs` on which two proposers emit different labels.
pub fn pairwise_disagreement(ds: &ResponseDataset, i: usize, j: usize, qs: &[usize]) -> f64 {
    if qs.is_empty() {
        return 0.0;
    }
    let diff = qs.iter().filter(|&&q| ds.label(i, q) != ds.label(j, q)).count();
    diff as f64 / qs.len() as f64
}

/// Seed with the most accurate proposer, then greedily add the eligible
/// proposer (train accuracy ≥ tau) maximizing mean disagreement with the
/// current set. Index ties ascending.
pub fn conditioned_diversity(
    ds: &ResponseDataset,
    train: &[usize],
    k: usize,
    tau: f64,
) -> Result<Vec<usize>, BaselineError> {
    let n = ds.n_proposers();
    if k > n {
        return Err(BaselineError::KTooLarge { k, n });
    }
    if train.is_empty() {
        return Err(DatasetError::EmptyQuestionSet.into());
    }
    let accs: Vec<f64> = (0..n).map(|p| ds.accuracy_flat(p, train).unwrap()).collect();
    let seed_proposer = (0..n)
        .max_by(|&a, &b| accs[a].partial_cmp(&accs[b]).unwrap().then(b.cmp(&a)))
        .unwrap();
    let mut selected = vec![seed_proposer];
    while selected.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for p in 0..n {
            if selected.contains(&p) || accs[p] < tau {
                continue;
            }
            let mean_dis = selected
                .iter()
                .map(|&s| pairwise_disagreement(ds, p, s, train))
                .sum::<f64>()
                / selected.len() as f64;
            if best.map_or(true, |(_, b)| mean_dis > b) {
                best = Some((p, mean_dis));
            }
        }
        match best {
            Some((p, _)) => selected.push(p),
            None => return Err(BaselineError::NoEligibleProposer { tau }),
        }
    }
    selected.sort_unstable();
    Ok(selected)
}

/// Top-k proposers by mean judge grade over the train split.
pub fn judge_topk(
    ds: &ResponseDataset,
    train: &[usize],
    k: usize,
) -> Result<Vec<usize>, BaselineError> {
    let n = ds.n_proposers();
    if k > n {
        return Err(BaselineError::KTooLarge { k, n });
    }
    if !ds.has_judge_scores() {
        return Err(BaselineError::MissingJudgeScores);
    }
    if train.is_empty() {
        return Err(DatasetError::EmptyQuestionSet.into());
    }
    let mut scored: Vec<(usize, f64)> = (0..n)
        .map(|p| {
            let mean = train
                .iter()
                .map(|&q| ds.judge_score(p, q).unwrap())
                .sum::<f64>()
                / train.len() as f64;
            (p, mean)
        })
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut out: Vec<usize> = scored.into_iter().take(k).map(|(p, _)| p).collect();
    out.sort_unstable();
    Ok(out)
}

/// Monte-Carlo Shapley estimates: per-proposer mean marginal gain over
/// sampled coalitions and questions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapleyEstimate {
    pub values: Vec<f64>,
    pub coalitions_per_proposer: u32,
    pub questions_per_coalition: u32,
}

/// Estimate each proposer's Shapley value by coalition sampling and take
/// the top k.
///
/// For every proposer, `z` coalitions are drawn from the other
/// proposers (`z / |sizes|` per size in `sizes`); each coalition is
/// scored on `t_h` sampled train questions with and without the
/// proposer. Consumes exactly `2 · N · z · t_h` queries.
#[allow(clippy::too_many_arguments)]
pub fn approx_shapley(
    oracle: &SummarizerOracle,
    ds: &ResponseDataset,
    train: &[usize],
    k: usize,
    z: u32,
    t_h: u32,
    sizes: std::ops::RangeInclusive<usize>,
    policy: &PresentationPolicy,
    seed: u64,
) -> Result<(Vec<usize>, ShapleyEstimate), BaselineError> {
    let n = ds.n_proposers();
    if k > n {
        return Err(BaselineError::KTooLarge { k, n });
    }
    let size_list: Vec<usize> = sizes.filter(|&s| s >= 1 && s < n).collect();
    if size_list.is_empty() || z % size_list.len() as u32 != 0 {
        return Err(BaselineError::IndivisibleSamples {
            z,
            sizes: size_list.len().max(1),
        });
    }
    if (t_h as usize) > train.len() {
        return Err(BaselineError::NotEnoughQuestions {
            t_h,
            available: train.len(),
        });
    }
    let per_size = z / size_list.len() as u32;

    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut total = 0.0f64;
            let mut sample_id = 0u64;
            for (si, &size) in size_list.iter().enumerate() {
                let mut rng = StreamKey::new(seed)
                    .tag(DOM_SHAPLEY)
                    .tag(i as u64)
                    .tag(si as u64)
                    .rng();
                for _ in 0..per_size {
                    let others: Vec<usize> = (0..n).filter(|&p| p != i).collect();
                    let coalition: Vec<usize> =
                        rand::seq::index::sample(&mut rng, others.len(), size)
                            .iter()
                            .map(|x| others[x])
                            .collect();
                    let questions: Vec<usize> =
                        rand::seq::index::sample(&mut rng, train.len(), t_h as usize)
                            .iter()
                            .map(|x| train[x])
                            .collect();
                    let mut with_i = coalition.clone();
                    with_i.push(i);
                    with_i.sort_unstable();
                    let mut without = coalition;
                    without.sort_unstable();

                    // distinct rep per sample keeps draws independent
                    let rep = (i as u64) << 32 | sample_id;
                    sample_id += 1;
                    let mut hits_with = 0u32;
                    let mut hits_without = 0u32;
                    for &q in &questions {
                        let a = oracle.summarize_rep(ds, &with_i, q, policy, rep)?;
                        hits_with += u32::from(a == ds.truth(q));
                        let b = oracle.summarize_rep(ds, &without, q, policy, rep)?;
                        hits_without += u32::from(b == ds.truth(q));
                    }
                    total +=
                        f64::from(hits_with) / f64::from(t_h) - f64::from(hits_without) / f64::from(t_h);
                }
            }
            Ok(total / f64::from(z))
        })
        .collect::<Result<Vec<f64>, BaselineError>>()?;

    let mut ranked: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut selected: Vec<usize> = ranked.into_iter().take(k).map(|(p, _)| p).collect();
    selected.sort_unstable();
    Ok((
        selected,
        ShapleyEstimate {
            values,
            coalitions_per_proposer: z,
            questions_per_coalition: t_h,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteVariant {
    Plain,
    Weighted,
}

/// Log-odds weights from train accuracies, with probability clamping
/// ε = 1/(2·|train|) so empirical rates of 0 or 1 stay finite.
fn vote_weights(
    ds: &ResponseDataset,
    set: &[usize],
    variant: VoteVariant,
    train: Option<&[usize]>,
) -> Result<Vec<f64>, BaselineError> {
    match variant {
        VoteVariant::Plain => Ok(vec![1.0; set.len()]),
        VoteVariant::Weighted => {
            let train = train.ok_or(DatasetError::EmptyQuestionSet)?;
            if train.is_empty() {
                return Err(DatasetError::EmptyQuestionSet.into());
            }
            let eps = 1.0 / (2.0 * train.len() as f64);
            Ok(set
                .iter()
                .map(|&p| {
                    let acc = ds.accuracy_flat(p, train).unwrap().clamp(eps, 1.0 - eps);
                    (acc / (1.0 - acc)).ln()
                })
                .collect())
        }
    }
}

fn tally_vote(
    ds: &ResponseDataset,
    set: &[usize],
    q: usize,
    weights: &[f64],
    seed: u64,
) -> LabelId {
    let alphabet = ds.question(q).alphabet.len();
    let mut tally = vec![0.0f64; alphabet];
    for (pos, &p) in set.iter().enumerate() {
        tally[ds.label(p, q) as usize] += weights[pos];
    }
    let best = tally.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<LabelId> = tally
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .map(|(l, _)| l as LabelId)
        .collect();
    if tied.len() == 1 {
        tied[0]
    } else {
        let mut rng = StreamKey::new(seed)
            .tag(DOM_VOTE)
            .tag_str(&ds.question(q).id)
            .tag_str(&canonical_set_key(set))
            .rng();
        tied[rng.random_range(0..tied.len())]
    }
}

/// Majority vote over the set's labels on one question. The weighted
/// variant uses log-odds weights from train accuracies. Ties break
/// uniformly at random from the seeded stream.
pub fn majority_vote(
    ds: &ResponseDataset,
    set: &[usize],
    q: usize,
    variant: VoteVariant,
    train: Option<&[usize]>,
    seed: u64,
) -> Result<LabelId, BaselineError> {
    if set.is_empty() {
        return Err(OracleError::EmptySet.into());
    }
    let weights = vote_weights(ds, set, variant, train)?;
    Ok(tally_vote(ds, set, q, &weights, seed))
}

/// Voting pool shapes for the aggregation comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolVariant {
    All,
    BestPromptPerModel,
    BestModelPerPrompt,
}

/// Accuracy of (weighted) majority voting with the chosen pool over a
/// question set.
pub fn majority_variants(
    ds: &ResponseDataset,
    qs: &[usize],
    pool: PoolVariant,
    weighted: bool,
    train: &[usize],
    seed: u64,
) -> Result<f64, BaselineError> {
    if qs.is_empty() {
        return Err(DatasetError::EmptyQuestionSet.into());
    }
    let set: Vec<usize> = match pool {
        PoolVariant::All => input_all(ds),
        PoolVariant::BestPromptPerModel => moa_per_model_top1(ds, train)?,
        PoolVariant::BestModelPerPrompt => {
            let np = ds.n_prompts();
            (0..np)
                .map(|p| {
                    (0..ds.n_models())
                        .map(|m| m * np + p)
                        .max_by(|&a, &b| {
                            ds.accuracy_flat(a, train)
                                .unwrap()
                                .partial_cmp(&ds.accuracy_flat(b, train).unwrap())
                                .unwrap()
                                .then(b.cmp(&a))
                        })
                        .unwrap()
                })
                .collect()
        }
    };
    let variant = if weighted { VoteVariant::Weighted } else { VoteVariant::Plain };
    let weights = vote_weights(ds, &set, variant, Some(train))?;
    let mut hits = 0usize;
    for &q in qs {
        let label = tally_vote(ds, &set, q, &weights, seed);
        hits += usize::from(label == ds.truth(q));
    }
    Ok(hits as f64 / qs.len() as f64)
}

/// Fit the truth predictor on all N proposers over the train split and
/// report its accuracy on the test split.
pub fn decision_tree_baseline(ds: &ResponseDataset, split: &Split, depth: usize) -> f64 {
    let set = input_all(ds);
    let tree = TruthPredictor::fit(ds, &set, &split.train, depth);
    tree.accuracy(ds, &set, &split.test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::make_split;
    use crate::synthetic::{planted_pool, xor_pool, PlantedPoolSpec};

    fn pool(accs: Vec<f64>, n_models: usize, n_prompts: usize, nq: usize, seed: u64) -> ResponseDataset {
        planted_pool(
            &PlantedPoolSpec {
                n_models,
                n_prompts,
                n_questions: nq,
                alphabet_size: 2,
                accuracies: accs,
                blocks: vec![],
            },
            seed,
        )
        .unwrap()
    }

    #[test]
    fn input_all_is_full_and_idempotent() {
        let ds = pool(vec![0.5; 40], 8, 5, 10, 0);
        assert_eq!(input_all(&ds).len(), 40);
        assert_eq!(input_all(&ds), input_all(&ds));
        let single = pool(vec![0.5], 1, 1, 10, 0);
        assert_eq!(input_all(&single), vec![0]);
    }

    #[test]
    fn best_model_dominant_and_ties() {
        let ds = pool(vec![0.9, 0.9, 0.2, 0.2], 2, 2, 500, 1);
        let train: Vec<usize> = (0..500).collect();
        assert_eq!(best_model(&ds, &train, BestModelRule::default()).unwrap(), vec![0, 1]);
        // exact tie: identical labels force equal accuracies
        let tied = planted_pool(
            &PlantedPoolSpec {
                n_models: 2,
                n_prompts: 1,
                n_questions: 100,
                alphabet_size: 2,
                accuracies: vec![0.7, 0.7],
                blocks: vec![crate::synthetic::CorrelatedBlock {
                    members: vec![0, 1],
                    correlation: 1.0,
                }],
            },
            2,
        )
        .unwrap();
        assert_eq!(
            best_model(&tied, &train[..100], BestModelRule::default()).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn top_accuracy_rules() {
        let ds = pool(vec![0.2, 0.9, 0.5, 0.7], 4, 1, 800, 3);
        let train: Vec<usize> = (0..800).collect();
        assert_eq!(top_accuracy(&ds, &train, 1).unwrap(), vec![1]);
        assert_eq!(top_accuracy(&ds, &train, 2).unwrap(), vec![1, 3]);
        assert_eq!(top_accuracy(&ds, &train, 4).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn top_accuracy_all_equal_takes_first_k() {
        // identical proposers, identical accuracies
        let spec = PlantedPoolSpec {
            n_models: 4,
            n_prompts: 1,
            n_questions: 50,
            alphabet_size: 2,
            accuracies: vec![0.6; 4],
            blocks: vec![crate::synthetic::CorrelatedBlock {
                members: vec![0, 1, 2, 3],
                correlation: 1.0,
            }],
        };
        let ds = planted_pool(&spec, 4).unwrap();
        let train: Vec<usize> = (0..50).collect();
        assert_eq!(top_accuracy(&ds, &train, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn moa_picks_one_per_model() {
        let ds = pool(vec![0.3, 0.8, 0.9, 0.1, 0.5, 0.5], 3, 2, 600, 5);
        let train: Vec<usize> = (0..600).collect();
        let sel = moa_per_model_top1(&ds, &train).unwrap();
        assert_eq!(sel.len(), 3);
        assert_eq!(sel[0], 1);
        assert_eq!(sel[1], 2);
        assert_eq!(sel[2], 4); // tie within model 2 resolves to prompt 0
    }

    #[test]
    fn conditioned_diversity_prefers_disagreement() {
        // proposers 0 and 1 identical; proposer 2 disagrees and is eligible
        let spec = PlantedPoolSpec {
            n_models: 3,
            n_prompts: 1,
            n_questions: 400,
            alphabet_size: 2,
            accuracies: vec![0.8, 0.8, 0.6],
            blocks: vec![crate::synthetic::CorrelatedBlock {
                members: vec![0, 1],
                correlation: 1.0,
            }],
        };
        let ds = planted_pool(&spec, 6).unwrap();
        let train: Vec<usize> = (0..400).collect();
        let sel = conditioned_diversity(&ds, &train, 2, 0.4).unwrap();
        assert_eq!(sel, vec![0, 2]);
    }

    #[test]
    fn conditioned_diversity_threshold_exhaustion() {
        let ds = pool(vec![0.9, 0.1, 0.15], 3, 1, 400, 7);
        let train: Vec<usize> = (0..400).collect();
        assert!(matches!(
            conditioned_diversity(&ds, &train, 2, 0.4),
            Err(BaselineError::NoEligibleProposer { .. })
        ));
        // the seed itself is exempt from the threshold
        let sel = conditioned_diversity(&ds, &train, 1, 0.99).unwrap();
        assert_eq!(sel, vec![0]);
    }

    #[test]
    fn judge_topk_requires_scores() {
        let ds = pool(vec![0.5, 0.5], 2, 1, 20, 8);
        let train: Vec<usize> = (0..20).collect();
        assert!(matches!(
            judge_topk(&ds, &train, 1),
            Err(BaselineError::MissingJudgeScores)
        ));
    }

    #[test]
    fn judge_topk_by_grade() {
        use crate::dataset::Question;
        let nq = 10;
        let questions = (0..nq)
            .map(|q| Question {
                id: format!("q{q}"),
                alphabet: vec!["A".into(), "B".into()],
            })
            .collect();
        let mut judge = vec![1.0; 3 * nq];
        for q in 0..nq {
            judge[nq + q] = 5.0; // proposer 1 graded highest
        }
        let ds = ResponseDataset::from_parts(
            questions,
            3,
            1,
            vec![0; 3 * nq],
            vec![0; nq],
            Some(judge),
            None,
            None,
        )
        .unwrap();
        let train: Vec<usize> = (0..nq).collect();
        assert_eq!(judge_topk(&ds, &train, 1).unwrap(), vec![1]);
        assert_eq!(judge_topk(&ds, &train, 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn shapley_ledger_exact_and_constant_oracle_ties() {
        let ds = pool(vec![0.6; 4], 4, 1, 100, 9);
        let train: Vec<usize> = (0..100).collect();
        let oracle = SummarizerOracle::count_curve(vec![1.0, 1.0, 1.0, 1.0, 1.0], 0);
        let policy = PresentationPolicy::default();
        let (sel, est) =
            approx_shapley(&oracle, &ds, &train, 2, 6, 5, 1..=3, &policy, 0).unwrap();
        assert_eq!(oracle.query_count(), 2 * 4 * 6 * 5);
        assert!(est.values.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(sel, vec![0, 1]); // all-zero estimates fall to index ties
    }

    #[test]
    fn shapley_estimates_match_hand_enumeration() {
        use crate::dataset::Question;
        // proposer 0 always correct; proposers 1..3 wrong exactly on a
        // planted 30% of questions. Under a majority oracle with k = 2
        // (coalition size 1), proposer 0's marginal on a hard question
        // is the tie coin's expectation 1/2, so its exact estimate is
        // 0.3 * 0.5 = 0.15; the others average (1/3) * (-0.15) = -0.05.
        let nq = 1_000;
        let hard = 300;
        let questions: Vec<Question> = (0..nq)
            .map(|q| Question {
                id: format!("q{q}"),
                alphabet: vec!["A".into(), "B".into()],
            })
            .collect();
        let mut labels = vec![0 as crate::dataset::LabelId; 4 * nq];
        for p in 1..4 {
            for q in 0..hard {
                labels[p * nq + q] = 1;
            }
        }
        let ds = ResponseDataset::from_parts(
            questions,
            4,
            1,
            labels,
            vec![0; nq],
            None,
            None,
            None,
        )
        .unwrap();
        let train: Vec<usize> = (0..nq).collect();

        // second enumeration: exact expectation over coalitions and the
        // full question set
        let hard_rate = hard as f64 / nq as f64;
        let mut exact = [0.0f64; 4];
        for i in 0..4usize {
            let coalitions: Vec<usize> = (0..4).filter(|&j| j != i).collect();
            let mut total = 0.0;
            for &j in &coalitions {
                let per_question_gain = if i == 0 {
                    // adding the perfect voter to a faulty one: tie on
                    // hard questions, no change elsewhere
                    hard_rate * 0.5
                } else if j == 0 {
                    // adding a faulty voter to the perfect one
                    -(hard_rate * 0.5)
                } else {
                    0.0
                };
                total += per_question_gain;
            }
            exact[i] = total / coalitions.len() as f64;
        }
        for (e, want) in exact.iter().zip([0.15, -0.05, -0.05, -0.05]) {
            assert!((e - want).abs() < 1e-12);
        }

        let oracle = SummarizerOracle::majority(3);
        let policy = PresentationPolicy::default();
        let (selected, est) =
            approx_shapley(&oracle, &ds, &train, 2, 30, 50, 1..=1, &policy, 3).unwrap();
        for i in 0..4 {
            assert!(
                (est.values[i] - exact[i]).abs() < 0.03,
                "proposer {i}: {} vs {}",
                est.values[i],
                exact[i]
            );
        }
        let argmax = (0..4)
            .max_by(|&a, &b| est.values[a].partial_cmp(&est.values[b]).unwrap())
            .unwrap();
        assert_eq!(argmax, 0);
        assert!(selected.contains(&0));
        assert_eq!(oracle.query_count(), 2 * 4 * 30 * 50);
    }

    #[test]
    fn plain_majority_and_log_odds_dominance() {
        // three binary voters with accuracies 0.9, 0.6, 0.6: the log-odds
        // weight of the strong voter exceeds the other two combined, so
        // weighted majority follows voter 0 on every question
        let ds = pool(vec![0.9, 0.6, 0.6], 3, 1, 4_000, 10);
        let train: Vec<usize> = (0..4_000).collect();
        for q in [0usize, 7, 99, 1234] {
            let w = majority_vote(&ds, &[0, 1, 2], q, VoteVariant::Weighted, Some(&train), 0)
                .unwrap();
            assert_eq!(w, ds.label(0, q));
        }
        let p = majority_vote(&ds, &[0, 1, 2], 0, VoteVariant::Plain, None, 0).unwrap();
        // plain majority of {A,A,B}-style votes
        let mut counts = [0u32; 2];
        for p_ in 0..3 {
            counts[ds.label(p_, 0) as usize] += 1;
        }
        assert_eq!(p, if counts[0] >= 2 { 0 } else { 1 });
    }

    #[test]
    fn equal_weights_match_plain_argmax() {
        // perfectly correlated accuracies: all weights equal, so the
        // weighted argmax must equal the plain argmax on every question
        let spec = PlantedPoolSpec {
            n_models: 3,
            n_prompts: 1,
            n_questions: 500,
            alphabet_size: 3,
            accuracies: vec![0.5; 3],
            blocks: vec![crate::synthetic::CorrelatedBlock {
                members: vec![0, 1, 2],
                correlation: 1.0,
            }],
        };
        let ds = planted_pool(&spec, 12).unwrap();
        let train: Vec<usize> = (0..500).collect();
        for q in 0..500 {
            let a = majority_vote(&ds, &[0, 1, 2], q, VoteVariant::Plain, None, 3).unwrap();
            let b = majority_vote(&ds, &[0, 1, 2], q, VoteVariant::Weighted, Some(&train), 3)
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn majority_variant_pools() {
        let ds = pool(vec![0.9, 0.2, 0.2, 0.9], 2, 2, 600, 13);
        let qs: Vec<usize> = (0..600).collect();
        let train: Vec<usize> = (0..300).collect();
        let all = majority_variants(&ds, &qs, PoolVariant::All, false, &train, 0).unwrap();
        let bppm =
            majority_variants(&ds, &qs, PoolVariant::BestPromptPerModel, false, &train, 0)
                .unwrap();
        let bmpp =
            majority_variants(&ds, &qs, PoolVariant::BestModelPerPrompt, false, &train, 0)
                .unwrap();
        assert!(all > 0.0 && bppm > 0.0 && bmpp > 0.0);
        // best prompt per model picks the 0.9 proposers {0, 3}
        assert!(bppm > all - 0.05);
    }

    #[test]
    fn single_proposer_variants_equal_its_accuracy() {
        let ds = pool(vec![0.7], 1, 1, 2_000, 14);
        let qs: Vec<usize> = (0..2_000).collect();
        let train: Vec<usize> = (0..1_000).collect();
        let acc = ds.accuracy_flat(0, &qs).unwrap();
        for pool_variant in [
            PoolVariant::All,
            PoolVariant::BestPromptPerModel,
            PoolVariant::BestModelPerPrompt,
        ] {
            let v = majority_variants(&ds, &qs, pool_variant, false, &train, 0).unwrap();
            assert_eq!(v, acc);
        }
    }

    #[test]
    fn decision_tree_baseline_perfect_feature_and_xor() {
        let spec = PlantedPoolSpec {
            n_models: 2,
            n_prompts: 1,
            n_questions: 1_000,
            alphabet_size: 2,
            accuracies: vec![1.0, 0.3],
            blocks: vec![],
        };
        let ds = planted_pool(&spec, 15).unwrap();
        let split = make_split(&ds, 0.5, 0.75, 0).unwrap();
        assert_eq!(decision_tree_baseline(&ds, &split, 3), 1.0);

        let xor = xor_pool(1_200, &[], 16);
        let split = make_split(&xor, 0.5, 0.75, 1).unwrap();
        assert_eq!(decision_tree_baseline(&xor, &split, 2), 1.0);
    }
}
