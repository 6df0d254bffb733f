//! The summarizer oracle: a queryable mapping from (question, selected
//! responses) to a predicted label, with an exact query ledger.
//!
//! Simulated behaviors (majority votes, count-curve draws, the keyed
//! Bayes rule) let the full selection pipeline run without any live
//! model. The replay behavior serves recorded outputs, and the remote
//! behavior forwards responses to an HTTP endpoint using the configured
//! presentation policy.
//!
//! Every stochastic behavior draws from a stream derived from
//! (seed, question id, canonical set key, repeat index), so concurrent
//! callers see the same outputs as a serial run.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{LabelId, ResponseDataset};
use crate::stream::{StreamKey, DOM_ORACLE, DOM_ORDER};
use crate::synthetic::XorPairJoint;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("proposer set is empty")]
    EmptySet,
    #[error("proposer index {index} out of range (N = {n})")]
    InvalidProposer { index: usize, n: usize },
    #[error("question index {index} out of range ({n} questions)")]
    InvalidQuestion { index: usize, n: usize },
    #[error("no recorded output for question {question_id:?} and set {set_key:?}")]
    ReplayMiss { question_id: String, set_key: String },
    #[error("recorded label {label:?} outside the alphabet of question {question_id:?}")]
    BadRecordedLabel { question_id: String, label: String },
    #[error("dataset has no key-signal side channel")]
    MissingKeySignal,
    #[error("keyed Bayes summarizer needs a 4-proposer binary pool, got N = {0}")]
    UnsupportedPool(usize),
    #[error("weighted majority needs a non-empty weight question set")]
    MissingWeightQuestions,
    #[error("remote summarizer failed after {attempts} attempts: {message}")]
    RemoteFailure { attempts: u32, message: String },
    #[error("environment variable {0} is not set")]
    MissingEnv(String),
}

/// How proposer responses are arranged and annotated for the summarizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResponseOrder {
    AscendingAccuracy,
    DescendingAccuracy,
    #[default]
    Randomized,
}

/// Presentation policy for behaviors that see full responses (remote,
/// replay). Simulated label-level behaviors ignore it by design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PresentationPolicy {
    pub ordering: ResponseOrder,
    pub disclose_accuracy: bool,
    /// Question set used to estimate per-proposer accuracies for
    /// accuracy-based ordering and disclosure. `None` means all
    /// questions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_questions: Option<Vec<usize>>,
}

/// Remote endpoint configuration. The URL and optional bearer token are
/// read from environment variables at call time so configs never embed
/// deployment values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    /// Env var holding the endpoint URL.
    pub url_env: String,
    /// Env var holding a bearer token, if the endpoint needs one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_env: Option<String>,
    /// Instruction text forwarded with every request.
    #[serde(default = "default_instructions")]
    pub instructions: String,
    /// Per-response character budget; longer rationales are truncated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_response_chars: Option<usize>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Base backoff in milliseconds, doubled per retry.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
}

fn default_instructions() -> String {
    "Analyze the candidate solutions and answer the question with a single label.".to_string()
}

fn default_retries() -> u32 {
    3
}

fn default_backoff_ms() -> u64 {
    250
}

#[derive(Debug, Serialize)]
struct RemoteResponseEntry<'a> {
    label: &'a str,
    rationale: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RemoteRequest<'a> {
    question: &'a str,
    choices: &'a [String],
    responses: Vec<RemoteResponseEntry<'a>>,
    instructions: &'a str,
}

#[derive(Debug, Deserialize)]
struct RemoteReply {
    label: String,
}

/// Summarizer behavior. `CountCurve` models accuracy as a function of
/// how many input labels are correct; `Replay` serves recorded outputs
/// keyed by (question id, canonical set key); `KeyedBayes` is the exact
/// posterior rule for the built-in XOR-key counterexample pool.
#[derive(Debug, Clone)]
pub enum Behavior {
    Majority,
    /// Log-odds weighted majority; weights come from accuracies on the
    /// given question set.
    WeightedMajority { weight_questions: Vec<usize> },
    /// `curve[c]` is the probability of answering correctly when exactly
    /// `c` selected proposers are correct. Counts past the end clamp to
    /// the last entry.
    CountCurve { curve: Vec<f64> },
    Replay {
        table: HashMap<(String, String), Vec<String>>,
    },
    KeyedBayes { joint: XorPairJoint },
    Remote { config: RemoteConfig },
}

/// A summarizer with its query ledger. The counter increases by exactly
/// one per dispatched summarize call; nothing else touches it.
pub struct SummarizerOracle {
    behavior: Behavior,
    seed: u64,
    queries: AtomicU64,
}

/// Canonical set key: sorted flat indices joined with commas. Set
/// identity never depends on presentation order.
pub fn canonical_set_key(set: &[usize]) -> String {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn canonical_set(set: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

impl SummarizerOracle {
    pub fn new(behavior: Behavior, seed: u64) -> Self {
        SummarizerOracle {
            behavior,
            seed,
            queries: AtomicU64::new(0),
        }
    }

    pub fn majority(seed: u64) -> Self {
        Self::new(Behavior::Majority, seed)
    }

    pub fn count_curve(curve: Vec<f64>, seed: u64) -> Self {
        assert!(!curve.is_empty() && curve.iter().all(|p| (0.0..=1.0).contains(p)));
        Self::new(Behavior::CountCurve { curve }, seed)
    }

    pub fn keyed_bayes(joint: XorPairJoint, seed: u64) -> Self {
        Self::new(Behavior::KeyedBayes { joint }, seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Total summarize calls dispatched so far.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    /// Summarize with repeat index 0.
    pub fn summarize(
        &self,
        ds: &ResponseDataset,
        set: &[usize],
        q: usize,
        policy: &PresentationPolicy,
    ) -> Result<LabelId, OracleError> {
        self.summarize_rep(ds, set, q, policy, 0)
    }

    /// Aggregate the selected responses for one question. `rep`
    /// separates the random streams of repeated calls on the same
    /// (question, set); fixed (seed, inputs, rep) always returns the
    /// same label. Increments the ledger by exactly one.
    pub fn summarize_rep(
        &self,
        ds: &ResponseDataset,
        set: &[usize],
        q: usize,
        policy: &PresentationPolicy,
        rep: u64,
    ) -> Result<LabelId, OracleError> {
        let set = canonical_set(set);
        if set.is_empty() {
            return Err(OracleError::EmptySet);
        }
        let n = ds.n_proposers();
        if let Some(&bad) = set.iter().find(|&&p| p >= n) {
            return Err(OracleError::InvalidProposer { index: bad, n });
        }
        if q >= ds.n_questions() {
            return Err(OracleError::InvalidQuestion {
                index: q,
                n: ds.n_questions(),
            });
        }
        self.queries.fetch_add(1, Ordering::SeqCst);

        let key = StreamKey::new(self.seed)
            .tag(DOM_ORACLE)
            .tag_str(&ds.question(q).id)
            .tag_str(&canonical_set_key(&set))
            .tag(rep);

        match &self.behavior {
            Behavior::Majority => Ok(majority_label(ds, &set, q, &[], key)),
            Behavior::WeightedMajority { weight_questions } => {
                if weight_questions.is_empty() {
                    return Err(OracleError::MissingWeightQuestions);
                }
                let weights = log_odds_weights(ds, &set, weight_questions);
                Ok(majority_label(ds, &set, q, &weights, key))
            }
            Behavior::CountCurve { curve } => {
                let c = ds.correct_count(&set, q).min(curve.len() - 1);
                let mut rng = key.rng();
                let alphabet = ds.question(q).alphabet.len() as u32;
                if rng.random::<f64>() < curve[c] || alphabet == 1 {
                    Ok(ds.truth(q))
                } else {
                    let truth = u32::from(ds.truth(q));
                    let mut wrong = rng.random_range(0..alphabet - 1);
                    if wrong >= truth {
                        wrong += 1;
                    }
                    Ok(wrong as LabelId)
                }
            }
            Behavior::Replay { table } => {
                let qid = ds.question(q).id.clone();
                let set_key = canonical_set_key(&set);
                let outputs = table.get(&(qid.clone(), set_key.clone())).ok_or(
                    OracleError::ReplayMiss {
                        question_id: qid.clone(),
                        set_key,
                    },
                )?;
                let label = &outputs[(rep as usize) % outputs.len()];
                ds.question(q)
                    .alphabet
                    .iter()
                    .position(|a| a == label)
                    .map(|i| i as LabelId)
                    .ok_or_else(|| OracleError::BadRecordedLabel {
                        question_id: qid,
                        label: label.clone(),
                    })
            }
            Behavior::KeyedBayes { joint } => {
                if ds.n_proposers() != 4 {
                    return Err(OracleError::UnsupportedPool(ds.n_proposers()));
                }
                let zf = ds.key_signal(q).ok_or(OracleError::MissingKeySignal)? as u8;
                let vars: Vec<usize> = set.iter().map(|&p| p + 1).collect();
                let observed: Vec<LabelId> = set.iter().map(|&p| ds.label(p, q)).collect();
                match joint.bayes_label(&vars, &observed, zf) {
                    Some(y) => Ok(LabelId::from(y)),
                    // exact posterior tie: fair coin from the call stream
                    None => Ok(LabelId::from(key.tag(1).rng().random::<bool>())),
                }
            }
            Behavior::Remote { config } => self.summarize_remote(ds, &set, q, policy, rep, config),
        }
    }

    fn summarize_remote(
        &self,
        ds: &ResponseDataset,
        set: &[usize],
        q: usize,
        policy: &PresentationPolicy,
        rep: u64,
        config: &RemoteConfig,
    ) -> Result<LabelId, OracleError> {
        let url = std::env::var(&config.url_env)
            .map_err(|_| OracleError::MissingEnv(config.url_env.clone()))?;
        let token = match &config.token_env {
            Some(var) => {
                Some(std::env::var(var).map_err(|_| OracleError::MissingEnv(var.clone()))?)
            }
            None => None,
        };

        let order = order_responses_rep(ds, set, q, policy, self.seed, rep);
        let accuracy_qs: Vec<usize> = policy
            .accuracy_questions
            .clone()
            .unwrap_or_else(|| (0..ds.n_questions()).collect());
        let question = ds.question(q);
        let truncated: Vec<String> = order
            .iter()
            .map(|&p| {
                let text = ds.rationale(p, q).unwrap_or("");
                match config.max_response_chars {
                    Some(limit) => text.chars().take(limit).collect(),
                    None => text.to_string(),
                }
            })
            .collect();
        let responses: Vec<RemoteResponseEntry> = order
            .iter()
            .zip(&truncated)
            .map(|(&p, rationale)| RemoteResponseEntry {
                label: ds.label_str(p, q),
                rationale,
                accuracy: policy
                    .disclose_accuracy
                    .then(|| ds.accuracy_flat(p, &accuracy_qs).unwrap_or(0.0)),
            })
            .collect();
        let body = RemoteRequest {
            question: &question.id,
            choices: &question.alphabet,
            responses,
            instructions: &config.instructions,
        };

        let mut last_err = String::new();
        for attempt in 0..config.max_retries {
            if attempt > 0 {
                std::thread::sleep(std::time::Duration::from_millis(
                    config.backoff_ms << (attempt - 1),
                ));
            }
            let mut req = ureq::post(&url);
            if let Some(tok) = &token {
                req = req.header("authorization", &format!("Bearer {tok}"));
            }
            match req.send_json(&body) {
                Ok(mut resp) => match resp.body_mut().read_json::<RemoteReply>() {
                    Ok(reply) => {
                        return question
                            .alphabet
                            .iter()
                            .position(|a| *a == reply.label)
                            .map(|i| i as LabelId)
                            .ok_or_else(|| OracleError::RemoteFailure {
                                attempts: attempt + 1,
                                message: format!("label {:?} outside alphabet", reply.label),
                            });
                    }
                    Err(e) => last_err = format!("malformed reply: {e}"),
                },
                Err(e) => last_err = e.to_string(),
            }
        }
        Err(OracleError::RemoteFailure {
            attempts: config.max_retries,
            message: last_err,
        })
    }

    /// Mean correctness of the summarizer over `qs` × `repeats` calls.
    /// Consumes exactly `qs.len() * repeats` queries.
    pub fn accuracy_of(
        &self,
        ds: &ResponseDataset,
        set: &[usize],
        qs: &[usize],
        policy: &PresentationPolicy,
        repeats: u32,
    ) -> Result<f64, OracleError> {
        assert!(repeats >= 1, "repeats must be at least 1");
        assert!(!qs.is_empty(), "question set must be non-empty");
        let mut hits = 0u64;
        for rep in 0..repeats {
            for &q in qs {
                let label = self.summarize_rep(ds, set, q, policy, u64::from(rep))?;
                hits += u64::from(label == ds.truth(q));
            }
        }
        Ok(hits as f64 / (qs.len() as u64 * u64::from(repeats)) as f64)
    }
}

fn log_odds_weights(ds: &ResponseDataset, set: &[usize], train: &[usize]) -> Vec<f64> {
    let eps = 1.0 / (2.0 * train.len() as f64);
    set.iter()
        .map(|&p| {
            let acc = ds.accuracy_flat(p, train).unwrap_or(0.0);
            let clamped = acc.clamp(eps, 1.0 - eps);
            (clamped / (1.0 - clamped)).ln()
        })
        .collect()
}

/// Majority (or weighted majority when `weights` is non-empty) over the
/// set's labels on question `q`. Ties break uniformly at random from the
/// call's derived stream.
fn majority_label(
    ds: &ResponseDataset,
    set: &[usize],
    q: usize,
    weights: &[f64],
    key: StreamKey,
) -> LabelId {
    let alphabet = ds.question(q).alphabet.len();
    let mut tally = vec![0.0f64; alphabet];
    for (pos, &p) in set.iter().enumerate() {
        let w = if weights.is_empty() { 1.0 } else { weights[pos] };
        tally[ds.label(p, q) as usize] += w;
    }
    let best = tally.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<LabelId> = tally
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .map(|(i, _)| i as LabelId)
        .collect();
    if tied.len() == 1 {
        tied[0]
    } else {
        let mut rng = key.tag(2).rng();
        tied[rng.random_range(0..tied.len())]
    }
}

/// Arrange the set for presentation under the policy. Accuracy-based
/// orderings are total orders with flat-index tie-break; randomized
/// ordering is deterministic in (seed, question, set).
pub fn order_responses(
    ds: &ResponseDataset,
    set: &[usize],
    q: usize,
    policy: &PresentationPolicy,
    seed: u64,
) -> Vec<usize> {
    order_responses_rep(ds, set, q, policy, seed, 0)
}

fn order_responses_rep(
    ds: &ResponseDataset,
    set: &[usize],
    q: usize,
    policy: &PresentationPolicy,
    seed: u64,
    rep: u64,
) -> Vec<usize> {
    let mut out = canonical_set(set);
    match policy.ordering {
        ResponseOrder::Randomized => {
            let mut rng = StreamKey::new(seed)
                .tag(DOM_ORDER)
                .tag_str(&ds.question(q).id)
                .tag_str(&canonical_set_key(&out))
                .tag(rep)
                .rng();
            out.shuffle(&mut rng);
        }
        ResponseOrder::AscendingAccuracy | ResponseOrder::DescendingAccuracy => {
            let qs: Vec<usize> = policy
                .accuracy_questions
                .clone()
                .unwrap_or_else(|| (0..ds.n_questions()).collect());
            let mut scored: Vec<(f64, usize)> = out
                .iter()
                .map(|&p| (ds.accuracy_flat(p, &qs).unwrap_or(0.0), p))
                .collect();
            if policy.ordering == ResponseOrder::AscendingAccuracy {
                scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            } else {
                scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            }
            out = scored.into_iter().map(|(_, p)| p).collect();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Question;

    fn tiny_dataset(labels: &[&[&str]], truths: &[&str], alphabet: &[&str]) -> ResponseDataset {
        let n = labels.len();
        let nq = truths.len();
        let alpha: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        let to_id = |s: &str| alpha.iter().position(|a| a == s).unwrap() as LabelId;
        let questions = (0..nq)
            .map(|q| Question {
                id: format!("q{q}"),
                alphabet: alpha.clone(),
            })
            .collect();
        let mut mat = vec![0 as LabelId; n * nq];
        for (p, row) in labels.iter().enumerate() {
            for (q, s) in row.iter().enumerate() {
                mat[p * nq + q] = to_id(s);
            }
        }
        let truth_ids = truths.iter().map(|s| to_id(s)).collect();
        ResponseDataset::from_parts(questions, n, 1, mat, truth_ids, None, None, None).unwrap()
    }

    #[test]
    fn strict_majority() {
        let ds = tiny_dataset(&[&["A"], &["A"], &["B"]], &["A"], &["A", "B"]);
        let oracle = SummarizerOracle::majority(1);
        let policy = PresentationPolicy::default();
        let label = oracle.summarize(&ds, &[0, 1, 2], 0, &policy).unwrap();
        assert_eq!(ds.question(0).alphabet[label as usize], "A");
        assert_eq!(oracle.query_count(), 1);
    }

    #[test]
    fn majority_permutation_invariant() {
        let ds = tiny_dataset(&[&["A"], &["B"], &["B"], &["C"]], &["B"], &["A", "B", "C"]);
        let oracle = SummarizerOracle::majority(5);
        let policy = PresentationPolicy::default();
        let a = oracle.summarize(&ds, &[0, 1, 2, 3], 0, &policy).unwrap();
        let b = oracle.summarize(&ds, &[3, 2, 1, 0], 0, &policy).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perfect_count_curve_always_truth() {
        let ds = tiny_dataset(&[&["B", "A"], &["B", "B"]], &["A", "B"], &["A", "B"]);
        let oracle = SummarizerOracle::count_curve(vec![1.0, 1.0, 1.0], 3);
        let policy = PresentationPolicy::default();
        for q in 0..2 {
            for rep in 0..5 {
                let label = oracle.summarize_rep(&ds, &[0, 1], q, &policy, rep).unwrap();
                assert_eq!(label, ds.truth(q));
            }
        }
    }

    #[test]
    fn ledger_counts_every_call() {
        let ds = tiny_dataset(&[&["A", "A", "A"]], &["A", "A", "B"], &["A", "B"]);
        let oracle = SummarizerOracle::majority(0);
        let policy = PresentationPolicy::default();
        let acc = oracle.accuracy_of(&ds, &[0], &[0, 1, 2], &policy, 10).unwrap();
        assert_eq!(oracle.query_count(), 30);
        assert!((acc - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_set_rejected_without_ledger_charge() {
        let ds = tiny_dataset(&[&["A"]], &["A"], &["A", "B"]);
        let oracle = SummarizerOracle::majority(0);
        let policy = PresentationPolicy::default();
        assert!(matches!(
            oracle.summarize(&ds, &[], 0, &policy),
            Err(OracleError::EmptySet)
        ));
        assert_eq!(oracle.query_count(), 0);
    }

    #[test]
    fn determinism_per_rep() {
        let ds = tiny_dataset(&[&["A"], &["B"]], &["A"], &["A", "B"]);
        let oracle = SummarizerOracle::majority(9);
        let policy = PresentationPolicy::default();
        let first = oracle.summarize_rep(&ds, &[0, 1], 0, &policy, 7).unwrap();
        for _ in 0..20 {
            assert_eq!(
                oracle.summarize_rep(&ds, &[0, 1], 0, &policy, 7).unwrap(),
                first
            );
        }
    }

    #[test]
    fn keyed_bayes_pair_is_exact() {
        let joint = XorPairJoint::default();
        let ds = joint.sample_dataset(2_000, 21);
        let oracle = SummarizerOracle::keyed_bayes(joint, 4);
        let policy = PresentationPolicy::default();
        let acc = oracle.accuracy_of(&ds, &[0, 1], &(0..2_000).collect::<Vec<_>>(), &policy, 1)
            .unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn keyed_bayes_strong_pair_hits_its_expectation() {
        // proposers 3 and 4 alone: agreement decides 0.64 of the mass,
        // ties split the remaining 0.32, for 0.8 in expectation
        let joint = XorPairJoint::default();
        let n = 100_000;
        let ds = joint.sample_dataset(n, 8);
        let oracle = SummarizerOracle::keyed_bayes(joint, 8);
        let policy = PresentationPolicy::default();
        let qs: Vec<usize> = (0..n).collect();
        let acc = oracle.accuracy_of(&ds, &[2, 3], &qs, &policy, 1).unwrap();
        assert!((acc - 0.8).abs() < 0.005, "accuracy {acc}");
    }

    #[test]
    fn ascending_order_and_ties() {
        // proposer 0: 30% accurate, proposer 1: 70%
        let ds = tiny_dataset(
            &[
                &["A", "B", "B", "B", "B", "B", "B", "A", "A", "B"],
                &["A", "A", "A", "A", "A", "A", "B", "B", "A", "B"],
            ],
            &["A", "A", "A", "A", "A", "A", "A", "A", "A", "A"],
            &["A", "B"],
        );
        let policy = PresentationPolicy {
            ordering: ResponseOrder::AscendingAccuracy,
            disclose_accuracy: false,
            accuracy_questions: None,
        };
        assert_eq!(order_responses(&ds, &[0, 1], 0, &policy, 0), vec![0, 1]);
        let desc = PresentationPolicy {
            ordering: ResponseOrder::DescendingAccuracy,
            ..policy.clone()
        };
        assert_eq!(order_responses(&ds, &[0, 1], 0, &desc, 0), vec![1, 0]);
    }

    #[test]
    fn equal_accuracy_tie_breaks_by_index() {
        let ds = tiny_dataset(&[&["A", "B"], &["B", "A"]], &["A", "A"], &["A", "B"]);
        let policy = PresentationPolicy {
            ordering: ResponseOrder::AscendingAccuracy,
            disclose_accuracy: false,
            accuracy_questions: None,
        };
        assert_eq!(order_responses(&ds, &[1, 0], 0, &policy, 0), vec![0, 1]);
    }

    #[test]
    fn randomized_order_seed_deterministic() {
        let ds = tiny_dataset(
            &[&["A"], &["A"], &["A"], &["A"], &["A"]],
            &["A"],
            &["A", "B"],
        );
        let policy = PresentationPolicy::default();
        let a = order_responses(&ds, &[0, 1, 2, 3, 4], 0, &policy, 11);
        let b = order_responses(&ds, &[0, 1, 2, 3, 4], 0, &policy, 11);
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn replay_hits_and_misses() {
        let ds = tiny_dataset(&[&["A"], &["B"]], &["A"], &["A", "B"]);
        let mut table = HashMap::new();
        table.insert(("q0".to_string(), "0,1".to_string()), vec!["B".to_string()]);
        let oracle = SummarizerOracle::new(Behavior::Replay { table }, 0);
        let policy = PresentationPolicy::default();
        let label = oracle.summarize(&ds, &[1, 0], 0, &policy).unwrap();
        assert_eq!(ds.question(0).alphabet[label as usize], "B");
        assert!(matches!(
            oracle.summarize(&ds, &[0], 0, &policy),
            Err(OracleError::ReplayMiss { .. })
        ));
    }
}
