//! Synthetic label pools: the keyed-XOR counterexample joint with exact
//! analytics, and planted pools with controlled accuracy / correlation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetError, LabelId, Question, ResponseDataset};
use crate::stream::{StreamKey, DOM_SAMPLE};

#[derive(Debug, thiserror::Error)]
pub enum SyntheticError {
    #[error("proposer pair must be distinct, got ({0}, {1})")]
    DuplicateProposer(usize, usize),
    #[error("proposer index {0} outside 1..=4")]
    ProposerOutOfRange(usize),
    #[error("requested correlation structure is not realizable: {0}")]
    InfeasibleCorrelation(String),
    #[error("{0}")]
    BadSpec(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Exact joint over (X1, X2, X3, X4, Z_f, Y) ∈ {0,1}⁶.
///
/// X1 and Z_f are independent fair coins; X2 agrees with X1 with
/// probability `rho`; Y = Z_f ⊕ X1 ⊕ X2; X3 and X4 agree with Y with
/// probabilities `p3`, `p4` and are conditionally independent given Y.
/// Proposers 1 and 2 are individually uninformative about Y (accuracy
/// 1/2, zero mutual information) yet decode Y perfectly together with
/// the private key Z_f.
///
/// The reference summarizer consults Z_f only when proposer 1 or 2 is
/// selected: used alone the key is treated as noise, matching the
/// aggregation rule the accuracy figures here are derived from.
#[derive(Debug, Clone)]
pub struct XorPairJoint {
    rho: f64,
    p3: f64,
    p4: f64,
    joint: Vec<f64>,
}

/// Bit layout of an outcome index: x1 | x2<<1 | x3<<2 | x4<<3 | zf<<4 | y<<5.
fn outcome(x1: u8, x2: u8, x3: u8, x4: u8, zf: u8, y: u8) -> usize {
    (x1 | x2 << 1 | x3 << 2 | x4 << 3 | zf << 4 | y << 5) as usize
}

fn bit(idx: usize, pos: u8) -> u8 {
    ((idx >> pos) & 1) as u8
}

impl Default for XorPairJoint {
    fn default() -> Self {
        XorPairJoint::new(0.9, 0.8, 0.8)
    }
}

impl XorPairJoint {
    pub fn new(rho: f64, p3: f64, p4: f64) -> Self {
        assert!((0.0..=1.0).contains(&rho), "rho must be a probability");
        assert!((0.0..=1.0).contains(&p3) && (0.0..=1.0).contains(&p4));
        let mut joint = vec![0.0f64; 64];
        for x1 in 0..2u8 {
            for zf in 0..2u8 {
                for agree12 in 0..2u8 {
                    let x2 = if agree12 == 1 { x1 } else { 1 - x1 };
                    let y = zf ^ x1 ^ x2;
                    let p12 = 0.25 * if agree12 == 1 { rho } else { 1.0 - rho };
                    for x3 in 0..2u8 {
                        let q3 = if x3 == y { p3 } else { 1.0 - p3 };
                        for x4 in 0..2u8 {
                            let q4 = if x4 == y { p4 } else { 1.0 - p4 };
                            joint[outcome(x1, x2, x3, x4, zf, y)] += p12 * q3 * q4;
                        }
                    }
                }
            }
        }
        XorPairJoint { rho, p3, p4, joint }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn p3(&self) -> f64 {
        self.p3
    }

    pub fn p4(&self) -> f64 {
        self.p4
    }

    /// Probability mass of one outcome.
    pub fn mass(&self, x: [u8; 4], zf: u8, y: u8) -> f64 {
        self.joint[outcome(x[0], x[1], x[2], x[3], zf, y)]
    }

    fn check_set(set: &[usize]) -> Result<Vec<usize>, SyntheticError> {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        for &i in &s {
            if !(1..=4).contains(&i) {
                return Err(SyntheticError::ProposerOutOfRange(i));
            }
        }
        Ok(s)
    }

    /// Whether the summarizer consults its private key for this set.
    fn uses_key(set: &[usize]) -> bool {
        set.contains(&1) || set.contains(&2)
    }

    /// Exact summarizer accuracy for a selected set, from the 64-point
    /// joint: posterior argmax per observation with half credit on ties.
    pub fn exact_accuracy(&self, set: &[usize]) -> Result<f64, SyntheticError> {
        let set = Self::check_set(set)?;
        let use_key = Self::uses_key(&set);
        // Group mass by (observed labels, key if consulted) x truth.
        let mut grouped = std::collections::HashMap::<u64, [f64; 2]>::new();
        for (idx, &m) in self.joint.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let mut obs: u64 = 0;
            for (pos, &i) in set.iter().enumerate() {
                obs |= u64::from(bit(idx, (i - 1) as u8)) << pos;
            }
            if use_key {
                obs |= u64::from(bit(idx, 4)) << set.len();
            }
            grouped.entry(obs).or_default()[bit(idx, 5) as usize] += m;
        }
        // max(m0, m1) covers the tie case as well: both choices score the
        // tied mass, exactly the half-credit value.
        Ok(grouped.values().map(|m| m[0].max(m[1])).sum())
    }

    /// Exact mutual information I(Y; X_S) in bits.
    pub fn mutual_information(&self, set: &[usize]) -> Result<f64, SyntheticError> {
        let set = Self::check_set(set)?;
        let mut grouped = std::collections::HashMap::<u64, [f64; 2]>::new();
        for (idx, &m) in self.joint.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let mut obs: u64 = 0;
            for (pos, &i) in set.iter().enumerate() {
                obs |= u64::from(bit(idx, (i - 1) as u8)) << pos;
            }
            grouped.entry(obs).or_default()[bit(idx, 5) as usize] += m;
        }
        let py: [f64; 2] = grouped.values().fold([0.0; 2], |acc, m| {
            [acc[0] + m[0], acc[1] + m[1]]
        });
        let mut mi = 0.0;
        for m in grouped.values() {
            let pobs = m[0] + m[1];
            for y in 0..2 {
                if m[y] > 0.0 {
                    mi += m[y] * (m[y] / (pobs * py[y])).log2();
                }
            }
        }
        // non-negative by definition; rounding can leave -1e-17
        Ok(mi.max(0.0))
    }

    /// Exact disagreement probability Pr[X_i ≠ X_j].
    pub fn disagreement(&self, i: usize, j: usize) -> Result<f64, SyntheticError> {
        if i == j {
            return Err(SyntheticError::DuplicateProposer(i, j));
        }
        for &v in &[i, j] {
            if !(1..=4).contains(&v) {
                return Err(SyntheticError::ProposerOutOfRange(v));
            }
        }
        Ok(self
            .joint
            .iter()
            .enumerate()
            .filter(|(idx, _)| bit(*idx, (i - 1) as u8) != bit(*idx, (j - 1) as u8))
            .map(|(_, &m)| m)
            .sum())
    }

    /// Exact marginal accuracy Pr[X_i = Y].
    pub fn marginal_accuracy(&self, i: usize) -> Result<f64, SyntheticError> {
        if !(1..=4).contains(&i) {
            return Err(SyntheticError::ProposerOutOfRange(i));
        }
        Ok(self
            .joint
            .iter()
            .enumerate()
            .filter(|(idx, _)| bit(*idx, (i - 1) as u8) == bit(*idx, 5))
            .map(|(_, &m)| m)
            .sum())
    }

    fn argmax_pair(&self, score: impl Fn(usize, usize) -> f64) -> [usize; 2] {
        let mut best = [1, 2];
        let mut best_score = f64::NEG_INFINITY;
        for i in 1..=4usize {
            for j in (i + 1)..=4 {
                let s = score(i, j);
                if s > best_score {
                    best_score = s;
                    best = [i, j];
                }
            }
        }
        best
    }

    /// Pair chosen by summed individual accuracy (lexicographic ties).
    pub fn accuracy_first_pair(&self) -> [usize; 2] {
        self.argmax_pair(|i, j| {
            self.marginal_accuracy(i).unwrap() + self.marginal_accuracy(j).unwrap()
        })
    }

    /// Pair chosen by joint mutual information with the truth.
    pub fn mutual_information_pair(&self) -> [usize; 2] {
        self.argmax_pair(|i, j| self.mutual_information(&[i, j]).unwrap())
    }

    /// Pair chosen by maximum pairwise disagreement.
    pub fn max_disagreement_pair(&self) -> [usize; 2] {
        self.argmax_pair(|i, j| self.disagreement(i, j).unwrap())
    }

    /// Posterior argmax label for observed proposer labels plus the key.
    /// The key is consulted only when proposer 1 or 2 is present; exact
    /// posterior ties return None (callers flip a seeded coin).
    pub fn bayes_label(&self, set: &[usize], observed: &[LabelId], zf: u8) -> Option<u8> {
        debug_assert_eq!(set.len(), observed.len());
        let use_key = Self::uses_key(set);
        let mut mass = [0.0f64; 2];
        for (idx, &m) in self.joint.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let mut ok = true;
            for (pos, &i) in set.iter().enumerate() {
                if bit(idx, (i - 1) as u8) != observed[pos] as u8 {
                    ok = false;
                    break;
                }
            }
            if ok && use_key && bit(idx, 4) != zf {
                ok = false;
            }
            if ok {
                mass[bit(idx, 5) as usize] += m;
            }
        }
        if mass[0] > mass[1] {
            Some(0)
        } else if mass[1] > mass[0] {
            Some(1)
        } else {
            None
        }
    }

    /// Draw i.i.d. questions from the joint. Proposers 1–4 become four
    /// single-prompt models; Z_f goes to the dataset's key-signal side
    /// channel, never to a proposer slot.
    pub fn sample_dataset(&self, n_questions: usize, seed: u64) -> ResponseDataset {
        assert!(n_questions >= 1);
        let alphabet = vec!["0".to_string(), "1".to_string()];
        let mut rng = StreamKey::new(seed).tag(DOM_SAMPLE).rng();
        let mut labels = vec![0 as LabelId; 4 * n_questions];
        let mut truths = vec![0 as LabelId; n_questions];
        let mut key = vec![0 as LabelId; n_questions];
        let mut questions = Vec::with_capacity(n_questions);
        for q in 0..n_questions {
            let x1 = u8::from(rng.random::<f64>() < 0.5);
            let zf = u8::from(rng.random::<f64>() < 0.5);
            let x2 = if rng.random::<f64>() < self.rho { x1 } else { 1 - x1 };
            let y = zf ^ x1 ^ x2;
            let x3 = if rng.random::<f64>() < self.p3 { y } else { 1 - y };
            let x4 = if rng.random::<f64>() < self.p4 { y } else { 1 - y };
            for (p, x) in [x1, x2, x3, x4].into_iter().enumerate() {
                labels[p * n_questions + q] = LabelId::from(x);
            }
            truths[q] = LabelId::from(y);
            key[q] = LabelId::from(zf);
            questions.push(Question {
                id: format!("q{q:06}"),
                alphabet: alphabet.clone(),
            });
        }
        ResponseDataset::from_parts(
            questions,
            4,
            1,
            labels,
            truths,
            None,
            Some(key),
            None,
        )
        .expect("sampled joint dataset is valid by construction")
    }
}

/// A group of proposers sharing a common draw with some probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelatedBlock {
    /// Flat proposer indices in the block.
    pub members: Vec<usize>,
    /// Probability that a member copies the block's shared draw instead
    /// of drawing independently. 1.0 makes the block's labels identical.
    pub correlation: f64,
}

/// Generator config for planted pools with known statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantedPoolSpec {
    pub n_models: usize,
    pub n_prompts: usize,
    pub n_questions: usize,
    pub alphabet_size: usize,
    /// Per-proposer accuracy, length n_models · n_prompts.
    pub accuracies: Vec<f64>,
    #[serde(default)]
    pub blocks: Vec<CorrelatedBlock>,
}

impl PlantedPoolSpec {
    pub fn independent(n_models: usize, n_prompts: usize, n_questions: usize, acc: f64) -> Self {
        PlantedPoolSpec {
            n_models,
            n_prompts,
            n_questions,
            alphabet_size: 2,
            accuracies: vec![acc; n_models * n_prompts],
            blocks: Vec::new(),
        }
    }
}

fn letter_alphabet(size: usize) -> Vec<String> {
    (0..size)
        .map(|i| {
            if i < 26 {
                char::from(b'A' + i as u8).to_string()
            } else {
                format!("L{i}")
            }
        })
        .collect()
}

/// Sample a pool whose empirical per-proposer accuracies converge to the
/// spec values, with optional correlated blocks.
pub fn planted_pool(spec: &PlantedPoolSpec, seed: u64) -> Result<ResponseDataset, SyntheticError> {
    let n = spec.n_models * spec.n_prompts;
    if n == 0 || spec.n_questions == 0 {
        return Err(SyntheticError::BadSpec("empty pool".into()));
    }
    if spec.alphabet_size < 2 {
        return Err(SyntheticError::BadSpec(
            "alphabet must have at least two labels".into(),
        ));
    }
    if spec.accuracies.len() != n {
        return Err(SyntheticError::BadSpec(format!(
            "expected {n} accuracies, got {}",
            spec.accuracies.len()
        )));
    }
    for &a in &spec.accuracies {
        if !(0.0..=1.0).contains(&a) {
            return Err(SyntheticError::BadSpec(format!("accuracy {a} outside [0, 1]")));
        }
    }
    let mut owner = vec![usize::MAX; n];
    for (bi, block) in spec.blocks.iter().enumerate() {
        if !(0.0..=1.0).contains(&block.correlation) {
            return Err(SyntheticError::InfeasibleCorrelation(format!(
                "correlation {} outside [0, 1]",
                block.correlation
            )));
        }
        for &m in &block.members {
            if m >= n {
                return Err(SyntheticError::BadSpec(format!("block member {m} out of range")));
            }
            if owner[m] != usize::MAX {
                return Err(SyntheticError::InfeasibleCorrelation(format!(
                    "proposer {m} appears in more than one block"
                )));
            }
            owner[m] = bi;
        }
        // A shared draw forces equal hit rates; members with unequal
        // target accuracies cannot all converge to them.
        if block.correlation > 0.0 {
            let first = block.members.first().map(|&m| spec.accuracies[m]);
            if let Some(a0) = first {
                if block.members.iter().any(|&m| spec.accuracies[m] != a0) {
                    return Err(SyntheticError::InfeasibleCorrelation(
                        "correlated block members must share one accuracy".into(),
                    ));
                }
            }
        }
    }

    let alphabet = letter_alphabet(spec.alphabet_size);
    let nq = spec.n_questions;
    let mut rng = StreamKey::new(seed).tag(DOM_SAMPLE).tag(1).rng();
    let mut labels = vec![0 as LabelId; n * nq];
    let mut truths = vec![0 as LabelId; nq];
    let mut questions = Vec::with_capacity(nq);

    let a = spec.alphabet_size as u32;
    for q in 0..nq {
        let truth = rng.random_range(0..a) as LabelId;
        truths[q] = truth;
        let draw = |acc: f64, rng: &mut rand_chacha::ChaCha8Rng| -> LabelId {
            if rng.random::<f64>() < acc {
                truth
            } else {
                // uniform over wrong labels
                let mut w = rng.random_range(0..a - 1) as LabelId;
                if w >= truth {
                    w += 1;
                }
                w
            }
        };
        let block_draws: Vec<LabelId> = spec
            .blocks
            .iter()
            .map(|b| {
                let acc = b.members.first().map(|&m| spec.accuracies[m]).unwrap_or(0.0);
                draw(acc, &mut rng)
            })
            .collect();
        for p in 0..n {
            let label = if owner[p] != usize::MAX
                && rng.random::<f64>() < spec.blocks[owner[p]].correlation
            {
                block_draws[owner[p]]
            } else {
                draw(spec.accuracies[p], &mut rng)
            };
            labels[p * nq + q] = label;
        }
        questions.push(Question {
            id: format!("q{q:06}"),
            alphabet: alphabet.clone(),
        });
    }

    Ok(ResponseDataset::from_parts(
        questions,
        spec.n_models,
        spec.n_prompts,
        labels,
        truths,
        None,
        None,
        None,
    )?)
}

/// Binary pool where proposers 0 and 1 jointly determine the truth
/// (truth = X0 ⊕ X1) while each is individually uninformative, plus
/// independent extra proposers at the given accuracies. One prompt per
/// model.
pub fn xor_pool(n_questions: usize, extras: &[f64], seed: u64) -> ResponseDataset {
    let n = 2 + extras.len();
    let alphabet = vec!["0".to_string(), "1".to_string()];
    let mut rng = StreamKey::new(seed).tag(DOM_SAMPLE).tag(2).rng();
    let mut labels = vec![0 as LabelId; n * n_questions];
    let mut truths = vec![0 as LabelId; n_questions];
    let mut questions = Vec::with_capacity(n_questions);
    for q in 0..n_questions {
        let truth = u8::from(rng.random::<f64>() < 0.5);
        let x0 = u8::from(rng.random::<f64>() < 0.5);
        let x1 = truth ^ x0;
        truths[q] = LabelId::from(truth);
        labels[q] = LabelId::from(x0);
        labels[n_questions + q] = LabelId::from(x1);
        for (e, &acc) in extras.iter().enumerate() {
            let x = if rng.random::<f64>() < acc { truth } else { 1 - truth };
            labels[(2 + e) * n_questions + q] = LabelId::from(x);
        }
        questions.push(Question {
            id: format!("q{q:06}"),
            alphabet: alphabet.clone(),
        });
    }
    ResponseDataset::from_parts(questions, n, 1, labels, truths, None, None, None)
        .expect("xor pool is valid by construction")
}
