//! Recorded proposer responses: loading, validation, splitting, indexing.
//!
//! The dataset is a complete proposer × question matrix of categorical
//! labels plus ground truth, the universe every selection algorithm
//! operates on. Proposers are (model, prompt) pairs addressed by a flat
//! index; labels are stored as indices into each question's answer
//! alphabet. Datasets are immutable after load and safe to share across
//! threads.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::stream::{StreamKey, DOM_SPLIT};

/// Index into a question's answer alphabet.
pub type LabelId = u16;

/// One proposer: a model paired with an instruction prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProposerId {
    pub model: usize,
    pub prompt: usize,
}

impl ProposerId {
    /// Flat index `model * n_prompts + prompt`; a bijection onto `[0, N)`.
    pub fn flat(&self, n_prompts: usize) -> usize {
        self.model * n_prompts + self.prompt
    }

    pub fn from_flat(flat: usize, n_prompts: usize) -> Self {
        ProposerId {
            model: flat / n_prompts,
            prompt: flat % n_prompts,
        }
    }
}

impl fmt::Display for ProposerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}p{}", self.model, self.prompt)
    }
}

/// A question: opaque id plus its declared answer alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub alphabet: Vec<String>,
}

/// File formats for record matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Jsonl,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing cell: question {question_id:?}, model {model}, prompt {prompt}")]
    MissingCell {
        question_id: String,
        model: usize,
        prompt: usize,
    },
    #[error("duplicate cell: question {question_id:?}, model {model}, prompt {prompt}")]
    DuplicateCell {
        question_id: String,
        model: usize,
        prompt: usize,
    },
    #[error("label {label:?} outside the answer alphabet of question {question_id:?}")]
    AlphabetViolation { question_id: String, label: String },
    #[error("conflicting truth values recorded for question {question_id:?}")]
    InconsistentTruth { question_id: String },
    #[error("judge score {score} for question {question_id:?} outside [1, 5]")]
    JudgeScoreOutOfRange { question_id: String, score: f64 },
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("split would leave the {part} partition empty")]
    EmptyPartition { part: &'static str },
    #[error("{name} must lie strictly between 0 and 1, got {value}")]
    InvalidFraction { name: &'static str, value: f64 },
    #[error("question set is empty")]
    EmptyQuestionSet,
    #[error("proposer index {index} out of range (N = {n})")]
    InvalidProposer { index: usize, n: usize },
    #[error("question index {index} out of range ({n} questions)")]
    InvalidQuestion { index: usize, n: usize },
}

/// Complete N × |Q| response matrix with ground truth.
///
/// `labels[flat * n_questions + q]` is proposer `flat`'s answer to
/// question `q` as an index into that question's alphabet. Judge scores
/// and rationales are optional side data; `key_signal` is a per-question
/// side channel consumed only by the keyed Bayes summarizer and never
/// visible to selection algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseDataset {
    questions: Vec<Question>,
    n_models: usize,
    n_prompts: usize,
    model_names: Vec<String>,
    labels: Vec<LabelId>,
    truths: Vec<LabelId>,
    rationales: Option<Vec<Option<String>>>,
    judge_scores: Option<Vec<f64>>,
    key_signal: Option<Vec<LabelId>>,
}

/// Labeled-pool partition plus held-out test questions.
///
/// `train` and `val` together form the labeled pool; `test` is the
/// remainder. All three are sorted, pairwise disjoint index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// The labeled pool: train ∪ val, sorted.
    pub fn labeled(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.train.iter().chain(self.val.iter()).copied().collect();
        all.sort_unstable();
        all
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordRow {
    question_id: String,
    model: usize,
    prompt: usize,
    label: String,
    truth: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rationale: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    judge_score: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AlphabetRow {
    question_id: String,
    alphabet: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, Default)]
struct Manifest {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    alphabet: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    models: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct KeySignalRow {
    question_id: String,
    z_f: String,
}

/// Sidecar path `dir/stem.suffix` next to the records file.
fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}.{suffix}"))
}

impl ResponseDataset {
    pub fn n_models(&self) -> usize {
        self.n_models
    }

    pub fn n_prompts(&self) -> usize {
        self.n_prompts
    }

    /// Total proposer count N = n_models · n_prompts.
    pub fn n_proposers(&self) -> usize {
        self.n_models * self.n_prompts
    }

    pub fn n_questions(&self) -> usize {
        self.questions.len()
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn question(&self, q: usize) -> &Question {
        &self.questions[q]
    }

    pub fn model_names(&self) -> &[String] {
        &self.model_names
    }

    pub fn proposer_ids(&self) -> Vec<ProposerId> {
        (0..self.n_proposers())
            .map(|f| ProposerId::from_flat(f, self.n_prompts))
            .collect()
    }

    pub fn label(&self, flat: usize, q: usize) -> LabelId {
        self.labels[flat * self.questions.len() + q]
    }

    pub fn label_str(&self, flat: usize, q: usize) -> &str {
        &self.questions[q].alphabet[self.label(flat, q) as usize]
    }

    pub fn truth(&self, q: usize) -> LabelId {
        self.truths[q]
    }

    pub fn truth_str(&self, q: usize) -> &str {
        &self.questions[q].alphabet[self.truths[q] as usize]
    }

    pub fn rationale(&self, flat: usize, q: usize) -> Option<&str> {
        self.rationales
            .as_ref()
            .and_then(|r| r[flat * self.questions.len() + q].as_deref())
    }

    pub fn judge_score(&self, flat: usize, q: usize) -> Option<f64> {
        self.judge_scores
            .as_ref()
            .map(|s| s[flat * self.questions.len() + q])
    }

    pub fn has_judge_scores(&self) -> bool {
        self.judge_scores.is_some()
    }

    /// Per-question side channel (the summarizer's private signal), if any.
    pub fn key_signal(&self, q: usize) -> Option<LabelId> {
        self.key_signal.as_ref().map(|z| z[q])
    }

    pub fn has_key_signal(&self) -> bool {
        self.key_signal.is_some()
    }

    pub fn is_correct(&self, flat: usize, q: usize) -> bool {
        self.label(flat, q) == self.truths[q]
    }

    /// Number of proposers in `set` answering question `q` correctly.
    pub fn correct_count(&self, set: &[usize], q: usize) -> usize {
        set.iter().filter(|&&p| self.is_correct(p, q)).count()
    }

    /// Empirical accuracy of one proposer over a question set.
    pub fn proposer_accuracy(&self, id: ProposerId, qs: &[usize]) -> Result<f64, DatasetError> {
        self.accuracy_flat(id.flat(self.n_prompts), qs)
    }

    /// Empirical accuracy by flat index.
    pub fn accuracy_flat(&self, flat: usize, qs: &[usize]) -> Result<f64, DatasetError> {
        if qs.is_empty() {
            return Err(DatasetError::EmptyQuestionSet);
        }
        if flat >= self.n_proposers() {
            return Err(DatasetError::InvalidProposer {
                index: flat,
                n: self.n_proposers(),
            });
        }
        let hits = qs.iter().filter(|&&q| self.is_correct(flat, q)).count();
        Ok(hits as f64 / qs.len() as f64)
    }

    /// Assemble a dataset from in-memory parts, validating the invariants
    /// the file loader would enforce. Used by the synthetic generators.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        questions: Vec<Question>,
        n_models: usize,
        n_prompts: usize,
        labels: Vec<LabelId>,
        truths: Vec<LabelId>,
        judge_scores: Option<Vec<f64>>,
        key_signal: Option<Vec<LabelId>>,
        model_names: Option<Vec<String>>,
    ) -> Result<Self, DatasetError> {
        let n = n_models * n_prompts;
        let nq = questions.len();
        if n == 0 || nq == 0 {
            return Err(DatasetError::EmptyDataset);
        }
        assert_eq!(labels.len(), n * nq, "label matrix shape");
        assert_eq!(truths.len(), nq, "truth vector shape");
        for (q, question) in questions.iter().enumerate() {
            let a = question.alphabet.len() as LabelId;
            if truths[q] >= a {
                return Err(DatasetError::AlphabetViolation {
                    question_id: question.id.clone(),
                    label: format!("#{}", truths[q]),
                });
            }
            for p in 0..n {
                if labels[p * nq + q] >= a {
                    return Err(DatasetError::AlphabetViolation {
                        question_id: question.id.clone(),
                        label: format!("#{}", labels[p * nq + q]),
                    });
                }
            }
            if let Some(z) = &key_signal {
                if z[q] >= a {
                    return Err(DatasetError::AlphabetViolation {
                        question_id: question.id.clone(),
                        label: format!("#{}", z[q]),
                    });
                }
            }
        }
        let model_names =
            model_names.unwrap_or_else(|| (0..n_models).map(|m| format!("model{m}")).collect());
        Ok(ResponseDataset {
            questions,
            n_models,
            n_prompts,
            model_names,
            labels,
            truths,
            rationales: None,
            judge_scores,
            key_signal,
        })
    }
}

/// Load a record matrix plus any sidecars found next to it.
///
/// Sidecars, all optional:
/// - `<stem>.alphabet.jsonl`: per-question answer alphabets
/// - `<stem>.manifest.json`: global `alphabet` and/or `models` names
/// - `<stem>.zf.jsonl`: per-question key-signal side channel
///
/// Without a declared alphabet, each question's alphabet is inferred as
/// the sorted set of labels observed for it (truth included).
pub fn load_dataset(path: &Path, format: FileFormat) -> Result<ResponseDataset, DatasetError> {
    let rows = match format {
        FileFormat::Jsonl => read_jsonl_rows(path)?,
        FileFormat::Csv => read_csv_rows(path)?,
    };
    if rows.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }

    // Question order: first appearance in the file. Proposer grid spans
    // the max model / prompt indices seen.
    let mut q_order: Vec<String> = Vec::new();
    let mut q_index: HashMap<String, usize> = HashMap::new();
    let mut n_models = 0usize;
    let mut n_prompts = 0usize;
    for row in &rows {
        if !q_index.contains_key(&row.question_id) {
            q_index.insert(row.question_id.clone(), q_order.len());
            q_order.push(row.question_id.clone());
        }
        n_models = n_models.max(row.model + 1);
        n_prompts = n_prompts.max(row.prompt + 1);
    }
    let nq = q_order.len();
    let n = n_models * n_prompts;

    // Alphabets: sidecar beats manifest beats inference.
    let manifest: Manifest = match fs::read_to_string(sidecar_path(path, "manifest.json")) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| DatasetError::Parse {
            line: 0,
            msg: format!("manifest: {e}"),
        })?,
        Err(_) => Manifest::default(),
    };
    let sidecar_alphabets = read_alphabet_sidecar(&sidecar_path(path, "alphabet.jsonl"))?;

    let mut alphabets: Vec<Option<Vec<String>>> = vec![None; nq];
    if let Some(map) = &sidecar_alphabets {
        for (qid, &qi) in &q_index {
            match map.get(qid) {
                Some(a) => alphabets[qi] = Some(a.clone()),
                None => {
                    return Err(DatasetError::Parse {
                        line: 0,
                        msg: format!("alphabet sidecar has no entry for question {qid:?}"),
                    })
                }
            }
        }
    } else if let Some(global) = &manifest.alphabet {
        for slot in &mut alphabets {
            *slot = Some(global.clone());
        }
    } else {
        // Infer: sorted unique labels seen per question, truth included.
        let mut seen: Vec<Vec<String>> = vec![Vec::new(); nq];
        for row in &rows {
            let qi = q_index[&row.question_id];
            seen[qi].push(row.label.clone());
            seen[qi].push(row.truth.clone());
        }
        for (qi, mut labels) in seen.into_iter().enumerate() {
            labels.sort();
            labels.dedup();
            alphabets[qi] = Some(labels);
        }
    }

    let questions: Vec<Question> = q_order
        .iter()
        .zip(alphabets)
        .map(|(id, a)| Question {
            id: id.clone(),
            alphabet: a.unwrap(),
        })
        .collect();

    // Fill the matrix, rejecting duplicates and out-of-alphabet labels.
    let to_id = |qi: usize, s: &str| -> Result<LabelId, DatasetError> {
        questions[qi]
            .alphabet
            .iter()
            .position(|a| a == s)
            .map(|i| i as LabelId)
            .ok_or_else(|| DatasetError::AlphabetViolation {
                question_id: questions[qi].id.clone(),
                label: s.to_string(),
            })
    };

    let mut labels: Vec<Option<LabelId>> = vec![None; n * nq];
    let mut truths: Vec<Option<LabelId>> = vec![None; nq];
    let mut rationales: Vec<Option<String>> = vec![None; n * nq];
    let mut any_rationale = false;
    let mut judge: Vec<Option<f64>> = vec![None; n * nq];
    let mut any_judge = false;
    let mut all_judge = true;

    for row in &rows {
        let qi = q_index[&row.question_id];
        let flat = ProposerId {
            model: row.model,
            prompt: row.prompt,
        }
        .flat(n_prompts);
        let cell = flat * nq + qi;
        if labels[cell].is_some() {
            return Err(DatasetError::DuplicateCell {
                question_id: row.question_id.clone(),
                model: row.model,
                prompt: row.prompt,
            });
        }
        labels[cell] = Some(to_id(qi, &row.label)?);
        let t = to_id(qi, &row.truth)?;
        match truths[qi] {
            None => truths[qi] = Some(t),
            Some(prev) if prev != t => {
                return Err(DatasetError::InconsistentTruth {
                    question_id: row.question_id.clone(),
                })
            }
            _ => {}
        }
        if let Some(r) = &row.rationale {
            rationales[cell] = Some(r.clone());
            any_rationale = true;
        }
        match row.judge_score {
            Some(s) => {
                if !(1.0..=5.0).contains(&s) {
                    return Err(DatasetError::JudgeScoreOutOfRange {
                        question_id: row.question_id.clone(),
                        score: s,
                    });
                }
                judge[cell] = Some(s);
                any_judge = true;
            }
            None => all_judge = false,
        }
    }

    // Completeness: every (proposer, question) cell must be present.
    for flat in 0..n {
        for qi in 0..nq {
            if labels[flat * nq + qi].is_none() {
                let id = ProposerId::from_flat(flat, n_prompts);
                return Err(DatasetError::MissingCell {
                    question_id: questions[qi].id.clone(),
                    model: id.model,
                    prompt: id.prompt,
                });
            }
        }
    }
    if any_judge && !all_judge {
        return Err(DatasetError::Parse {
            line: 0,
            msg: "judge_score present on some records but not all".into(),
        });
    }

    let key_signal = read_key_signal(&sidecar_path(path, "zf.jsonl"), &questions, &q_index)?;

    let model_names = manifest
        .models
        .unwrap_or_else(|| (0..n_models).map(|m| format!("model{m}")).collect());

    Ok(ResponseDataset {
        questions,
        n_models,
        n_prompts,
        model_names,
        labels: labels.into_iter().map(Option::unwrap).collect(),
        truths: truths.into_iter().map(Option::unwrap).collect(),
        rationales: any_rationale.then_some(rationales),
        judge_scores: any_judge.then(|| judge.into_iter().map(Option::unwrap).collect()),
        key_signal,
    })
}

/// Write the dataset in canonical order: questions in dataset order,
/// proposers ascending by flat index within each question. A uniform
/// alphabet goes to the manifest; mixed alphabets go to the per-question
/// sidecar. The key-signal side channel, when present, is written to its
/// own sidecar. `load(save(ds))` reproduces `ds` exactly (CSV drops
/// rationales, which it cannot carry).
pub fn save_dataset(
    ds: &ResponseDataset,
    path: &Path,
    format: FileFormat,
) -> Result<(), DatasetError> {
    let nq = ds.n_questions();
    let mut rows: Vec<RecordRow> = Vec::with_capacity(nq * ds.n_proposers());
    for qi in 0..nq {
        for flat in 0..ds.n_proposers() {
            let id = ProposerId::from_flat(flat, ds.n_prompts);
            rows.push(RecordRow {
                question_id: ds.questions[qi].id.clone(),
                model: id.model,
                prompt: id.prompt,
                label: ds.label_str(flat, qi).to_string(),
                truth: ds.truth_str(qi).to_string(),
                rationale: if format == FileFormat::Jsonl {
                    ds.rationale(flat, qi).map(str::to_string)
                } else {
                    None
                },
                judge_score: ds.judge_score(flat, qi),
            });
        }
    }

    match format {
        FileFormat::Jsonl => {
            let mut out = fs::File::create(path)?;
            for row in &rows {
                serde_json::to_writer(&mut out, row).map_err(io_from_json)?;
                out.write_all(b"\n")?;
            }
        }
        FileFormat::Csv => {
            let mut w = csv::WriterBuilder::new().from_path(path).map_err(io_from_csv)?;
            w.write_record(["question_id", "model", "prompt", "label", "truth", "judge_score"])
                .map_err(io_from_csv)?;
            for row in &rows {
                let judge = row.judge_score.map(|s| s.to_string()).unwrap_or_default();
                w.write_record([
                    row.question_id.as_str(),
                    &row.model.to_string(),
                    &row.prompt.to_string(),
                    &row.label,
                    &row.truth,
                    &judge,
                ])
                .map_err(io_from_csv)?;
            }
            w.flush()?;
        }
    }

    let uniform = ds
        .questions
        .iter()
        .all(|q| q.alphabet == ds.questions[0].alphabet);
    let default_names: Vec<String> = (0..ds.n_models).map(|m| format!("model{m}")).collect();
    let manifest = Manifest {
        alphabet: uniform.then(|| ds.questions[0].alphabet.clone()),
        models: (ds.model_names != default_names).then(|| ds.model_names.clone()),
    };
    if manifest.alphabet.is_some() || manifest.models.is_some() {
        let text = serde_json::to_string_pretty(&manifest).map_err(io_from_json)?;
        fs::write(sidecar_path(path, "manifest.json"), text + "\n")?;
    }
    if !uniform {
        let mut out = fs::File::create(sidecar_path(path, "alphabet.jsonl"))?;
        for q in &ds.questions {
            let row = AlphabetRow {
                question_id: q.id.clone(),
                alphabet: q.alphabet.clone(),
            };
            serde_json::to_writer(&mut out, &row).map_err(io_from_json)?;
            out.write_all(b"\n")?;
        }
    }
    if let Some(z) = &ds.key_signal {
        let mut out = fs::File::create(sidecar_path(path, "zf.jsonl"))?;
        for (qi, q) in ds.questions.iter().enumerate() {
            let row = KeySignalRow {
                question_id: q.id.clone(),
                z_f: q.alphabet[z[qi] as usize].clone(),
            };
            serde_json::to_writer(&mut out, &row).map_err(io_from_json)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Partition questions into labeled train/val plus held-out test.
///
/// The labeled pool has `round(labeled_fraction · |Q|)` questions; the
/// train part has `round(train_fraction · labeled)`. Deterministic for a
/// fixed seed; partitions are sorted index sets.
pub fn make_split(
    ds: &ResponseDataset,
    labeled_fraction: f64,
    train_fraction: f64,
    seed: u64,
) -> Result<Split, DatasetError> {
    if !(labeled_fraction > 0.0 && labeled_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction {
            name: "labeled_fraction",
            value: labeled_fraction,
        });
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction {
            name: "train_fraction",
            value: train_fraction,
        });
    }
    let nq = ds.n_questions();
    if nq == 0 {
        return Err(DatasetError::EmptyDataset);
    }
    let labeled_n = (labeled_fraction * nq as f64).round() as usize;
    if labeled_n == 0 {
        return Err(DatasetError::EmptyPartition { part: "labeled" });
    }
    if labeled_n >= nq {
        return Err(DatasetError::EmptyPartition { part: "test" });
    }
    let train_n = (train_fraction * labeled_n as f64).round() as usize;
    if train_n == 0 {
        return Err(DatasetError::EmptyPartition { part: "train" });
    }
    if train_n >= labeled_n {
        return Err(DatasetError::EmptyPartition { part: "val" });
    }

    let mut idx: Vec<usize> = (0..nq).collect();
    let mut rng = StreamKey::new(seed).tag(DOM_SPLIT).rng();
    idx.shuffle(&mut rng);
    let mut train: Vec<usize> = idx[..train_n].to_vec();
    let mut val: Vec<usize> = idx[train_n..labeled_n].to_vec();
    let mut test: Vec<usize> = idx[labeled_n..].to_vec();
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, val, test })
}

fn io_from_json(e: serde_json::Error) -> DatasetError {
    DatasetError::Parse {
        line: 0,
        msg: e.to_string(),
    }
}

fn io_from_csv(e: csv::Error) -> DatasetError {
    DatasetError::Parse {
        line: 0,
        msg: e.to_string(),
    }
}

fn read_jsonl_rows(path: &Path) -> Result<Vec<RecordRow>, DatasetError> {
    let file = fs::File::open(path)?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: RecordRow = serde_json::from_str(&line).map_err(|e| DatasetError::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

fn read_csv_rows(path: &Path) -> Result<Vec<RecordRow>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(io_from_csv)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| DatasetError::Parse {
            line: i + 2,
            msg: e.to_string(),
        })?;
        let field = |j: usize| -> Result<&str, DatasetError> {
            rec.get(j).ok_or(DatasetError::Parse {
                line: i + 2,
                msg: format!("missing column {j}"),
            })
        };
        let parse_usize = |s: &str, name: &str| -> Result<usize, DatasetError> {
            s.parse().map_err(|_| DatasetError::Parse {
                line: i + 2,
                msg: format!("bad {name}: {s:?}"),
            })
        };
        let judge = match rec.get(5) {
            Some("") | None => None,
            Some(s) => Some(s.parse::<f64>().map_err(|_| DatasetError::Parse {
                line: i + 2,
                msg: format!("bad judge_score: {s:?}"),
            })?),
        };
        rows.push(RecordRow {
            question_id: field(0)?.to_string(),
            model: parse_usize(field(1)?, "model")?,
            prompt: parse_usize(field(2)?, "prompt")?,
            label: field(3)?.to_string(),
            truth: field(4)?.to_string(),
            rationale: None,
            judge_score: judge,
        });
    }
    Ok(rows)
}

fn read_alphabet_sidecar(
    path: &Path,
) -> Result<Option<HashMap<String, Vec<String>>>, DatasetError> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(_) => return Ok(None),
    };
    let mut map = HashMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: AlphabetRow = serde_json::from_str(&line).map_err(|e| DatasetError::Parse {
            line: i + 1,
            msg: format!("alphabet sidecar: {e}"),
        })?;
        map.insert(row.question_id, row.alphabet);
    }
    Ok(Some(map))
}

fn read_key_signal(
    path: &Path,
    questions: &[Question],
    q_index: &HashMap<String, usize>,
) -> Result<Option<Vec<LabelId>>, DatasetError> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(_) => return Ok(None),
    };
    let mut values: Vec<Option<LabelId>> = vec![None; questions.len()];
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: KeySignalRow = serde_json::from_str(&line).map_err(|e| DatasetError::Parse {
            line: i + 1,
            msg: format!("key-signal sidecar: {e}"),
        })?;
        let Some(&qi) = q_index.get(&row.question_id) else {
            continue;
        };
        let id = questions[qi]
            .alphabet
            .iter()
            .position(|a| *a == row.z_f)
            .ok_or_else(|| DatasetError::AlphabetViolation {
                question_id: row.question_id.clone(),
                label: row.z_f.clone(),
            })?;
        values[qi] = Some(id as LabelId);
    }
    for (qi, v) in values.iter().enumerate() {
        if v.is_none() {
            return Err(DatasetError::Parse {
                line: 0,
                msg: format!(
                    "key-signal sidecar has no entry for question {:?}",
                    questions[qi].id
                ),
            });
        }
    }
    Ok(Some(values.into_iter().map(Option::unwrap).collect()))
}
