//! Config-driven experiment runner: one JSON document describes the
//! dataset, oracle, policy, split, and method list; the runner produces
//! selection records and evaluation reports. All defaults are
//! materialized into the outputs so result files are self-describing,
//! and identical configs with identical seeds produce byte-identical
//! files.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{AnalysisError, MethodOutcome};
use crate::baselines::{self, BaselineError, BestModelRule};
use crate::dataset::{
    load_dataset, make_split, DatasetError, FileFormat, ProposerId, ResponseDataset, Split,
};
use crate::oracle::{
    Behavior, OracleError, PresentationPolicy, RemoteConfig, SummarizerOracle,
};
use crate::selection::{
    model_first_greedy, oracle_surrogate_greedy, standard_greedy, truth_prediction_greedy,
    IterationTrace, ModelFirstOptions, SelectionError, SelectionResult,
};
use crate::synthetic::{planted_pool, xor_pool, PlantedPoolSpec, SyntheticError, XorPairJoint};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config field {field:?}: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Synthetic(#[from] SyntheticError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

fn invalid(field: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Where the response matrix comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSource {
    File {
        path: PathBuf,
        format: FileFormat,
    },
    Synthetic {
        synthetic: SyntheticSpec,
    },
}

/// Built-in generators addressable from a config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticSpec {
    /// The keyed-XOR counterexample pool (four proposers plus the
    /// summarizer's private signal).
    Prop1 {
        questions: usize,
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default = "default_p34")]
        p3: f64,
        #[serde(default = "default_p34")]
        p4: f64,
    },
    Planted(PlantedPoolSpec),
    /// XOR pair plus independent extra proposers.
    Xor {
        questions: usize,
        #[serde(default)]
        extras: Vec<f64>,
    },
}

fn default_rho() -> f64 {
    0.9
}

fn default_p34() -> f64 {
    0.8
}

/// Oracle behavior selection for configs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "behavior", rename_all = "snake_case")]
pub enum OracleSpec {
    #[default]
    Majority,
    /// Log-odds weighted majority over the train split.
    WeightedMajority,
    CountCurve { curve: Vec<f64> },
    /// Recorded outputs from a JSON table file.
    Replay { table: PathBuf },
    /// Exact posterior rule for the keyed-XOR pool.
    BayesProp1 {
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default = "default_p34")]
        p3: f64,
        #[serde(default = "default_p34")]
        p4: f64,
    },
    Remote(RemoteConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSpec {
    pub labeled_fraction: f64,
    pub train_fraction: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            labeled_fraction: 0.25,
            train_fraction: 0.75,
        }
    }
}

/// One method entry; unset knobs fall back to the shared defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Completion samples per candidate in the sampled greedy variants.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m_reps: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_surrogate: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_h: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_model_rule: Option<BestModelRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_repeated_models: Option<bool>,
}

impl MethodSpec {
    pub fn named(name: &str) -> Self {
        MethodSpec {
            name: name.to_string(),
            k: None,
            m_reps: None,
            t_surrogate: None,
            z: None,
            t_h: None,
            tau: None,
            depth: None,
            train_fraction: None,
            best_model_rule: None,
            allow_repeated_models: None,
        }
    }
}

/// Fully resolved per-method parameters, written into result files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub k: usize,
    pub m_reps: u32,
    pub t_surrogate: u32,
    pub z: u32,
    pub t_h: u32,
    pub tau: f64,
    pub depth: usize,
    pub train_fraction: f64,
    pub best_model_rule: BestModelRule,
    pub allow_repeated_models: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub policy: PresentationPolicy,
    #[serde(default)]
    pub split: SplitSpec,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repeats")]
    pub repeats: u32,
    #[serde(default = "default_cap")]
    pub enumeration_cap: u64,
    #[serde(default = "default_setting")]
    pub setting: String,
}

fn default_k() -> usize {
    5
}

fn default_repeats() -> u32 {
    10
}

fn default_cap() -> u64 {
    1_000_000
}

fn default_setting() -> String {
    "default".to_string()
}

pub const KNOWN_METHODS: [&str; 11] = [
    "input_all",
    "best_model",
    "top_accuracy",
    "moa",
    "conditioned_diversity",
    "judge_topk",
    "approx_shapley",
    "standard_greedy",
    "model_first_greedy",
    "truth_prediction_greedy",
    "oracle_surrogate_greedy",
];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.methods.is_empty() {
            return Err(invalid("methods", "at least one method is required"));
        }
        for m in &self.methods {
            if !KNOWN_METHODS.contains(&m.name.as_str()) {
                return Err(ExperimentError::UnknownMethod(m.name.clone()));
            }
            let k = m.k.unwrap_or(self.k);
            if k == 0 {
                return Err(invalid("k", "ensemble size must be at least 1"));
            }
            if m.name == "approx_shapley" && k < 2 {
                return Err(invalid(
                    "k",
                    "approx_shapley needs k >= 2 for its coalition sizes 1..k-1",
                ));
            }
        }
        if !(self.split.labeled_fraction > 0.0 && self.split.labeled_fraction < 1.0) {
            return Err(invalid(
                "split.labeled_fraction",
                "must lie strictly between 0 and 1",
            ));
        }
        if !(self.split.train_fraction > 0.0 && self.split.train_fraction < 1.0) {
            return Err(invalid(
                "split.train_fraction",
                "must lie strictly between 0 and 1",
            ));
        }
        if self.repeats == 0 {
            return Err(invalid("repeats", "must be at least 1"));
        }
        if let OracleSpec::CountCurve { curve } = &self.oracle {
            if curve.is_empty() || curve.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(invalid(
                    "oracle.curve",
                    "entries must be probabilities in [0, 1]",
                ));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, m: &MethodSpec) -> ResolvedParams {
        ResolvedParams {
            k: m.k.unwrap_or(self.k),
            m_reps: m.m_reps.unwrap_or(50),
            t_surrogate: m.t_surrogate.unwrap_or(200),
            z: m.z.unwrap_or(40),
            t_h: m.t_h.unwrap_or(20),
            tau: m.tau.unwrap_or(0.4),
            depth: m.depth.unwrap_or(3),
            train_fraction: m.train_fraction.unwrap_or(0.75),
            best_model_rule: m.best_model_rule.unwrap_or_default(),
            allow_repeated_models: m.allow_repeated_models.unwrap_or(true),
        }
    }

    /// Load or generate the dataset this config describes.
    pub fn materialize_dataset(&self) -> Result<ResponseDataset, ExperimentError> {
        match &self.dataset {
            DatasetSource::File { path, format } => Ok(load_dataset(path, *format)?),
            DatasetSource::Synthetic { synthetic } => Ok(match synthetic {
                SyntheticSpec::Prop1 {
                    questions,
                    rho,
                    p3,
                    p4,
                } => XorPairJoint::new(*rho, *p3, *p4).sample_dataset(*questions, self.seed),
                SyntheticSpec::Planted(spec) => planted_pool(spec, self.seed)?,
                SyntheticSpec::Xor { questions, extras } => xor_pool(*questions, extras, self.seed),
            }),
        }
    }

    pub fn build_oracle(&self) -> Result<SummarizerOracle, ExperimentError> {
        let behavior = match &self.oracle {
            OracleSpec::Majority => Behavior::Majority,
            OracleSpec::WeightedMajority => {
                // weights come from the train split, resolved at run time
                Behavior::WeightedMajority {
                    weight_questions: Vec::new(),
                }
            }
            OracleSpec::CountCurve { curve } => Behavior::CountCurve {
                curve: curve.clone(),
            },
            OracleSpec::Replay { table } => Behavior::Replay {
                table: load_replay_table(table)?,
            },
            OracleSpec::BayesProp1 { rho, p3, p4 } => Behavior::KeyedBayes {
                joint: XorPairJoint::new(*rho, *p3, *p4),
            },
            OracleSpec::Remote(cfg) => Behavior::Remote {
                config: cfg.clone(),
            },
        };
        Ok(SummarizerOracle::new(behavior, self.seed))
    }

    fn build_oracle_for_split(&self, split: &Split) -> Result<SummarizerOracle, ExperimentError> {
        match &self.oracle {
            OracleSpec::WeightedMajority => Ok(SummarizerOracle::new(
                Behavior::WeightedMajority {
                    weight_questions: split.train.clone(),
                },
                self.seed,
            )),
            _ => self.build_oracle(),
        }
    }

    /// Presentation policy with accuracy estimates anchored on the train
    /// split.
    fn policy_for_split(&self, split: &Split) -> PresentationPolicy {
        let mut policy = self.policy.clone();
        if policy.accuracy_questions.is_none() {
            policy.accuracy_questions = Some(split.train.clone());
        }
        policy
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ReplayEntry {
    question_id: String,
    set_key: String,
    labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReplayFile {
    entries: Vec<ReplayEntry>,
}

fn load_replay_table(
    path: &Path,
) -> Result<HashMap<(String, String), Vec<String>>, ExperimentError> {
    let text = std::fs::read_to_string(path)?;
    let file: ReplayFile =
        serde_json::from_str(&text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
    Ok(file
        .entries
        .into_iter()
        .map(|e| ((e.question_id, e.set_key), e.labels))
        .collect())
}

/// One method's selection outcome, as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub method: String,
    pub setting: String,
    pub params: ResolvedParams,
    pub seed: u64,
    pub n_models: usize,
    pub n_prompts: usize,
    pub selected: Vec<usize>,
    pub selected_proposers: Vec<ProposerId>,
    pub queries_used: u64,
    pub trace: Vec<IterationTrace>,
}

impl SelectionRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))
    }
}

/// Run one configured method against a prepared dataset/split/oracle.
pub fn run_method(
    cfg: &ExperimentConfig,
    spec: &MethodSpec,
    ds: &ResponseDataset,
    split: &Split,
    oracle: &SummarizerOracle,
    policy: &PresentationPolicy,
) -> Result<SelectionRecord, ExperimentError> {
    let params = cfg.resolve(spec);
    let k = params.k;
    let seed = cfg.seed;
    let before = oracle.query_count();
    let result: SelectionResult = match spec.name.as_str() {
        "input_all" => bare(baselines::input_all(ds), seed),
        "best_model" => bare(
            baselines::best_model(ds, &split.train, params.best_model_rule)?,
            seed,
        ),
        "top_accuracy" => bare(baselines::top_accuracy(ds, &split.train, k)?, seed),
        "moa" => bare(baselines::moa_per_model_top1(ds, &split.train)?, seed),
        "conditioned_diversity" => bare(
            baselines::conditioned_diversity(ds, &split.train, k, params.tau)?,
            seed,
        ),
        "judge_topk" => bare(baselines::judge_topk(ds, &split.train, k)?, seed),
        "approx_shapley" => {
            let (selected, _estimate) = baselines::approx_shapley(
                oracle,
                ds,
                &split.train,
                k,
                params.z,
                params.t_h,
                1..=(k - 1),
                policy,
                seed,
            )?;
            bare(selected, seed)
        }
        "standard_greedy" => standard_greedy(oracle, ds, split, k, policy, seed)?,
        "model_first_greedy" => {
            let opts = ModelFirstOptions {
                train_fraction: params.train_fraction,
                allow_repeated_models: params.allow_repeated_models,
            };
            model_first_greedy(oracle, ds, split, k, policy, seed, &opts)?
        }
        "truth_prediction_greedy" => {
            truth_prediction_greedy(ds, split, k, params.m_reps, params.depth, seed)?
        }
        "oracle_surrogate_greedy" => oracle_surrogate_greedy(
            oracle,
            ds,
            split,
            k,
            params.t_surrogate,
            params.m_reps,
            policy,
            seed,
        )?,
        other => return Err(ExperimentError::UnknownMethod(other.to_string())),
    };
    let queries_used = oracle.query_count() - before;
    let selected_proposers = result
        .selected
        .iter()
        .map(|&f| ProposerId::from_flat(f, ds.n_prompts()))
        .collect();
    Ok(SelectionRecord {
        method: spec.name.clone(),
        setting: cfg.setting.clone(),
        params,
        seed,
        n_models: ds.n_models(),
        n_prompts: ds.n_prompts(),
        selected: result.selected,
        selected_proposers,
        queries_used,
        trace: result.trace,
    })
}

fn bare(selected: Vec<usize>, seed: u64) -> SelectionResult {
    let mut selected = selected;
    selected.sort_unstable();
    SelectionResult {
        selected,
        trace: Vec::new(),
        queries_used: 0,
        seed,
    }
}

/// Prepared run context: dataset, split, oracle, and effective policy.
pub struct RunContext {
    pub ds: ResponseDataset,
    pub split: Split,
    pub oracle: SummarizerOracle,
    pub policy: PresentationPolicy,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<RunContext, ExperimentError> {
    cfg.validate()?;
    let ds = cfg.materialize_dataset()?;
    let split = make_split(
        &ds,
        cfg.split.labeled_fraction,
        cfg.split.train_fraction,
        cfg.seed,
    )?;
    let oracle = cfg.build_oracle_for_split(&split)?;
    let policy = cfg.policy_for_split(&split);
    Ok(RunContext {
        ds,
        split,
        oracle,
        policy,
    })
}

/// Run every configured method in order. Methods run sequentially so the
/// per-method ledger deltas are exact.
pub fn run_select(cfg: &ExperimentConfig) -> Result<Vec<SelectionRecord>, ExperimentError> {
    let ctx = prepare(cfg)?;
    let mut records = Vec::with_capacity(cfg.methods.len());
    for spec in &cfg.methods {
        records.push(run_method(
            cfg,
            spec,
            &ctx.ds,
            &ctx.split,
            &ctx.oracle,
            &ctx.policy,
        )?);
    }
    Ok(records)
}

/// Evaluation output file: outcomes plus the pool geometry reports need.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationEnvelope {
    pub model_names: Vec<String>,
    pub n_prompts: usize,
    pub outcomes: Vec<MethodOutcome>,
}

impl EvaluationEnvelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))
    }
}

/// Evaluate selections on the test split with the configured repeats.
pub fn run_evaluate(
    cfg: &ExperimentConfig,
    records: &[SelectionRecord],
) -> Result<Vec<MethodOutcome>, ExperimentError> {
    let ctx = prepare(cfg)?;
    if ctx.split.test.is_empty() {
        return Err(invalid("split", "test partition is empty"));
    }
    let mut outcomes = Vec::with_capacity(records.len());
    for record in records {
        let before = ctx.oracle.query_count();
        let accuracy = ctx.oracle.accuracy_of(
            &ctx.ds,
            &record.selected,
            &ctx.split.test,
            &ctx.policy,
            cfg.repeats,
        )?;
        outcomes.push(MethodOutcome {
            method: record.method.clone(),
            setting: record.setting.clone(),
            selections: vec![record.selected.clone()],
            accuracy,
            queries: record.queries_used + (ctx.oracle.query_count() - before),
            traces: None,
        });
    }
    Ok(outcomes)
}
