//! Proposer selection for summarizer ensembles over recorded label data.
//!
//! A pool of proposers (model–prompt pairs) answers a set of questions;
//! a summarizer oracle aggregates a selected subset's responses into one
//! answer per question. This crate selects the size-k subset to feed the
//! summarizer: the greedy family that scores candidates by their joint
//! contribution with the summarizer, the usual accuracy/diversity/judge
//! baselines, exact analytics for the keyed-XOR counterexample pool on
//! which label-level heuristics provably fail, and closed-form query
//! accounting for every method. Simulated and replay oracles make the
//! whole pipeline runnable without any live model.

pub mod analysis;
pub mod baselines;
pub mod dataset;
pub mod experiment;
pub mod oracle;
pub mod selection;
pub mod stream;
pub mod synthetic;
mod tree;

pub use analysis::{
    count_profile, emit_report, query_complexity, AnalysisError, ComplexityParams, CountProfile,
    MethodOutcome, ReportFormat, ReportRow, ReportTable,
};
pub use baselines::{
    approx_shapley, best_model, conditioned_diversity, decision_tree_baseline, input_all,
    judge_topk, majority_variants, majority_vote, moa_per_model_top1, pairwise_disagreement,
    top_accuracy, BaselineError, BestModelRule, PoolVariant, ShapleyEstimate, VoteVariant,
};
pub use dataset::{
    load_dataset, make_split, save_dataset, DatasetError, FileFormat, LabelId, ProposerId,
    Question, ResponseDataset, Split,
};
pub use experiment::{
    run_evaluate, run_method, run_select, DatasetSource, EvaluationEnvelope, ExperimentConfig,
    ExperimentError, MethodSpec, OracleSpec, SelectionRecord, SplitSpec, SyntheticSpec,
};
pub use oracle::{
    canonical_set_key, order_responses, Behavior, OracleError, PresentationPolicy, RemoteConfig,
    ResponseOrder, SummarizerOracle,
};
pub use selection::{
    exhaustive_search, fit_surrogate, fit_truth_predictor, greedy_by_score, k_greedy,
    model_first_greedy, oracle_surrogate_greedy, standard_greedy, truth_prediction_greedy,
    IterationTrace, ModelFirstOptions, SelectionError, SelectionResult, SurrogateCurve,
};
pub use synthetic::{
    planted_pool, xor_pool, CorrelatedBlock, PlantedPoolSpec, SyntheticError, XorPairJoint,
};
pub use tree::TruthPredictor;
