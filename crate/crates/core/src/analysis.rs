//! Correct-count analytics, query-complexity closed forms, and report
//! emission.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::ResponseDataset;
use crate::oracle::{OracleError, PresentationPolicy, SummarizerOracle};
use crate::selection::SelectionResult;
use crate::stream::{StreamKey, DOM_PROFILE};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("method {method:?} needs parameter {param:?}")]
    MissingParam { method: String, param: &'static str },
    #[error("question set is empty")]
    EmptyQuestionSet,
    #[error("io failure: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("malformed report: {0}")]
    MalformedReport(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Distribution of correct counts for a selected set, with the
/// summarizer accuracy conditioned on the count. Bins with no samples
/// are reported as `None`, never interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountProfile {
    /// Fraction of questions with exactly c correct selected proposers.
    pub histogram: Vec<f64>,
    /// Summarizer accuracy given c, per bin.
    pub conditional_accuracy: Vec<Option<f64>>,
    /// Samples behind each conditional bin.
    pub bin_counts: Vec<u64>,
}

/// Histogram of c_q(S) over `qs`, plus a conditional-accuracy curve.
///
/// With `pool_conditional` the curve pools `pooled_samples` random
/// size-|S| subsets over random questions (the same curve for every
/// method on a pool); otherwise it is estimated from S itself, one call
/// per question.
#[allow(clippy::too_many_arguments)]
pub fn count_profile(
    ds: &ResponseDataset,
    set: &[usize],
    qs: &[usize],
    oracle: &SummarizerOracle,
    policy: &PresentationPolicy,
    pool_conditional: bool,
    pooled_samples: u32,
    seed: u64,
) -> Result<CountProfile, AnalysisError> {
    if qs.is_empty() {
        return Err(AnalysisError::EmptyQuestionSet);
    }
    let k = set.len();
    let mut histogram = vec![0.0f64; k + 1];
    for &q in qs {
        histogram[ds.correct_count(set, q)] += 1.0;
    }
    for h in &mut histogram {
        *h /= qs.len() as f64;
    }

    let mut hits = vec![0u64; k + 1];
    let mut counts = vec![0u64; k + 1];
    if pool_conditional {
        let mut rng = StreamKey::new(seed).tag(DOM_PROFILE).rng();
        let n = ds.n_proposers();
        for s in 0..pooled_samples {
            let q = qs[rng.random_range(0..qs.len())];
            let subset: Vec<usize> = rand::seq::index::sample(&mut rng, n, k.min(n))
                .iter()
                .collect();
            let c = ds.correct_count(&subset, q).min(k);
            let label = oracle.summarize_rep(ds, &subset, q, policy, u64::from(s))?;
            counts[c] += 1;
            hits[c] += u64::from(label == ds.truth(q));
        }
    } else {
        for (i, &q) in qs.iter().enumerate() {
            let c = ds.correct_count(set, q);
            let label = oracle.summarize_rep(ds, set, q, policy, i as u64)?;
            counts[c] += 1;
            hits[c] += u64::from(label == ds.truth(q));
        }
    }
    let conditional_accuracy = hits
        .iter()
        .zip(&counts)
        .map(|(&h, &c)| (c > 0).then(|| h as f64 / c as f64))
        .collect();
    Ok(CountProfile {
        histogram,
        conditional_accuracy,
        bin_counts: counts,
    })
}

/// Parameters for the query-complexity closed forms. Only the fields a
/// method actually uses need to be set.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct ComplexityParams {
    pub n_llm: Option<u64>,
    pub n_prompt: Option<u64>,
    pub k: Option<u64>,
    /// Train questions scored per model per iteration (model-first).
    pub m: Option<u64>,
    /// Coalitions sampled per proposer (approximate Shapley).
    pub z: Option<u64>,
    /// Questions per coalition (approximate Shapley).
    pub t_h: Option<u64>,
    /// Samples per correct-count bin (oracle-surrogate).
    pub t_surrogate: Option<u64>,
}

fn need(
    v: Option<u64>,
    method: &str,
    param: &'static str,
) -> Result<u64, AnalysisError> {
    v.ok_or(AnalysisError::MissingParam {
        method: method.to_string(),
        param,
    })
}

/// Exact number of summarizer queries a method spends during selection.
///
/// - approx_shapley: `2 · n_llm · n_prompt · z · t_h`
/// - truth_prediction_greedy: `0`
/// - oracle_surrogate_greedy: `(k+1) · t_surrogate`
/// - model_first_greedy: `n_llm · m · k`
/// - the label/score-level baselines: `0`
pub fn query_complexity(method: &str, params: &ComplexityParams) -> Result<u64, AnalysisError> {
    match method {
        "approx_shapley" | "shapley" => Ok(2
            * need(params.n_llm, method, "n_llm")?
            * need(params.n_prompt, method, "n_prompt")?
            * need(params.z, method, "z")?
            * need(params.t_h, method, "t_h")?),
        "truth_prediction_greedy" => Ok(0),
        "oracle_surrogate_greedy" => {
            Ok((need(params.k, method, "k")? + 1) * need(params.t_surrogate, method, "t_surrogate")?)
        }
        "model_first_greedy" => Ok(need(params.n_llm, method, "n_llm")?
            * need(params.m, method, "m")?
            * need(params.k, method, "k")?),
        "input_all" | "best_model" | "top_accuracy" | "moa" | "conditioned_diversity"
        | "judge_topk" | "majority" | "weighted_majority" | "decision_tree" => Ok(0),
        other => Err(AnalysisError::UnknownMethod(other.to_string())),
    }
}

/// Methods with a closed-form query complexity, in display order.
pub const COMPLEXITY_METHODS: [&str; 4] = [
    "approx_shapley",
    "truth_prediction_greedy",
    "oracle_surrogate_greedy",
    "model_first_greedy",
];

/// One evaluated selection outcome feeding a report row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: String,
    pub setting: String,
    /// Selected sets, one per run.
    pub selections: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub queries: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<SelectionResult>>,
}

/// A report row: accuracy, query cost, and the share of selected slots
/// per model (percentages summing to 100).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub setting: String,
    pub accuracy: f64,
    pub queries: u64,
    pub composition: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<SelectionResult>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub model_names: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    /// Build rows from outcomes; rows sort canonically by
    /// (method, setting) regardless of input order.
    pub fn build(
        outcomes: &[MethodOutcome],
        n_prompts: usize,
        model_names: &[String],
    ) -> ReportTable {
        let mut rows: Vec<ReportRow> = outcomes
            .iter()
            .map(|o| {
                let mut slots = vec![0u64; model_names.len()];
                let mut total = 0u64;
                for sel in &o.selections {
                    for &flat in sel {
                        slots[flat / n_prompts] += 1;
                        total += 1;
                    }
                }
                let composition = slots
                    .iter()
                    .map(|&s| {
                        if total == 0 {
                            0.0
                        } else {
                            100.0 * s as f64 / total as f64
                        }
                    })
                    .collect();
                ReportRow {
                    method: o.method.clone(),
                    setting: o.setting.clone(),
                    accuracy: o.accuracy,
                    queries: o.queries,
                    composition,
                    traces: o.traces.clone(),
                }
            })
            .collect();
        rows.sort_by(|a, b| a.method.cmp(&b.method).then(a.setting.cmp(&b.setting)));
        ReportTable {
            model_names: model_names.to_vec(),
            rows,
        }
    }

    /// CSV with header `method,setting,accuracy,queries,<model names>`.
    /// Traces are JSON-only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,setting,accuracy,queries");
        for name in &self.model_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}",
                row.method, row.setting, row.accuracy, row.queries
            ));
            for pct in &row.composition {
                out.push_str(&format!(",{pct}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<ReportTable, AnalysisError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| AnalysisError::MalformedReport("empty report".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 4 || cols[..4] != ["method", "setting", "accuracy", "queries"] {
            return Err(AnalysisError::MalformedReport(format!(
                "unexpected header {header:?}"
            )));
        }
        let model_names: Vec<String> = cols[4..].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(AnalysisError::MalformedReport(format!(
                    "row has {} fields, expected {}",
                    fields.len(),
                    cols.len()
                )));
            }
            let bad = |what: &str| AnalysisError::MalformedReport(format!("bad {what}: {line:?}"));
            rows.push(ReportRow {
                method: fields[0].to_string(),
                setting: fields[1].to_string(),
                accuracy: fields[2].parse().map_err(|_| bad("accuracy"))?,
                queries: fields[3].parse().map_err(|_| bad("queries"))?,
                composition: fields[4..]
                    .iter()
                    .map(|f| f.parse().map_err(|_| bad("composition")))
                    .collect::<Result<_, _>>()?,
                traces: None,
            });
        }
        Ok(ReportTable { model_names, rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<ReportTable, AnalysisError> {
        serde_json::from_str(text).map_err(|e| AnalysisError::MalformedReport(e.to_string()))
    }
}

/// Report formats; JSON carries full traces, CSV is tabular only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Write a report to disk in the requested format.
pub fn emit_report(
    table: &ReportTable,
    format: ReportFormat,
    path: &std::path::Path,
) -> Result<(), AnalysisError> {
    let text = match format {
        ReportFormat::Csv => table.to_csv(),
        ReportFormat::Json => table.to_json(),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{planted_pool, CorrelatedBlock, PlantedPoolSpec};

    #[test]
    fn reference_scale_closed_forms() {
        let params = ComplexityParams {
            n_llm: Some(8),
            n_prompt: Some(5),
            k: Some(5),
            m: Some(400),
            z: Some(40),
            t_h: Some(20),
            t_surrogate: Some(200),
        };
        assert_eq!(query_complexity("model_first_greedy", &params).unwrap(), 16_000);
        assert_eq!(query_complexity("oracle_surrogate_greedy", &params).unwrap(), 1_200);
        assert_eq!(query_complexity("approx_shapley", &params).unwrap(), 64_000);
        assert_eq!(query_complexity("truth_prediction_greedy", &params).unwrap(), 0);
        assert_eq!(query_complexity("top_accuracy", &params).unwrap(), 0);
    }

    #[test]
    fn unknown_and_missing() {
        let params = ComplexityParams::default();
        assert!(matches!(
            query_complexity("galactic_search", &params),
            Err(AnalysisError::UnknownMethod(_))
        ));
        assert!(matches!(
            query_complexity("model_first_greedy", &params),
            Err(AnalysisError::MissingParam { .. })
        ));
    }

    #[test]
    fn histogram_point_mass_when_all_correct() {
        let spec = PlantedPoolSpec::independent(3, 1, 100, 1.0);
        let ds = planted_pool(&spec, 1).unwrap();
        let qs: Vec<usize> = (0..100).collect();
        let oracle = SummarizerOracle::count_curve(vec![0.5, 0.5, 0.5, 0.5], 0);
        let policy = PresentationPolicy::default();
        let profile =
            count_profile(&ds, &[0, 1, 2], &qs, &oracle, &policy, false, 0, 0).unwrap();
        assert_eq!(profile.histogram, vec![0.0, 0.0, 0.0, 1.0]);
        assert!(profile.conditional_accuracy[3].is_some());
        assert!(profile.conditional_accuracy[0].is_none());
        assert_eq!(profile.bin_counts[3], 100);
    }

    #[test]
    fn perfectly_correlated_two_point_histogram() {
        let spec = PlantedPoolSpec {
            n_models: 4,
            n_prompts: 1,
            n_questions: 3_000,
            alphabet_size: 2,
            accuracies: vec![0.7; 4],
            blocks: vec![CorrelatedBlock {
                members: vec![0, 1, 2, 3],
                correlation: 1.0,
            }],
        };
        let ds = planted_pool(&spec, 5).unwrap();
        let qs: Vec<usize> = (0..3_000).collect();
        let oracle = SummarizerOracle::count_curve(vec![0.1, 0.3, 0.5, 0.7, 0.9], 1);
        let policy = PresentationPolicy::default();
        let profile =
            count_profile(&ds, &[0, 1, 2, 3], &qs, &oracle, &policy, false, 0, 0).unwrap();
        for c in 1..4 {
            assert_eq!(profile.histogram[c], 0.0, "bin {c} must be empty");
        }
        let p = profile.histogram[4];
        assert!((p - 0.7).abs() < 3.0 * (0.7f64 * 0.3 / 3_000.0).sqrt());
        assert!((profile.histogram[0] - (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn report_round_trips_used_formats() {
        let outcomes = vec![
            MethodOutcome {
                method: "top_accuracy".into(),
                setting: "default".into(),
                selections: vec![vec![0, 1, 4], vec![0, 2, 4]],
                accuracy: 0.7519,
                queries: 0,
                traces: None,
            },
            MethodOutcome {
                method: "model_first_greedy".into(),
                setting: "default".into(),
                selections: vec![vec![2, 3, 5]],
                accuracy: 0.8011,
                queries: 1_200,
                traces: None,
            },
        ];
        let names = vec!["model0".to_string(), "model1".to_string(), "model2".to_string()];
        let table = ReportTable::build(&outcomes, 2, &names);
        // canonical ordering by method name
        assert_eq!(table.rows[0].method, "model_first_greedy");
        for row in &table.rows {
            let total: f64 = row.composition.iter().sum();
            assert!((total - 100.0).abs() < 0.1);
        }
        let csv = table.to_csv();
        let parsed = ReportTable::from_csv(&csv).unwrap();
        assert_eq!(parsed.to_csv(), csv);
        let json = parsed.to_json();
        let back = ReportTable::from_json(&json).unwrap();
        assert_eq!(back.to_csv(), csv);
    }
}
