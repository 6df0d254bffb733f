//! Python bindings: the dataset, split, oracle, selection algorithms,
//! baselines, counterexample analytics, and query accounting, driven
//! in-process from Python.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyType;

use propsel::{
    ComplexityParams, FileFormat, ModelFirstOptions, PlantedPoolSpec, PresentationPolicy,
    ProposerId, SelectionResult, SummarizerOracle, XorPairJoint,
};

fn to_py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_format(format: &str) -> PyResult<FileFormat> {
    match format {
        "jsonl" => Ok(FileFormat::Jsonl),
        "csv" => Ok(FileFormat::Csv),
        other => Err(PyValueError::new_err(format!(
            "unknown format {other:?}, expected \"jsonl\" or \"csv\""
        ))),
    }
}

/// A complete proposer x question response matrix.
#[pyclass(frozen)]
struct Dataset {
    inner: Arc<propsel::ResponseDataset>,
}

#[pymethods]
impl Dataset {
    /// Load a record file (plus sidecars found next to it).
    #[classmethod]
    #[pyo3(signature = (path, format = "jsonl"))]
    fn load(_cls: &Bound<'_, PyType>, path: &str, format: &str) -> PyResult<Self> {
        let ds = propsel::load_dataset(std::path::Path::new(path), parse_format(format)?)
            .map_err(to_py_err)?;
        Ok(Dataset { inner: Arc::new(ds) })
    }

    /// Sample the keyed-XOR counterexample pool.
    #[classmethod]
    #[pyo3(signature = (questions, seed = 0, rho = 0.9, p3 = 0.8, p4 = 0.8))]
    fn prop1(
        _cls: &Bound<'_, PyType>,
        questions: usize,
        seed: u64,
        rho: f64,
        p3: f64,
        p4: f64,
    ) -> Self {
        Dataset {
            inner: Arc::new(XorPairJoint::new(rho, p3, p4).sample_dataset(questions, seed)),
        }
    }

    /// Sample a planted pool from a JSON spec (same schema as configs).
    #[classmethod]
    #[pyo3(signature = (spec_json, seed = 0))]
    fn planted(_cls: &Bound<'_, PyType>, spec_json: &str, seed: u64) -> PyResult<Self> {
        let spec: PlantedPoolSpec = serde_json::from_str(spec_json).map_err(to_py_err)?;
        let ds = propsel::planted_pool(&spec, seed).map_err(to_py_err)?;
        Ok(Dataset { inner: Arc::new(ds) })
    }

    /// Binary pool where proposers 0 and 1 XOR to the truth, plus
    /// independent extras at the given accuracies.
    #[classmethod]
    #[pyo3(signature = (questions, extras = vec![], seed = 0))]
    fn xor(_cls: &Bound<'_, PyType>, questions: usize, extras: Vec<f64>, seed: u64) -> Self {
        Dataset {
            inner: Arc::new(propsel::xor_pool(questions, &extras, seed)),
        }
    }

    #[getter]
    fn n_proposers(&self) -> usize {
        self.inner.n_proposers()
    }

    #[getter]
    fn n_models(&self) -> usize {
        self.inner.n_models()
    }

    #[getter]
    fn n_prompts(&self) -> usize {
        self.inner.n_prompts()
    }

    #[getter]
    fn n_questions(&self) -> usize {
        self.inner.n_questions()
    }

    #[getter]
    fn model_names(&self) -> Vec<String> {
        self.inner.model_names().to_vec()
    }

    #[getter]
    fn has_key_signal(&self) -> bool {
        self.inner.has_key_signal()
    }

    fn question_id(&self, q: usize) -> PyResult<String> {
        self.check_question(q)?;
        Ok(self.inner.question(q).id.clone())
    }

    fn alphabet(&self, q: usize) -> PyResult<Vec<String>> {
        self.check_question(q)?;
        Ok(self.inner.question(q).alphabet.clone())
    }

    fn label(&self, proposer: usize, q: usize) -> PyResult<String> {
        self.check_cell(proposer, q)?;
        Ok(self.inner.label_str(proposer, q).to_string())
    }

    fn truth(&self, q: usize) -> PyResult<String> {
        self.check_question(q)?;
        Ok(self.inner.truth_str(q).to_string())
    }

    /// (model, prompt) pair for a flat index.
    fn proposer(&self, flat: usize) -> (usize, usize) {
        let id = ProposerId::from_flat(flat, self.inner.n_prompts());
        (id.model, id.prompt)
    }

    /// Empirical accuracy over a question set (all questions if None).
    #[pyo3(signature = (proposer, qs = None))]
    fn proposer_accuracy(&self, proposer: usize, qs: Option<Vec<usize>>) -> PyResult<f64> {
        let qs = qs.unwrap_or_else(|| (0..self.inner.n_questions()).collect());
        self.inner.accuracy_flat(proposer, &qs).map_err(to_py_err)
    }

    /// How many of `set` answer question `q` correctly.
    fn correct_count(&self, set: Vec<usize>, q: usize) -> PyResult<usize> {
        self.check_question(q)?;
        Ok(self.inner.correct_count(&set, q))
    }

    #[pyo3(signature = (path, format = "jsonl"))]
    fn save(&self, path: &str, format: &str) -> PyResult<()> {
        propsel::save_dataset(
            &self.inner,
            std::path::Path::new(path),
            parse_format(format)?,
        )
        .map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset({} models x {} prompts, {} questions)",
            self.inner.n_models(),
            self.inner.n_prompts(),
            self.inner.n_questions()
        )
    }
}

impl Dataset {
    fn check_question(&self, q: usize) -> PyResult<()> {
        if q >= self.inner.n_questions() {
            return Err(PyValueError::new_err(format!("question {q} out of range")));
        }
        Ok(())
    }

    fn check_cell(&self, p: usize, q: usize) -> PyResult<()> {
        self.check_question(q)?;
        if p >= self.inner.n_proposers() {
            return Err(PyValueError::new_err(format!("proposer {p} out of range")));
        }
        Ok(())
    }
}

/// Train / val / test question partitions.
#[pyclass(frozen)]
struct Split {
    inner: propsel::Split,
}

#[pymethods]
impl Split {
    #[getter]
    fn train(&self) -> Vec<usize> {
        self.inner.train.clone()
    }

    #[getter]
    fn val(&self) -> Vec<usize> {
        self.inner.val.clone()
    }

    #[getter]
    fn test(&self) -> Vec<usize> {
        self.inner.test.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Split(train = {}, val = {}, test = {})",
            self.inner.train.len(),
            self.inner.val.len(),
            self.inner.test.len()
        )
    }
}

#[pyfunction]
fn make_split(ds: &Dataset, labeled_fraction: f64, train_fraction: f64, seed: u64) -> PyResult<Split> {
    let inner = propsel::make_split(&ds.inner, labeled_fraction, train_fraction, seed)
        .map_err(to_py_err)?;
    Ok(Split { inner })
}

/// A summarizer with its query ledger.
#[pyclass(frozen)]
struct Oracle {
    inner: SummarizerOracle,
    policy: PresentationPolicy,
}

impl Oracle {
    fn simulated(behavior: propsel::Behavior, seed: u64) -> Self {
        Oracle {
            inner: SummarizerOracle::new(behavior, seed),
            policy: PresentationPolicy::default(),
        }
    }
}

#[pymethods]
impl Oracle {
    #[classmethod]
    #[pyo3(signature = (seed = 0))]
    fn majority(_cls: &Bound<'_, PyType>, seed: u64) -> Self {
        Oracle::simulated(propsel::Behavior::Majority, seed)
    }

    /// Log-odds weighted majority; weights come from accuracies on the
    /// given question set.
    #[classmethod]
    #[pyo3(signature = (weight_questions, seed = 0))]
    fn weighted_majority(_cls: &Bound<'_, PyType>, weight_questions: Vec<usize>, seed: u64) -> Self {
        Oracle::simulated(propsel::Behavior::WeightedMajority { weight_questions }, seed)
    }

    /// `curve[c]` is the chance of a correct answer when exactly `c`
    /// selected proposers are correct.
    #[classmethod]
    #[pyo3(signature = (curve, seed = 0))]
    fn count_curve(_cls: &Bound<'_, PyType>, curve: Vec<f64>, seed: u64) -> PyResult<Self> {
        if curve.is_empty() || curve.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(PyValueError::new_err("curve entries must be in [0, 1]"));
        }
        Ok(Oracle::simulated(propsel::Behavior::CountCurve { curve }, seed))
    }

    /// Exact posterior rule for the keyed-XOR pool.
    #[classmethod]
    #[pyo3(signature = (seed = 0, rho = 0.9, p3 = 0.8, p4 = 0.8))]
    fn bayes_prop1(_cls: &Bound<'_, PyType>, seed: u64, rho: f64, p3: f64, p4: f64) -> Self {
        Oracle::simulated(
            propsel::Behavior::KeyedBayes {
                joint: XorPairJoint::new(rho, p3, p4),
            },
            seed,
        )
    }

    #[getter]
    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }

    /// Aggregate the selected responses on one question.
    #[pyo3(signature = (ds, set, q, rep = 0))]
    fn summarize(&self, ds: &Dataset, set: Vec<usize>, q: usize, rep: u64) -> PyResult<String> {
        let label = self
            .inner
            .summarize_rep(&ds.inner, &set, q, &self.policy, rep)
            .map_err(to_py_err)?;
        Ok(ds.inner.question(q).alphabet[label as usize].clone())
    }

    /// Mean correctness over qs x repeats; consumes exactly
    /// len(qs) * repeats queries.
    #[pyo3(signature = (ds, set, qs, repeats = 1))]
    fn accuracy_of(
        &self,
        py: Python<'_>,
        ds: &Dataset,
        set: Vec<usize>,
        qs: Vec<usize>,
        repeats: u32,
    ) -> PyResult<f64> {
        py.detach(|| self.inner.accuracy_of(&ds.inner, &set, &qs, &self.policy, repeats))
            .map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("Oracle(queries = {})", self.inner.query_count())
    }
}

/// Outcome of one selection run.
#[pyclass(frozen)]
struct Selection {
    selected: Vec<usize>,
    queries_used: u64,
    seed: u64,
    trace_json: String,
}

impl Selection {
    fn from_result(r: SelectionResult) -> Self {
        Selection {
            selected: r.selected.clone(),
            queries_used: r.queries_used,
            seed: r.seed,
            trace_json: serde_json::to_string(&r.trace).expect("trace serializes"),
        }
    }
}

#[pymethods]
impl Selection {
    #[getter]
    fn selected(&self) -> Vec<usize> {
        self.selected.clone()
    }

    #[getter]
    fn queries_used(&self) -> u64 {
        self.queries_used
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.seed
    }

    /// Per-iteration candidate scores and choices, as JSON.
    fn trace_json(&self) -> String {
        self.trace_json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Selection(selected = {:?}, queries = {})",
            self.selected, self.queries_used
        )
    }
}

#[pyfunction]
#[pyo3(signature = (oracle, ds, split, k, seed = 0))]
fn standard_greedy(
    py: Python<'_>,
    oracle: &Oracle,
    ds: &Dataset,
    split: &Split,
    k: usize,
    seed: u64,
) -> PyResult<Selection> {
    let r = py
        .detach(|| {
            propsel::standard_greedy(&oracle.inner, &ds.inner, &split.inner, k, &oracle.policy, seed)
        })
        .map_err(to_py_err)?;
    Ok(Selection::from_result(r))
}

#[pyfunction]
#[pyo3(signature = (oracle, ds, split, k, seed = 0, train_fraction = 0.75, allow_repeated_models = true))]
fn model_first_greedy(
    py: Python<'_>,
    oracle: &Oracle,
    ds: &Dataset,
    split: &Split,
    k: usize,
    seed: u64,
    train_fraction: f64,
    allow_repeated_models: bool,
) -> PyResult<Selection> {
    let opts = ModelFirstOptions {
        train_fraction,
        allow_repeated_models,
    };
    let r = py
        .detach(|| {
            propsel::model_first_greedy(
                &oracle.inner,
                &ds.inner,
                &split.inner,
                k,
                &oracle.policy,
                seed,
                &opts,
            )
        })
        .map_err(to_py_err)?;
    Ok(Selection::from_result(r))
}

#[pyfunction]
#[pyo3(signature = (ds, split, k, m = 50, depth = 3, seed = 0))]
fn truth_prediction_greedy(
    py: Python<'_>,
    ds: &Dataset,
    split: &Split,
    k: usize,
    m: u32,
    depth: usize,
    seed: u64,
) -> PyResult<Selection> {
    let r = py
        .detach(|| propsel::truth_prediction_greedy(&ds.inner, &split.inner, k, m, depth, seed))
        .map_err(to_py_err)?;
    Ok(Selection::from_result(r))
}

#[pyfunction]
#[pyo3(signature = (oracle, ds, split, k, t_surrogate = 200, m = 50, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn oracle_surrogate_greedy(
    py: Python<'_>,
    oracle: &Oracle,
    ds: &Dataset,
    split: &Split,
    k: usize,
    t_surrogate: u32,
    m: u32,
    seed: u64,
) -> PyResult<Selection> {
    let r = py
        .detach(|| {
            propsel::oracle_surrogate_greedy(
                &oracle.inner,
                &ds.inner,
                &split.inner,
                k,
                t_surrogate,
                m,
                &oracle.policy,
                seed,
            )
        })
        .map_err(to_py_err)?;
    Ok(Selection::from_result(r))
}

/// Fit the count-curve surrogate; returns (values, interpolated_flags).
#[pyfunction]
#[pyo3(signature = (oracle, ds, train, k, t_surrogate = 200, seed = 0))]
fn fit_surrogate(
    py: Python<'_>,
    oracle: &Oracle,
    ds: &Dataset,
    train: Vec<usize>,
    k: usize,
    t_surrogate: u32,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<bool>)> {
    let curve = py
        .detach(|| {
            propsel::fit_surrogate(
                &oracle.inner,
                &ds.inner,
                &train,
                k,
                t_surrogate,
                &oracle.policy,
                seed,
            )
        })
        .map_err(to_py_err)?;
    Ok((curve.values, curve.interpolated))
}

/// Completion-sampled greedy over a Python score callable.
#[pyfunction]
#[pyo3(signature = (score, n, k, m = 50, seed = 0))]
fn k_greedy(
    py: Python<'_>,
    score: Py<PyAny>,
    n: usize,
    k: usize,
    m: u32,
    seed: u64,
) -> PyResult<Selection> {
    let err_slot = std::sync::Mutex::new(None::<PyErr>);
    let score_fn = |set: &[usize]| -> f64 {
        Python::attach(|py| {
            match score
                .call1(py, (set.to_vec(),))
                .and_then(|v| v.extract::<f64>(py))
            {
                Ok(v) => v,
                Err(e) => {
                    *err_slot.lock().unwrap() = Some(e);
                    f64::NEG_INFINITY
                }
            }
        })
    };
    let r = py.detach(|| propsel::k_greedy(score_fn, n, k, m, seed));
    if let Some(e) = err_slot.into_inner().unwrap() {
        return Err(e);
    }
    Ok(Selection::from_result(r.map_err(to_py_err)?))
}

/// Exact argmax over all size-k subsets of a Python score callable.
#[pyfunction]
#[pyo3(signature = (score, n, k, cap = 1_000_000))]
fn exhaustive_search(
    py: Python<'_>,
    score: Py<PyAny>,
    n: usize,
    k: usize,
    cap: u64,
) -> PyResult<Vec<usize>> {
    let mut first_err = None;
    let result = propsel::exhaustive_search(
        |set| {
            match score
                .call1(py, (set.to_vec(),))
                .and_then(|v| v.extract::<f64>(py))
            {
                Ok(v) => v,
                Err(e) => {
                    first_err.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        n,
        k,
        cap,
    );
    if let Some(e) = first_err {
        return Err(e);
    }
    result.map_err(to_py_err)
}

#[pyfunction]
fn input_all(ds: &Dataset) -> Vec<usize> {
    propsel::input_all(&ds.inner)
}

#[pyfunction]
#[pyo3(signature = (ds, train, rule = "mean_over_prompts"))]
fn best_model(ds: &Dataset, train: Vec<usize>, rule: &str) -> PyResult<Vec<usize>> {
    let rule = match rule {
        "mean_over_prompts" => propsel::BestModelRule::MeanOverPrompts,
        "best_prompt" => propsel::BestModelRule::BestPrompt,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown best_model rule {other:?}"
            )))
        }
    };
    propsel::best_model(&ds.inner, &train, rule).map_err(to_py_err)
}

#[pyfunction]
fn top_accuracy(ds: &Dataset, train: Vec<usize>, k: usize) -> PyResult<Vec<usize>> {
    propsel::top_accuracy(&ds.inner, &train, k).map_err(to_py_err)
}

#[pyfunction]
fn moa(ds: &Dataset, train: Vec<usize>) -> PyResult<Vec<usize>> {
    propsel::moa_per_model_top1(&ds.inner, &train).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (ds, train, k, tau = 0.4))]
fn conditioned_diversity(ds: &Dataset, train: Vec<usize>, k: usize, tau: f64) -> PyResult<Vec<usize>> {
    propsel::conditioned_diversity(&ds.inner, &train, k, tau).map_err(to_py_err)
}

#[pyfunction]
fn judge_topk(ds: &Dataset, train: Vec<usize>, k: usize) -> PyResult<Vec<usize>> {
    propsel::judge_topk(&ds.inner, &train, k).map_err(to_py_err)
}

/// Approximate Shapley selection; returns (selected, per-proposer values).
#[pyfunction]
#[pyo3(signature = (oracle, ds, train, k, z = 40, t_h = 20, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn approx_shapley(
    py: Python<'_>,
    oracle: &Oracle,
    ds: &Dataset,
    train: Vec<usize>,
    k: usize,
    z: u32,
    t_h: u32,
    seed: u64,
) -> PyResult<(Vec<usize>, Vec<f64>)> {
    let (selected, estimate) = py
        .detach(|| {
            propsel::approx_shapley(
                &oracle.inner,
                &ds.inner,
                &train,
                k,
                z,
                t_h,
                1..=(k.saturating_sub(1)),
                &oracle.policy,
                seed,
            )
        })
        .map_err(to_py_err)?;
    Ok((selected, estimate.values))
}

#[pyfunction]
#[pyo3(signature = (ds, set, q, weighted = false, train = None, seed = 0))]
fn majority_vote(
    ds: &Dataset,
    set: Vec<usize>,
    q: usize,
    weighted: bool,
    train: Option<Vec<usize>>,
    seed: u64,
) -> PyResult<String> {
    let variant = if weighted {
        propsel::VoteVariant::Weighted
    } else {
        propsel::VoteVariant::Plain
    };
    let label = propsel::majority_vote(&ds.inner, &set, q, variant, train.as_deref(), seed)
        .map_err(to_py_err)?;
    Ok(ds.inner.question(q).alphabet[label as usize].clone())
}

#[pyfunction]
#[pyo3(signature = (ds, qs, pool = "all", weighted = false, train = None, seed = 0))]
fn majority_variants(
    ds: &Dataset,
    qs: Vec<usize>,
    pool: &str,
    weighted: bool,
    train: Option<Vec<usize>>,
    seed: u64,
) -> PyResult<f64> {
    let pool = match pool {
        "all" => propsel::PoolVariant::All,
        "best_prompt_per_model" => propsel::PoolVariant::BestPromptPerModel,
        "best_model_per_prompt" => propsel::PoolVariant::BestModelPerPrompt,
        other => return Err(PyValueError::new_err(format!("unknown pool {other:?}"))),
    };
    let train = train.unwrap_or_else(|| (0..ds.inner.n_questions()).collect());
    propsel::majority_variants(&ds.inner, &qs, pool, weighted, &train, seed).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (ds, split, depth = 3))]
fn decision_tree_baseline(ds: &Dataset, split: &Split, depth: usize) -> f64 {
    propsel::decision_tree_baseline(&ds.inner, &split.inner, depth)
}

/// Histogram of correct counts plus the conditional-accuracy curve.
/// Returns (histogram, conditional_accuracy, bin_counts).
#[pyfunction]
#[pyo3(signature = (ds, set, qs, oracle, pool_conditional = false, pooled_samples = 2000, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn count_profile(
    py: Python<'_>,
    ds: &Dataset,
    set: Vec<usize>,
    qs: Vec<usize>,
    oracle: &Oracle,
    pool_conditional: bool,
    pooled_samples: u32,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<Option<f64>>, Vec<u64>)> {
    let profile = py
        .detach(|| {
            propsel::count_profile(
                &ds.inner,
                &set,
                &qs,
                &oracle.inner,
                &oracle.policy,
                pool_conditional,
                pooled_samples,
                seed,
            )
        })
        .map_err(to_py_err)?;
    Ok((
        profile.histogram,
        profile.conditional_accuracy,
        profile.bin_counts,
    ))
}

/// Closed-form selection query count for a method.
#[pyfunction]
#[pyo3(signature = (method, n_llm = None, n_prompt = None, k = None, m = None, z = None, t_h = None, t_surrogate = None))]
#[allow(clippy::too_many_arguments)]
fn query_complexity(
    method: &str,
    n_llm: Option<u64>,
    n_prompt: Option<u64>,
    k: Option<u64>,
    m: Option<u64>,
    z: Option<u64>,
    t_h: Option<u64>,
    t_surrogate: Option<u64>,
) -> PyResult<u64> {
    let params = ComplexityParams {
        n_llm,
        n_prompt,
        k,
        m,
        z,
        t_h,
        t_surrogate,
    };
    propsel::query_complexity(method, &params).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (set, rho = 0.9, p3 = 0.8, p4 = 0.8))]
fn prop1_accuracy(set: Vec<usize>, rho: f64, p3: f64, p4: f64) -> PyResult<f64> {
    XorPairJoint::new(rho, p3, p4)
        .exact_accuracy(&set)
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (set, rho = 0.9, p3 = 0.8, p4 = 0.8))]
fn prop1_mutual_information(set: Vec<usize>, rho: f64, p3: f64, p4: f64) -> PyResult<f64> {
    XorPairJoint::new(rho, p3, p4)
        .mutual_information(&set)
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (i, j, rho = 0.9, p3 = 0.8, p4 = 0.8))]
fn prop1_disagreement(i: usize, j: usize, rho: f64, p3: f64, p4: f64) -> PyResult<f64> {
    XorPairJoint::new(rho, p3, p4)
        .disagreement(i, j)
        .map_err(to_py_err)
}

/// The pairs picked by the accuracy-first, mutual-information, and
/// max-disagreement rules, as a dict.
#[pyfunction]
#[pyo3(signature = (rho = 0.9, p3 = 0.8, p4 = 0.8))]
fn prop1_heuristic_pairs(
    py: Python<'_>,
    rho: f64,
    p3: f64,
    p4: f64,
) -> PyResult<Py<pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let joint = XorPairJoint::new(rho, p3, p4);
    let dict = PyDict::new(py);
    dict.set_item("accuracy_first", joint.accuracy_first_pair().to_vec())?;
    dict.set_item("mutual_information", joint.mutual_information_pair().to_vec())?;
    dict.set_item("max_disagreement", joint.max_disagreement_pair().to_vec())?;
    Ok(dict.into())
}

/// Run a full experiment config (JSON text); returns the selection
/// records as a JSON array string.
#[pyfunction]
fn run_config(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg = propsel::ExperimentConfig::from_json(config_json).map_err(to_py_err)?;
    let records = py.detach(|| propsel::run_select(&cfg)).map_err(to_py_err)?;
    serde_json::to_string_pretty(&records).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn propsel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Dataset>()?;
    m.add_class::<Split>()?;
    m.add_class::<Oracle>()?;
    m.add_class::<Selection>()?;
    m.add_function(wrap_pyfunction!(make_split, m)?)?;
    m.add_function(wrap_pyfunction!(standard_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(model_first_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(truth_prediction_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_surrogate_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(fit_surrogate, m)?)?;
    m.add_function(wrap_pyfunction!(k_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_search, m)?)?;
    m.add_function(wrap_pyfunction!(input_all, m)?)?;
    m.add_function(wrap_pyfunction!(best_model, m)?)?;
    m.add_function(wrap_pyfunction!(top_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(moa, m)?)?;
    m.add_function(wrap_pyfunction!(conditioned_diversity, m)?)?;
    m.add_function(wrap_pyfunction!(judge_topk, m)?)?;
    m.add_function(wrap_pyfunction!(approx_shapley, m)?)?;
    m.add_function(wrap_pyfunction!(majority_vote, m)?)?;
    m.add_function(wrap_pyfunction!(majority_variants, m)?)?;
    m.add_function(wrap_pyfunction!(decision_tree_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(count_profile, m)?)?;
    m.add_function(wrap_pyfunction!(query_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(prop1_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(prop1_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(prop1_disagreement, m)?)?;
    m.add_function(wrap_pyfunction!(prop1_heuristic_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
