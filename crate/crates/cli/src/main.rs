//! Single binary driving the selection pipeline: generate or load data,
//! run the configured selection methods, evaluate them on the test
//! split, print the counterexample analytics, the query-complexity
//! table, and merge evaluation outputs into reports.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use propsel::{
    emit_report, query_complexity, run_evaluate, run_select, save_dataset, ComplexityParams,
    EvaluationEnvelope, ExperimentConfig, FileFormat, PlantedPoolSpec, ReportFormat, ReportTable,
    SelectionRecord, XorPairJoint,
};

#[derive(Parser)]
#[command(name = "propsel", version, about = "Proposer selection for summarizer ensembles")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured selection method and write one result file
    /// per method.
    Select,
    /// Evaluate selection files on the test split.
    Evaluate {
        /// Directory holding `<method>.selection.json` files (defaults
        /// to --out).
        #[arg(long)]
        selections: Option<PathBuf>,
    },
    /// Print exact analytics for the built-in keyed-XOR counterexample
    /// pool.
    Prop1 {
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value_t = 0.8)]
        p3: f64,
        #[arg(long, default_value_t = 0.8)]
        p4: f64,
    },
    /// Print the closed-form selection query counts.
    Complexity {
        #[arg(long)]
        n_llm: Option<u64>,
        #[arg(long)]
        n_prompt: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        /// Train questions scored per model per iteration.
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        z: Option<u64>,
        #[arg(long)]
        t_h: Option<u64>,
        #[arg(long)]
        t_surrogate: Option<u64>,
        /// Restrict to one method.
        #[arg(long)]
        method: Option<String>,
    },
    /// Merge evaluation outputs into a CSV/JSON report.
    Report {
        /// Evaluation files produced by `evaluate`.
        inputs: Vec<PathBuf>,
    },
    /// Generate a synthetic dataset and write it with its sidecars.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 1000)]
        questions: usize,
        /// Output file name inside --out.
        #[arg(long, default_value = "dataset.jsonl")]
        name: String,
        #[arg(long, value_enum, default_value_t = DataFormat::Jsonl)]
        dataset_format: DataFormat,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value_t = 0.8)]
        p3: f64,
        #[arg(long, default_value_t = 0.8)]
        p4: f64,
        /// Planted-pool spec (JSON file), for --kind planted.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Extra independent proposer accuracies, for --kind xor.
        #[arg(long, value_delimiter = ',')]
        extras: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        gen_seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Prop1,
    Planted,
    Xor,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Jsonl,
    Csv,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn load_config(cli_config: &Option<PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let path = cli_config
        .as_ref()
        .context("this command needs --config <path>")?;
    let mut cfg = ExperimentConfig::from_path(path)
        .with_context(|| format!("loading config {}", path.display()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Select => {
            let cfg = load_config(&cli.config, cli.seed)?;
            std::fs::create_dir_all(&cli.out)?;
            let records = run_select(&cfg)?;
            for record in &records {
                let path = cli.out.join(format!("{}.selection.json", record.method));
                std::fs::write(&path, record.to_json())?;
                println!(
                    "{:<24} selected {:?}  queries {}",
                    record.method, record.selected, record.queries_used
                );
            }
            println!("wrote {} selection files to {}", records.len(), cli.out.display());
            Ok(())
        }
        Command::Evaluate { selections } => {
            let cfg = load_config(&cli.config, cli.seed)?;
            let dir = selections.unwrap_or_else(|| cli.out.clone());
            let mut records = Vec::new();
            for spec in &cfg.methods {
                let path = dir.join(format!("{}.selection.json", spec.name));
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("missing selection file {}", path.display()))?;
                records.push(SelectionRecord::from_json(&text)?);
            }
            let outcomes = run_evaluate(&cfg, &records)?;
            let ds = cfg.materialize_dataset()?;
            let envelope = EvaluationEnvelope {
                model_names: ds.model_names().to_vec(),
                n_prompts: ds.n_prompts(),
                outcomes,
            };
            std::fs::create_dir_all(&cli.out)?;
            let out_path = cli.out.join("evaluation.json");
            std::fs::write(&out_path, envelope.to_json())?;
            for o in &envelope.outcomes {
                println!(
                    "{:<24} accuracy {:.4}  queries {}",
                    o.method, o.accuracy, o.queries
                );
            }
            println!("wrote {}", out_path.display());
            Ok(())
        }
        Command::Prop1 { rho, p3, p4 } => {
            print_counterexample(rho, p3, p4)
        }
        Command::Complexity {
            n_llm,
            n_prompt,
            k,
            m,
            z,
            t_h,
            t_surrogate,
            method,
        } => {
            let params = ComplexityParams {
                n_llm,
                n_prompt,
                k,
                m,
                z,
                t_h,
                t_surrogate,
            };
            let methods: Vec<&str> = match &method {
                Some(name) => vec![name.as_str()],
                None => propsel::analysis::COMPLEXITY_METHODS.to_vec(),
            };
            println!("{:<26} queries", "method");
            for name in methods {
                let queries = query_complexity(name, &params)?;
                println!("{name:<26} {queries}");
            }
            Ok(())
        }
        Command::Report { inputs } => {
            if inputs.is_empty() {
                bail!("report needs at least one evaluation file");
            }
            let mut model_names: Option<Vec<String>> = None;
            let mut n_prompts = 1usize;
            let mut outcomes = Vec::new();
            for path in &inputs {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let envelope = EvaluationEnvelope::from_json(&text)?;
                if let Some(names) = &model_names {
                    if *names != envelope.model_names {
                        bail!("evaluation files describe different pools");
                    }
                } else {
                    model_names = Some(envelope.model_names.clone());
                }
                n_prompts = envelope.n_prompts;
                outcomes.extend(envelope.outcomes);
            }
            let table = ReportTable::build(
                &outcomes,
                n_prompts,
                &model_names.unwrap_or_default(),
            );
            std::fs::create_dir_all(&cli.out)?;
            let (path, format) = match cli.format {
                Format::Csv => (cli.out.join("report.csv"), ReportFormat::Csv),
                Format::Json => (cli.out.join("report.json"), ReportFormat::Json),
            };
            emit_report(&table, format, &path)?;
            print!("{}", table.to_csv());
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Gen {
            kind,
            questions,
            name,
            dataset_format,
            rho,
            p3,
            p4,
            spec,
            extras,
            gen_seed,
        } => {
            let seed = cli.seed.unwrap_or(gen_seed);
            let ds = match kind {
                GenKind::Prop1 => XorPairJoint::new(rho, p3, p4).sample_dataset(questions, seed),
                GenKind::Planted => {
                    let path = spec.context("--kind planted needs --spec <json file>")?;
                    let text = std::fs::read_to_string(&path)?;
                    let spec: PlantedPoolSpec = serde_json::from_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    propsel::planted_pool(&spec, seed)?
                }
                GenKind::Xor => propsel::xor_pool(questions, &extras, seed),
            };
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join(&name);
            let format = match dataset_format {
                DataFormat::Jsonl => FileFormat::Jsonl,
                DataFormat::Csv => FileFormat::Csv,
            };
            save_dataset(&ds, &path, format)?;
            println!(
                "wrote {} ({} proposers x {} questions)",
                path.display(),
                ds.n_proposers(),
                ds.n_questions()
            );
            Ok(())
        }
    }
}

fn format_pair(pair: [usize; 2]) -> String {
    format!("{{{},{}}}", pair[0], pair[1])
}

fn print_counterexample(rho: f64, p3: f64, p4: f64) -> Result<()> {
    let joint = XorPairJoint::new(rho, p3, p4);
    println!("keyed-XOR counterexample pool (rho = {rho}, p3 = {p3}, p4 = {p4})");
    println!();
    println!("{:<8} {:>10} {:>12} {:>14}", "pair", "accuracy", "mi_bits", "disagreement");
    for i in 1..=4usize {
        for j in (i + 1)..=4 {
            println!(
                "{:<8} {:>10.6} {:>12.6} {:>14.6}",
                format_pair([i, j]),
                joint.exact_accuracy(&[i, j])?,
                joint.mutual_information(&[i, j])?,
                joint.disagreement(i, j)?,
            );
        }
    }
    println!();
    println!("heuristic selections:");
    println!("  accuracy_first      -> {}", format_pair(joint.accuracy_first_pair()));
    println!("  mutual_information  -> {}", format_pair(joint.mutual_information_pair()));
    println!("  max_disagreement    -> {}", format_pair(joint.max_disagreement_pair()));
    Ok(())
}
