use std::fmt::Write as _;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ontoqual_core::engine::{eval_pack, EngineContext};
use ontoqual_core::expertise::{tweet_expert_scores, ExpertiseConfig, ProfileArchive};
use ontoqual_core::lexicon::HashEmbedder;
use ontoqual_core::onto::{build_view, enrichment_diff, OntologyView};
use ontoqual_core::rdf::parse_turtle;
use ontoqual_core::regress::{
    cv_evaluate, parse_examples, training_curve, EvalSet, FoldPlan, Gold, Model, TrainingExample,
};
use ontoqual_core::rules::{default_pack, load_rule_pack, Priority};
use ontoqual_core::synthetic::{generate, Domain};
use ontoqual_core::validation::{finalize, latest_matrix, parse_log};
use ontoqual_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "ontoqual", version, about = "Ontology quality evaluation: syntactic rules and crowd validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(clap::Args)]
struct ExpertiseArgs {
    /// Domain keywords, comma separated or repeated.
    #[arg(long, value_delimiter = ',', required = true)]
    keywords: Vec<String>,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    m: usize,
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long = "k-prime", default_value_t = 5)]
    k_prime: usize,
}

impl ExpertiseArgs {
    fn config(&self) -> ExpertiseConfig {
        ExpertiseConfig {
            n: self.n,
            m: self.m,
            k: self.k,
            k_prime: self.k_prime,
            domain_keywords: self.keywords.iter().map(|k| k.trim().to_owned()).collect(),
        }
    }
}

#[derive(clap::Args)]
struct CvArgs {
    #[arg(long)]
    examples: PathBuf,
    #[arg(long)]
    decisions: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value_t = 7)]
    folds: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "linear,knn,svr")]
    regressors: Vec<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a rule pack against an ontology. Exits 1 when any
    /// High-priority violation is found, 2 on errors.
    Syn {
        ontology: PathBuf,
        /// Rule pack; the bundled default pack when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print the IRIs of elements present in ENRICHED but not in BASE.
    Diff { base: PathBuf, enriched: PathBuf },
    /// Compute expertise features and scores for validator handles.
    Expertise {
        #[arg(long)]
        archive: PathBuf,
        #[command(flatten)]
        expertise: ExpertiseArgs,
        /// Trained model JSON; the feature mean when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        handles: Vec<String>,
    },
    /// Weighted vote over a decision log.
    Finalize {
        #[arg(long)]
        decisions: PathBuf,
        #[arg(long)]
        archive: PathBuf,
        #[command(flatten)]
        expertise: ExpertiseArgs,
        /// linear, knn, svr, forest, identity or majority.
        #[arg(long, default_value = "svr")]
        regressor: String,
        /// Training examples for regressors that need fitting.
        #[arg(long)]
        train: Option<PathBuf>,
        /// Trained model JSON, used instead of --regressor.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Cross-validated accuracy of each regressor against the naive majority.
    Cv(CvArgs),
    /// Fit a regressor and write the model JSON.
    Fit {
        #[arg(long)]
        examples: PathBuf,
        #[arg(long, default_value = "svr")]
        regressor: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean accuracy on an evaluation set as the training set grows.
    Curve {
        #[arg(long)]
        train: PathBuf,
        #[arg(long = "eval-examples")]
        eval_examples: PathBuf,
        #[arg(long)]
        decisions: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value = "svr")]
        regressor: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Write a synthetic validation dataset.
    Synth {
        #[arg(long, default_value = "pizza")]
        domain: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "ONTOQUAL_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long = "data-dir", env = "ONTOQUAL_DATA_DIR", default_value = "ontoqual-data")]
        data_dir: PathBuf,
        #[arg(long = "admin-token", env = "ONTOQUAL_ADMIN_TOKEN")]
        admin_token: Option<String>,
        /// Default rule pack for syntactic reports.
        #[arg(long, env = "ONTOQUAL_RULES")]
        rules: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_view(path: &Path) -> Result<OntologyView> {
    let graph = parse_turtle(&read(path)?, None).with_context(|| path.display().to_string())?;
    Ok(build_view(graph))
}

fn load_examples(path: &Path) -> Result<Vec<TrainingExample>> {
    parse_examples(&read(path)?).with_context(|| path.display().to_string())
}

fn load_gold(path: &Path) -> Result<Gold> {
    serde_json::from_str(&read(path)?).with_context(|| path.display().to_string())
}

fn load_archive(path: &Path) -> Result<ProfileArchive> {
    ProfileArchive::from_json(&read(path)?).with_context(|| path.display().to_string())
}

fn load_model(path: &Path) -> Result<Model> {
    let model = Model::from_json(&read(path)?).with_context(|| path.display().to_string())?;
    if !model.is_trained() {
        bail!("{}: model is not trained", path.display());
    }
    Ok(model)
}

/// Writes to stdout. A closed pipe ends output quietly.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn ontology_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn syn(ontology: &Path, rules: Option<&Path>, format: Format) -> Result<ExitCode> {
    let pack = match rules {
        Some(path) => load_rule_pack(&read(path)?).with_context(|| path.display().to_string())?,
        None => default_pack(),
    };
    let view = load_view(ontology)?;
    let report = eval_pack(&ontology_name(ontology), &pack, &view, &EngineContext::default());
    match format {
        Format::Json => emit(&(report.to_json() + "\n"))?,
        Format::Table => emit(&report.to_table())?,
    }
    if report.has_errors() {
        eprintln!("error: some rules could not be evaluated");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::from(u8::from(report.count(Priority::High) > 0)))
}

fn diff(base: &Path, enriched: &Path) -> Result<()> {
    let view = enrichment_diff(&load_view(base)?, &load_view(enriched)?);
    let iris: Vec<String> = view.enriched_elements().map(|e| e.iri.to_string()).collect();
    emit(&(serde_json::to_string_pretty(&iris)? + "\n"))?;
    Ok(())
}

fn fraction_table(rows: &[(String, f64, f64)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<34} {:>10} {:>10}", "Model", "Validation", "Test");
    for (name, val, test) in rows {
        let _ = writeln!(out, "{:<34} {:>10.2} {:>10.2}", name, val * 100.0, test * 100.0);
    }
    out
}

fn cv(args: &CvArgs) -> Result<String> {
    let CvArgs { examples, decisions, gold, folds, seed, regressors, format } = args;
    let (folds, seed) = (*folds, *seed);
    let examples = load_examples(examples)?;
    let gold = load_gold(gold)?;
    let items: Vec<String> = gold.keys().cloned().collect();
    let log = parse_log(&read(decisions)?).with_context(|| decisions.display().to_string())?;
    let matrix = latest_matrix(&log, Some(&items));
    let plan = FoldPlan::new(examples.len(), folds, seed)?;
    let mut results = vec![("naive majority".to_owned(), cv_evaluate(&examples, &matrix, &gold, &Model::Uniform, &plan)?)];
    for name in regressors {
        let model = Model::from_name(name, seed)?;
        results.push((model.describe(), cv_evaluate(&examples, &matrix, &gold, &model, &plan)?));
    }
    match format {
        Format::Json => {
            let plan_json: Vec<_> = (0..plan.k())
                .map(|t| {
                    let r = plan.roles(t);
                    serde_json::json!({
                        "test": t,
                        "validation": r.validation,
                        "members": plan.folds[t].iter().map(|&i| examples[i].handle.clone()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let body = serde_json::json!({
                "folds": plan_json,
                "results": results.iter().map(|(_, r)| r).collect::<Vec<_>>(),
            });
            Ok(serde_json::to_string_pretty(&body)? + "\n")
        }
        Format::Table => {
            let mut out = format!("Fold plan ({} folds):\n", plan.k());
            for t in 0..plan.k() {
                let members: Vec<&str> = plan.folds[t].iter().map(|&i| examples[i].handle.as_str()).collect();
                let _ = writeln!(out, "  test {t}  validation {}  [{}]", plan.roles(t).validation, members.join(", "));
            }
            out.push('\n');
            let rows: Vec<_> = results.iter().map(|(n, r)| (n.clone(), r.val_accuracy, r.test_accuracy)).collect();
            Ok(out + &fraction_table(&rows))
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Syn { ontology, rules, format } => return syn(&ontology, rules.as_deref(), format),
        Command::Diff { base, enriched } => diff(&base, &enriched)?,
        Command::Expertise { archive, expertise, model, handles } => {
            let archive = load_archive(&archive)?;
            let (_, missing) = archive.partition_handles(handles.iter().map(String::as_str));
            if !missing.is_empty() {
                bail!("handles without a readable profile: {}", missing.join(", "));
            }
            let model = match model {
                Some(path) => load_model(&path)?,
                None => Model::Identity,
            };
            let records = tweet_expert_scores(&handles, &archive, &expertise.config(), &HashEmbedder::default(), &model)?;
            emit(&(serde_json::to_string_pretty(&records)? + "\n"))?;
        }
        Command::Finalize { decisions, archive, expertise, regressor, train, model, seed } => {
            let log = parse_log(&read(&decisions)?).with_context(|| decisions.display().to_string())?;
            let archive = load_archive(&archive)?;
            let model = match model {
                Some(path) => load_model(&path)?,
                None => {
                    let examples = train.as_deref().map(load_examples).transpose()?;
                    Model::trained(&regressor, seed, examples.as_deref())
                        .map_err(|e| anyhow!("regressor `{regressor}`: {e}; pass --train or --model"))?
                }
            };
            let matrix = latest_matrix(&log, None);
            let result = finalize(&matrix, &archive, &expertise.config(), &HashEmbedder::default(), &model)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            emit(&(result.to_json() + "\n"))?;
        }
        Command::Cv(args) => emit(&cv(&args)?)?,
        Command::Fit { examples, regressor, seed, out } => {
            let examples = load_examples(&examples)?;
            let model = Model::from_name(&regressor, seed)?.fitted(&examples)?;
            match out {
                Some(path) => std::fs::write(&path, model.to_json() + "\n")
                    .with_context(|| format!("writing {}", path.display()))?,
                None => emit(&(model.to_json() + "\n"))?,
            }
        }
        Command::Curve { train, eval_examples, decisions, gold, fractions, trials, regressor, seed } => {
            let train = load_examples(&train)?;
            let gold = load_gold(&gold)?;
            let items: Vec<String> = gold.keys().cloned().collect();
            let log = parse_log(&read(&decisions)?).with_context(|| decisions.display().to_string())?;
            let eval = EvalSet { examples: load_examples(&eval_examples)?, matrix: latest_matrix(&log, Some(&items)), gold };
            let model = Model::from_name(&regressor, seed)?;
            let curve = training_curve(&train, &eval, &fractions, trials, &model, seed)?;
            emit(&(serde_json::to_string_pretty(&curve)? + "\n"))?;
        }
        Command::Synth { domain, seed, out } => {
            let domain = Domain::parse(&domain).ok_or_else(|| anyhow!("unknown domain `{domain}`; use pizza or security"))?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (name, body) in generate(domain, seed).files(&HashEmbedder::default())? {
                let path = out.join(name);
                std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Serve { addr, data_dir, admin_token, rules } => {
            if admin_token.is_none() {
                eprintln!("warning: no admin token configured; admin routes are open");
            }
            let config = ServiceConfig { data_dir, admin_token, default_rules: rules };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(ontoqual_service::serve(addr, config))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
