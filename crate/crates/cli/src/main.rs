mod config;
mod experiments;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use polariton_bjj::verify::{run_criterion, Status, CRITERIA};
use polariton_bjj::ModelParams;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "polariton-bjj", version, about = "Mean-field simulations of a one-side-pumped polariton junction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write its CSV files.
    Run { config: PathBuf },
    /// Run the acceptance criteria and print one line per criterion.
    Verify {
        /// JSON file whose `model` object replaces the default junction.
        config: Option<PathBuf>,
        /// Also write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// List the available experiments.
    ListExperiments,
}

fn run(path: &Path) -> Result<serde_json::Value> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(dir) = std::env::var_os("OUTPUT_DIR") {
        cfg.output_dir = PathBuf::from(dir);
    }
    let tables = experiments::run(&cfg.model, &cfg.experiment)?;
    let mut files = Vec::with_capacity(tables.len());
    for t in &tables {
        files.push((t.name.clone(), t.rows.len(), t.to_csv()?));
    }
    let resolved = serde_json::to_string_pretty(&cfg)? + "\n";
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, bytes: &[u8]| {
        let p = dir.join(name);
        std::fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))
    };
    for (name, _, bytes) in &files {
        write(name, bytes)?;
    }
    write("resolved_config.json", resolved.as_bytes())?;
    Ok(json!({
        "experiment": cfg.experiment.name(),
        "output_dir": dir.display().to_string(),
        "files": files.iter().map(|(n, r, _)| json!({"name": n, "rows": r})).collect::<Vec<_>>(),
    }))
}

fn verify_model(config: Option<&Path>) -> Result<ModelParams> {
    let Some(path) = config else { return Ok(ModelParams::default()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).context("invalid config")?;
    let model = match v.get("model") {
        Some(m) => serde_json::from_value(m.clone()).context("invalid model")?,
        None => ModelParams::default(),
    };
    model.validate().context("invalid model")?;
    Ok(model)
}

fn verify(config: Option<&Path>, report: Option<&Path>, only: &[u8]) -> Result<bool> {
    let model = verify_model(config)?;
    let ids: Vec<u8> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only.to_vec() };
    let mut all_ok = true;
    let mut out = Vec::new();
    for id in ids {
        let r = run_criterion(&model, id).with_context(|| format!("no criterion {id}"))?;
        println!("{r}");
        all_ok &= r.status != Status::Fail;
        out.push(json!({"id": r.id, "title": r.title, "status": r.status.as_str(), "detail": r.detail}));
    }
    if let Some(p) = report {
        let text = serde_json::to_string_pretty(&out)? + "\n";
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(all_ok)
}

fn fail(e: anyhow::Error) -> ExitCode {
    eprintln!("{}", json!({"error": format!("{e:#}")}));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => match run(&config) {
            Ok(summary) => {
                println!("{summary}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { config, report, only } => match verify(config.as_deref(), report.as_deref(), &only) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::FAILURE,
            Err(e) => fail(e),
        },
        Command::ListExperiments => {
            for (name, about) in config::EXPERIMENTS {
                println!("{name}\t{about}");
            }
            ExitCode::SUCCESS
        }
    }
}
