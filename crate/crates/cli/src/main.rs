//! Deterministic scenario runner: validates declarative configs, dispatches
//! to the signal library and writes reproducible CSV/JSON artifacts.

mod config;
mod scenarios;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// Exit codes: 0 success, 2 parse/schema error, 3 physics violation,
/// 4 I/O failure.
#[derive(Parser)]
#[command(name = "qspectro", version, about = "Quantum-light spectroscopy scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file against the schema and physics constraints.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute a scenario and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Worker threads (0 = all cores); results are identical either way.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Override the per-axis grid size of the scenario.
        #[arg(long)]
        grid_override: Option<usize>,
    },
    /// List the bundled scenario catalog.
    List,
}

fn load(path: &Path) -> Result<(config::Scenario, String)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let sc = config::parse(&text)?;
    Ok((sc, text))
}

fn digest(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Write atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, data: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, data).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<ExitCode> {
    let (sc, _) = match load(path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error (parse/schema): {e:#}");
            return Ok(ExitCode::from(2));
        }
    };
    let problems = config::validate(&sc);
    let hard = problems.iter().filter(|p| p.hard).count();
    let report = serde_json::json!({
        "id": sc.id,
        "problems": problems.iter().map(|p| serde_json::json!({
            "code": p.code, "message": p.message, "hard": p.hard,
        })).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    if hard > 0 {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(
    path: &Path,
    out_dir: &Path,
    threads: usize,
    grid_override: Option<usize>,
) -> Result<ExitCode> {
    let (mut sc, text) = match load(path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error (parse/schema): {e:#}");
            return Ok(ExitCode::from(2));
        }
    };
    let problems = config::validate(&sc);
    for p in problems.iter().filter(|p| !p.hard) {
        eprintln!("warning [{}]: {}", p.code, p.message);
    }
    if problems.iter().any(|p| p.hard) {
        for p in problems.iter().filter(|p| p.hard) {
            eprintln!("error [{}]: {}", p.code, p.message);
        }
        return Ok(ExitCode::from(3));
    }
    if let Some(n) = grid_override {
        sc.grid.points = n;
    }
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("thread pool")?;
    }
    if let Ok(cache) = std::env::var("QSPECTRO_CACHE_DIR") {
        // reserved for memoized kernels; only created and checked here
        fs::create_dir_all(&cache).with_context(|| format!("cache dir {cache}"))?;
    }

    let started = Instant::now();
    let out = scenarios::run(&sc)?;
    let elapsed = started.elapsed().as_secs_f64();

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let config_digest = digest(&text);
    let mut written = Vec::new();
    for mut map in out.maps {
        map.provenance.config_digest = config_digest.clone();
        let csv_path = out_dir.join(format!("{}.csv", map.name));
        write_atomic(&csv_path, &map.to_csv())?;
        let meta_path = out_dir.join(format!("{}.meta.json", map.name));
        write_atomic(&meta_path, &map.metadata_json())?;
        written.push(csv_path);
        written.push(meta_path);
    }
    let summary = serde_json::json!({
        "id": sc.id,
        "family": sc.family,
        "config_digest": config_digest,
        "units": scenarios::describe_units(),
        "results": out.summary,
    });
    let summary_path = out_dir.join(format!("{}.summary.json", sc.id));
    write_atomic(&summary_path, &serde_json::to_string_pretty(&summary)?)?;
    written.push(summary_path);

    // wall time stays out of the artifacts so re-runs are byte-identical
    eprintln!("completed {} in {elapsed:.2}s", sc.id);
    for p in &written {
        println!("{}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_list() -> Result<ExitCode> {
    for (id, text) in scenarios::catalog() {
        let sc =
            config::parse(text).with_context(|| format!("bundled scenario {id} failed to parse"))?;
        if config::validate(&sc).iter().any(|p| p.hard) {
            bail!("bundled scenario {id} fails validation");
        }
        println!("{:<22} {:<14} {}", sc.id, sc.family, sc.description);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { config } => cmd_validate(&config),
        Command::Run { config, out_dir, threads, grid_override } => {
            cmd_run(&config, &out_dir, threads, grid_override)
        }
        Command::List => cmd_list(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error (io/internal): {e:#}");
            ExitCode::from(4)
        }
    }
}
