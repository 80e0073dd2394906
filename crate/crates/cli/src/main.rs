//! `curvlab`: curvature tensors of expression-defined metrics and Weyl
//! structures, and verification suites for the Weyl-tensor coincidence
//! theorem.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use curvlab::catalog;
use curvlab::parallel::Execution;
use curvlab::sampling::DEFAULT_SEED;
use curvlab::specfile::MetricSpec;
use curvlab::subject::{evaluate, Subject};
use curvlab::theorems::{run_suite, RunConfig, Suite};

#[derive(Debug, Parser)]
#[command(name = "curvlab", version)]
#[command(about = "Projective and conformal Weyl tensors of metrics and Weyl structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every curvature tensor at one point.
    Compute {
        #[command(flatten)]
        source: Source,

        /// Parameter overrides, e.g. `--params M=1 a=0.5`.
        #[arg(long, num_args = 1.., value_name = "K=V", value_parser = parse_param)]
        params: Vec<(String, f64)>,

        /// Comma-separated coordinates of the point.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        point: Point,

        /// Write the JSON document here instead of stdout.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        /// coincidence, invariance, bianchi, traces, lowdim, nurowski,
        /// schouten-law or all.
        #[arg(value_parser = |s: &str| s.parse::<Suite>())]
        suite: Suite,

        #[command(flatten)]
        source: Source,

        /// Sample points per entry and check.
        #[arg(long, default_value_t = 10)]
        samples: usize,

        /// PRNG seed; defaults to $CURVLAB_SEED, then 42.
        #[arg(long, env = "CURVLAB_SEED")]
        seed: Option<u64>,

        /// Factor applied to every upper-bound tolerance.
        #[arg(long, value_name = "X")]
        tol: Option<f64>,

        /// Write the full JSON report here.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,

        /// Evaluate points one at a time instead of in parallel.
        #[arg(long)]
        sequential: bool,
    },
    /// List or show built-in entries.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// Entry ids with dimension and classification tag.
    List,
    /// The entry's spec JSON.
    Show { id: String },
}

#[derive(Debug, clap::Args)]
struct Source {
    /// Catalog entry id (`all` for every entry when verifying).
    #[arg(long, conflicts_with = "spec", value_name = "ID")]
    catalog: Option<String>,

    /// Metric spec JSON file.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|x| {
            let v: f64 = x
                .trim()
                .parse()
                .map_err(|_| format!("`{x}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{x}` is not finite"))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Point)
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected K=V, got `{s}`"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn load_spec(path: &Path) -> Result<MetricSpec> {
    let spec = MetricSpec::load(path)?;
    spec.validate()
        .with_context(|| format!("in {}", path.display()))?;
    Ok(spec)
}

fn spec_id(path: &Path, spec: &MetricSpec) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.label.clone())
}

fn single_subject(source: &Source, overrides: &BTreeMap<String, f64>) -> Result<Subject> {
    match (&source.catalog, &source.spec) {
        (Some(id), None) => Ok(catalog::subject(id, overrides)?),
        (None, Some(path)) => {
            let spec = load_spec(path)?;
            Ok(spec.to_subject(&spec_id(path, &spec), overrides)?)
        }
        _ => bail!("give exactly one of --catalog ID or --spec FILE"),
    }
}

fn subjects(source: &Source) -> Result<Vec<Subject>> {
    let none = BTreeMap::new();
    match (&source.catalog, &source.spec) {
        (Some(id), None) if id == "all" => Ok(catalog::all_subjects(&none)?),
        (None, None) => Ok(catalog::all_subjects(&none)?),
        _ => Ok(vec![single_subject(source, &none)?]),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn compute(
    source: &Source,
    params: &[(String, f64)],
    point: &Point,
    json: Option<&Path>,
) -> Result<ExitCode> {
    let overrides: BTreeMap<String, f64> = params.iter().cloned().collect();
    let subject = single_subject(source, &overrides)?;
    if point.0.len() != subject.dim() {
        bail!(
            "point has {} coordinates, {} needs {}",
            point.0.len(),
            subject.id,
            subject.dim()
        );
    }
    let eval = evaluate(&subject.structure, &point.0)
        .with_context(|| format!("cannot evaluate {} at {:?}", subject.id, point.0))?;
    let doc = output::compute_document(&subject, &eval);
    match json {
        Some(path) => {
            write_json(path, &doc)?;
            print!("{}", output::summary(&doc));
        }
        None => println!("{}", serde_json::to_string_pretty(&doc)?),
    }
    Ok(ExitCode::SUCCESS)
}

struct VerifyArgs<'a> {
    suite: Suite,
    source: &'a Source,
    samples: usize,
    seed: Option<u64>,
    tol: Option<f64>,
    json: Option<&'a Path>,
    sequential: bool,
}

fn verify(args: VerifyArgs<'_>) -> Result<ExitCode> {
    if args.samples == 0 {
        bail!("--samples must be at least 1");
    }
    if let Some(t) = args.tol {
        if !(t.is_finite() && t > 0.0) {
            bail!("--tol must be a positive number");
        }
    }
    let subjects = if args.suite.uses_subjects() {
        subjects(args.source)?
    } else {
        Vec::new()
    };
    let mut cfg = RunConfig::new(args.seed.unwrap_or(DEFAULT_SEED), args.samples);
    cfg.tolerance_factor = args.tol;
    if args.sequential {
        cfg.execution = Execution::Sequential;
    }
    let report = run_suite(args.suite, &subjects, &cfg)?;
    print!("{}", report.summary_table());
    if let Some(path) = args.json {
        write_json(path, &report)?;
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn catalog_cmd(action: &CatalogAction) -> Result<ExitCode> {
    match action {
        CatalogAction::List => {
            for id in catalog::IDS {
                let spec = catalog::spec(id).expect("listed id exists");
                let tag = spec
                    .classification
                    .map(|c| serde_json::to_value(c).expect("tag serializes"))
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                println!("{id:<16} n={} {tag:<15} {}", spec.dimension, spec.label);
            }
        }
        CatalogAction::Show { id } => {
            let spec = catalog::spec(id).ok_or_else(|| anyhow!("unknown catalog entry `{id}`"))?;
            println!("{}", spec.to_json_pretty());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Compute {
            source,
            params,
            point,
            json,
        } => compute(source, params, point, json.as_deref()),
        Command::Verify {
            suite,
            source,
            samples,
            seed,
            tol,
            json,
            sequential,
        } => verify(VerifyArgs {
            suite: *suite,
            source,
            samples: *samples,
            seed: *seed,
            tol: *tol,
            json: json.as_deref(),
            sequential: *sequential,
        }),
        Command::Catalog { action } => catalog_cmd(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
