//! `cem` command-line front end: train toy models, explain predictions,
//! and evaluate explanation effectiveness over CSV datasets.
//!
//! Outputs are canonicalized by example index, so identical inputs and seeds
//! produce byte-identical files regardless of the worker count.

pub mod dataset;
pub mod masks;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use cem_core::model::io;
use cem_core::{
    evaluate, explain_batch, eval::render_table, DenseAutoencoder, DenseNetwork, Error, Example,
    Explanation, Result, SolverConfig, SpaceSpec, TrainConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "cem",
    about = "Contrastive explanations (pertinent positives/negatives) for dense classifiers",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Train a dense classifier (and optionally an autoencoder) on a CSV dataset
    Train(TrainArgs),
    /// Write one explanation record per example (plus PP/PN masks for image data)
    Explain(ExplainArgs),
    /// Re-feed explanations through the model and report retention/switch rates
    Eval(EvalArgs),
}

/// Data-space bounds, uniform across features.
#[derive(Args, Debug, Clone)]
pub struct SpaceArgs {
    /// Lower feature bound of the data space
    #[arg(long, default_value_t = 0.0)]
    pub lo: f64,
    /// Upper feature bound of the data space
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    /// Per-feature "no signal" level
    #[arg(long, default_value_t = 0.0)]
    pub background: f64,
}

/// Solver settings (defaults follow the reference schedule).
#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Confidence margin of the hinge loss
    #[arg(long, default_value_t = 0.0)]
    pub kappa: f64,
    /// L1 weight of the elastic net
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Autoencoder penalty weight (requires --ae when > 0)
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Initial loss weight for the c-search
    #[arg(long, default_value_t = 0.1)]
    pub c0: f64,
    /// Number of c-search rounds
    #[arg(long, default_value_t = 9)]
    pub searches: usize,
    /// FISTA iterations per search
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Initial step size (decays as lr0/sqrt(k+1))
    #[arg(long, default_value_t = 0.01)]
    pub lr0: f64,
}

impl SolverArgs {
    fn to_config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            kappa: self.kappa,
            beta: self.beta,
            gamma: self.gamma,
            c0: self.c0,
            num_searches: self.searches,
            iterations: self.iters,
            lr0: self.lr0,
            seed,
        }
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training dataset (CSV rows: features..., integer label)
    #[arg(long)]
    pub data: PathBuf,
    /// Where to write the classifier weight file
    #[arg(long)]
    pub model: PathBuf,
    /// Also train an autoencoder and write it here
    #[arg(long)]
    pub ae: Option<PathBuf>,
    /// Hidden layer sizes of the classifier
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub hidden: Vec<usize>,
    /// Encoder layer sizes of the autoencoder (latent last; decoder mirrors)
    #[arg(long, value_delimiter = ',', default_value = "32,8")]
    pub ae_hidden: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    /// Learning rate of the trainer
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 16)]
    pub batch_size: usize,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    /// Classifier weight file
    #[arg(long)]
    pub model: PathBuf,
    /// Autoencoder weight file (required when --gamma > 0)
    #[arg(long)]
    pub ae: Option<PathBuf>,
    /// Input dataset (labels are advisory; the model's prediction is used)
    #[arg(long)]
    pub data: PathBuf,
    /// Output record file (one JSON object per line, ordered by example)
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Treat rows as RxC images and write PP/PN graymap masks per example
    #[arg(long, value_parser = parse_image_shape)]
    pub image_shape: Option<(usize, usize)>,
    /// Worker pool size for the parallel build (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Classifier weight file
    #[arg(long)]
    pub model: PathBuf,
    /// Autoencoder weight file (required when --gamma > 0)
    #[arg(long)]
    pub ae: Option<PathBuf>,
    /// Input dataset
    #[arg(long)]
    pub data: PathBuf,
    /// Output table (TSV); the summary record goes to `<out>.summary.json`
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Worker pool size for the parallel build (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_image_shape(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected RxC, got {s:?}"))?;
    let rows: usize = r.parse().map_err(|_| format!("invalid rows in {s:?}"))?;
    let cols: usize = c.parse().map_err(|_| format!("invalid cols in {s:?}"))?;
    if rows == 0 || cols == 0 {
        return Err(format!("image shape must be positive, got {s:?}"));
    }
    Ok((rows, cols))
}

/// Exit status classes: 2 config, 3 parse, 4 solver abort, 1 everything
/// else (0 is success).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::MissingAutoencoder | Error::DimensionMismatch { .. } => 2,
        Error::Parse { .. } | Error::EmptyDataset | Error::SingleClass => 3,
        Error::SolverAbort { .. } => 4,
        _ => 1,
    }
}

#[cfg(feature = "parallel")]
fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_pool<T>(_workers: usize, f: impl FnOnce() -> T) -> Result<T> {
    Ok(f())
}

fn load_models(
    model: &Path,
    ae: Option<&Path>,
    space: &SpaceArgs,
    gamma: f64,
) -> Result<(DenseNetwork, Option<DenseAutoencoder>)> {
    if gamma > 0.0 && ae.is_none() {
        return Err(Error::InvalidConfig(
            "--gamma > 0 requires --ae <autoencoder file>".into(),
        ));
    }
    let net = io::load_network(model)?;
    let auto = match ae {
        Some(path) => {
            let auto = io::load_autoencoder(path, Some((space.lo, space.hi)))?;
            if auto.input_dim() != net.input_dim() {
                return Err(Error::DimensionMismatch {
                    context: "autoencoder input".into(),
                    expected: net.input_dim(),
                    actual: auto.input_dim(),
                });
            }
            Some(auto)
        }
        None => None,
    };
    Ok((net, auto))
}

fn prepare_examples(net: &DenseNetwork, data: &Path, space: &SpaceArgs) -> Result<Vec<Example>> {
    let ds = dataset::load_dataset(data, Some(net.input_dim()), Some((space.lo, space.hi)))?;
    ds.features
        .into_iter()
        .enumerate()
        .map(|(i, x0)| Example::from_model(i.to_string(), x0, net))
        .collect()
}

fn mask_path(out: &Path, index: usize, mode: &str) -> PathBuf {
    let stem = out.with_extension("");
    PathBuf::from(format!("{}.ex{index:04}.{mode}.pgm", stem.display()))
}

fn write_masks(
    out: &Path,
    explanations: &[Explanation],
    shape: (usize, usize),
    space: &SpaceArgs,
) -> Result<()> {
    let (rows, cols) = shape;
    for (i, expl) in explanations.iter().enumerate() {
        let pp = masks::delta_to_pgm(&expl.pp.delta, rows, cols, space.lo, space.hi)?;
        fs::write(mask_path(out, i, "pp"), pp)?;
        let pn = masks::delta_to_pgm(&expl.pn.delta, rows, cols, space.lo, space.hi)?;
        fs::write(mask_path(out, i, "pn"), pn)?;
    }
    Ok(())
}

fn run_train(args: &TrainArgs) -> Result<()> {
    let ds = dataset::load_dataset(&args.data, None, Some((args.space.lo, args.space.hi)))?;
    let cfg = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.lr,
        batch_size: args.batch_size,
        seed: args.seed,
    };
    let (net, report) = cem_core::train_classifier(&ds.features, &ds.labels, &args.hidden, &cfg)?;
    io::save_network(&net, &args.model)?;
    println!(
        "trained classifier: {} examples, training accuracy {:.4}, saved to {}",
        ds.features.len(),
        report.final_accuracy,
        args.model.display()
    );
    if let Some(ae_path) = &args.ae {
        let clamp = Some((args.space.lo, args.space.hi));
        let (ae, ae_report) =
            cem_core::train_autoencoder(&ds.features, &args.ae_hidden, clamp, &cfg)?;
        io::save_autoencoder(&ae, ae_path)?;
        println!(
            "trained autoencoder: final epoch mse {:.6}, saved to {}",
            ae_report.epoch_losses.last().expect("epochs >= 1"),
            ae_path.display()
        );
    }
    Ok(())
}

fn run_explain(args: &ExplainArgs) -> Result<()> {
    let cfg = args.solver.to_config(args.seed);
    cfg.validate()?;
    let (net, ae) = load_models(&args.model, args.ae.as_deref(), &args.space, args.solver.gamma)?;
    let examples = prepare_examples(&net, &args.data, &args.space)?;
    if let Some((r, c)) = args.image_shape {
        if r * c != net.input_dim() {
            return Err(Error::InvalidConfig(format!(
                "--image-shape {r}x{c} does not match {} features",
                net.input_dim()
            )));
        }
    }
    let space = SpaceSpec::uniform(
        net.input_dim(),
        args.space.lo,
        args.space.hi,
        args.space.background,
    )?;

    let explanations = with_pool(args.workers, || {
        explain_batch(&examples, &net, ae.as_ref(), &cfg, &space)
    })??;

    let mut records = String::new();
    for expl in &explanations {
        records.push_str(&expl.record().to_json());
        records.push('\n');
    }
    fs::write(&args.out, records)?;
    if let Some(shape) = args.image_shape {
        write_masks(&args.out, &explanations, shape, &args.space)?;
    }

    let pn_ok = explanations.iter().filter(|e| e.pn.success).count();
    let pp_ok = explanations.iter().filter(|e| e.pp.success).count();
    println!(
        "explained {} examples (pn successes {}, pp successes {}), records in {}",
        explanations.len(),
        pn_ok,
        pp_ok,
        args.out.display()
    );
    Ok(())
}

fn run_eval(args: &EvalArgs) -> Result<()> {
    let cfg = args.solver.to_config(args.seed);
    cfg.validate()?;
    let (net, ae) = load_models(&args.model, args.ae.as_deref(), &args.space, args.solver.gamma)?;
    let examples = prepare_examples(&net, &args.data, &args.space)?;
    let space = SpaceSpec::uniform(
        net.input_dim(),
        args.space.lo,
        args.space.hi,
        args.space.background,
    )?;

    let report = with_pool(args.workers, || {
        evaluate(&examples, &net, ae.as_ref(), &cfg, &space)
    })??;

    fs::write(&args.out, render_table(&report))?;
    let summary_path = PathBuf::from(format!("{}.summary.json", args.out.display()));
    fs::write(&summary_path, report.summary().to_json())?;

    let fmt_rate = |r: Option<f64>| match r {
        Some(v) => format!("{v:.4}"),
        None => "undefined (0 successes)".to_string(),
    };
    println!(
        "evaluated {} examples: pn_switch_rate {} ({}/{} solver successes), pp_match_rate {} ({}/{}), table in {}",
        report.n_examples,
        fmt_rate(report.pn_switch_rate),
        report.pn_success_count,
        report.n_examples,
        fmt_rate(report.pp_match_rate),
        report.pp_success_count,
        report.n_examples,
        args.out.display()
    );
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(args) => run_train(args),
        Command::Explain(args) => run_explain(args),
        Command::Eval(args) => run_eval(args),
    }
}
