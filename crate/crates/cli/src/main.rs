//! Batch command-line interface: simulate, fit, predict, eval, variogram.
//!
//! Every command takes a `--seed` and writes a `<out stem>_manifest.txt`
//! next to its output; the manifest appears with `status = running` before
//! any work starts and is rewritten on success or failure, so interrupted
//! runs leave a marker behind.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use prefgeo::data::GeoDataset;
use prefgeo::evaluation::{crci, cross_validate, mape, ppd, CvFolds};
use prefgeo::inference::{run_eps, run_nps, ModelKind, PosteriorSamples};
use prefgeo::io::{
    manifest_path, parse_fit_config, read_dataset, read_draws, read_prediction,
    render_fit_config, write_dataset, write_draws, write_prediction, write_report, FitSettings,
    RunManifest,
};
use prefgeo::prediction::{predict_intensity, predict_response, predictive_mixture, PredictionGrid};
use prefgeo::region::{Point, Region};
use prefgeo::rng::{derive_rng, derive_u64};
use prefgeo::simulation::{response_from_field, simulate_nps, simulate_ps, TrueParams};

#[derive(Parser)]
#[command(name = "prefgeo", version, about = "Exact Bayesian geostatistics under preferential sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (and optionally the true field on a grid)
    Simulate(SimulateArgs),
    /// Run a sampler on a dataset and write posterior draws
    Fit(FitArgs),
    /// Summarize the posterior predictive response (and intensity) on a grid
    Predict(PredictArgs),
    /// Score predictions against held-out truth, or cross-validate a model
    Eval(EvalArgs),
    /// Empirical semivariogram with a permutation envelope
    Variogram(VariogramArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ps,
    Nps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Eps,
    Nps,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> ModelKind {
        match m {
            Model::Eps => ModelKind::Eps,
            Model::Nps => ModelKind::Nps,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Generating regime: preferential or non-preferential locations
    #[arg(long, value_enum)]
    mode: Mode,
    /// ps: "lambda_star,mu,tau2,sigma2,phi,beta"; nps: "mu,tau2,sigma2,phi"
    #[arg(long)]
    params: Option<String>,
    /// Sampling intensity for the non-preferential regime
    #[arg(long, default_value_t = 72.0)]
    intensity: f64,
    /// Study window as "x0,y0,x1,y1"
    #[arg(long, default_value = "0,0,1,1")]
    region: String,
    /// Also write the true field and responses at the centers of an NxM grid
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output dataset CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Input dataset CSV
    #[arg(long)]
    data: PathBuf,
    /// Flat key=value config (priors, sampler settings, region)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of independent chains; per-chain files are written alongside
    /// the merged output
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Output draws CSV (a latent sidecar is written next to it)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Posterior draws CSV from `fit`
    #[arg(long)]
    draws: PathBuf,
    /// The dataset the draws were fit on
    #[arg(long)]
    data: PathBuf,
    /// Regular grid "NxM", or a CSV of locations via --grid-file
    #[arg(long, default_value = "30x30")]
    grid: String,
    /// CSV with header x1,x2 giving explicit prediction locations
    #[arg(long)]
    grid_file: Option<PathBuf>,
    /// Credibility levels for the predictive intervals
    #[arg(long, default_value = "0.9,0.95,0.99")]
    levels: String,
    /// Study window as "x0,y0,x1,y1"
    #[arg(long, default_value = "0,0,1,1")]
    region: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output prediction CSV; intensity goes to `<stem>_intensity.csv` for
    /// preferential-model draws
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Prediction CSV from `predict`
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Truth CSV with header x1,x2,y at the prediction locations
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Posterior draws (with --data) enable the predictive-density score
    #[arg(long)]
    draws: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Cross-validate instead of scoring prediction files
    #[arg(long, default_value_t = false)]
    crossval: bool,
    /// Cross-validation folds: "loo" or a fold count
    #[arg(long, default_value = "loo")]
    folds: String,
    #[arg(long, value_enum, default_value = "eps")]
    model: Model,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Study window as "x0,y0,x1,y1"
    #[arg(long, default_value = "0,0,1,1")]
    region: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output report (flat key=value)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VariogramArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 15)]
    bins: usize,
    #[arg(long, default_value_t = 999)]
    permutations: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV: center,gamma,lo,hi,pairs
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Variogram(args) => cmd_variogram(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

/// Wrap a command body with the begin/finish manifest protocol.
fn with_manifest(
    out: &Path,
    command: &str,
    seed: u64,
    config_snapshot: Option<String>,
    body: impl FnOnce(&mut RunManifest) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let mpath = manifest_path(out);
    let mut manifest = RunManifest::begin(command, seed, env!("CARGO_PKG_VERSION"));
    if let Some(snapshot) = config_snapshot {
        manifest = manifest.with_config(&snapshot);
    }
    manifest
        .write(&mpath)
        .with_context(|| format!("writing manifest {}", mpath.display()))?;
    match body(&mut manifest) {
        Ok(()) => {
            manifest.finish_ok();
            manifest.write(&mpath)?;
            Ok(())
        }
        Err(e) => {
            manifest.finish_error(&format!("{e:#}"));
            manifest.write(&mpath)?;
            Err(e)
        }
    }
}

fn parse_region(text: &str) -> anyhow::Result<Region> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad --region `{text}`"))?;
    if parts.len() != 4 {
        bail!("--region needs four numbers `x0,y0,x1,y1`, got `{text}`");
    }
    Ok(Region::new([parts[0], parts[1]], [parts[2], parts[3]])?)
}

fn parse_grid_spec(text: &str) -> anyhow::Result<(usize, usize)> {
    let (nx, ny) = text
        .split_once(['x', 'X'])
        .with_context(|| format!("grid must look like 30x30, got `{text}`"))?;
    Ok((nx.trim().parse()?, ny.trim().parse()?))
}

fn parse_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number `{p}`")))
        .collect()
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let region = parse_region(&args.region)?;
    with_manifest(&args.out, "simulate", args.seed, None, |_| {
        let mut rng = derive_rng(args.seed, "simulate", 0);
        let (sim, params, truth_kv) = match args.mode {
            Mode::Ps => {
                let defaults = TrueParams::default();
                let p = match &args.params {
                    None => defaults,
                    Some(text) => {
                        let v = parse_list(text)?;
                        if v.len() != 6 {
                            bail!("--params for ps needs 6 values lambda_star,mu,tau2,sigma2,phi,beta");
                        }
                        TrueParams {
                            lambda_star: v[0],
                            mu: v[1],
                            tau2: v[2],
                            sigma2: v[3],
                            phi: v[4],
                            beta: v[5],
                        }
                    }
                };
                let sim = simulate_ps(&p, &region, &mut rng)?;
                let kv = vec![
                    ("mode", "ps".to_string()),
                    ("lambda_star", p.lambda_star.to_string()),
                    ("mu", p.mu.to_string()),
                    ("tau2", p.tau2.to_string()),
                    ("sigma2", p.sigma2.to_string()),
                    ("phi", p.phi.to_string()),
                    ("beta", p.beta.to_string()),
                ];
                (sim, p, kv)
            }
            Mode::Nps => {
                let defaults = TrueParams::default();
                let p = match &args.params {
                    None => defaults,
                    Some(text) => {
                        let v = parse_list(text)?;
                        if v.len() != 4 {
                            bail!("--params for nps needs 4 values mu,tau2,sigma2,phi");
                        }
                        TrueParams {
                            mu: v[0],
                            tau2: v[1],
                            sigma2: v[2],
                            phi: v[3],
                            ..defaults
                        }
                    }
                };
                let sim = simulate_nps(&p, args.intensity, &region, &mut rng)?;
                let kv = vec![
                    ("mode", "nps".to_string()),
                    ("intensity", args.intensity.to_string()),
                    ("mu", p.mu.to_string()),
                    ("tau2", p.tau2.to_string()),
                    ("sigma2", p.sigma2.to_string()),
                    ("phi", p.phi.to_string()),
                ];
                (sim, p, kv)
            }
        };
        write_dataset(&args.out, &sim.data)?;

        let mut truth = String::new();
        for (k, v) in &truth_kv {
            truth.push_str(&format!("{k} = {v}\n"));
        }
        truth.push_str(&format!("seed = {}\n", args.seed));
        truth.push_str(&format!("n = {}\n", sim.data.n()));
        truth.push_str(&format!("attempts = {}\n", sim.attempts));
        std::fs::write(sibling(&args.out, "_truth.txt"), truth)?;

        if let Some(spec) = &args.grid {
            let (nx, ny) = parse_grid_spec(spec)?;
            let centers = region.grid_centers(nx, ny);
            let s = sim.realize_field_at(&params, &centers, &mut rng)?;
            let y = response_from_field(&params, &s, &mut rng)?;
            let mut w = csv::Writer::from_path(sibling(&args.out, "_field.csv"))?;
            w.write_record(["x1", "x2", "y", "s"])?;
            for ((p, s_val), y_val) in centers.iter().zip(&s).zip(&y) {
                w.write_record([
                    p.x.to_string(),
                    p.y.to_string(),
                    y_val.to_string(),
                    s_val.to_string(),
                ])?;
            }
            w.flush()?;
        }
        println!("wrote {} ({} observations)", args.out.display(), sim.data.n());
        Ok(())
    })
}

fn load_settings(config: &Option<PathBuf>, p: usize, seed: u64) -> anyhow::Result<FitSettings> {
    let mut settings = match config {
        None => FitSettings::defaults(p),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            parse_fit_config(&text, p, &path.display().to_string())?
        }
    };
    settings.mcmc.seed = seed;
    Ok(settings)
}

fn cmd_fit(args: FitArgs) -> anyhow::Result<()> {
    let data = read_dataset(&args.data)?;
    let settings = load_settings(&args.config, data.p(), args.seed)?;
    if matches!(args.model, Model::Nps) && settings.priors.lambda_star_max.is_some() {
        bail!("prior.lambda_star.max applies to the eps model only; remove it for nps fits");
    }
    if args.chains == 0 {
        bail!("--chains must be at least 1");
    }
    let snapshot = render_fit_config(&settings);
    with_manifest(&args.out, "fit", args.seed, Some(snapshot), |manifest| {
        let model: ModelKind = args.model.into();
        let chains = run_chains(&data, &settings, model, args.chains)?;

        // per-chain files plus the merged output
        if args.chains > 1 {
            for (i, samples) in chains.iter().enumerate() {
                write_draws(&sibling(&args.out, &format!("_chain{i}.csv")), samples)?;
            }
        }
        let mut merged = chains[0].clone();
        for samples in &chains[1..] {
            merged.draws.extend(samples.draws.iter().cloned());
            merged.accept_sigma2.accepted += samples.accept_sigma2.accepted;
            merged.accept_sigma2.proposed += samples.accept_sigma2.proposed;
            merged.accept_phi.accepted += samples.accept_phi.accepted;
            merged.accept_phi.proposed += samples.accept_phi.proposed;
            merged.accept_beta.accepted += samples.accept_beta.accepted;
            merged.accept_beta.proposed += samples.accept_beta.proposed;
        }
        write_draws(&args.out, &merged)?;
        manifest.record_samples(&merged);
        println!(
            "wrote {} ({} draws from {} chain{})",
            args.out.display(),
            merged.draws.len(),
            args.chains,
            if args.chains == 1 { "" } else { "s" }
        );
        Ok(())
    })
}

fn run_chains(
    data: &GeoDataset,
    settings: &FitSettings,
    model: ModelKind,
    n_chains: usize,
) -> anyhow::Result<Vec<PosteriorSamples>> {
    let run_one = |chain_index: usize| -> anyhow::Result<PosteriorSamples> {
        let mut config = settings.mcmc.clone();
        if n_chains > 1 {
            config.seed = derive_u64(settings.mcmc.seed, "chain", chain_index as u64);
        }
        Ok(match model {
            ModelKind::Eps => run_eps(data, &settings.region, &settings.priors, &config)?,
            ModelKind::Nps => run_nps(data, &settings.priors, &config)?,
        })
    };
    if n_chains == 1 {
        return Ok(vec![run_one(0)?]);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..n_chains).map(|i| scope.spawn(move || run_one(i))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    })
}

fn cmd_predict(args: PredictArgs) -> anyhow::Result<()> {
    let data = read_dataset(&args.data)?;
    let samples = read_draws(&args.draws)?;
    if samples.n_data != data.n() {
        bail!(
            "draws were fit on {} observations but the dataset has {}",
            samples.n_data,
            data.n()
        );
    }
    let region = parse_region(&args.region)?;
    let levels = parse_list(&args.levels)?;
    with_manifest(&args.out, "predict", args.seed, None, |_| {
        let grid = match &args.grid_file {
            Some(path) => PredictionGrid::new(read_locations(path)?, None, &region)?,
            None => {
                let (nx, ny) = parse_grid_spec(&args.grid)?;
                PredictionGrid::regular(&region, nx, ny)
            }
        };
        let response = predict_response(&samples, &data, &grid, &levels, args.seed)?;
        write_prediction(&args.out, &response)?;
        let mut message = format!("wrote {} ({} locations)", args.out.display(), grid.len());
        if samples.model == ModelKind::Eps {
            let intensity = predict_intensity(&samples, &data, &grid, &levels, args.seed)?;
            let ipath = sibling(&args.out, "_intensity.csv");
            write_prediction(&ipath, &intensity)?;
            message.push_str(&format!(" + {}", ipath.display()));
        }
        println!("{message}");
        Ok(())
    })
}

fn read_locations(path: &Path) -> anyhow::Result<Vec<Point>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() < 2 || &header[0] != "x1" || &header[1] != "x2" {
        bail!("{}: grid file needs header starting x1,x2", path.display());
    }
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        out.push(Point::new(record[0].parse()?, record[1].parse()?));
    }
    Ok(out)
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    if args.crossval {
        return cmd_eval_crossval(args);
    }
    let (Some(pred_path), Some(truth_path)) = (&args.pred, &args.truth) else {
        bail!("eval needs either --crossval or both --pred and --truth");
    };
    let pred = read_prediction(pred_path)?;
    let truth = read_dataset(truth_path)?;
    if truth.n() != pred.locations.len() {
        bail!(
            "prediction has {} locations but truth has {}",
            pred.locations.len(),
            truth.n()
        );
    }
    for (a, b) in pred.locations.iter().zip(truth.locations()) {
        if a != b {
            bail!(
                "location mismatch between prediction and truth at ({}, {}) vs ({}, {})",
                a.x, a.y, b.x, b.y
            );
        }
    }
    with_manifest(&args.out, "eval", args.seed, None, |_| {
        let truth_y: Vec<f64> = truth.y().iter().copied().collect();
        let mape_value = mape(&pred.mean, &truth_y)?;
        let mut crci_rows = Vec::new();
        for summary in &pred.intervals {
            let intervals: Vec<(f64, f64)> = summary
                .lower
                .iter()
                .zip(&summary.upper)
                .map(|(&lo, &hi)| (lo, hi))
                .collect();
            crci_rows.push((summary.level, crci(&intervals, &truth_y, summary.level)?));
        }
        // the density score needs the mixture components, which prediction
        // files do not carry; recompute them when draws are supplied
        let ppd_value = match (&args.draws, &args.data) {
            (Some(draws_path), Some(data_path)) => {
                let samples = read_draws(draws_path)?;
                let data = read_dataset(data_path)?;
                let region = parse_region(&args.region)?;
                let grid = PredictionGrid::new(pred.locations.clone(), None, &region)?;
                let mixture = predictive_mixture(&samples, &data, &grid)?;
                let mut total = 0.0;
                for (j, &y) in truth_y.iter().enumerate() {
                    let means: Vec<f64> = mixture.y_mean.column(j).iter().copied().collect();
                    let sds: Vec<f64> = mixture.y_sd.column(j).iter().copied().collect();
                    total += ppd(&means, &sds, y)?;
                }
                Some(total)
            }
            _ => None,
        };
        let report = prefgeo::evaluation::MetricReport {
            mape: mape_value,
            crci: crci_rows,
            ppd: ppd_value,
            n_p: truth.n(),
        };
        write_report(&args.out, &report)?;
        println!("wrote {}", args.out.display());
        Ok(())
    })
}

fn cmd_eval_crossval(args: EvalArgs) -> anyhow::Result<()> {
    let Some(data_path) = &args.data else {
        bail!("--crossval needs --data");
    };
    let data = read_dataset(data_path)?;
    let settings = load_settings(&args.config, data.p(), args.seed)?;
    let folds = match args.folds.as_str() {
        "loo" => CvFolds::LeaveOneOut,
        other => CvFolds::KFold(
            other
                .parse()
                .with_context(|| format!("--folds must be `loo` or a count, got `{other}`"))?,
        ),
    };
    let snapshot = render_fit_config(&settings);
    with_manifest(&args.out, "eval-crossval", args.seed, Some(snapshot), |_| {
        let report = cross_validate(
            &data,
            &settings.region,
            &settings.priors,
            &settings.mcmc,
            folds,
            args.model.into(),
        )?;
        write_report(&args.out, &report)?;
        println!("wrote {}", args.out.display());
        Ok(())
    })
}

fn cmd_variogram(args: VariogramArgs) -> anyhow::Result<()> {
    let data = read_dataset(&args.data)?;
    with_manifest(&args.out, "variogram", args.seed, None, |_| {
        let mut rng = derive_rng(args.seed, "variogram", 0);
        let env = prefgeo::evaluation::variogram_envelope(
            &data,
            args.bins,
            args.permutations,
            &mut rng,
        )?;
        let mut w = csv::Writer::from_path(&args.out)?;
        w.write_record(["center", "gamma", "lo", "hi", "pairs"])?;
        for bin in &env.bins {
            w.write_record([
                bin.center.to_string(),
                bin.gamma.to_string(),
                bin.lo.to_string(),
                bin.hi.to_string(),
                bin.pair_count.to_string(),
            ])?;
        }
        w.flush()?;
        if env.dropped > 0 {
            eprintln!("note: {} empty distance bins dropped", env.dropped);
        }
        println!("wrote {} ({} bins)", args.out.display(), env.bins.len());
        Ok(())
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}
