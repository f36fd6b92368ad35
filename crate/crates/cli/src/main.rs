//! `rdh`: train predictors, hide and recover payloads, and benchmark.
//!
//! Exit codes: 0 success, 1 internal failure (a roundtrip did not verify),
//! 2 bad usage or input, 3 training diverged, 4 payload exceeds capacity.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rdh_core::bench::{eval_csv, predict_eval, run_sweep, NamedImage, SweepConfig};
use rdh_core::codec::{bits_to_bytes, bytes_to_bits, embed, extract, EmbedOutcome};
use rdh_core::error::RdhError;
use rdh_core::image::{load_pgm, psnr, save_pgm, GrayImage};
use rdh_core::model::{
    parse_config, train_stage1, train_stage2, IcnnpConfig, IcnnpModel, TrainConfig, TrainReport,
};
use rdh_core::predictor::{KindName, PredictorKind};

#[derive(Parser)]
#[command(
    name = "rdh",
    version,
    about = "Reversible data hiding with learned pixel and complexity prediction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one stage of the predictor on a directory of PGM images.
    Train(TrainArgs),
    /// Hide a payload file in a cover image.
    Embed(EmbedArgs),
    /// Recover the payload and the original image.
    Extract(ExtractArgs),
    /// Embed random payloads at several capacities and record PSNR.
    Sweep(SweepArgs),
    /// Compare predictors against ground-truth pixels and reference complexity.
    PredictEval(EvalArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// 1 trains features and pixel head, 2 trains the complexity head.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    stage: u8,
    /// Directory of 8-bit binary PGM files.
    #[arg(long)]
    images: PathBuf,
    /// `key = value` file for network and trainer settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stage-1 weights to continue from (required for stage 2).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Output weight file; the per-epoch loss goes to `<out>.loss.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictorArgs {
    /// icnnp, cnnp-lv or rhombus.
    #[arg(long, default_value = "rhombus")]
    predictor: KindName,
    /// Weight file for the CNN predictors.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Config file whose network settings match the weights.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    cover: PathBuf,
    /// Raw payload bytes.
    #[arg(long)]
    payload: PathBuf,
    /// 64-bit hiding key as 16 hex digits.
    #[arg(long)]
    key: String,
    #[command(flatten)]
    predictor: PredictorArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    marked: PathBuf,
    #[arg(long)]
    key: String,
    #[command(flatten)]
    predictor: PredictorArgs,
    #[arg(long)]
    out_payload: PathBuf,
    #[arg(long)]
    out_image: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    images: PathBuf,
    /// Comma-separated capacities in bits, or `start..end:step` (inclusive).
    #[arg(long, default_value = "10000..100000:10000")]
    capacities: String,
    /// Comma-separated predictor kinds.
    #[arg(long, default_value = "rhombus")]
    predictors: String,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seeds the random payloads.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "0000000000000001")]
    key: String,
    /// Fill the elapsed_ms column (output is then not reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    images: PathBuf,
    #[arg(long, default_value = "rhombus")]
    predictors: String,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<RdhError> for Failure {
    fn from(err: RdhError) -> Self {
        let code = match err {
            RdhError::Diverged { .. } => 3,
            RdhError::CapacityExceeded { .. } | RdhError::ReservedRowOverflow { .. } => 4,
            RdhError::Inconsistent(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn parse_key(text: &str) -> CliResult<u64> {
    if text.len() != 16 || !text.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Failure::usage(format!(
            "key must be exactly 16 hex digits, got {text:?}"
        )));
    }
    u64::from_str_radix(text, 16).map_err(|e| Failure::usage(e.to_string()))
}

fn load_configs(path: Option<&Path>) -> CliResult<(IcnnpConfig, TrainConfig)> {
    let text = match path {
        Some(p) => {
            String::from_utf8(read(p)?).map_err(|_| Failure::usage("config file is not UTF-8"))?
        }
        None => String::new(),
    };
    Ok(parse_config(
        &text,
        IcnnpConfig::default(),
        TrainConfig::default(),
    )?)
}

fn load_model(path: &Path, slope: f32) -> CliResult<IcnnpModel> {
    Ok(IcnnpModel::from_bytes(&read(path)?, slope)?)
}

fn load_image_dir(dir: &Path) -> CliResult<Vec<NamedImage>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| Failure::usage(format!("cannot list {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::usage(format!(
            "no .pgm files in {}",
            dir.display()
        )));
    }
    paths
        .iter()
        .map(|p| {
            let image =
                load_pgm(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(NamedImage::new(name, image))
        })
        .collect()
}

fn parse_kinds(list: &str) -> CliResult<Vec<KindName>> {
    list.split(',')
        .map(|s| s.trim().parse::<KindName>().map_err(Failure::from))
        .collect()
}

/// Builds predictors; the weight file is loaded once and shared.
fn build_kinds(
    names: &[KindName],
    weights: Option<&Path>,
    config: Option<&Path>,
) -> CliResult<Vec<PredictorKind>> {
    let model = if names.iter().any(|k| k.needs_weights()) {
        let path = weights.ok_or_else(|| Failure::usage("the CNN predictors need --weights"))?;
        let (net, _) = load_configs(config)?;
        Some(Arc::new(load_model(path, net.leaky_slope)?))
    } else {
        None
    };
    names
        .iter()
        .map(|k| Ok(k.with_model(model.clone())?))
        .collect()
}

fn parse_capacities(text: &str) -> CliResult<Vec<usize>> {
    let bad = || Failure::usage(format!("bad capacity list {text:?}"));
    if let Some((range, step)) = text.split_once(':') {
        let (start, end) = range.split_once("..").ok_or_else(bad)?;
        let (start, end, step): (usize, usize, usize) = (
            start.trim().parse().map_err(|_| bad())?,
            end.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if step == 0 || start > end {
            return Err(bad());
        }
        return Ok((start..=end).step_by(step).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

fn loss_csv(report: &TrainReport) -> String {
    let mut s = String::from("epoch,loss\n");
    for (i, loss) in report.epoch_losses.iter().enumerate() {
        s.push_str(&format!("{},{loss:.9}\n", i + 1));
    }
    s
}

fn cmd_train(args: &TrainArgs) -> CliResult<()> {
    let (net, train) = load_configs(args.config.as_deref())?;
    let mut model = match (args.stage, &args.weights) {
        (1, Some(path)) => load_model(path, net.leaky_slope)?,
        (1, None) => IcnnpModel::new_random(net.clone(), train.seed)?,
        (_, Some(path)) if path.exists() => load_model(path, net.leaky_slope)?,
        (_, Some(path)) => {
            return Err(Failure::usage(format!(
                "stage 2 needs stage-1 weights; {} does not exist",
                path.display()
            )))
        }
        (_, None) => return Err(Failure::usage("stage 2 needs stage-1 weights (--weights)")),
    };
    let images: Vec<GrayImage> = load_image_dir(&args.images)?
        .into_iter()
        .map(|n| n.image)
        .collect();
    println!(
        "lr={} batch={} weight_decay={} epochs={} crop={}",
        train.lr, train.batch, train.weight_decay, train.epochs, train.crop
    );
    let log =
        |epoch: usize, loss: f64| eprintln!("stage {} epoch {epoch}: loss {loss:.6}", args.stage);
    let report = if args.stage == 1 {
        train_stage1(&mut model, &images, &train, log)?
    } else {
        train_stage2(&mut model, &images, &train, log)?
    };
    write(&args.out, &model.to_bytes())?;
    let mut sidecar = args.out.clone().into_os_string();
    sidecar.push(".loss.csv");
    write(Path::new(&sidecar), loss_csv(&report).as_bytes())?;
    println!("initial_loss={:.9}", report.initial_loss);
    println!("final_loss={:.9}", report.kept_loss());
    println!("best_epoch={}", report.best_epoch);
    Ok(())
}

fn single_kind(args: &PredictorArgs) -> CliResult<PredictorKind> {
    let mut kinds = build_kinds(
        &[args.predictor],
        args.weights.as_deref(),
        args.config.as_deref(),
    )?;
    Ok(kinds.remove(0))
}

fn print_outcome(cover: &GrayImage, out: &EmbedOutcome) -> CliResult<()> {
    println!(
        "capacity_bits={}",
        out.dot.payload_bits + out.cross.payload_bits
    );
    println!("psnr_db={:.4}", psnr(cover, &out.marked)?);
    for (name, pass) in [("dot", &out.dot), ("cross", &out.cross)] {
        println!("{name}_t_p={}", pass.plan.t_p);
        println!("{name}_t_n={}", pass.plan.t_n);
        println!("{name}_selected_count={}", pass.plan.selected_count);
        println!("{name}_payload_bits={}", pass.payload_bits);
        println!("{name}_map_bits={}", pass.map_bits);
    }
    Ok(())
}

fn cmd_embed(args: &EmbedArgs) -> CliResult<()> {
    let key = parse_key(&args.key)?;
    let kind = single_kind(&args.predictor)?;
    let cover = load_pgm(&read(&args.cover)?)?;
    let payload = bytes_to_bits(&read(&args.payload)?);
    let out = embed(&cover, &payload, key, &kind)?;
    write(&args.out, &save_pgm(&out.marked))?;
    print_outcome(&cover, &out)
}

fn cmd_extract(args: &ExtractArgs) -> CliResult<()> {
    let key = parse_key(&args.key)?;
    let kind = single_kind(&args.predictor)?;
    let marked = load_pgm(&read(&args.marked)?)?;
    let back = extract(&marked, key, &kind)?;
    write(&args.out_payload, &bits_to_bytes(&back.payload))?;
    write(&args.out_image, &save_pgm(&back.image))?;
    println!("payload_bits={}", back.payload.len());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let names = parse_kinds(&args.predictors)?;
    let kinds = build_kinds(&names, args.weights.as_deref(), args.config.as_deref())?;
    let images = load_image_dir(&args.images)?;
    let config = SweepConfig {
        capacities: parse_capacities(&args.capacities)?,
        seed: args.seed,
        key: parse_key(&args.key)?,
        timing: args.timing,
        ..SweepConfig::default()
    };
    let report = run_sweep(&images, &kinds, &config, |row| {
        eprintln!(
            "{} {} {} bits: {:.4} dB",
            row.image, row.kind, row.capacity_bits, row.psnr_db
        )
    })?;
    write(&args.out, report.to_csv().as_bytes())?;
    for &cap in &config.capacities {
        if let (Some(a), Some(b)) = (
            report.mean(KindName::Icnnp, cap),
            report.mean(KindName::CnnpLv, cap),
        ) {
            println!("delta_db[{cap}]={:.4}", a - b);
        }
    }
    println!(
        "monotonicity_violations={}",
        report.monotonicity_violations().len()
    );
    Ok(())
}

fn cmd_predict_eval(args: &EvalArgs) -> CliResult<()> {
    let names = parse_kinds(&args.predictors)?;
    let kinds = build_kinds(&names, args.weights.as_deref(), args.config.as_deref())?;
    let images = load_image_dir(&args.images)?;
    let rows = predict_eval(&images, &kinds)?;
    write(&args.out, eval_csv(&rows).as_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::PredictEval(a) => cmd_predict_eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
