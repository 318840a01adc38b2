//! `svan` command line: efficiency analysis, training, inference,
//! evaluation and the attention-arrangement ablation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use svan_core::analysis::{
    compare_decompositions, count_svan_flops, count_svan_params, Convention,
};
use svan_core::dataset::load_dataset;
use svan_core::image::{load_png, save_png, ImageRgb8};
use svan_core::model::{load_params, Arrangement, SvanConfig};
use svan_core::training::{evaluate, parse_run_config, train, TrainOptions};
use svan_core::{Result, SvanError};

#[derive(Parser)]
#[command(
    name = "svan",
    version,
    about = "Symmetric large-kernel attention super-resolution toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print parameter/MAC accounting and receptive fields.
    Analyze(AnalyzeArgs),
    /// Run the training protocol described by a config file.
    Train(TrainArgs),
    /// Upscale one PNG with a trained checkpoint.
    Infer(InferArgs),
    /// Evaluate a checkpoint or the bicubic baseline over a dataset directory.
    Eval(EvalArgs),
    /// Train every attention arrangement under one toy budget and compare.
    Ablate(AblateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Upscale factor (2, 3 or 4). Not needed with --table3.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=4), required_unless_present = "table3")]
    scale: Option<u32>,
    /// Image size the MAC counts refer to.
    #[arg(long, num_args = 2, value_names = ["H", "W"], default_values_t = [256, 256])]
    size: Vec<usize>,
    /// MAC counting convention.
    #[arg(long, default_value = "padded")]
    convention: String,
    /// Print the dense vs decomposed large-kernel comparison instead.
    #[arg(long)]
    table3: bool,
    /// Also write the report as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Run configuration file (key=value lines).
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker cap; computation is single-threaded and bitwise deterministic.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
    /// Run directory (checkpoints/, logs/, config copy).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    /// Trained checkpoint.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Input PNG.
    input: PathBuf,
    /// Output PNG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of HR PNG images.
    dataset: PathBuf,
    /// Checkpoint to evaluate.
    #[arg(long, conflicts_with = "bicubic")]
    checkpoint: Option<PathBuf>,
    /// Evaluate the bicubic baseline instead of a checkpoint.
    #[arg(long)]
    bicubic: bool,
    /// Upscale factor (required with --bicubic; otherwise from checkpoint).
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=4))]
    scale: Option<u32>,
    /// Border pixels excluded from the metrics (default: the scale).
    #[arg(long)]
    shave: Option<usize>,
    /// Write the per-image CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker cap; computation is single-threaded and bitwise deterministic.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
}

#[derive(Args)]
struct AblateArgs {
    /// Run configuration file; its protocol is the shared toy budget.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated arrangement labels (default: all four).
    #[arg(long, value_delimiter = ',')]
    arrangements: Option<Vec<String>>,
    /// Write the comparison as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Train(args) => cmd_train(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Ablate(args) => cmd_ablate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}

fn write_out(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| SvanError::io(path, e))
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    if args.table3 {
        let small = compare_decompositions(5, 5, 1, 3, 256, 256)?;
        let cmp = compare_decompositions(17, 5, 3, 3, 256, 256)?;
        println!(
            "{:<14}  {:>16}  {:>10}  {:>10}",
            "conv", "receptive field", "params[K]", "macs[G]"
        );
        println!(
            "{:<14}  {:>16}  {:>10.3}  {:>10.4}",
            "5x5",
            small.receptive_field,
            small.dense.total_params as f64 / 1e3,
            small.dense.total_macs as f64 / 1e9
        );
        println!(
            "{:<14}  {:>16}  {:>10.3}  {:>10.4}",
            "17x17",
            cmp.receptive_field,
            cmp.dense.total_params as f64 / 1e3,
            cmp.dense.total_macs as f64 / 1e9
        );
        println!(
            "{:<14}  {:>16}  {:>10.3}  {:>10.4}",
            "5-dw & 5-dw-d",
            cmp.receptive_field,
            cmp.pair_params as f64 / 1e3,
            cmp.decomposed_macs as f64 / 1e9
        );
        println!(
            "ratios vs 17x17: params {:.1}%, macs {:.1}% (valid convention at 256x256; pair params exclude the point conv, macs include it)",
            cmp.param_ratio * 100.0,
            cmp.macs_ratio * 100.0
        );
        if let Some(out) = &args.out {
            let mut csv = String::from("name,params,macs,rf\n");
            csv.push_str(&format!(
                "5x5,{},{},{}\n",
                small.dense.total_params, small.dense.total_macs, small.receptive_field
            ));
            csv.push_str(&format!(
                "17x17,{},{},{}\n",
                cmp.dense.total_params, cmp.dense.total_macs, cmp.receptive_field
            ));
            csv.push_str(&format!(
                "5-dw & 5-dw-d,{},{},{}\n",
                cmp.pair_params, cmp.decomposed_macs, cmp.receptive_field
            ));
            write_out(out, &csv)?;
        }
        return Ok(());
    }
    let convention: Convention = args.convention.parse()?;
    let scale = args.scale.expect("clap requires --scale without --table3") as usize;
    let config = SvanConfig::new(scale)?;
    let (h, w) = (args.size[0], args.size[1]);
    let report = count_svan_flops(&config, h, w, convention)?;
    print!("{}", report.render_text());
    let params = count_svan_params(&config);
    println!(
        "totals: {} parameters ({:.1}K), {:.4} GMACs, receptive field {}",
        params.total_params,
        params.total_params as f64 / 1e3,
        report.total_macs as f64 / 1e9,
        report.receptive_field
    );
    if let Some(out) = &args.out {
        write_out(out, &report.render_csv())?;
    }
    Ok(())
}

fn run_dir_for(config_path: &Path, explicit: Option<&Path>, from_config: Option<&Path>) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.to_path_buf();
    }
    let stem = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    if let Ok(root) = std::env::var("SVAN_RUN_DIR") {
        return PathBuf::from(root).join(stem);
    }
    if let Some(dir) = from_config {
        return dir.to_path_buf();
    }
    PathBuf::from("runs").join(stem)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut run = parse_run_config(&args.config)?;
    if let Some(seed) = args.seed {
        run.model = run.model.with_seed(seed);
    }
    let _ = args.threads;
    let run_dir = run_dir_for(&args.config, args.out.as_deref(), run.out_dir.as_deref());
    std::fs::create_dir_all(&run_dir).map_err(|e| SvanError::io(&run_dir, e))?;
    std::fs::copy(&args.config, run_dir.join("config.txt"))
        .map_err(|e| SvanError::io(&args.config, e))?;

    let dataset = load_dataset(&run.train_dir, run.model.scale)?;
    let val_dataset = match &run.val_dir {
        Some(dir) => Some(load_dataset(dir, run.model.scale)?),
        None => None,
    };
    let options = TrainOptions {
        steps_per_epoch: run.steps_per_epoch,
        augment: run.augment,
        validate_every: run.validate_every,
        shave: run.shave,
        out_dir: Some(run_dir.clone()),
        val_dataset,
    };
    println!(
        "training x{} ({} channels, {} blocks, {}) on {} images; run dir {}",
        run.model.scale,
        run.model.base_channels,
        run.model.num_blocks,
        run.model.arrangement,
        dataset.len(),
        run_dir.display()
    );
    let (_, log) = train(&run.model, &dataset, &run.protocol, &options)?;
    let last = log.steps.last();
    println!(
        "done: {} steps, final loss {}",
        log.steps.len(),
        last.map(|s| s.loss.to_string())
            .unwrap_or_else(|| "n/a".into())
    );
    if let Some(v) = log.validations.last() {
        println!("final validation PSNR-Y: {:.4} dB", v.psnr_y);
    }
    Ok(())
}

fn cmd_infer(args: InferArgs) -> Result<()> {
    let params = load_params(&args.checkpoint)?;
    let input = load_png(&args.input)?.to_tensor();
    let sr = params.forward(&input)?;
    // The network output is unclamped; clamping happens only here, at save.
    let image = ImageRgb8::from_tensor(&sr.clamp(0.0, 1.0))?;
    save_png(&image, &args.out)?;
    println!(
        "wrote {} ({}x{} -> {}x{})",
        args.out.display(),
        input.h(),
        input.w(),
        image.h,
        image.w
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let _ = args.threads;
    let params = match (&args.checkpoint, args.bicubic) {
        (Some(path), false) => Some(load_params(path)?),
        (None, true) => None,
        (None, false) => {
            return Err(SvanError::Usage(
                "eval needs --checkpoint PATH or --bicubic".into(),
            ));
        }
        (Some(_), true) => unreachable!("clap enforces the conflict"),
    };
    let scale = match (&params, args.scale) {
        (Some(p), Some(s)) if p.config().scale != s as usize => {
            return Err(SvanError::Usage(format!(
                "checkpoint is x{} but --scale {} was requested",
                p.config().scale,
                s
            )));
        }
        (Some(p), _) => p.config().scale,
        (None, Some(s)) => s as usize,
        (None, None) => {
            return Err(SvanError::Usage("--bicubic needs --scale".into()));
        }
    };
    let shave = args.shave.unwrap_or(scale);
    let dataset = load_dataset(&args.dataset, scale)?;
    let report = evaluate(params.as_ref(), &dataset, shave)?;
    print!("{}", report.render_text());
    if let Some(out) = &args.out {
        write_out(out, &report.render_csv())?;
    }
    Ok(())
}

fn cmd_ablate(args: AblateArgs) -> Result<()> {
    let run = parse_run_config(&args.config)?;
    let arrangements: Vec<Arrangement> = match &args.arrangements {
        Some(labels) => labels
            .iter()
            .map(|l| l.parse())
            .collect::<Result<Vec<_>>>()?,
        None => Arrangement::ALL.to_vec(),
    };
    let dataset = load_dataset(&run.train_dir, run.model.scale)?;
    let options = TrainOptions {
        steps_per_epoch: run.steps_per_epoch,
        augment: run.augment,
        validate_every: run.validate_every,
        shave: run.shave,
        out_dir: None,
        val_dataset: None,
    };

    let mut rows = Vec::new();
    for arrangement in arrangements {
        let config = run.model.with_arrangement(arrangement);
        let (params, log) = train(&config, &dataset, &run.protocol, &options)?;
        let final_loss = log.steps.last().map(|s| s.loss).unwrap_or(f64::NAN);
        if !final_loss.is_finite() {
            return Err(SvanError::Training(format!(
                "arrangement {arrangement} produced non-finite loss"
            )));
        }
        let val_psnr = log.validations.last().map(|v| v.psnr_y);
        rows.push((arrangement, params.total_parameters(), final_loss, val_psnr));
    }
    if let Some(first) = rows.first() {
        if !rows.iter().all(|r| r.1 == first.1) {
            return Err(SvanError::Usage(
                "arrangement variants disagree on parameter count".into(),
            ));
        }
    }

    println!(
        "{:<12}  {:>9}  {:>12}  {:>10}",
        "arrangement", "params", "final_loss", "val_psnr"
    );
    let mut csv = String::from("arrangement,params,final_loss,val_psnr\n");
    for (a, p, loss, psnr) in &rows {
        let psnr_s = psnr
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "{:<12}  {:>9}  {:>12.6}  {:>10}",
            a.label(),
            p,
            loss,
            psnr_s
        );
        csv.push_str(&format!("{},{},{},{}\n", a.label(), p, loss, psnr_s));
    }
    if let Some(out) = &args.out {
        write_out(out, &csv)?;
    }
    Ok(())
}
