//! Two-stage training protocol, the minibatch training loop and the
//! evaluation harness.
//!
//! The default protocol mirrors the reference recipe: a 2000-epoch L1
//! pre-training stage at lr 1e-3 halved every 500 epochs; a second L1 stage
//! at lr 1e-4 under cosine annealing with period 20, run as two 3000-epoch
//! phases with patch sizes 64 then 128; and a 3000-epoch L2 fine-tuning
//! stage at lr 5e-4 halved every 300 epochs. Every field can be overridden
//! from a run config for desk-scale experiments.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::dataset::{DatasetEntry, SrDataset};
use crate::error::{Result, SvanError};
use crate::image::{augment_pair, sample_patch};
use crate::metrics::{psnr_y, ssim_y};
use crate::model::{init_params, Arrangement, SvanConfig, SvanParams};
use crate::optim::{adam_step, AdamState};
use crate::resample::bicubic_resize;
use crate::tape::Tape;
use crate::tensor::Tensor4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    L1,
    L2,
}

impl std::str::FromStr for LossKind {
    type Err = SvanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(LossKind::L1),
            "l2" => Ok(LossKind::L2),
            other => Err(SvanError::Usage(format!("unknown loss {other:?}"))),
        }
    }
}

/// Learning-rate schedule within a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// `lr0 * 2^-(epoch / n)`.
    HalveEvery(usize),
    /// Warm restarts: `lr0 * 0.5 * (1 + cos(pi * (epoch mod t) / t))`.
    Cosine(usize),
}

impl std::str::FromStr for Schedule {
    type Err = SvanError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| SvanError::Usage(format!("schedule {s:?} must be kind:N")))?;
        let n: usize = arg
            .parse()
            .map_err(|_| SvanError::Usage(format!("bad schedule period in {s:?}")))?;
        if n == 0 {
            return Err(SvanError::Usage("schedule period must be >= 1".into()));
        }
        match kind {
            "halve" => Ok(Schedule::HalveEvery(n)),
            "cosine" => Ok(Schedule::Cosine(n)),
            other => Err(SvanError::Usage(format!("unknown schedule kind {other:?}"))),
        }
    }
}

/// Consecutive epochs trained at one patch size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchPhase {
    pub epochs: usize,
    pub patch: usize,
}

/// One stage of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct StagePlan {
    pub name: String,
    pub phases: Vec<PatchPhase>,
    pub loss: LossKind,
    pub initial_lr: f64,
    pub schedule: Schedule,
    pub minibatch: usize,
}

impl StagePlan {
    pub fn epochs(&self) -> usize {
        self.phases.iter().map(|p| p.epochs).sum()
    }

    /// Patch size in effect at a stage-relative epoch.
    pub fn patch_at(&self, epoch: usize) -> usize {
        let mut remaining = epoch;
        for phase in &self.phases {
            if remaining < phase.epochs {
                return phase.patch;
            }
            remaining -= phase.epochs;
        }
        self.phases.last().map(|p| p.patch).unwrap_or(64)
    }
}

/// Learning rate at a stage-relative epoch.
pub fn lr_at(plan: &StagePlan, epoch: usize) -> f64 {
    match plan.schedule {
        Schedule::HalveEvery(n) => plan.initial_lr * 0.5f64.powi((epoch / n) as i32),
        Schedule::Cosine(t) => {
            let phase = (epoch % t) as f64 / t as f64;
            plan.initial_lr * 0.5 * (1.0 + (std::f64::consts::PI * phase).cos())
        }
    }
}

/// The full-scale three-stage recipe; desk runs override the epoch counts.
pub fn default_protocol() -> Vec<StagePlan> {
    vec![
        StagePlan {
            name: "stage1".into(),
            phases: vec![PatchPhase {
                epochs: 2000,
                patch: 64,
            }],
            loss: LossKind::L1,
            initial_lr: 1e-3,
            schedule: Schedule::HalveEvery(500),
            minibatch: 64,
        },
        StagePlan {
            name: "stage2".into(),
            phases: vec![
                PatchPhase {
                    epochs: 3000,
                    patch: 64,
                },
                PatchPhase {
                    epochs: 3000,
                    patch: 128,
                },
            ],
            loss: LossKind::L1,
            initial_lr: 1e-4,
            schedule: Schedule::Cosine(20),
            minibatch: 64,
        },
        StagePlan {
            name: "stage3".into(),
            phases: vec![PatchPhase {
                epochs: 3000,
                patch: 64,
            }],
            loss: LossKind::L2,
            initial_lr: 5e-4,
            schedule: Schedule::HalveEvery(300),
            minibatch: 64,
        },
    ]
}

/// Per-step training record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub epoch: u64,
    pub lr: f64,
    pub loss: f64,
}

/// Per-validation record.
#[derive(Debug, Clone, PartialEq)]
pub struct ValRecord {
    pub epoch: u64,
    pub psnr_y: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub steps: Vec<StepRecord>,
    pub validations: Vec<ValRecord>,
}

impl TrainLog {
    pub fn steps_csv(&self) -> String {
        let mut out = String::from("step,epoch,lr,loss\n");
        for s in &self.steps {
            let _ = writeln!(out, "{},{},{},{}", s.step, s.epoch, s.lr, s.loss);
        }
        out
    }

    pub fn validations_csv(&self) -> String {
        let mut out = String::from("epoch,psnr_y\n");
        for v in &self.validations {
            let _ = writeln!(out, "{},{}", v.epoch, v.psnr_y);
        }
        out
    }
}

/// Harness knobs that are not part of the stage plans.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    /// Steps per epoch; `None` derives `max(1, images / minibatch)`.
    pub steps_per_epoch: Option<usize>,
    pub augment: bool,
    /// Validate every N epochs (and at the end of training).
    pub validate_every: usize,
    /// Border shave for validation PSNR; `None` uses the scale.
    pub shave: Option<usize>,
    /// Where checkpoints and logs go; `None` trains in memory only.
    pub out_dir: Option<PathBuf>,
    /// Validation dataset; `None` validates on the training set.
    pub val_dataset: Option<SrDataset>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            steps_per_epoch: None,
            augment: true,
            validate_every: 50,
            shave: None,
            out_dir: None,
            val_dataset: None,
        }
    }
}

fn batch_from_patches(patches: &[(Tensor4, Tensor4)]) -> (Tensor4, Tensor4) {
    let (c, lh, lw) = (patches[0].0.c(), patches[0].0.h(), patches[0].0.w());
    let (hh, hw) = (patches[0].1.h(), patches[0].1.w());
    let n = patches.len();
    let mut lr = Tensor4::zeros(n, c, lh, lw);
    let mut hr = Tensor4::zeros(n, c, hh, hw);
    let lr_plane = c * lh * lw;
    let hr_plane = c * hh * hw;
    for (i, (lp, hp)) in patches.iter().enumerate() {
        lr.data_mut()[i * lr_plane..(i + 1) * lr_plane].copy_from_slice(lp.data());
        hr.data_mut()[i * hr_plane..(i + 1) * hr_plane].copy_from_slice(hp.data());
    }
    (lr, hr)
}

/// Runs the protocol: minibatch Adam over randomly sampled, optionally
/// augmented patches, with per-step logging, periodic validation and
/// checkpoints at stage boundaries. Deterministic for a fixed seed.
pub fn train(
    config: &SvanConfig,
    dataset: &SrDataset,
    protocol: &[StagePlan],
    options: &TrainOptions,
) -> Result<(SvanParams, TrainLog)> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(SvanError::Dataset("training dataset is empty".into()));
    }
    if dataset.scale != config.scale {
        return Err(SvanError::Usage(format!(
            "dataset prepared for x{} but model scale is x{}",
            dataset.scale, config.scale
        )));
    }

    if let Some(dir) = &options.out_dir {
        std::fs::create_dir_all(dir.join("checkpoints")).map_err(|e| SvanError::io(dir, e))?;
        std::fs::create_dir_all(dir.join("logs")).map_err(|e| SvanError::io(dir, e))?;
    }

    let mut params = init_params(config)?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut log = TrainLog::default();
    let shave = options.shave.unwrap_or(config.scale);
    let val_set = options.val_dataset.as_ref().unwrap_or(dataset);

    let mut global_step = 0u64;
    let mut global_epoch = 0u64;
    let mut best_psnr = f64::NEG_INFINITY;

    for stage in protocol {
        if stage.epochs() == 0 {
            continue;
        }
        if stage.minibatch == 0 {
            return Err(SvanError::Usage(format!(
                "{}: minibatch must be >= 1",
                stage.name
            )));
        }
        let steps_per_epoch = options
            .steps_per_epoch
            .unwrap_or_else(|| (dataset.len() / stage.minibatch).max(1));

        // Moment estimates restart with each stage.
        let mut adam = AdamState::new(&params.tensors());

        for epoch in 0..stage.epochs() {
            let lr = lr_at(stage, epoch);
            let patch = stage.patch_at(epoch);
            if patch > dataset.min_lr_dim() {
                return Err(SvanError::Dataset(format!(
                    "{}: patch {patch} larger than the smallest LR image ({})",
                    stage.name,
                    dataset.min_lr_dim()
                )));
            }

            for _ in 0..steps_per_epoch {
                let mut patches = Vec::with_capacity(stage.minibatch);
                for _ in 0..stage.minibatch {
                    let entry = &dataset.entries[rng.random_range(0..dataset.len())];
                    let pair = sample_patch(&entry.lr, &entry.hr, patch, dataset.scale, &mut rng)?;
                    let pair = if options.augment {
                        let code = rng.random_range(0..8u8);
                        augment_pair(&pair.0, &pair.1, code)?
                    } else {
                        pair
                    };
                    patches.push(pair);
                }
                let (lr_batch, hr_batch) = batch_from_patches(&patches);

                let mut tape = Tape::new();
                let input = tape.leaf(lr_batch);
                let target = tape.leaf(hr_batch);
                let (output, vars) = params.forward_taped(&mut tape, input)?;
                let loss_id = match stage.loss {
                    LossKind::L1 => tape.l1_loss(output, target)?,
                    LossKind::L2 => tape.l2_loss(output, target)?,
                };
                let loss = tape.value(loss_id).data()[0];
                if !loss.is_finite() {
                    return Err(SvanError::Training(format!(
                        "non-finite loss {loss} at step {global_step} (stage {}, epoch {epoch})",
                        stage.name
                    )));
                }
                tape.backward(loss_id)?;
                let grads: Vec<Tensor4> = vars.ids().iter().map(|&id| tape.grad(id)).collect();
                adam_step(&mut params.tensors_mut(), &grads, &mut adam, lr)?;

                global_step += 1;
                log.steps.push(StepRecord {
                    step: global_step,
                    epoch: global_epoch,
                    lr,
                    loss,
                });
            }

            global_epoch += 1;
            if options.validate_every > 0 && global_epoch % options.validate_every as u64 == 0 {
                best_psnr = run_validation(
                    &params,
                    val_set,
                    shave,
                    global_epoch,
                    &mut log,
                    options,
                    best_psnr,
                )?;
            }
        }

        if let Some(dir) = &options.out_dir {
            params.save(&dir.join("checkpoints").join(format!("{}.ckpt", stage.name)))?;
        }
    }

    // Closing validation and final checkpoints.
    if protocol.iter().any(|s| s.epochs() > 0) {
        best_psnr = run_validation(
            &params,
            val_set,
            shave,
            global_epoch,
            &mut log,
            options,
            best_psnr,
        )?;
    }
    let _ = best_psnr;
    if let Some(dir) = &options.out_dir {
        params.save(&dir.join("checkpoints").join("last.ckpt"))?;
        std::fs::write(dir.join("logs").join("train_log.csv"), log.steps_csv())
            .map_err(|e| SvanError::io(dir, e))?;
        std::fs::write(dir.join("logs").join("val_log.csv"), log.validations_csv())
            .map_err(|e| SvanError::io(dir, e))?;
    }
    Ok((params, log))
}

fn run_validation(
    params: &SvanParams,
    val_set: &SrDataset,
    shave: usize,
    epoch: u64,
    log: &mut TrainLog,
    options: &TrainOptions,
    best_psnr: f64,
) -> Result<f64> {
    // Skip validation when images are too small for the border shave.
    let report = match evaluate(Some(params), val_set, shave) {
        Ok(r) => r,
        Err(SvanError::Metric(_)) => return Ok(best_psnr),
        Err(e) => return Err(e),
    };
    log.validations.push(ValRecord {
        epoch,
        psnr_y: report.mean_psnr_y,
    });
    if report.mean_psnr_y > best_psnr {
        if let Some(dir) = &options.out_dir {
            params.save(&dir.join("checkpoints").join("best.ckpt"))?;
        }
        return Ok(report.mean_psnr_y);
    }
    Ok(best_psnr)
}

/// Per-image evaluation result; the bicubic columns are the baseline on the
/// same LR input.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    pub id: String,
    pub psnr_y: f64,
    pub ssim_y: f64,
    pub bicubic_psnr_y: f64,
    pub bicubic_ssim_y: f64,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub scale: usize,
    pub shave: usize,
    pub records: Vec<EvalRecord>,
    pub mean_psnr_y: f64,
    pub mean_ssim_y: f64,
    pub mean_bicubic_psnr_y: f64,
    pub mean_bicubic_ssim_y: f64,
}

impl EvalReport {
    /// CSV with a trailing `mean` aggregate row.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("image,psnr_y,ssim_y,bicubic_psnr_y,bicubic_ssim_y\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.4},{:.6},{:.4},{:.6}",
                r.id, r.psnr_y, r.ssim_y, r.bicubic_psnr_y, r.bicubic_ssim_y
            );
        }
        let _ = writeln!(
            out,
            "mean,{:.4},{:.6},{:.4},{:.6}",
            self.mean_psnr_y, self.mean_ssim_y, self.mean_bicubic_psnr_y, self.mean_bicubic_ssim_y
        );
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16}  {:>9}  {:>8}  {:>9}  {:>8}",
            "image", "psnr_y", "ssim_y", "bicubic", "ssim"
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<16}  {:>9.4}  {:>8.6}  {:>9.4}  {:>8.6}",
                r.id, r.psnr_y, r.ssim_y, r.bicubic_psnr_y, r.bicubic_ssim_y
            );
        }
        let _ = writeln!(
            out,
            "{:<16}  {:>9.4}  {:>8.6}  {:>9.4}  {:>8.6}",
            "mean",
            self.mean_psnr_y,
            self.mean_ssim_y,
            self.mean_bicubic_psnr_y,
            self.mean_bicubic_ssim_y
        );
        let _ = writeln!(out, "scale x{}, shave {}", self.scale, self.shave);
        out
    }
}

fn evaluate_with(
    sr_for: &mut dyn FnMut(&DatasetEntry) -> Result<Tensor4>,
    dataset: &SrDataset,
    shave: usize,
) -> Result<EvalReport> {
    if dataset.is_empty() {
        return Err(SvanError::Dataset("evaluation dataset is empty".into()));
    }
    let mut records = Vec::with_capacity(dataset.len());
    let mut sums = [0.0f64; 4];
    for entry in &dataset.entries {
        let bicubic = bicubic_resize(&entry.lr, entry.hr.h(), entry.hr.w())?.clamp(0.0, 1.0);
        let sr = sr_for(entry)?.clamp(0.0, 1.0);
        if sr.shape() != entry.hr.shape() {
            return Err(SvanError::ShapeMismatch {
                context: format!("{}: SR output vs HR", entry.id),
                left: sr.shape().to_vec(),
                right: entry.hr.shape().to_vec(),
            });
        }
        let record = EvalRecord {
            id: entry.id.clone(),
            psnr_y: psnr_y(&sr, &entry.hr, shave)?,
            ssim_y: ssim_y(&sr, &entry.hr, shave)?,
            bicubic_psnr_y: psnr_y(&bicubic, &entry.hr, shave)?,
            bicubic_ssim_y: ssim_y(&bicubic, &entry.hr, shave)?,
        };
        sums[0] += record.psnr_y;
        sums[1] += record.ssim_y;
        sums[2] += record.bicubic_psnr_y;
        sums[3] += record.bicubic_ssim_y;
        records.push(record);
    }
    let n = records.len() as f64;
    Ok(EvalReport {
        scale: dataset.scale,
        shave,
        records,
        mean_psnr_y: sums[0] / n,
        mean_ssim_y: sums[1] / n,
        mean_bicubic_psnr_y: sums[2] / n,
        mean_bicubic_ssim_y: sums[3] / n,
    })
}

/// Evaluates a model (or, with `None`, the bicubic baseline) over a dataset:
/// per-image and mean Y-channel PSNR/SSIM, with the bicubic baseline columns
/// always included.
pub fn evaluate(
    model: Option<&SvanParams>,
    dataset: &SrDataset,
    shave: usize,
) -> Result<EvalReport> {
    match model {
        Some(params) => {
            if params.config().scale != dataset.scale {
                return Err(SvanError::Usage(format!(
                    "checkpoint is x{} but dataset is prepared for x{}",
                    params.config().scale,
                    dataset.scale
                )));
            }
            evaluate_with(&mut |entry| params.forward(&entry.lr), dataset, shave)
        }
        None => evaluate_with(
            &mut |entry| bicubic_resize(&entry.lr, entry.hr.h(), entry.hr.w()),
            dataset,
            shave,
        ),
    }
}

// ---------------------------------------------------------------------------
// Run configuration (plain key=value text file)
// ---------------------------------------------------------------------------

/// Parsed training run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: SvanConfig,
    pub train_dir: PathBuf,
    pub val_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub protocol: Vec<StagePlan>,
    pub steps_per_epoch: Option<usize>,
    pub augment: bool,
    pub validate_every: usize,
    pub shave: Option<usize>,
    pub threads: usize,
}

/// Parses a `key=value` run config; `#` starts a comment. Stage fields are
/// addressed as `stageN.field` against the three-stage default protocol:
/// `epochs`, `lr`, `loss`, `schedule` (`halve:N` / `cosine:N`), `minibatch`,
/// `patch`, or `phases` as `epochs:patch` pairs joined by commas. Setting a
/// stage's epochs to zero skips it. Errors carry the offending line number.
pub fn parse_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| SvanError::io(path, e))?;
    let err = |line: usize, message: String| SvanError::Config {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut scale: Option<usize> = None;
    let mut channels = 32usize;
    let mut blocks = 7usize;
    let mut arrangement = Arrangement::default();
    let mut seed = 0u64;
    let mut train_dir: Option<PathBuf> = None;
    let mut val_dir: Option<PathBuf> = None;
    let mut out_dir: Option<PathBuf> = None;
    let mut protocol = default_protocol();
    let mut steps_per_epoch: Option<usize> = None;
    let mut augment = true;
    let mut validate_every = 50usize;
    let mut shave: Option<usize> = None;
    let mut threads = 1usize;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(lineno, format!("expected key=value, got {raw:?}")))?;
        let (key, value) = (key.trim(), value.trim());

        fn parse<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value.parse::<T>().map_err(|e| format!("{e}"))
        }

        let fail = |m: String| err(lineno, m);
        match key {
            "scale" => scale = Some(parse(value).map_err(fail)?),
            "channels" => channels = parse(value).map_err(fail)?,
            "blocks" => blocks = parse(value).map_err(fail)?,
            "arrangement" => arrangement = value.parse().map_err(|e| fail(format!("{e}")))?,
            "seed" => seed = parse(value).map_err(fail)?,
            "train_dir" => train_dir = Some(PathBuf::from(value)),
            "val_dir" => val_dir = Some(PathBuf::from(value)),
            "out_dir" => out_dir = Some(PathBuf::from(value)),
            "steps_per_epoch" => steps_per_epoch = Some(parse(value).map_err(fail)?),
            "augment" => augment = parse(value).map_err(fail)?,
            "validate_every" => validate_every = parse(value).map_err(fail)?,
            "shave" => shave = Some(parse(value).map_err(fail)?),
            "threads" => threads = parse(value).map_err(fail)?,
            "minibatch" => {
                let m: usize = parse(value).map_err(fail)?;
                for stage in &mut protocol {
                    stage.minibatch = m;
                }
            }
            _ => {
                let (stage_key, field) = key
                    .split_once('.')
                    .ok_or_else(|| err(lineno, format!("unknown key {key:?}")))?;
                let stage_idx = match stage_key {
                    "stage1" => 0usize,
                    "stage2" => 1,
                    "stage3" => 2,
                    other => return Err(err(lineno, format!("unknown stage {other:?}"))),
                };
                let stage = &mut protocol[stage_idx];
                match field {
                    "epochs" => {
                        let total: usize = parse(value).map_err(fail)?;
                        let n = stage.phases.len();
                        for (i, phase) in stage.phases.iter_mut().enumerate() {
                            phase.epochs = total / n + usize::from(i < total % n);
                        }
                    }
                    "lr" => stage.initial_lr = parse(value).map_err(fail)?,
                    "loss" => stage.loss = value.parse().map_err(|e| fail(format!("{e}")))?,
                    "schedule" => {
                        stage.schedule = value.parse().map_err(|e| fail(format!("{e}")))?
                    }
                    "minibatch" => stage.minibatch = parse(value).map_err(fail)?,
                    "patch" => {
                        let p: usize = parse(value).map_err(fail)?;
                        for phase in &mut stage.phases {
                            phase.patch = p;
                        }
                    }
                    "phases" => {
                        let mut phases = Vec::new();
                        for piece in value.split(',') {
                            let (e, p) = piece.trim().split_once(':').ok_or_else(|| {
                                err(lineno, format!("phase {piece:?} must be epochs:patch"))
                            })?;
                            phases.push(PatchPhase {
                                epochs: parse(e.trim()).map_err(fail)?,
                                patch: parse(p.trim()).map_err(fail)?,
                            });
                        }
                        if phases.is_empty() {
                            return Err(err(lineno, "phases list is empty".into()));
                        }
                        stage.phases = phases;
                    }
                    other => return Err(err(lineno, format!("unknown stage field {other:?}"))),
                }
            }
        }
    }

    let scale =
        scale.ok_or_else(|| err(text.lines().count().max(1), "missing key 'scale'".into()))?;
    let train_dir = train_dir.ok_or_else(|| {
        err(
            text.lines().count().max(1),
            "missing key 'train_dir'".into(),
        )
    })?;
    let model = SvanConfig::new(scale)?
        .with_channels(channels)
        .with_blocks(blocks)
        .with_arrangement(arrangement)
        .with_seed(seed);
    model.validate()?;
    Ok(RunConfig {
        model,
        train_dir,
        val_dir,
        out_dir,
        protocol,
        steps_per_epoch,
        augment,
        validate_every,
        shave,
        threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset;
    use crate::image::save_png;

    fn schedule_stage(schedule: Schedule, lr: f64) -> StagePlan {
        StagePlan {
            name: "s".into(),
            phases: vec![PatchPhase {
                epochs: 4000,
                patch: 64,
            }],
            loss: LossKind::L1,
            initial_lr: lr,
            schedule,
            minibatch: 64,
        }
    }

    #[test]
    fn halving_schedule_reference_points() {
        let stage = schedule_stage(Schedule::HalveEvery(500), 1e-3);
        assert_eq!(lr_at(&stage, 0), 1e-3);
        assert_eq!(lr_at(&stage, 499), 1e-3);
        assert_eq!(lr_at(&stage, 500), 5e-4);
        assert_eq!(lr_at(&stage, 1000), 2.5e-4);

        let fine = schedule_stage(Schedule::HalveEvery(300), 5e-4);
        assert_eq!(lr_at(&fine, 300), 2.5e-4);
    }

    #[test]
    fn cosine_schedule_restarts_each_period() {
        let stage = schedule_stage(Schedule::Cosine(20), 1e-4);
        assert_eq!(lr_at(&stage, 0), 1e-4);
        assert!((lr_at(&stage, 10) - 5e-5).abs() < 1e-18);
        assert_eq!(lr_at(&stage, 20), 1e-4);
        for t in 0..60 {
            assert_eq!(lr_at(&stage, t), lr_at(&stage, t + 20));
        }
    }

    #[test]
    fn halving_is_nonincreasing() {
        let stage = schedule_stage(Schedule::HalveEvery(7), 0.5);
        let mut prev = f64::INFINITY;
        for e in 0..100 {
            let lr = lr_at(&stage, e);
            assert!(lr <= prev);
            prev = lr;
        }
    }

    #[test]
    fn default_protocol_constants() {
        let protocol = default_protocol();
        assert_eq!(protocol.len(), 3);
        assert_eq!(protocol[0].epochs(), 2000);
        assert_eq!(protocol[0].initial_lr, 1e-3);
        assert_eq!(protocol[0].schedule, Schedule::HalveEvery(500));
        assert_eq!(protocol[0].loss, LossKind::L1);
        assert_eq!(protocol[1].epochs(), 6000);
        assert_eq!(protocol[1].phases[0].patch, 64);
        assert_eq!(protocol[1].phases[1].patch, 128);
        assert_eq!(protocol[1].schedule, Schedule::Cosine(20));
        assert_eq!(protocol[2].loss, LossKind::L2);
        assert_eq!(protocol[2].initial_lr, 5e-4);
        assert_eq!(protocol[2].schedule, Schedule::HalveEvery(300));
        assert!(protocol.iter().all(|s| s.minibatch == 64));
    }

    fn photo_dataset(dir: &Path, scale: usize) -> SrDataset {
        let hr_dir = dir.join("set");
        std::fs::create_dir(&hr_dir).unwrap();
        let photo = crate::image::load_png(Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/tests/fixtures/photo_96.png"
        )))
        .unwrap();
        save_png(&photo, &hr_dir.join("photo.png")).unwrap();
        load_dataset(&hr_dir, scale).unwrap()
    }

    fn toy_stage(epochs: usize, patch: usize) -> StagePlan {
        StagePlan {
            name: "stage1".into(),
            phases: vec![PatchPhase { epochs, patch }],
            loss: LossKind::L1,
            initial_lr: 1e-3,
            schedule: Schedule::HalveEvery(10_000),
            minibatch: 1,
        }
    }

    fn toy_options() -> TrainOptions {
        TrainOptions {
            steps_per_epoch: Some(1),
            augment: false,
            validate_every: 0,
            shave: Some(2),
            out_dir: None,
            val_dataset: None,
        }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let dir = tempfile::tempdir().unwrap();
        let ds = photo_dataset(dir.path(), 2);
        let config = SvanConfig::new(2)
            .unwrap()
            .with_channels(8)
            .with_blocks(1)
            .with_seed(3);
        let (params, log) = train(&config, &ds, &[toy_stage(0, 16)], &toy_options()).unwrap();
        assert_eq!(params, init_params(&config).unwrap());
        assert!(log.steps.is_empty());
    }

    #[test]
    fn short_run_is_deterministic_and_loss_decreases() {
        let dir = tempfile::tempdir().unwrap();
        let ds = photo_dataset(dir.path(), 2);
        let config = SvanConfig::new(2)
            .unwrap()
            .with_channels(8)
            .with_blocks(1)
            .with_seed(11);
        let stage = toy_stage(30, 16);
        let (_, log_a) = train(&config, &ds, &[stage.clone()], &toy_options()).unwrap();
        let (_, log_b) = train(&config, &ds, &[stage], &toy_options()).unwrap();
        assert_eq!(log_a, log_b);
        assert_eq!(log_a.steps.len(), 30);
        let first = log_a.steps[0].loss;
        let last = log_a.steps.last().unwrap().loss;
        assert!(last < first, "loss did not decrease: {first} -> {last}");
        assert!(log_a.steps.iter().all(|s| s.loss.is_finite()));
    }

    #[test]
    fn evaluate_reports_baseline_and_identity() {
        let dir = tempfile::tempdir().unwrap();
        let ds = photo_dataset(dir.path(), 2);
        // Baseline evaluation: model columns equal the bicubic columns.
        let report = evaluate(None, &ds, 2).unwrap();
        assert_eq!(report.records.len(), 1);
        let r = &report.records[0];
        assert!((r.psnr_y - r.bicubic_psnr_y).abs() < 1e-12);
        assert!(
            r.psnr_y > 20.0,
            "natural-image bicubic PSNR looks wrong: {}",
            r.psnr_y
        );
        assert!(r.ssim_y <= 1.0);

        // Injected SR equal to HR: infinite PSNR, SSIM exactly 1.
        let perfect = evaluate_with(&mut |e| Ok(e.hr.clone()), &ds, 2).unwrap();
        assert_eq!(perfect.records[0].psnr_y, f64::INFINITY);
        assert!((perfect.records[0].ssim_y - 1.0).abs() < 1e-12);

        let csv = report.render_csv();
        assert!(csv.starts_with("image,psnr_y,ssim_y,bicubic_psnr_y,bicubic_ssim_y\n"));
        assert!(csv.lines().last().unwrap().starts_with("mean,"));
    }

    #[test]
    fn evaluate_rejects_scale_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let ds = photo_dataset(dir.path(), 2);
        let params =
            init_params(&SvanConfig::new(4).unwrap().with_channels(8).with_blocks(1)).unwrap();
        assert!(evaluate(Some(&params), &ds, 2).is_err());
    }

    #[test]
    fn run_config_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(
            &path,
            "# toy run\nscale = 2\nchannels = 16\nblocks = 2\narrangement = 1-17-17-1\n\
             seed = 7\ntrain_dir = data/train\nminibatch = 4\nstage1.epochs = 500\n\
             stage1.schedule = halve:100\nstage2.epochs = 0\nstage3.epochs = 0\n\
             stage2.phases = 10:16, 20:32\nsteps_per_epoch = 2\naugment = false\n",
        )
        .unwrap();
        let cfg = parse_run_config(&path).unwrap();
        assert_eq!(cfg.model.scale, 2);
        assert_eq!(cfg.model.base_channels, 16);
        assert_eq!(cfg.model.inner_channels, 32);
        assert_eq!(cfg.model.num_blocks, 2);
        assert_eq!(cfg.model.arrangement, Arrangement::PointFirstThenMirrored);
        assert_eq!(cfg.protocol[0].epochs(), 500);
        assert_eq!(cfg.protocol[0].schedule, Schedule::HalveEvery(100));
        assert_eq!(cfg.protocol[0].minibatch, 4);
        assert_eq!(
            cfg.protocol[1].phases,
            vec![
                PatchPhase {
                    epochs: 10,
                    patch: 16
                },
                PatchPhase {
                    epochs: 20,
                    patch: 32
                }
            ]
        );
        assert_eq!(cfg.protocol[2].epochs(), 0);
        assert_eq!(cfg.steps_per_epoch, Some(2));
        assert!(!cfg.augment);

        // Unknown keys and syntax errors report the line number.
        std::fs::write(&path, "scale = 2\ntrain_dir = x\nbogus_key = 3\n").unwrap();
        match parse_run_config(&path) {
            Err(SvanError::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected config error, got {other:?}"),
        }
        std::fs::write(&path, "scale = 2\nnot a pair\n").unwrap();
        match parse_run_config(&path) {
            Err(SvanError::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_loss_aborts_with_diagnostic() {
        // A NaN in the data poisons the first loss; training must stop with
        // a training error instead of optimizing garbage.
        let dir = tempfile::tempdir().unwrap();
        let mut ds = photo_dataset(dir.path(), 2);
        ds.entries[0].hr.data_mut()[0] = f64::NAN;
        let config = SvanConfig::new(2)
            .unwrap()
            .with_channels(8)
            .with_blocks(1)
            .with_seed(4);
        let mut options = toy_options();
        options.steps_per_epoch = Some(5);
        match train(&config, &ds, &[toy_stage(3, 48)], &options) {
            Err(SvanError::Training(msg)) => assert!(msg.contains("non-finite")),
            other => panic!("expected a training abort, got {other:?}"),
        }
    }

    #[test]
    fn patch_larger_than_lr_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let ds = photo_dataset(dir.path(), 2); // LR is 48x48
        let config = SvanConfig::new(2)
            .unwrap()
            .with_channels(8)
            .with_blocks(1)
            .with_seed(5);
        let stage = toy_stage(2, 64);
        assert!(matches!(
            train(&config, &ds, &[stage], &toy_options()),
            Err(SvanError::Dataset(_))
        ));
    }
}
