//! The super-resolution network: a shallow 3x3 extraction conv, a chain of
//! symmetric large-kernel attention blocks, a depth-wise dilated refinement
//! conv with a long skip, and a conv + pixel-shuffle reconstruction head.
//!
//! Each attention block expands 32 -> 64 channels, runs two mirrored gated
//! branches built from a {5x5 depth-wise, 5x5 depth-wise dilation-3} pair
//! (receptive field 17) and a 1x1 point conv (receptive field 1), then
//! reduces back to 32 channels, adds the block input and applies per-position
//! channel normalization. The [`Arrangement`] decides whether the point conv
//! runs before or after the large-kernel pair in each branch.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Result, SvanError};
use crate::tape::{Tape, VarId};
use crate::tensor::{self, ConvSpec, Tensor4};

/// Number of image channels at the network boundary.
pub const IMAGE_CHANNELS: usize = 3;

const CHECKPOINT_MAGIC: &[u8; 8] = b"SVANCKPT";
const CHECKPOINT_VERSION: u32 = 1;

/// Order of receptive-field sizes inside the two attention branches.
///
/// A label `a-b-c-d` lists the receptive fields seen along the upper branch
/// (`a` then `b`) and the lower branch (`c` then `d`), where `17` is the
/// depth-wise pair and `1` is the point conv.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arrangement {
    /// `17-1-1-17`: pair first above, point conv first below (default).
    #[default]
    LargeFirstThenMirrored,
    /// `17-1-17-1`: pair first in both branches.
    LargeFirstBoth,
    /// `1-17-1-17`: point conv first in both branches.
    PointFirstBoth,
    /// `1-17-17-1`: point conv first above, pair first below.
    PointFirstThenMirrored,
}

impl Arrangement {
    pub const ALL: [Arrangement; 4] = [
        Arrangement::LargeFirstThenMirrored,
        Arrangement::LargeFirstBoth,
        Arrangement::PointFirstBoth,
        Arrangement::PointFirstThenMirrored,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Arrangement::LargeFirstThenMirrored => "17-1-1-17",
            Arrangement::LargeFirstBoth => "17-1-17-1",
            Arrangement::PointFirstBoth => "1-17-1-17",
            Arrangement::PointFirstThenMirrored => "1-17-17-1",
        }
    }

    fn index(&self) -> u32 {
        Arrangement::ALL
            .iter()
            .position(|a| a == self)
            .expect("arrangement listed in ALL") as u32
    }

    fn from_index(index: u32) -> Option<Arrangement> {
        Arrangement::ALL.get(index as usize).copied()
    }

    /// Whether the point conv precedes the pair in the (upper, lower) branch.
    fn point_first(&self) -> (bool, bool) {
        match self {
            Arrangement::LargeFirstThenMirrored => (false, true),
            Arrangement::LargeFirstBoth => (false, false),
            Arrangement::PointFirstBoth => (true, true),
            Arrangement::PointFirstThenMirrored => (true, false),
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Arrangement {
    type Err = SvanError;

    fn from_str(s: &str) -> Result<Self> {
        Arrangement::ALL
            .iter()
            .copied()
            .find(|a| a.label() == s)
            .ok_or_else(|| {
                SvanError::Usage(format!(
                    "unknown arrangement {s:?}; expected one of {}",
                    Arrangement::ALL.map(|a| a.label()).join(", ")
                ))
            })
    }
}

/// Model hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvanConfig {
    /// Upscale factor, 2, 3 or 4.
    pub scale: usize,
    /// Channel width outside the blocks (32 in the reference setup).
    pub base_channels: usize,
    /// Channel width inside the blocks; always `2 * base_channels`.
    pub inner_channels: usize,
    pub num_blocks: usize,
    pub arrangement: Arrangement,
    pub seed: u64,
}

impl SvanConfig {
    pub fn new(scale: usize) -> Result<Self> {
        let config = SvanConfig {
            scale,
            base_channels: 32,
            inner_channels: 64,
            num_blocks: 7,
            arrangement: Arrangement::default(),
            seed: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_channels(mut self, base_channels: usize) -> Self {
        self.base_channels = base_channels;
        self.inner_channels = 2 * base_channels;
        self
    }

    pub fn with_blocks(mut self, num_blocks: usize) -> Self {
        self.num_blocks = num_blocks;
        self
    }

    pub fn with_arrangement(mut self, arrangement: Arrangement) -> Self {
        self.arrangement = arrangement;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.scale) {
            return Err(SvanError::Usage(format!(
                "scale must be 2, 3 or 4, got {}",
                self.scale
            )));
        }
        if self.base_channels == 0 || self.num_blocks == 0 {
            return Err(SvanError::Usage(
                "base_channels and num_blocks must be >= 1".into(),
            ));
        }
        if self.inner_channels != 2 * self.base_channels {
            return Err(SvanError::Usage(format!(
                "inner_channels must be 2 * base_channels ({} vs {})",
                self.inner_channels, self.base_channels
            )));
        }
        Ok(())
    }

    /// Conv layer descriptions shared by init, forward, analysis and the
    /// checkpoint layout.
    pub fn specs(&self) -> SvanSpecs {
        let base = self.base_channels;
        let inner = self.inner_channels;
        // Constructors only fail on invalid kernel/group arithmetic, which
        // cannot happen for a validated config.
        SvanSpecs {
            shallow: ConvSpec::dense(IMAGE_CHANNELS, base, 3).unwrap(),
            expand: ConvSpec::dense(base, inner, 1).unwrap(),
            point: ConvSpec::dense(inner, inner, 1).unwrap(),
            dwd: ConvSpec::depthwise(inner, 5, 3).unwrap(),
            dw: ConvSpec::depthwise(inner, 5, 1).unwrap(),
            mid: ConvSpec::dense(inner, inner, 1).unwrap(),
            reduce: ConvSpec::dense(inner, base, 1).unwrap(),
            refine: ConvSpec::depthwise(base, 3, 3).unwrap(),
            recon: ConvSpec::dense(base, IMAGE_CHANNELS * self.scale * self.scale, 3).unwrap(),
        }
    }
}

/// Conv specs for every distinct layer role.
#[derive(Debug, Clone, Copy)]
pub struct SvanSpecs {
    pub shallow: ConvSpec,
    pub expand: ConvSpec,
    pub point: ConvSpec,
    pub dwd: ConvSpec,
    pub dw: ConvSpec,
    pub mid: ConvSpec,
    pub reduce: ConvSpec,
    pub refine: ConvSpec,
    pub recon: ConvSpec,
}

/// Weight plus per-output-channel bias, stored as `(1, c, 1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvPair<T> {
    pub weight: T,
    pub bias: T,
}

/// Per-channel gain and shift of the pixel normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct NormPair<T> {
    pub gain: T,
    pub shift: T,
}

/// One attention block's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SlkabParams<T> {
    pub expand: ConvPair<T>,
    pub upper_point: ConvPair<T>,
    pub upper_dwd: ConvPair<T>,
    pub upper_dw: ConvPair<T>,
    pub mid: ConvPair<T>,
    pub lower_dw: ConvPair<T>,
    pub lower_dwd: ConvPair<T>,
    pub lower_point: ConvPair<T>,
    pub reduce: ConvPair<T>,
    pub norm: NormPair<T>,
}

/// All layers of the network, generic over the value type so the same
/// structure can carry tensors or tape variable ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SvanLayers<T> {
    pub shallow: ConvPair<T>,
    pub blocks: Vec<SlkabParams<T>>,
    pub refine: ConvPair<T>,
    pub recon: ConvPair<T>,
}

/// What a parameter slot holds, with enough information to derive its shape.
#[derive(Debug, Clone, Copy)]
pub enum ParamKind {
    ConvWeight(ConvSpec),
    ConvBias(usize),
    NormGain(usize),
    NormShift(usize),
}

impl ParamKind {
    pub fn shape(&self) -> [usize; 4] {
        match self {
            ParamKind::ConvWeight(spec) => spec.weight_shape(),
            ParamKind::ConvBias(c) | ParamKind::NormGain(c) | ParamKind::NormShift(c) => {
                [1, *c, 1, 1]
            }
        }
    }
}

/// Builds the layer structure by calling `make` once per parameter in the
/// canonical (checkpoint) order.
fn build_layers<T>(
    config: &SvanConfig,
    make: &mut impl FnMut(String, ParamKind) -> Result<T>,
) -> Result<SvanLayers<T>> {
    fn conv<T>(
        make: &mut impl FnMut(String, ParamKind) -> Result<T>,
        name: &str,
        spec: ConvSpec,
    ) -> Result<ConvPair<T>> {
        Ok(ConvPair {
            weight: make(format!("{name}.weight"), ParamKind::ConvWeight(spec))?,
            bias: make(
                format!("{name}.bias"),
                ParamKind::ConvBias(spec.out_channels),
            )?,
        })
    }

    let specs = config.specs();
    let shallow = conv(make, "shallow", specs.shallow)?;
    let mut blocks = Vec::with_capacity(config.num_blocks);
    for i in 0..config.num_blocks {
        let b = format!("blocks.{i}");
        let expand = conv(make, &format!("{b}.expand"), specs.expand)?;
        let upper_point = conv(make, &format!("{b}.upper_point"), specs.point)?;
        let upper_dwd = conv(make, &format!("{b}.upper_dwd"), specs.dwd)?;
        let upper_dw = conv(make, &format!("{b}.upper_dw"), specs.dw)?;
        let mid = conv(make, &format!("{b}.mid"), specs.mid)?;
        let lower_dw = conv(make, &format!("{b}.lower_dw"), specs.dw)?;
        let lower_dwd = conv(make, &format!("{b}.lower_dwd"), specs.dwd)?;
        let lower_point = conv(make, &format!("{b}.lower_point"), specs.point)?;
        let reduce = conv(make, &format!("{b}.reduce"), specs.reduce)?;
        let norm = NormPair {
            gain: make(
                format!("{b}.norm.gain"),
                ParamKind::NormGain(config.base_channels),
            )?,
            shift: make(
                format!("{b}.norm.shift"),
                ParamKind::NormShift(config.base_channels),
            )?,
        };
        blocks.push(SlkabParams {
            expand,
            upper_point,
            upper_dwd,
            upper_dw,
            mid,
            lower_dw,
            lower_dwd,
            lower_point,
            reduce,
            norm,
        });
    }
    let refine = conv(make, "refine", specs.refine)?;
    let recon = conv(make, "recon", specs.recon)?;
    Ok(SvanLayers {
        shallow,
        blocks,
        refine,
        recon,
    })
}

/// `(name, kind)` for every parameter in canonical order.
pub fn param_layout(config: &SvanConfig) -> Vec<(String, ParamKind)> {
    let mut out = Vec::new();
    build_layers(config, &mut |name, kind| {
        out.push((name, kind));
        Ok(())
    })
    .expect("layout construction is infallible");
    out
}

/// The learnable state of a network, tied to its configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SvanParams {
    config: SvanConfig,
    layers: SvanLayers<Tensor4>,
}

/// Deterministic initialization: every conv weight is uniform in
/// `+-sqrt(1 / fan_in)` with `fan_in = in_channels_per_group * k^2`, biases
/// and norm shifts start at zero, norm gains at one. The draw order is the
/// canonical parameter order, so a seed pins every value.
pub fn init_params(config: &SvanConfig) -> Result<SvanParams> {
    config.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let layers = build_layers(config, &mut |_, kind| {
        let [n, c, h, w] = kind.shape();
        let tensor = match kind {
            ParamKind::ConvWeight(spec) => {
                let fan_in = (spec.in_channels_per_group() * spec.kernel * spec.kernel) as f64;
                let bound = (1.0 / fan_in).sqrt();
                let data = (0..n * c * h * w)
                    .map(|_| rng.random_range(-bound..bound))
                    .collect();
                Tensor4::new(n, c, h, w, data)?
            }
            ParamKind::ConvBias(_) | ParamKind::NormShift(_) => Tensor4::zeros(n, c, h, w),
            ParamKind::NormGain(_) => Tensor4::full(n, c, h, w, 1.0),
        };
        Ok(tensor)
    })?;
    Ok(SvanParams {
        config: *config,
        layers,
    })
}

impl SvanParams {
    pub fn config(&self) -> &SvanConfig {
        &self.config
    }

    pub fn layers(&self) -> &SvanLayers<Tensor4> {
        &self.layers
    }

    /// Parameter tensors in canonical order.
    pub fn named_tensors(&self) -> Vec<(String, &Tensor4)> {
        param_layout(&self.config)
            .into_iter()
            .map(|(name, _)| name)
            .zip(self.tensors())
            .collect()
    }

    /// Flat view of the tensors in canonical order.
    pub fn tensors(&self) -> Vec<&Tensor4> {
        fn pair<'a>(out: &mut Vec<&'a Tensor4>, p: &'a ConvPair<Tensor4>) {
            out.push(&p.weight);
            out.push(&p.bias);
        }
        let mut out = Vec::new();
        pair(&mut out, &self.layers.shallow);
        for b in &self.layers.blocks {
            pair(&mut out, &b.expand);
            pair(&mut out, &b.upper_point);
            pair(&mut out, &b.upper_dwd);
            pair(&mut out, &b.upper_dw);
            pair(&mut out, &b.mid);
            pair(&mut out, &b.lower_dw);
            pair(&mut out, &b.lower_dwd);
            pair(&mut out, &b.lower_point);
            pair(&mut out, &b.reduce);
            out.push(&b.norm.gain);
            out.push(&b.norm.shift);
        }
        pair(&mut out, &self.layers.refine);
        pair(&mut out, &self.layers.recon);
        out
    }

    /// Mutable flat view, same order as [`SvanParams::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor4> {
        fn pair<'a>(out: &mut Vec<&'a mut Tensor4>, p: &'a mut ConvPair<Tensor4>) {
            out.push(&mut p.weight);
            out.push(&mut p.bias);
        }
        let mut out = Vec::new();
        pair(&mut out, &mut self.layers.shallow);
        for b in &mut self.layers.blocks {
            pair(&mut out, &mut b.expand);
            pair(&mut out, &mut b.upper_point);
            pair(&mut out, &mut b.upper_dwd);
            pair(&mut out, &mut b.upper_dw);
            pair(&mut out, &mut b.mid);
            pair(&mut out, &mut b.lower_dw);
            pair(&mut out, &mut b.lower_dwd);
            pair(&mut out, &mut b.lower_point);
            pair(&mut out, &mut b.reduce);
            out.push(&mut b.norm.gain);
            out.push(&mut b.norm.shift);
        }
        pair(&mut out, &mut self.layers.refine);
        pair(&mut out, &mut self.layers.recon);
        out
    }

    pub fn total_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.numel()).sum()
    }

    /// Inference forward pass; intermediates are dropped as soon as possible.
    pub fn forward(&self, input: &Tensor4) -> Result<Tensor4> {
        let mut ops = EvalOps;
        svan_forward(&mut ops, &self.layers, &self.config, input.clone())
    }

    /// Forward pass recorded on `tape`. Returns the output id and the layer
    /// ids, so callers can read per-parameter gradients after `backward`.
    pub fn forward_taped(
        &self,
        tape: &mut Tape,
        input: VarId,
    ) -> Result<(VarId, SvanLayers<VarId>)> {
        let vars = self.register_on(tape);
        let out = svan_forward(tape, &vars, &self.config, input)?;
        Ok((out, vars))
    }

    /// Registers every parameter as a tape leaf, mirroring the structure.
    pub fn register_on(&self, tape: &mut Tape) -> SvanLayers<VarId> {
        let conv = |tape: &mut Tape, pair: &ConvPair<Tensor4>| ConvPair {
            weight: tape.leaf(pair.weight.clone()),
            bias: tape.leaf(pair.bias.clone()),
        };
        SvanLayers {
            shallow: conv(tape, &self.layers.shallow),
            blocks: self
                .layers
                .blocks
                .iter()
                .map(|b| SlkabParams {
                    expand: conv(tape, &b.expand),
                    upper_point: conv(tape, &b.upper_point),
                    upper_dwd: conv(tape, &b.upper_dwd),
                    upper_dw: conv(tape, &b.upper_dw),
                    mid: conv(tape, &b.mid),
                    lower_dw: conv(tape, &b.lower_dw),
                    lower_dwd: conv(tape, &b.lower_dwd),
                    lower_point: conv(tape, &b.lower_point),
                    reduce: conv(tape, &b.reduce),
                    norm: NormPair {
                        gain: tape.leaf(b.norm.gain.clone()),
                        shift: tape.leaf(b.norm.shift.clone()),
                    },
                })
                .collect(),
            refine: conv(tape, &self.layers.refine),
            recon: conv(tape, &self.layers.recon),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_params(self, path)
    }

    pub fn load(path: &Path) -> Result<SvanParams> {
        load_params(path)
    }
}

impl SvanLayers<VarId> {
    /// Variable ids in canonical order (matches [`SvanParams::tensors`]).
    pub fn ids(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        let conv = |out: &mut Vec<VarId>, pair: &ConvPair<VarId>| {
            out.push(pair.weight);
            out.push(pair.bias);
        };
        conv(&mut out, &self.shallow);
        for b in &self.blocks {
            conv(&mut out, &b.expand);
            conv(&mut out, &b.upper_point);
            conv(&mut out, &b.upper_dwd);
            conv(&mut out, &b.upper_dw);
            conv(&mut out, &b.mid);
            conv(&mut out, &b.lower_dw);
            conv(&mut out, &b.lower_dwd);
            conv(&mut out, &b.lower_point);
            conv(&mut out, &b.reduce);
            out.push(b.norm.gain);
            out.push(b.norm.shift);
        }
        conv(&mut out, &self.refine);
        conv(&mut out, &self.recon);
        out
    }
}

/// Execution context for the forward pass: tensors directly, or tape records.
pub trait Ops {
    type V: Clone;

    fn conv2d(
        &mut self,
        x: &Self::V,
        weight: &Self::V,
        bias: &Self::V,
        spec: &ConvSpec,
    ) -> Result<Self::V>;
    fn gelu(&mut self, x: &Self::V) -> Self::V;
    fn hadamard(&mut self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn add(&mut self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn pixel_shuffle(&mut self, x: &Self::V, scale: usize) -> Result<Self::V>;
    fn pixel_norm(&mut self, x: &Self::V, gain: &Self::V, shift: &Self::V) -> Result<Self::V>;
}

/// Immediate evaluation on plain tensors.
pub struct EvalOps;

impl Ops for EvalOps {
    type V = Tensor4;

    fn conv2d(
        &mut self,
        x: &Tensor4,
        weight: &Tensor4,
        bias: &Tensor4,
        spec: &ConvSpec,
    ) -> Result<Tensor4> {
        tensor::conv2d(x, weight, Some(bias.data()), spec)
    }

    fn gelu(&mut self, x: &Tensor4) -> Tensor4 {
        tensor::gelu(x)
    }

    fn hadamard(&mut self, a: &Tensor4, b: &Tensor4) -> Result<Tensor4> {
        tensor::hadamard(a, b)
    }

    fn add(&mut self, a: &Tensor4, b: &Tensor4) -> Result<Tensor4> {
        tensor::add(a, b)
    }

    fn pixel_shuffle(&mut self, x: &Tensor4, scale: usize) -> Result<Tensor4> {
        tensor::pixel_shuffle(x, scale)
    }

    fn pixel_norm(&mut self, x: &Tensor4, gain: &Tensor4, shift: &Tensor4) -> Result<Tensor4> {
        tensor::pixel_norm(x, gain.data(), shift.data())
    }
}

impl Ops for Tape {
    type V = VarId;

    fn conv2d(
        &mut self,
        x: &VarId,
        weight: &VarId,
        bias: &VarId,
        spec: &ConvSpec,
    ) -> Result<VarId> {
        Tape::conv2d(self, *x, *weight, Some(*bias), spec)
    }

    fn gelu(&mut self, x: &VarId) -> VarId {
        Tape::gelu(self, *x)
    }

    fn hadamard(&mut self, a: &VarId, b: &VarId) -> Result<VarId> {
        Tape::hadamard(self, *a, *b)
    }

    fn add(&mut self, a: &VarId, b: &VarId) -> Result<VarId> {
        Tape::add(self, *a, *b)
    }

    fn pixel_shuffle(&mut self, x: &VarId, scale: usize) -> Result<VarId> {
        Tape::pixel_shuffle(self, *x, scale)
    }

    fn pixel_norm(&mut self, x: &VarId, gain: &VarId, shift: &VarId) -> Result<VarId> {
        Tape::pixel_norm(self, *x, *gain, *shift)
    }
}

fn conv<O: Ops>(ops: &mut O, x: &O::V, pair: &ConvPair<O::V>, spec: &ConvSpec) -> Result<O::V> {
    ops.conv2d(x, &pair.weight, &pair.bias, spec)
}

/// One attention branch: the depth-wise pair and the point conv, in the
/// order the arrangement dictates. The upper branch runs its pair as
/// dilated-then-plain, the lower branch mirrors it as plain-then-dilated.
fn attention_branch<O: Ops>(
    ops: &mut O,
    x: &O::V,
    first_dw: (&ConvPair<O::V>, &ConvSpec),
    then_dw: (&ConvPair<O::V>, &ConvSpec),
    point: (&ConvPair<O::V>, &ConvSpec),
    point_first: bool,
) -> Result<O::V> {
    let pair = |ops: &mut O, x: &O::V| -> Result<O::V> {
        let a = conv(ops, x, first_dw.0, first_dw.1)?;
        conv(ops, &a, then_dw.0, then_dw.1)
    };
    if point_first {
        let p = conv(ops, x, point.0, point.1)?;
        pair(ops, &p)
    } else {
        let a = pair(ops, x)?;
        conv(ops, &a, point.0, point.1)
    }
}

/// One block: expand + GELU, gated upper branch, mid conv, gated lower
/// branch, reduce, skip connection, pixel normalization.
pub fn slkab_forward<O: Ops>(
    ops: &mut O,
    block: &SlkabParams<O::V>,
    specs: &SvanSpecs,
    arrangement: Arrangement,
    x: &O::V,
) -> Result<O::V> {
    let (upper_point_first, lower_point_first) = arrangement.point_first();

    let expanded = conv(ops, x, &block.expand, &specs.expand)?;
    let x_c1 = ops.gelu(&expanded);

    let m1 = attention_branch(
        ops,
        &x_c1,
        (&block.upper_dwd, &specs.dwd),
        (&block.upper_dw, &specs.dw),
        (&block.upper_point, &specs.point),
        upper_point_first,
    )?;
    let x_att1 = ops.hadamard(&m1, &x_c1)?;

    let x_c2 = conv(ops, &x_att1, &block.mid, &specs.mid)?;

    let m2 = attention_branch(
        ops,
        &x_c2,
        (&block.lower_dw, &specs.dw),
        (&block.lower_dwd, &specs.dwd),
        (&block.lower_point, &specs.point),
        lower_point_first,
    )?;
    let x_att2 = ops.hadamard(&m2, &x_c2)?;

    let reduced = conv(ops, &x_att2, &block.reduce, &specs.reduce)?;
    let skip = ops.add(&reduced, x)?;
    ops.pixel_norm(&skip, &block.norm.gain, &block.norm.shift)
}

/// Full forward pass: shallow conv, block chain, refine + long skip,
/// reconstruction conv and pixel shuffle. The output is not clamped.
pub fn svan_forward<O: Ops>(
    ops: &mut O,
    layers: &SvanLayers<O::V>,
    config: &SvanConfig,
    input: O::V,
) -> Result<O::V> {
    let specs = config.specs();
    let x0 = conv(ops, &input, &layers.shallow, &specs.shallow)?;
    let mut x = x0.clone();
    for block in &layers.blocks {
        x = slkab_forward(ops, block, &specs, config.arrangement, &x)?;
    }
    let refined = conv(ops, &x, &layers.refine, &specs.refine)?;
    let x_map = ops.add(&refined, &x0)?;
    let pre_shuffle = conv(ops, &x_map, &layers.recon, &specs.recon)?;
    ops.pixel_shuffle(&pre_shuffle, config.scale)
}

// ---------------------------------------------------------------------------
// Checkpoint format: magic, version, config record, then a count-prefixed
// table of (name, dims, f64 little-endian payload) entries.
// ---------------------------------------------------------------------------

fn ck_err(path: &Path, message: impl Into<String>) -> SvanError {
    SvanError::Checkpoint {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn save_params(params: &SvanParams, path: &Path) -> Result<()> {
    let config = params.config;
    let mut buf = Vec::new();
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(config.scale as u32).to_le_bytes());
    buf.extend_from_slice(&(config.base_channels as u32).to_le_bytes());
    buf.extend_from_slice(&(config.inner_channels as u32).to_le_bytes());
    buf.extend_from_slice(&(config.num_blocks as u32).to_le_bytes());
    buf.extend_from_slice(&config.arrangement.index().to_le_bytes());
    buf.extend_from_slice(&config.seed.to_le_bytes());

    let named = params.named_tensors();
    buf.extend_from_slice(&(named.len() as u32).to_le_bytes());
    for (name, tensor) in named {
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&4u32.to_le_bytes());
        for d in tensor.shape() {
            buf.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in tensor.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, buf).map_err(|e| SvanError::io(path, e))
}

struct CheckpointReader<'a> {
    path: &'a Path,
    bytes: Vec<u8>,
    pos: usize,
}

impl<'a> CheckpointReader<'a> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(ck_err(self.path, "file truncated"));
        }
        let slice = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn read_u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn read_u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn load_params(path: &Path) -> Result<SvanParams> {
    let mut file = std::fs::File::open(path).map_err(|e| SvanError::io(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)
        .map_err(|e| SvanError::io(path, e))?;
    let mut r = CheckpointReader {
        path,
        bytes,
        pos: 0,
    };

    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(ck_err(path, "bad magic; not a checkpoint file"));
    }
    let version = r.read_u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(ck_err(
            path,
            format!("unsupported version {version}, expected {CHECKPOINT_VERSION}"),
        ));
    }
    let scale = r.read_u32()? as usize;
    let base_channels = r.read_u32()? as usize;
    let inner_channels = r.read_u32()? as usize;
    let num_blocks = r.read_u32()? as usize;
    let arrangement_idx = r.read_u32()?;
    let seed = r.read_u64()?;
    let arrangement = Arrangement::from_index(arrangement_idx)
        .ok_or_else(|| ck_err(path, format!("invalid arrangement index {arrangement_idx}")))?;
    let config = SvanConfig {
        scale,
        base_channels,
        inner_channels,
        num_blocks,
        arrangement,
        seed,
    };
    config
        .validate()
        .map_err(|e| ck_err(path, format!("invalid embedded config: {e}")))?;

    let count = r.read_u32()? as usize;
    let mut table: HashMap<String, Tensor4> = HashMap::with_capacity(count);
    for _ in 0..count {
        let name_len = r.read_u32()? as usize;
        let name = String::from_utf8(r.take(name_len)?.to_vec())
            .map_err(|_| ck_err(path, "tensor name is not UTF-8"))?;
        let ndim = r.read_u32()? as usize;
        if ndim != 4 {
            return Err(ck_err(
                path,
                format!("tensor {name}: expected 4 dims, got {ndim}"),
            ));
        }
        let mut dims = [0usize; 4];
        for d in &mut dims {
            *d = r.read_u32()? as usize;
        }
        let numel: usize = dims.iter().product();
        let raw = r.take(numel * 8)?;
        let data: Vec<f64> = raw
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        let tensor = Tensor4::new(dims[0], dims[1], dims[2], dims[3], data)
            .map_err(|e| ck_err(path, format!("tensor {name}: {e}")))?;
        if table.insert(name.clone(), tensor).is_some() {
            return Err(ck_err(path, format!("duplicate tensor {name}")));
        }
    }
    if r.pos != r.bytes.len() {
        return Err(ck_err(path, "trailing bytes after tensor table"));
    }

    let expected = param_layout(&config);
    if table.len() != expected.len() {
        return Err(ck_err(
            path,
            format!("expected {} tensors, found {}", expected.len(), table.len()),
        ));
    }
    let layers = build_layers(&config, &mut |name, kind| {
        let tensor = table
            .remove(&name)
            .ok_or_else(|| ck_err(path, format!("missing tensor {name}")))?;
        let want = kind.shape();
        if tensor.shape() != want {
            return Err(ck_err(
                path,
                format!(
                    "shape mismatch for {name}: file has {:?}, config wants {:?}",
                    tensor.shape(),
                    want
                ),
            ));
        }
        Ok(tensor)
    })?;
    Ok(SvanParams { config, layers })
}
