//! Static efficiency accounting: parameter counts, multiply-accumulate
//! totals under two conventions, and receptive-field arithmetic for stride-1
//! convolution chains.
//!
//! The two MAC conventions differ in more than padding:
//!
//! * [`Convention::Valid`] counts `(h - k_eff + 1) * (w - k_eff + 1)` output
//!   positions per layer, each layer evaluated on the full `h x w` input
//!   independently, and excludes bias adds. This is the convention under
//!   which the classic dense-vs-decomposed kernel comparison comes out at
//!   0.0143 / 0.1498 / 0.0098 GMACs on a 256x256 RGB image.
//! * [`Convention::SamePadded`] counts `h * w` positions per layer and
//!   includes one add per bias element, which makes the whole-network totals
//!   collapse to (conv parameters including biases) * h * w.
//!
//! Pixel normalization, GELU and elementwise ops contribute zero MACs under
//! both conventions; pixel-norm gain/shift still count as parameters.

use std::fmt::Write as _;

use crate::error::{Result, SvanError};
use crate::model::SvanConfig;

/// Conv layer description for accounting purposes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: String,
    pub kernel: usize,
    pub dilation: usize,
    pub groups: usize,
    pub in_channels: usize,
    pub out_channels: usize,
    pub bias: bool,
}

impl LayerSpec {
    pub fn dense(name: &str, in_channels: usize, out_channels: usize, kernel: usize) -> Self {
        LayerSpec {
            name: name.to_string(),
            kernel,
            dilation: 1,
            groups: 1,
            in_channels,
            out_channels,
            bias: true,
        }
    }

    pub fn depthwise(name: &str, channels: usize, kernel: usize, dilation: usize) -> Self {
        LayerSpec {
            name: name.to_string(),
            kernel,
            dilation,
            groups: channels,
            in_channels: channels,
            out_channels: channels,
            bias: true,
        }
    }

    pub fn kernel_extent(&self) -> usize {
        (self.kernel - 1) * self.dilation + 1
    }

    /// Weight parameters plus bias parameters.
    pub fn params(&self) -> u64 {
        let weights =
            (self.out_channels * (self.in_channels / self.groups) * self.kernel * self.kernel)
                as u64;
        weights
            + if self.bias {
                self.out_channels as u64
            } else {
                0
            }
    }

    fn macs(&self, h: usize, w: usize, convention: Convention) -> Result<u64> {
        let taps = (self.in_channels / self.groups) * self.kernel * self.kernel;
        match convention {
            Convention::SamePadded => {
                let per_position = taps + usize::from(self.bias);
                Ok((h * w) as u64 * (self.out_channels * per_position) as u64)
            }
            Convention::Valid => {
                let k_eff = self.kernel_extent();
                if h < k_eff || w < k_eff {
                    return Err(SvanError::Dimension(format!(
                        "layer {}: valid output for {h}x{w} input with extent {k_eff} is empty",
                        self.name
                    )));
                }
                let positions = ((h - k_eff + 1) * (w - k_eff + 1)) as u64;
                Ok(positions * (self.out_channels * taps) as u64)
            }
        }
    }
}

/// One accounted element of a network: a conv layer or a pixel normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainEntry {
    Conv(LayerSpec),
    PixelNorm { name: String, channels: usize },
}

impl ChainEntry {
    pub fn name(&self) -> &str {
        match self {
            ChainEntry::Conv(l) => &l.name,
            ChainEntry::PixelNorm { name, .. } => name,
        }
    }

    pub fn params(&self) -> u64 {
        match self {
            ChainEntry::Conv(l) => l.params(),
            ChainEntry::PixelNorm { channels, .. } => 2 * *channels as u64,
        }
    }

    fn macs(&self, h: usize, w: usize, convention: Convention) -> Result<u64> {
        match self {
            ChainEntry::Conv(l) => l.macs(h, w, convention),
            ChainEntry::PixelNorm { .. } => Ok(0),
        }
    }

    /// Standalone receptive field of the entry (1 for non-conv entries).
    pub fn receptive_field(&self) -> usize {
        match self {
            ChainEntry::Conv(l) => l.kernel_extent(),
            ChainEntry::PixelNorm { .. } => 1,
        }
    }
}

/// MAC counting convention; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    SamePadded,
    Valid,
}

impl Convention {
    pub fn label(&self) -> &'static str {
        match self {
            Convention::SamePadded => "same-padded",
            Convention::Valid => "valid",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = SvanError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "padded" | "same-padded" | "same" => Ok(Convention::SamePadded),
            "valid" => Ok(Convention::Valid),
            other => Err(SvanError::Usage(format!(
                "unknown convention {other:?}; expected 'padded' or 'valid'"
            ))),
        }
    }
}

/// Per-layer accounting row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub name: String,
    pub params: u64,
    pub macs: u64,
    /// Standalone receptive field of this layer.
    pub rf: usize,
}

/// Accounting result; totals always equal the sum of the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub rows: Vec<ReportRow>,
    pub total_params: u64,
    pub total_macs: u64,
    /// Receptive field of the whole chain, `1 + sum(k_eff - 1)`.
    pub receptive_field: usize,
    /// `None` for parameter-only reports.
    pub convention: Option<Convention>,
    /// Image size the MACs were computed for.
    pub image_size: Option<(usize, usize)>,
}

impl EfficiencyReport {
    /// Aligned text table plus a convention footer.
    pub fn render_text(&self) -> String {
        let name_w = self
            .rows
            .iter()
            .map(|r| r.name.len())
            .chain(["total".len()])
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<name_w$}  {:>12}  {:>14}  {:>4}",
            "layer", "params", "macs", "rf"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<name_w$}  {:>12}  {:>14}  {:>4}",
                r.name, r.params, r.macs, r.rf
            );
        }
        let _ = writeln!(
            out,
            "{:<name_w$}  {:>12}  {:>14}  {:>4}",
            "total", self.total_params, self.total_macs, self.receptive_field
        );
        match (self.convention, self.image_size) {
            (Some(c), Some((h, w))) => {
                let gmacs = self.total_macs as f64 / 1e9;
                let _ = writeln!(
                    out,
                    "convention: {} at {}x{} ({:.4} GMACs, {:.1}K params)",
                    c.label(),
                    h,
                    w,
                    gmacs,
                    self.total_params as f64 / 1e3
                );
            }
            _ => {
                let _ = writeln!(out, "params only ({:.3}K)", self.total_params as f64 / 1e3);
            }
        }
        out
    }

    /// CSV with stable header `name,params,macs,rf` and a total row.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("name,params,macs,rf\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.name, r.params, r.macs, r.rf);
        }
        let _ = writeln!(
            out,
            "total,{},{},{}",
            self.total_params, self.total_macs, self.receptive_field
        );
        out
    }
}

/// Chain receptive field for stride-1 layers: `1 + sum(k_eff - 1)`.
/// Empty chains report 1.
pub fn receptive_field(chain: &[ChainEntry]) -> usize {
    1 + chain.iter().map(|e| e.receptive_field() - 1).sum::<usize>()
}

fn build_report(
    chain: &[ChainEntry],
    size: Option<(usize, usize, Convention)>,
) -> Result<EfficiencyReport> {
    let mut rows = Vec::with_capacity(chain.len());
    let mut total_params = 0u64;
    let mut total_macs = 0u64;
    for entry in chain {
        let params = entry.params();
        let macs = match size {
            Some((h, w, convention)) => entry.macs(h, w, convention)?,
            None => 0,
        };
        total_params += params;
        total_macs += macs;
        rows.push(ReportRow {
            name: entry.name().to_string(),
            params,
            macs,
            rf: entry.receptive_field(),
        });
    }
    Ok(EfficiencyReport {
        rows,
        total_params,
        total_macs,
        receptive_field: receptive_field(chain),
        convention: size.map(|(_, _, c)| c),
        image_size: size.map(|(h, w, _)| (h, w)),
    })
}

/// Parameter-only report for an arbitrary chain.
pub fn count_params(chain: &[ChainEntry]) -> EfficiencyReport {
    build_report(chain, None).expect("parameter counting cannot fail")
}

/// MAC report for an arbitrary chain at the given image size.
pub fn count_flops(
    chain: &[ChainEntry],
    h: usize,
    w: usize,
    convention: Convention,
) -> Result<EfficiencyReport> {
    build_report(chain, Some((h, w, convention)))
}

/// The network's full layer chain, names matching the checkpoint layout.
pub fn svan_chain(config: &SvanConfig) -> Vec<ChainEntry> {
    let specs = config.specs();
    let conv = |name: String, spec: crate::tensor::ConvSpec| {
        ChainEntry::Conv(LayerSpec {
            name,
            kernel: spec.kernel,
            dilation: spec.dilation,
            groups: spec.groups,
            in_channels: spec.in_channels,
            out_channels: spec.out_channels,
            bias: true,
        })
    };
    let mut chain = vec![conv("shallow".into(), specs.shallow)];
    for i in 0..config.num_blocks {
        let b = format!("blocks.{i}");
        chain.push(conv(format!("{b}.expand"), specs.expand));
        chain.push(conv(format!("{b}.upper_point"), specs.point));
        chain.push(conv(format!("{b}.upper_dwd"), specs.dwd));
        chain.push(conv(format!("{b}.upper_dw"), specs.dw));
        chain.push(conv(format!("{b}.mid"), specs.mid));
        chain.push(conv(format!("{b}.lower_dw"), specs.dw));
        chain.push(conv(format!("{b}.lower_dwd"), specs.dwd));
        chain.push(conv(format!("{b}.lower_point"), specs.point));
        chain.push(conv(format!("{b}.reduce"), specs.reduce));
        chain.push(ChainEntry::PixelNorm {
            name: format!("{b}.norm"),
            channels: config.base_channels,
        });
    }
    chain.push(conv("refine".into(), specs.refine));
    chain.push(conv("recon".into(), specs.recon));
    chain
}

/// Parameter report for the whole network (arrangement- and size-independent).
pub fn count_svan_params(config: &SvanConfig) -> EfficiencyReport {
    count_params(&svan_chain(config))
}

/// MAC report for the whole network.
pub fn count_svan_flops(
    config: &SvanConfig,
    h: usize,
    w: usize,
    convention: Convention,
) -> Result<EfficiencyReport> {
    count_flops(&svan_chain(config), h, w, convention)
}

/// Dense large kernel versus its depth-wise decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompComparison {
    pub receptive_field: usize,
    pub dense: EfficiencyReport,
    /// Pair plus the 1x1 point conv.
    pub decomposed: EfficiencyReport,
    /// Parameters of the depth-wise pair alone (the headline figure).
    pub pair_params: u64,
    /// MACs of the pair plus the point conv (the headline figure).
    pub decomposed_macs: u64,
    /// `pair_params / dense params`.
    pub param_ratio: f64,
    /// `decomposed_macs / dense macs`.
    pub macs_ratio: f64,
}

impl DecompComparison {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let (h, w) = self.dense.image_size.unwrap_or((0, 0));
        let _ = writeln!(
            out,
            "{:<14}  {:>16}  {:>10}  {:>10}",
            "conv", "receptive field", "params[K]", "macs[G]"
        );
        let _ = writeln!(
            out,
            "{:<14}  {:>16}  {:>10.3}  {:>10.4}",
            self.dense.rows[0].name,
            self.receptive_field,
            self.dense.total_params as f64 / 1e3,
            self.dense.total_macs as f64 / 1e9
        );
        let _ = writeln!(
            out,
            "{:<14}  {:>16}  {:>10.3}  {:>10.4}",
            "dw & dw-d",
            self.receptive_field,
            self.pair_params as f64 / 1e3,
            self.decomposed_macs as f64 / 1e9
        );
        let _ = writeln!(
            out,
            "ratios: params {:.1}%, macs {:.1}% (valid convention at {h}x{w}; pair params exclude the point conv, macs include it)",
            self.param_ratio * 100.0,
            self.macs_ratio * 100.0
        );
        out
    }
}

/// Compares a dense `k_large` kernel with the depth-wise decomposition
/// `{k_dw depth-wise, k_dw depth-wise dilated by d}` (plus a 1x1 point conv
/// in the MAC column) on `channels`-channel `h x w` inputs under the valid
/// convention.
///
/// The receptive fields of the two sides must match:
/// `(k_dw - 1) * (1 + d) + 1 == k_large`. The degenerate request
/// `(k, k, 1)` means "no decomposition" and compares the dense kernel with
/// itself.
pub fn compare_decompositions(
    k_large: usize,
    k_dw: usize,
    dilation: usize,
    channels: usize,
    h: usize,
    w: usize,
) -> Result<DecompComparison> {
    if k_large == 0 || k_large % 2 == 0 || k_dw == 0 || k_dw % 2 == 0 {
        return Err(SvanError::Usage(
            "kernel sizes must be odd and positive".into(),
        ));
    }
    let dense_chain = vec![ChainEntry::Conv(LayerSpec::dense(
        &format!("{k_large}x{k_large}"),
        channels,
        channels,
        k_large,
    ))];

    let degenerate = dilation == 1 && k_dw == k_large;
    let (decomposed_chain, pair_params) = if degenerate {
        (dense_chain.clone(), dense_chain[0].params())
    } else {
        let rf_pair = (k_dw - 1) * (1 + dilation) + 1;
        if rf_pair != k_large {
            return Err(SvanError::Usage(format!(
                "receptive field mismatch: dw pair ({k_dw}, d={dilation}) reaches {rf_pair}, dense kernel is {k_large}"
            )));
        }
        let dw = ChainEntry::Conv(LayerSpec::depthwise(
            &format!("{k_dw}x{k_dw} dw"),
            channels,
            k_dw,
            1,
        ));
        let dwd = ChainEntry::Conv(LayerSpec::depthwise(
            &format!("{k_dw}x{k_dw} dw-d{dilation}"),
            channels,
            k_dw,
            dilation,
        ));
        let point = ChainEntry::Conv(LayerSpec::dense("1x1 point", channels, channels, 1));
        let pair_params = dw.params() + dwd.params();
        (vec![dw, dwd, point], pair_params)
    };

    let dense = count_flops(&dense_chain, h, w, Convention::Valid)?;
    let decomposed = count_flops(&decomposed_chain, h, w, Convention::Valid)?;
    if dense.receptive_field != decomposed.receptive_field {
        return Err(SvanError::Usage(format!(
            "receptive field mismatch: {} vs {}",
            dense.receptive_field, decomposed.receptive_field
        )));
    }
    Ok(DecompComparison {
        receptive_field: dense.receptive_field,
        param_ratio: pair_params as f64 / dense.total_params as f64,
        macs_ratio: decomposed.total_macs as f64 / dense.total_macs as f64,
        pair_params,
        decomposed_macs: decomposed.total_macs,
        dense,
        decomposed,
    })
}
