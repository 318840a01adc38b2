//! Reverse-mode differentiation over the tensor ops.
//!
//! A [`Tape`] records each operation in execution order, holding the forward
//! values it needs for the backward rule. [`Tape::backward`] replays the
//! records in reverse, accumulating gradients; every node is visited exactly
//! once and variables that never reach the loss keep a zero gradient.

use crate::error::{Result, SvanError};
use crate::tensor::{
    self, conv2d_backward, gelu_grad_scalar, pixel_norm_backward, ConvSpec, Tensor4,
};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarId(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Conv2d {
        input: VarId,
        weight: VarId,
        bias: Option<VarId>,
        spec: ConvSpec,
    },
    Gelu {
        input: VarId,
    },
    Hadamard {
        a: VarId,
        b: VarId,
    },
    Add {
        a: VarId,
        b: VarId,
    },
    PixelShuffle {
        input: VarId,
        scale: usize,
    },
    PixelNorm {
        input: VarId,
        gain: VarId,
        shift: VarId,
    },
    L1Loss {
        pred: VarId,
        target: VarId,
    },
    L2Loss {
        pred: VarId,
        target: VarId,
    },
    Sum {
        input: VarId,
    },
}

struct Node {
    value: Tensor4,
    grad: Option<Tensor4>,
    op: Op,
}

/// Wengert list: forward values plus the recipe to run the chain rule back.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor4, op: Op) -> VarId {
        self.nodes.push(Node {
            value,
            grad: None,
            op,
        });
        VarId(self.nodes.len() - 1)
    }

    /// Registers a leaf value (input or parameter).
    pub fn leaf(&mut self, value: Tensor4) -> VarId {
        self.push(value, Op::Leaf)
    }

    pub fn value(&self, id: VarId) -> &Tensor4 {
        &self.nodes[id.0].value
    }

    /// Accumulated gradient, or `None` if no gradient flowed to this node.
    pub fn grad_opt(&self, id: VarId) -> Option<&Tensor4> {
        self.nodes[id.0].grad.as_ref()
    }

    /// Accumulated gradient; exact zeros when the node is off every path to
    /// the loss.
    pub fn grad(&self, id: VarId) -> Tensor4 {
        match &self.nodes[id.0].grad {
            Some(g) => g.clone(),
            None => {
                let [n, c, h, w] = self.nodes[id.0].value.shape();
                Tensor4::zeros(n, c, h, w)
            }
        }
    }

    pub fn conv2d(
        &mut self,
        input: VarId,
        weight: VarId,
        bias: Option<VarId>,
        spec: &ConvSpec,
    ) -> Result<VarId> {
        let bias_vec = bias.map(|b| self.value(b).data().to_vec());
        let out = tensor::conv2d(
            self.value(input),
            self.value(weight),
            bias_vec.as_deref(),
            spec,
        )?;
        Ok(self.push(
            out,
            Op::Conv2d {
                input,
                weight,
                bias,
                spec: *spec,
            },
        ))
    }

    pub fn gelu(&mut self, input: VarId) -> VarId {
        let out = tensor::gelu(self.value(input));
        self.push(out, Op::Gelu { input })
    }

    pub fn hadamard(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let out = tensor::hadamard(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::Hadamard { a, b }))
    }

    pub fn add(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let out = tensor::add(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::Add { a, b }))
    }

    pub fn pixel_shuffle(&mut self, input: VarId, scale: usize) -> Result<VarId> {
        let out = tensor::pixel_shuffle(self.value(input), scale)?;
        Ok(self.push(out, Op::PixelShuffle { input, scale }))
    }

    /// `gain` and `shift` are `(1, c, 1, 1)` tensors.
    pub fn pixel_norm(&mut self, input: VarId, gain: VarId, shift: VarId) -> Result<VarId> {
        let out = tensor::pixel_norm(
            self.value(input),
            self.value(gain).data(),
            self.value(shift).data(),
        )?;
        Ok(self.push(out, Op::PixelNorm { input, gain, shift }))
    }

    pub fn l1_loss(&mut self, pred: VarId, target: VarId) -> Result<VarId> {
        let loss = tensor::l1_loss(self.value(pred), self.value(target))?;
        Ok(self.push(Tensor4::scalar(loss), Op::L1Loss { pred, target }))
    }

    pub fn l2_loss(&mut self, pred: VarId, target: VarId) -> Result<VarId> {
        let loss = tensor::l2_loss(self.value(pred), self.value(target))?;
        Ok(self.push(Tensor4::scalar(loss), Op::L2Loss { pred, target }))
    }

    pub fn sum(&mut self, input: VarId) -> VarId {
        let total = self.value(input).sum();
        self.push(Tensor4::scalar(total), Op::Sum { input })
    }

    fn accumulate(&mut self, id: VarId, grad: Tensor4) {
        match &mut self.nodes[id.0].grad {
            Some(existing) => {
                for (e, g) in existing.data_mut().iter_mut().zip(grad.data()) {
                    *e += g;
                }
            }
            slot @ None => *slot = Some(grad),
        }
    }

    /// Runs the chain rule from `loss` (which must be scalar) back to every
    /// recorded node.
    pub fn backward(&mut self, loss: VarId) -> Result<()> {
        if self.nodes[loss.0].value.numel() != 1 {
            return Err(SvanError::Gradient(format!(
                "backward requires a scalar loss, got shape {:?}",
                self.nodes[loss.0].value.shape()
            )));
        }
        self.nodes[loss.0].grad = Some(Tensor4::scalar(1.0));

        for idx in (0..=loss.0).rev() {
            let Some(grad_out) = self.nodes[idx].grad.clone() else {
                continue;
            };
            let op = self.nodes[idx].op.clone();
            match op {
                Op::Leaf => {}
                Op::Conv2d {
                    input,
                    weight,
                    bias,
                    spec,
                } => {
                    let (g_in, g_w, g_b) =
                        conv2d_backward(self.value(input), self.value(weight), &spec, &grad_out);
                    self.accumulate(input, g_in);
                    self.accumulate(weight, g_w);
                    if let Some(b) = bias {
                        let c = g_b.len();
                        self.accumulate(b, Tensor4::new(1, c, 1, 1, g_b)?);
                    }
                }
                Op::Gelu { input } => {
                    let x = self.value(input);
                    let mut g = grad_out.clone();
                    for (gv, xv) in g.data_mut().iter_mut().zip(x.data()) {
                        *gv *= gelu_grad_scalar(*xv);
                    }
                    self.accumulate(input, g);
                }
                Op::Hadamard { a, b } => {
                    let ga = tensor::hadamard(&grad_out, self.value(b))?;
                    let gb = tensor::hadamard(&grad_out, self.value(a))?;
                    self.accumulate(a, ga);
                    self.accumulate(b, gb);
                }
                Op::Add { a, b } => {
                    self.accumulate(a, grad_out.clone());
                    self.accumulate(b, grad_out);
                }
                Op::PixelShuffle { input, scale } => {
                    let g = tensor::pixel_unshuffle(&grad_out, scale)?;
                    self.accumulate(input, g);
                }
                Op::PixelNorm { input, gain, shift } => {
                    let grads =
                        pixel_norm_backward(self.value(input), self.value(gain).data(), &grad_out);
                    let c = grads.grad_gain.len();
                    self.accumulate(input, grads.grad_input);
                    self.accumulate(gain, Tensor4::new(1, c, 1, 1, grads.grad_gain)?);
                    self.accumulate(shift, Tensor4::new(1, c, 1, 1, grads.grad_shift)?);
                }
                Op::L1Loss { pred, target } => {
                    let seed = grad_out.data()[0];
                    let p = self.value(pred);
                    let t = self.value(target);
                    let scale = seed / p.numel() as f64;
                    let gp_data: Vec<f64> = p
                        .data()
                        .iter()
                        .zip(t.data())
                        .map(|(pv, tv)| {
                            let d = pv - tv;
                            if d > 0.0 {
                                scale
                            } else if d < 0.0 {
                                -scale
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    let [n, c, h, w] = p.shape();
                    let gp = Tensor4::new(n, c, h, w, gp_data)?;
                    let gt = gp.map(|v| -v);
                    self.accumulate(pred, gp);
                    self.accumulate(target, gt);
                }
                Op::L2Loss { pred, target } => {
                    let seed = grad_out.data()[0];
                    let p = self.value(pred);
                    let t = self.value(target);
                    let scale = 2.0 * seed / p.numel() as f64;
                    let gp_data: Vec<f64> = p
                        .data()
                        .iter()
                        .zip(t.data())
                        .map(|(pv, tv)| scale * (pv - tv))
                        .collect();
                    let [n, c, h, w] = p.shape();
                    let gp = Tensor4::new(n, c, h, w, gp_data)?;
                    let gt = gp.map(|v| -v);
                    self.accumulate(pred, gp);
                    self.accumulate(target, gt);
                }
                Op::Sum { input } => {
                    let seed = grad_out.data()[0];
                    let [n, c, h, w] = self.value(input).shape();
                    self.accumulate(input, Tensor4::full(n, c, h, w, seed));
                }
            }
        }
        Ok(())
    }
}
