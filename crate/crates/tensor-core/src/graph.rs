use crate::kernels;
use crate::{Scalar, Tensor, TensorError};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
enum Op<F: Scalar> {
    Leaf,
    MatMul { a: NodeId, b: NodeId },
    AddRow { x: NodeId, bias: NodeId },
    MulRow { x: NodeId, row: NodeId },
    Add { a: NodeId, b: NodeId },
    Sub { a: NodeId, b: NodeId },
    Mul { a: NodeId, b: NodeId },
    AddConst { x: NodeId },
    MulConst { x: NodeId, c: F },
    SubScalar { x: NodeId, s: NodeId },
    Relu { x: NodeId },
    Gelu { x: NodeId },
    Tanh { x: NodeId },
    Exp { x: NodeId },
    Ln { x: NodeId },
    LnFloor { x: NodeId, floor: F },
    Clamp { x: NodeId, lo: F, hi: F },
    SumAll { x: NodeId },
    MeanAll { x: NodeId },
    RowSum { x: NodeId },
    SoftmaxRows { x: NodeId },
    Transpose { x: NodeId },
    Reshape { x: NodeId },
    CropRows { x: NodeId },
    ZeroPad1d { x: NodeId, left: usize },
    Conv1d { x: NodeId, w: NodeId, stride: usize, kernel: usize },
    TConv1d { x: NodeId, w: NodeId, stride: usize },
    Frame { x: NodeId, win: usize, hop: usize },
    SpectralPower { x: NodeId },
    WeightedNll { logits: NodeId, class: usize, weight: F },
    LayerNorm { x: NodeId, gamma: NodeId, beta: NodeId, eps: F },
}

#[derive(Debug)]
struct Node<F: Scalar> {
    value: Tensor<F>,
    grad: Option<Vec<F>>,
    requires_grad: bool,
    op: Op<F>,
}

/// Reverse-mode tape. Ops append nodes; `backward` walks the tape in
/// reverse and accumulates gradients into every node that requires them.
///
/// Forward values are `F`; a graph instantiated at `f64` runs the identical
/// code with double precision, which is what the gradient checker uses.
pub struct Graph<F: Scalar> {
    nodes: Vec<Node<F>>,
    fft_planner: FftPlanner<F>,
}

impl<F: Scalar> Default for Graph<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Scalar> Graph<F> {
    pub fn new() -> Self {
        Graph {
            nodes: Vec::new(),
            fft_planner: FftPlanner::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor<F> {
        &self.nodes[id.0].value
    }

    /// Gradient filled in by `backward`, shaped like the node's value.
    pub fn grad(&self, id: NodeId) -> Option<Tensor<F>> {
        let node = &self.nodes[id.0];
        node.grad.as_ref().map(|g| Tensor {
            shape: node.value.shape.clone(),
            data: g.clone(),
        })
    }

    pub fn requires_grad(&self, id: NodeId) -> bool {
        self.nodes[id.0].requires_grad
    }

    fn push(
        &mut self,
        op_name: &'static str,
        value: Tensor<F>,
        requires_grad: bool,
        op: Op<F>,
    ) -> Result<NodeId, TensorError> {
        if !value.is_finite() {
            return Err(TensorError::NonFinite { op: op_name });
        }
        self.nodes.push(Node {
            value,
            grad: None,
            requires_grad,
            op,
        });
        Ok(NodeId(self.nodes.len() - 1))
    }

    fn any_requires(&self, ids: &[NodeId]) -> bool {
        ids.iter().any(|id| self.nodes[id.0].requires_grad)
    }

    /// Inserts a tensor as a differentiable or constant input.
    pub fn leaf(&mut self, t: Tensor<F>, requires_grad: bool) -> Result<NodeId, TensorError> {
        self.push("leaf", t, requires_grad, Op::Leaf)
    }

    /// Constant input; gradients never flow into it.
    pub fn constant(&mut self, t: Tensor<F>) -> Result<NodeId, TensorError> {
        self.leaf(t, false)
    }

    fn expect_rank2(&self, op: &'static str, id: NodeId) -> Result<(usize, usize), TensorError> {
        let s = &self.nodes[id.0].value.shape;
        if s.len() != 2 {
            return Err(TensorError::ShapeMismatch {
                op,
                expected: "rank-2 tensor".into(),
                got: format!("{s:?}"),
            });
        }
        Ok((s[0], s[1]))
    }

    // ── Linear algebra ──────────────────────────────────────────────

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        let (m, ka) = self.expect_rank2("matmul", a)?;
        let (kb, n) = self.expect_rank2("matmul", b)?;
        if ka != kb {
            return Err(TensorError::ShapeMismatch {
                op: "matmul",
                expected: format!("inner dims to agree ([{m}, {ka}] x [{kb}, {n}])"),
                got: format!("{ka} vs {kb}"),
            });
        }
        let data = kernels::matmul(
            &self.nodes[a.0].value.data,
            &self.nodes[b.0].value.data,
            m,
            ka,
            n,
        );
        let rg = self.any_requires(&[a, b]);
        self.push(
            "matmul",
            Tensor {
                shape: vec![m, n],
                data,
            },
            rg,
            Op::MatMul { a, b },
        )
    }

    /// Row-broadcast bias add: `[T, d] + [d]`.
    pub fn add_row(&mut self, x: NodeId, bias: NodeId) -> Result<NodeId, TensorError> {
        let (t, d) = self.expect_rank2("add_row", x)?;
        if self.nodes[bias.0].value.shape != vec![d] {
            return Err(TensorError::ShapeMismatch {
                op: "add_row",
                expected: format!("bias [{d}]"),
                got: format!("{:?}", self.nodes[bias.0].value.shape),
            });
        }
        let xd = &self.nodes[x.0].value.data;
        let bd = &self.nodes[bias.0].value.data;
        let mut data = Vec::with_capacity(t * d);
        for r in 0..t {
            for j in 0..d {
                data.push(xd[r * d + j] + bd[j]);
            }
        }
        let rg = self.any_requires(&[x, bias]);
        self.push(
            "add_row",
            Tensor {
                shape: vec![t, d],
                data,
            },
            rg,
            Op::AddRow { x, bias },
        )
    }

    /// Row-broadcast multiply: `[T, d] * [d]`.
    pub fn mul_row(&mut self, x: NodeId, row: NodeId) -> Result<NodeId, TensorError> {
        let (t, d) = self.expect_rank2("mul_row", x)?;
        if self.nodes[row.0].value.shape != vec![d] {
            return Err(TensorError::ShapeMismatch {
                op: "mul_row",
                expected: format!("row [{d}]"),
                got: format!("{:?}", self.nodes[row.0].value.shape),
            });
        }
        let xd = &self.nodes[x.0].value.data;
        let rd = &self.nodes[row.0].value.data;
        let mut data = Vec::with_capacity(t * d);
        for r in 0..t {
            for j in 0..d {
                data.push(xd[r * d + j] * rd[j]);
            }
        }
        let rg = self.any_requires(&[x, row]);
        self.push(
            "mul_row",
            Tensor {
                shape: vec![t, d],
                data,
            },
            rg,
            Op::MulRow { x, row },
        )
    }

    /// Affine layer `x @ w + b` for `x` of shape `[T, in]`.
    pub fn linear(&mut self, x: NodeId, w: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        let y = self.matmul(x, w)?;
        self.add_row(y, b)
    }

    // ── Pointwise ───────────────────────────────────────────────────

    fn same_shape(&self, op: &'static str, a: NodeId, b: NodeId) -> Result<(), TensorError> {
        if self.nodes[a.0].value.shape != self.nodes[b.0].value.shape {
            return Err(TensorError::ShapeMismatch {
                op,
                expected: format!("{:?}", self.nodes[a.0].value.shape),
                got: format!("{:?}", self.nodes[b.0].value.shape),
            });
        }
        Ok(())
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        self.same_shape("add", a, b)?;
        let data = self.nodes[a.0]
            .value
            .data
            .iter()
            .zip(&self.nodes[b.0].value.data)
            .map(|(&x, &y)| x + y)
            .collect();
        let shape = self.nodes[a.0].value.shape.clone();
        let rg = self.any_requires(&[a, b]);
        self.push("add", Tensor { shape, data }, rg, Op::Add { a, b })
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        self.same_shape("sub", a, b)?;
        let data = self.nodes[a.0]
            .value
            .data
            .iter()
            .zip(&self.nodes[b.0].value.data)
            .map(|(&x, &y)| x - y)
            .collect();
        let shape = self.nodes[a.0].value.shape.clone();
        let rg = self.any_requires(&[a, b]);
        self.push("sub", Tensor { shape, data }, rg, Op::Sub { a, b })
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        self.same_shape("mul", a, b)?;
        let data = self.nodes[a.0]
            .value
            .data
            .iter()
            .zip(&self.nodes[b.0].value.data)
            .map(|(&x, &y)| x * y)
            .collect();
        let shape = self.nodes[a.0].value.shape.clone();
        let rg = self.any_requires(&[a, b]);
        self.push("mul", Tensor { shape, data }, rg, Op::Mul { a, b })
    }

    pub fn add_const(&mut self, x: NodeId, c: F) -> Result<NodeId, TensorError> {
        let data = self.nodes[x.0].value.data.iter().map(|&v| v + c).collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("add_const", Tensor { shape, data }, rg, Op::AddConst { x })
    }

    pub fn mul_const(&mut self, x: NodeId, c: F) -> Result<NodeId, TensorError> {
        let data = self.nodes[x.0].value.data.iter().map(|&v| v * c).collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("mul_const", Tensor { shape, data }, rg, Op::MulConst { x, c })
    }

    /// Subtracts a scalar node (shape `[1]`) from every element.
    pub fn sub_scalar(&mut self, x: NodeId, s: NodeId) -> Result<NodeId, TensorError> {
        if self.nodes[s.0].value.data.len() != 1 {
            return Err(TensorError::NotScalar {
                op: "sub_scalar",
                shape: self.nodes[s.0].value.shape.clone(),
            });
        }
        let sv = self.nodes[s.0].value.data[0];
        let data = self.nodes[x.0].value.data.iter().map(|&v| v - sv).collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.any_requires(&[x, s]);
        self.push("sub_scalar", Tensor { shape, data }, rg, Op::SubScalar { x, s })
    }

    pub fn relu(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let data = self.nodes[x.0]
            .value
            .data
            .iter()
            .map(|&v| if v > F::zero() { v } else { F::zero() })
            .collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("relu", Tensor { shape, data }, rg, Op::Relu { x })
    }

    pub fn gelu(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let data = self.nodes[x.0]
            .value
            .data
            .iter()
            .map(|&v| gelu_forward(v))
            .collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("gelu", Tensor { shape, data }, rg, Op::Gelu { x })
    }

    pub fn tanh(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let data = self.nodes[x.0].value.data.iter().map(|&v| v.tanh()).collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("tanh", Tensor { shape, data }, rg, Op::Tanh { x })
    }

    pub fn exp(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let data = self.nodes[x.0].value.data.iter().map(|&v| v.exp()).collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("exp", Tensor { shape, data }, rg, Op::Exp { x })
    }

    pub fn ln(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        for &v in &self.nodes[x.0].value.data {
            if v <= F::zero() {
                return Err(TensorError::Domain {
                    op: "ln",
                    detail: format!("log of non-positive value {}", v.as_f64()),
                });
            }
        }
        let data = self.nodes[x.0].value.data.iter().map(|&v| v.ln()).collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("ln", Tensor { shape, data }, rg, Op::Ln { x })
    }

    /// `ln(max(x, floor))`; gradient is zero wherever the floor binds.
    pub fn ln_floor(&mut self, x: NodeId, floor: F) -> Result<NodeId, TensorError> {
        if floor <= F::zero() {
            return Err(TensorError::InvalidArg {
                op: "ln_floor",
                detail: "floor must be positive".into(),
            });
        }
        let data = self.nodes[x.0]
            .value
            .data
            .iter()
            .map(|&v| v.max(floor).ln())
            .collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("ln_floor", Tensor { shape, data }, rg, Op::LnFloor { x, floor })
    }

    /// Hard clamp; gradient passes only strictly inside the interval.
    pub fn clamp(&mut self, x: NodeId, lo: F, hi: F) -> Result<NodeId, TensorError> {
        if lo >= hi {
            return Err(TensorError::InvalidArg {
                op: "clamp",
                detail: "lo must be below hi".into(),
            });
        }
        let data = self.nodes[x.0]
            .value
            .data
            .iter()
            .map(|&v| v.max(lo).min(hi))
            .collect();
        let shape = self.nodes[x.0].value.shape.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push("clamp", Tensor { shape, data }, rg, Op::Clamp { x, lo, hi })
    }

    // ── Reductions and reshapes ─────────────────────────────────────

    pub fn sum_all(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let mut acc = F::zero();
        for &v in &self.nodes[x.0].value.data {
            acc = acc + v;
        }
        let rg = self.nodes[x.0].requires_grad;
        self.push("sum_all", Tensor::scalar(acc), rg, Op::SumAll { x })
    }

    pub fn mean_all(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let n = self.nodes[x.0].value.data.len();
        if n == 0 {
            return Err(TensorError::InvalidArg {
                op: "mean_all",
                detail: "mean of an empty tensor".into(),
            });
        }
        let mut acc = F::zero();
        for &v in &self.nodes[x.0].value.data {
            acc = acc + v;
        }
        let mean = acc / F::of(n as f64);
        let rg = self.nodes[x.0].requires_grad;
        self.push("mean_all", Tensor::scalar(mean), rg, Op::MeanAll { x })
    }

    /// Sums each row of `[T, K]` into a length-`T` vector.
    pub fn row_sum(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let (t, k) = self.expect_rank2("row_sum", x)?;
        let xd = &self.nodes[x.0].value.data;
        let mut data = Vec::with_capacity(t);
        for r in 0..t {
            let mut acc = F::zero();
            for j in 0..k {
                acc = acc + xd[r * k + j];
            }
            data.push(acc);
        }
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "row_sum",
            Tensor {
                shape: vec![t],
                data,
            },
            rg,
            Op::RowSum { x },
        )
    }

    /// Numerically stable per-row softmax (max subtraction).
    pub fn softmax_rows(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let (t, d) = self.expect_rank2("softmax_rows", x)?;
        let xd = &self.nodes[x.0].value.data;
        let mut data = vec![F::zero(); t * d];
        for r in 0..t {
            let row = &xd[r * d..(r + 1) * d];
            let mut mx = row[0];
            for &v in row {
                mx = mx.max(v);
            }
            let mut denom = F::zero();
            for (j, &v) in row.iter().enumerate() {
                let e = (v - mx).exp();
                data[r * d + j] = e;
                denom = denom + e;
            }
            for j in 0..d {
                data[r * d + j] = data[r * d + j] / denom;
            }
        }
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "softmax_rows",
            Tensor {
                shape: vec![t, d],
                data,
            },
            rg,
            Op::SoftmaxRows { x },
        )
    }

    pub fn transpose(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let (m, n) = self.expect_rank2("transpose", x)?;
        let data = kernels::transpose(&self.nodes[x.0].value.data, m, n);
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "transpose",
            Tensor {
                shape: vec![n, m],
                data,
            },
            rg,
            Op::Transpose { x },
        )
    }

    pub fn reshape(&mut self, x: NodeId, shape: &[usize]) -> Result<NodeId, TensorError> {
        let n: usize = shape.iter().product();
        if n != self.nodes[x.0].value.data.len() {
            return Err(TensorError::ShapeMismatch {
                op: "reshape",
                expected: format!("{} elements", self.nodes[x.0].value.data.len()),
                got: format!("{shape:?}"),
            });
        }
        let data = self.nodes[x.0].value.data.clone();
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "reshape",
            Tensor {
                shape: shape.to_vec(),
                data,
            },
            rg,
            Op::Reshape { x },
        )
    }

    /// Keeps the first `keep` rows of a rank-2 tensor.
    pub fn crop_rows(&mut self, x: NodeId, keep: usize) -> Result<NodeId, TensorError> {
        let (t, d) = self.expect_rank2("crop_rows", x)?;
        if keep > t {
            return Err(TensorError::InvalidArg {
                op: "crop_rows",
                detail: format!("cannot keep {keep} of {t} rows"),
            });
        }
        let data = self.nodes[x.0].value.data[..keep * d].to_vec();
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "crop_rows",
            Tensor {
                shape: vec![keep, d],
                data,
            },
            rg,
            Op::CropRows { x },
        )
    }

    /// Zero padding along the time axis of a `[C, T]` tensor.
    pub fn zero_pad1d(&mut self, x: NodeId, left: usize, right: usize) -> Result<NodeId, TensorError> {
        let (c, t) = self.expect_rank2("zero_pad1d", x)?;
        let xd = &self.nodes[x.0].value.data;
        let t_out = left + t + right;
        let mut data = vec![F::zero(); c * t_out];
        for ch in 0..c {
            data[ch * t_out + left..ch * t_out + left + t]
                .copy_from_slice(&xd[ch * t..(ch + 1) * t]);
        }
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "zero_pad1d",
            Tensor {
                shape: vec![c, t_out],
                data,
            },
            rg,
            Op::ZeroPad1d { x, left },
        )
    }

    // ── Convolutions and spectra ────────────────────────────────────

    /// Valid (unpadded) 1-d convolution.
    ///
    /// `x` is `[C_in, T]`, `w` is `[C_out, C_in * kernel]`, output
    /// `[C_out, (T - kernel) / stride + 1]`.
    pub fn conv1d(
        &mut self,
        x: NodeId,
        w: NodeId,
        kernel: usize,
        stride: usize,
    ) -> Result<NodeId, TensorError> {
        let (c_in, t) = self.expect_rank2("conv1d", x)?;
        let (c_out, wk) = self.expect_rank2("conv1d", w)?;
        if stride == 0 || kernel == 0 {
            return Err(TensorError::InvalidArg {
                op: "conv1d",
                detail: "kernel and stride must be nonzero".into(),
            });
        }
        if wk != c_in * kernel {
            return Err(TensorError::ShapeMismatch {
                op: "conv1d",
                expected: format!("weight [{c_out}, {}]", c_in * kernel),
                got: format!("[{c_out}, {wk}]"),
            });
        }
        if t < kernel {
            return Err(TensorError::InvalidArg {
                op: "conv1d",
                detail: format!("input length {t} shorter than kernel {kernel}"),
            });
        }
        let t_out = (t - kernel) / stride + 1;
        let cols = im2col(&self.nodes[x.0].value.data, c_in, t, kernel, stride, t_out);
        let data = kernels::matmul(
            &self.nodes[w.0].value.data,
            &cols,
            c_out,
            c_in * kernel,
            t_out,
        );
        let rg = self.any_requires(&[x, w]);
        self.push(
            "conv1d",
            Tensor {
                shape: vec![c_out, t_out],
                data,
            },
            rg,
            Op::Conv1d { x, w, stride, kernel },
        )
    }

    /// Transposed 1-d convolution with kernel fixed at twice the stride.
    ///
    /// `x` is `[C_in, T]`, `w` is `[C_in, C_out * 2 * stride]`, output
    /// `[C_out, T * stride]` (the transient tail is trimmed).
    pub fn tconv1d(&mut self, x: NodeId, w: NodeId, stride: usize) -> Result<NodeId, TensorError> {
        let (c_in, t) = self.expect_rank2("tconv1d", x)?;
        let (wc_in, w_cols) = self.expect_rank2("tconv1d", w)?;
        if stride == 0 {
            return Err(TensorError::InvalidArg {
                op: "tconv1d",
                detail: "stride must be nonzero".into(),
            });
        }
        let kernel = 2 * stride;
        if wc_in != c_in || w_cols % kernel != 0 {
            return Err(TensorError::ShapeMismatch {
                op: "tconv1d",
                expected: format!("weight [{c_in}, C_out * {kernel}]"),
                got: format!("[{wc_in}, {w_cols}]"),
            });
        }
        let c_out = w_cols / kernel;
        let w_t = kernels::transpose(&self.nodes[w.0].value.data, c_in, w_cols);
        let cols = kernels::matmul(&w_t, &self.nodes[x.0].value.data, w_cols, c_in, t);
        let t_out = t * stride;
        let t_ext = t_out + stride;
        let mut ext = vec![F::zero(); c_out * t_ext];
        for co in 0..c_out {
            for p in 0..kernel {
                let col_row = &cols[(co * kernel + p) * t..(co * kernel + p + 1) * t];
                let dst = &mut ext[co * t_ext..(co + 1) * t_ext];
                for (tt, &v) in col_row.iter().enumerate() {
                    dst[tt * stride + p] = dst[tt * stride + p] + v;
                }
            }
        }
        let mut data = Vec::with_capacity(c_out * t_out);
        for co in 0..c_out {
            data.extend_from_slice(&ext[co * t_ext..co * t_ext + t_out]);
        }
        let rg = self.any_requires(&[x, w]);
        self.push(
            "tconv1d",
            Tensor {
                shape: vec![c_out, t_out],
                data,
            },
            rg,
            Op::TConv1d { x, w, stride },
        )
    }

    /// Slices a 1-d signal into overlapping frames of `win` every `hop`.
    pub fn frame(&mut self, x: NodeId, win: usize, hop: usize) -> Result<NodeId, TensorError> {
        let shape = &self.nodes[x.0].value.shape;
        if shape.len() != 1 {
            return Err(TensorError::ShapeMismatch {
                op: "frame",
                expected: "rank-1 signal".into(),
                got: format!("{shape:?}"),
            });
        }
        let n = shape[0];
        if win == 0 || hop == 0 {
            return Err(TensorError::InvalidArg {
                op: "frame",
                detail: "window and hop must be nonzero".into(),
            });
        }
        if n < win {
            return Err(TensorError::InvalidArg {
                op: "frame",
                detail: format!("signal length {n} shorter than window {win}"),
            });
        }
        let t = (n - win) / hop + 1;
        let xd = &self.nodes[x.0].value.data;
        let mut data = Vec::with_capacity(t * win);
        for r in 0..t {
            data.extend_from_slice(&xd[r * hop..r * hop + win]);
        }
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "frame",
            Tensor {
                shape: vec![t, win],
                data,
            },
            rg,
            Op::Frame { x, win, hop },
        )
    }

    /// Per-row power spectrum: each length-`nfft` row becomes the squared
    /// magnitudes of its first `nfft / 2 + 1` DFT bins.
    pub fn spectral_power(&mut self, x: NodeId) -> Result<NodeId, TensorError> {
        let (t, nfft) = self.expect_rank2("spectral_power", x)?;
        if nfft == 0 || nfft % 2 != 0 {
            return Err(TensorError::InvalidArg {
                op: "spectral_power",
                detail: format!("row length {nfft} must be even and nonzero"),
            });
        }
        let nb = nfft / 2 + 1;
        let fft = self.fft_planner.plan_fft_forward(nfft);
        let xd = &self.nodes[x.0].value.data;
        let mut buf = vec![Complex::new(F::zero(), F::zero()); nfft];
        let mut data = vec![F::zero(); t * nb];
        for r in 0..t {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = Complex::new(xd[r * nfft + i], F::zero());
            }
            fft.process(&mut buf);
            for k in 0..nb {
                data[r * nb + k] = buf[k].re * buf[k].re + buf[k].im * buf[k].im;
            }
        }
        let rg = self.nodes[x.0].requires_grad;
        self.push(
            "spectral_power",
            Tensor {
                shape: vec![t, nb],
                data,
            },
            rg,
            Op::SpectralPower { x },
        )
    }

    // ── Losses and normalization ────────────────────────────────────

    /// `weight * (logsumexp(logits) - logits[class])` for logits `[1, C]`.
    pub fn weighted_nll(
        &mut self,
        logits: NodeId,
        class: usize,
        weight: F,
    ) -> Result<NodeId, TensorError> {
        let (rows, c) = self.expect_rank2("weighted_nll", logits)?;
        if rows != 1 || class >= c {
            return Err(TensorError::InvalidArg {
                op: "weighted_nll",
                detail: format!("logits [1, C] with class < C required, got [{rows}, {c}] class {class}"),
            });
        }
        let row = &self.nodes[logits.0].value.data;
        let mut mx = row[0];
        for &v in row {
            mx = mx.max(v);
        }
        let mut denom = F::zero();
        for &v in row {
            denom = denom + (v - mx).exp();
        }
        let lse = mx + denom.ln();
        let loss = weight * (lse - row[class]);
        let rg = self.nodes[logits.0].requires_grad;
        self.push(
            "weighted_nll",
            Tensor::scalar(loss),
            rg,
            Op::WeightedNll {
                logits,
                class,
                weight,
            },
        )
    }

    /// Layer normalization across the last axis of `[T, d]`.
    pub fn layer_norm(
        &mut self,
        x: NodeId,
        gamma: NodeId,
        beta: NodeId,
        eps: F,
    ) -> Result<NodeId, TensorError> {
        let (t, d) = self.expect_rank2("layer_norm", x)?;
        for (name, id) in [("gamma", gamma), ("beta", beta)] {
            if self.nodes[id.0].value.shape != vec![d] {
                return Err(TensorError::ShapeMismatch {
                    op: "layer_norm",
                    expected: format!("{name} [{d}]"),
                    got: format!("{:?}", self.nodes[id.0].value.shape),
                });
            }
        }
        let xd = &self.nodes[x.0].value.data;
        let gd = &self.nodes[gamma.0].value.data;
        let bd = &self.nodes[beta.0].value.data;
        let inv_d = F::of(1.0 / d as f64);
        let mut data = vec![F::zero(); t * d];
        for r in 0..t {
            let row = &xd[r * d..(r + 1) * d];
            let mut mean = F::zero();
            for &v in row {
                mean = mean + v;
            }
            mean = mean * inv_d;
            let mut var = F::zero();
            for &v in row {
                let c = v - mean;
                var = var + c * c;
            }
            var = var * inv_d;
            let inv_std = (var + eps).sqrt().recip();
            for j in 0..d {
                data[r * d + j] = (row[j] - mean) * inv_std * gd[j] + bd[j];
            }
        }
        let rg = self.any_requires(&[x, gamma, beta]);
        self.push(
            "layer_norm",
            Tensor {
                shape: vec![t, d],
                data,
            },
            rg,
            Op::LayerNorm { x, gamma, beta, eps },
        )
    }

    /// Single-head scaled dot-product attention over `[T, d]` inputs.
    pub fn attention(&mut self, q: NodeId, k: NodeId, v: NodeId) -> Result<NodeId, TensorError> {
        let (_, d) = self.expect_rank2("attention", q)?;
        let k_t = self.transpose(k)?;
        let scores = self.matmul(q, k_t)?;
        let scaled = self.mul_const(scores, F::of(1.0 / (d as f64).sqrt()))?;
        let weights = self.softmax_rows(scaled)?;
        self.matmul(weights, v)
    }

    // ── Backward ────────────────────────────────────────────────────

    /// Reverse pass from a scalar loss node. Gradients of every node with
    /// `requires_grad` become available through [`Graph::grad`].
    pub fn backward(&mut self, loss: NodeId) -> Result<(), TensorError> {
        if self.nodes[loss.0].value.data.len() != 1 {
            return Err(TensorError::NotScalar {
                op: "backward",
                shape: self.nodes[loss.0].value.shape.clone(),
            });
        }
        let Graph { nodes, fft_planner } = self;
        let mut flowing: Vec<Option<Vec<F>>> = vec![None; nodes.len()];
        let mut finished: Vec<Option<Vec<F>>> = vec![None; nodes.len()];
        flowing[loss.0] = Some(vec![F::one()]);

        for id in (0..=loss.0).rev() {
            let Some(g) = flowing[id].take() else { continue };
            propagate(nodes, fft_planner, id, &g, &mut flowing);
            finished[id] = Some(g);
        }
        for (node, g) in nodes.iter_mut().zip(finished) {
            if node.requires_grad {
                if let Some(g) = g {
                    node.grad = Some(g);
                }
            }
        }
        Ok(())
    }
}

/// Gathers convolution windows into a `[C_in * kernel, T_out]` matrix.
fn im2col<F: Scalar>(
    x: &[F],
    c_in: usize,
    t: usize,
    kernel: usize,
    stride: usize,
    t_out: usize,
) -> Vec<F> {
    let mut cols = vec![F::zero(); c_in * kernel * t_out];
    for ci in 0..c_in {
        for kk in 0..kernel {
            let dst = &mut cols[(ci * kernel + kk) * t_out..(ci * kernel + kk + 1) * t_out];
            for (tt, d) in dst.iter_mut().enumerate() {
                *d = x[ci * t + tt * stride + kk];
            }
        }
    }
    cols
}

fn gelu_forward<F: Scalar>(x: F) -> F {
    // tanh approximation of the Gaussian error linear unit
    let c0 = F::of(0.797_884_560_802_865_4);
    let c1 = F::of(0.044_715);
    let half = F::of(0.5);
    let u = c0 * (x + c1 * x * x * x);
    half * x * (F::one() + u.tanh())
}

fn gelu_backward<F: Scalar>(x: F) -> F {
    let c0 = F::of(0.797_884_560_802_865_4);
    let c1 = F::of(0.044_715);
    let half = F::of(0.5);
    let three = F::of(3.0);
    let u = c0 * (x + c1 * x * x * x);
    let t = u.tanh();
    let sech2 = F::one() - t * t;
    half * (F::one() + t) + half * x * sech2 * c0 * (F::one() + three * c1 * x * x)
}

fn add_into<F: Scalar>(slot: &mut Option<Vec<F>>, n: usize, f: impl FnOnce(&mut [F])) {
    let g = slot.get_or_insert_with(|| vec![F::zero(); n]);
    f(g);
}

#[allow(clippy::too_many_lines)]
fn propagate<F: Scalar>(
    nodes: &[Node<F>],
    fft_planner: &mut FftPlanner<F>,
    id: usize,
    g: &[F],
    flowing: &mut [Option<Vec<F>>],
) {
    let wants = |nid: NodeId| nodes[nid.0].requires_grad;
    let val = |nid: NodeId| &nodes[nid.0].value;
    let numel = |nid: NodeId| nodes[nid.0].value.data.len();

    match &nodes[id].op {
        Op::Leaf => {}

        Op::MatMul { a, b } => {
            let (m, k) = (val(*a).rows(), val(*a).cols());
            let n = val(*b).cols();
            if wants(*a) {
                let b_t = kernels::transpose(&val(*b).data, k, n);
                add_into(&mut flowing[a.0], m * k, |ga| {
                    kernels::matmul_acc(g, &b_t, m, n, k, ga);
                });
            }
            if wants(*b) {
                let a_t = kernels::transpose(&val(*a).data, m, k);
                add_into(&mut flowing[b.0], k * n, |gb| {
                    kernels::matmul_acc(&a_t, g, k, m, n, gb);
                });
            }
        }

        Op::AddRow { x, bias } => {
            let (t, d) = (val(*x).rows(), val(*x).cols());
            if wants(*x) {
                add_into(&mut flowing[x.0], t * d, |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o + v;
                    }
                });
            }
            if wants(*bias) {
                add_into(&mut flowing[bias.0], d, |gb| {
                    for r in 0..t {
                        for j in 0..d {
                            gb[j] = gb[j] + g[r * d + j];
                        }
                    }
                });
            }
        }

        Op::MulRow { x, row } => {
            let (t, d) = (val(*x).rows(), val(*x).cols());
            let xd = &val(*x).data;
            let rd = &val(*row).data;
            if wants(*x) {
                add_into(&mut flowing[x.0], t * d, |gx| {
                    for r in 0..t {
                        for j in 0..d {
                            gx[r * d + j] = gx[r * d + j] + g[r * d + j] * rd[j];
                        }
                    }
                });
            }
            if wants(*row) {
                add_into(&mut flowing[row.0], d, |gr| {
                    for r in 0..t {
                        for j in 0..d {
                            gr[j] = gr[j] + g[r * d + j] * xd[r * d + j];
                        }
                    }
                });
            }
        }

        Op::Add { a, b } => {
            for nid in [a, b] {
                if wants(*nid) {
                    add_into(&mut flowing[nid.0], g.len(), |gx| {
                        for (o, &v) in gx.iter_mut().zip(g) {
                            *o = *o + v;
                        }
                    });
                }
            }
        }

        Op::Sub { a, b } => {
            if wants(*a) {
                add_into(&mut flowing[a.0], g.len(), |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o + v;
                    }
                });
            }
            if wants(*b) {
                add_into(&mut flowing[b.0], g.len(), |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o - v;
                    }
                });
            }
        }

        Op::Mul { a, b } => {
            if wants(*a) {
                let bd = &val(*b).data;
                add_into(&mut flowing[a.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        gx[i] = gx[i] + g[i] * bd[i];
                    }
                });
            }
            if wants(*b) {
                let ad = &val(*a).data;
                add_into(&mut flowing[b.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        gx[i] = gx[i] + g[i] * ad[i];
                    }
                });
            }
        }

        Op::AddConst { x } => {
            if wants(*x) {
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o + v;
                    }
                });
            }
        }

        Op::MulConst { x, c } => {
            if wants(*x) {
                let c = *c;
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o + v * c;
                    }
                });
            }
        }

        Op::SubScalar { x, s } => {
            if wants(*x) {
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o + v;
                    }
                });
            }
            if wants(*s) {
                add_into(&mut flowing[s.0], 1, |gs| {
                    let mut acc = F::zero();
                    for &v in g {
                        acc = acc + v;
                    }
                    gs[0] = gs[0] - acc;
                });
            }
        }

        Op::Relu { x } => {
            if wants(*x) {
                let xd = &val(*x).data;
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        if xd[i] > F::zero() {
                            gx[i] = gx[i] + g[i];
                        }
                    }
                });
            }
        }

        Op::Gelu { x } => {
            if wants(*x) {
                let xd = &val(*x).data;
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        gx[i] = gx[i] + g[i] * gelu_backward(xd[i]);
                    }
                });
            }
        }

        Op::Tanh { x } => {
            if wants(*x) {
                let yd = &nodes[id].value.data;
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        gx[i] = gx[i] + g[i] * (F::one() - yd[i] * yd[i]);
                    }
                });
            }
        }

        Op::Exp { x } => {
            if wants(*x) {
                let yd = &nodes[id].value.data;
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        gx[i] = gx[i] + g[i] * yd[i];
                    }
                });
            }
        }

        Op::Ln { x } => {
            if wants(*x) {
                let xd = &val(*x).data;
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        gx[i] = gx[i] + g[i] / xd[i];
                    }
                });
            }
        }

        Op::LnFloor { x, floor } => {
            if wants(*x) {
                let xd = &val(*x).data;
                let floor = *floor;
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        if xd[i] > floor {
                            gx[i] = gx[i] + g[i] / xd[i];
                        }
                    }
                });
            }
        }

        Op::Clamp { x, lo, hi } => {
            if wants(*x) {
                let xd = &val(*x).data;
                let (lo, hi) = (*lo, *hi);
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for i in 0..g.len() {
                        if xd[i] > lo && xd[i] < hi {
                            gx[i] = gx[i] + g[i];
                        }
                    }
                });
            }
        }

        Op::SumAll { x } => {
            if wants(*x) {
                let g0 = g[0];
                add_into(&mut flowing[x.0], numel(*x), |gx| {
                    for o in gx.iter_mut() {
                        *o = *o + g0;
                    }
                });
            }
        }

        Op::MeanAll { x } => {
            if wants(*x) {
                let n = numel(*x);
                let g0 = g[0] / F::of(n as f64);
                add_into(&mut flowing[x.0], n, |gx| {
                    for o in gx.iter_mut() {
                        *o = *o + g0;
                    }
                });
            }
        }

        Op::RowSum { x } => {
            if wants(*x) {
                let (t, k) = (val(*x).rows(), val(*x).cols());
                add_into(&mut flowing[x.0], t * k, |gx| {
                    for r in 0..t {
                        for j in 0..k {
                            gx[r * k + j] = gx[r * k + j] + g[r];
                        }
                    }
                });
            }
        }

        Op::SoftmaxRows { x } => {
            if wants(*x) {
                let (t, d) = (val(*x).rows(), val(*x).cols());
                let yd = &nodes[id].value.data;
                add_into(&mut flowing[x.0], t * d, |gx| {
                    for r in 0..t {
                        let y = &yd[r * d..(r + 1) * d];
                        let gr = &g[r * d..(r + 1) * d];
                        let mut dot = F::zero();
                        for j in 0..d {
                            dot = dot + y[j] * gr[j];
                        }
                        for j in 0..d {
                            gx[r * d + j] = gx[r * d + j] + y[j] * (gr[j] - dot);
                        }
                    }
                });
            }
        }

        Op::Transpose { x } => {
            if wants(*x) {
                let (m, n) = (val(*x).rows(), val(*x).cols());
                // output is [n, m]; gradient transposes back
                let gt = kernels::transpose(g, n, m);
                add_into(&mut flowing[x.0], m * n, |gx| {
                    for (o, &v) in gx.iter_mut().zip(&gt) {
                        *o = *o + v;
                    }
                });
            }
        }

        Op::Reshape { x } => {
            if wants(*x) {
                add_into(&mut flowing[x.0], g.len(), |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o + v;
                    }
                });
            }
        }

        Op::CropRows { x } => {
            if wants(*x) {
                let (t, d) = (val(*x).rows(), val(*x).cols());
                add_into(&mut flowing[x.0], t * d, |gx| {
                    for (o, &v) in gx.iter_mut().zip(g) {
                        *o = *o + v;
                    }
                });
            }
        }

        Op::ZeroPad1d { x, left } => {
            if wants(*x) {
                let (c, t) = (val(*x).rows(), val(*x).cols());
                let t_out = nodes[id].value.cols();
                let left = *left;
                add_into(&mut flowing[x.0], c * t, |gx| {
                    for ch in 0..c {
                        for j in 0..t {
                            gx[ch * t + j] = gx[ch * t + j] + g[ch * t_out + left + j];
                        }
                    }
                });
            }
        }

        Op::Conv1d { x, w, stride, kernel } => {
            let (c_in, t) = (val(*x).rows(), val(*x).cols());
            let c_out = val(*w).rows();
            let t_out = nodes[id].value.cols();
            let (stride, kernel) = (*stride, *kernel);
            if wants(*w) {
                let cols = im2col(&val(*x).data, c_in, t, kernel, stride, t_out);
                let cols_t = kernels::transpose(&cols, c_in * kernel, t_out);
                add_into(&mut flowing[w.0], c_out * c_in * kernel, |gw| {
                    kernels::matmul_acc(g, &cols_t, c_out, t_out, c_in * kernel, gw);
                });
            }
            if wants(*x) {
                let w_t = kernels::transpose(&val(*w).data, c_out, c_in * kernel);
                let dcols = kernels::matmul(&w_t, g, c_in * kernel, c_out, t_out);
                add_into(&mut flowing[x.0], c_in * t, |gx| {
                    for ci in 0..c_in {
                        for kk in 0..kernel {
                            let src = &dcols[(ci * kernel + kk) * t_out..(ci * kernel + kk + 1) * t_out];
                            for (tt, &v) in src.iter().enumerate() {
                                gx[ci * t + tt * stride + kk] = gx[ci * t + tt * stride + kk] + v;
                            }
                        }
                    }
                });
            }
        }

        Op::TConv1d { x, w, stride } => {
            let (c_in, t) = (val(*x).rows(), val(*x).cols());
            let stride = *stride;
            let kernel = 2 * stride;
            let w_cols = val(*w).cols();
            let c_out = w_cols / kernel;
            let t_out = t * stride;
            // dcols[(co*kernel+p), tt] = g[co, tt*stride + p], zero past the trim
            let mut dcols = vec![F::zero(); w_cols * t];
            for co in 0..c_out {
                for p in 0..kernel {
                    let dst = &mut dcols[(co * kernel + p) * t..(co * kernel + p + 1) * t];
                    for (tt, d) in dst.iter_mut().enumerate() {
                        let pos = tt * stride + p;
                        if pos < t_out {
                            *d = g[co * t_out + pos];
                        }
                    }
                }
            }
            if wants(*w) {
                let dcols_t = kernels::transpose(&dcols, w_cols, t);
                add_into(&mut flowing[w.0], c_in * w_cols, |gw| {
                    kernels::matmul_acc(&val(*x).data, &dcols_t, c_in, t, w_cols, gw);
                });
            }
            if wants(*x) {
                add_into(&mut flowing[x.0], c_in * t, |gx| {
                    kernels::matmul_acc(&val(*w).data, &dcols, c_in, w_cols, t, gx);
                });
            }
        }

        Op::Frame { x, win, hop } => {
            if wants(*x) {
                let n = numel(*x);
                let (win, hop) = (*win, *hop);
                let t = nodes[id].value.rows();
                add_into(&mut flowing[x.0], n, |gx| {
                    for r in 0..t {
                        for j in 0..win {
                            gx[r * hop + j] = gx[r * hop + j] + g[r * win + j];
                        }
                    }
                });
            }
        }

        Op::SpectralPower { x } => {
            if wants(*x) {
                let (t, nfft) = (val(*x).rows(), val(*x).cols());
                let nb = nfft / 2 + 1;
                let fft = fft_planner.plan_fft_forward(nfft);
                let xd = &val(*x).data;
                let two = F::of(2.0);
                let mut spec = vec![Complex::new(F::zero(), F::zero()); nfft];
                let mut gbuf = vec![Complex::new(F::zero(), F::zero()); nfft];
                add_into(&mut flowing[x.0], t * nfft, |gx| {
                    for r in 0..t {
                        for (i, b) in spec.iter_mut().enumerate() {
                            *b = Complex::new(xd[r * nfft + i], F::zero());
                        }
                        fft.process(&mut spec);
                        // Adjoint of |X_k|^2 through the real DFT: transform the
                        // Hermitian extension of gP_k * conj(X_k), doubling the
                        // self-conjugate DC and Nyquist bins.
                        for k in 0..nb {
                            let scale = if k == 0 || k == nfft / 2 { two } else { F::one() };
                            gbuf[k] = spec[k].conj() * (g[r * nb + k] * scale);
                        }
                        for k in 1..nfft / 2 {
                            gbuf[nfft - k] = gbuf[k].conj();
                        }
                        fft.process(&mut gbuf);
                        for i in 0..nfft {
                            gx[r * nfft + i] = gx[r * nfft + i] + gbuf[i].re;
                        }
                    }
                });
            }
        }

        Op::WeightedNll { logits, class, weight } => {
            if wants(*logits) {
                let c = val(*logits).cols();
                let row = &val(*logits).data;
                let mut mx = row[0];
                for &v in row {
                    mx = mx.max(v);
                }
                let mut denom = F::zero();
                for &v in row {
                    denom = denom + (v - mx).exp();
                }
                let (class, weight, g0) = (*class, *weight, g[0]);
                add_into(&mut flowing[logits.0], c, |gx| {
                    for j in 0..c {
                        let p = (row[j] - mx).exp() / denom;
                        let delta = if j == class { F::one() } else { F::zero() };
                        gx[j] = gx[j] + g0 * weight * (p - delta);
                    }
                });
            }
        }

        Op::LayerNorm { x, gamma, beta, eps } => {
            let (t, d) = (val(*x).rows(), val(*x).cols());
            let xd = &val(*x).data;
            let gd = &val(*gamma).data;
            let inv_d = F::of(1.0 / d as f64);
            let eps = *eps;
            // per-row recomputation of mean/var is cheaper than caching
            let mut row_stats = Vec::with_capacity(t);
            for r in 0..t {
                let row = &xd[r * d..(r + 1) * d];
                let mut mean = F::zero();
                for &v in row {
                    mean = mean + v;
                }
                mean = mean * inv_d;
                let mut var = F::zero();
                for &v in row {
                    let c = v - mean;
                    var = var + c * c;
                }
                var = var * inv_d;
                row_stats.push((mean, (var + eps).sqrt().recip()));
            }
            if wants(*gamma) {
                add_into(&mut flowing[gamma.0], d, |gg| {
                    for r in 0..t {
                        let (mean, inv_std) = row_stats[r];
                        for j in 0..d {
                            let xh = (xd[r * d + j] - mean) * inv_std;
                            gg[j] = gg[j] + g[r * d + j] * xh;
                        }
                    }
                });
            }
            if wants(*beta) {
                add_into(&mut flowing[beta.0], d, |gb| {
                    for r in 0..t {
                        for j in 0..d {
                            gb[j] = gb[j] + g[r * d + j];
                        }
                    }
                });
            }
            if wants(*x) {
                add_into(&mut flowing[x.0], t * d, |gx| {
                    for r in 0..t {
                        let (mean, inv_std) = row_stats[r];
                        let mut m1 = F::zero();
                        let mut m2 = F::zero();
                        for j in 0..d {
                            let xh = (xd[r * d + j] - mean) * inv_std;
                            let dxh = g[r * d + j] * gd[j];
                            m1 = m1 + dxh;
                            m2 = m2 + dxh * xh;
                        }
                        m1 = m1 * inv_d;
                        m2 = m2 * inv_d;
                        for j in 0..d {
                            let xh = (xd[r * d + j] - mean) * inv_std;
                            let dxh = g[r * d + j] * gd[j];
                            gx[r * d + j] = gx[r * d + j] + inv_std * (dxh - m1 - xh * m2);
                        }
                    }
                });
            }
        }
    }
}
