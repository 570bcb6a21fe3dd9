use super::tensor::{matmul_raw, Tensor};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

/// Operation recorded for a node; drives the backward rule.
#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Matmul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    /// out = a*x + b, scalars a and b; only a matters going backward.
    Affine(Var, f64),
    /// Row i of the matrix scaled by entry i of a column vector.
    ScaleRows(Var, Var),
    /// Row vector broadcast-added to every row.
    AddRowVec(Var, Var),
    /// Column vector broadcast-added to every column.
    AddColVec(Var, Var),
    Tanh(Var),
    Sigmoid(Var),
    Sqrt(Var),
    SoftmaxRows(Var, f64),
    ConcatCols(Vec<Var>),
    ConcatRows(Vec<Var>),
    SliceRows(Var, usize),
    SliceCols(Var, usize),
    Transpose(Var),
    Reshape(Var),
    Sum(Var),
    Mean(Var),
    Conv1d {
        x: Var,
        kernels: Var,
        stride: usize,
    },
    MaxPool1d {
        x: Var,
        argmax: Vec<usize>,
    },
}

struct Node {
    value: Tensor,
    grad: Tensor,
    op: Op,
}

/// Dynamically recorded computation graph.
///
/// One tape per forward pass; appending order is a topological order, so
/// the backward sweep walks indices in reverse and visits each reachable
/// node exactly once. Gradients accumulate until [`Tape::zero_grads`].
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

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        debug_assert!(value.all_finite(), "non-finite forward value from {:?}", op);
        let grad = Tensor::zeros(value.shape().to_vec());
        self.nodes.push(Node { value, grad, op });
        Var(self.nodes.len() - 1)
    }

    /// Insert an input or parameter tensor.
    pub fn leaf(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn grad(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].grad
    }

    pub fn zero_grads(&mut self) {
        for n in &mut self.nodes {
            n.grad.data_mut().fill(0.0);
        }
    }

    // ── forward ops ──────────────────────────────────────────────

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let out = matmul_raw(self.value(a), self.value(b));
        self.push(out, Op::Matmul(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let out = self.zip(a, b, "add", |x, y| x + y);
        self.push(out, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let out = self.zip(a, b, "sub", |x, y| x - y);
        self.push(out, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let out = self.zip(a, b, "mul", |x, y| x * y);
        self.push(out, Op::Mul(a, b))
    }

    fn zip(&self, a: Var, b: Var, name: &str, f: impl Fn(f64, f64) -> f64) -> Tensor {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(
            ta.shape(),
            tb.shape(),
            "contract violation: {} shape mismatch {:?} vs {:?}",
            name,
            ta.shape(),
            tb.shape()
        );
        let data = ta
            .data()
            .iter()
            .zip(tb.data())
            .map(|(&x, &y)| f(x, y))
            .collect();
        Tensor::new(ta.shape().to_vec(), data)
    }

    pub fn scale(&mut self, x: Var, c: f64) -> Var {
        self.affine(x, c, 0.0)
    }

    /// out = a*x + b elementwise with scalar a, b.
    pub fn affine(&mut self, x: Var, a: f64, b: f64) -> Var {
        let t = self.value(x);
        let data = t.data().iter().map(|&v| a * v + b).collect();
        let out = Tensor::new(t.shape().to_vec(), data);
        self.push(out, Op::Affine(x, a))
    }

    /// Scale row i of `x` (m x n) by entry i of column vector `s` (m x 1).
    pub fn scale_rows(&mut self, x: Var, s: Var) -> Var {
        let (tx, ts) = (self.value(x), self.value(s));
        let (m, n) = (tx.rows(), tx.cols());
        assert_eq!(
            (ts.rows(), ts.cols()),
            (m, 1),
            "contract violation: scale_rows wants {}x1 scales, got {:?}",
            m,
            ts.shape()
        );
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            let si = ts.data()[i];
            data.extend(tx.row(i).iter().map(|&v| v * si));
        }
        self.push(Tensor::matrix(m, n, data), Op::ScaleRows(x, s))
    }

    /// Add row vector `v` (1 x n) to every row of `x` (m x n).
    pub fn add_row_vec(&mut self, x: Var, v: Var) -> Var {
        let (tx, tv) = (self.value(x), self.value(v));
        let (m, n) = (tx.rows(), tx.cols());
        assert_eq!(
            (tv.rows(), tv.cols()),
            (1, n),
            "contract violation: add_row_vec wants 1x{}, got {:?}",
            n,
            tv.shape()
        );
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            data.extend(tx.row(i).iter().zip(tv.data()).map(|(&a, &b)| a + b));
        }
        self.push(Tensor::matrix(m, n, data), Op::AddRowVec(x, v))
    }

    /// Add column vector `v` (m x 1) to every column of `x` (m x n).
    pub fn add_col_vec(&mut self, x: Var, v: Var) -> Var {
        let (tx, tv) = (self.value(x), self.value(v));
        let (m, n) = (tx.rows(), tx.cols());
        assert_eq!(
            (tv.rows(), tv.cols()),
            (m, 1),
            "contract violation: add_col_vec wants {}x1, got {:?}",
            m,
            tv.shape()
        );
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            let vi = tv.data()[i];
            data.extend(tx.row(i).iter().map(|&a| a + vi));
        }
        self.push(Tensor::matrix(m, n, data), Op::AddColVec(x, v))
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        let out = self.map(x, f64::tanh);
        self.push(out, Op::Tanh(x))
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        let out = self.map(x, |v| 1.0 / (1.0 + (-v).exp()));
        self.push(out, Op::Sigmoid(x))
    }

    /// Elementwise square root; inputs must be positive for a finite gradient.
    pub fn sqrt(&mut self, x: Var) -> Var {
        let out = self.map(x, f64::sqrt);
        self.push(out, Op::Sqrt(x))
    }

    fn map(&self, x: Var, f: impl Fn(f64) -> f64) -> Tensor {
        let t = self.value(x);
        Tensor::new(t.shape().to_vec(), t.data().iter().map(|&v| f(v)).collect())
    }

    /// Row-wise softmax of exp(x/scale), computed with row-max subtraction.
    pub fn softmax_rows(&mut self, x: Var, scale: f64) -> Var {
        assert!(
            scale > 0.0,
            "contract violation: softmax scale must be positive"
        );
        let t = self.value(x);
        let (m, n) = (t.rows(), t.cols());
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            let row = t.row(i);
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = row.iter().map(|&v| ((v - max) / scale).exp()).collect();
            let sum: f64 = exps.iter().sum();
            data.extend(exps.iter().map(|&e| e / sum));
        }
        self.push(Tensor::matrix(m, n, data), Op::SoftmaxRows(x, scale))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        assert!(
            !parts.is_empty(),
            "contract violation: concat_cols of nothing"
        );
        let m = self.value(parts[0]).rows();
        let total: usize = parts
            .iter()
            .map(|&p| {
                let t = self.value(p);
                assert_eq!(t.rows(), m, "contract violation: concat_cols row mismatch");
                t.cols()
            })
            .sum();
        let mut data = Vec::with_capacity(m * total);
        for i in 0..m {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(i));
            }
        }
        self.push(
            Tensor::matrix(m, total, data),
            Op::ConcatCols(parts.to_vec()),
        )
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Var {
        assert!(
            !parts.is_empty(),
            "contract violation: concat_rows of nothing"
        );
        let n = self.value(parts[0]).cols();
        let total: usize = parts
            .iter()
            .map(|&p| {
                let t = self.value(p);
                assert_eq!(t.cols(), n, "contract violation: concat_rows col mismatch");
                t.rows()
            })
            .sum();
        let mut data = Vec::with_capacity(total * n);
        for &p in parts {
            data.extend_from_slice(self.value(p).data());
        }
        self.push(
            Tensor::matrix(total, n, data),
            Op::ConcatRows(parts.to_vec()),
        )
    }

    /// Rows [r0, r1) of a matrix.
    pub fn slice_rows(&mut self, x: Var, r0: usize, r1: usize) -> Var {
        let t = self.value(x);
        let (m, n) = (t.rows(), t.cols());
        assert!(
            r0 < r1 && r1 <= m,
            "contract violation: slice_rows {}..{} of {}",
            r0,
            r1,
            m
        );
        let data = t.data()[r0 * n..r1 * n].to_vec();
        self.push(Tensor::matrix(r1 - r0, n, data), Op::SliceRows(x, r0))
    }

    /// Columns [c0, c1) of a matrix.
    pub fn slice_cols(&mut self, x: Var, c0: usize, c1: usize) -> Var {
        let t = self.value(x);
        let (m, n) = (t.rows(), t.cols());
        assert!(
            c0 < c1 && c1 <= n,
            "contract violation: slice_cols {}..{} of {}",
            c0,
            c1,
            n
        );
        let mut data = Vec::with_capacity(m * (c1 - c0));
        for i in 0..m {
            data.extend_from_slice(&t.row(i)[c0..c1]);
        }
        self.push(Tensor::matrix(m, c1 - c0, data), Op::SliceCols(x, c0))
    }

    pub fn transpose(&mut self, x: Var) -> Var {
        let out = self.value(x).transposed();
        self.push(out, Op::Transpose(x))
    }

    /// Reinterpret the data in row-major order under a new shape.
    pub fn reshape(&mut self, x: Var, shape: Vec<usize>) -> Var {
        let t = self.value(x);
        let n: usize = shape.iter().product();
        assert_eq!(
            n,
            t.numel(),
            "contract violation: reshape {:?} -> {:?}",
            t.shape(),
            shape
        );
        let out = Tensor::new(shape, t.data().to_vec());
        self.push(out, Op::Reshape(x))
    }

    /// Sum of all entries, as a 1x1 tensor.
    pub fn sum(&mut self, x: Var) -> Var {
        let s: f64 = self.value(x).data().iter().sum();
        self.push(Tensor::scalar(s), Op::Sum(x))
    }

    /// Mean of all entries, as a 1x1 tensor.
    pub fn mean(&mut self, x: Var) -> Var {
        let t = self.value(x);
        let s: f64 = t.data().iter().sum();
        let out = Tensor::scalar(s / t.numel() as f64);
        self.push(out, Op::Mean(x))
    }

    /// 1-D cross-correlation, no padding, no kernel flip.
    ///
    /// `x` is channels x length, `kernels` is [c_out, c_in, k]. Output
    /// length is floor((L - k)/stride) + 1.
    pub fn conv1d(&mut self, x: Var, kernels: Var, stride: usize) -> Var {
        assert!(
            stride >= 1,
            "contract violation: conv1d stride must be >= 1"
        );
        let (tx, tk) = (self.value(x), self.value(kernels));
        let (c_in, len) = (tx.rows(), tx.cols());
        let kshape = tk.shape();
        assert_eq!(
            kshape.len(),
            3,
            "contract violation: conv1d kernels must be 3-D"
        );
        let (c_out, kc_in, k) = (kshape[0], kshape[1], kshape[2]);
        assert_eq!(kc_in, c_in, "contract violation: conv1d channel mismatch");
        assert!(
            len >= k,
            "contract violation: conv1d input length {} < kernel size {}",
            len,
            k
        );
        let out_len = (len - k) / stride + 1;
        let mut data = vec![0.0; c_out * out_len];
        for o in 0..c_out {
            for j in 0..out_len {
                let mut s = 0.0;
                for ci in 0..c_in {
                    let xrow = tx.row(ci);
                    let krow = &tk.data()[(o * c_in + ci) * k..(o * c_in + ci + 1) * k];
                    let base = j * stride;
                    for t in 0..k {
                        s += xrow[base + t] * krow[t];
                    }
                }
                data[o * out_len + j] = s;
            }
        }
        self.push(
            Tensor::matrix(c_out, out_len, data),
            Op::Conv1d { x, kernels, stride },
        )
    }

    /// Non-overlapping window maxima along the length axis.
    ///
    /// Gradient routes to the first maximal index of each window.
    pub fn max_pool1d(&mut self, x: Var, window: usize) -> Var {
        assert!(window >= 1, "contract violation: pool window must be >= 1");
        let t = self.value(x);
        let (c, len) = (t.rows(), t.cols());
        let out_len = len / window;
        assert!(
            out_len >= 1,
            "contract violation: pool window {} exceeds length {}",
            window,
            len
        );
        let mut data = vec![0.0; c * out_len];
        let mut argmax = vec![0usize; c * out_len];
        for ci in 0..c {
            let row = t.row(ci);
            for j in 0..out_len {
                let seg = &row[j * window..(j + 1) * window];
                let (mut best_i, mut best) = (0usize, seg[0]);
                for (i, &v) in seg.iter().enumerate().skip(1) {
                    if v > best {
                        best = v;
                        best_i = i;
                    }
                }
                data[ci * out_len + j] = best;
                argmax[ci * out_len + j] = ci * len + j * window + best_i;
            }
        }
        self.push(
            Tensor::matrix(c, out_len, data),
            Op::MaxPool1d { x, argmax },
        )
    }

    // ── backward ─────────────────────────────────────────────────

    /// Reverse-mode sweep from a scalar loss.
    ///
    /// Propagation runs through pass-local buffers, so each call adds
    /// exactly one pass worth of gradient to every reachable node;
    /// repeated calls without [`Tape::zero_grads`] accumulate.
    pub fn backward(&mut self, loss: Var) {
        assert_eq!(
            self.nodes[loss.0].value.numel(),
            1,
            "contract violation: backward on non-scalar loss of shape {:?}",
            self.nodes[loss.0].value.shape()
        );

        // Mark ancestors so the sweep touches each relevant node once.
        let mut marked = vec![false; self.nodes.len()];
        let mut stack = vec![loss.0];
        while let Some(i) = stack.pop() {
            if marked[i] {
                continue;
            }
            marked[i] = true;
            for p in op_parents(&self.nodes[i].op) {
                if !marked[p.0] {
                    stack.push(p.0);
                }
            }
        }

        let mut local: Vec<Option<Vec<f64>>> = vec![None; loss.0 + 1];
        local[loss.0] = Some(vec![1.0]);

        for i in (0..=loss.0).rev() {
            if !marked[i] || matches!(self.nodes[i].op, Op::Leaf) {
                continue;
            }
            let g = match local[i].as_ref() {
                Some(g) => Tensor::new(self.nodes[i].value.shape().to_vec(), g.clone()),
                None => continue,
            };
            let op = self.nodes[i].op.clone();
            self.step_backward(i, &op, &g, &mut local);
        }

        for (i, buf) in local.into_iter().enumerate() {
            if let Some(buf) = buf {
                let gd = self.nodes[i].grad.data_mut();
                for (slot, v) in gd.iter_mut().zip(&buf) {
                    *slot += v;
                }
            }
        }
    }

    fn acc(&self, local: &mut [Option<Vec<f64>>], v: Var, f: impl Fn(usize) -> f64) {
        let n = self.nodes[v.0].value.numel();
        let slot = local[v.0].get_or_insert_with(|| vec![0.0; n]);
        for (idx, s) in slot.iter_mut().enumerate() {
            *s += f(idx);
        }
    }

    /// Sparse accumulation: hand the parent's buffer to the writer.
    fn acc_with(&self, local: &mut [Option<Vec<f64>>], v: Var, write: impl FnOnce(&mut [f64])) {
        let n = self.nodes[v.0].value.numel();
        let slot = local[v.0].get_or_insert_with(|| vec![0.0; n]);
        write(slot);
    }

    fn step_backward(&self, node: usize, op: &Op, g: &Tensor, local: &mut [Option<Vec<f64>>]) {
        match *op {
            Op::Leaf => {}
            Op::Matmul(a, b) => {
                let da = matmul_raw(g, &self.value(b).transposed());
                let db = matmul_raw(&self.value(a).transposed(), g);
                self.acc(local, a, |i| da.data()[i]);
                self.acc(local, b, |i| db.data()[i]);
            }
            Op::Add(a, b) => {
                self.acc(local, a, |i| g.data()[i]);
                self.acc(local, b, |i| g.data()[i]);
            }
            Op::Sub(a, b) => {
                self.acc(local, a, |i| g.data()[i]);
                self.acc(local, b, |i| -g.data()[i]);
            }
            Op::Mul(a, b) => {
                let ta = self.value(a).data();
                let tb = self.value(b).data();
                self.acc(local, a, |i| g.data()[i] * tb[i]);
                self.acc(local, b, |i| g.data()[i] * ta[i]);
            }
            Op::Affine(x, a) => {
                self.acc(local, x, |i| a * g.data()[i]);
            }
            Op::ScaleRows(x, s) => {
                let tx = self.value(x);
                let ts = self.value(s).data();
                let n = tx.cols();
                self.acc(local, x, |i| g.data()[i] * ts[i / n]);
                self.acc(local, s, |i| {
                    g.row(i)
                        .iter()
                        .zip(tx.row(i))
                        .map(|(&gv, &xv)| gv * xv)
                        .sum()
                });
            }
            Op::AddRowVec(x, v) => {
                let (m, n) = (g.rows(), g.cols());
                self.acc(local, x, |i| g.data()[i]);
                self.acc(local, v, |j| (0..m).map(|i| g.data()[i * n + j]).sum());
            }
            Op::AddColVec(x, v) => {
                self.acc(local, x, |i| g.data()[i]);
                self.acc(local, v, |i| g.row(i).iter().sum());
            }
            Op::Tanh(x) => {
                let y = self.nodes[node].value.data();
                self.acc(local, x, |i| g.data()[i] * (1.0 - y[i] * y[i]));
            }
            Op::Sigmoid(x) => {
                let y = self.nodes[node].value.data();
                self.acc(local, x, |i| g.data()[i] * y[i] * (1.0 - y[i]));
            }
            Op::Sqrt(x) => {
                let y = self.nodes[node].value.data();
                self.acc(local, x, |i| g.data()[i] * 0.5 / y[i]);
            }
            Op::SoftmaxRows(x, scale) => {
                let y = &self.nodes[node].value;
                let (m, n) = (y.rows(), y.cols());
                let mut dx = vec![0.0; m * n];
                for i in 0..m {
                    let yrow = y.row(i);
                    let grow = g.row(i);
                    let dot: f64 = yrow.iter().zip(grow).map(|(&yv, &gv)| yv * gv).sum();
                    for j in 0..n {
                        dx[i * n + j] = yrow[j] * (grow[j] - dot) / scale;
                    }
                }
                self.acc(local, x, |i| dx[i]);
            }
            Op::ConcatCols(ref parts) => {
                let total = g.cols();
                let mut offset = 0;
                for &p in parts {
                    let w = self.value(p).cols();
                    let off = offset;
                    self.acc(local, p, |i| {
                        let (r, c) = (i / w, i % w);
                        g.data()[r * total + off + c]
                    });
                    offset += w;
                }
                debug_assert_eq!(offset, total);
            }
            Op::ConcatRows(ref parts) => {
                let mut offset = 0;
                for &p in parts {
                    let sz = self.value(p).numel();
                    let off = offset;
                    self.acc(local, p, |i| g.data()[off + i]);
                    offset += sz;
                }
            }
            Op::SliceRows(x, r0) => {
                let off = r0 * g.cols();
                self.acc_with(local, x, |slot| {
                    for (i, &gv) in g.data().iter().enumerate() {
                        slot[off + i] += gv;
                    }
                });
            }
            Op::SliceCols(x, c0) => {
                let total = self.value(x).cols();
                let w = g.cols();
                self.acc_with(local, x, |slot| {
                    for r in 0..g.rows() {
                        for c in 0..w {
                            slot[r * total + c0 + c] += g.data()[r * w + c];
                        }
                    }
                });
            }
            Op::Transpose(x) => {
                let gt = g.transposed();
                self.acc(local, x, |i| gt.data()[i]);
            }
            Op::Reshape(x) => {
                self.acc(local, x, |i| g.data()[i]);
            }
            Op::Sum(x) => {
                let gv = g.data()[0];
                self.acc(local, x, |_| gv);
            }
            Op::Mean(x) => {
                let n = self.value(x).numel() as f64;
                let gv = g.data()[0] / n;
                self.acc(local, x, |_| gv);
            }
            Op::Conv1d { x, kernels, stride } => {
                let tx = self.value(x);
                let tk = self.value(kernels);
                let (c_in, len) = (tx.rows(), tx.cols());
                let (c_out, _, k) = (tk.shape()[0], tk.shape()[1], tk.shape()[2]);
                let out_len = g.cols();
                let mut dx = vec![0.0; c_in * len];
                let mut dk = vec![0.0; tk.numel()];
                for o in 0..c_out {
                    for j in 0..out_len {
                        let gv = g.data()[o * out_len + j];
                        if gv == 0.0 {
                            continue;
                        }
                        let base = j * stride;
                        for ci in 0..c_in {
                            let koff = (o * c_in + ci) * k;
                            for t in 0..k {
                                dx[ci * len + base + t] += gv * tk.data()[koff + t];
                                dk[koff + t] += gv * tx.data()[ci * len + base + t];
                            }
                        }
                    }
                }
                self.acc(local, x, |i| dx[i]);
                self.acc(local, kernels, |i| dk[i]);
            }
            Op::MaxPool1d { x, ref argmax } => {
                self.acc_with(local, x, |slot| {
                    for (out_i, &src) in argmax.iter().enumerate() {
                        slot[src] += g.data()[out_i];
                    }
                });
            }
        }
    }
}

fn op_parents(op: &Op) -> Vec<Var> {
    match *op {
        Op::Leaf => vec![],
        Op::Matmul(a, b) | Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) => vec![a, b],
        Op::ScaleRows(a, b) | Op::AddRowVec(a, b) | Op::AddColVec(a, b) => vec![a, b],
        Op::Affine(x, _)
        | Op::Tanh(x)
        | Op::Sigmoid(x)
        | Op::Sqrt(x)
        | Op::SoftmaxRows(x, _)
        | Op::SliceRows(x, _)
        | Op::SliceCols(x, _)
        | Op::Transpose(x)
        | Op::Reshape(x)
        | Op::Sum(x)
        | Op::Mean(x) => vec![x],
        Op::ConcatCols(ref parts) | Op::ConcatRows(ref parts) => parts.clone(),
        Op::Conv1d { x, kernels, .. } => vec![x, kernels],
        Op::MaxPool1d { x, .. } => vec![x],
    }
}
