use super::{Array, AutodiffError};

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    Tanh(Var),
    Relu(Var),
    Embedding {
        table: Var,
        ids: Vec<usize>,
    },
    Concat(Vec<Var>),
    Mean(Var),
    Sum(Var),
    SoftmaxCrossEntropy {
        logits: Var,
        targets: Vec<Option<usize>>,
        probs: Array,
        count: usize,
    },
    ScaleGradient(Var, f64),
}

#[derive(Debug)]
struct Node {
    value: Array,
    op: Op,
}

/// A single-use computation graph.
///
/// Nodes are appended in creation order, which is already a topological
/// order: every op only refers to nodes that exist when it is recorded.
/// `backward` walks the nodes once in reverse.
#[derive(Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    grads: Option<Vec<Option<Array>>>,
    relu_signs: Vec<bool>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Array {
        &self.nodes[v.0].value
    }

    /// Gradient of the loss passed to [`Graph::backward`] with respect to `v`.
    ///
    /// `None` before backward has run. Nodes the loss does not depend on get
    /// a zero array.
    pub fn grad(&self, v: Var) -> Option<Array> {
        let grads = self.grads.as_ref()?;
        Some(
            grads[v.0]
                .clone()
                .unwrap_or_else(|| Array::zeros(self.nodes[v.0].value.shape())),
        )
    }

    /// Sign pattern of every relu input seen so far (`true` for `x > 0`).
    pub fn relu_signs(&self) -> &[bool] {
        &self.relu_signs
    }

    fn push(&mut self, value: Array, op: Op, name: &'static str) -> Result<Var, AutodiffError> {
        if !value.all_finite() {
            return Err(AutodiffError::NonFinite { op: name });
        }
        self.nodes.push(Node { value, op });
        Ok(Var(self.nodes.len() - 1))
    }

    pub fn leaf(&mut self, value: Array) -> Result<Var, AutodiffError> {
        self.push(value, Op::Leaf, "leaf")
    }

    fn mismatch(&self, op: &'static str, a: Var, b: Var) -> AutodiffError {
        AutodiffError::ShapeMismatch {
            op,
            lhs: self.value(a).shape().to_vec(),
            rhs: self.value(b).shape().to_vec(),
        }
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var, AutodiffError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape().len() != 2 || bv.shape().len() != 2 || av.cols() != bv.rows() {
            return Err(self.mismatch("matmul", a, b));
        }
        let out = av.matmul_unchecked(bv);
        self.push(out, Op::MatMul(a, b), "matmul")
    }

    /// Elementwise sum. `b` may also be a `[1, n]` row that is added to every
    /// row of an `[m, n]` operand `a` (bias broadcast).
    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, AutodiffError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() == bv.shape() {
            let mut out = av.clone();
            out.add_assign(bv);
            return self.push(out, Op::Add(a, b), "add");
        }
        if bv.shape() == [1, av.cols()] && av.shape().len() == 2 {
            let mut out = av.clone();
            let bias = bv.data().to_vec();
            for r in 0..out.rows() {
                for (o, b) in out.row_mut(r).iter_mut().zip(&bias) {
                    *o += b;
                }
            }
            return self.push(out, Op::AddRow(a, b), "add");
        }
        Err(self.mismatch("add", a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var, AutodiffError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() != bv.shape() {
            return Err(self.mismatch("sub", a, b));
        }
        let data = av.data().iter().zip(bv.data()).map(|(x, y)| x - y).collect();
        let out = Array::new(av.shape().to_vec(), data)?;
        self.push(out, Op::Sub(a, b), "sub")
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var, AutodiffError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() != bv.shape() {
            return Err(self.mismatch("mul", a, b));
        }
        let data = av.data().iter().zip(bv.data()).map(|(x, y)| x * y).collect();
        let out = Array::new(av.shape().to_vec(), data)?;
        self.push(out, Op::Mul(a, b), "mul")
    }

    /// Multiplies the value by a constant (and, consequently, its gradient).
    pub fn scale(&mut self, a: Var, factor: f64) -> Result<Var, AutodiffError> {
        let out = self.value(a).map(|x| x * factor);
        self.push(out, Op::Scale(a, factor), "scale")
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var, AutodiffError> {
        let out = self.value(a).map(f64::tanh);
        self.push(out, Op::Tanh(a), "tanh")
    }

    /// Rectifier. The subgradient at exactly zero is taken to be zero.
    pub fn relu(&mut self, a: Var) -> Result<Var, AutodiffError> {
        let input = self.value(a);
        let signs: Vec<bool> = input.data().iter().map(|&x| x > 0.0).collect();
        let out = input.map(|x| if x > 0.0 { x } else { 0.0 });
        self.relu_signs.extend(signs);
        self.push(out, Op::Relu(a), "relu")
    }

    /// Gathers rows of `table` (`[vocab, dim]`) into an `[ids.len(), dim]` array.
    pub fn embedding_lookup(&mut self, table: Var, ids: &[usize]) -> Result<Var, AutodiffError> {
        let tv = self.value(table);
        if tv.shape().len() != 2 {
            return Err(AutodiffError::ShapeMismatch {
                op: "embedding_lookup",
                lhs: tv.shape().to_vec(),
                rhs: vec![ids.len()],
            });
        }
        let (vocab, dim) = (tv.rows(), tv.cols());
        let mut data = Vec::with_capacity(ids.len() * dim);
        for &id in ids {
            if id >= vocab {
                return Err(AutodiffError::IndexOutOfRange {
                    op: "embedding_lookup",
                    index: id,
                    bound: vocab,
                });
            }
            data.extend_from_slice(tv.row(id));
        }
        let out = Array::new(vec![ids.len(), dim], data)?;
        self.push(
            out,
            Op::Embedding {
                table,
                ids: ids.to_vec(),
            },
            "embedding_lookup",
        )
    }

    /// Concatenates rank-2 arrays with equal row counts along the columns.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var, AutodiffError> {
        let first = *parts.first().ok_or(AutodiffError::EmptyInput { op: "concat" })?;
        let rows = self.value(first).rows();
        for &p in parts {
            if self.value(p).rows() != rows || self.value(p).shape().len() != 2 {
                return Err(self.mismatch("concat", first, p));
            }
        }
        let total_cols: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut data = Vec::with_capacity(rows * total_cols);
        for r in 0..rows {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(r));
            }
        }
        let out = Array::new(vec![rows, total_cols], data)?;
        self.push(out, Op::Concat(parts.to_vec()), "concat")
    }

    pub fn mean(&mut self, a: Var) -> Result<Var, AutodiffError> {
        let av = self.value(a);
        if av.is_empty() {
            return Err(AutodiffError::EmptyInput { op: "mean" });
        }
        let out = Array::scalar(av.sum() / av.len() as f64);
        self.push(out, Op::Mean(a), "mean")
    }

    pub fn sum(&mut self, a: Var) -> Result<Var, AutodiffError> {
        let out = Array::scalar(self.value(a).sum());
        self.push(out, Op::Sum(a), "sum")
    }

    /// Mean softmax cross-entropy over the rows of `[n, k]` logits.
    pub fn softmax_cross_entropy(
        &mut self,
        logits: Var,
        targets: &[usize],
    ) -> Result<Var, AutodiffError> {
        let targets: Vec<Option<usize>> = targets.iter().copied().map(Some).collect();
        self.masked_softmax_cross_entropy(logits, &targets)
    }

    /// As [`Graph::softmax_cross_entropy`], but rows whose target is `None`
    /// contribute neither loss nor gradient. The mean is over supervised rows
    /// only; with no supervised rows the loss is zero.
    pub fn masked_softmax_cross_entropy(
        &mut self,
        logits: Var,
        targets: &[Option<usize>],
    ) -> Result<Var, AutodiffError> {
        let lv = self.value(logits);
        if lv.shape().len() != 2 || lv.rows() != targets.len() {
            return Err(AutodiffError::ShapeMismatch {
                op: "softmax_cross_entropy",
                lhs: lv.shape().to_vec(),
                rhs: vec![targets.len()],
            });
        }
        let k = lv.cols();
        let mut probs = Array::zeros(lv.shape());
        let mut total = 0.0;
        let mut count = 0usize;
        for (r, target) in targets.iter().enumerate() {
            let row = lv.row(r);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exp_sum: f64 = row.iter().map(|&z| (z - max).exp()).sum();
            let log_norm = max + exp_sum.ln();
            for (p, &z) in probs.row_mut(r).iter_mut().zip(row) {
                *p = (z - log_norm).exp();
            }
            if let Some(t) = *target {
                if t >= k {
                    return Err(AutodiffError::IndexOutOfRange {
                        op: "softmax_cross_entropy",
                        index: t,
                        bound: k,
                    });
                }
                total += log_norm - row[t];
                count += 1;
            }
        }
        let loss = if count == 0 { 0.0 } else { total / count as f64 };
        self.push(
            Array::scalar(loss),
            Op::SoftmaxCrossEntropy {
                logits,
                targets: targets.to_vec(),
                probs,
                count,
            },
            "softmax_cross_entropy",
        )
    }

    /// Identity on the forward pass; multiplies the incoming gradient by
    /// `factor` on the backward pass. With a negative factor this is a
    /// gradient-reversal layer.
    pub fn scale_gradient(&mut self, x: Var, factor: f64) -> Result<Var, AutodiffError> {
        let out = self.value(x).clone();
        self.push(out, Op::ScaleGradient(x, factor), "scale_gradient")
    }

    /// Populates gradients of the scalar `loss` with respect to every node.
    ///
    /// A graph can be differentiated once; build a new graph for the next
    /// evaluation.
    pub fn backward(&mut self, loss: Var) -> Result<(), AutodiffError> {
        if self.grads.is_some() {
            return Err(AutodiffError::BackwardAlreadyRun);
        }
        let loss_value = self.value(loss);
        if !loss_value.is_scalar() {
            return Err(AutodiffError::NonScalarLoss {
                shape: loss_value.shape().to_vec(),
            });
        }
        let mut grads: Vec<Option<Array>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Array::filled(loss_value.shape(), 1.0));

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else {
                continue;
            };
            for (parent, contribution) in self.parent_grads(idx, &g) {
                match &mut grads[parent.0] {
                    Some(acc) => acc.add_assign(&contribution),
                    slot @ None => *slot = Some(contribution),
                }
            }
            grads[idx] = Some(g);
        }
        for g in grads.iter().flatten() {
            if !g.all_finite() {
                return Err(AutodiffError::NonFinite { op: "backward" });
            }
        }
        self.grads = Some(grads);
        Ok(())
    }

    fn parent_grads(&self, idx: usize, g: &Array) -> Vec<(Var, Array)> {
        let node = &self.nodes[idx];
        match &node.op {
            Op::Leaf => Vec::new(),
            Op::MatMul(a, b) => {
                let da = g.matmul_t(self.value(*b));
                let db = self.value(*a).t_matmul(g);
                vec![(*a, da), (*b, db)]
            }
            Op::Add(a, b) => vec![(*a, g.clone()), (*b, g.clone())],
            Op::AddRow(a, b) => {
                let cols = g.cols();
                let mut db = Array::zeros(&[1, cols]);
                for r in 0..g.rows() {
                    for (d, v) in db.data_mut().iter_mut().zip(g.row(r)) {
                        *d += v;
                    }
                }
                vec![(*a, g.clone()), (*b, db)]
            }
            Op::Sub(a, b) => vec![(*a, g.clone()), (*b, g.map(|v| -v))],
            Op::Mul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                let da = zip_with(g, bv, |gi, bi| gi * bi);
                let db = zip_with(g, av, |gi, ai| gi * ai);
                vec![(*a, da), (*b, db)]
            }
            Op::Scale(a, factor) => vec![(*a, g.map(|v| v * factor))],
            Op::Tanh(a) => {
                let da = zip_with(g, &node.value, |gi, y| gi * (1.0 - y * y));
                vec![(*a, da)]
            }
            Op::Relu(a) => {
                let da = zip_with(g, self.value(*a), |gi, x| if x > 0.0 { gi } else { 0.0 });
                vec![(*a, da)]
            }
            Op::Embedding { table, ids } => {
                let tv = self.value(*table);
                let mut dt = Array::zeros(tv.shape());
                for (r, &id) in ids.iter().enumerate() {
                    for (d, v) in dt.row_mut(id).iter_mut().zip(g.row(r)) {
                        *d += v;
                    }
                }
                vec![(*table, dt)]
            }
            Op::Concat(parts) => {
                let mut offset = 0;
                let mut out = Vec::with_capacity(parts.len());
                for &p in parts {
                    let pv = self.value(p);
                    let cols = pv.cols();
                    let mut dp = Array::zeros(pv.shape());
                    for r in 0..pv.rows() {
                        dp.row_mut(r)
                            .copy_from_slice(&g.row(r)[offset..offset + cols]);
                    }
                    offset += cols;
                    out.push((p, dp));
                }
                out
            }
            Op::Mean(a) => {
                let av = self.value(*a);
                let scale = g.data()[0] / av.len() as f64;
                vec![(*a, Array::filled(av.shape(), scale))]
            }
            Op::Sum(a) => vec![(*a, Array::filled(self.value(*a).shape(), g.data()[0]))],
            Op::SoftmaxCrossEntropy {
                logits,
                targets,
                probs,
                count,
            } => {
                let mut dl = Array::zeros(probs.shape());
                if *count > 0 {
                    let upstream = g.data()[0] / *count as f64;
                    for (r, target) in targets.iter().enumerate() {
                        let Some(t) = *target else { continue };
                        let row = dl.row_mut(r);
                        row.copy_from_slice(probs.row(r));
                        row[t] -= 1.0;
                        for v in row.iter_mut() {
                            *v *= upstream;
                        }
                    }
                }
                vec![(*logits, dl)]
            }
            Op::ScaleGradient(x, factor) => vec![(*x, g.map(|v| v * factor))],
        }
    }
}

fn zip_with(a: &Array, b: &Array, f: impl Fn(f64, f64) -> f64) -> Array {
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Array::new(a.shape().to_vec(), data).expect("zip_with of equal shapes")
}
