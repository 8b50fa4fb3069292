//! Residual policy-value network with up to two policy-value heads.
//!
//! The trunk is one or two residual blocks of two dense ReLU layers each.
//! The first block's shortcut is a learned projection from the input; the
//! second block's shortcut is the identity. A head tapped after block 1
//! (layer 2) is the *sub* head, a head tapped after block 2 (layer 4) is the
//! *full* head. Each head is a masked-softmax policy layer plus a `tanh`
//! value layer.
//!
//! All parameters live in one flat vector so that optimisers, checkpoints
//! and finite-difference checks can treat the model uniformly. Gradients are
//! derived by hand.

mod checkpoint;
mod evaluator;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_FORMAT_VERSION};
pub use evaluator::{NetEvaluator, SharedTrunk, TrunkHead};

pub const DEFAULT_HIDDEN: usize = 64;
const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("input width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("training batch is empty")]
    EmptyBatch,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("network has no {0:?} head")]
    MissingHead(Tap),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("unsupported checkpoint format version {found} (this build reads 1..={supported})")]
    VersionMismatch { found: u32, supported: u32 },
}

/// Where a policy-value head is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tap {
    /// After layer 2 (end of the first residual block).
    Sub,
    /// After layer 4 (end of the second residual block).
    Full,
}

impl Tap {
    fn block(self) -> usize {
        match self {
            Tap::Sub => 1,
            Tap::Full => 2,
        }
    }
}

/// Layer sizes and head placement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetShape {
    pub input: usize,
    pub hidden: usize,
    pub actions: usize,
    /// Residual blocks (1 or 2); each block is two dense layers.
    pub blocks: usize,
    pub taps: Vec<Tap>,
}

impl NetShape {
    /// Four layers, sub head after layer 2 and full head after layer 4.
    pub fn dual(input: usize, hidden: usize, actions: usize) -> Self {
        Self { input, hidden, actions, blocks: 2, taps: vec![Tap::Sub, Tap::Full] }
    }

    /// Two layers with a single head (the small MPV network).
    pub fn small(input: usize, hidden: usize, actions: usize) -> Self {
        Self { input, hidden, actions, blocks: 1, taps: vec![Tap::Sub] }
    }

    /// Four layers with a single head on top (AlphaZero, large MPV network).
    pub fn large(input: usize, hidden: usize, actions: usize) -> Self {
        Self { input, hidden, actions, blocks: 2, taps: vec![Tap::Full] }
    }

    fn validate(&self) -> Result<(), NetError> {
        let ok = self.input > 0
            && self.hidden > 0
            && self.actions > 0
            && (1..=2).contains(&self.blocks)
            && !self.taps.is_empty()
            && self.taps.iter().all(|t| t.block() <= self.blocks);
        if ok {
            Ok(())
        } else {
            Err(NetError::Corrupt(format!("invalid network shape {self:?}")))
        }
    }
}

/// A named slice of the flat parameter vector, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dense {
    w: usize,
    b: Option<usize>,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeadLayout {
    tap: Tap,
    policy: Dense,
    value: Dense,
}

#[derive(Debug, Clone, PartialEq)]
struct Layout {
    tensors: Vec<TensorSpec>,
    layers: Vec<Dense>,
    shortcut: Dense,
    heads: Vec<HeadLayout>,
    size: usize,
}

impl Layout {
    fn new(shape: &NetShape) -> Self {
        let mut tensors = Vec::new();
        let mut size = 0;
        let mut add = |name: String, rows: usize, cols: usize| {
            tensors.push(TensorSpec { name, rows, cols, offset: size });
            size += rows * cols;
            size - rows * cols
        };
        let dense = |add: &mut dyn FnMut(String, usize, usize) -> usize, name: &str, rows, cols, bias: bool| {
            let w = add(format!("{name}.w"), rows, cols);
            let b = bias.then(|| add(format!("{name}.b"), rows, 1));
            Dense { w, b, rows, cols }
        };
        let h = shape.hidden;
        let mut layers = Vec::new();
        for k in 0..2 * shape.blocks {
            let cols = if k == 0 { shape.input } else { h };
            layers.push(dense(&mut add, &format!("layer{}", k + 1), h, cols, true));
        }
        let shortcut = dense(&mut add, "shortcut", h, shape.input, false);
        let heads = shape
            .taps
            .iter()
            .map(|&tap| {
                let name = match tap {
                    Tap::Sub => "sub",
                    Tap::Full => "full",
                };
                HeadLayout {
                    tap,
                    policy: dense(&mut add, &format!("{name}.policy"), shape.actions, h, true),
                    value: dense(&mut add, &format!("{name}.value"), 1, h, true),
                }
            })
            .collect();
        Layout { tensors, layers, shortcut, heads, size }
    }
}

/// Output of one head for one position.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadOutput {
    /// Probabilities over the full action width; zero on illegal actions.
    pub policy: Vec<f64>,
    pub value: f64,
}

/// Outputs of every head the network has.
#[derive(Debug, Clone, PartialEq)]
pub struct NetOutput {
    pub sub: Option<HeadOutput>,
    pub full: Option<HeadOutput>,
}

impl NetOutput {
    pub fn head(&self, tap: Tap) -> Option<&HeadOutput> {
        match tap {
            Tap::Sub => self.sub.as_ref(),
            Tap::Full => self.full.as_ref(),
        }
    }
}

/// One supervised example: encoded position, legal mask, visit-count policy
/// target over the full action width and the game outcome for the side to
/// move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSample {
    pub input: Vec<f64>,
    pub mask: Vec<bool>,
    pub policy: Vec<f64>,
    pub outcome: f64,
}

/// Weights of the loss terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub w_sub: f64,
    pub w_full: f64,
    pub l2: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { w_sub: 1.0, w_full: 1.0, l2: 1e-4 }
    }
}

impl LossConfig {
    fn weight(&self, tap: Tap) -> f64 {
        match tap {
            Tap::Sub => self.w_sub,
            Tap::Full => self.w_full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyValueNet {
    shape: NetShape,
    layout: Layout,
    params: Vec<f64>,
    seed: u64,
}

struct Trace {
    // pre-activations and activations per dense layer of the trunk
    z: Vec<Vec<f64>>,
    a: Vec<Vec<f64>>,
    heads: Vec<(Vec<f64>, f64)>,
}

fn matvec(params: &[f64], d: Dense, x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate().take(d.rows) {
        let row = &params[d.w + i * d.cols..d.w + (i + 1) * d.cols];
        let mut acc = d.b.map_or(0.0, |b| params[b + i]);
        for (w, xv) in row.iter().zip(x) {
            acc += w * xv;
        }
        *o = acc;
    }
}

// out += W^T g
fn matvec_t_acc(params: &[f64], d: Dense, g: &[f64], out: &mut [f64]) {
    for (i, &gi) in g.iter().enumerate().take(d.rows) {
        if gi == 0.0 {
            continue;
        }
        let row = &params[d.w + i * d.cols..d.w + (i + 1) * d.cols];
        for (o, w) in out.iter_mut().zip(row) {
            *o += w * gi;
        }
    }
}

// dW += g x^T, db += g
fn outer_acc(grad: &mut [f64], d: Dense, g: &[f64], x: &[f64]) {
    for (i, &gi) in g.iter().enumerate().take(d.rows) {
        if gi == 0.0 {
            continue;
        }
        let row = &mut grad[d.w + i * d.cols..d.w + (i + 1) * d.cols];
        for (r, xv) in row.iter_mut().zip(x) {
            *r += gi * xv;
        }
        if let Some(b) = d.b {
            grad[b + i] += gi;
        }
    }
}

fn masked_softmax(logits: &[f64], mask: &[bool]) -> Vec<f64> {
    let max = logits.iter().zip(mask).filter(|(_, &m)| m).map(|(&l, _)| l).fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logits.iter().zip(mask).map(|(&l, &m)| if m { (l - max).exp() } else { 0.0 }).collect();
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|v| *v /= total);
    }
    p
}

impl PolicyValueNet {
    /// Fan-in scaled uniform initialisation from `seed`.
    pub fn new(shape: NetShape, seed: u64) -> Result<Self, NetError> {
        Self::new_indexed(shape, seed, 0)
    }

    /// Like [`new`](Self::new) but drawing from init stream `index`, so
    /// several networks can share one master seed.
    pub fn new_indexed(shape: NetShape, seed: u64, index: u64) -> Result<Self, NetError> {
        let mut net = Self::zeros(shape)?;
        net.seed = seed;
        let mut rng = rng::stream(seed, rng::purpose::INIT, index);
        let layout = net.layout().clone();
        for t in &layout.tensors {
            let bound = 1.0 / (t.cols as f64).sqrt();
            let is_bias = t.name.ends_with(".b");
            for v in &mut net.params[t.range()] {
                *v = if is_bias { 0.0 } else { rng.random_range(-bound..bound) };
            }
        }
        Ok(net)
    }

    /// All-zero parameters.
    pub fn zeros(shape: NetShape) -> Result<Self, NetError> {
        shape.validate()?;
        let layout = Layout::new(&shape);
        Ok(Self { params: vec![0.0; layout.size], layout, shape, seed: 0 })
    }

    pub fn shape(&self) -> &NetShape {
        &self.shape
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn has_head(&self, tap: Tap) -> bool {
        self.shape.taps.contains(&tap)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.layout.size
    }

    /// Named tensors in storage order.
    pub fn tensors(&self) -> Vec<TensorSpec> {
        self.layout.tensors.clone()
    }

    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        self.tensors().into_iter().find(|t| t.name == name).map(|t| &self.params[t.range()])
    }

    pub(crate) fn from_parts(shape: NetShape, params: Vec<f64>, seed: u64) -> Result<Self, NetError> {
        shape.validate()?;
        let layout = Layout::new(&shape);
        if params.len() != layout.size {
            return Err(NetError::Corrupt(format!("expected {} parameters, found {}", layout.size, params.len())));
        }
        Ok(Self { layout, shape, params, seed })
    }

    fn layout(&self) -> &Layout {
        &self.layout
    }

    fn check_input(&self, x: &[f64], mask: &[bool]) -> Result<(), NetError> {
        if x.len() != self.shape.input {
            return Err(NetError::WidthMismatch { expected: self.shape.input, got: x.len() });
        }
        if mask.len() != self.shape.actions {
            return Err(NetError::WidthMismatch { expected: self.shape.actions, got: mask.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(NetError::NonFinite("input".into()));
        }
        Ok(())
    }

    /// Runs the trunk up to `blocks` residual blocks and the heads tapped
    /// within them.
    fn trace(&self, layout: &Layout, x: &[f64], blocks: usize) -> Trace {
        let h = self.shape.hidden;
        let p = &self.params;
        let mut z = Vec::with_capacity(2 * blocks);
        let mut a: Vec<Vec<f64>> = Vec::with_capacity(2 * blocks);
        for b in 0..blocks {
            let input: &[f64] = if b == 0 { x } else { &a[2 * b - 1] };
            let mut z1 = vec![0.0; h];
            matvec(p, layout.layers[2 * b], input, &mut z1);
            let a1: Vec<f64> = z1.iter().map(|&v| v.max(0.0)).collect();
            let mut z2 = vec![0.0; h];
            matvec(p, layout.layers[2 * b + 1], &a1, &mut z2);
            if b == 0 {
                let mut s = vec![0.0; h];
                matvec(p, layout.shortcut, x, &mut s);
                z2.iter_mut().zip(&s).for_each(|(v, s)| *v += s);
            } else {
                z2.iter_mut().zip(&a[2 * b - 1]).for_each(|(v, s)| *v += s);
            }
            let a2: Vec<f64> = z2.iter().map(|&v| v.max(0.0)).collect();
            z.push(z1);
            a.push(a1);
            z.push(z2);
            a.push(a2);
        }
        let heads = layout
            .heads
            .iter()
            .filter(|hd| hd.tap.block() <= blocks)
            .map(|hd| {
                let feat = &a[2 * hd.tap.block() - 1];
                let mut logits = vec![0.0; self.shape.actions];
                matvec(p, hd.policy, feat, &mut logits);
                let mut v = [0.0];
                matvec(p, hd.value, feat, &mut v);
                (logits, v[0].tanh())
            })
            .collect();
        Trace { z, a, heads }
    }

    /// Evaluates every head.
    pub fn forward(&self, x: &[f64], mask: &[bool]) -> Result<NetOutput, NetError> {
        self.check_input(x, mask)?;
        let layout = self.layout();
        let trace = self.trace(layout, x, self.shape.blocks);
        let mut out = NetOutput { sub: None, full: None };
        for (hd, (logits, v)) in layout.heads.iter().zip(trace.heads) {
            let head = HeadOutput { policy: masked_softmax(&logits, mask), value: v };
            match hd.tap {
                Tap::Sub => out.sub = Some(head),
                Tap::Full => out.full = Some(head),
            }
        }
        Ok(out)
    }

    /// Evaluates a single head, computing only the layers it depends on.
    pub fn forward_head(&self, x: &[f64], mask: &[bool], tap: Tap) -> Result<HeadOutput, NetError> {
        self.check_input(x, mask)?;
        if !self.has_head(tap) {
            return Err(NetError::MissingHead(tap));
        }
        let feat = self.block_forward(0, x, x);
        Ok(self.head_tail(feat, mask, tap))
    }

    /// Output of the first residual block: the features the sub head reads
    /// and the second block consumes.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>, NetError> {
        self.check_input(x, &vec![true; self.shape.actions])?;
        Ok(self.block_forward(0, x, x))
    }

    /// A head evaluated from [`PolicyValueNet::features`]. Bit-identical to
    /// [`PolicyValueNet::forward_head`] on the input the features came from.
    pub fn head_from_features(&self, features: &[f64], mask: &[bool], tap: Tap) -> Result<HeadOutput, NetError> {
        if features.len() != self.shape.hidden {
            return Err(NetError::WidthMismatch { expected: self.shape.hidden, got: features.len() });
        }
        if mask.len() != self.shape.actions {
            return Err(NetError::WidthMismatch { expected: self.shape.actions, got: mask.len() });
        }
        if !self.has_head(tap) {
            return Err(NetError::MissingHead(tap));
        }
        Ok(self.head_tail(features.to_vec(), mask, tap))
    }

    fn head_tail(&self, mut feat: Vec<f64>, mask: &[bool], tap: Tap) -> HeadOutput {
        for b in 1..tap.block() {
            feat = self.block_forward(b, &feat, &feat);
        }
        let hd = self.layout.heads.iter().find(|hd| hd.tap == tap).expect("tapped head");
        let mut logits = vec![0.0; self.shape.actions];
        matvec(&self.params, hd.policy, &feat, &mut logits);
        let mut v = [0.0];
        matvec(&self.params, hd.value, &feat, &mut v);
        HeadOutput { policy: masked_softmax(&logits, mask), value: v[0].tanh() }
    }

    /// Residual block `b` without the intermediate values kept for backprop.
    /// `x` is the network input, used by the first block's shortcut.
    fn block_forward(&self, b: usize, input: &[f64], x: &[f64]) -> Vec<f64> {
        let (h, p, layout) = (self.shape.hidden, &self.params, &self.layout);
        let mut z1 = vec![0.0; h];
        matvec(p, layout.layers[2 * b], input, &mut z1);
        z1.iter_mut().for_each(|v| *v = v.max(0.0));
        let mut z2 = vec![0.0; h];
        matvec(p, layout.layers[2 * b + 1], &z1, &mut z2);
        if b == 0 {
            let mut s = vec![0.0; h];
            matvec(p, layout.shortcut, x, &mut s);
            z2.iter_mut().zip(&s).for_each(|(v, s)| *v += s);
        } else {
            z2.iter_mut().zip(input).for_each(|(v, s)| *v += s);
        }
        z2.iter_mut().for_each(|v| *v = v.max(0.0));
        z2
    }

    /// Mean per-sample loss over the batch plus `l2 * |params|^2`.
    pub fn loss(&self, batch: &[TrainSample], cfg: &LossConfig) -> Result<f64, NetError> {
        if batch.is_empty() {
            return Err(NetError::EmptyBatch);
        }
        let mut total = 0.0;
        for s in batch {
            let out = self.forward(&s.input, &s.mask)?;
            for &tap in &self.shape.taps {
                let w = cfg.weight(tap);
                if w != 0.0 {
                    total += w * sample_loss(out.head(tap).expect("head"), s);
                }
            }
        }
        Ok(total / batch.len() as f64 + cfg.l2 * self.params.iter().map(|p| p * p).sum::<f64>())
    }

    /// Loss and its gradient with respect to every parameter.
    pub fn loss_and_grad(&self, batch: &[TrainSample], cfg: &LossConfig) -> Result<(f64, Vec<f64>), NetError> {
        if batch.is_empty() {
            return Err(NetError::EmptyBatch);
        }
        let layout = self.layout();
        let p = &self.params;
        let h = self.shape.hidden;
        let blocks = self.shape.blocks;
        let mut grad = vec![0.0; p.len()];
        let mut total = 0.0;
        for s in batch {
            self.check_input(&s.input, &s.mask)?;
            let trace = self.trace(layout, &s.input, blocks);
            // gradient w.r.t. the output activation of each block
            let mut da_block = vec![vec![0.0; h]; blocks];
            for (hd, (logits, v)) in layout.heads.iter().zip(&trace.heads) {
                let w = cfg.weight(hd.tap);
                if w == 0.0 {
                    continue;
                }
                let policy = masked_softmax(logits, &s.mask);
                total += w * sample_loss(&HeadOutput { policy: policy.clone(), value: *v }, s);

                let counted: f64 = policy
                    .iter()
                    .zip(&s.policy)
                    .zip(&s.mask)
                    .filter(|((&pr, _), &m)| m && pr >= LOG_FLOOR)
                    .map(|((_, &t), _)| t)
                    .sum();
                let dlogits: Vec<f64> = (0..self.shape.actions)
                    .map(|j| {
                        if !s.mask[j] {
                            return 0.0;
                        }
                        let own = if policy[j] >= LOG_FLOOR { s.policy[j] } else { 0.0 };
                        w * (policy[j] * counted - own)
                    })
                    .collect();
                let dv = w * -2.0 * (s.outcome - v) * (1.0 - v * v);
                let feat = &trace.a[2 * hd.tap.block() - 1];
                outer_acc(&mut grad, hd.policy, &dlogits, feat);
                outer_acc(&mut grad, hd.value, &[dv], feat);
                let da = &mut da_block[hd.tap.block() - 1];
                matvec_t_acc(p, hd.policy, &dlogits, da);
                matvec_t_acc(p, hd.value, &[dv], da);
            }
            for b in (0..blocks).rev() {
                let da2 = std::mem::take(&mut da_block[b]);
                let dz2: Vec<f64> =
                    da2.iter().zip(&trace.z[2 * b + 1]).map(|(&g, &z)| if z > 0.0 { g } else { 0.0 }).collect();
                let block_input: &[f64] = if b == 0 { &s.input } else { &trace.a[2 * b - 1] };
                outer_acc(&mut grad, layout.layers[2 * b + 1], &dz2, &trace.a[2 * b]);
                let mut da1 = vec![0.0; h];
                matvec_t_acc(p, layout.layers[2 * b + 1], &dz2, &mut da1);
                let dz1: Vec<f64> =
                    da1.iter().zip(&trace.z[2 * b]).map(|(&g, &z)| if z > 0.0 { g } else { 0.0 }).collect();
                outer_acc(&mut grad, layout.layers[2 * b], &dz1, block_input);
                if b == 0 {
                    outer_acc(&mut grad, layout.shortcut, &dz2, &s.input);
                } else {
                    let prev = &mut da_block[b - 1];
                    matvec_t_acc(p, layout.layers[2 * b], &dz1, prev);
                    prev.iter_mut().zip(&dz2).for_each(|(g, d)| *g += d);
                }
            }
        }
        let n = batch.len() as f64;
        let mut loss = total / n;
        for (g, &w) in grad.iter_mut().zip(p) {
            *g = *g / n + 2.0 * cfg.l2 * w;
            loss += cfg.l2 * w * w;
        }
        Ok((loss, grad))
    }
}

/// `(z - v)^2 - sum pi log p` for one head and one sample.
fn sample_loss(out: &HeadOutput, s: &TrainSample) -> f64 {
    let ce: f64 = out
        .policy
        .iter()
        .zip(&s.policy)
        .zip(&s.mask)
        .filter(|(_, &m)| m)
        .map(|((&p, &t), _)| -t * p.max(LOG_FLOOR).ln())
        .sum();
    (s.outcome - out.value).powi(2) + ce
}

/// Plain SGD with optional momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sgd {
    pub momentum: f64,
    velocity: Vec<f64>,
}

impl Sgd {
    pub fn new(momentum: f64) -> Self {
        Self { momentum, velocity: Vec::new() }
    }
}

impl Default for Sgd {
    fn default() -> Self {
        Self::new(0.0)
    }
}

/// One gradient step on `batch`. Returns the loss before the step.
pub fn train_step(
    net: &mut PolicyValueNet,
    batch: &[TrainSample],
    opt: &mut Sgd,
    lr: f64,
    cfg: &LossConfig,
) -> Result<f64, NetError> {
    let (loss, grad) = net.loss_and_grad(batch, cfg)?;
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        let name = net
            .tensors()
            .into_iter()
            .find(|t| t.range().contains(&i))
            .map_or_else(|| format!("parameter {i}"), |t| t.name);
        return Err(NetError::NonFinite(format!("gradient of {name}")));
    }
    if !loss.is_finite() {
        return Err(NetError::NonFinite("loss".into()));
    }
    if opt.momentum == 0.0 {
        for (w, g) in net.params.iter_mut().zip(&grad) {
            *w -= lr * g;
        }
    } else {
        if opt.velocity.len() != grad.len() {
            opt.velocity = vec![0.0; grad.len()];
        }
        for ((w, g), v) in net.params.iter_mut().zip(&grad).zip(opt.velocity.iter_mut()) {
            *v = opt.momentum * *v + g;
            *w -= lr * *v;
        }
    }
    Ok(loss)
}
