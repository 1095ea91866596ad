//! Reject-aware multi-task network.
//!
//! One embedding feeds `M` rejection towers (one per approval policy) and a
//! single default tower. Each tower has `t` dense layers: relu on layers
//! `1..t-1`, sigmoid on layer `t`. At every hidden layer `j` the default tower
//! adds the rejection representations, each scaled by a scalar gate
//!
//! ```text
//! g[m][j] = sigmoid(alpha[m][j] * p[m] + beta[m][j])
//! q[j]    = relu(q[j-1]·W_D[j] + b_D[j]) + sum_m g[m][j] * p[m][j]
//! ```
//!
//! where `p[m]` is tower `m`'s rejection probability and `q[0] = p[m][0] = e`.
//! With `M = 1` this is the single-policy network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::train::{train, DefaultScorer, Objective, TrainingLog};
use super::{Embedding, ModelConfig};
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::nncore::{bce, bce_logit_grad, sigmoid, DenseLayer, ParamSet, Tensor};

/// Structural hyperparameters of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmtShape {
    pub embedding_dim: usize,
    pub hidden: usize,
    pub layers: usize,
    pub policies: usize,
}

impl RmtShape {
    pub fn validate(&self) -> Result<()> {
        if self.layers < 2 {
            return Err(Error::Config(format!("need at least 2 layers, got {}", self.layers)));
        }
        if self.policies == 0 || self.embedding_dim == 0 || self.hidden == 0 {
            return Err(Error::Config(
                "policies, embedding_dim and hidden must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Parameters of the network. The same type holds gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmtNet {
    pub embedding: Embedding,
    /// `ra[m][j]`: layer `j + 1` of rejection tower `m`.
    pub ra: Vec<Vec<DenseLayer>>,
    /// `dn[j]`: layer `j + 1` of the default tower.
    pub dn: Vec<DenseLayer>,
    /// `alpha[m][j]`, `beta[m][j]` for hidden layers `j + 1 = 1..t-1`.
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

/// Forward record of one rejection tower.
#[derive(Debug, Clone, PartialEq)]
pub struct RaOutput {
    /// Pre-activations of layers `1..=t`.
    pub pre: Vec<Vec<f64>>,
    /// `p[j]` for `j = 1..t-1`.
    pub hidden: Vec<Vec<f64>>,
    /// Rejection probability `p[t]`.
    pub prob: f64,
}

/// Forward record of the default tower.
#[derive(Debug, Clone, PartialEq)]
pub struct DnOutput {
    pub pre: Vec<Vec<f64>>,
    /// `q[j]` for `j = 1..t-1`, gated sums included.
    pub hidden: Vec<Vec<f64>>,
    /// `gates[m][j]`.
    pub gates: Vec<Vec<f64>>,
    /// Default probability `q[t]`.
    pub prob: f64,
}

/// Everything recorded by one forward pass; consumed by [`RmtNet::backward`].
#[derive(Debug, Clone, PartialEq)]
pub struct RmtTape {
    pub embedded: Vec<f64>,
    pub ra: Vec<RaOutput>,
    pub dn: DnOutput,
}

/// Output probabilities for one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// One rejection probability per policy tower.
    pub rejection: Vec<f64>,
    pub default: f64,
}

/// Summed losses: `total = (1-eta) * rejection / M + eta * default`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub total: f64,
    pub rejection: f64,
    pub default: f64,
}

impl std::ops::AddAssign for LossParts {
    fn add_assign(&mut self, o: LossParts) {
        self.total += o.total;
        self.rejection += o.rejection;
        self.default += o.default;
    }
}

/// Loss weighting and gradient-routing options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmtObjectiveOptions {
    pub eta: f64,
    pub share_gradient_through_gate: bool,
    pub strict_policy_heads: bool,
}

impl RmtNet {
    pub fn init<R: Rng + ?Sized>(cardinalities: &[usize], shape: RmtShape, rng: &mut R) -> Result<Self> {
        shape.validate()?;
        let embedding = Embedding::init(cardinalities, shape.embedding_dim, rng);
        let widths = tower_widths(embedding.output_dim(), shape);
        let tower =
            |rng: &mut R| -> Vec<DenseLayer> { widths.windows(2).map(|w| DenseLayer::init(w[0], w[1], rng)).collect() };
        let ra = (0..shape.policies).map(|_| tower(rng)).collect();
        let dn = tower(rng);
        let gates = vec![vec![0.0; shape.layers - 1]; shape.policies];
        Ok(RmtNet {
            embedding,
            ra,
            dn,
            alpha: gates.clone(),
            beta: gates,
        })
    }

    /// Assembles a network from explicit parameters, checking every shape.
    pub fn from_parts(
        embedding: Embedding,
        ra: Vec<Vec<DenseLayer>>,
        dn: Vec<DenseLayer>,
        alpha: Vec<Vec<f64>>,
        beta: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let net = RmtNet {
            embedding,
            ra,
            dn,
            alpha,
            beta,
        };
        net.check_shapes()?;
        Ok(net)
    }

    fn check_shapes(&self) -> Result<()> {
        let t = self.dn.len();
        let m = self.ra.len();
        if t < 2 || m == 0 {
            return Err(Error::Shape(format!("{t} layers and {m} policies")));
        }
        let mut expected_in = self.embedding.output_dim();
        for j in 0..t {
            let dn = &self.dn[j];
            if dn.input_dim() != expected_in {
                return Err(Error::Shape(format!("default layer {} input width", j + 1)));
            }
            for (p, tower) in self.ra.iter().enumerate() {
                let l = tower
                    .get(j)
                    .ok_or_else(|| Error::Shape(format!("rejection tower {p} is shorter than {t}")))?;
                if l.input_dim() != expected_in || l.output_dim() != dn.output_dim() {
                    return Err(Error::Shape(format!(
                        "rejection tower {p} layer {} is {}x{}, default tower has {}x{}",
                        j + 1,
                        l.input_dim(),
                        l.output_dim(),
                        dn.input_dim(),
                        dn.output_dim()
                    )));
                }
            }
            expected_in = dn.output_dim();
        }
        if expected_in != 1 {
            return Err(Error::Shape("output layers must have width 1".into()));
        }
        if self.ra.iter().any(|tower| tower.len() != t) {
            return Err(Error::Shape("towers differ in depth".into()));
        }
        let gates_ok = |g: &Vec<Vec<f64>>| g.len() == m && g.iter().all(|v| v.len() == t - 1);
        if !gates_ok(&self.alpha) || !gates_ok(&self.beta) {
            return Err(Error::Shape("one alpha and beta per policy and hidden layer".into()));
        }
        Ok(())
    }

    pub fn n_layers(&self) -> usize {
        self.dn.len()
    }

    pub fn n_policies(&self) -> usize {
        self.ra.len()
    }

    pub fn shape(&self) -> RmtShape {
        RmtShape {
            embedding_dim: self.embedding.dim(),
            hidden: self.dn[0].output_dim(),
            layers: self.n_layers(),
            policies: self.n_policies(),
        }
    }

    pub fn embed(&self, bins: &[u32]) -> Result<Vec<f64>> {
        self.embedding.embed(bins)
    }

    /// Rejection tower `m` on an embedded row.
    pub fn ra_forward(&self, embedded: &[f64], m: usize) -> Result<RaOutput> {
        let tower = self
            .ra
            .get(m)
            .ok_or_else(|| Error::Shape(format!("no rejection tower {m}")))?;
        if embedded.len() != self.embedding.output_dim() {
            return Err(Error::Shape(format!(
                "embedded row of length {}, expected {}",
                embedded.len(),
                self.embedding.output_dim()
            )));
        }
        let t = tower.len();
        let mut pre = Vec::with_capacity(t);
        let mut hidden: Vec<Vec<f64>> = Vec::with_capacity(t - 1);
        for (j, layer) in tower.iter().enumerate() {
            let input = if j == 0 { embedded } else { &hidden[j - 1] };
            let z = layer.affine(input);
            if j + 1 < t {
                hidden.push(z.iter().map(|v| v.max(0.0)).collect());
            }
            pre.push(z);
        }
        let prob = sigmoid(pre[t - 1][0]);
        Ok(RaOutput { pre, hidden, prob })
    }

    /// Gate of policy `m` at hidden layer `j` (0-based) for rejection probability `p`.
    #[inline]
    pub fn gate(&self, p: f64, j: usize, m: usize) -> f64 {
        sigmoid(self.alpha[m][j] * p + self.beta[m][j])
    }

    /// Default tower; needs the outputs of every rejection tower.
    pub fn dn_forward(&self, embedded: &[f64], ra: &[RaOutput]) -> Result<DnOutput> {
        if ra.len() != self.n_policies() {
            return Err(Error::Contract(format!(
                "default tower needs {} rejection outputs, got {}",
                self.n_policies(),
                ra.len()
            )));
        }
        let t = self.n_layers();
        let gates: Vec<Vec<f64>> = ra
            .iter()
            .enumerate()
            .map(|(m, out)| (0..t - 1).map(|j| self.gate(out.prob, j, m)).collect())
            .collect();
        let mut pre = Vec::with_capacity(t);
        let mut hidden: Vec<Vec<f64>> = Vec::with_capacity(t - 1);
        for (j, layer) in self.dn.iter().enumerate() {
            let input = if j == 0 { embedded } else { &hidden[j - 1] };
            let z = layer.affine(input);
            if j + 1 < t {
                let mut q: Vec<f64> = z.iter().map(|v| v.max(0.0)).collect();
                for (m, out) in ra.iter().enumerate() {
                    let g = gates[m][j];
                    for (qi, pi) in q.iter_mut().zip(&out.hidden[j]) {
                        *qi += g * pi;
                    }
                }
                hidden.push(q);
            }
            pre.push(z);
        }
        let prob = sigmoid(pre[t - 1][0]);
        Ok(DnOutput {
            pre,
            hidden,
            gates,
            prob,
        })
    }

    pub fn forward(&self, bins: &[u32]) -> Result<RmtTape> {
        let embedded = self.embed(bins)?;
        let ra = (0..self.n_policies())
            .map(|m| self.ra_forward(&embedded, m))
            .collect::<Result<Vec<_>>>()?;
        let dn = self.dn_forward(&embedded, &ra)?;
        Ok(RmtTape { embedded, ra, dn })
    }

    pub fn predict(&self, bins: &[u32]) -> Result<Prediction> {
        let tape = self.forward(bins)?;
        Ok(Prediction {
            rejection: tape.ra.iter().map(|o| o.prob).collect(),
            default: tape.dn.prob,
        })
    }

    /// Exact gradients of one row's loss, accumulated into `grads`.
    ///
    /// `d_ra_logit[m]` and `d_dn_logit` are the loss gradients with respect to
    /// the output logits of rejection tower `m` and of the default tower.
    /// Gradients reaching a gate's input probability are passed on to the
    /// rejection tower only when `share_gate_input` is set.
    pub fn backward(
        &self,
        bins: &[u32],
        tape: &RmtTape,
        d_ra_logit: &[f64],
        d_dn_logit: f64,
        share_gate_input: bool,
        grads: &mut RmtNet,
    ) -> Result<()> {
        let t = self.n_layers();
        let n_policies = self.n_policies();
        if tape.ra.len() != n_policies
            || tape.dn.pre.len() != t
            || tape.dn.hidden.len() != t - 1
            || tape.ra.iter().any(|o| o.pre.len() != t || o.hidden.len() != t - 1)
        {
            return Err(Error::Contract("incomplete forward tape".into()));
        }
        if d_ra_logit.len() != n_policies {
            return Err(Error::Shape("one rejection gradient per policy".into()));
        }

        let mut d_embedded = vec![0.0; tape.embedded.len()];
        // gradients w.r.t. p[m][j] arriving through the gated sums
        let mut d_ra_hidden: Vec<Vec<Vec<f64>>> = tape
            .ra
            .iter()
            .map(|o| o.hidden.iter().map(|h| vec![0.0; h.len()]).collect())
            .collect();
        let mut d_ra_prob = vec![0.0; n_policies];

        // default tower
        let mut dz = vec![d_dn_logit];
        DenseLayer::accumulate_grad(&tape.dn.hidden[t - 2], &dz, &mut grads.dn[t - 1]);
        let mut dq = self.dn[t - 1].input_grad(&dz);
        for j in (0..t - 1).rev() {
            for m in 0..n_policies {
                let g = tape.dn.gates[m][j];
                let p_hidden = &tape.ra[m].hidden[j];
                let dg: f64 = dq.iter().zip(p_hidden).map(|(a, b)| a * b).sum();
                for (d, q) in d_ra_hidden[m][j].iter_mut().zip(&dq) {
                    *d += g * q;
                }
                let dg_logit = dg * g * (1.0 - g);
                grads.alpha[m][j] += dg_logit * tape.ra[m].prob;
                grads.beta[m][j] += dg_logit;
                d_ra_prob[m] += dg_logit * self.alpha[m][j];
            }
            dz = dq
                .iter()
                .zip(&tape.dn.pre[j])
                .map(|(d, z)| if *z > 0.0 { *d } else { 0.0 })
                .collect();
            let input = if j == 0 { &tape.embedded } else { &tape.dn.hidden[j - 1] };
            DenseLayer::accumulate_grad(input, &dz, &mut grads.dn[j]);
            dq = self.dn[j].input_grad(&dz);
        }
        for (a, b) in d_embedded.iter_mut().zip(&dq) {
            *a += b;
        }

        // rejection towers
        for m in 0..n_policies {
            let out = &tape.ra[m];
            let mut d_logit = d_ra_logit[m];
            if share_gate_input {
                d_logit += d_ra_prob[m] * out.prob * (1.0 - out.prob);
            }
            let tower = &self.ra[m];
            let mut dz = vec![d_logit];
            DenseLayer::accumulate_grad(&out.hidden[t - 2], &dz, &mut grads.ra[m][t - 1]);
            let mut dp = tower[t - 1].input_grad(&dz);
            for j in (0..t - 1).rev() {
                dz = dp
                    .iter()
                    .zip(&d_ra_hidden[m][j])
                    .zip(&out.pre[j])
                    .map(|((d, extra), z)| if *z > 0.0 { d + extra } else { 0.0 })
                    .collect();
                let input = if j == 0 { &tape.embedded } else { &out.hidden[j - 1] };
                DenseLayer::accumulate_grad(input, &dz, &mut grads.ra[m][j]);
                dp = tower[j].input_grad(&dz);
            }
            for (a, b) in d_embedded.iter_mut().zip(&dp) {
                *a += b;
            }
        }
        self.embedding.accumulate_grad(bins, &d_embedded, &mut grads.embedding);
        Ok(())
    }

    /// Rejection tower that scores row `i` of `dataset`: its policy for the
    /// multi-policy network, the only tower otherwise.
    pub fn head_for(&self, dataset: &Dataset, i: usize) -> Result<usize> {
        if self.n_policies() == 1 {
            return Ok(0);
        }
        let p = dataset.policy(i);
        if p > self.n_policies() {
            return Err(Error::Config(format!(
                "row {i} has policy {p} but the network has {} towers",
                self.n_policies()
            )));
        }
        Ok(p - 1)
    }

    /// Loss of `rows` and, when `grads` is given, its gradient accumulated into it.
    pub fn accumulate_loss(
        &self,
        dataset: &Dataset,
        rows: &[usize],
        options: RmtObjectiveOptions,
        mut grads: Option<&mut RmtNet>,
    ) -> Result<LossParts> {
        let n_policies = self.n_policies();
        let m_scale = 1.0 / n_policies as f64;
        let eta = options.eta;
        let mut parts = LossParts::default();
        let mut d_ra = vec![0.0; n_policies];
        for &i in rows {
            let bins = dataset.bins(i);
            let tape = self.forward(bins)?;
            let r = f64::from(dataset.rejection_label(i));
            let head = self.head_for(dataset, i)?;

            d_ra.iter_mut().for_each(|d| *d = 0.0);
            let mut l1 = 0.0;
            for (m, out) in tape.ra.iter().enumerate() {
                if options.strict_policy_heads && m != head {
                    continue;
                }
                l1 += bce(out.prob, r);
                d_ra[m] = (1.0 - eta) * m_scale * bce_logit_grad(out.prob, r);
            }
            let (l2, d_dn) = match (dataset.is_rejected(i), dataset.observed_default(i)) {
                (true, _) => (0.0, 0.0),
                (false, Some(y)) => {
                    let y = f64::from(y);
                    (bce(tape.dn.prob, y), eta * bce_logit_grad(tape.dn.prob, y))
                }
                (false, None) => return Err(Error::Contract(format!("approved row {i} has no default label"))),
            };
            parts += LossParts {
                total: (1.0 - eta) * l1 * m_scale + eta * l2,
                rejection: l1,
                default: l2,
            };
            if let Some(g) = grads.as_deref_mut() {
                self.backward(bins, &tape, &d_ra, d_dn, options.share_gradient_through_gate, g)?;
            }
        }
        Ok(parts)
    }

    /// Smallest `|pre-activation|` over every relu unit for the given rows;
    /// finite-difference probes are only trustworthy when this exceeds the step.
    pub fn min_relu_margin(&self, dataset: &Dataset, rows: &[usize]) -> Result<f64> {
        let t = self.n_layers();
        let mut margin = f64::INFINITY;
        for &i in rows {
            let tape = self.forward(dataset.bins(i))?;
            let pres = tape
                .ra
                .iter()
                .flat_map(|o| o.pre[..t - 1].iter())
                .chain(tape.dn.pre[..t - 1].iter());
            for z in pres.flatten() {
                margin = margin.min(z.abs());
            }
        }
        Ok(margin)
    }
}

fn tower_widths(input: usize, shape: RmtShape) -> Vec<usize> {
    let mut widths = vec![input];
    widths.extend(std::iter::repeat_n(shape.hidden, shape.layers - 1));
    widths.push(1);
    widths
}

/// Summed losses of precomputed predictions.
///
/// `policy` holds 1-based policy ids; each row's rejection loss uses only the
/// prediction of its own policy's tower. Default labels may be read only for
/// approved rows.
pub fn loss(
    predictions: &[Prediction],
    r: &[u8],
    y: &[Option<u8>],
    policy: &[usize],
    eta: f64,
    n_policies: usize,
) -> Result<LossParts> {
    let n = predictions.len();
    if r.len() != n || y.len() != n || policy.len() != n {
        return Err(Error::Shape("predictions and labels differ in length".into()));
    }
    if n_policies == 0 {
        return Err(Error::Config("need at least one policy".into()));
    }
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for i in 0..n {
        let pred = &predictions[i];
        let head = if pred.rejection.len() == 1 { 0 } else { policy[i] - 1 };
        let p = *pred
            .rejection
            .get(head)
            .ok_or_else(|| Error::Shape(format!("row {i}: no tower for policy {}", policy[i])))?;
        l1 += bce(p, f64::from(r[i]));
        match (r[i], y[i]) {
            (1, Some(_)) => return Err(Error::Contract(format!("default label of rejected row {i} consulted"))),
            (1, None) => {}
            (_, Some(label)) => l2 += bce(pred.default, f64::from(label)),
            (_, None) => return Err(Error::Contract(format!("approved row {i} has no default label"))),
        }
    }
    Ok(LossParts {
        total: (1.0 - eta) * l1 / n_policies as f64 + eta * l2,
        rejection: l1,
        default: l2,
    })
}

impl ParamSet for RmtNet {
    fn names(&self) -> Vec<String> {
        let mut names = vec!["embedding".to_string()];
        for m in 0..self.ra.len() {
            for j in 0..self.ra[m].len() {
                names.push(format!("ra{m}.l{}.weight", j + 1));
                names.push(format!("ra{m}.l{}.bias", j + 1));
            }
        }
        for j in 0..self.dn.len() {
            names.push(format!("dn.l{}.weight", j + 1));
            names.push(format!("dn.l{}.bias", j + 1));
        }
        for m in 0..self.alpha.len() {
            names.push(format!("gate{m}.alpha"));
            names.push(format!("gate{m}.beta"));
        }
        names
    }

    fn tensors(&self) -> Vec<Tensor<'_>> {
        let mut out = vec![Tensor {
            rows: self.embedding.table.rows(),
            cols: self.embedding.table.cols(),
            data: self.embedding.table.as_slice(),
        }];
        fn layer(l: &DenseLayer) -> [Tensor<'_>; 2] {
            [
                Tensor {
                    rows: l.weights.rows(),
                    cols: l.weights.cols(),
                    data: l.weights.as_slice(),
                },
                Tensor {
                    rows: 1,
                    cols: l.bias.len(),
                    data: &l.bias,
                },
            ]
        }
        for tower in &self.ra {
            for l in tower {
                out.extend(layer(l));
            }
        }
        for l in &self.dn {
            out.extend(layer(l));
        }
        for (a, b) in self.alpha.iter().zip(&self.beta) {
            out.push(Tensor {
                rows: 1,
                cols: a.len(),
                data: a,
            });
            out.push(Tensor {
                rows: 1,
                cols: b.len(),
                data: b,
            });
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = vec![self.embedding.table.as_mut_slice()];
        for tower in &mut self.ra {
            for l in tower {
                out.push(l.weights.as_mut_slice());
                out.push(&mut l.bias);
            }
        }
        for l in &mut self.dn {
            out.push(l.weights.as_mut_slice());
            out.push(&mut l.bias);
        }
        for (a, b) in self.alpha.iter_mut().zip(self.beta.iter_mut()) {
            out.push(a);
            out.push(b);
        }
        out
    }

    fn zeros_like(&self) -> Self {
        RmtNet {
            embedding: self.embedding.zeros_like(),
            ra: self
                .ra
                .iter()
                .map(|tower| tower.iter().map(DenseLayer::zeros_like).collect())
                .collect(),
            dn: self.dn.iter().map(DenseLayer::zeros_like).collect(),
            alpha: self.alpha.iter().map(|a| vec![0.0; a.len()]).collect(),
            beta: self.beta.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }
}

/// The multi-task loss over a fixed list of dataset rows.
#[derive(Debug, Clone)]
pub struct RmtObjective<'a> {
    pub dataset: &'a Dataset,
    pub rows: Vec<usize>,
    pub options: RmtObjectiveOptions,
}

impl Objective for RmtObjective<'_> {
    type Params = RmtNet;

    fn n_examples(&self) -> usize {
        self.rows.len()
    }

    fn loss(&self, params: &RmtNet, batch: &[usize], grads: Option<&mut RmtNet>) -> Result<LossParts> {
        let rows: Vec<usize> = batch.iter().map(|&b| self.rows[b]).collect();
        params.accumulate_loss(self.dataset, &rows, self.options, grads)
    }
}

impl DefaultScorer for RmtNet {
    fn default_prob(&self, dataset: &Dataset, row: usize) -> Result<f64> {
        Ok(self.forward(dataset.bins(row))?.dn.prob)
    }
}

/// Trains a network with `policies` rejection towers on the dataset's
/// training view: approved training rows plus every rejected row.
pub fn fit_rmt(dataset: &Dataset, config: &ModelConfig, policies: usize) -> Result<(RmtNet, TrainingLog)> {
    config.validate()?;
    if policies > 1 && dataset.n_policies() > policies {
        return Err(Error::Config(format!(
            "dataset has {} policies but the network has {policies} towers",
            dataset.n_policies()
        )));
    }
    if dataset.approved_rows(Split::Train).is_empty() {
        return Err(Error::Protocol("no approved training rows".into()));
    }
    let shape = RmtShape {
        embedding_dim: config.embedding_dim,
        hidden: config.hidden,
        layers: config.layers,
        policies,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = RmtNet::init(dataset.cardinalities(), shape, &mut rng)?;
    let objective = RmtObjective {
        dataset,
        rows: dataset.training_rows(),
        options: RmtObjectiveOptions {
            eta: config.eta,
            share_gradient_through_gate: config.share_gradient_through_gate,
            strict_policy_heads: config.strict_policy_heads,
        },
    };
    train(
        init,
        &objective,
        dataset,
        &dataset.approved_rows(Split::Val),
        config.into(),
    )
}
