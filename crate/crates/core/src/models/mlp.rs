use rand::Rng;
use serde::{Deserialize, Serialize};

use super::binary::BinaryModel;
use super::Embedding;
use crate::error::Result;
use crate::nncore::{DenseStack, ParamSet, Tensor};

/// Embedding followed by a dense stack: the default tower with every gate removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub embedding: Embedding,
    pub stack: DenseStack,
}

impl Mlp {
    /// `layers` dense layers of width `hidden`, the last of width 1.
    pub fn init<R: Rng + ?Sized>(
        cardinalities: &[usize],
        embedding_dim: usize,
        hidden: usize,
        layers: usize,
        rng: &mut R,
    ) -> Self {
        let embedding = Embedding::init(cardinalities, embedding_dim, rng);
        let mut widths = vec![embedding.output_dim()];
        widths.extend(std::iter::repeat_n(hidden, layers.saturating_sub(1)));
        widths.push(1);
        let stack = DenseStack::init(&widths, rng);
        Mlp { embedding, stack }
    }
}

impl BinaryModel for Mlp {
    fn prob(&self, bins: &[u32]) -> Result<f64> {
        let e = self.embedding.embed(bins)?;
        Ok(self.stack.forward(&e)?[0])
    }

    fn prob_with_grad(&self, bins: &[u32], d_logit: &dyn Fn(f64) -> f64, grads: &mut Self) -> Result<f64> {
        let e = self.embedding.embed(bins)?;
        let tape = self.stack.forward_tape(&e)?;
        let p = tape.output()[0];
        let d_e = self.stack.backward(&tape, &[d_logit(p)], &mut grads.stack)?;
        self.embedding.accumulate_grad(bins, &d_e, &mut grads.embedding);
        Ok(p)
    }
}

impl ParamSet for Mlp {
    fn names(&self) -> Vec<String> {
        let mut names = vec!["embedding".to_string()];
        for j in 0..self.stack.layers.len() {
            names.push(format!("l{}.weight", j + 1));
            names.push(format!("l{}.bias", j + 1));
        }
        names
    }

    fn tensors(&self) -> Vec<Tensor<'_>> {
        let t = &self.embedding.table;
        let mut out = vec![Tensor {
            rows: t.rows(),
            cols: t.cols(),
            data: t.as_slice(),
        }];
        for l in &self.stack.layers {
            out.push(Tensor {
                rows: l.weights.rows(),
                cols: l.weights.cols(),
                data: l.weights.as_slice(),
            });
            out.push(Tensor {
                rows: 1,
                cols: l.bias.len(),
                data: &l.bias,
            });
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = vec![self.embedding.table.as_mut_slice()];
        for l in &mut self.stack.layers {
            out.push(l.weights.as_mut_slice());
            out.push(&mut l.bias);
        }
        out
    }

    fn zeros_like(&self) -> Self {
        Mlp {
            embedding: self.embedding.zeros_like(),
            stack: self.stack.zeros_like(),
        }
    }
}
