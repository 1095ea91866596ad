use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Activation, Matrix};
use crate::error::{Error, Result};

/// Affine map `x -> x·W + b` with `W` of shape `(in, out)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if weights.cols() != bias.len() {
            return Err(Error::Shape(format!(
                "bias of length {} for {} outputs",
                bias.len(),
                weights.cols()
            )));
        }
        Ok(DenseLayer { weights, bias })
    }

    pub fn zeros(input: usize, output: usize) -> Self {
        DenseLayer {
            weights: Matrix::zeros(input, output),
            bias: vec![0.0; output],
        }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn init<R: Rng + ?Sized>(input: usize, output: usize, rng: &mut R) -> Self {
        DenseLayer {
            weights: Matrix::glorot_uniform(input, output, rng),
            bias: vec![0.0; output],
        }
    }

    pub fn zeros_like(&self) -> Self {
        DenseLayer::zeros(self.input_dim(), self.output_dim())
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.cols()
    }

    /// Pre-activation `x·W + b` written into `out`. Panics on shape misuse.
    #[inline]
    pub fn affine_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.input_dim());
        assert_eq!(out.len(), self.output_dim());
        out.copy_from_slice(&self.bias);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, w) in out.iter_mut().zip(self.weights.row(i)) {
                *o += xi * w;
            }
        }
    }

    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.output_dim()];
        self.affine_into(x, &mut out);
        out
    }

    /// `activation(x·W + b)`, shape-checked.
    pub fn forward(&self, x: &[f64], activation: Activation) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input of length {} for a layer expecting {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut z = self.affine(x);
        z.iter_mut().for_each(|v| *v = activation.apply(*v));
        Ok(z)
    }

    /// Adds `x ⊗ dz` to the weight gradient and `dz` to the bias gradient.
    #[inline]
    pub fn accumulate_grad(x: &[f64], dz: &[f64], grad: &mut DenseLayer) {
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (g, d) in grad.weights.row_mut(i).iter_mut().zip(dz) {
                *g += xi * d;
            }
        }
        for (g, d) in grad.bias.iter_mut().zip(dz) {
            *g += d;
        }
    }

    /// `dx = W·dz`, overwriting `dx`.
    #[inline]
    pub fn input_grad_into(&self, dz: &[f64], dx: &mut [f64]) {
        for (i, out) in dx.iter_mut().enumerate() {
            *out = self.weights.row(i).iter().zip(dz).map(|(w, d)| w * d).sum();
        }
    }

    pub fn input_grad(&self, dz: &[f64]) -> Vec<f64> {
        let mut dx = vec![0.0; self.input_dim()];
        self.input_grad_into(dz, &mut dx);
        dx
    }
}
