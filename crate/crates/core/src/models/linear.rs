use serde::{Deserialize, Serialize};

use super::binary::BinaryModel;
use crate::error::{Error, Result};
use crate::nncore::{sigmoid, ParamSet, Tensor};

/// Logistic regression on one-hot encoded bins: one weight per (feature, bin).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    cardinalities: Vec<usize>,
    offsets: Vec<usize>,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LogisticModel {
    pub fn zeros(cardinalities: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(cardinalities.len());
        let mut total = 0;
        for &c in cardinalities {
            offsets.push(total);
            total += c;
        }
        LogisticModel {
            cardinalities: cardinalities.to_vec(),
            offsets,
            weights: vec![0.0; total],
            bias: vec![0.0],
        }
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    fn check(&self, bins: &[u32]) -> Result<()> {
        if bins.len() != self.cardinalities.len() {
            return Err(Error::Shape(format!(
                "{} bin indices for {} features",
                bins.len(),
                self.cardinalities.len()
            )));
        }
        if let Some((f, b)) = bins
            .iter()
            .enumerate()
            .find(|&(f, &b)| b as usize >= self.cardinalities[f])
        {
            return Err(Error::Shape(format!("bin {b} out of range for feature {f}")));
        }
        Ok(())
    }

    pub fn logit(&self, bins: &[u32]) -> Result<f64> {
        self.check(bins)?;
        Ok(self.bias[0]
            + bins
                .iter()
                .zip(&self.offsets)
                .map(|(&b, &o)| self.weights[o + b as usize])
                .sum::<f64>())
    }
}

impl BinaryModel for LogisticModel {
    fn prob(&self, bins: &[u32]) -> Result<f64> {
        Ok(sigmoid(self.logit(bins)?))
    }

    fn prob_with_grad(&self, bins: &[u32], d_logit: &dyn Fn(f64) -> f64, grads: &mut Self) -> Result<f64> {
        let p = self.prob(bins)?;
        let d = d_logit(p);
        for (&b, &o) in bins.iter().zip(&self.offsets) {
            grads.weights[o + b as usize] += d;
        }
        grads.bias[0] += d;
        Ok(p)
    }
}

impl ParamSet for LogisticModel {
    fn names(&self) -> Vec<String> {
        vec!["weights".into(), "bias".into()]
    }

    fn tensors(&self) -> Vec<Tensor<'_>> {
        vec![
            Tensor {
                rows: self.weights.len(),
                cols: 1,
                data: &self.weights,
            },
            Tensor {
                rows: 1,
                cols: 1,
                data: &self.bias,
            },
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.weights, &mut self.bias]
    }

    fn zeros_like(&self) -> Self {
        LogisticModel::zeros(&self.cardinalities)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_logit() {
        let mut m = LogisticModel::zeros(&[2, 3]);
        m.weights = vec![0.1, 0.2, 0.3, 0.4, 0.5];
        m.bias[0] = -1.0;
        assert!((m.logit(&[1, 2]).unwrap() - (0.2 + 0.5 - 1.0)).abs() < 1e-15);
        assert!(m.logit(&[2, 0]).is_err());
        assert_eq!(LogisticModel::zeros(&[2]).prob(&[0]).unwrap(), 0.5);
    }
}
