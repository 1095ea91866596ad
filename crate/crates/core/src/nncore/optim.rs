use serde::{Deserialize, Serialize};

use super::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamConfig {
            learning_rate,
            ..Default::default()
        }
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First/second moment accumulators for every parameter tensor.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub config: AdamConfig,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl OptimizerState {
    pub fn new<P: ParamSet>(params: &P, config: AdamConfig) -> Self {
        let shapes: Vec<usize> = params.tensors().iter().map(|t| t.data.len()).collect();
        OptimizerState {
            config,
            step: 0,
            first: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected adaptive-moment update of `params` in place.
pub fn adam_step<P: ParamSet>(state: &mut OptimizerState, params: &mut P, grads: &P) {
    state.step += 1;
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    let t = state.step as i32;
    let c1 = 1.0 - beta1.powi(t);
    let c2 = 1.0 - beta2.powi(t);

    let grads = grads.tensors();
    let params = params.tensors_mut();
    assert_eq!(params.len(), grads.len(), "gradient/parameter tensor count");
    assert_eq!(params.len(), state.first.len(), "optimizer/parameter tensor count");

    for (((p, g), m), v) in params
        .into_iter()
        .zip(grads)
        .zip(state.first.iter_mut())
        .zip(state.second.iter_mut())
    {
        assert_eq!(p.len(), g.data.len());
        for i in 0..p.len() {
            let gi = g.data[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
            v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nncore::Tensor;

    #[derive(Clone, Debug, PartialEq)]
    struct Scalar(Vec<f64>);

    impl ParamSet for Scalar {
        fn names(&self) -> Vec<String> {
            vec!["x".into()]
        }
        fn tensors(&self) -> Vec<Tensor<'_>> {
            vec![Tensor {
                rows: 1,
                cols: self.0.len(),
                data: &self.0,
            }]
        }
        fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
            vec![&mut self.0]
        }
        fn zeros_like(&self) -> Self {
            Scalar(vec![0.0; self.0.len()])
        }
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = Scalar(vec![1.5, -2.0]);
        let mut state = OptimizerState::new(&p, AdamConfig::default());
        adam_step(&mut state, &mut p, &Scalar(vec![0.0, 0.0]));
        assert_eq!(p, Scalar(vec![1.5, -2.0]));
    }

    #[test]
    fn first_unit_step_moves_by_learning_rate() {
        let mut p = Scalar(vec![0.0]);
        let mut state = OptimizerState::new(&p, AdamConfig::with_learning_rate(0.01));
        adam_step(&mut state, &mut p, &Scalar(vec![1.0]));
        assert!((p.0[0] + 0.01).abs() < 1e-9);
    }

    #[test]
    fn quadratic_loss_decreases() {
        // f(x) = (x - 3)^2
        let loss = |x: f64| (x - 3.0) * (x - 3.0);
        let mut p = Scalar(vec![0.0]);
        let mut state = OptimizerState::new(&p, AdamConfig::with_learning_rate(0.1));
        let mut prev = loss(p.0[0]);
        for _ in 0..2 {
            let g = Scalar(vec![2.0 * (p.0[0] - 3.0)]);
            adam_step(&mut state, &mut p, &g);
            let now = loss(p.0[0]);
            assert!(now < prev);
            prev = now;
        }
        assert_eq!(state.steps(), 2);
    }
}
