use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Activation, DenseLayer};
use crate::error::{Error, Result};

/// Feed-forward stack: relu on every layer but the last, sigmoid on the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseStack {
    pub layers: Vec<DenseLayer>,
}

/// Activations recorded by [`DenseStack::forward_tape`]; enough to compute
/// exact gradients of any scalar function of the output.
#[derive(Debug, Clone, Default)]
pub struct StackTape {
    /// `inputs[j]` is the input to layer `j`.
    inputs: Vec<Vec<f64>>,
    /// Pre-activations of every layer.
    pre: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl StackTape {
    pub fn output(&self) -> &[f64] {
        &self.output
    }

    pub fn pre_activations(&self) -> &[Vec<f64>] {
        &self.pre
    }
}

impl DenseStack {
    /// `widths = [in, h1, ..., out]`.
    pub fn init<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Self {
        DenseStack {
            layers: widths.windows(2).map(|w| DenseLayer::init(w[0], w[1], rng)).collect(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        DenseStack {
            layers: self.layers.iter().map(DenseLayer::zeros_like).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    fn activation(&self, j: usize) -> Activation {
        if j + 1 == self.layers.len() {
            Activation::Sigmoid
        } else {
            Activation::Relu
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.forward_tape(x).map(|t| t.output)
    }

    pub fn forward_tape(&self, x: &[f64]) -> Result<StackTape> {
        let mut tape = StackTape::default();
        self.forward_into(x, &mut tape)?;
        Ok(tape)
    }

    /// Forward pass recording into a reusable tape.
    pub fn forward_into(&self, x: &[f64], tape: &mut StackTape) -> Result<()> {
        let first = self.layers.first().ok_or_else(|| Error::Shape("empty stack".into()))?;
        if x.len() != first.input_dim() {
            return Err(Error::Shape(format!(
                "input of length {} for a stack expecting {}",
                x.len(),
                first.input_dim()
            )));
        }
        let depth = self.layers.len();
        tape.inputs.resize(depth, Vec::new());
        tape.pre.resize(depth, Vec::new());
        let mut current = x.to_vec();
        for (j, layer) in self.layers.iter().enumerate() {
            let z = layer.affine(&current);
            let act = self.activation(j);
            let a: Vec<f64> = z.iter().map(|&v| act.apply(v)).collect();
            tape.inputs[j] = std::mem::replace(&mut current, a);
            tape.pre[j] = z;
        }
        tape.output = current;
        Ok(())
    }

    /// Backpropagates `d_logit` (gradient w.r.t. the last layer's
    /// pre-activation) through the recorded pass, accumulating into `grads`.
    /// Returns the gradient with respect to the stack input.
    pub fn backward(&self, tape: &StackTape, d_logit: &[f64], grads: &mut DenseStack) -> Result<Vec<f64>> {
        let depth = self.layers.len();
        if tape.pre.len() != depth || tape.inputs.len() != depth || tape.output.is_empty() {
            return Err(Error::Contract(format!(
                "incomplete tape: {} of {depth} layers recorded",
                tape.pre.len().min(tape.inputs.len())
            )));
        }
        if grads.layers.len() != depth {
            return Err(Error::Shape("gradient stack depth".into()));
        }
        let mut dz = d_logit.to_vec();
        for j in (0..depth).rev() {
            let layer = &self.layers[j];
            DenseLayer::accumulate_grad(&tape.inputs[j], &dz, &mut grads.layers[j]);
            let mut dx = layer.input_grad(&dz);
            if j > 0 {
                let act = self.activation(j - 1);
                for (d, (z, a)) in dx.iter_mut().zip(tape.pre[j - 1].iter().zip(&tape.inputs[j])) {
                    *d *= act.derivative(*z, *a);
                }
            }
            dz = dx;
        }
        Ok(dz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nncore::{bce, bce_logit_grad, grad_check, Matrix, ParamSet, Tensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    impl ParamSet for DenseStack {
        fn names(&self) -> Vec<String> {
            (0..self.layers.len())
                .flat_map(|j| [format!("l{j}.w"), format!("l{j}.b")])
                .collect()
        }
        fn tensors(&self) -> Vec<Tensor<'_>> {
            self.layers
                .iter()
                .flat_map(|l| {
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
                })
                .collect()
        }
        fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
            self.layers
                .iter_mut()
                .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
                .collect()
        }
        fn zeros_like(&self) -> Self {
            DenseStack::zeros_like(self)
        }
    }

    #[test]
    fn random_stack_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let stack = DenseStack::init(&[3, 5, 4, 1], &mut rng);
        let xs = [[0.4, -0.9, 1.2], [1.0, 0.2, -0.3], [-0.5, 0.7, 0.6]];
        let ys = [1.0, 0.0, 1.0];
        let loss = |s: &DenseStack| {
            xs.iter()
                .zip(ys)
                .map(|(x, y)| bce(s.forward(x).unwrap()[0], y))
                .sum::<f64>()
        };
        let mut grads = stack.zeros_like();
        for (x, y) in xs.iter().zip(ys) {
            let tape = stack.forward_tape(x).unwrap();
            let d = bce_logit_grad(tape.output()[0], y);
            stack.backward(&tape, &[d], &mut grads).unwrap();
        }
        let report = grad_check(&stack, &grads, loss, 1e-5);
        assert!(report.passes(1e-6), "{report:?}");
    }

    #[test]
    fn symmetric_zero_weights_give_symmetric_gradients() {
        let stack = DenseStack {
            layers: vec![
                DenseLayer::new(Matrix::zeros(2, 2), vec![0.1, 0.1]).unwrap(),
                DenseLayer::zeros(2, 1),
            ],
        };
        let tape = stack.forward_tape(&[1.0, 1.0]).unwrap();
        let mut grads = stack.zeros_like();
        stack.backward(&tape, &[0.5], &mut grads).unwrap();
        let w = &grads.layers[1].weights;
        assert_eq!(w.get(0, 0), w.get(1, 0));
        let w0 = &grads.layers[0].weights;
        assert_eq!(w0.get(0, 0), w0.get(1, 1));
    }

    #[test]
    fn incomplete_tape_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let stack = DenseStack::init(&[2, 3, 1], &mut rng);
        let mut grads = stack.zeros_like();
        let err = stack.backward(&StackTape::default(), &[1.0], &mut grads);
        assert!(matches!(err, Err(Error::Contract(_))));
    }
}
