use serde::{Deserialize, Serialize};

/// Predictions are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before taking logs.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the pre-activation `z` and the output `a`.
    #[inline]
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

/// Logistic function, evaluated so that neither branch can overflow.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let ez = z.exp();
        ez / (1.0 + ez)
    }
}

pub fn relu(z: &[f64]) -> Vec<f64> {
    z.iter().map(|v| v.max(0.0)).collect()
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Binary cross-entropy `-[y ln p + (1-y) ln(1-p)]` with the prediction clamped.
#[inline]
pub fn bce(prediction: f64, label: f64) -> f64 {
    let p = clamp_prob(prediction);
    -(label * p.ln() + (1.0 - label) * (1.0 - p).ln())
}

/// Gradient of [`bce`] with respect to the logit that produced `prediction`
/// through a sigmoid. Zero where the clamp is active.
#[inline]
pub fn bce_logit_grad(prediction: f64, label: f64) -> f64 {
    if (PROB_CLAMP..=1.0 - PROB_CLAMP).contains(&prediction) {
        prediction - label
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sigmoid_reference_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        // 1 / (1 + e^-1) to 16 digits
        assert!((sigmoid(1.0) - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert!(sigmoid(-745.0).is_finite());
    }

    #[test]
    fn relu_cases() {
        assert_eq!(relu(&[-1.0, -3.0]), vec![0.0, 0.0]);
        assert_eq!(relu(&[1.5, 3.0]), vec![1.5, 3.0]);
        assert_eq!(relu(&[-1.0, 0.0, 2.0]), vec![0.0, 0.0, 2.0]);
    }

    #[test]
    fn bce_reference_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((bce(0.5, 0.0) - ln2).abs() < 1e-15);
        assert!((bce(0.5, 1.0) - ln2).abs() < 1e-15);
        assert!((bce(0.9, 1.0) - 0.105_360_515_657_826_3).abs() < 1e-15);
        // clamped limit
        assert!(bce(1.0, 1.0) < 1e-6);
        assert!(bce(0.0, 0.0) < 1e-6);
        assert!(bce(0.0, 1.0).is_finite());
    }

    #[test]
    fn clamped_gradient_is_zero() {
        assert_eq!(bce_logit_grad(1.0, 0.0), 0.0);
        assert_eq!(bce_logit_grad(0.25, 1.0), -0.75);
    }

    proptest! {
        #[test]
        fn sigmoid_is_symmetric(z in -50.0f64..50.0) {
            prop_assert!((sigmoid(z) + sigmoid(-z) - 1.0).abs() < 1e-15);
        }

        #[test]
        fn bce_is_nonnegative(p in 0.0f64..=1.0, y in 0u8..=1) {
            prop_assert!(bce(p, f64::from(y)) >= 0.0);
        }
    }
}
