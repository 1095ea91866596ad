use super::ParamSet;

/// Outcome of comparing analytic gradients against central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// Tensor name and flat index of the worst entry.
    pub worst: Option<(String, usize)>,
    pub checked: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_relative_error < tolerance
    }
}

/// Compares `analytic` against `(f(θ+h) - f(θ-h)) / 2h` for every parameter.
///
/// The per-entry error is `|a - fd| / max(|a|, |fd|, 1e-8)`.
pub fn grad_check<P, F>(params: &P, analytic: &P, mut loss: F, step: f64) -> GradCheckReport
where
    P: ParamSet,
    F: FnMut(&P) -> f64,
{
    let names = params.names();
    let grads: Vec<Vec<f64>> = analytic.tensors().iter().map(|t| t.data.to_vec()).collect();
    let sizes: Vec<usize> = params.tensors().iter().map(|t| t.data.len()).collect();
    assert_eq!(grads.len(), sizes.len(), "analytic gradient tensor count");

    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst: None,
        checked: 0,
    };
    for (ti, (&size, grad)) in sizes.iter().zip(&grads).enumerate() {
        assert_eq!(grad.len(), size, "analytic gradient shape");
        for (i, &a) in grad.iter().enumerate() {
            let original = probe.tensors_mut()[ti][i];
            probe.tensors_mut()[ti][i] = original + step;
            let up = loss(&probe);
            probe.tensors_mut()[ti][i] = original - step;
            let down = loss(&probe);
            probe.tensors_mut()[ti][i] = original;

            let fd = (up - down) / (2.0 * step);
            let err = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-8);
            report.checked += 1;
            if err > report.max_relative_error || report.worst.is_none() {
                report.max_relative_error = err.max(report.max_relative_error);
                report.worst = Some((names[ti].clone(), i));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nncore::{bce, bce_logit_grad, sigmoid, Tensor};

    #[derive(Clone)]
    struct Linear {
        w: Vec<f64>,
        b: Vec<f64>,
    }

    impl ParamSet for Linear {
        fn names(&self) -> Vec<String> {
            vec!["w".into(), "b".into()]
        }
        fn tensors(&self) -> Vec<Tensor<'_>> {
            vec![
                Tensor {
                    rows: self.w.len(),
                    cols: 1,
                    data: &self.w,
                },
                Tensor {
                    rows: 1,
                    cols: 1,
                    data: &self.b,
                },
            ]
        }
        fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
            vec![&mut self.w, &mut self.b]
        }
        fn zeros_like(&self) -> Self {
            Linear {
                w: vec![0.0; self.w.len()],
                b: vec![0.0],
            }
        }
    }

    const XS: [[f64; 3]; 4] = [[0.5, -1.0, 2.0], [1.5, 0.3, -0.7], [-0.2, 0.8, 0.1], [0.0, -1.1, 1.3]];
    const YS: [f64; 4] = [1.0, 0.0, 1.0, 0.0];

    fn loss(p: &Linear) -> f64 {
        XS.iter()
            .zip(YS)
            .map(|(x, y)| {
                let z: f64 = x.iter().zip(&p.w).map(|(a, b)| a * b).sum::<f64>() + p.b[0];
                bce(sigmoid(z), y)
            })
            .sum()
    }

    fn analytic(p: &Linear) -> Linear {
        let mut g = p.zeros_like();
        for (x, y) in XS.iter().zip(YS) {
            let z: f64 = x.iter().zip(&p.w).map(|(a, b)| a * b).sum::<f64>() + p.b[0];
            let d = bce_logit_grad(sigmoid(z), y);
            for (gw, xi) in g.w.iter_mut().zip(x) {
                *gw += d * xi;
            }
            g.b[0] += d;
        }
        g
    }

    #[test]
    fn logistic_unit_gradient_is_p_minus_y_times_x() {
        let p = Linear {
            w: vec![0.2, -0.4, 0.1],
            b: vec![0.05],
        };
        let report = grad_check(&p, &analytic(&p), loss, 1e-5);
        assert!(report.passes(1e-7), "{report:?}");
        assert_eq!(report.checked, 4);
    }

    #[test]
    fn corrupted_gradient_is_detected() {
        let p = Linear {
            w: vec![0.2, -0.4, 0.1],
            b: vec![0.05],
        };
        let mut g = analytic(&p);
        g.w[1] *= 1.01;
        let report = grad_check(&p, &g, loss, 1e-5);
        assert!(!report.passes(1e-4));
        assert_eq!(report.worst, Some(("w".to_string(), 1)));
    }
}
