/// A named, shaped view of one parameter tensor.
#[derive(Debug, Clone, Copy)]
pub struct Tensor<'a> {
    pub rows: usize,
    pub cols: usize,
    pub data: &'a [f64],
}

/// A fixed, ordered collection of real-valued parameter tensors.
///
/// `names`, `tensors` and `tensors_mut` must enumerate the same tensors in the
/// same order. Gradient containers are values of the implementing type built
/// by `zeros_like`, so a gradient always has the shape of its parameter.
pub trait ParamSet: Clone {
    fn names(&self) -> Vec<String>;
    fn tensors(&self) -> Vec<Tensor<'_>>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;
    fn zeros_like(&self) -> Self;

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    fn flatten(&self) -> Vec<f64> {
        self.tensors().iter().flat_map(|t| t.data.iter().copied()).collect()
    }

    fn fill_zero(&mut self) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.data.iter().all(|v| v.is_finite()))
    }
}
