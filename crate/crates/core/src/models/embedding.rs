use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nncore::Matrix;

/// One learned `k`-vector per (feature, bin); a row embeds to the
/// concatenation of its `d` looked-up vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    cardinalities: Vec<usize>,
    offsets: Vec<usize>,
    pub table: Matrix,
}

impl Embedding {
    fn layout(cardinalities: &[usize]) -> Vec<usize> {
        cardinalities
            .iter()
            .scan(0, |acc, &c| {
                let start = *acc;
                *acc += c;
                Some(start)
            })
            .collect()
    }

    pub fn zeros(cardinalities: &[usize], dim: usize) -> Self {
        let total = cardinalities.iter().sum();
        Embedding {
            cardinalities: cardinalities.to_vec(),
            offsets: Embedding::layout(cardinalities),
            table: Matrix::zeros(total, dim),
        }
    }

    /// Each feature block drawn Glorot-uniform over `(bins, k)`.
    pub fn init<R: Rng + ?Sized>(cardinalities: &[usize], dim: usize, rng: &mut R) -> Self {
        let mut e = Embedding::zeros(cardinalities, dim);
        for (f, &card) in cardinalities.iter().enumerate() {
            let block = Matrix::glorot_uniform(card, dim, rng);
            for b in 0..card {
                e.table.row_mut(e.offsets[f] + b).copy_from_slice(block.row(b));
            }
        }
        e
    }

    pub fn from_table(cardinalities: &[usize], table: Matrix) -> Result<Self> {
        if table.rows() != cardinalities.iter().sum::<usize>() {
            return Err(Error::Shape("embedding table rows must equal total bins".into()));
        }
        Ok(Embedding {
            cardinalities: cardinalities.to_vec(),
            offsets: Embedding::layout(cardinalities),
            table,
        })
    }

    pub fn zeros_like(&self) -> Self {
        Embedding::zeros(&self.cardinalities, self.dim())
    }

    pub fn dim(&self) -> usize {
        self.table.cols()
    }

    pub fn n_features(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn output_dim(&self) -> usize {
        self.n_features() * self.dim()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn check(&self, bins: &[u32]) -> Result<()> {
        if bins.len() != self.n_features() {
            return Err(Error::Shape(format!(
                "{} bin indices for {} features",
                bins.len(),
                self.n_features()
            )));
        }
        for (f, (&b, &card)) in bins.iter().zip(&self.cardinalities).enumerate() {
            if b as usize >= card {
                return Err(Error::Shape(format!(
                    "bin {b} out of range for feature {f} with {card} bins"
                )));
            }
        }
        Ok(())
    }

    /// Concatenated lookup, length `d * k`.
    pub fn embed(&self, bins: &[u32]) -> Result<Vec<f64>> {
        self.check(bins)?;
        let mut out = vec![0.0; self.output_dim()];
        self.embed_into(bins, &mut out);
        Ok(out)
    }

    /// Unchecked lookup for validated bins.
    #[inline]
    pub fn embed_into(&self, bins: &[u32], out: &mut [f64]) {
        let k = self.dim();
        for (f, &b) in bins.iter().enumerate() {
            out[f * k..(f + 1) * k].copy_from_slice(self.table.row(self.offsets[f] + b as usize));
        }
    }

    #[inline]
    pub fn accumulate_grad(&self, bins: &[u32], d_embedded: &[f64], grad: &mut Embedding) {
        let k = self.dim();
        for (f, &b) in bins.iter().enumerate() {
            let row = grad.table.row_mut(self.offsets[f] + b as usize);
            for (g, d) in row.iter_mut().zip(&d_embedded[f * k..(f + 1) * k]) {
                *g += d;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_feature_width_four() {
        let e = Embedding::zeros(&[5], 4);
        assert_eq!(e.embed(&[3]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn hand_assembled_concatenation() {
        // d = 3, k = 2, cardinalities 2, 1, 2; row r of the table holds [r, 10 + r]
        let table = Matrix::from_vec(5, 2, (0..5).flat_map(|r| [r as f64, 10.0 + r as f64]).collect()).unwrap();
        let e = Embedding::from_table(&[2, 1, 2], table).unwrap();
        // feature 0 bin 1 -> row 1, feature 1 bin 0 -> row 2, feature 2 bin 0 -> row 3
        assert_eq!(e.embed(&[1, 0, 0]).unwrap(), vec![1.0, 11.0, 2.0, 12.0, 3.0, 13.0]);
    }

    #[test]
    fn out_of_range_bin_is_an_error() {
        let e = Embedding::zeros(&[2, 3], 2);
        assert!(e.embed(&[2, 0]).is_err());
        assert!(e.embed(&[0]).is_err());
    }
}
