use serde::{Deserialize, Serialize};

use crate::models::RmtNet;

/// Gate outputs of one policy at one hidden layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSeries {
    /// 1-based policy.
    pub policy: usize,
    /// 1-based hidden layer.
    pub layer: usize,
    pub alpha: f64,
    pub beta: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCurve {
    /// Ascending rejection probabilities.
    pub probabilities: Vec<f64>,
    pub series: Vec<GateSeries>,
}

/// Every gate evaluated on `grid_size` evenly spaced points of `[0, 1]`.
pub fn gate_curve(net: &RmtNet, grid_size: usize) -> GateCurve {
    let probabilities: Vec<f64> = match grid_size {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    };
    let mut series = Vec::new();
    for m in 0..net.n_policies() {
        for j in 0..net.n_layers() - 1 {
            series.push(GateSeries {
                policy: m + 1,
                layer: j + 1,
                alpha: net.alpha[m][j],
                beta: net.beta[m][j],
                values: probabilities.iter().map(|&p| net.gate(p, j, m)).collect(),
            });
        }
    }
    GateCurve { probabilities, series }
}

impl GateCurve {
    /// Strictly increasing along the grid.
    pub fn is_increasing(series: &GateSeries) -> bool {
        series.values.windows(2).all(|w| w[1] > w[0])
    }

    /// Header `p,policy1_layer1,...`, one line per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p");
        for s in &self.series {
            out.push_str(&format!(",policy{}_layer{}", s.policy, s.layer));
        }
        out.push('\n');
        for (i, p) in self.probabilities.iter().enumerate() {
            out.push_str(&format!("{p:?}"));
            for s in &self.series {
                out.push_str(&format!(",{:?}", s.values[i]));
            }
            out.push('\n');
        }
        out
    }
}
