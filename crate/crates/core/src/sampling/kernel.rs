use serde::{Deserialize, Serialize};

/// Squared-exponential kernel `exp(-Σ θ_k (a_k − b_k)²)` with per-dimension
/// inverse length scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeKernel {
    pub theta: Vec<f64>,
}

impl SeKernel {
    pub fn new(theta: Vec<f64>) -> Self {
        SeKernel { theta }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let s: f64 = self
            .theta
            .iter()
            .zip(a.iter().zip(b))
            .map(|(t, (u, v))| t * (u - v) * (u - v))
            .sum();
        (-s).exp()
    }

    /// Gram matrix over the rows of `x`, row-major.
    pub fn gram(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let m = x.len();
        let mut k = vec![vec![0.0; m]; m];
        for i in 0..m {
            k[i][i] = 1.0;
            for j in i + 1..m {
                let v = self.eval(&x[i], &x[j]);
                k[i][j] = v;
                k[j][i] = v;
            }
        }
        k
    }

    /// Kernel values between `x` and every training row.
    pub fn row(&self, x: &[f64], train: &[Vec<f64>]) -> Vec<f64> {
        train.iter().map(|t| self.eval(x, t)).collect()
    }
}
