use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Row-major sample matrix in the unit hypercube.
pub type Samples = Vec<Vec<f64>>;

/// Default φ_p exponent.
pub const PHI_P: f64 = 50.0;
/// Default distance exponent (Manhattan).
pub const PHI_T: f64 = 1.0;

/// Random Latin hypercube of `n` samples in `[0, 1)^dims`, seeded.
pub fn lhs_init(n: usize, dims: usize, seed: u64) -> Result<Samples> {
    lhs_with_rng(n, dims, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Latin hypercube drawn from a caller-supplied generator.
///
/// Every column is an independent random permutation of the strata with a
/// uniform jitter inside each stratum.
pub fn lhs_with_rng<R: Rng + ?Sized>(n: usize, dims: usize, rng: &mut R) -> Result<Samples> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need n >= 2 samples, got {n}")));
    }
    if dims < 1 {
        return Err(Error::InvalidInput("need at least one dimension".into()));
    }
    let nf = n as f64;
    let mut x = vec![vec![0.0; dims]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..dims {
        perm.shuffle(rng);
        for (row, &k) in x.iter_mut().zip(&perm) {
            let mut v = (k as f64 + rng.random::<f64>()) / nf;
            // rounding can push the value into the next stratum
            if (v * nf).floor() as usize != k {
                v = (k as f64 + 0.5) / nf;
            }
            row[j] = v;
        }
    }
    Ok(x)
}

/// True when every column has exactly one sample per stratum.
pub fn is_latin(x: &[Vec<f64>]) -> bool {
    let n = x.len();
    if n == 0 {
        return false;
    }
    let dims = x[0].len();
    (0..dims).all(|j| {
        let mut seen = vec![false; n];
        x.iter().all(|row| {
            let v = row[j];
            if !(0.0..1.0).contains(&v) {
                return false;
            }
            let k = (v * n as f64).floor() as usize;
            k < n && !std::mem::replace(&mut seen[k], true)
        })
    })
}

fn distance(a: &[f64], b: &[f64], t: f64) -> f64 {
    if t == 1.0 {
        a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum()
    } else {
        a.iter().zip(b).map(|(u, v)| (u - v).abs().powf(t)).sum::<f64>().powf(1.0 / t)
    }
}

/// `(Σ_{i<j} d_ij^{-p})^{1/p}` given the pairwise distances.
///
/// Evaluated relative to the smallest distance so large `p` neither
/// overflows nor underflows. Any zero distance yields `+∞`.
fn phi_from_distances(d: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let d_min = d.clone().fold(f64::INFINITY, f64::min);
    if d_min <= 0.0 {
        return f64::INFINITY;
    }
    let s: f64 = d.map(|v| (d_min / v).powf(p)).sum();
    s.powf(1.0 / p) / d_min
}

/// Space-filling criterion φ_p; smaller is better spread. Duplicate rows
/// give `+∞`.
pub fn phi_p(x: &[Vec<f64>], p: f64, t: f64) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidInput("φ_p needs at least two samples".into()));
    }
    if !(p >= 1.0 && t >= 1.0) {
        return Err(Error::InvalidInput(format!("need p >= 1 and t >= 1, got p={p} t={t}")));
    }
    let n = x.len();
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Ok(phi_from_distances(pairs.map(|(i, j)| distance(&x[i], &x[j], t)), p))
}

/// Result of [`lhs_optimize`].
#[derive(Clone, Debug)]
pub struct Optimized {
    pub x: Samples,
    pub phi_initial: f64,
    /// φ_p after every iteration.
    pub trace: Vec<f64>,
}

impl Optimized {
    pub fn phi_final(&self) -> f64 {
        self.trace.last().copied().unwrap_or(self.phi_initial)
    }
}

/// Greedy column-swap search on φ_p.
///
/// Each iteration swaps two entries of one random column and keeps the swap
/// only if φ_p drops, so stratification is preserved and the trace never
/// increases.
pub fn lhs_optimize(x: &[Vec<f64>], iterations: usize, seed: u64, p: f64, t: f64) -> Result<Optimized> {
    let phi_initial = phi_p(x, p, t)?;
    let mut x = x.to_vec();
    let n = x.len();
    let dims = x[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            d[i][j] = distance(&x[i], &x[j], t);
            d[j][i] = d[i][j];
        }
    }
    let upper = |d: &Vec<Vec<f64>>| -> f64 {
        phi_from_distances((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| d[i][j]), p)
    };
    let mut current = phi_initial;
    let mut trace = Vec::with_capacity(iterations);
    let mut row_i = vec![0.0; n];
    let mut row_j = vec![0.0; n];
    for _ in 0..iterations {
        let col = rng.random_range(0..dims);
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (xi, xj) = (x[i][col], x[j][col]);
        x[i][col] = xj;
        x[j][col] = xi;
        row_i.copy_from_slice(&d[i][..n]);
        row_j.copy_from_slice(&d[j][..n]);
        for k in 0..n {
            if k != i {
                d[i][k] = distance(&x[i], &x[k], t);
                d[k][i] = d[i][k];
            }
            if k != j {
                d[j][k] = distance(&x[j], &x[k], t);
                d[k][j] = d[j][k];
            }
        }
        let candidate = upper(&d);
        if candidate < current {
            current = candidate;
        } else {
            x[i][col] = xi;
            x[j][col] = xj;
            for k in 0..n {
                d[i][k] = row_i[k];
                d[k][i] = row_i[k];
                d[j][k] = row_j[k];
                d[k][j] = row_j[k];
            }
        }
        trace.push(current);
    }
    Ok(Optimized { x, phi_initial, trace })
}
