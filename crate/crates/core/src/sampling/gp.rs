use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kernel::SeKernel;
use crate::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// How the GP mean is handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanMode {
    /// Responses are modelled as zero-mean.
    Zero,
    /// A constant mean is estimated by generalised least squares.
    #[default]
    Constant,
}

/// Settings for the likelihood search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpOptions {
    pub starts: usize,
    pub max_evals_per_start: usize,
    pub theta_bounds: (f64, f64),
    pub sigma_bounds: (f64, f64),
    pub mean: MeanMode,
    pub seed: u64,
}

impl Default for GpOptions {
    fn default() -> Self {
        GpOptions {
            starts: 8,
            max_evals_per_start: 400,
            theta_bounds: (1e-3, 1e3),
            sigma_bounds: (1e-6, 1e3),
            mean: MeanMode::Constant,
            seed: 0,
        }
    }
}

/// Fitted Gaussian-process regressor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GpSurrogate {
    pub theta_h: Vec<f64>,
    pub sigma2: f64,
    pub sigma_eps: f64,
    pub mean_mode: MeanMode,
    /// Estimated constant mean (0 in zero-mean mode).
    pub mu: f64,
    /// Diagonal jitter that was needed for the factorisation.
    pub jitter: f64,
    pub log_likelihood: f64,
    /// Log-likelihood of the starting hyperparameters.
    pub log_likelihood_init: f64,
    /// Incumbent log-likelihood each time the search improved on it.
    #[serde(default)]
    pub likelihood_trace: Vec<f64>,
    /// `(C + σ_ε² I)⁻¹ (y − μ)`.
    #[serde(skip)]
    pub alpha: Vec<f64>,
    #[serde(skip)]
    pub x_train: Vec<Vec<f64>>,
}

struct Factored {
    chol: Cholesky<f64, Dyn>,
    jitter: f64,
}

fn factor(x: &[Vec<f64>], theta: &[f64], sigma2: f64, sigma_eps: f64) -> Option<Factored> {
    let m = x.len();
    let g = SeKernel::new(theta.to_vec()).gram(x);
    let base = DMatrix::from_fn(m, m, |i, j| sigma2 * g[i][j]);
    let noise = sigma_eps * sigma_eps;
    let mut jitter = 0.0;
    loop {
        let mut c = base.clone();
        for i in 0..m {
            c[(i, i)] += noise + jitter;
        }
        if let Some(chol) = Cholesky::new(c) {
            return Some(Factored { chol, jitter });
        }
        jitter = if jitter == 0.0 { 1e-10 * sigma2 } else { jitter * 10.0 };
        if jitter > 1e-6 * sigma2 * (1.0 + 1e-9) {
            return None;
        }
    }
}

struct Solved {
    mu: f64,
    alpha: DVector<f64>,
    log_likelihood: f64,
    jitter: f64,
}

fn solve(x: &[Vec<f64>], y: &[f64], theta: &[f64], sigma2: f64, sigma_eps: f64, mean: MeanMode) -> Option<Solved> {
    let f = factor(x, theta, sigma2, sigma_eps)?;
    let m = y.len();
    let yv = DVector::from_column_slice(y);
    let mu = match mean {
        MeanMode::Zero => 0.0,
        MeanMode::Constant => {
            let ones = DVector::from_element(m, 1.0);
            let ki1 = f.chol.solve(&ones);
            let denom = ones.dot(&ki1);
            if !(denom > 0.0) {
                return None;
            }
            ki1.dot(&yv) / denom
        }
    };
    let r = yv.add_scalar(-mu);
    let alpha = f.chol.solve(&r);
    let log_det: f64 = 2.0 * f.chol.l_dirty().diagonal().iter().take(m).map(|v| v.ln()).sum::<f64>();
    let ll = -0.5 * m as f64 * LN_2PI - 0.5 * log_det - 0.5 * r.dot(&alpha);
    if !ll.is_finite() {
        return None;
    }
    Some(Solved { mu, alpha, log_likelihood: ll, jitter: f.jitter })
}

fn check_data(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!("{} inputs but {} responses", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("no training data".into()));
    }
    let n = x[0].len();
    if x.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("ragged input matrix".into()));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("training data must be finite".into()));
    }
    Ok(n)
}

/// Log-likelihood of the hyperparameters (with the mean handled per `mean`).
pub fn gp_log_likelihood(
    x: &[Vec<f64>],
    y: &[f64],
    theta: &[f64],
    sigma2: f64,
    sigma_eps: f64,
    mean: MeanMode,
) -> Result<f64> {
    check_data(x, y)?;
    solve(x, y, theta, sigma2, sigma_eps, mean)
        .map(|s| s.log_likelihood)
        .ok_or_else(|| Error::Fit("covariance matrix is not positive definite".into()))
}

/// GP with fixed hyperparameters (no likelihood search).
pub fn gp_with_params(
    x: &[Vec<f64>],
    y: &[f64],
    theta: &[f64],
    sigma2: f64,
    sigma_eps: f64,
    mean: MeanMode,
) -> Result<GpSurrogate> {
    let n = check_data(x, y)?;
    if theta.len() != n || theta.iter().any(|t| !(*t > 0.0)) || !(sigma2 > 0.0) || !(sigma_eps >= 0.0) {
        return Err(Error::InvalidInput("need theta > 0 per dimension, sigma2 > 0, sigma_eps >= 0".into()));
    }
    let s = solve(x, y, theta, sigma2, sigma_eps, mean)
        .ok_or_else(|| Error::Fit("covariance matrix is not positive definite after jitter".into()))?;
    Ok(GpSurrogate {
        theta_h: theta.to_vec(),
        sigma2,
        sigma_eps,
        mean_mode: mean,
        mu: s.mu,
        jitter: s.jitter,
        log_likelihood: s.log_likelihood,
        log_likelihood_init: s.log_likelihood,
        likelihood_trace: vec![s.log_likelihood],
        alpha: s.alpha.iter().copied().collect(),
        x_train: x.to_vec(),
    })
}

fn sample_variance(y: &[f64]) -> f64 {
    let m = y.len() as f64;
    let mean = y.iter().sum::<f64>() / m;
    y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m
}

/// Fits a GP by maximising the log-likelihood over `θʰ` and the process
/// standard deviation with a bounded multi-start coordinate search in log
/// space. `sigma_eps` is held fixed.
pub fn gp_fit(x: &[Vec<f64>], y: &[f64], init_theta: &[f64], sigma_eps: f64) -> Result<GpSurrogate> {
    gp_fit_with(x, y, init_theta, None, sigma_eps, &GpOptions::default())
}

/// [`gp_fit`] with explicit options and an optional starting process variance
/// (defaults to the sample variance of `y`).
pub fn gp_fit_with(
    x: &[Vec<f64>],
    y: &[f64],
    init_theta: &[f64],
    init_sigma2: Option<f64>,
    sigma_eps: f64,
    opts: &GpOptions,
) -> Result<GpSurrogate> {
    let n = check_data(x, y)?;
    if init_theta.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} kernel parameters, got {}", init_theta.len())));
    }
    if !(sigma_eps >= 0.0) {
        return Err(Error::InvalidInput("sigma_eps must be >= 0".into()));
    }
    let (t_lo, t_hi) = (opts.theta_bounds.0.log10(), opts.theta_bounds.1.log10());
    let (s_lo, s_hi) = (opts.sigma_bounds.0.log10(), opts.sigma_bounds.1.log10());
    let lo: Vec<f64> = (0..=n).map(|k| if k < n { t_lo } else { s_lo }).collect();
    let hi: Vec<f64> = (0..=n).map(|k| if k < n { t_hi } else { s_hi }).collect();
    let var = init_sigma2.unwrap_or_else(|| sample_variance(y)).max(opts.sigma_bounds.0.powi(2));
    let mut start: Vec<f64> = init_theta.iter().map(|t| t.max(1e-300).log10()).collect();
    start.push(0.5 * var.log10());
    for k in 0..=n {
        start[k] = start[k].clamp(lo[k], hi[k]);
    }

    let objective = |u: &[f64]| -> f64 {
        let theta: Vec<f64> = u[..n].iter().map(|v| 10f64.powf(*v)).collect();
        let sigma2 = 10f64.powf(2.0 * u[n]);
        solve(x, y, &theta, sigma2, sigma_eps, opts.mean).map_or(f64::NEG_INFINITY, |s| s.log_likelihood)
    };
    let ll_init = objective(&start);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = (start.clone(), ll_init);
    let mut trace = vec![ll_init];
    for s in 0..opts.starts.max(1) {
        let u0 = if s == 0 {
            start.clone()
        } else {
            (0..=n).map(|k| rng.random_range(lo[k]..=hi[k])).collect()
        };
        let (u, fu, accepted) = coordinate_search(&objective, u0, &lo, &hi, opts.max_evals_per_start);
        for v in accepted {
            if v > *trace.last().unwrap_or(&f64::NEG_INFINITY) {
                trace.push(v);
            }
        }
        if fu > best.1 {
            best = (u, fu);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Fit("no hyperparameters gave a positive-definite covariance".into()));
    }
    let theta: Vec<f64> = best.0[..n].iter().map(|v| 10f64.powf(*v)).collect();
    let sigma2 = 10f64.powf(2.0 * best.0[n]);
    let mut gp = gp_with_params(x, y, &theta, sigma2, sigma_eps, opts.mean)?;
    gp.log_likelihood_init = ll_init;
    gp.likelihood_trace = trace;
    Ok(gp)
}

/// Pattern search along coordinate axes with step halving. Also returns the
/// value after every accepted move, starting with the initial point.
fn coordinate_search(
    f: &impl Fn(&[f64]) -> f64,
    mut u: Vec<f64>,
    lo: &[f64],
    hi: &[f64],
    max_evals: usize,
) -> (Vec<f64>, f64, Vec<f64>) {
    let mut fu = f(&u);
    let mut accepted = vec![fu];
    let mut evals = 1;
    let mut step = 1.0;
    while step > 1e-3 && evals < max_evals {
        let mut improved = false;
        for k in 0..u.len() {
            for dir in [1.0, -1.0] {
                let v = (u[k] + dir * step).clamp(lo[k], hi[k]);
                if v == u[k] {
                    continue;
                }
                let old = u[k];
                u[k] = v;
                let fv = f(&u);
                evals += 1;
                if fv > fu {
                    fu = fv;
                    accepted.push(fv);
                    improved = true;
                    break;
                }
                u[k] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (u, fu, accepted)
}

impl GpSurrogate {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let k = SeKernel::new(self.theta_h.clone());
        self.mu
            + self
                .x_train
                .iter()
                .zip(&self.alpha)
                .map(|(t, a)| self.sigma2 * k.eval(x, t) * a)
                .sum::<f64>()
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

/// Posterior mean at `x`.
pub fn gp_predict(s: &GpSurrogate, x: &[f64]) -> f64 {
    s.predict(x)
}
