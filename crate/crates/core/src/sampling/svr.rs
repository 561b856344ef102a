use serde::{Deserialize, Serialize};

use super::kernel::SeKernel;
use crate::{Error, Result};

/// Iteration cap for the SMO solver.
pub const SMO_MAX_ITER: usize = 2_000_000;
/// Stopping tolerance on the maximal KKT violation.
pub const SMO_TOL: f64 = 1e-7;

/// Fitted ε-insensitive support-vector regressor
/// `f(x) = Σ c_i k(x, x_i) + b`.
///
/// Training solves `min ½‖c‖² + λ Σ (ζ_u + ζ_l)` subject to the ε-tube
/// constraints. With the kernel rows as features this is a linear SVR, whose
/// dual has Gram matrix `K²`; the dual is solved by SMO and `c = K·(a − a*)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SvrSurrogate {
    pub c: Vec<f64>,
    pub b: f64,
    pub theta_h: Vec<f64>,
    pub epsilon: f64,
    pub lambda_pen: f64,
    pub zeta_u: Vec<f64>,
    pub zeta_l: Vec<f64>,
    /// Largest KKT violation of the dual at termination.
    pub kkt_residual: f64,
    pub iterations: usize,
    #[serde(skip)]
    pub x_train: Vec<Vec<f64>>,
}

impl SvrSurrogate {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let k = SeKernel::new(self.theta_h.clone());
        self.b + self.x_train.iter().zip(&self.c).map(|(t, c)| c * k.eval(x, t)).sum::<f64>()
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    /// Primal objective `½‖c‖² + λ Σ (ζ_u + ζ_l)`.
    pub fn objective(&self) -> f64 {
        0.5 * self.c.iter().map(|c| c * c).sum::<f64>()
            + self.lambda_pen * self.zeta_u.iter().chain(&self.zeta_l).sum::<f64>()
    }
}

/// Primal objective of an arbitrary `(c, b)` on training data.
pub fn svr_primal_objective(
    x: &[Vec<f64>],
    y: &[f64],
    theta: &[f64],
    c: &[f64],
    b: f64,
    epsilon: f64,
    lambda_pen: f64,
) -> f64 {
    let k = SeKernel::new(theta.to_vec());
    let slack: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let f = b + x.iter().zip(c).map(|(xj, cj)| cj * k.eval(xi, xj)).sum::<f64>();
            ((yi - f).abs() - epsilon).max(0.0)
        })
        .sum();
    0.5 * c.iter().map(|v| v * v).sum::<f64>() + lambda_pen * slack
}

/// Fits the regressor with default solver settings.
pub fn svr_fit(x: &[Vec<f64>], y: &[f64], lambda_pen: f64, epsilon: f64, theta_h: &[f64]) -> Result<SvrSurrogate> {
    svr_fit_with(x, y, lambda_pen, epsilon, theta_h, SMO_TOL, SMO_MAX_ITER)
}

/// Fits the regressor; `tol` bounds the final maximal-violating-pair gap.
pub fn svr_fit_with(
    x: &[Vec<f64>],
    y: &[f64],
    lambda_pen: f64,
    epsilon: f64,
    theta_h: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SvrSurrogate> {
    let m = x.len();
    if m == 0 || m != y.len() {
        return Err(Error::InvalidInput(format!("{} inputs but {} responses", m, y.len())));
    }
    if !(lambda_pen > 0.0) || !(epsilon >= 0.0) {
        return Err(Error::InvalidInput("need lambda_pen > 0 and epsilon >= 0".into()));
    }
    if theta_h.len() != x[0].len() || theta_h.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidInput("need one positive kernel parameter per dimension".into()));
    }
    let kernel = SeKernel::new(theta_h.to_vec());
    let k = kernel.gram(x);
    // G = K K (K symmetric)
    let mut g = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v: f64 = (0..m).map(|l| k[i][l] * k[l][j]).sum();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    let sol = smo(&g, y, epsilon, lambda_pen, tol, max_iter)?;
    let beta: Vec<f64> = (0..m).map(|i| sol.alpha[i] - sol.alpha[i + m]).collect();
    let c: Vec<f64> = (0..m).map(|i| (0..m).map(|j| k[i][j] * beta[j]).sum()).collect();
    let b = -sol.rho;
    let mut zeta_u = vec![0.0; m];
    let mut zeta_l = vec![0.0; m];
    for i in 0..m {
        let f: f64 = b + (0..m).map(|j| k[i][j] * c[j]).sum::<f64>();
        zeta_l[i] = (y[i] - f - epsilon).max(0.0);
        zeta_u[i] = (f - y[i] - epsilon).max(0.0);
    }
    Ok(SvrSurrogate {
        c,
        b,
        theta_h: theta_h.to_vec(),
        epsilon,
        lambda_pen,
        zeta_u,
        zeta_l,
        kkt_residual: sol.gap.max(0.0),
        iterations: sol.iterations,
        x_train: x.to_vec(),
    })
}

struct SmoSolution {
    alpha: Vec<f64>,
    rho: f64,
    gap: f64,
    iterations: usize,
}

/// SMO with second-order working-set selection for the ε-SVR dual
/// `min ½ αᵀQα + pᵀα, sᵀα = 0, 0 ≤ α ≤ C` over `2m` variables.
fn smo(g: &[Vec<f64>], y: &[f64], eps: f64, cap: f64, tol: f64, max_iter: usize) -> Result<SmoSolution> {
    let m = y.len();
    let l = 2 * m;
    let sign = |i: usize| if i < m { 1.0 } else { -1.0 };
    let q = |i: usize, j: usize| sign(i) * sign(j) * g[i % m][j % m];
    let mut alpha = vec![0.0; l];
    let mut grad: Vec<f64> = (0..l).map(|i| if i < m { eps - y[i] } else { eps + y[i - m] }).collect();
    let tau = 1e-12;
    let in_up = |a: f64, s: f64| (s > 0.0 && a < cap) || (s < 0.0 && a > 0.0);
    let in_low = |a: f64, s: f64| (s > 0.0 && a > 0.0) || (s < 0.0 && a < cap);

    let mut iterations = 0;
    let gap = loop {
        // i: maximal violator in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..l {
            if in_up(alpha[t], sign(t)) {
                let v = -sign(t) * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..l {
            if !in_low(alpha[t], sign(t)) {
                continue;
            }
            let v = -sign(t) * grad[t];
            gmin = gmin.min(v);
            if i_sel == usize::MAX {
                continue;
            }
            let b = gmax - v;
            if b > 0.0 {
                let mut a = q(i_sel, i_sel) + q(t, t) - 2.0 * sign(i_sel) * sign(t) * q(i_sel, t);
                if a <= 0.0 {
                    a = tau;
                }
                let obj = -(b * b) / a;
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = t;
                }
            }
        }
        let gap = gmax - gmin;
        if i_sel == usize::MAX || j_sel == usize::MAX || gap <= tol {
            break if gap.is_finite() { gap } else { 0.0 };
        }
        if iterations >= max_iter {
            return Err(Error::Fit(format!("SMO did not converge in {max_iter} iterations (gap {gap:e})")));
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (yi, yj) = (sign(i), sign(j));
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let (qii, qjj, qij) = (q(i, i), q(j, j), q(i, j));
        if yi != yj {
            let mut quad = qii + qjj + 2.0 * qij;
            if quad <= 0.0 {
                quad = tau;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > cap {
                    alpha[i] = cap;
                    alpha[j] = cap - diff;
                }
            } else if alpha[j] > cap {
                alpha[j] = cap;
                alpha[i] = cap + diff;
            }
        } else {
            let mut quad = qii + qjj - 2.0 * qij;
            if quad <= 0.0 {
                quad = tau;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > cap {
                if alpha[i] > cap {
                    alpha[i] = cap;
                    alpha[j] = sum - cap;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cap {
                if alpha[j] > cap {
                    alpha[j] = cap;
                    alpha[i] = sum - cap;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        for t in 0..l {
            grad[t] += q(t, i) * dai + q(t, j) * daj;
        }
    };

    // offset from free variables, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..l {
        let yg = sign(t) * grad[t];
        if alpha[t] >= cap {
            if sign(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if sign(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 { sum_free / n_free as f64 } else { 0.5 * (ub + lb) };
    Ok(SmoSolution { alpha, rho, gap, iterations })
}
