//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mlhr_opt::motor::MachineParams;
use mlhr_opt::sampling::SeKernel;
use mlhr_opt::vehicle::VehicleParams;

/// Unsaturated salient machine with random but physical parameters.
pub fn random_machine(rng: &mut ChaCha8Rng) -> MachineParams {
    let ld = rng.random_range(0.08e-3..0.4e-3);
    MachineParams {
        r_s: rng.random_range(0.01..0.1),
        pole_pairs: rng.random_range(2..=5),
        lambda_m0: rng.random_range(0.04..0.15),
        ld0: ld,
        lq0: ld * rng.random_range(1.3..3.5),
        sat_iq: None,
        i_max: rng.random_range(100.0..300.0),
        v_max: rng.random_range(150.0..400.0),
        loss_coeffs: MachineParams::t_prius().loss_coeffs,
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Current amplitude giving torque `t` at angle `gamma` (rad) for an
/// unsaturated machine: the positive root of `a·i² + b·i = t`.
pub fn current_for(m: &MachineParams, t: f64, gamma: f64) -> Option<f64> {
    let k = 1.5 * m.pole_pairs as f64;
    let (s, c) = gamma.sin_cos();
    let a = k * (m.lq0 - m.ld0) * s * c;
    let b = k * m.lambda_m0 * c;
    let i = if a.abs() < 1e-300 {
        if b <= 0.0 {
            return None;
        }
        t / b
    } else {
        let disc = b * b + 4.0 * a * t;
        if disc < 0.0 {
            return None;
        }
        (-b + disc.sqrt()) / (2.0 * a)
    };
    (i.is_finite() && i >= 0.0).then_some(i)
}

pub fn voltage2(m: &MachineParams, i_s: f64, gamma: f64, omega_e: f64) -> f64 {
    let (i_d, i_q) = (-i_s * gamma.sin(), i_s * gamma.cos());
    let v_d = m.r_s * i_d - omega_e * m.lq0 * i_q;
    let v_q = m.r_s * i_q + omega_e * m.ld0 * i_d + omega_e * m.lambda_m0;
    v_d * v_d + v_q * v_q
}

/// Exhaustive search over γ in steps of `step_deg`, followed by a finer
/// pass around the best sample; returns `(γ_deg, cost, i_s)`.
fn grid_min(cost: impl Fn(f64) -> Option<(f64, f64)>, step_deg: f64) -> Option<(f64, f64, f64)> {
    let scan = |lo: f64, hi: f64, step: f64| {
        let n = ((hi - lo) / step).round() as usize;
        let mut best: Option<(f64, f64, f64)> = None;
        for k in 0..=n {
            let g = (lo + k as f64 * step).clamp(0.0, 90.0);
            if let Some((c, i)) = cost(g.to_radians()) {
                if best.is_none_or(|b| c < b.1) {
                    best = Some((g, c, i));
                }
            }
        }
        best
    };
    let coarse = scan(0.0, 90.0, step_deg)?;
    scan(coarse.0 - step_deg, coarse.0 + step_deg, step_deg / 100.0).or(Some(coarse))
}

/// MTPA by exhaustive angle search: `(i_s, γ_deg)`.
pub fn grid_mtpa(m: &MachineParams, t: f64) -> Option<(f64, f64)> {
    let (g, c, _) = grid_min(
        |g| current_for(m, t, g).filter(|i| *i <= m.i_max).map(|i| (i, i)),
        0.01,
    )?;
    Some((c, g))
}

/// Minimum-voltage point inside the current limit: `(i_s, γ_deg, |v|)`.
pub fn grid_mtpv(m: &MachineParams, t: f64, omega_e: f64) -> Option<(f64, f64, f64)> {
    let (g, v2, i) = grid_min(
        |g| current_for(m, t, g).filter(|i| *i <= m.i_max).map(|i| (voltage2(m, i, g, omega_e), i)),
        0.01,
    )?;
    Some((i, g, v2.sqrt()))
}

/// O(n²) non-dominated set (minimisation), in index order.
pub fn brute_front(points: &[Vec<f64>]) -> Vec<usize> {
    let dom = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y);
    (0..points.len())
        .filter(|&i| !(0..points.len()).any(|j| j != i && dom(&points[j], &points[i])))
        .collect()
}

/// Peels brute-force fronts until every point is ranked.
pub fn brute_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let sub: Vec<Vec<f64>> = left.iter().map(|&i| points[i].clone()).collect();
        let f: Vec<usize> = brute_front(&sub).into_iter().map(|k| left[k]).collect();
        left.retain(|i| !f.contains(i));
        fronts.push(f);
    }
    fronts
}

/// Optimal value of the ε-SVR dual with Gram matrix `K²` by enumerating
/// every active-set pattern: each `β_i = a_i − a_i*` is at `−λ`, free
/// negative, `0`, free positive or at `+λ`.
///
/// For each pattern the free variables solve the equality-constrained
/// stationarity system; patterns whose solution leaves its sign region are
/// discarded. The dual is concave, so the best admissible pattern is the
/// optimum, which equals the primal minimum.
pub fn svr_dual_oracle(x: &[Vec<f64>], y: &[f64], theta: &[f64], eps: f64, lambda: f64) -> f64 {
    let n = x.len();
    let k = SeKernel::new(theta.to_vec()).gram(x);
    let kk = DMatrix::from_fn(n, n, |i, j| k[i][j]);
    let g = &kk * &kk;
    let dual = |beta: &DVector<f64>| {
        -0.5 * (beta.transpose() * &g * beta)[(0, 0)] - eps * beta.iter().map(|b| b.abs()).sum::<f64>()
            + beta.iter().zip(y).map(|(b, yi)| b * yi).sum::<f64>()
    };
    let mut best = f64::NEG_INFINITY;
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0usize; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = c % 5;
            c /= 5;
        }
        let mut beta = DVector::zeros(n);
        let mut free = Vec::new();
        for i in 0..n {
            match state[i] {
                0 => beta[i] = -lambda,
                4 => beta[i] = lambda,
                2 => {}
                _ => free.push(i),
            }
        }
        let fixed_sum: f64 = beta.iter().sum();
        if free.is_empty() {
            if fixed_sum.abs() < 1e-12 {
                best = best.max(dual(&beta));
            }
            continue;
        }
        let nf = free.len();
        let mut a = DMatrix::zeros(nf + 1, nf + 1);
        let mut rhs = DVector::zeros(nf + 1);
        for (r, &i) in free.iter().enumerate() {
            let sign = if state[i] == 3 { 1.0 } else { -1.0 };
            for (cidx, &j) in free.iter().enumerate() {
                a[(r, cidx)] = g[(i, j)];
            }
            a[(r, nf)] = 1.0;
            let mut gb = 0.0;
            for j in 0..n {
                gb += g[(i, j)] * beta[j];
            }
            rhs[r] = y[i] - eps * sign - gb;
            a[(nf, r)] = 1.0;
        }
        rhs[nf] = -fixed_sum;
        let Some(sol) = a.lu().solve(&rhs) else { continue };
        let mut ok = true;
        for (r, &i) in free.iter().enumerate() {
            let b = sol[r];
            let inside = if state[i] == 3 { b >= -1e-12 && b <= lambda + 1e-12 } else { b <= 1e-12 && b >= -lambda - 1e-12 };
            ok &= inside;
            beta[i] = b;
        }
        if ok {
            best = best.max(dual(&beta));
        }
    }
    best
}

fn axle_cap(vp: &VehicleParams, f_z: f64) -> f64 {
    (vp.mu_max * f_z.max(0.0) * vp.r_w / (vp.g_r * vp.eta_trans)).min(vp.t_m_max)
}

/// Maximum acceleration by a 2-D torque grid: for a trial `a`, every
/// `(T_F, T_R)` pair on the grid is checked against the torque caps and the
/// per-axle friction limits under the load transfer of `a`; the trial is
/// sustainable if some admissible pair delivers at least `a`. Bisection on
/// `a` finds the fixed point.
pub fn brute_max_acceleration(vp: &VehicleParams, torque_step: f64) -> f64 {
    let m = vp.m0 + vp.m1;
    let m_eff = vp.m0 + vp.m_app + vp.m1;
    let n = (vp.t_m_max / torque_step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| (k as f64 * torque_step).min(vp.t_m_max)).collect();
    let delivered = |a: f64| {
        let transfer = m * a * vp.h_cg / vp.wheelbase;
        let fz_f = m * vp.g * (vp.wheelbase - vp.a_front) / vp.wheelbase - transfer;
        let fz_r = m * vp.g * vp.a_front / vp.wheelbase + transfer;
        let mut best = f64::NEG_INFINITY;
        for &tf in &grid {
            if tf * vp.g_r * vp.eta_trans / vp.r_w > vp.mu_max * fz_f.max(0.0) + 1e-9 {
                break;
            }
            for &tr in &grid {
                if tr * vp.g_r * vp.eta_trans / vp.r_w > vp.mu_max * fz_r.max(0.0) + 1e-9 {
                    break;
                }
                let acc = ((tf + tr) * vp.g_r * vp.eta_trans - vp.c_r * m * vp.g * vp.r_w) / (m_eff * vp.r_w);
                best = best.max(acc);
            }
        }
        best
    };
    if delivered(0.0) < 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 2.0 * vp.t_m_max * vp.g_r * vp.eta_trans / (m_eff * vp.r_w) + 1.0);
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if delivered(mid) >= mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Maximum gradient (degrees) by sweeping the slope in `step_deg` steps and
/// keeping the steepest angle whose static force balance holds.
pub fn sweep_max_gradient(vp: &VehicleParams, step_deg: f64) -> f64 {
    let m = vp.m0 + vp.m1;
    let l = vp.wheelbase;
    let n = (90.0 / step_deg).round() as usize;
    let mut best = 0.0;
    for k in 0..=n {
        let deg = k as f64 * step_deg;
        let th = deg.to_radians();
        let fz_f = m * vp.g * (th.cos() * (l - vp.a_front) - vp.h_cg * th.sin()) / l;
        let fz_r = m * vp.g * (th.cos() * vp.a_front + vp.h_cg * th.sin()) / l;
        let force = (axle_cap(vp, fz_f) + axle_cap(vp, fz_r)) * vp.g_r * vp.eta_trans / vp.r_w;
        if force >= m * vp.g * (th.sin() + vp.c_r * th.cos()) {
            best = deg;
        }
    }
    best
}
