//! Operating-point solvers along the constant-torque curve.
//!
//! For a torque demand `T_ref > 0` the solvers parametrise the constant-torque
//! curve by the commutation angle: for each γ the current amplitude that
//! produces `T_ref` is found by bisection (torque grows monotonically with
//! `i_s` along a ray of fixed γ). MTPA then minimises that amplitude over γ,
//! MTPV minimises `v_d² + v_q²`, and the field-weakening point is the
//! lowest-current point of the curve inside the voltage limit.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::motor::{dq_voltages, torque, torque_gamma_gradient, MachineParams, OperatingPoint};

const BRACKET_TOL: f64 = 1e-10;
const SCAN_POINTS: usize = 180;

/// Which inverter limit made a demand unattainable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Limit {
    Current,
    Voltage,
}

/// A torque demand that cannot be met, with the best attainable torque.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Infeasible {
    pub limit: Limit,
    pub max_torque: f64,
}

pub type Solve = std::result::Result<OperatingPoint, Infeasible>;

fn torque_at(m: &MachineParams, i_s: f64, gamma: f64) -> f64 {
    let (sin, cos) = gamma.sin_cos();
    torque(m, -i_s * sin, i_s * cos)
}

fn voltage2_at(m: &MachineParams, i_s: f64, gamma: f64, omega_e: f64) -> f64 {
    let (sin, cos) = gamma.sin_cos();
    let (vd, vq) = dq_voltages(m, -i_s * sin, i_s * cos, omega_e);
    vd * vd + vq * vq
}

fn to_point(m: &MachineParams, omega_mech: f64, i_s: f64, gamma: f64) -> OperatingPoint {
    let deg = gamma.to_degrees().clamp(0.0, 90.0);
    // i_s >= 0 and γ in range by construction
    OperatingPoint::evaluate(m, omega_mech, i_s, deg).expect("solver produced an out-of-range point")
}

/// Golden-section search for a minimum on `[a, b]`.
fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Coarse scan followed by golden-section refinement around the best sample.
pub(crate) fn minimize_scalar(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    if b <= a {
        return (a, f(a));
    }
    let h = (b - a) / SCAN_POINTS as f64;
    let mut best = (a, f(a));
    let mut best_k = 0;
    for k in 1..=SCAN_POINTS {
        let x = if k == SCAN_POINTS { b } else { a + h * k as f64 };
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
            best_k = k;
        }
    }
    let lo = if best_k == 0 { a } else { a + h * (best_k - 1) as f64 };
    let hi = if best_k == SCAN_POINTS { b } else { (a + h * (best_k + 1) as f64).min(b) };
    let refined = golden_min(&f, lo, hi, BRACKET_TOL);
    // ends are not visited by the golden search
    [refined, best, (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold(refined, |acc, c| if c.1 < acc.1 { c } else { acc })
}

/// Bisection for a sign change of `g` on `[lo, hi]`; returns the end where `keep(g)` holds.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, keep_lo: bool) -> f64 {
    let g_lo_positive = g(lo) >= 0.0;
    for _ in 0..200 {
        if (hi - lo).abs() <= BRACKET_TOL * (1.0 + lo.abs().max(hi.abs())) * 1e-2 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (g(mid) >= 0.0) == g_lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if keep_lo {
        lo
    } else {
        hi
    }
}

/// Current amplitude producing `t_ref` at angle `gamma`, if within `cap`.
fn current_for_torque(m: &MachineParams, t_ref: f64, gamma: f64, cap: f64) -> Option<f64> {
    if t_ref <= 0.0 {
        return Some(0.0);
    }
    if torque_at(m, cap, gamma) < t_ref {
        return None;
    }
    // torque(lo) < t_ref <= torque(hi); keep the upper end so the demand is met.
    Some(bisect(|i| torque_at(m, i, gamma) - t_ref, 0.0, cap, false))
}

/// Angle (rad) and value of the peak torque at current amplitude `i_s`.
///
/// Located as the root of the analytic γ-gradient, which is positive at γ = 0
/// for a salient rotor and negative at 90°.
pub(crate) fn peak_torque_angle(m: &MachineParams, i_s: f64) -> (f64, f64) {
    let grad = |g: f64| torque_gamma_gradient(m, i_s, g.to_degrees().clamp(0.0, 90.0)).unwrap_or(0.0);
    let gamma = if grad(0.0) <= 0.0 {
        0.0
    } else if grad(FRAC_PI_2) >= 0.0 {
        FRAC_PI_2
    } else {
        bisect(grad, 0.0, FRAC_PI_2, true)
    };
    (gamma, torque_at(m, i_s, gamma))
}

/// Largest torque reachable inside the current limit.
pub fn max_torque_current_limited(m: &MachineParams) -> f64 {
    peak_torque_angle(m, m.i_max).1
}

/// Angle interval on which `T_ref` is reachable within the current limit.
fn current_feasible_interval(m: &MachineParams, t_ref: f64) -> Result<(f64, f64), Infeasible> {
    let (g_peak, t_peak) = peak_torque_angle(m, m.i_max);
    if t_ref > t_peak {
        return Err(Infeasible { limit: Limit::Current, max_torque: t_peak });
    }
    let g = |gamma: f64| torque_at(m, m.i_max, gamma) - t_ref;
    let lo = if g(0.0) >= 0.0 { 0.0 } else { bisect(g, 0.0, g_peak, false) };
    let hi = if g(FRAC_PI_2) >= 0.0 { FRAC_PI_2 } else { bisect(g, g_peak, FRAC_PI_2, true) };
    Ok((lo, hi))
}

/// `(i_s, γ)` of the minimum-current point for `t_ref`.
pub(crate) fn mtpa_current_angle(m: &MachineParams, t_ref: f64) -> Result<(f64, f64), Infeasible> {
    if t_ref <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let t_peak = max_torque_current_limited(m);
    if t_ref > t_peak {
        return Err(Infeasible { limit: Limit::Current, max_torque: t_peak });
    }
    // The peak torque grows with current, so the smallest current whose
    // peak reaches the demand is the MTPA point; keep the upper end so the
    // demand is met.
    let i_s = bisect(|i| peak_torque_angle(m, i).1 - t_ref, 0.0, m.i_max, false);
    Ok((i_s, peak_torque_angle(m, i_s).0))
}

/// Maximum-torque-per-ampere point for `t_ref`, evaluated at standstill.
pub fn mtpa_solve(m: &MachineParams, t_ref: f64) -> Solve {
    let (i_s, gamma) = mtpa_current_angle(m, t_ref)?;
    Ok(to_point(m, 0.0, i_s, gamma))
}

/// `(i_s, γ, |v|²)` of the minimum-voltage point for `t_ref` at `omega_e`,
/// honouring only the current limit.
pub(crate) fn min_voltage_point(
    m: &MachineParams,
    t_ref: f64,
    omega_e: f64,
) -> Result<(f64, f64, f64), Infeasible> {
    if t_ref <= 0.0 {
        // Zero torque: i_q = 0, the best d-axis current cancels the PM flux.
        let (ld, _) = m.inductances(0.0, 0.0);
        let w2 = omega_e * omega_e;
        let i_d = (-w2 * ld * m.lambda_m0 / (m.r_s * m.r_s + w2 * ld * ld)).clamp(-m.i_max, 0.0);
        let gamma = if i_d < 0.0 { FRAC_PI_2 } else { 0.0 };
        let i_s = -i_d;
        return Ok((i_s, gamma, voltage2_at(m, i_s, gamma, omega_e)));
    }
    let (lo, hi) = current_feasible_interval(m, t_ref)?;
    let cost = |g: f64| match current_for_torque(m, t_ref, g, m.i_max) {
        Some(i) => voltage2_at(m, i, g, omega_e),
        None => f64::INFINITY,
    };
    let (gamma, v2) = minimize_scalar(cost, lo, hi);
    let i_s = current_for_torque(m, t_ref, gamma, m.i_max).unwrap_or(m.i_max);
    Ok((i_s, gamma, v2))
}

/// Maximum-torque-per-volt point: minimum `v_d² + v_q²` for `t_ref` at
/// electrical speed `omega_e`, inside both inverter limits.
pub fn mtpv_solve(m: &MachineParams, t_ref: f64, omega_e: f64) -> Solve {
    let (i_s, gamma, v2) = min_voltage_point(m, t_ref, omega_e)?;
    let omega_mech = omega_e / m.pole_pairs_f64();
    if v2.sqrt() > m.v_max {
        return Err(Infeasible { limit: Limit::Voltage, max_torque: max_torque_at_speed(m, omega_mech) });
    }
    Ok(to_point(m, omega_mech, i_s, gamma))
}

/// Solve without computing the attainable torque on failure.
fn plan(m: &MachineParams, t_ref: f64, omega_mech: f64) -> Result<(f64, f64), Limit> {
    plan_from(m, t_ref, omega_mech, mtpa_current_angle(m, t_ref).map_err(|e| e.limit))
}

/// [`plan`] with the speed-independent MTPA point supplied by the caller.
pub(crate) fn plan_from(
    m: &MachineParams,
    t_ref: f64,
    omega_mech: f64,
    mtpa: Result<(f64, f64), Limit>,
) -> Result<(f64, f64), Limit> {
    let omega_e = m.electrical_speed(omega_mech);
    let v_max2 = m.v_max * m.v_max;
    let (i_a, g_a) = mtpa?;
    if voltage2_at(m, i_a, g_a, omega_e) <= v_max2 {
        return Ok((i_a, g_a));
    }
    let (i_v, g_v, v2) = min_voltage_point(m, t_ref, omega_e).map_err(|e| e.limit)?;
    if v2 > v_max2 {
        return Err(Limit::Voltage);
    }
    if t_ref <= 0.0 {
        // Along i_q = 0 the lowest current inside the voltage limit.
        let excess = |i: f64| voltage2_at(m, i, FRAC_PI_2, omega_e) - v_max2;
        let i = bisect(excess, 0.0, i_v, false);
        return Ok((i, FRAC_PI_2));
    }
    // Walk from the MTPA angle towards the MTPV angle until the voltage fits.
    let excess = |g: f64| match current_for_torque(m, t_ref, g, m.i_max) {
        Some(i) => voltage2_at(m, i, g, omega_e) - v_max2,
        None => f64::INFINITY,
    };
    let g = bisect(excess, g_a, g_v, false);
    match current_for_torque(m, t_ref, g, m.i_max) {
        Some(i) if voltage2_at(m, i, g, omega_e) <= v_max2 => Ok((i, g)),
        _ => Ok((i_v, g_v)),
    }
}

/// Whether `t_ref` is attainable at `omega_mech` inside both limits.
pub fn is_feasible(m: &MachineParams, t_ref: f64, omega_mech: f64) -> bool {
    plan(m, t_ref, omega_mech).is_ok()
}

/// Torque envelope at a mechanical speed.
pub fn max_torque_at_speed(m: &MachineParams, omega_mech: f64) -> f64 {
    let t_cur = max_torque_current_limited(m);
    if is_feasible(m, t_cur, omega_mech) {
        return t_cur;
    }
    if !is_feasible(m, 0.0, omega_mech) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, t_cur);
    while hi - lo > 1e-9 * t_cur.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if is_feasible(m, mid, omega_mech) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Operating point for a demand at a mechanical speed.
///
/// Below base speed this is the MTPA point. When the MTPA point violates the
/// voltage limit the current vector is advanced along the constant-torque
/// curve towards the MTPV point until the voltage fits, which gives the
/// lowest-current voltage-feasible point (field weakening). Demands beyond the
/// MTPV point are infeasible.
pub fn trajectory_plan(m: &MachineParams, t_ref: f64, omega_mech: f64) -> Solve {
    match plan(m, t_ref, omega_mech) {
        Ok((i_s, gamma)) => Ok(to_point(m, omega_mech, i_s, gamma)),
        Err(Limit::Current) => Err(Infeasible { limit: Limit::Current, max_torque: max_torque_current_limited(m) }),
        Err(Limit::Voltage) => Err(Infeasible { limit: Limit::Voltage, max_torque: max_torque_at_speed(m, omega_mech) }),
    }
}

/// Same as [`trajectory_plan`] but skips the envelope computation on failure.
pub(crate) fn trajectory_plan_fast(
    m: &MachineParams,
    t_ref: f64,
    omega_mech: f64,
    mtpa: Result<(f64, f64), Limit>,
) -> Option<OperatingPoint> {
    plan_from(m, t_ref, omega_mech, mtpa).ok().map(|(i, g)| to_point(m, omega_mech, i, g))
}

/// Torque-vs-angle curve at one current amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentCurve {
    pub i_s: f64,
    /// Sample angles (degrees).
    pub gamma: Vec<f64>,
    pub torque: Vec<f64>,
    /// Angle of peak torque (degrees), refined between samples.
    pub optimum_gamma: f64,
    pub optimum_torque: f64,
}

/// Constant-current torque curves over γ ∈ [0°, 90°] and their optimum locus.
pub fn constant_torque_trajectories(m: &MachineParams, currents: &[f64], step_deg: f64) -> Vec<CurrentCurve> {
    let step = if step_deg > 0.0 { step_deg } else { 1.0 };
    let n = (90.0 / step).floor() as usize;
    let mut angles: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    if angles.last().is_some_and(|g| *g < 90.0) {
        angles.push(90.0);
    }
    currents
        .iter()
        .map(|&i_s| {
            let torque = angles.iter().map(|g| torque_at(m, i_s, g.to_radians())).collect();
            let (g_opt, t_opt) = peak_torque_angle(m, i_s);
            CurrentCurve {
                i_s,
                gamma: angles.clone(),
                torque,
                optimum_gamma: g_opt.to_degrees(),
                optimum_torque: t_opt,
            }
        })
        .collect()
}

/// Current ladder `step, 2·step, …` up to `i_max`.
pub fn current_ladder(i_max: f64, step: f64) -> Vec<f64> {
    let n = (i_max / step + 1e-9).floor() as usize;
    (1..=n).map(|k| k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motor::torque_gamma_gradient;
    use approx::assert_relative_eq;

    fn fixture(ld: f64, lq: f64) -> MachineParams {
        MachineParams {
            r_s: 0.0,
            pole_pairs: 4,
            lambda_m0: 0.1,
            ld0: ld,
            lq0: lq,
            sat_iq: None,
            i_max: 200.0,
            v_max: 150.0,
            loss_coeffs: MachineParams::t_prius().loss_coeffs,
        }
    }

    /// Closed-form current on the constant-torque curve for constant inductances.
    fn curve_current(m: &MachineParams, t: f64, g: f64) -> f64 {
        let p = m.pole_pairs_f64();
        let a = 1.5 * p * (m.lq0 - m.ld0) * g.sin() * g.cos();
        let b = 1.5 * p * m.lambda_m0 * g.cos();
        if a > 0.0 {
            (-b + (b * b + 4.0 * a * t).sqrt()) / (2.0 * a)
        } else {
            t / b
        }
    }

    #[test]
    fn round_rotor_has_zero_mtpa_angle() {
        let m = fixture(1e-3, 1e-3);
        for t in [10.0, 50.0, 100.0] {
            let op = mtpa_solve(&m, t).unwrap();
            assert!(op.gamma.abs() < 1e-4, "gamma {}", op.gamma);
            assert_relative_eq!(op.torque, t, max_relative = 1e-6);
        }
    }

    #[test]
    fn zero_torque_needs_no_current() {
        let op = mtpa_solve(&fixture(1e-3, 3e-3), 0.0).unwrap();
        assert_eq!(op.i_s, 0.0);
    }

    #[test]
    fn mtpa_fixture_matches_dense_scan() {
        let m = fixture(1e-3, 3e-3);
        let op = mtpa_solve(&m, 100.0).unwrap();
        // frozen from a 1e-4 degree scan of the closed-form curve current
        assert!((op.i_s - 96.5117).abs() < 0.05, "i_s {}", op.i_s);
        assert!((op.gamma - 36.1111).abs() < 0.05, "gamma {}", op.gamma);
        assert!((op.torque - 100.0).abs() <= 1e-6 * 100.0);
    }

    #[test]
    fn mtpa_is_stationary_on_current_circle() {
        let m = fixture(1e-3, 3e-3);
        let op = mtpa_solve(&m, 80.0).unwrap();
        let grad = torque_gamma_gradient(&m, op.i_s, op.gamma).unwrap();
        assert!(grad.abs() < 1e-4, "gradient {grad}");
    }

    #[test]
    fn unattainable_torque_reports_envelope() {
        let m = fixture(1e-3, 3e-3);
        let err = mtpa_solve(&m, 1e4).unwrap_err();
        assert_eq!(err.limit, Limit::Current);
        assert_relative_eq!(err.max_torque, max_torque_current_limited(&m));
    }

    #[test]
    fn mtpv_zero_torque_flux_cancellation() {
        let m = fixture(1e-3, 3e-3);
        // λ/L_d = 100 A is inside the 200 A limit
        let (i_s, g, v2) = min_voltage_point(&m, 0.0, 1000.0).unwrap();
        assert_relative_eq!(i_s, 100.0, max_relative = 1e-12);
        assert_relative_eq!(g, FRAC_PI_2);
        assert!(v2 < 1e-18);
        let weak = MachineParams { i_max: 60.0, ..m };
        let (i_s, _, _) = min_voltage_point(&weak, 0.0, 1000.0).unwrap();
        assert_relative_eq!(i_s, 60.0);
    }

    #[test]
    fn mtpv_fixture_matches_dense_scan() {
        let m = fixture(1e-3, 3e-3);
        // The published fixture sits 1.2 V above the voltage limit.
        let (i_s, g, v2) = min_voltage_point(&m, 50.0, 2000.0).unwrap();
        assert!((i_s - 129.9297).abs() < 0.05, "i_s {i_s}");
        assert!((g.to_degrees() - 79.609).abs() < 0.05, "gamma {}", g.to_degrees());
        assert_relative_eq!(v2.sqrt(), 151.2012, max_relative = 1e-5);
        assert_eq!(mtpv_solve(&m, 50.0, 2000.0).unwrap_err().limit, Limit::Voltage);
        let relaxed = MachineParams { v_max: 160.0, ..m };
        let op = mtpv_solve(&relaxed, 50.0, 2000.0).unwrap();
        assert!((op.i_s - 129.9297).abs() < 0.05);
    }

    #[test]
    fn mtpv_matches_mtpa_at_low_speed() {
        let m = MachineParams { r_s: 0.05, ..fixture(1e-3, 3e-3) };
        let a = mtpa_solve(&m, 60.0).unwrap();
        let v = mtpv_solve(&m, 60.0, 1e-3).unwrap();
        assert!((a.i_s - v.i_s).abs() < 0.05);
        assert!((a.gamma - v.gamma).abs() < 0.05);
    }

    #[test]
    fn plan_uses_mtpa_at_low_speed() {
        let m = MachineParams::t_prius();
        let a = mtpa_solve(&m, 120.0).unwrap();
        let p = trajectory_plan(&m, 120.0, 1e-6).unwrap();
        assert_relative_eq!(a.i_s, p.i_s, max_relative = 1e-12);
        assert_relative_eq!(a.gamma, p.gamma, max_relative = 1e-12);
        let z = trajectory_plan(&m, 0.0, 10.0).unwrap();
        assert_eq!(z.i_s, 0.0);
    }

    #[test]
    fn gamma_advances_past_base_speed() {
        let m = MachineParams::t_prius();
        let mut last = 0.0;
        for k in 0..=50 {
            let w = 20.0 * k as f64;
            match trajectory_plan(&m, 60.0, w) {
                Ok(op) => {
                    assert!(op.gamma >= last - 1e-6, "gamma fell at {w}: {} < {last}", op.gamma);
                    assert!(op.voltage() <= m.v_max * (1.0 + 1e-6));
                    assert!(op.i_s <= m.i_max * (1.0 + 1e-6));
                    assert!((op.torque - 60.0).abs() <= 60e-6);
                    last = op.gamma;
                }
                Err(e) => assert!(e.max_torque < 60.0),
            }
        }
        assert!(last > mtpa_solve(&m, 60.0).unwrap().gamma);
    }

    #[test]
    fn envelope_bounds_feasibility() {
        let m = MachineParams::t_prius();
        for w in [100.0, 400.0, 800.0] {
            let t = max_torque_at_speed(&m, w);
            assert!(is_feasible(&m, t * 0.999, w));
            assert!(!is_feasible(&m, t * 1.001 + 1e-6, w));
        }
    }

    #[test]
    fn constant_current_locus_matches_mtpa() {
        let m = fixture(1e-3, 3e-3);
        let ladder = current_ladder(200.0, 31.2);
        assert_eq!(ladder.len(), 6);
        let curves = constant_torque_trajectories(&m, &ladder, 0.5);
        for c in &curves {
            let brute = c.torque.iter().cloned().fold(f64::MIN, f64::max);
            assert!(c.optimum_torque >= brute - 1e-9);
            let op = mtpa_solve(&m, c.optimum_torque).unwrap();
            assert!((op.i_s - c.i_s).abs() < 1e-3, "{} vs {}", op.i_s, c.i_s);
            assert!((op.gamma - c.optimum_gamma).abs() < 0.05);
            let _ = curve_current(&m, c.optimum_torque, c.optimum_gamma.to_radians());
        }
        let round = constant_torque_trajectories(&fixture(1e-3, 1e-3), &ladder, 1.0);
        assert!(round.iter().all(|c| c.optimum_gamma.abs() < 1e-4));
    }

    #[test]
    fn closed_form_curve_agrees_with_bisection() {
        let m = fixture(1e-3, 3e-3);
        for deg in [0.0, 20.0, 45.0, 70.0] {
            let g = f64::to_radians(deg);
            let a = curve_current(&m, 90.0, g);
            let b = current_for_torque(&m, 90.0, g, 1e4).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }
}
