//! Property tests over randomly drawn inputs.

use proptest::prelude::*;

use mlhr_opt::motor::{dq_currents, efficiency, loss_model, torque_gamma_gradient, MachineParams};
use mlhr_opt::optimizer::{dominates, hypervolume, non_dominated_sort};
use mlhr_opt::sampling::{gp_with_params, is_latin, lhs_init, lhs_optimize, phi_p, MeanMode, PHI_P, PHI_T};
use mlhr_opt::trajectory::{mtpa_solve, premium_region_stats, trajectory_plan, TorqueSpeedMap};
use mlhr_opt::vehicle::{
    axle_loads_accelerating, cycle_operating_points, max_acceleration, max_gradient, wheel_torque_demand,
    DriveCycle, VehicleParams,
};

fn points(n: std::ops::Range<usize>, dims: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, dims), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dq_currents_preserve_amplitude(i_s in 0.0f64..500.0, gamma in 0.0f64..=90.0) {
        let (i_d, i_q) = dq_currents(i_s, gamma).unwrap();
        let norm = (i_d * i_d + i_q * i_q).sqrt();
        prop_assert!((norm - i_s).abs() <= 1e-9 * i_s.max(1e-300));
        prop_assert!(i_d <= 0.0 && i_q >= 0.0);
    }

    #[test]
    fn losses_non_negative_and_efficiency_bounded(t in 0.0f64..200.0, w in 0.0f64..600.0) {
        let m = MachineParams::t_prius();
        if let Ok(op) = trajectory_plan(&m, t, w) {
            let l = loss_model(&m, &op);
            prop_assert!(l.stator_core >= 0.0 && l.rotor_core >= 0.0 && l.copper >= 0.0 && l.mechanical >= 0.0);
            let eta = efficiency(&l, op.torque * op.omega_mech);
            prop_assert!((0.0..=1.0).contains(&eta));
            prop_assert!((0.0..=90.0).contains(&op.gamma));
        }
    }

    #[test]
    fn mtpa_is_stationary(t in 1.0f64..200.0) {
        let m = MachineParams { sat_iq: None, ..MachineParams::t_prius() };
        let op = mtpa_solve(&m, t).unwrap();
        if op.gamma > 1e-9 {
            prop_assert!(torque_gamma_gradient(&m, op.i_s, op.gamma).unwrap().abs() <= 1e-4);
        }
    }

    #[test]
    fn lhs_is_stratified(n in 2usize..60, dims in 1usize..9, seed in any::<u64>()) {
        let x = lhs_init(n, dims, seed).unwrap();
        prop_assert!(is_latin(&x));
        prop_assert!(x.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn lhs_optimisation_keeps_stratification(n in 2usize..20, dims in 1usize..5, seed in any::<u64>()) {
        let x = lhs_init(n, dims, seed).unwrap();
        let r = lhs_optimize(&x, 50, seed ^ 1, PHI_P, PHI_T).unwrap();
        prop_assert!(is_latin(&r.x));
        prop_assert!(r.phi_final() <= phi_p(&x, PHI_P, PHI_T).unwrap());
    }

    #[test]
    fn phi_p_ignores_sample_order(x in points(3..12, 3), seed in any::<u64>()) {
        let mut y = x.clone();
        let mut s = seed;
        for i in (1..y.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            y.swap(i, (s >> 33) as usize % (i + 1));
        }
        let (a, b) = (phi_p(&x, PHI_P, PHI_T).unwrap(), phi_p(&y, PHI_P, PHI_T).unwrap());
        prop_assert!(a == b || (a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn phi_p_drops_when_a_distance_grows(gap in 0.1f64..2.0, extra in 0.01f64..1.0) {
        let near = phi_p(&[vec![0.0, 0.0], vec![gap, 0.0]], 2.0, 1.0).unwrap();
        let far = phi_p(&[vec![0.0, 0.0], vec![gap + extra, 0.0]], 2.0, 1.0).unwrap();
        prop_assert!(far < near);
    }

    #[test]
    fn fronts_invariant_under_monotone_transforms(x in points(1..40, 2)) {
        let t: Vec<Vec<f64>> = x.iter().map(|p| vec![p[0].exp(), 3.0 * p[1] + 7.0]).collect();
        prop_assert_eq!(non_dominated_sort(&x), non_dominated_sort(&t));
    }

    #[test]
    fn first_front_is_mutually_non_dominating(x in points(1..40, 3)) {
        let fronts = non_dominated_sort(&x);
        prop_assert_eq!(fronts.iter().map(Vec::len).sum::<usize>(), x.len());
        for &i in &fronts[0] {
            for &j in &fronts[0] {
                prop_assert!(!dominates(&x[i], &x[j]));
            }
        }
    }

    #[test]
    fn hypervolume_grows_with_points(x in points(1..20, 2), extra in points(1..5, 2)) {
        let r = [6.0, 6.0];
        let mut more = x.clone();
        more.extend(extra);
        prop_assert!(hypervolume(&more, &r) >= hypervolume(&x, &r) - 1e-12);
    }

    #[test]
    fn gp_prediction_is_linear_in_targets(
        y1 in prop::collection::vec(-3.0f64..3.0, 6),
        y2 in prop::collection::vec(-3.0f64..3.0, 6),
        a in -2.0f64..2.0,
        q in 0.0f64..1.0,
    ) {
        let x: Vec<Vec<f64>> = (0..6).map(|k| vec![k as f64 / 5.0]).collect();
        let mix: Vec<f64> = y1.iter().zip(&y2).map(|(u, v)| u + a * v).collect();
        for mean in [MeanMode::Zero, MeanMode::Constant] {
            let f = |y: &[f64]| gp_with_params(&x, y, &[3.0], 1.0, 0.0, mean).unwrap().predict(&[q]);
            let lhs = f(&mix);
            let rhs = f(&y1) + a * f(&y2);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn torque_demand_is_non_negative(v in 0.0f64..60.0, a in -10.0f64..10.0, k in prop::option::of(0.0f64..1e-4)) {
        let vp = VehicleParams { k_rolling: k, ..Default::default() };
        prop_assert!(wheel_torque_demand(&vp, v, a) >= 0.0);
    }

    #[test]
    fn one_point_per_sample_pair(speeds in prop::collection::vec(0.0f64..40.0, 2..30)) {
        let samples: Vec<(f64, f64)> = speeds.iter().enumerate().map(|(k, v)| (k as f64 * 0.5, *v)).collect();
        let cycle = DriveCycle::new(samples).unwrap();
        let pts = cycle_operating_points(&VehicleParams::default(), &MachineParams::t_prius(), &cycle).unwrap();
        prop_assert_eq!(pts.len(), speeds.len() - 1);
    }

    #[test]
    fn flat_cg_removes_load_transfer(a in -5.0f64..5.0) {
        let vp = VehicleParams { h_cg: 0.0, ..Default::default() };
        prop_assert_eq!(axle_loads_accelerating(&vp, a), axle_loads_accelerating(&vp, 0.0));
    }

    #[test]
    fn drivability_monotone_in_torque_and_friction(
        t1 in 0.0f64..300.0, dt in 0.0f64..100.0, mu1 in 0.1f64..2.0, dmu in 0.0f64..1.0,
    ) {
        let base = VehicleParams::default();
        let lo = VehicleParams { t_m_max: t1, mu_max: mu1, ..base };
        let hi_t = VehicleParams { t_m_max: t1 + dt, ..lo };
        let hi_mu = VehicleParams { mu_max: mu1 + dmu, ..lo };
        let (a0, g0) = (max_acceleration(&lo).unwrap(), max_gradient(&lo).unwrap());
        for vp in [hi_t, hi_mu] {
            prop_assert!(max_acceleration(&vp).unwrap() >= a0 - 1e-6);
            prop_assert!(max_gradient(&vp).unwrap() >= g0 - 1e-6);
        }
    }

    #[test]
    fn premium_fraction_monotone_in_threshold(
        etas in prop::collection::vec(prop::option::of(0.0f64..1.0), 12),
        t1 in 0.0f64..1.0, t2 in 0.0f64..1.0,
    ) {
        prop_assume!(etas.iter().any(Option::is_some));
        let cells = etas
            .iter()
            .enumerate()
            .map(|(k, e)| {
                e.map(|eta| mlhr_opt::motor::OperatingPoint {
                    omega_mech: (k / 4) as f64,
                    torque: (k % 4) as f64,
                    i_s: 0.0, gamma: 0.0, i_d: 0.0, i_q: 0.0, v_d: 0.0, v_q: 0.0,
                    eta,
                })
            })
            .collect();
        let map = TorqueSpeedMap::from_cells(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0, 3.0], cells).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let pts: Vec<(f64, f64)> = (0..12).map(|k| ((k / 4) as f64, (k % 4) as f64)).collect();
        let a = premium_region_stats(&map, &pts, lo).unwrap();
        let b = premium_region_stats(&map, &pts, hi).unwrap();
        prop_assert!(b.area_fraction <= a.area_fraction);
        prop_assert!(b.count_in_premium <= a.count_in_premium);
        prop_assert!(a.count_in_premium <= pts.len());
    }
}
