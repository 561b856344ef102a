use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cluster::{cluster_points, ClusterOptions, Clustering, LocalBox};
use super::dataset::{denormalize, Dataset};
use super::gp::{gp_fit_with, GpOptions, GpSurrogate};
use super::lhs::lhs_with_rng;
use super::svr::{svr_fit, SvrSurrogate};
use crate::optimizer::non_dominated_sort;
use crate::{Error, Result};

/// True-response function in physical units.
pub trait Evaluator: Sync {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self(x)
    }
}

/// Dataset plus the current Pareto set and local sampling boxes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefinementState {
    pub dataset: Dataset,
    /// Normalised Pareto-optimal samples `X*_k` (all responses minimised).
    pub pareto: Vec<Vec<f64>>,
    /// Local sampling boxes in normalised coordinates.
    pub local_bounds: Vec<LocalBox>,
    /// Clustering radius from the last refinement.
    pub d_m: f64,
    /// Warm-start kernel parameters per response.
    pub theta: Vec<Vec<f64>>,
}

impl RefinementState {
    pub fn new(dataset: Dataset) -> Result<Self> {
        dataset.validate()?;
        let dims = dataset.dims();
        let n_r = dataset.n_responses();
        let mut s = RefinementState {
            dataset,
            pareto: Vec::new(),
            local_bounds: vec![vec![(0.0, 1.0); dims]],
            d_m: 1.0,
            theta: vec![vec![1.0; dims]; n_r],
        };
        s.update_pareto();
        Ok(s)
    }

    pub fn generation(&self) -> usize {
        self.dataset.generation
    }

    /// Recomputes `X*_k` from the responses.
    pub fn update_pareto(&mut self) {
        let fronts = non_dominated_sort(&self.dataset.y);
        self.pareto = fronts.first().map_or_else(Vec::new, |f| f.iter().map(|&i| self.dataset.x[i].clone()).collect());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlhrOptions {
    pub gp: GpOptions,
    pub cluster: ClusterOptions,
    /// Fit an SVR next to every GP.
    pub svr: bool,
    pub svr_lambda: f64,
    /// Tube width as a fraction of the response's standard deviation.
    pub svr_epsilon_rel: f64,
    pub seed: u64,
}

impl Default for MlhrOptions {
    fn default() -> Self {
        MlhrOptions {
            gp: GpOptions { starts: 2, max_evals_per_start: 150, ..GpOptions::default() },
            cluster: ClusterOptions { min_width: 0.05, ..ClusterOptions::default() },
            svr: true,
            svr_lambda: 100.0,
            svr_epsilon_rel: 0.01,
            seed: 0,
        }
    }
}

/// Surrogates of every response column.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurrogateSet {
    pub gp: Vec<GpSurrogate>,
    pub svr: Vec<Option<SvrSurrogate>>,
}

impl SurrogateSet {
    pub fn predict_gp(&self, x: &[f64]) -> Vec<f64> {
        self.gp.iter().map(|g| g.predict(x)).collect()
    }
}

fn std_dev(y: &[f64]) -> f64 {
    let m = y.len() as f64;
    let mean = y.iter().sum::<f64>() / m;
    (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m).sqrt()
}

/// Fits one GP (and optionally one SVR) per response of the state's dataset.
pub fn fit_surrogates(state: &mut RefinementState, opts: &MlhrOptions) -> Result<SurrogateSet> {
    let d = &state.dataset;
    let mut gps = Vec::with_capacity(d.n_responses());
    let mut svrs = Vec::with_capacity(d.n_responses());
    for j in 0..d.n_responses() {
        let y = d.response(j);
        let gp_opts = GpOptions { seed: opts.seed ^ (j as u64) ^ ((d.generation as u64) << 16), ..opts.gp.clone() };
        let gp = gp_fit_with(&d.x, &y, &state.theta[j], None, 0.0, &gp_opts)?;
        state.theta[j] = gp.theta_h.clone();
        let svr = if opts.svr {
            let eps = opts.svr_epsilon_rel * std_dev(&y);
            match svr_fit(&d.x, &y, opts.svr_lambda, eps, &gp.theta_h) {
                Ok(s) => Some(s),
                Err(e) => {
                    log::warn!("SVR fit for response {} failed: {e}", j + 1);
                    None
                }
            }
        } else {
            None
        };
        gps.push(gp);
        svrs.push(svr);
    }
    Ok(SurrogateSet { gp: gps, svr: svrs })
}

/// Clusters the Pareto set and stores the resulting local boxes.
pub fn cluster_refine(state: &mut RefinementState, opts: &ClusterOptions) -> Result<Clustering> {
    if state.pareto.is_empty() {
        return Err(Error::InvalidInput("Pareto set is empty".into()));
    }
    let global = vec![(0.0, 1.0); state.dataset.dims()];
    let c = cluster_points(&state.pareto, &global, opts)?;
    state.local_bounds = c.boxes.clone();
    state.d_m = c.d_m;
    Ok(c)
}

/// `n` Latin-hypercube points inside a box (a single uniform point for `n = 1`).
pub fn lhs_in_box<R: Rng + ?Sized>(n: usize, bx: &[(f64, f64)], rng: &mut R) -> Vec<Vec<f64>> {
    let unit = match n {
        0 => return Vec::new(),
        1 => vec![(0..bx.len()).map(|_| rng.random::<f64>()).collect()],
        _ => lhs_with_rng(n, bx.len(), rng).expect("n >= 2 and dims >= 1"),
    };
    unit.into_iter()
        .map(|u| u.iter().zip(bx).map(|(v, (lo, hi))| lo + v * (hi - lo)).collect())
        .collect()
}

/// Splits `batch` candidates across the local boxes and draws them by LHS.
pub fn local_candidates<R: Rng + ?Sized>(boxes: &[LocalBox], batch: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let c = boxes.len().max(1);
    let mut out = Vec::with_capacity(batch);
    for (k, bx) in boxes.iter().enumerate() {
        let share = batch / c + usize::from(k < batch % c);
        out.extend(lhs_in_box(share, bx, rng));
    }
    out
}

/// What one refinement step did.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub generation: usize,
    pub evaluated: usize,
    pub dropped: usize,
    pub clusters: usize,
    /// Absolute GP prediction error per new sample and response.
    pub gp_errors: Vec<Vec<f64>>,
    /// Absolute SVR prediction error, where an SVR was fitted.
    pub svr_errors: Vec<Vec<Option<f64>>>,
}

impl IterationReport {
    /// Median GP error over all new samples and responses.
    pub fn median_gp_error(&self) -> Option<f64> {
        median(self.gp_errors.iter().flatten().copied().collect())
    }

    pub fn median_svr_error(&self) -> Option<f64> {
        median(self.svr_errors.iter().flatten().flatten().copied().collect())
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Evaluates candidates (in parallel) and keeps results in candidate order.
/// Failed candidates are dropped and logged.
pub fn evaluate_candidates<E: Evaluator + ?Sized>(
    evaluator: &E,
    bounds: &[crate::motor::Bound],
    candidates: Vec<Vec<f64>>,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let results: Vec<Result<Vec<f64>>> =
        candidates.par_iter().map(|u| evaluator.evaluate(&denormalize(bounds, u))).collect();
    candidates
        .into_iter()
        .zip(results)
        .enumerate()
        .filter_map(|(i, (u, r))| match r {
            Ok(y) if y.iter().all(|v| v.is_finite()) => Some((u, y)),
            Ok(_) => {
                log::warn!("candidate {i} returned non-finite responses; dropped");
                None
            }
            Err(e) => {
                log::warn!("candidate {i} failed: {e}; dropped");
                None
            }
        })
        .collect()
}

/// One local refinement step: fit surrogates on `D^k`, cluster the Pareto
/// set, draw `batch` LHS candidates inside the cluster boxes, evaluate them,
/// record the surrogates' errors on them and append to the dataset.
pub fn mlhr_iterate<E: Evaluator + ?Sized>(
    state: &mut RefinementState,
    evaluator: &E,
    batch: usize,
    opts: &MlhrOptions,
) -> Result<IterationReport> {
    let generation = state.dataset.generation + 1;
    if batch == 0 {
        state.dataset.generation = generation;
        return Ok(IterationReport { generation, ..Default::default() });
    }
    let surrogates = fit_surrogates(state, opts)?;
    let clustering = cluster_refine(state, &opts.cluster)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(generation as u64).wrapping_mul(0x9E37_79B9));
    let candidates = local_candidates(&state.local_bounds, batch, &mut rng);
    let n_candidates = candidates.len();
    let evaluated = evaluate_candidates(evaluator, &state.dataset.bounds, candidates);
    if let Some((_, y)) = evaluated.first() {
        if y.len() != state.dataset.n_responses() {
            return Err(Error::Evaluation(format!(
                "evaluator returned {} responses, dataset has {}",
                y.len(),
                state.dataset.n_responses()
            )));
        }
    }
    let mut report = IterationReport {
        generation,
        evaluated: evaluated.len(),
        dropped: n_candidates - evaluated.len(),
        clusters: clustering.n_clusters,
        ..Default::default()
    };
    for (u, y) in evaluated {
        let gp_err = surrogates.gp.iter().zip(&y).map(|(g, t)| (g.predict(&u) - t).abs()).collect();
        let svr_err = surrogates
            .svr
            .iter()
            .zip(&y)
            .map(|(s, t)| s.as_ref().map(|s| (s.predict(&u) - t).abs()))
            .collect();
        report.gp_errors.push(gp_err);
        report.svr_errors.push(svr_err);
        state.dataset.push(u, y);
    }
    state.dataset.generation = generation;
    state.update_pareto();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::lhs::lhs_init;

    fn zdt1_2d(x: &[f64]) -> Result<Vec<f64>> {
        let g = 1.0 + 9.0 * x[1];
        Ok(vec![x[0], g * (1.0 - (x[0] / g).sqrt())])
    }

    fn initial(n: usize, seed: u64) -> RefinementState {
        let x = lhs_init(n, 2, seed).unwrap();
        let y = x.iter().map(|r| zdt1_2d(r).unwrap()).collect();
        RefinementState::new(Dataset::new(x, y, Dataset::unit_bounds(2)).unwrap()).unwrap()
    }

    #[test]
    fn zero_batch_only_advances_generation() {
        let mut s = initial(10, 1);
        let before = s.dataset.clone();
        let r = mlhr_iterate(&mut s, &zdt1_2d, 0, &MlhrOptions::default()).unwrap();
        assert_eq!(r.generation, 1);
        assert_eq!(s.dataset.x, before.x);
        assert_eq!(s.dataset.generation, 1);
    }

    #[test]
    fn dataset_grows_by_batch() {
        let mut s = initial(12, 2);
        for k in 1..=5 {
            let r = mlhr_iterate(&mut s, &zdt1_2d, 10, &MlhrOptions::default()).unwrap();
            assert_eq!(r.generation, k);
            assert_eq!(s.dataset.len(), 12 + 10 * k);
        }
        for b in &s.local_bounds {
            assert!(b.iter().all(|(lo, hi)| 0.0 <= *lo && lo <= hi && *hi <= 1.0));
        }
    }

    #[test]
    fn failures_are_dropped() {
        let mut s = initial(10, 3);
        let flaky = |x: &[f64]| -> Result<Vec<f64>> {
            if x[0] < 0.5 {
                Err(Error::Evaluation("solver diverged".into()))
            } else {
                zdt1_2d(x)
            }
        };
        let r = mlhr_iterate(&mut s, &flaky, 8, &MlhrOptions::default()).unwrap();
        assert_eq!(r.evaluated + r.dropped, 8);
        assert_eq!(s.dataset.len(), 10 + r.evaluated);
    }

    #[test]
    fn candidates_split_across_boxes() {
        let boxes = vec![vec![(0.0, 0.1)], vec![(0.5, 0.6)], vec![(0.9, 1.0)]];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = local_candidates(&boxes, 7, &mut rng);
        assert_eq!(c.len(), 7);
        assert_eq!(c.iter().filter(|p| p[0] <= 0.1).count(), 3);
        assert_eq!(c.iter().filter(|p| p[0] >= 0.9).count(), 2);
    }
}
