use std::cmp::Ordering;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dominance::{constrained_non_dominated_sort, crowding_distance, hypervolume};
use crate::motor::Bound;
use crate::numfmt::{round9, sig9};
use crate::sampling::{
    cluster_points, gp_fit_with, gp_with_params, lhs_init, lhs_optimize, local_candidates, ClusterOptions,
    GpOptions, GpSurrogate, MeanMode, PHI_P, PHI_T,
};
use crate::{Error, Result};

/// Objective and constraint values of one design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub objectives: Vec<f64>,
    /// Non-negative violations; all zero means feasible.
    pub violations: Vec<f64>,
}

/// A bounded, minimised multi-objective problem.
pub trait Problem: Sync {
    fn bounds(&self) -> Vec<Bound>;
    fn n_obj(&self) -> usize;
    /// Evaluates a design given in physical units.
    fn evaluate(&self, x: &[f64]) -> Result<Evaluation>;
    /// Hypervolume reference point, if the problem defines one.
    fn reference_point(&self) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Nsga2Config {
    pub pop_size: usize,
    pub max_generations: usize,
    pub p_crossover: f64,
    /// Per-variable polynomial-mutation probability.
    pub p_mutation: f64,
    /// Share of the next population reserved for the best parents.
    pub elitism_rate: f64,
    pub seed: u64,
    pub eta_crossover: f64,
    pub eta_mutation: f64,
    /// φ_p swap iterations applied to the initial Latin hypercube.
    pub lhs_iterations: usize,
    /// Stop once the archive hypervolume reaches this value.
    pub stop_at_hypervolume: Option<f64>,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Nsga2Config {
            pop_size: 100,
            max_generations: 100,
            p_crossover: 0.8,
            p_mutation: 0.33,
            elitism_rate: 0.55,
            seed: 0,
            eta_crossover: 15.0,
            eta_mutation: 20.0,
            lhs_iterations: 200,
            stop_at_hypervolume: None,
        }
    }
}

impl Nsga2Config {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("pop_size must be even and >= 2, got {}", self.pop_size)));
        }
        for (name, p) in [
            ("p_crossover", self.p_crossover),
            ("p_mutation", self.p_mutation),
            ("elitism_rate", self.elitism_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if !(self.eta_crossover >= 0.0 && self.eta_mutation >= 0.0) {
            return Err(Error::InvalidInput("distribution indices must be >= 0".into()));
        }
        Ok(())
    }
}

/// Settings of the surrogate-assisted sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlhrSamplerConfig {
    /// True evaluations per generation.
    pub batch: usize,
    /// Offspring generated per parent for surrogate screening.
    pub offspring_factor: usize,
    /// Local LHS candidates drawn in the clusters of the current front.
    pub local_candidates: usize,
    /// Maximum training-set size of each GP.
    pub max_training: usize,
    /// Generations between hyperparameter searches.
    pub refit_every: usize,
    pub gp: GpOptions,
    pub cluster: ClusterOptions,
}

impl Default for MlhrSamplerConfig {
    fn default() -> Self {
        MlhrSamplerConfig {
            batch: 20,
            offspring_factor: 5,
            local_candidates: 100,
            max_training: 160,
            refit_every: 5,
            gp: GpOptions { starts: 2, max_evals_per_start: 120, ..GpOptions::default() },
            cluster: ClusterOptions { min_width: 0.05, ..ClusterOptions::default() },
        }
    }
}

/// How new designs are proposed after the initial Latin hypercube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sampler {
    /// Every offspring is evaluated with the true function.
    PlainLhs,
    /// Offspring and local LHS candidates are screened by GP surrogates and
    /// only the most promising batch is evaluated.
    Mlhr(MlhrSamplerConfig),
}

/// One population member. `x` is in normalised coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub objectives: Vec<f64>,
    pub violations: Vec<f64>,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn total_violation(&self) -> f64 {
        self.violations.iter().sum()
    }

    pub fn feasible(&self) -> bool {
        self.total_violation() <= 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub generation: usize,
    pub true_evals: usize,
    pub hypervolume: f64,
    /// Smallest objective sum over feasible archive members.
    pub best_cost: f64,
}

/// Member of an emitted front, in physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub design: Vec<f64>,
    pub objectives: Vec<f64>,
    pub violations: Vec<f64>,
    pub rank: usize,
    pub crowding: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub generation: usize,
    pub members: Vec<FrontMember>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunOutput {
    pub front: ParetoFront,
    pub history: Vec<HistoryRow>,
    pub population: Vec<Individual>,
    /// Non-dominated feasible designs seen over the whole run.
    pub archive: Vec<Individual>,
}

impl RunOutput {
    pub fn true_evals(&self) -> usize {
        self.history.last().map_or(0, |h| h.true_evals)
    }

    /// First history row whose hypervolume reaches `target`.
    pub fn reached(&self, target: f64) -> Option<&HistoryRow> {
        self.history.iter().find(|h| h.hypervolume >= target)
    }
}

/// A run aborted by an evaluator error, with the history up to the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub history: Vec<HistoryRow>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "optimisation aborted after {} generations: {}", self.history.len(), self.error)
    }
}

impl std::error::Error for RunFailure {}

/// Writes `generation,true_evals,hypervolume,best_cost`.
pub fn write_history_csv<W: Write>(history: &[HistoryRow], mut w: W) -> Result<()> {
    writeln!(w, "generation,true_evals,hypervolume,best_cost")?;
    for h in history {
        writeln!(w, "{},{},{},{}", h.generation, h.true_evals, sig9(h.hypervolume), sig9(h.best_cost))?;
    }
    Ok(())
}

/// Front JSON with numbers rounded to 9 significant digits.
pub fn front_json(front: &ParetoFront) -> serde_json::Value {
    let r = |v: &[f64]| v.iter().map(|x| round9(*x)).collect::<Vec<_>>();
    let members: Vec<serde_json::Value> = front
        .members
        .iter()
        .map(|m| {
            serde_json::json!({
                "design": r(&m.design),
                "objectives": r(&m.objectives),
                "violations": r(&m.violations),
                "rank": m.rank,
                "crowding": m.crowding.filter(|c| c.is_finite()).map(round9),
            })
        })
        .collect();
    serde_json::json!({ "generation": front.generation, "members": members })
}

fn denorm(bounds: &[Bound], u: &[f64]) -> Vec<f64> {
    bounds.iter().zip(u).map(|(b, v)| b.denormalize(*v)).collect()
}

fn evaluate_all<P: Problem + ?Sized>(problem: &P, bounds: &[Bound], xs: Vec<Vec<f64>>) -> Result<Vec<Individual>> {
    let n_obj = problem.n_obj();
    let evals: Vec<Result<Evaluation>> = xs.par_iter().map(|u| problem.evaluate(&denorm(bounds, u))).collect();
    xs.into_iter()
        .zip(evals)
        .map(|(x, e)| {
            let e = e?;
            if e.objectives.len() != n_obj || e.objectives.iter().any(|v| !v.is_finite()) {
                return Err(Error::Evaluation(format!("expected {n_obj} finite objectives, got {:?}", e.objectives)));
            }
            if e.violations.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::Evaluation(format!("violations must be >= 0, got {:?}", e.violations)));
            }
            Ok(Individual { x, objectives: e.objectives, violations: e.violations, rank: 0, crowding: 0.0 })
        })
        .collect()
}

/// Assigns constrained rank and crowding distance in place; returns fronts.
fn rank_population(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let objs: Vec<Vec<f64>> = pop.iter().map(|p| p.objectives.clone()).collect();
    let viol: Vec<f64> = pop.iter().map(Individual::total_violation).collect();
    let fronts = constrained_non_dominated_sort(&objs, &viol);
    for (r, front) in fronts.iter().enumerate() {
        let f: Vec<Vec<f64>> = front.iter().map(|&i| objs[i].clone()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&f)) {
            pop[i].rank = r;
            pop[i].crowding = d;
        }
    }
    fronts
}

fn better(a: &Individual, b: &Individual) -> Ordering {
    a.rank.cmp(&b.rank).then(b.crowding.partial_cmp(&a.crowding).unwrap_or(Ordering::Equal))
}

/// Standard NSGA-II truncation of `pool` to `n` members.
fn survival(mut pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    if pool.len() <= n {
        return pool;
    }
    let fronts = rank_population(&mut pool);
    let mut chosen = Vec::with_capacity(n);
    for front in fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
        } else {
            let mut rest = front;
            rest.sort_by(|&a, &b| {
                pool[b].crowding.partial_cmp(&pool[a].crowding).unwrap_or(Ordering::Equal).then(a.cmp(&b))
            });
            chosen.extend(rest.into_iter().take(n - chosen.len()));
        }
        if chosen.len() == n {
            break;
        }
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| pool[i].clone()).collect()
}

/// Elitist replacement: the best `elitism_rate` share of the next
/// population comes from the ranked parents, the rest by standard
/// truncation of the remaining parents and the offspring.
fn next_population(parents: &[Individual], offspring: Vec<Individual>, n: usize, elitism_rate: f64) -> Vec<Individual> {
    let n_elite = ((elitism_rate * n as f64).round() as usize).min(parents.len()).min(n);
    let mut order: Vec<usize> = (0..parents.len()).collect();
    order.sort_by(|&a, &b| better(&parents[a], &parents[b]).then(a.cmp(&b)));
    let elite: Vec<Individual> = order[..n_elite].iter().map(|&i| parents[i].clone()).collect();
    let mut rest: Vec<Individual> = order[n_elite..].iter().map(|&i| parents[i].clone()).collect();
    rest.extend(offspring);
    let mut next = elite;
    next.extend(survival(rest, n - n_elite));
    rank_population(&mut next);
    next
}

fn tournament<'a, R: Rng>(pop: &'a [Individual], rng: &mut R) -> &'a Individual {
    let a = &pop[rng.random_range(0..pop.len())];
    let b = &pop[rng.random_range(0..pop.len())];
    if better(a, b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Simulated binary crossover on the unit box.
fn sbx<R: Rng>(p1: &[f64], p2: &[f64], eta: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for k in 0..p1.len() {
        if rng.random::<f64>() > 0.5 {
            continue;
        }
        let (y1, y2) = if p1[k] < p2[k] { (p1[k], p2[k]) } else { (p2[k], p1[k]) };
        if y2 - y1 < 1e-14 {
            continue;
        }
        let u: f64 = rng.random();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let bq1 = spread(1.0 + 2.0 * y1 / (y2 - y1));
        let bq2 = spread(1.0 + 2.0 * (1.0 - y2) / (y2 - y1));
        let a = (0.5 * ((y1 + y2) - bq1 * (y2 - y1))).clamp(0.0, 1.0);
        let b = (0.5 * ((y1 + y2) + bq2 * (y2 - y1))).clamp(0.0, 1.0);
        if rng.random::<f64>() < 0.5 {
            c1[k] = b;
            c2[k] = a;
        } else {
            c1[k] = a;
            c2[k] = b;
        }
    }
    (c1, c2)
}

/// Polynomial mutation on the unit box.
fn mutate<R: Rng>(x: &mut [f64], p: f64, eta: f64, rng: &mut R) {
    for v in x.iter_mut() {
        if rng.random::<f64>() >= p {
            continue;
        }
        let y = *v;
        let u: f64 = rng.random();
        let m = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let xy = 1.0 - y;
            (2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0)).powf(m) - 1.0
        } else {
            let xy = y;
            1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0)).powf(m)
        };
        *v = (y + dq).clamp(0.0, 1.0);
    }
}

fn make_offspring<R: Rng>(pop: &[Individual], count: usize, cfg: &Nsga2Config, rng: &mut R) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count + 1);
    while out.len() < count {
        let a = tournament(pop, rng);
        let b = tournament(pop, rng);
        let (mut c1, mut c2) = if rng.random::<f64>() < cfg.p_crossover {
            sbx(&a.x, &b.x, cfg.eta_crossover, rng)
        } else {
            (a.x.clone(), b.x.clone())
        };
        mutate(&mut c1, cfg.p_mutation, cfg.eta_mutation, rng);
        mutate(&mut c2, cfg.p_mutation, cfg.eta_mutation, rng);
        out.push(c1);
        out.push(c2);
    }
    out.truncate(count);
    out
}

/// Feasible non-dominated archive with monotone hypervolume.
struct Archive {
    members: Vec<Individual>,
    reference: Option<Vec<f64>>,
}

impl Archive {
    fn insert(&mut self, new: &[Individual]) {
        for ind in new.iter().filter(|i| i.feasible()) {
            let dominated = self.members.iter().any(|m| {
                super::dominance::dominates(&m.objectives, &ind.objectives) || m.objectives == ind.objectives
            });
            if dominated {
                continue;
            }
            self.members.retain(|m| !super::dominance::dominates(&ind.objectives, &m.objectives));
            self.members.push(ind.clone());
        }
    }

    fn hypervolume(&self) -> f64 {
        match &self.reference {
            Some(r) => {
                let pts: Vec<Vec<f64>> = self.members.iter().map(|m| m.objectives.clone()).collect();
                hypervolume(&pts, r)
            }
            None => 0.0,
        }
    }

    fn best_cost(&self) -> f64 {
        self.members.iter().map(|m| m.objectives.iter().sum::<f64>()).fold(f64::NAN, f64::min)
    }
}

/// Surrogate state of the MLHR sampler.
struct Screen {
    cfg: MlhrSamplerConfig,
    /// Every truly evaluated individual in evaluation order.
    evaluated: Vec<Individual>,
    /// (θ, σ²) per modelled column: objectives then total violation.
    hyper: Vec<Option<(Vec<f64>, f64)>>,
}

impl Screen {
    fn training_set(&self, pop: &[Individual]) -> Vec<Individual> {
        let mut set: Vec<Individual> = pop.to_vec();
        for ind in self.evaluated.iter().rev() {
            if set.len() >= self.cfg.max_training {
                break;
            }
            if !set.iter().any(|s| s.x == ind.x) {
                set.push(ind.clone());
            }
        }
        set
    }

    fn fit(&mut self, pop: &[Individual], generation: usize, constrained: bool) -> Result<Vec<GpSurrogate>> {
        let train = self.training_set(pop);
        let x: Vec<Vec<f64>> = train.iter().map(|t| t.x.clone()).collect();
        let n_obj = train[0].objectives.len();
        let n_cols = n_obj + usize::from(constrained);
        if self.hyper.len() != n_cols {
            self.hyper = vec![None; n_cols];
        }
        let refit = generation == 1 || self.cfg.refit_every == 0 || (generation - 1).is_multiple_of(self.cfg.refit_every);
        let mut models = Vec::with_capacity(n_cols);
        for j in 0..n_cols {
            let y: Vec<f64> = train
                .iter()
                .map(|t| if j < n_obj { t.objectives[j] } else { t.total_violation() })
                .collect();
            let model = match (&self.hyper[j], refit) {
                (Some((theta, s2)), false) => gp_with_params(&x, &y, theta, *s2, 0.0, MeanMode::Constant)
                    .or_else(|_| gp_with_params(&x, &y, theta, *s2, 1e-4 * s2.sqrt(), MeanMode::Constant)),
                (prev, _) => {
                    let init = prev.as_ref().map_or_else(|| vec![1.0; x[0].len()], |p| p.0.clone());
                    let opts = GpOptions { seed: generation as u64 * 31 + j as u64, ..self.cfg.gp.clone() };
                    gp_fit_with(&x, &y, &init, prev.as_ref().map(|p| p.1), 0.0, &opts)
                }
            }?;
            self.hyper[j] = Some((model.theta_h.clone(), model.sigma2));
            models.push(model);
        }
        Ok(models)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Picks `batch` candidates whose predicted objectives rank best against
/// the current population.
fn prescreen(
    pop: &[Individual],
    candidates: Vec<Vec<f64>>,
    models: &[GpSurrogate],
    n_obj: usize,
    batch: usize,
    seen: &[Individual],
) -> Vec<Vec<f64>> {
    let constrained = models.len() > n_obj;
    let mut pool: Vec<Individual> = pop.to_vec();
    let n_pop = pool.len();
    for x in candidates {
        if seen.iter().any(|s| dist2(&s.x, &x) < 1e-12) {
            continue;
        }
        let objectives: Vec<f64> = models[..n_obj].iter().map(|m| m.predict(&x)).collect();
        let violations = if constrained { vec![models[n_obj].predict(&x).max(0.0)] } else { Vec::new() };
        pool.push(Individual { x, objectives, violations, rank: 0, crowding: 0.0 });
    }
    rank_population(&mut pool);
    let mut order: Vec<usize> = (n_pop..pool.len()).collect();
    order.sort_by(|&a, &b| better(&pool[a], &pool[b]).then(a.cmp(&b)));
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(batch);
    for i in order {
        if chosen.len() == batch {
            break;
        }
        if chosen.iter().any(|c| dist2(c, &pool[i].x) < 1e-12) {
            continue;
        }
        chosen.push(pool[i].x.clone());
    }
    chosen
}

fn to_front(bounds: &[Bound], members: &[Individual], generation: usize, with_crowding: bool) -> ParetoFront {
    ParetoFront {
        generation,
        members: members
            .iter()
            .map(|m| FrontMember {
                design: denorm(bounds, &m.x),
                objectives: m.objectives.clone(),
                violations: m.violations.clone(),
                rank: m.rank,
                crowding: with_crowding.then_some(m.crowding),
            })
            .collect(),
    }
}

/// Runs constrained NSGA-II.
///
/// Generation 0 is a φ_p-optimised Latin hypercube of `pop_size` designs;
/// the same seed gives the same initial population for both samplers.
/// Evaluation fans out over the rayon pool and is merged by index, so a run
/// is reproducible for a given seed.
pub fn nsga2_run<P: Problem + ?Sized>(
    problem: &P,
    cfg: &Nsga2Config,
    sampler: &Sampler,
) -> std::result::Result<RunOutput, RunFailure> {
    let mut history = Vec::new();
    let fail = |error: Error, history: &Vec<HistoryRow>| RunFailure { error, history: history.clone() };
    cfg.validate().map_err(|e| fail(e, &history))?;
    let bounds = problem.bounds();
    let n_var = bounds.len();
    if n_var == 0 || problem.n_obj() == 0 {
        return Err(fail(Error::InvalidInput("problem needs variables and objectives".into()), &history));
    }
    let n = cfg.pop_size;
    let x0 = lhs_init(n, n_var, cfg.seed)
        .and_then(|x| lhs_optimize(&x, cfg.lhs_iterations, cfg.seed ^ 0x5EED, PHI_P, PHI_T))
        .map(|o| o.x)
        .map_err(|e| fail(e, &history))?;
    let mut pop = evaluate_all(problem, &bounds, x0).map_err(|e| fail(e, &history))?;
    rank_population(&mut pop);
    let constrained = pop.iter().any(|p| !p.violations.is_empty());
    let mut archive = Archive { members: Vec::new(), reference: problem.reference_point() };
    archive.insert(&pop);
    let mut true_evals = n;
    let record = |generation: usize, true_evals: usize, archive: &Archive, history: &mut Vec<HistoryRow>| {
        let row = HistoryRow {
            generation,
            true_evals,
            hypervolume: archive.hypervolume(),
            best_cost: archive.best_cost(),
        };
        log::debug!("generation {generation}: evals {true_evals}, hv {:.6}", row.hypervolume);
        history.push(row);
        row
    };
    let mut last = record(0, true_evals, &archive, &mut history);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut screen = match sampler {
        Sampler::Mlhr(c) => Some(Screen { cfg: c.clone(), evaluated: pop.clone(), hyper: Vec::new() }),
        Sampler::PlainLhs => None,
    };
    let mut generation = 0;
    while generation < cfg.max_generations {
        if cfg.stop_at_hypervolume.is_some_and(|t| last.hypervolume >= t) {
            break;
        }
        generation += 1;
        let xs = match screen.as_mut() {
            None => make_offspring(&pop, n, cfg, &mut rng),
            Some(s) => {
                let models = s.fit(&pop, generation, constrained).map_err(|e| fail(e, &history))?;
                let mut candidates = make_offspring(&pop, n * s.cfg.offspring_factor.max(1), cfg, &mut rng);
                if s.cfg.local_candidates > 0 {
                    let front: Vec<Vec<f64>> = pop.iter().filter(|p| p.rank == 0).map(|p| p.x.clone()).collect();
                    let global = vec![(0.0, 1.0); n_var];
                    let clusters = cluster_points(&front, &global, &s.cfg.cluster).map_err(|e| fail(e, &history))?;
                    candidates.extend(local_candidates(&clusters.boxes, s.cfg.local_candidates, &mut rng));
                }
                prescreen(&pop, candidates, &models, problem.n_obj(), s.cfg.batch, &s.evaluated)
            }
        };
        let offspring = evaluate_all(problem, &bounds, xs).map_err(|e| fail(e, &history))?;
        true_evals += offspring.len();
        archive.insert(&offspring);
        if let Some(s) = screen.as_mut() {
            s.evaluated.extend(offspring.iter().cloned());
        }
        pop = next_population(&pop, offspring, n, cfg.elitism_rate);
        last = record(generation, true_evals, &archive, &mut history);
    }
    let front_members: Vec<Individual> = pop.iter().filter(|p| p.rank == 0).cloned().collect();
    Ok(RunOutput {
        front: to_front(&bounds, &front_members, generation, true),
        history,
        population: pop,
        archive: archive.members,
    })
}

/// Archive as an emitted front (all rank 0).
pub fn archive_front<P: Problem + ?Sized>(problem: &P, out: &RunOutput) -> ParetoFront {
    to_front(&problem.bounds(), &out.archive, out.front.generation, false)
}
