use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Axis-aligned box, one `(lo, hi)` pair per dimension.
pub type LocalBox = Vec<(f64, f64)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterOptions {
    /// DBSCAN core-point threshold, counting the point itself.
    pub min_pts: usize,
    /// Relative growth of each cluster's bounding box.
    pub inflate: f64,
    /// Smallest box width per dimension after inflation.
    pub min_width: f64,
    /// Candidate percentiles of the pairwise-distance distribution.
    pub percentiles: Vec<f64>,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            min_pts: 2,
            inflate: 0.1,
            min_width: 0.0,
            percentiles: (1..=19).map(|k| 5.0 * k as f64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    /// Neighbourhood radius that was selected.
    pub d_m: f64,
    /// Percentile the radius came from (`None` for fewer than two points).
    pub percentile: Option<f64>,
    /// Cluster index per point; noise points get singleton clusters.
    pub labels: Vec<usize>,
    pub n_clusters: usize,
    /// Inflated, clipped bounding box per cluster.
    pub boxes: Vec<LocalBox>,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Density-based clustering; `None` marks noise.
pub fn dbscan(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| euclid(&points[i], &points[j]) <= eps).collect())
        .collect();
    let core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_pts).collect();
    let mut labels = vec![None; n];
    let mut next = 0;
    for start in 0..n {
        if labels[start].is_some() || !core[start] {
            continue;
        }
        labels[start] = Some(next);
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &q in &neighbours[p] {
                if labels[q].is_none() {
                    labels[q] = Some(next);
                    if core[q] {
                        stack.push(q);
                    }
                }
            }
        }
        next += 1;
    }
    labels
}

/// Linear-interpolated percentile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = (q / 100.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

fn with_singletons(raw: &[Option<usize>]) -> (Vec<usize>, usize) {
    let mut next = raw.iter().flatten().max().map_or(0, |m| m + 1);
    let labels = raw
        .iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    (labels, next)
}

fn inflate_box(pts: &[&Vec<f64>], global: &[(f64, f64)], opts: &ClusterOptions) -> LocalBox {
    global
        .iter()
        .enumerate()
        .map(|(k, &(g_lo, g_hi))| {
            let lo = pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            let centre = 0.5 * (lo + hi);
            let half = (0.5 * (hi - lo) * (1.0 + opts.inflate)).max(0.5 * opts.min_width);
            ((centre - half).max(g_lo), (centre + half).min(g_hi))
        })
        .collect()
}

/// Clusters `points` and returns local bounds inside `global`.
///
/// The radius is the smallest candidate percentile of the pairwise distances
/// whose cluster count matches the next candidate's.
pub fn cluster_points(points: &[Vec<f64>], global: &[(f64, f64)], opts: &ClusterOptions) -> Result<Clustering> {
    if points.is_empty() {
        return Err(Error::InvalidInput("no points to cluster".into()));
    }
    if points.iter().any(|p| p.len() != global.len()) {
        return Err(Error::InvalidInput("point dimension does not match bounds".into()));
    }
    let n = points.len();
    let mut dists: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| euclid(&points[i], &points[j]))
        .collect();
    let floor = 1e-12;
    let (d_m, pct, labels, n_clusters) = if dists.is_empty() {
        (floor, None, vec![0], 1)
    } else {
        dists.sort_by(f64::total_cmp);
        let runs: Vec<(f64, f64, Vec<usize>, usize)> = opts
            .percentiles
            .iter()
            .map(|&q| {
                let eps = percentile(&dists, q).max(floor);
                let (labels, count) = with_singletons(&dbscan(points, eps, opts.min_pts));
                (q, eps, labels, count)
            })
            .collect();
        let pick = runs.windows(2).position(|w| w[0].3 == w[1].3).unwrap_or(runs.len() - 1);
        let (q, eps, labels, count) = runs[pick].clone();
        (eps, Some(q), labels, count)
    };
    let boxes = (0..n_clusters)
        .map(|c| {
            let members: Vec<&Vec<f64>> = points.iter().zip(&labels).filter(|(_, l)| **l == c).map(|(p, _)| p).collect();
            inflate_box(&members, global, opts)
        })
        .collect();
    Ok(Clustering { d_m, percentile: pct, labels, n_clusters, boxes })
}
