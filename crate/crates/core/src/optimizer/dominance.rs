use std::cmp::Ordering;

/// `a` Pareto-dominates `b` (minimisation).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Constrained dominance: feasible beats infeasible, smaller total violation
/// wins among infeasible, Pareto dominance among feasible.
pub fn constrained_dominates(a: &[f64], va: f64, b: &[f64], vb: f64) -> bool {
    match (va > 0.0, vb > 0.0) {
        (false, true) => true,
        (true, false) => false,
        (true, true) => va < vb,
        (false, false) => dominates(a, b),
    }
}

fn sort_by_relation(n: usize, dom: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dom(i, j) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dom(j, i) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Fast non-dominated sorting; indices within a front are ascending.
pub fn non_dominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    sort_by_relation(points.len(), |i, j| dominates(&points[i], &points[j]))
}

/// Non-dominated sorting under constrained dominance.
pub fn constrained_non_dominated_sort(points: &[Vec<f64>], violations: &[f64]) -> Vec<Vec<usize>> {
    sort_by_relation(points.len(), |i, j| {
        constrained_dominates(&points[i], violations[i], &points[j], violations[j])
    })
}

/// Crowding distance of each member of one front; boundary members get `+∞`.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let n_obj = front[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..n_obj {
        order.sort_by(|&a, &b| front[a][k].partial_cmp(&front[b][k]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if !(span > 0.0) {
            continue;
        }
        for w in 1..n - 1 {
            let gap = front[order[w + 1]][k] - front[order[w - 1]][k];
            dist[order[w]] += gap / span;
        }
    }
    dist
}

/// Volume dominated by `points` and bounded by `reference` (minimisation).
/// Points that do not strictly dominate the reference contribute nothing.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let pts: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .cloned()
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    match reference.len() {
        0 => 0.0,
        1 => reference[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => hv2(pts, reference),
        _ => hv_slice(pts, reference),
    }
}

fn hv2(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut vol = 0.0;
    let mut best_y = r[1];
    for p in &pts {
        if p[1] < best_y {
            vol += (r[0] - p[0]) * (best_y - p[1]);
            best_y = p[1];
        }
    }
    vol
}

/// Slices along the last objective and recurses on the rest.
fn hv_slice(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    let d = r.len();
    pts.sort_by(|a, b| a[d - 1].total_cmp(&b[d - 1]));
    let mut vol = 0.0;
    for i in 0..pts.len() {
        let top = if i + 1 < pts.len() { pts[i + 1][d - 1] } else { r[d - 1] };
        let height = top - pts[i][d - 1];
        if height <= 0.0 {
            continue;
        }
        let proj: Vec<Vec<f64>> = pts[..=i].iter().map(|p| p[..d - 1].to_vec()).collect();
        vol += hypervolume(&proj, &r[..d - 1]) * height;
    }
    vol
}
