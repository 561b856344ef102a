use crate::motor::{DesignVariable, DesignVector};
use crate::{Error, Result};

/// One-at-a-time sweep of `variable` across its bounds with every other
/// variable held at `fixed`. Returns `(value, responses)` in ascending order.
pub fn sensitivity_sweep<F>(
    evaluator: F,
    variable: DesignVariable,
    n_points: usize,
    fixed: &DesignVector,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(&DesignVector) -> Result<Vec<f64>>,
{
    if n_points < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 sweep points, got {n_points}")));
    }
    let b = fixed.bounds.get(variable);
    if !(b.min.is_finite() && b.max.is_finite() && b.min <= b.max) {
        return Err(Error::InvalidInput(format!("{variable} has no finite bounds")));
    }
    (0..n_points)
        .map(|k| {
            let v = if k + 1 == n_points { b.max } else { b.denormalize(k as f64 / (n_points - 1) as f64) };
            let mut values = fixed.values;
            values.set(variable, v);
            Ok((v, evaluator(&fixed.with_values(values))?))
        })
        .collect()
}
