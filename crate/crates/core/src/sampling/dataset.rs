use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::motor::Bound;
use crate::numfmt::sig9;
use crate::{Error, Result};

/// Normalised design samples with their responses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    /// Rows in `[0, 1]^n`.
    pub x: Vec<Vec<f64>>,
    /// One response row per sample.
    pub y: Vec<Vec<f64>>,
    /// Physical bounds per input dimension.
    pub bounds: Vec<Bound>,
    /// Refinement generation `k`.
    pub generation: usize,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>, bounds: Vec<Bound>) -> Result<Self> {
        let d = Dataset { x, y, bounds, generation: 0 };
        d.validate()?;
        Ok(d)
    }

    /// Bounds `[0, 1]` in every dimension.
    pub fn unit_bounds(dims: usize) -> Vec<Bound> {
        vec![Bound { min: 0.0, max: 1.0 }; dims]
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.is_empty() {
            return Err(Error::InvalidInput("dataset needs at least one sample".into()));
        }
        if self.x.len() != self.y.len() {
            return Err(Error::InvalidInput(format!("{} inputs but {} responses", self.x.len(), self.y.len())));
        }
        let n = self.bounds.len();
        if self.x.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("every sample needs {n} coordinates")));
        }
        let nr = self.y[0].len();
        if self.y.iter().any(|r| r.len() != nr) {
            return Err(Error::InvalidInput("ragged response matrix".into()));
        }
        if self.x.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput("normalised samples must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_responses(&self) -> usize {
        self.y.first().map_or(0, Vec::len)
    }

    pub fn response(&self, j: usize) -> Vec<f64> {
        self.y.iter().map(|r| r[j]).collect()
    }

    pub fn push(&mut self, x: Vec<f64>, y: Vec<f64>) {
        self.x.push(x);
        self.y.push(y);
    }

    /// Physical coordinates of row `i`.
    pub fn denormalized(&self, i: usize) -> Vec<f64> {
        denormalize(&self.bounds, &self.x[i])
    }

    /// CSV with header `x1..xn,y1..ynr` and 9 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (1..=self.dims())
            .map(|k| format!("x{k}"))
            .chain((1..=self.n_responses()).map(|k| format!("y{k}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (x, y) in self.x.iter().zip(&self.y) {
            let row: Vec<String> = x.iter().chain(y).map(|v| sig9(*v)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`Dataset::write_csv`]; bounds default to the
    /// unit interval.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
        };
        let cols: Vec<&str> = header.trim().split(',').collect();
        let nx = cols.iter().take_while(|c| c.starts_with('x')).count();
        let ny = cols.len() - nx;
        let well_formed = cols[..nx].iter().enumerate().all(|(k, c)| *c == format!("x{}", k + 1))
            && cols[nx..].iter().enumerate().all(|(k, c)| *c == format!("y{}", k + 1));
        if nx == 0 || !well_formed {
            return Err(Error::Parse { line: 1, message: format!("expected header x1..xn,y1..ynr, got '{header}'") });
        }
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line.trim().split(',').map(|s| s.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
            if vals.len() != nx + ny {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} fields, got {}", nx + ny, vals.len()),
                });
            }
            xs.push(vals[..nx].to_vec());
            ys.push(vals[nx..].to_vec());
        }
        Dataset::new(xs, ys, Dataset::unit_bounds(nx))
    }
}

pub fn denormalize(bounds: &[Bound], u: &[f64]) -> Vec<f64> {
    bounds.iter().zip(u).map(|(b, v)| b.denormalize(*v)).collect()
}
