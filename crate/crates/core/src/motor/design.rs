use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::machine::MachineParams;
use crate::{Error, Result};

/// The eight controllable magnet-sizing variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DesignVariable {
    MagnetWidth,
    MagnetThickness,
    MagnetLength,
    WindowWidth,
    SeparationGap,
    CavityArc1,
    CavityArc2,
    CavityArc3,
}

impl DesignVariable {
    pub const ALL: [DesignVariable; 8] = [
        DesignVariable::MagnetWidth,
        DesignVariable::MagnetThickness,
        DesignVariable::MagnetLength,
        DesignVariable::WindowWidth,
        DesignVariable::SeparationGap,
        DesignVariable::CavityArc1,
        DesignVariable::CavityArc2,
        DesignVariable::CavityArc3,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DesignVariable::MagnetWidth => "W_m",
            DesignVariable::MagnetThickness => "T_m",
            DesignVariable::MagnetLength => "L_m",
            DesignVariable::WindowWidth => "W_w1",
            DesignVariable::SeparationGap => "W_g",
            DesignVariable::CavityArc1 => "alpha_m1",
            DesignVariable::CavityArc2 => "alpha_m2",
            DesignVariable::CavityArc3 => "alpha_m3",
        }
    }
}

impl fmt::Display for DesignVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DesignVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DesignVariable::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown design variable '{s}'")))
    }
}

/// One value per design variable. Lengths in mm, arcs in mechanical degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerVariable<T> {
    #[serde(rename = "W_m")]
    pub w_m: T,
    #[serde(rename = "T_m")]
    pub t_m: T,
    #[serde(rename = "L_m")]
    pub l_m: T,
    #[serde(rename = "W_w1")]
    pub w_w1: T,
    #[serde(rename = "W_g")]
    pub w_g: T,
    pub alpha_m1: T,
    pub alpha_m2: T,
    pub alpha_m3: T,
}

impl<T: Copy> PerVariable<T> {
    pub fn splat(v: T) -> Self {
        Self::from_array([v; 8])
    }

    pub fn to_array(&self) -> [T; 8] {
        [
            self.w_m,
            self.t_m,
            self.l_m,
            self.w_w1,
            self.w_g,
            self.alpha_m1,
            self.alpha_m2,
            self.alpha_m3,
        ]
    }

    pub fn from_array(a: [T; 8]) -> Self {
        PerVariable {
            w_m: a[0],
            t_m: a[1],
            l_m: a[2],
            w_w1: a[3],
            w_g: a[4],
            alpha_m1: a[5],
            alpha_m2: a[6],
            alpha_m3: a[7],
        }
    }

    pub fn get(&self, var: DesignVariable) -> T {
        self.to_array()[var.index()]
    }

    pub fn set(&mut self, var: DesignVariable, value: T) {
        let mut a = self.to_array();
        a[var.index()] = value;
        *self = Self::from_array(a);
    }
}

/// Closed interval `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub min: f64,
    pub max: f64,
}

impl Bound {
    pub const fn new(min: f64, max: f64) -> Self {
        Bound { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }

    /// Maps a unit-interval coordinate into the bound.
    pub fn denormalize(&self, u: f64) -> f64 {
        self.min + u * self.width()
    }

    pub fn normalize(&self, v: f64) -> f64 {
        if self.width() > 0.0 {
            (v - self.min) / self.width()
        } else {
            0.0
        }
    }
}

/// Magnet-sizing design: values, bounds and per-variable noise std-dev.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    #[serde(flatten)]
    pub values: PerVariable<f64>,
    pub bounds: PerVariable<Bound>,
    pub noise: PerVariable<f64>,
}

impl DesignVector {
    /// Sizing ranges of the modified V rotors. `W_g` and the cavity arcs have
    /// no published range; these are configurable defaults.
    pub fn default_bounds() -> PerVariable<Bound> {
        PerVariable {
            w_m: Bound::new(14.0, 25.0),
            t_m: Bound::new(2.0, 7.16),
            l_m: Bound::new(45.0, 50.0),
            w_w1: Bound::new(0.2, 1.2),
            w_g: Bound::new(0.5, 2.0),
            alpha_m1: Bound::new(30.0, 42.0),
            alpha_m2: Bound::new(30.0, 42.0),
            alpha_m3: Bound::new(30.0, 42.0),
        }
    }

    /// The reference (Prius) rotor.
    pub fn t_prius() -> Self {
        DesignVector {
            values: PerVariable {
                w_m: 17.88,
                t_m: 7.16,
                l_m: 50.0,
                w_w1: 0.7,
                w_g: 1.0,
                alpha_m1: 36.15,
                alpha_m2: 35.94,
                alpha_m3: 36.05,
            },
            bounds: Self::default_bounds(),
            noise: PerVariable::splat(0.0),
        }
    }

    /// Same bounds and noise, different values.
    pub fn with_values(&self, values: PerVariable<f64>) -> Self {
        DesignVector { values, ..*self }
    }

    /// Builds a design from unit-hypercube coordinates.
    pub fn from_unit(&self, u: &[f64]) -> Self {
        let b = self.bounds.to_array();
        let mut v = [0.0; 8];
        for i in 0..8 {
            v[i] = b[i].denormalize(u[i]);
        }
        self.with_values(PerVariable::from_array(v))
    }

    pub fn to_unit(&self) -> [f64; 8] {
        let b = self.bounds.to_array();
        let v = self.values.to_array();
        let mut u = [0.0; 8];
        for i in 0..8 {
            u[i] = b[i].normalize(v[i]);
        }
        u
    }

    pub fn within_bounds(&self) -> bool {
        self.values
            .to_array()
            .iter()
            .zip(self.bounds.to_array())
            .all(|(v, b)| b.contains(*v))
    }

    /// Draws additive noise offsets `N(0, noise²)` per variable.
    pub fn draw_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> PerVariable<f64> {
        let mut out = [0.0; 8];
        for (o, sd) in out.iter_mut().zip(self.noise.to_array()) {
            if sd > 0.0 {
                // sd > 0 and finite, so Normal::new cannot fail
                *o = Normal::new(0.0, sd).map(|n| n.sample(rng)).unwrap_or(0.0);
            }
        }
        PerVariable::from_array(out)
    }
}

/// Magnet volume per pole (cm³) for `blocks_per_pole` identical blocks.
pub fn magnet_volume(d: &DesignVector, blocks_per_pole: u32) -> Result<f64> {
    if !(1..=2).contains(&blocks_per_pole) {
        return Err(Error::Domain(format!("blocks per pole must be 1 or 2, got {blocks_per_pole}")));
    }
    let v = &d.values;
    Ok(f64::from(blocks_per_pole) * v.w_m * v.t_m * v.l_m / 1000.0)
}

/// Outcome of mapping a design to machine parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum DesignEvaluation {
    Feasible(MachineParams),
    Infeasible(String),
}

impl DesignEvaluation {
    pub fn machine(&self) -> Option<&MachineParams> {
        match self {
            DesignEvaluation::Feasible(m) => Some(m),
            DesignEvaluation::Infeasible(_) => None,
        }
    }
}

/// Closed-form geometry → electrical-parameter map anchored at a reference design.
///
/// * `λ_m = λ_ref · (W_m·L_m)/(W_m,ref·L_m,ref) · r(T_m)/r(T_m,ref) · k(W_g)/k(W_g,ref)`
///   with the reluctance divider `r(T) = T/(T + g_eq)` and the inter-magnet
///   leakage factor `k(W) = 1 − c_leak·exp(−W/w_leak)`.
/// * `L_d = L_d,ref·(1 + a_d·Δα + b_d·ΔW)`, `L_q = L_q,ref·(1 + a_q·Δα + b_q·ΔW)`
///   with `Δα` the relative change of the mean cavity arc and `ΔW` the window
///   width change in mm.
///
/// Every factor is exactly 1 at the reference design, so the reference maps
/// bit-exactly onto the reference machine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignModel {
    pub reference_design: PerVariable<f64>,
    pub reference_machine: MachineParams,
    /// Equivalent magnetic gap in magnet-thickness units (mm).
    pub g_eq: f64,
    pub leak_c: f64,
    pub leak_width: f64,
    pub ld_arc_coeff: f64,
    pub ld_window_coeff: f64,
    pub lq_arc_coeff: f64,
    pub lq_window_coeff: f64,
}

impl Default for DesignModel {
    fn default() -> Self {
        DesignModel {
            reference_design: DesignVector::t_prius().values,
            reference_machine: MachineParams::t_prius(),
            g_eq: 1.5,
            leak_c: 0.2,
            leak_width: 0.5,
            ld_arc_coeff: -0.4,
            ld_window_coeff: 0.05,
            lq_arc_coeff: 0.6,
            lq_window_coeff: -0.2,
        }
    }
}

fn mean_arc(v: &PerVariable<f64>) -> f64 {
    (v.alpha_m1 + v.alpha_m2 + v.alpha_m3) / 3.0
}

impl DesignModel {
    fn reluctance_divider(&self, t_m: f64) -> f64 {
        t_m / (t_m + self.g_eq)
    }

    fn leakage_factor(&self, w_g: f64) -> f64 {
        1.0 - self.leak_c * (-w_g / self.leak_width).exp()
    }

    /// PM flux linkage (Wb) of a geometry, without bounds handling.
    pub fn pm_flux_linkage(&self, v: &PerVariable<f64>) -> f64 {
        let r = &self.reference_design;
        let area = (v.w_m * v.l_m) / (r.w_m * r.l_m);
        let divider = self.reluctance_divider(v.t_m) / self.reluctance_divider(r.t_m);
        let leakage = self.leakage_factor(v.w_g) / self.leakage_factor(r.w_g);
        self.reference_machine.lambda_m0 * area * divider * leakage
    }

    /// `(L_d, L_q)` unsaturated inductances (H) of a geometry.
    pub fn inductances(&self, v: &PerVariable<f64>) -> (f64, f64) {
        let r = &self.reference_design;
        let arc_ref = mean_arc(r);
        let d_arc = (mean_arc(v) - arc_ref) / arc_ref;
        let d_window = v.w_w1 - r.w_w1;
        let m = &self.reference_machine;
        let ld = m.ld0 * (1.0 + self.ld_arc_coeff * d_arc + self.ld_window_coeff * d_window);
        let lq = m.lq0 * (1.0 + self.lq_arc_coeff * d_arc + self.lq_window_coeff * d_window);
        (ld, lq)
    }

    /// Applies additive noise (clamped to bounds) and maps the design to a machine.
    pub fn evaluate(&self, d: &DesignVector, noise_draw: &PerVariable<f64>) -> DesignEvaluation {
        let bounds = d.bounds.to_array();
        if let Some(b) = bounds.iter().find(|b| !(b.min <= b.max)) {
            return DesignEvaluation::Infeasible(format!("empty bound [{}, {}]", b.min, b.max));
        }
        let raw = d.values.to_array();
        let offsets = noise_draw.to_array();
        let mut v = [0.0; 8];
        for i in 0..8 {
            let x = raw[i] + offsets[i];
            if !x.is_finite() {
                return DesignEvaluation::Infeasible(format!(
                    "{} is not finite",
                    DesignVariable::ALL[i]
                ));
            }
            v[i] = bounds[i].clamp(x);
        }
        let values = PerVariable::from_array(v);
        let (ld, lq) = self.inductances(&values);
        let m = MachineParams {
            lambda_m0: self.pm_flux_linkage(&values),
            ld0: ld,
            lq0: lq,
            ..self.reference_machine
        };
        match m.validate() {
            Ok(()) => DesignEvaluation::Feasible(m),
            Err(e) => DesignEvaluation::Infeasible(e.to_string()),
        }
    }
}

/// [`DesignModel::evaluate`] with the default reference model.
pub fn evaluate_design(d: &DesignVector, noise_draw: &PerVariable<f64>) -> DesignEvaluation {
    DesignModel::default().evaluate(d, noise_draw)
}
