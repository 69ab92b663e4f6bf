//! Run configuration: a single JSON document.
//!
//! ```json
//! {
//!   "seed": 42,
//!   "reps": 20000,
//!   "tolerances": { "z": 4.0 },
//!   "suites": ["identities", "crofton"],
//!   "crofton": { "shape": { "kind": "polygon", "vertices": [[0,0],[1,0],[0,1]] }, "h": "const:1", "t": 0.5, "m": 10 }
//! }
//! ```
//!
//! Every block is optional; missing fields take the defaults below. Unknown
//! keys are rejected so that typos do not silently fall back to defaults.

use std::path::Path;

use pivotality::geometry::ConvexBody;
use pivotality::process::{AxisBox, Ball, Density, Region, Statistic};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::ConfigError;

pub const SUITES: [&str; 5] = ["identities", "russo", "poisson-derivative", "stable", "crofton"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub suites: Option<Vec<String>>,
    #[serde(default)]
    pub identities: IdentitiesConfig,
    #[serde(default)]
    pub russo: RussoConfig,
    #[serde(default, rename = "poisson-derivative")]
    pub poisson_derivative: PoissonDerivativeConfig,
    #[serde(default)]
    pub stable: StableConfig,
    #[serde(default)]
    pub crofton: CroftonConfig,
}

fn default_reps() -> usize {
    20_000
}

impl Default for Config {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

/// Pass thresholds. `z` applies to Monte Carlo rows (`|z| ≤ z`), the others
/// to absolute or relative gaps of deterministic rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub exact_gap: f64,
    pub relative_gap: f64,
    pub ode_residual: f64,
    pub quadrature_gap: f64,
    pub closed_form_gap: f64,
    pub ks_gap: f64,
    pub z: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact_gap: 1e-10,
            relative_gap: 1e-12,
            ode_residual: 1e-5,
            quadrature_gap: 1e-5,
            closed_form_gap: 1e-8,
            ks_gap: 0.02,
            z: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesConfig {
    /// `(n, k, p)`
    pub binomial: Vec<(u32, u32, f64)>,
    /// `(r, k, p)`
    pub negbin: Vec<(u32, u32, f64)>,
    /// `(θ, k)`
    pub poisson_tail: Vec<(f64, u64)>,
    /// `(n, θ, x)`
    pub erlang: Vec<(u64, f64, f64)>,
    /// Jump law `q_0, q_1, …` of the compound Poisson checks.
    pub compound_q: Vec<f64>,
    pub compound_theta: f64,
    pub compound_k: Vec<usize>,
    pub ode_x: Vec<f64>,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        Self {
            binomial: vec![(10, 3, 0.3), (20, 7, 0.5), (30, 15, 0.9)],
            negbin: vec![(1, 1, 0.5), (3, 4, 0.4), (8, 5, 0.7)],
            poisson_tail: vec![(0.7, 2), (2.5, 3), (12.0, 9)],
            erlang: vec![(1, 2.0, 0.5), (3, 2.0, 1.5), (10, 1.0, 10.0)],
            compound_q: vec![0.1, 0.5, 0.0, 0.4],
            compound_theta: 2.5,
            compound_k: vec![3, 10, 25],
            ode_x: vec![2.5, 7.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RussoConfig {
    pub m: usize,
    pub thetas: Vec<f64>,
    /// Number of random monotone DNF events (drawn from the run seed).
    pub dnf_events: usize,
}

impl Default for RussoConfig {
    fn default() -> Self {
        Self { m: 10, thetas: vec![0.2, 0.5, 0.8], dnf_events: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoissonDerivativeConfig {
    pub reps: Option<usize>,
    /// Intensity multiplier of Lebesgue measure on the unit square.
    pub theta: f64,
    /// Upper corner of the box `B = [0, b₁] × [0, b₂]` whose void event is tested.
    pub void_box: [f64; 2],
    pub series_thetas: Vec<f64>,
    pub kmax: usize,
    pub higher_order: usize,
}

impl Default for PoissonDerivativeConfig {
    fn default() -> Self {
        Self {
            reps: None,
            theta: 1.0,
            void_box: [0.5, 0.5],
            series_thetas: vec![0.25, 0.5, 1.0],
            kmax: 8,
            higher_order: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StableConfig {
    pub reps: Option<usize>,
    pub theta: f64,
    /// Points of the closed-form half-stable checks.
    pub xs: Vec<f64>,
    pub ks_samples: usize,
    /// Point of the Monte Carlo one-dimensional check.
    pub mc_x: f64,
    pub trunc_tol: f64,
    /// `(α, dimension, θ, r)` of the radial check with an axis-symmetric spectral measure.
    pub radvec: (f64, usize, f64, f64),
}

impl Default for StableConfig {
    fn default() -> Self {
        Self {
            reps: None,
            theta: 1.0,
            xs: vec![0.5, 1.0, 2.0, 5.0],
            ks_samples: 10_000,
            mc_x: 1.0,
            trunc_tol: 1e-8,
            radvec: (0.8, 2, 1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CroftonConfig {
    pub reps: Option<usize>,
    pub shape: ConvexBody,
    /// Intensity density: `const:c` or `gauss:c,s` for `c·exp(−s|x|²)`.
    pub h: String,
    pub t: f64,
    pub m: usize,
    pub delta: f64,
    pub poisson_statistic: String,
    pub binomial_statistic: String,
}

impl Default for CroftonConfig {
    fn default() -> Self {
        Self {
            reps: None,
            shape: ConvexBody::disk(vec![0.0, 0.0], 1.0).expect("unit disk"),
            h: "const:1".into(),
            t: 0.5,
            m: 5,
            delta: 1e-2,
            poisson_statistic: "count".into(),
            binomial_statistic: "count_in_disk:0,0,0.5".into(),
        }
    }
}

fn numbers(spec: &str, args: &str, n: usize) -> Result<Vec<f64>, ConfigError> {
    let v: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ConfigError::Spec(spec.to_string()))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(ConfigError::Spec(spec.to_string()));
    }
    Ok(v)
}

/// Parses `const:c` or `gauss:c,s`.
pub fn parse_density(spec: &str) -> Result<Density, ConfigError> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| ConfigError::Spec(spec.to_string()))?;
    match kind {
        "const" => {
            let c = numbers(spec, args, 1)?[0];
            if c < 0.0 {
                return Err(ConfigError::Spec(spec.to_string()));
            }
            Ok(Density::constant(c))
        }
        "gauss" => {
            let v = numbers(spec, args, 2)?;
            let (c, s) = (v[0], v[1]);
            if c < 0.0 || s < 0.0 {
                return Err(ConfigError::Spec(spec.to_string()));
            }
            Ok(Density::new(spec, c, move |x: &[f64]| c * (-s * x.iter().map(|v| v * v).sum::<f64>()).exp()))
        }
        _ => Err(ConfigError::Spec(spec.to_string())),
    }
}

/// Parses `count`, or `count_in_<region>`, `hit_<region>`, `void_<region>`
/// with region `disk:cx,cy,r` or `box:x0,y0,x1,y1`.
pub fn parse_statistic(spec: &str) -> Result<Statistic, ConfigError> {
    if spec == "count" {
        return Ok(Statistic::count());
    }
    let (head, args) = spec.split_once(':').ok_or_else(|| ConfigError::Spec(spec.to_string()))?;
    let (kind, region) = head.rsplit_once('_').ok_or_else(|| ConfigError::Spec(spec.to_string()))?;
    let region: Arc<dyn Region> = match region {
        "disk" => {
            let v = numbers(spec, args, 3)?;
            Arc::new(Ball::new(vec![v[0], v[1]], v[2]).map_err(|_| ConfigError::Spec(spec.to_string()))?)
        }
        "box" => {
            let v = numbers(spec, args, 4)?;
            Arc::new(AxisBox::new(vec![v[0], v[1]], vec![v[2], v[3]]).map_err(|_| ConfigError::Spec(spec.to_string()))?)
        }
        _ => return Err(ConfigError::Spec(spec.to_string())),
    };
    match kind {
        "count_in" => Ok(Statistic::count_in(region)),
        "hit" => Ok(Statistic::hit(region)),
        "void" => Ok(Statistic::void(region)),
        _ => Err(ConfigError::Spec(spec.to_string())),
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &'static str, v: usize| if v == 0 { Err(ConfigError::Invalid(name, "must be positive".into())) } else { Ok(()) };
        positive("reps", self.reps)?;
        for (name, r) in [
            ("poisson-derivative.reps", self.poisson_derivative.reps),
            ("stable.reps", self.stable.reps),
            ("crofton.reps", self.crofton.reps),
        ] {
            if let Some(r) = r {
                positive(name, r)?;
            }
        }
        if let Some(suites) = &self.suites {
            for s in suites {
                check_suite(s)?;
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.exact_gap", t.exact_gap),
            ("tolerances.relative_gap", t.relative_gap),
            ("tolerances.ode_residual", t.ode_residual),
            ("tolerances.quadrature_gap", t.quadrature_gap),
            ("tolerances.closed_form_gap", t.closed_form_gap),
            ("tolerances.ks_gap", t.ks_gap),
            ("tolerances.z", t.z),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(name, format!("{v} must be positive")));
            }
        }
        let c = &self.crofton;
        parse_density(&c.h)?;
        parse_statistic(&c.poisson_statistic)?;
        parse_statistic(&c.binomial_statistic)?;
        if !(c.t >= 0.0 && c.t.is_finite()) {
            return Err(ConfigError::Invalid("crofton.t", "must be finite and non-negative".into()));
        }
        if !(c.delta > 0.0) {
            return Err(ConfigError::Invalid("crofton.delta", "must be positive".into()));
        }
        positive("crofton.m", c.m)?;
        if c.shape.dim() != 2 {
            return Err(ConfigError::Invalid("crofton.shape", "the runner's statistics are planar".into()));
        }
        positive("russo.m", self.russo.m)?;
        if self.russo.m > 20 {
            return Err(ConfigError::Invalid("russo.m", "at most 20".into()));
        }
        positive("stable.ks_samples", self.stable.ks_samples)?;
        positive("poisson-derivative.higher_order", self.poisson_derivative.higher_order)?;
        Ok(())
    }

    pub fn reps_for(&self, suite_override: Option<usize>) -> usize {
        suite_override.unwrap_or(self.reps)
    }
}

pub fn check_suite(name: &str) -> Result<(), ConfigError> {
    if SUITES.contains(&name) {
        Ok(())
    } else {
        Err(ConfigError::UnknownSuite(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let bad = |s: &str| serde_json::from_str::<Config>(s).map_err(|e| ConfigError::Parse(e.to_string())).and_then(|c| c.validate());
        assert!(matches!(bad(r#"{"reps":0}"#), Err(ConfigError::Invalid("reps", _))));
        assert!(matches!(bad(r#"{"suites":["nope"]}"#), Err(ConfigError::UnknownSuite(_))));
        assert!(matches!(bad(r#"{"crofton":{"shape":{"kind":"polygon","vertices":[[0,0],[0,1],[1,0]]}}}"#), Err(ConfigError::Parse(_))));
        assert!(matches!(bad(r#"{"crofton":{"shape":{"kind":"hexagon"}}}"#), Err(ConfigError::Parse(_))));
        assert!(matches!(bad(r#"{"sead":1}"#), Err(ConfigError::Parse(_))));
        assert!(matches!(bad(r#"{"crofton":{"h":"const:-1"}}"#), Err(ConfigError::Spec(_))));
    }

    #[test]
    fn spec_strings() {
        assert_eq!(parse_density("gauss:2,0.5").unwrap().eval(&[0.0, 0.0]), 2.0);
        assert!(parse_density("const").is_err());
        let g = parse_statistic("hit_box:0,0,1,1").unwrap();
        assert!(g.is_indicator());
        assert!(parse_statistic("count_in_disk:0,0").is_err());
        assert!(parse_statistic("median").is_err());
    }
}
