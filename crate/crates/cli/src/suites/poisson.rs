use std::sync::Arc;

use pivotality::perturbation::{
    derivative_location_estimator, derivative_point_estimator, higher_derivative_estimator, perturbation_series,
};
use pivotality::process::{AxisBox, IntensityMeasure, Region, Statistic};
use serde_json::json;

use super::Context;
use crate::report::Row;

/// `g = 1{η(B) = 0}` for Poisson processes on the unit square, where
/// `E g(η_{θλ}) = exp(−θ|B|)`.
pub fn run(ctx: &Context) -> Vec<Row> {
    let cfg = &ctx.config.poisson_derivative;
    let z = ctx.config.tolerances.z;
    let reps = ctx.config.reps_for(cfg.reps);
    let theta = cfg.theta;
    let [b1, b2] = cfg.void_box;
    let area = b1 * b2;
    let base = json!({"theta": theta, "void_box": cfg.void_box, "reps": reps});
    let with = |extra: serde_json::Value| {
        let mut p = base.clone();
        if let (Some(p), Some(e)) = (p.as_object_mut(), extra.as_object()) {
            p.extend(e.clone());
        }
        p
    };
    let setup = || -> pivotality::Result<(Statistic, IntensityMeasure)> {
        let b: Arc<dyn Region> = Arc::new(AxisBox::new(vec![0.0, 0.0], vec![b1, b2])?);
        let lambda = IntensityMeasure::uniform(Arc::new(AxisBox::unit(2)), 1.0)?;
        Ok((Statistic::void(b), lambda))
    };
    let exact_derivative = -area * (-theta * area).exp();

    let mut rows = Vec::new();
    rows.push(ctx.row("location_derivative", with(json!({})), z, |s, id, params| {
        let (g, lambda) = setup()?;
        let d = derivative_location_estimator(&g, &lambda, theta, reps, &ctx.stream(0))?;
        Ok(Row::z(s, id, params, d.derivative.mean, d.derivative.stderr, exact_derivative, 0.0, z))
    }));
    rows.push(ctx.row("mecke_point_derivative", with(json!({})), z, |s, id, params| {
        let (g, lambda) = setup()?;
        let d = derivative_point_estimator(&g, &lambda, theta, reps, &ctx.stream(1))?;
        let se = d.plus.stderr.hypot(d.minus.stderr);
        Ok(Row::z(s, id, params, d.plus.mean - d.minus.mean, se, exact_derivative, 0.0, z))
    }));
    let k = cfg.higher_order;
    rows.push(ctx.row("higher_derivative", with(json!({"k": k})), z, |s, id, params| {
        let (g, lambda) = setup()?;
        let d = higher_derivative_estimator(&g, &lambda, theta, k, reps, &ctx.stream(2))?;
        let exact = (-area).powi(k as i32) * (-theta * area).exp();
        Ok(Row::z(s, id, params, d.mean, d.stderr, exact, 0.0, z))
    }));
    for (i, &shift) in cfg.series_thetas.iter().enumerate() {
        let params = with(json!({"shift": shift, "kmax": cfg.kmax}));
        rows.push(ctx.row("perturbation_series", params, z, |s, id, params| {
            let (g, unit) = setup()?;
            let lambda = unit.scaled(theta)?;
            let est = perturbation_series(&g, &lambda, &unit, shift, cfg.kmax, None, reps, &ctx.stream(3 + i as u64))?;
            let exact = (-(theta + shift) * area).exp();
            Ok(Row::z(s, id, params, est.estimate.mean, est.estimate.stderr, exact, 0.0, z))
        }));
    }
    rows
}
