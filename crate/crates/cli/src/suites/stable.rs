use pivotality::numerics::{replicate, EmpiricalCdf};
use pivotality::stable::{
    alphadens1_residual, dimone_residual, half_stable_cdf, radvec_residual, DimoneMethod, LePageSampler,
    SpectralMeasure, StableParams,
};
use serde_json::json;

use super::Context;
use crate::report::Row;

pub fn run(ctx: &Context) -> Vec<Row> {
    let cfg = &ctx.config.stable;
    let tol = ctx.config.tolerances;
    let reps = ctx.config.reps_for(cfg.reps);
    let theta = cfg.theta;
    let mut rows = Vec::new();

    let params = json!({"alpha": 0.5, "theta": theta, "samples": cfg.ks_samples, "trunc_tol": cfg.trunc_tol});
    rows.push(ctx.row("half_stable_sup_distance", params, tol.ks_gap, |s, id, params| {
        let p = StableParams::new(0.5, SpectralMeasure::positive_half_line(theta)?)?;
        let sampler = LePageSampler::with_tol(&p, cfg.trunc_tol)?;
        let xs = replicate(&ctx.stream(0), cfg.ks_samples, |rng| sampler.sample(rng)[0]);
        let d = EmpiricalCdf::new(xs)?.sup_distance(|x| half_stable_cdf(theta, x));
        Ok(Row::with_gap(s, id, params, d, 0.0, d, tol.ks_gap))
    }));

    for &x in &cfg.xs {
        let params = json!({"alpha": 0.5, "theta": theta, "x": x});
        rows.push(ctx.row("dimone_closed_form", params.clone(), tol.closed_form_gap, |s, id, params| {
            let r = dimone_residual(0.5, theta, x, &DimoneMethod::ClosedFormHalf { tol: 1e-10 })?;
            Ok(Row::gap(s, id, params, r.lhs, r.rhs, tol.closed_form_gap))
        }));
        rows.push(ctx.row("alphadens1_closed_form", params, tol.closed_form_gap, |s, id, params| {
            let r = alphadens1_residual(0.5, theta, x, 1e-10)?;
            Ok(Row::gap(s, id, params, r.lhs, r.rhs, tol.closed_form_gap))
        }));
    }

    let x = cfg.mc_x;
    let params = json!({"alpha": 0.5, "theta": theta, "x": x, "reps": reps, "trunc_tol": cfg.trunc_tol});
    rows.push(ctx.row("dimone_monte_carlo", params, tol.z, |s, id, params| {
        let method =
            DimoneMethod::MonteCarlo { reps, stream: ctx.stream(1), trunc_tol: cfg.trunc_tol, half_width: None };
        let r = dimone_residual(0.5, theta, x, &method)?;
        Ok(Row::z(s, id, params, r.lhs, r.stderr, r.rhs, 0.0, tol.z))
    }));

    let (alpha, dim, rv_theta, r) = cfg.radvec;
    let params = json!({"alpha": alpha, "dim": dim, "theta": rv_theta, "r": r, "reps": reps, "trunc_tol": cfg.trunc_tol});
    rows.push(ctx.row("radvec", params, tol.z, |s, id, params| {
        let p = StableParams::new(alpha, SpectralMeasure::axis_symmetric(dim, rv_theta)?)?;
        let rep = radvec_residual(&p, r, reps, &ctx.stream(2), cfg.trunc_tol, None)?;
        Ok(Row::z(s, id, params, rep.lhs, rep.residual.stderr, rep.rhs, 0.0, tol.z))
    }));
    rows
}
