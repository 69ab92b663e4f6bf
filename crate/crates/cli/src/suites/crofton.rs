use std::f64::consts::PI;

use pivotality::geometry::{crofton_binomial_check, crofton_poisson_check, steiner_derivative_check};
use serde_json::json;

use super::Context;
use crate::config::{parse_density, parse_statistic};
use crate::report::Row;

/// FD step of the quadrature-backed Steiner check.
const STEINER_DELTA: f64 = 1e-3;

pub fn run(ctx: &Context) -> Vec<Row> {
    let cfg = &ctx.config.crofton;
    let tol = ctx.config.tolerances;
    let reps = ctx.config.reps_for(cfg.reps);
    let body = &cfg.shape;
    let t = cfg.t;
    // Both were validated with the config.
    let h = parse_density(&cfg.h).expect("validated density");
    let base = json!({"shape": body, "h": cfg.h, "t": t});
    let with = |extra: serde_json::Value| {
        let mut p = base.clone();
        if let (Some(p), Some(e)) = (p.as_object_mut(), extra.as_object()) {
            p.extend(e.clone());
        }
        p
    };
    let mut rows = Vec::new();

    if t > 0.0 || body.is_full_dimensional() {
        rows.push(ctx.row("boundary_length", with(json!({})), tol.exact_gap, |s, id, params| {
            let len = body.boundary_integral(t, |_| 1.0)?;
            let steiner = body.perimeter().unwrap_or(f64::NAN) + 2.0 * PI * t;
            Ok(Row::gap(s, id, params, len, steiner, tol.exact_gap))
        }));
    }
    if t >= STEINER_DELTA {
        let params = with(json!({"delta": STEINER_DELTA}));
        rows.push(ctx.row("steiner_derivative", params, tol.quadrature_gap, |s, id, params| {
            let c = steiner_derivative_check(body, |x| h.eval(x), t, STEINER_DELTA)?;
            Ok(Row::gap(s, id, params, c.fd_value, c.boundary_value, tol.quadrature_gap))
        }));
    }

    let params = with(json!({"statistic": cfg.poisson_statistic, "reps": reps, "delta": cfg.delta}));
    rows.push(ctx.row("poisson_crofton", params, tol.z, |s, id, params| {
        let g = parse_statistic(&cfg.poisson_statistic).expect("validated statistic");
        let r = crofton_poisson_check(&g, body, &h, t, reps, cfg.delta, &ctx.stream(0))?;
        Ok(Row::z(s, id, params, r.lhs_fd, r.lhs_stderr, r.rhs, r.rhs_stderr, tol.z))
    }));
    if body.is_full_dimensional() {
        let params = with(json!({"statistic": cfg.binomial_statistic, "m": cfg.m, "reps": reps, "delta": cfg.delta}));
        rows.push(ctx.row("binomial_crofton", params, tol.z, |s, id, params| {
            let g = parse_statistic(&cfg.binomial_statistic).expect("validated statistic");
            let r = crofton_binomial_check(&g, body, &h, t, cfg.m, reps, cfg.delta, &ctx.stream(1))?;
            Ok(Row::z(s, id, params, r.lhs_fd, r.lhs_stderr, r.rhs, r.rhs_stderr, tol.z))
        }));
    }
    rows
}
