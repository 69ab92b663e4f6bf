use pivotality::bernoulli::{identity_report_binomial, identity_report_negbin};
use pivotality::identities::{
    cpois_cdf_ode_residual, cpois_pmf_direct, cpois_pmf_panjer, cpois_pmf_polyrec, erlang_cdf,
    lattice_derivative_forms, poisson_tail, poisson_tail_integral, LatticeDistribution,
};
use serde_json::json;

use super::Context;
use crate::report::Row;

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn run(ctx: &Context) -> Vec<Row> {
    let cfg = &ctx.config.identities;
    let tol = ctx.config.tolerances;
    let mut rows = Vec::new();

    for &(n, k, p) in &cfg.binomial {
        rows.push(ctx.row("binomial_beta", json!({"n": n, "k": k, "p": p}), tol.exact_gap, |s, id, params| {
            let r = identity_report_binomial(n, k, p)?;
            Ok(Row::gap(s, id, params, r.tail, r.integral, tol.exact_gap))
        }));
    }
    for &(r, k, p) in &cfg.negbin {
        let params = json!({"r": r, "k": k, "p": p});
        rows.push(ctx.row("negbin_event_beta", params.clone(), tol.exact_gap, |s, id, params| {
            let rep = identity_report_negbin(r, k, p)?;
            Ok(Row::gap(s, id, params, rep.event_probability, rep.integral, tol.exact_gap))
        }));
        rows.push(ctx.row("negbin_sum_beta", params, tol.exact_gap, |s, id, params| {
            let rep = identity_report_negbin(r, k, p)?;
            Ok(Row::gap(s, id, params, rep.nb_sum_below_k, rep.integral, tol.exact_gap))
        }));
    }
    for &(theta, k) in &cfg.poisson_tail {
        rows.push(ctx.row("poisson_tail_gamma", json!({"theta": theta, "k": k}), tol.exact_gap, |s, id, params| {
            let lhs = poisson_tail(theta, k)?;
            let rhs = poisson_tail_integral(theta, k, 1e-14)?;
            Ok(Row::gap(s, id, params, lhs, rhs, tol.exact_gap))
        }));
    }
    for &(n, theta, x) in &cfg.erlang {
        rows.push(ctx.row("erlang_cdf", json!({"n": n, "theta": theta, "x": x}), tol.exact_gap, |s, id, params| {
            let e = erlang_cdf(n, theta, x)?;
            Ok(Row::with_gap(s, id, params, e.direct, e.via_poisson, e.max_gap(), tol.exact_gap))
        }));
    }

    let theta = cfg.compound_theta;
    let q = LatticeDistribution::new(cfg.compound_q.clone());
    for &k in &cfg.compound_k {
        let params = json!({"theta": theta, "q": cfg.compound_q, "k": k});
        rows.push(ctx.row("cpois_direct_vs_panjer", params.clone(), tol.relative_gap, |s, id, params| {
            let q = q.clone()?;
            let a = cpois_pmf_direct(theta, &q, k, 1e-17)?;
            let b = cpois_pmf_panjer(theta, &q, k)?;
            Ok(Row::with_gap(s, id, params, a, b, relative_gap(a, b), tol.relative_gap))
        }));
        rows.push(ctx.row("cpois_polyrec_vs_panjer", params.clone(), tol.relative_gap, |s, id, params| {
            let q = q.clone()?;
            let a = cpois_pmf_polyrec(theta, &q, k)?;
            let b = cpois_pmf_panjer(theta, &q, k)?;
            Ok(Row::with_gap(s, id, params, a, b, relative_gap(a, b), tol.relative_gap))
        }));
        rows.push(ctx.row("cpois_lattice_derivative", params, tol.exact_gap, |s, id, params| {
            let (a, b) = lattice_derivative_forms(theta, &q.clone()?, k)?;
            Ok(Row::gap(s, id, params, a, b, tol.exact_gap))
        }));
    }
    for &x in &cfg.ode_x {
        let params = json!({"theta": theta, "q": cfg.compound_q, "x": x, "delta": 1e-4});
        rows.push(ctx.row("cpois_cdf_ode", params, tol.ode_residual, |s, id, params| {
            let res = cpois_cdf_ode_residual(theta, &q.clone()?, x, 1e-4)?;
            Ok(Row::gap(s, id, params, res, 0.0, tol.ode_residual))
        }));
    }
    rows
}
