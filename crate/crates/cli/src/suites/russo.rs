use pivotality::bernoulli::{event_polynomial, russo_derivative, BooleanEvent};
use pivotality::numerics::splitmix64;
use serde_json::json;

use super::Context;
use crate::report::Row;

/// Three clauses of three distinct coordinates each, drawn from `state`.
fn random_clauses(m: usize, mut state: u64) -> Vec<u32> {
    let width = 3.min(m);
    (0..3)
        .map(|_| {
            let mut clause = 0u32;
            while (clause.count_ones() as usize) < width {
                state = splitmix64(state);
                clause |= 1 << (state % m as u64);
            }
            clause
        })
        .collect()
}

pub fn run(ctx: &Context) -> Vec<Row> {
    let cfg = &ctx.config.russo;
    let tol = ctx.config.tolerances.exact_gap;
    let m = cfg.m;
    let mut events = vec![BooleanEvent::at_least(m, m.div_ceil(2)), BooleanEvent::all_ones(m)];
    let base = ctx.stream(0).child_seed();
    for i in 0..cfg.dnf_events {
        events.push(BooleanEvent::monotone_dnf(m, random_clauses(m, base ^ splitmix64(i as u64))));
    }

    let mut rows = Vec::new();
    for event in events {
        for &theta in &cfg.thetas {
            let name = event.as_ref().map(|e| e.name().to_string()).unwrap_or_default();
            let params = json!({"event": name, "m": m, "theta": theta});
            rows.push(ctx.row("russo_vs_polynomial", params, tol, |s, id, params| {
                let event = event.clone()?;
                let lhs = russo_derivative(&event, theta)?;
                let rhs = event_polynomial(&event)?.derivative(theta);
                Ok(Row::gap(s, id, params, lhs, rhs, tol))
            }));
        }
    }
    rows
}
