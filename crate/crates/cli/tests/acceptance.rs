//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Seeds are fixed up front (`SEED`, then one stream per criterion) so every
//! line is reproducible.

use std::error::Error;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use pivotality::bernoulli::{
    event_polynomial, identity_report_binomial, identity_report_negbin, negative_binomial_pmf, russo_derivative,
    BooleanEvent,
};
use pivotality::geometry::{crofton_binomial_check, crofton_poisson_check, ConvexBody};
use pivotality::identities::{
    cpois_cdf_ode_residual, cpois_pmf_direct, cpois_pmf_panjer_all, cpois_pmf_polyrec, erlang_cdf, poisson_tail,
    poisson_tail_integral, LatticeDistribution,
};
use pivotality::numerics::{ks_two_sample, replicate, splitmix64, z_score, EmpiricalCdf, RngStream};
use pivotality::perturbation::{derivative_location_estimator, derivative_point_estimator, perturbation_series};
use pivotality::process::{AxisBox, Ball, Density, IntensityMeasure, Region, Statistic};
use pivotality::stable::{
    alphadens1_residual, dimone_residual, half_stable_cdf, levy_integral, radvec_residual, DimoneMethod, Envelope,
    LePageSampler, SpectralMeasure, StableParams,
};

const SEED: u64 = 20_240_601;

type Outcome = Result<(bool, String), Box<dyn Error>>;

fn stream(criterion: u64) -> RngStream {
    RngStream::derive(SEED, criterion)
}

/// Deterministic generator for random test cases.
struct Cases(u64);

impl Cases {
    fn new(criterion: u64) -> Self {
        Self(splitmix64(SEED ^ criterion.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
    }

    fn next(&mut self) -> u64 {
        self.0 = splitmix64(self.0);
        self.0
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    fn uniform(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

fn thetas() -> impl Iterator<Item = f64> {
    (1..=9).map(|i| i as f64 / 10.0)
}

fn russo_exactness() -> Outcome {
    let mut cases = Cases::new(1);
    let mut events = Vec::new();
    for _ in 0..100 {
        let m = 2 + cases.below(11) as usize;
        let clauses = (0..1 + cases.below(4))
            .map(|_| loop {
                let c = (cases.next() as u32) & ((1u32 << m) - 1) & (cases.next() as u32);
                if c != 0 {
                    break c;
                }
            })
            .collect();
        events.push(BooleanEvent::monotone_dnf(m, clauses)?);
    }
    for _ in 0..100 {
        let m = 1 + cases.below(12) as usize;
        let table = (0..1usize << m).map(|_| cases.next() & 1 == 1).collect();
        events.push(BooleanEvent::from_truth_table(m, table)?);
    }
    let mut worst: f64 = 0.0;
    for e in &events {
        let poly = event_polynomial(e)?;
        for theta in thetas() {
            worst = worst.max((russo_derivative(e, theta)? - poly.derivative(theta)).abs());
        }
    }
    Ok((worst <= 1e-10, format!("{} events x 9 thetas, max gap {worst:.2e} (<= 1e-10)", events.len())))
}

fn binomial_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=30 {
        for k in 1..=n {
            for p in [0.1, 0.5, 0.9] {
                worst = worst.max(identity_report_binomial(n, k, p)?.gap);
                count += 1;
            }
        }
    }
    Ok((worst <= 1e-10, format!("{count} cases, max gap {worst:.2e} (<= 1e-10)")))
}

fn negbin_identity() -> Outcome {
    let (mut event, mut below, mut through_err) = (0.0f64, 0.0f64, 0.0f64);
    let (mut visible, mut separated) = (0, 0);
    for r in 1..=20u32 {
        for k in 1..=20u32 {
            for p in [0.1, 0.5, 0.9] {
                let rep = identity_report_negbin(r, k, p)?;
                event = event.max(rep.gap_event);
                below = below.max(rep.gap_below_k);
                let extra = negative_binomial_pmf(r as u64, p, k as u64);
                through_err = through_err.max((rep.gap_through_k - extra).abs());
                if extra > 1e-9 {
                    visible += 1;
                    separated += (rep.gap_through_k > 1e-10) as usize;
                }
            }
        }
    }
    let pass = event <= 1e-10 && below <= 1e-10 && through_err <= 1e-10 && separated == visible;
    Ok((
        pass,
        format!(
            "event gap {event:.2e}, sum below k gap {below:.2e}; sum through k misses by NB(k) \
             (max deviation {through_err:.2e}), fails 1e-10 in {separated}/{visible} cases with NB(k) > 1e-9"
        ),
    ))
}

fn poisson_erlang() -> Outcome {
    let rates = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let mut tail_gap: f64 = 0.0;
    for &theta in &rates {
        for k in 1..=30 {
            tail_gap = tail_gap.max((poisson_tail(theta, k)? - poisson_tail_integral(theta, k, 1e-13)?).abs());
        }
    }
    let mut erlang_gap: f64 = 0.0;
    for &theta in &rates {
        for n in 1..=30 {
            for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
                erlang_gap = erlang_gap.max(erlang_cdf(n, theta, x)?.max_gap());
            }
        }
    }
    let pass = tail_gap <= 1e-10 && erlang_gap <= 1e-10;
    Ok((pass, format!("tail vs integral {tail_gap:.2e}, Erlang three-way {erlang_gap:.2e} (<= 1e-10)")))
}

fn random_lattice(cases: &mut Cases) -> pivotality::Result<LatticeDistribution> {
    let len = 2 + cases.below(8) as usize;
    let with_zero = cases.below(3) == 0;
    let probs = (0..len)
        .map(|j| if j == 0 && !with_zero { 0.0 } else if cases.below(4) == 0 { 0.0 } else { cases.uniform() })
        .collect::<Vec<_>>();
    let total: f64 = probs.iter().sum();
    if total == 0.0 {
        return LatticeDistribution::new(vec![0.0, 1.0]);
    }
    LatticeDistribution::new(probs.iter().map(|p| p / total).collect())
}

fn compound_poisson() -> Outcome {
    let mut cases = Cases::new(5);
    let mut pmf_gap: f64 = 0.0;
    for _ in 0..50 {
        let q = random_lattice(&mut cases)?;
        let theta = 0.2 + 7.8 * cases.uniform();
        let panjer = cpois_pmf_panjer_all(theta, &q, 50)?;
        for (k, &p) in panjer.iter().enumerate() {
            let direct = cpois_pmf_direct(theta, &q, k, 1e-300)?;
            let poly = cpois_pmf_polyrec(theta, &q, k)?;
            pmf_gap = pmf_gap.max(relative_gap(p, direct)).max(relative_gap(p, poly)).max(relative_gap(direct, poly));
        }
    }
    let mut ode: f64 = 0.0;
    for _ in 0..20 {
        let q = random_lattice(&mut cases)?;
        let theta = 0.5 + 9.5 * cases.uniform();
        let x = cases.below(20) as f64 + 0.05 + 0.9 * cases.uniform();
        ode = ode.max(cpois_cdf_ode_residual(theta, &q, x, 1e-3)?.abs());
    }
    let pass = pmf_gap <= 1e-12 && ode <= 1e-5;
    Ok((pass, format!("pmf relative gap {pmf_gap:.2e} (<= 1e-12) over 50 Q x 51 k, ODE residual {ode:.2e} (<= 1e-5)")))
}

fn void_box() -> pivotality::Result<(Arc<dyn Region>, IntensityMeasure)> {
    let b: Arc<dyn Region> = Arc::new(AxisBox::new(vec![0.0, 0.0], vec![0.5, 0.5])?);
    let lambda = IntensityMeasure::uniform(Arc::new(AxisBox::unit(2)), 1.0)?;
    Ok((b, lambda))
}

fn poisson_derivatives() -> Outcome {
    let reps = 100_000;
    let theta = 1.0;
    let (b, lambda) = void_box()?;
    let area: f64 = 0.25;
    let decay = area * (-theta * area).exp();
    let checks = [
        (Statistic::count(), 1.0),
        (Statistic::void(b.clone()), -decay),
        (Statistic::hit(b), decay),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (g, exact)) in checks.iter().enumerate() {
        let loc = derivative_location_estimator(g, &lambda, theta, reps, &stream(6).child(2 * i as u64))?;
        let z = z_score(loc.derivative.mean, loc.derivative.stderr, *exact, 0.0);
        pass &= z.abs() <= 4.0;
        let mut part = format!("{} z={z:+.2}", g.name());
        if g.is_indicator() {
            let pt = derivative_point_estimator(g, &lambda, theta, reps, &stream(6).child(2 * i as u64 + 1))?;
            let zm = z_score(pt.plus.mean, pt.plus.stderr, loc.plus.mean, loc.plus.stderr);
            pass &= zm.abs() <= 4.0;
            part.push_str(&format!(" mecke-vs-location z={zm:+.2}"));
        }
        parts.push(part);
    }
    Ok((pass, format!("reps 1e5: {}", parts.join(", "))))
}

fn perturbation() -> Outcome {
    let (b, unit) = void_box()?;
    let g = Statistic::void(b);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, shift) in [0.25, 0.5, 1.0].into_iter().enumerate() {
        let est = perturbation_series(&g, &unit, &unit, shift, 6, None, 100_000, &stream(7).child(i as u64))?;
        let target = (-(1.0 + shift) * 0.25f64).exp();
        let err = (est.estimate.mean - target).abs();
        let allowed = est.truncation_bound + 4.0 * est.estimate.stderr;
        pass &= err <= allowed;
        parts.push(format!("theta={shift}: |err| {err:.1e} <= {allowed:.1e}"));
    }
    Ok((pass, parts.join(", ")))
}

fn half_stable() -> Outcome {
    let p = StableParams::new(0.5, SpectralMeasure::positive_half_line(1.0)?)?;
    let sampler = LePageSampler::with_tol(&p, 1e-8)?;
    let xs = replicate(&stream(8), 10_000, |rng| sampler.sample(rng)[0]);
    let sup = EmpiricalCdf::new(xs)?.sup_distance(|x| half_stable_cdf(1.0, x));
    let (mut full, mut truncated): (f64, f64) = (0.0, 0.0);
    for x in [0.5, 1.0, 2.0, 5.0] {
        let d = dimone_residual(0.5, 1.0, x, &DimoneMethod::ClosedFormHalf { tol: 1e-10 })?;
        let a = alphadens1_residual(0.5, 1.0, x, 1e-10)?;
        full = full.max(d.residual.abs()).max(a.residual.abs());
        truncated = truncated.max(d.residual_truncated.abs()).max(a.residual_truncated.abs());
    }
    let pass = sup <= 0.02 && full <= 1e-3;
    Ok((
        pass,
        format!(
            "sup gap {sup:.4} (<= 0.02), dimone/alphadens1 residual {full:.1e} (<= 1e-3); \
             (0, x]-only forms leave {truncated:.2e}"
        ),
    ))
}

fn stable_samples(params: &StableParams, n: usize, s: &RngStream) -> pivotality::Result<Vec<f64>> {
    let sampler = LePageSampler::with_tol(params, 1e-6)?;
    Ok(replicate(s, n, |rng| sampler.sample(rng)[0]))
}

fn stable_properties() -> Outcome {
    let n = 10_000;
    let mut min_p: f64 = 1.0;
    let mut tests = 0;
    let mut idx = 0u64;
    let mut next = || {
        idx += 1;
        stream(9).child(idx)
    };
    for alpha in [0.5, 0.8] {
        for theta in [1.0, 2.0] {
            let p = StableParams::new(alpha, SpectralMeasure::positive_half_line(theta)?)?;
            for t in [0.3f64, 0.5, 0.7] {
                let a = stable_samples(&p, n, &next())?;
                let b = stable_samples(&p, n, &next())?;
                let xi = stable_samples(&p, n, &next())?;
                let (ca, cb) = (t.powf(1.0 / alpha), (1.0 - t).powf(1.0 / alpha));
                let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| ca * x + cb * y).collect();
                min_p = min_p.min(ks_two_sample(&mix, &xi)?.p_value);
                tests += 1;
            }
        }
    }
    let mut scaling = vec![];
    for alpha in [0.5, 0.8] {
        for theta in [1.0, 2.0] {
            scaling.push(StableParams::new(alpha, SpectralMeasure::positive_half_line(theta)?)?);
        }
    }
    scaling.push(StableParams::new(1.5, SpectralMeasure::symmetric_line(2.0)?)?);
    for p in &scaling {
        let unit = p.with_theta(1.0)?;
        let c = p.theta().powf(1.0 / p.alpha());
        let scaled: Vec<f64> = stable_samples(&unit, n, &next())?.iter().map(|x| c * x).collect();
        let direct = stable_samples(p, n, &next())?;
        min_p = min_p.min(ks_two_sample(&scaled, &direct)?.p_value);
        tests += 1;
    }

    // Λ_θ(cB) = c^{−α} Λ_θ(B) for an interval on the half line and a planar half annulus.
    let line = StableParams::new(0.5, SpectralMeasure::positive_half_line(1.0)?)?;
    let plane = StableParams::new(0.8, SpectralMeasure::axis_symmetric(2, 2.0)?)?;
    let cases: [(&StableParams, f64, f64, f64); 2] = [(&line, 1.0, 3.0, 1.0), (&plane, 0.5, 2.0, 0.5)];
    let mut homogeneity: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for (params, lo, hi, weight) in cases {
        let alpha = params.alpha();
        let measure = |c: f64| {
            let f = |z: &[f64]| {
                let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                (z[0] > 0.0 && r >= c * lo && r <= c * hi) as u8 as f64
            };
            let env = Envelope::bounded_away_from_origin(1.0, c * lo).with_breaks([c * lo, c * hi]);
            levy_integral(params, f, &env, 1e-10)
        };
        let base = measure(1.0)?;
        closed = closed.max((base - weight * (lo.powf(-alpha) - hi.powf(-alpha))).abs());
        for c in [0.5f64, 2.0, 4.0] {
            homogeneity = homogeneity.max((measure(c)? - c.powf(-alpha) * base).abs());
        }
    }
    let pass = min_p > 0.01 && homogeneity <= 1e-8 && closed <= 1e-8;
    Ok((
        pass,
        format!(
            "{tests} KS tests at n=1e4, min p {min_p:.3} (> 0.01); homogeneity gap {homogeneity:.1e}, \
             closed-form gap {closed:.1e} (<= 1e-8)"
        ),
    ))
}

fn radvec() -> Outcome {
    let configs = [
        ("n=1 positive a=0.5", StableParams::new(0.5, SpectralMeasure::positive_half_line(1.0)?)?),
        ("n=1 symmetric a=1", StableParams::new(1.0, SpectralMeasure::symmetric_line(1.0)?)?),
        ("n=2 axes a=0.8", StableParams::new(0.8, SpectralMeasure::axis_symmetric(2, 1.0)?)?),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, p)) in configs.iter().enumerate() {
        let rep = radvec_residual(p, 1.0, 1_000_000, &stream(10).child(i as u64), 1e-8, None)?;
        let z = rep.residual.mean / rep.residual.stderr;
        pass &= z.abs() <= 4.0 && !rep.sign_reversal_suspected;
        parts.push(format!("{name} z={z:+.2}"));
    }
    Ok((pass, format!("reps 1e6: {}", parts.join(", "))))
}

fn unit_disk() -> pivotality::Result<ConvexBody> {
    ConvexBody::disk(vec![0.0, 0.0], 1.0)
}

fn crofton_poisson() -> Outcome {
    let h = Density::constant(1.0);
    let disk = crofton_poisson_check(&Statistic::count(), &unit_disk()?, &h, 0.5, 100_000, 1e-2, &stream(11).child(0))?;
    let len = 1.5;
    let segment = ConvexBody::segment([0.0, 0.0], [len, 0.0])?;
    let seg = crofton_poisson_check(&Statistic::count(), &segment, &h, 0.0, 100_000, 1e-2, &stream(11).child(1))?;
    let flat = crofton_poisson_check(&Statistic::constant(2.0), &unit_disk()?, &h, 0.5, 1_000, 1e-2, &stream(11).child(2))?;
    let disk_ok = (disk.rhs - 3.0 * PI).abs() <= 1e-9 && disk.z.abs() <= 4.0;
    let seg_ok = (seg.rhs - 2.0 * len).abs() <= 1e-9 && seg.z.abs() <= 4.0;
    let flat_ok = flat.lhs_fd == 0.0 && flat.rhs == 0.0;
    Ok((
        disk_ok && seg_ok && flat_ok,
        format!(
            "disk rhs {:.10} vs 3pi, z={:+.2}; segment rhs {:.10} vs 2L=3, z={:+.2}; constant g lhs {} rhs {}",
            disk.rhs, disk.z, seg.rhs, seg.z, flat.lhs_fd, flat.rhs
        ),
    ))
}

fn crofton_binomial() -> Outcome {
    let body = unit_disk()?;
    let b: Arc<dyn Region> = Arc::new(Ball::new(vec![0.0, 0.0], 0.5)?);
    let g = Statistic::count_in(b.clone());
    let mut pass = true;
    let mut exact_gap: f64 = 0.0;
    let mut parts = Vec::new();
    let mut idx = 0u64;
    for m in [1usize, 5, 20] {
        for t in [0.2f64, 0.5] {
            let target = -(m as f64) / (2.0 * (1.0 + t).powi(3));
            // E g(ξ^{m−1} + δ_x) − E g(ξ^m) = 1_B(x) − p with p = λ(B)/λ(K_t).
            let p = 0.25 / (1.0 + t).powi(2);
            let exact = m as f64 / body.steiner_volume(t)
                * body.boundary_integral(t, |x| b.contains(x) as u8 as f64 - p)?;
            exact_gap = exact_gap.max((exact - target).abs());
            let r = crofton_binomial_check(&g, &body, &Density::constant(1.0), t, m, 100_000, 5e-2, &stream(12).child(idx))?;
            idx += 1;
            let zl = (r.lhs_fd - target) / r.lhs_stderr;
            pass &= zl.abs() <= 4.0 && r.z.abs() <= 4.0;
            parts.push(format!("m={m} t={t}: lhs z={zl:+.2} lhs-rhs z={:+.2}", r.z));
        }
    }
    pass &= exact_gap <= 1e-10;
    Ok((pass, format!("exact rhs gap {exact_gap:.1e} (<= 1e-10); {}", parts.join(", "))))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir()?;
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"seed": 4242, "reps": 2000}"#)?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_pivotality"))
            .arg("all")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .stdout(std::process::Stdio::null())
            .status()?;
        if status.code() == Some(2) {
            return Ok((false, format!("run {run} exited with {status}")));
        }
        outputs.push(std::fs::read(out.join("run-001").join("results.csv"))?);
    }
    let same = outputs[0] == outputs[1];
    Ok((same, format!("two `all` runs, {} CSV bytes, identical: {same}", outputs[0].len())))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("Russo exactness", russo_exactness),
        ("binomial identity", binomial_identity),
        ("negative-binomial identity", negbin_identity),
        ("Poisson/Erlang", poisson_erlang),
        ("compound Poisson", compound_poisson),
        ("Poisson derivative estimators", poisson_derivatives),
        ("perturbation series", perturbation),
        ("half-stable golden checks", half_stable),
        ("stable properties", stable_properties),
        ("radvec", radvec),
        ("Crofton Poisson", crofton_poisson),
        ("Crofton binomial", crofton_binomial),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failures += !pass as usize;
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name}: {verdict} [{:.1}s] {detail}", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
