//! The twelve acceptance criteria, one PASS/FAIL line each.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use hardy_cli::{run_minimize, run_pairs, run_probe, run_transform, run_verify, ProblemConfig, VerificationReport};
use hardy_core::caccioppoli::{caccioppoli_margin, local_estimate_margin, young_split};
use hardy_core::compatibility::Gate;
use hardy_core::hardy::{construct_hardy_measures, hardy_margin};
use hardy_core::model::{hp_constant, TalentiProfile};
use hardy_core::radial::Grading;
use hardy_core::supersolution::{certify_sigma0, check_strong, compute_sigma0, STRONG_REL_TOL};
use hardy_core::testfn::library;
use hardy_core::{
    Coefficient, PdiProblem, PsiGPair, QuadratureGrid, RadialDomain, RadialProfile, ScalarFn, Sigma0, SigmaResult, WeightFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config(name: &str) -> ProblemConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    ProblemConfig::load(&path).expect("shipped config loads")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn failing(rep: &VerificationReport) -> Vec<String> {
    rep.checks.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect()
}

fn num(rep: &VerificationReport, key: &str) -> Result<f64, String> {
    rep.values.get(key).and_then(|v| v.as_f64()).ok_or_else(|| format!("report lacks `{key}`"))
}

fn talenti_solutions() -> Outcome {
    let mut notes = Vec::new();
    for (n, p, beta, gamma) in [(3, 2.0, 0.0, 3.0), (4, 2.0, 0.0, 8.0), (4, 3.0, 0.0, 2.0)] {
        let start = Instant::now();
        let t = TalentiProfile::new(n, p, beta, gamma).map_err(|e| e.to_string())?;
        let d = RadialDomain::full_space(n, 1e3).map_err(|e| e.to_string())?;
        let g = QuadratureGrid::default_for(&d).map_err(|e| e.to_string())?;
        let u = t.sample(g.nodes()).map_err(|e| e.to_string())?;
        let phi = ScalarFn::power(t.critical_exponent() - 1.0);
        let prob = PdiProblem::new(d, p, WeightFunction::Constant(1.0), t.coefficient().into(), phi).map_err(|e| e.to_string())?;
        let s = check_strong(&prob, &u, &g, STRONG_REL_TOL).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(s.relative_sup <= 1e-5, format!("({n},{p},{beta},{gamma}) relative residual {:e}", s.relative_sup))?;
        ensure(took < Duration::from_secs(1), format!("({n},{p},{beta},{gamma}) took {took:?}"))?;
        notes.push(format!("{:.1e}", s.relative_sup));
    }
    Ok(format!("relative residuals {}", notes.join(", ")))
}

fn table_pairs() -> Outcome {
    let rep = run_pairs(None).map_err(|e| e.to_string())?;
    let relevant: Vec<_> = rep.checks.iter().filter(|c| c.name.starts_with("psi_g[") || c.name.starts_with("equality[")).collect();
    ensure(relevant.iter().filter(|c| c.name.starts_with("psi_g[")).count() == 4, "expected four pair rows")?;
    ensure(relevant.iter().filter(|c| c.name.starts_with("equality[")).count() == 2, "expected two equality rows")?;
    let bad: Vec<_> = relevant.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect();
    ensure(bad.is_empty(), format!("failing rows {bad:?}"))?;
    Ok("four rows hold, two with equality".into())
}

fn young() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let (s1, s2) = (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0));
        let (p, tau) = (rng.gen_range(1.01..6.0), rng.gen_range(0.01..20.0));
        let (l, r) = young_split(s1, s2, p, tau);
        ensure(l <= r, format!("lhs {l} > rhs {r} at ({s1}, {s2}, {p}, {tau})"))?;
        let (l, r) = young_split(tau * s2, s2, p, tau);
        ensure((l - r).abs() <= 1e-12 * r.abs().max(f64::MIN_POSITIVE), format!("equality defect {} at s2 = {s2}", l - r))?;
    }
    Ok("10000 samples".into())
}

fn talenti_setup(nodes: usize) -> Result<(PdiProblem, RadialProfile, QuadratureGrid), String> {
    let mut cfg = config("talenti_demo.toml");
    cfg.run.grid_size = nodes;
    let d = cfg.domain().map_err(|e| e.to_string())?;
    let g = cfg.grid_for(&d).map_err(|e| e.to_string())?;
    let u = cfg.solution(&g).map_err(|e| e.to_string())?;
    Ok((cfg.problem().map_err(|e| e.to_string())?, u, g))
}

fn caccioppoli_suite() -> Outcome {
    let pair = PsiGPair::power(1.0);
    let mut checked = 0;
    for nodes in [2000, 4000] {
        let (prob, u, g) = talenti_setup(nodes)?;
        let sup = u.max_value();
        for (k, f) in library(1e-3, 500.0, 20, 2.0, 17).map_err(|e| e.to_string())?.iter().enumerate() {
            let phi = f.sample(g.nodes()).map_err(|e| e.to_string())?.abs_pow(2.0);
            let m = caccioppoli_margin(&prob, &u, &pair, 0.0, &phi, &g).map_err(|e| e.to_string())?;
            ensure(m.constant == 0.25, format!("c = {}", m.constant))?;
            ensure(m.lhs <= m.rhs + m.tolerance, format!("global estimate fails for function {k} at {nodes} nodes"))?;
            for big_r in [0.25 * sup, 0.5 * sup, sup, 2.5 * sup] {
                let l = local_estimate_margin(&prob, &u, &pair, 0.0, &phi, big_r, &g).map_err(|e| e.to_string())?;
                ensure(l.margin.lhs <= l.margin.rhs + l.margin.tolerance, format!("local estimate fails for function {k}, R = {big_r}"))?;
                if big_r > 2.0 * sup {
                    ensure(l.c_tilde == 0.0, format!("remainder {} for R > 2 sup u", l.c_tilde))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} local and 40 global margins, c = 0.25"))
}

fn hardy_identity() -> Outcome {
    let (prob, u, g) = talenti_setup(4000)?;
    let pair = PsiGPair::power(1.0);
    let mut worst: f64 = 0.0;
    for sigma in [0.0, 0.5] {
        let hd = construct_hardy_measures(&prob, &u, &pair, sigma, Gate::Waived, &g).map_err(|e| e.to_string())?;
        for f in library(1e-3, 500.0, 20, 2.0, 5).map_err(|e| e.to_string())? {
            let xi = f.sample(g.nodes()).map_err(|e| e.to_string())?;
            let h = hardy_margin(&hd, &xi, &g).map_err(|e| e.to_string())?;
            let c = caccioppoli_margin(&prob, &u, &pair, sigma, &xi.abs_pow(2.0), &g).map_err(|e| e.to_string())?;
            ensure(h.lhs == c.lhs, format!("lhs {} vs {}", h.lhs, c.lhs))?;
            worst = worst.max((h.rhs - c.rhs).abs() / c.rhs.abs());
        }
    }
    // the two sides scale the same integral by p^p c and by the μ2 constant
    ensure(worst <= 16.0 * f64::EPSILON, format!("rhs relative difference {worst:e}"))?;
    Ok(format!("lhs identical, rhs within {worst:.1e}"))
}

fn constant_cross_check() -> Outcome {
    for n in [2u32, 3, 5] {
        for p in [1.5, 2.0, 3.0] {
            for gamma in [1.5, 2.0, 5.0] {
                let v = hp_constant(n, p, gamma, 1.0).map_err(|e| e.to_string())?.value;
                let closed = n as f64 * (p * (gamma - 1.0) / (p - 1.0)).powf(p - 1.0);
                ensure(v == closed, format!("({n}, {p}, {gamma}): {v} vs {closed}"))?;
            }
        }
    }
    Ok("27 parameter triples exact".into())
}

fn poincare() -> Outcome {
    let start = Instant::now();
    let rep = run_minimize(&config("poincare.toml")).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let v = num(&rep, "achieved")?;
    let q = num(&rep, "solution_quotient")?;
    ensure((v - 1.0).abs() <= 1e-3, format!("minimum {v}"))?;
    ensure((q - 1.0).abs() <= 1e-6, format!("quotient at sin {q}"))?;
    ensure(took < Duration::from_secs(10), format!("took {took:?}"))?;
    ensure(rep.passed(), format!("failing checks {:?}", failing(&rep)))?;
    Ok(format!("minimum {v:.6}, quotient at sin {q:.12}, {took:.1?}"))
}

fn classical_hardy() -> Outcome {
    let rep = run_minimize(&config("hardy_classical.toml")).map_err(|e| e.to_string())?;
    let sweep: Vec<f64> = rep.series.iter().find(|s| s.name == "sweep").ok_or("no sweep")?.rows.iter().map(|r| r[1]).collect();
    ensure(sweep.len() == 3, "expected three radii")?;
    ensure(sweep.windows(2).all(|w| w[1] < w[0]), format!("not decreasing: {sweep:?}"))?;
    ensure(sweep.iter().all(|&v| v >= 0.25), format!("below 1/4: {sweep:?}"))?;
    ensure(sweep[2] <= 0.25 * 1.05, format!("final {}", sweep[2]))?;
    Ok(format!("{:.5} > {:.5} > {:.5}", sweep[0], sweep[1], sweep[2]))
}

fn hardy_poincare() -> Outcome {
    let cfg = config("hardy_poincare.toml");
    ensure(cfg.run.grid_size == 4000, "shipped config must use 4000 nodes")?;
    let start = Instant::now();
    let probe = run_probe(&cfg).map_err(|e| e.to_string())?;
    let min = run_minimize(&cfg).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let (a, b) = (num(&probe, "best_quotient")?, num(&min, "achieved")?);
    for v in [a, b] {
        ensure((24.0..=24.0 * 1.1).contains(&v), format!("value {v}"))?;
    }
    ensure(took < Duration::from_secs(60), format!("took {took:?}"))?;
    Ok(format!("probe {a:.6}, minimum {b:.6}, {took:.1?}"))
}

fn annulus_case(k: impl Fn(f64) -> f64, nodes: usize) -> Result<(SigmaResult, SigmaResult), String> {
    let d = RadialDomain::annulus(3, 1e-3, 1e2).map_err(|e| e.to_string())?;
    let coarse = QuadratureGrid::new(&d, nodes, Grading::Log).map_err(|e| e.to_string())?;
    let fine = coarse.refined().map_err(|e| e.to_string())?;
    let run = |g: &QuadratureGrid| -> Result<SigmaResult, String> {
        // u = (1+r^2)^{-1/2}, g(t) = t and b = -k r^2/(1+r^2)^2 give s(r) = k(r)
        let u = RadialProfile::from_fn_with_derivative(g.nodes(), |r| (1.0 + r * r).powf(-0.5), |r| -r * (1.0 + r * r).powf(-1.5))
            .map_err(|e| e.to_string())?;
        let b = RadialProfile::from_fn(g.nodes(), |r| -k(r) * r * r / (1.0 + r * r).powi(2)).map_err(|e| e.to_string())?;
        let prob = PdiProblem::new(d, 2.0, WeightFunction::Constant(1.0), Coefficient::Signed(b), ScalarFn::identity())
            .map_err(|e| e.to_string())?;
        compute_sigma0(&prob, &u, &PsiGPair::power(1.0), None, g).map_err(|e| e.to_string())
    };
    Ok((run(&coarse)?, run(&fine)?))
}

fn sigma0() -> Outcome {
    let cases: [(&dyn Fn(f64) -> f64, f64); 2] =
        [(&|r: f64| r * (-r).exp(), (-1f64).exp()), (&|r: f64| -1.0 - (r - 2.0).powi(2), -1.0)];
    let mut notes = Vec::new();
    for (k, exact) in cases {
        let (c, f) = annulus_case(k, 2000)?;
        for s in [&c, &f] {
            let v = s.sigma0.finite().ok_or("sigma0 not finite")?;
            ensure((v - exact).abs() <= 0.01 * exact.abs(), format!("sigma0 {v} vs {exact}"))?;
        }
        ensure(certify_sigma0(&c, &f), "coarse and fine values disagree")?;
        notes.push(format!("{:.6}", f.sigma0.finite().unwrap()));
    }
    let (c, f) = annulus_case(|_| 0.0, 500)?;
    ensure(c.sigma0 == Sigma0::Finite(0.0) && f.sigma0 == Sigma0::Finite(0.0), "b = 0 must give exactly 0")?;
    Ok(format!("sigma0 {} (exact 0.367879, -1), b = 0 gives 0", notes.join(", ")))
}

fn transform() -> Outcome {
    let rep = run_transform(&config("transform.toml")).map_err(|e| e.to_string())?;
    let count = |pre: &str| rep.checks.iter().filter(|c| c.name.starts_with(pre)).count();
    ensure(count("round_trip[") == 2 && count("residual[") == 2, "expected two resolutions")?;
    ensure(rep.passed(), format!("failing checks {:?}", failing(&rep)))?;
    let worst = rep.checks.iter().filter(|c| c.name.starts_with("residual[")).map(|c| c.lhs).fold(0.0, f64::max);
    Ok(format!("round trip within 1e-12, worst residual {worst:.1e}"))
}

fn determinism() -> Outcome {
    let cfg = config("talenti_demo.toml");
    let a = run_verify(&cfg).map_err(|e| e.to_string())?;
    let b = run_verify(&cfg).map_err(|e| e.to_string())?;
    ensure(a.to_json() == b.to_json(), "reports differ")?;
    ensure(a.exit_code() == 0, format!("exit code {}, failing {:?}", a.exit_code(), failing(&a)))?;
    let s0 = num(&a, "sigma0")?;
    ensure(s0 <= 0.0, format!("sigma0 {s0}"))?;
    ensure(num(&a, "caccioppoli_constant")? == 0.25, "c != 0.25")?;
    Ok(format!("{} checks, byte-identical, sigma0 = {s0:.3e}", a.checks.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("talenti solutions", talenti_solutions),
        ("compatibility pairs", table_pairs),
        ("young inequality", young),
        ("caccioppoli suite", caccioppoli_suite),
        ("hardy/caccioppoli identity", hardy_identity),
        ("constant cross-check", constant_cross_check),
        ("sharpness by eigenfunction", poincare),
        ("classical hardy probe", classical_hardy),
        ("hardy-poincare probe", hardy_poincare),
        ("sigma0 correctness", sigma0),
        ("transform round trip", transform),
        ("end-to-end determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("PASS {:>2} {name}: {note}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
