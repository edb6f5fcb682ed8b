//! The orchestration behind each CLI verb.

use hardy_core::caccioppoli::{caccioppoli_from_densities, Densities};
use hardy_core::compatibility::{check_assumptions, check_psi_g_condition, check_theta_behavior, default_probe, Gate, PSI_G_TOL};
use hardy_core::hardy::{construct_hardy_measures, hardy_margin};
use hardy_core::model::{caccioppoli_constant, hardy_mu2_constant, hp_constant, make_talenti_profile};
use hardy_core::radial::{geomspace, Grading};
use hardy_core::rayleigh::{
    minimize_rayleigh, rayleigh_quotient, sharpness_probe, MinimizerOptions, TrialFamily, GRADIENT_SELF_TEST_TOL,
};
use hardy_core::supersolution::{check_shift, check_strong, compute_sigma0, strong_residual, weak_form_margin};
use hardy_core::testfn::{library, LogCutoff, TestFunction};
use hardy_core::transforms::{radial_change_of_variable, relative_residual, transformed_residual};
use hardy_core::{DomainKind, HardyData, PsiGPair, QuadratureGrid, RadialDomain, Sigma0};
use serde_json::json;

use crate::config::{HardyConfig, ProblemConfig};
use crate::error::CliError;
use crate::report::{CheckRecord, Environment, Series, VerificationReport};

/// Relative slack below a claimed constant before a quotient counts as undercutting it.
pub const CLAIM_TOL: f64 = 1e-6;
/// Relative tolerance of the quotient evaluated at a supplied eigenfunction.
pub const EIGEN_QUOTIENT_TOL: f64 = 1e-6;
pub const ROUND_TRIP_TOL: f64 = 1e-12;

fn environment(cfg: &ProblemConfig, grid: &QuadratureGrid, tolerances: &[(&str, f64)]) -> Environment {
    Environment {
        grid_size: grid.len(),
        grading: match grid.grading() {
            Grading::Uniform => "uniform".into(),
            Grading::Log => "log".into(),
            Grading::Hybrid { split } => format!("hybrid({split})"),
        },
        r_first: grid.r_first(),
        r_last: grid.r_last(),
        tolerances: tolerances
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .chain([("strong_relative".to_string(), cfg.run.tol)])
            .collect(),
    }
}

/// Support interval for test functions, kept away from both ends of the domain.
fn test_support(domain: &RadialDomain, grid: &QuadratureGrid) -> (f64, f64) {
    let r_max = domain.r_max();
    if domain.r_min() == 0.0 && domain.kind() != DomainKind::Interval {
        ((grid.r_first() * 10.0).max(r_max * 1e-6), 0.5 * r_max)
    } else {
        let span = r_max - domain.r_min();
        (domain.r_min() + 0.01 * span, r_max - 0.01 * span)
    }
}

fn weak_bumps(lo: f64, hi: f64, count: usize) -> Result<Vec<TestFunction>, hardy_core::Error> {
    let logscale = lo > 0.0 && hi / lo > 20.0;
    let map = |s: f64| if logscale { lo * (hi / lo).powf(s) } else { lo + (hi - lo) * s };
    (0..count)
        .map(|k| {
            let a = 0.1 + 0.5 * k as f64 / count.max(1) as f64;
            TestFunction::bump(map(a), map(a + 0.35))
        })
        .collect()
}

fn sigma0_value(s: &Sigma0) -> serde_json::Value {
    match s {
        Sigma0::Finite(v) => json!(v),
        Sigma0::PlusInfinity => json!("+inf"),
        Sigma0::ConstantProfile => json!("constant-profile"),
    }
}

/// B_p, pair, supersolution, σ₀, Caccioppoli and Hardy checks for one configuration.
pub fn run_verify(cfg: &ProblemConfig) -> Result<VerificationReport, CliError> {
    let domain = cfg.domain()?;
    let grid = cfg.grid_for(&domain)?;
    let problem = cfg.problem()?;
    let pair = cfg.pair()?;
    let explicit = cfg.explicit_sigma(&pair)?;
    let u = cfg.solution(&grid)?;
    let p = problem.p;
    let mut rep = VerificationReport::new("verify", cfg.hash(), cfg.seed);
    rep.environment = Some(environment(cfg, &grid, &[("weak_relative", cfg.run.weak_tol), ("psi_g", PSI_G_TOL)]));
    rep.value("pair", pair.name.clone());
    rep.value("p", p);

    let assumptions = match check_assumptions(&problem, &u, &pair, &grid) {
        Ok(a) => {
            rep.push(CheckRecord::flag("bp_condition", a.bp.holds).with_detail(format!("{:?}", a.bp.method)));
            let tol = PSI_G_TOL * pair.c.abs().max(1.0);
            rep.push(
                CheckRecord::le("psi_g_condition", pair.c, a.psi_g.max_c, tol)
                    .with_detail(format!("tightest at t = {:e}", a.psi_g.worst_t)),
            );
            rep.push(
                CheckRecord::flag("theta_near_zero", a.theta.acceptable())
                    .with_detail(format!("theta {:?}, psi/g {:?}", a.theta.theta, a.theta.psi_over_g)),
            );
            Some(a)
        }
        Err(e) => {
            rep.push(CheckRecord::failed("assumptions", e));
            None
        }
    };

    match check_strong(&problem, &u, &grid, cfg.run.tol) {
        Ok(s) => {
            rep.value("strong_relative_sup", s.relative_sup);
            rep.push(
                CheckRecord::flag("supersolution_strong", s.holds)
                    .with_detail(format!("min residual {:e} near r = {:e}", s.min_residual, s.worst_r)),
            );
        }
        Err(e) => rep.push(CheckRecord::failed("supersolution_strong", e)),
    }
    if let Ok(res) = strong_residual(&problem, &u, &grid) {
        let mut s = Series::new("residual", &["r", "residual"]);
        for (r, v) in res.grid().iter().zip(res.values()) {
            s.push(vec![*r, *v]);
        }
        rep.series.push(s);
    }

    let (lo, hi) = test_support(&domain, &grid);
    let nodes = grid.nodes();
    // weak margins on the refined grid; the coarse value only estimates quadrature error
    let weak = grid.refined().map_err(|e| e.to_string()).and_then(|fine| {
        let uf = cfg.solution(&fine).map_err(|e| e.to_string())?;
        Ok((fine, uf))
    });
    match (weak_bumps(lo, hi, cfg.run.weak_test_functions), weak) {
        (Ok(bumps), Ok((fine, uf))) => {
            let bf = problem.b.sample(fine.nodes());
            for (k, f) in bumps.iter().enumerate() {
                let name = format!("supersolution_weak[{k}]");
                let rec = (|| {
                    let w = f.sample(fine.nodes())?;
                    let margin = weak_form_margin(&problem, &uf, &w, &fine)?;
                    let coarse = weak_form_margin(&problem, &u, &f.sample(nodes)?, &grid)?;
                    let src: Vec<f64> = (0..fine.len())
                        .map(|i| problem.phi.value(uf.values()[i]) * bf[i] * w.values()[i])
                        .collect();
                    let scale = fine.integrate_samples(&src).abs();
                    Ok::<_, hardy_core::Error>(
                        CheckRecord::le(&name, -margin, 0.0, cfg.run.weak_tol * scale + 1e-14)
                            .with_detail(format!("quadrature error estimate {:e}", (margin - coarse).abs())),
                    )
                })();
                rep.push(rec.unwrap_or_else(|e| CheckRecord::failed(&name, e)));
            }
        }
        (Err(e), _) => rep.push(CheckRecord::failed("supersolution_weak", e)),
        (_, Err(e)) => rep.push(CheckRecord::failed("supersolution_weak", e)),
    }

    let sigma = match compute_sigma0(&problem, &u, &pair, None, &grid) {
        Ok(s0) => {
            rep.value("sigma0", sigma0_value(&s0.sigma0));
            let sigma = explicit.or(s0.sigma0.finite());
            match sigma {
                Some(sigma) => match check_shift(&s0, sigma) {
                    Ok(()) => {
                        let lower = s0.sigma0.finite().unwrap_or(f64::NEG_INFINITY);
                        rep.push(CheckRecord::le("sigma_admissible", lower, sigma, 0.0));
                        Some(sigma)
                    }
                    Err(e) => {
                        rep.push(CheckRecord::failed("sigma_admissible", e));
                        None
                    }
                },
                None => {
                    rep.push(CheckRecord::failed("sigma_admissible", "no finite sigma0 and no explicit shift"));
                    None
                }
            }
        }
        Err(e) => {
            rep.push(CheckRecord::failed("sigma0", e));
            explicit
        }
    };
    let Some(sigma) = sigma else {
        return Ok(rep);
    };
    rep.value("sigma", sigma);
    if let Ok(c) = caccioppoli_constant(p, pair.c, sigma) {
        rep.value("caccioppoli_constant", c);
    }
    if let Ok(c) = hardy_mu2_constant(p, pair.c, sigma) {
        rep.value("hardy_constant", c);
    }

    let funcs = match library(lo, hi, cfg.run.test_functions, p, cfg.seed) {
        Ok(f) => f,
        Err(e) => {
            rep.push(CheckRecord::failed("test_functions", e));
            return Ok(rep);
        }
    };
    let xis: Vec<_> = funcs.iter().map(|f| f.sample(nodes)).collect();
    match Densities::new(&problem, &u, &pair, sigma, &grid) {
        Ok(dens) => {
            for (i, xi) in xis.iter().enumerate() {
                let name = format!("caccioppoli[{i}]");
                let rec = xi.clone().and_then(|xi| caccioppoli_from_densities(&dens, p, pair.c, sigma, &xi.abs_pow(p), &grid));
                rep.push(match rec {
                    Ok(m) => CheckRecord::le(&name, m.lhs, m.rhs, m.tolerance),
                    Err(e) => CheckRecord::failed(&name, e),
                });
            }
            let mut s = Series::new("weights", &["r", "mu1", "mu2"]);
            for (i, r) in nodes.iter().enumerate() {
                s.push(vec![*r, dens.mu1[i], dens.mu2[i]]);
            }
            rep.series.push(s);
        }
        Err(e) => rep.push(CheckRecord::failed("caccioppoli", e)),
    }

    let gate = match (&assumptions, cfg.run.waive_assumptions) {
        (_, true) => Gate::Waived,
        (Some(a), false) => Gate::Verified(a),
        (None, false) => return Ok(rep),
    };
    match construct_hardy_measures(&problem, &u, &pair, sigma, gate, &grid) {
        Ok(hd) => {
            if !hd.flags.is_empty() {
                rep.value("hardy_flags", hd.flags.clone());
            }
            for (i, xi) in xis.iter().enumerate() {
                let name = format!("hardy[{i}]");
                let rec = xi.clone().and_then(|xi| hardy_margin(&hd, &xi, &grid));
                rep.push(match rec {
                    Ok(m) => CheckRecord::le(&name, m.lhs, m.rhs, m.tolerance),
                    Err(e) => CheckRecord::failed(&name, e),
                });
            }
        }
        Err(e) => rep.push(CheckRecord::failed("hardy", e)),
    }
    let mut s = Series::new("profile", &["r", "u"]);
    for (r, v) in nodes.iter().zip(u.values()) {
        s.push(vec![*r, *v]);
    }
    rep.series.push(s);
    Ok(rep)
}

fn claimed_constant(cfg: &ProblemConfig, hd: &HardyData, explicit: Option<f64>) -> Result<f64, CliError> {
    if let Some(c) = explicit {
        return Ok(c);
    }
    Ok(match &cfg.hardy {
        Some(HardyConfig::HardyPoincare { n, p, gamma, r_param }) => {
            hp_constant(*n, *p, *gamma, *r_param)
                .map_err(|e| CliError::Config { path: "hardy".into(), message: e.to_string() })?
                .value
        }
        _ => 1.0 / hd.constant,
    })
}

fn record_optimality(rep: &mut VerificationReport, cfg: &ProblemConfig) {
    if let Some(HardyConfig::HardyPoincare { n, p, gamma, r_param }) = cfg.hardy {
        if let Ok(c) = hp_constant(n, p, gamma, r_param) {
            rep.value("optimality", format!("{:?}", c.optimality));
        }
    }
}

fn supersolution_sigma(cfg: &ProblemConfig) -> Result<Option<f64>, CliError> {
    match cfg.hardy {
        Some(HardyConfig::Supersolution) => cfg.explicit_sigma(&cfg.pair()?),
        _ => Ok(None),
    }
}

fn push_claim_checks(rep: &mut VerificationReport, tag: &str, claimed: f64, achieved: f64, max_gap: f64) -> f64 {
    let gap = (achieved - claimed) / claimed;
    rep.push(CheckRecord::le(format!("{tag}_not_below_claim"), claimed, achieved, CLAIM_TOL * claimed.abs()));
    rep.push(CheckRecord::le(format!("{tag}_gap"), gap.abs(), max_gap, 0.0));
    gap
}

/// Minimizes the Rayleigh quotient of the configured Hardy data.
pub fn run_minimize(cfg: &ProblemConfig) -> Result<VerificationReport, CliError> {
    let domain = cfg.domain()?;
    let m = cfg.minimize_block();
    let sigma = supersolution_sigma(cfg)?;
    let opts = MinimizerOptions {
        max_iterations: m.max_iterations,
        boundary: cfg.boundary(),
        init: cfg.init(),
        seed: cfg.seed,
        ..Default::default()
    };
    opts.validate().map_err(|e| CliError::Config { path: "minimize".into(), message: e.to_string() })?;
    let mut rep = VerificationReport::new("minimize", cfg.hash(), cfg.seed);

    if let Some(sweep) = &m.r_max_sweep {
        if sweep.is_empty() {
            return Err(CliError::Config { path: "minimize.r_max_sweep".into(), message: "empty sweep".into() });
        }
        let mut table = Series::new("sweep", &["r_max", "quotient"]);
        let mut claimed = f64::NAN;
        let mut last_grid = None;
        for (k, &r_max) in sweep.iter().enumerate() {
            let d = domain
                .with_r_max(r_max)
                .map_err(|e| CliError::Config { path: format!("minimize.r_max_sweep[{k}]"), message: e.to_string() })?;
            let grid = cfg.grid_for(&d)?;
            let hd = cfg.hardy_data(&grid, sigma)?;
            claimed = claimed_constant(cfg, &hd, m.claimed)?;
            match minimize_rayleigh(&hd, &grid, &opts) {
                Ok(res) => {
                    table.push(vec![r_max, res.value]);
                    rep.push(CheckRecord::le(format!("sweep_not_below_claim[{k}]"), claimed, res.value, CLAIM_TOL * claimed));
                }
                Err(e) => rep.push(CheckRecord::failed(format!("sweep[{k}]"), e)),
            }
            last_grid = Some(grid);
        }
        for (k, w) in table.rows.windows(2).enumerate() {
            rep.push(CheckRecord::le(format!("sweep_decreasing[{k}]"), w[1][1], w[0][1], 0.0));
        }
        if let Some(last) = table.rows.last() {
            let gap = (last[1] - claimed) / claimed;
            rep.push(CheckRecord::le("sweep_final_gap", gap.abs(), m.max_gap, 0.0));
            rep.value("achieved", last[1]);
            rep.value("gap", gap);
        }
        rep.value("claimed", claimed);
        rep.value("sweep", table.rows.iter().map(|r| json!({"r_max": r[0], "quotient": r[1]})).collect::<Vec<_>>());
        if let Some(g) = last_grid {
            rep.environment = Some(environment(cfg, &g, &[("claim_relative", CLAIM_TOL), ("max_gap", m.max_gap)]));
        }
        rep.series.push(table);
        return Ok(rep);
    }

    let grid = cfg.grid_for(&domain)?;
    let hd = cfg.hardy_data(&grid, sigma)?;
    let claimed = claimed_constant(cfg, &hd, m.claimed)?;
    rep.environment = Some(environment(cfg, &grid, &[("claim_relative", CLAIM_TOL), ("max_gap", m.max_gap)]));
    rep.value("claimed", claimed);
    record_optimality(&mut rep, cfg);
    rep.value("sharpness", format!("{:?}", hd.sharpness));
    if !hd.flags.is_empty() {
        rep.value("hardy_flags", hd.flags.clone());
    }
    let res = match minimize_rayleigh(&hd, &grid, &opts) {
        Ok(r) => r,
        Err(e) => {
            rep.push(CheckRecord::failed("minimize", e));
            return Ok(rep);
        }
    };
    if let Some(gc) = res.gradient_check {
        rep.push(CheckRecord::le("gradient_self_test", gc, GRADIENT_SELF_TEST_TOL, 0.0));
    }
    rep.push(CheckRecord::flag("trace_nonincreasing", res.trace.windows(2).all(|w| w[1] <= w[0])));
    let gap = push_claim_checks(&mut rep, "minimum", claimed, res.value, m.max_gap);
    rep.value("achieved", res.value);
    rep.value("gap", gap);
    rep.value("iterations", res.trace.len().saturating_sub(1));
    rep.value("converged", res.converged);
    if cfg.solution.is_some() {
        if let Ok(q) = cfg.solution(&grid).map_err(|e| e.to_string()).and_then(|u| rayleigh_quotient(&hd, &u, &grid).map_err(|e| e.to_string())) {
            rep.value("solution_quotient", q);
            rep.push(CheckRecord::le("solution_quotient", (q - claimed).abs(), EIGEN_QUOTIENT_TOL * claimed.abs(), 0.0));
        }
    }
    let mut trace = Series::new("trace", &["iteration", "quotient"]);
    for (i, q) in res.trace.iter().enumerate() {
        trace.push(vec![i as f64, *q]);
    }
    let mut minimizer = Series::new("minimizer", &["r", "value"]);
    for (r, v) in res.minimizer.grid().iter().zip(res.minimizer.values()) {
        minimizer.push(vec![*r, *v]);
    }
    rep.series.extend([trace, minimizer]);
    Ok(rep)
}

/// Evaluates the quotient over the power-profile trial family.
pub fn run_probe(cfg: &ProblemConfig) -> Result<VerificationReport, CliError> {
    let domain = cfg.domain()?;
    let grid = cfg.grid_for(&domain)?;
    let pc = cfg.probe_block()?;
    let params = cfg.probe_params()?;
    let hd = cfg.hardy_data(&grid, supersolution_sigma(cfg)?)?;
    let claimed = claimed_constant(cfg, &hd, pc.claimed)?;
    let cutoff = LogCutoff::new(pc.cutoff_inner, pc.cutoff_outer)
        .map_err(|e| CliError::Config { path: "probe.cutoff_inner".into(), message: e.to_string() })?;
    let mut rep = VerificationReport::new("probe", cfg.hash(), cfg.seed);
    rep.environment = Some(environment(cfg, &grid, &[("claim_relative", CLAIM_TOL), ("max_gap", pc.max_gap)]));
    rep.value("claimed", claimed);
    record_optimality(&mut rep, cfg);
    if let Some(HardyConfig::HardyPoincare { r_param, .. }) = cfg.hardy {
        if r_param != 1.0 {
            rep.value("note", "no extremal is known for r_param != 1; the trial family is a heuristic");
        }
    }
    match sharpness_probe(&hd, &grid, &TrialFamily::TalentiPower { cutoff }, &params) {
        Ok(res) => {
            let gap = push_claim_checks(&mut rep, "probe", claimed, res.best_quotient, pc.max_gap);
            rep.value("best_quotient", res.best_quotient);
            rep.value("best_param", res.best_param);
            rep.value("gap", gap);
            let mut s = Series::new("probe", &["param", "quotient"]);
            for (x, q) in &res.values {
                s.push(vec![*x, *q]);
            }
            rep.series.push(s);
        }
        Err(e) => rep.push(CheckRecord::failed("probe", e)),
    }
    Ok(rep)
}

/// Maps a weighted extremal profile to the two-weight ODE and checks its residual.
pub fn run_transform(cfg: &ProblemConfig) -> Result<VerificationReport, CliError> {
    let tc = cfg.transform_block()?;
    let bad = |path: &str, e: hardy_core::Error| CliError::Config { path: path.into(), message: e.to_string() };
    if tc.nodes.is_empty() {
        return Err(CliError::Config { path: "transform.nodes".into(), message: "no resolutions given".into() });
    }
    let mut rep = VerificationReport::new("transform", cfg.hash(), cfg.seed);
    rep.value("critical_exponent", hardy_core::model::critical_exponent(tc.n as f64, tc.p, tc.beta));
    let mut residuals = Vec::new();
    for (k, &count) in tc.nodes.iter().enumerate() {
        if count < 5 {
            return Err(CliError::Config { path: format!("transform.nodes[{k}]"), message: "at least 5 nodes".into() });
        }
        let r = geomspace(tc.r_min, tc.r_max, count);
        let w = make_talenti_profile(tc.n, tc.p, tc.beta, tc.gamma, &r).map_err(|e| bad("transform", e))?;
        let (v, map) = radial_change_of_variable(tc.beta, tc.p, &w).map_err(|e| bad("transform.beta", e))?;
        let trip = r.iter().map(|&x| ((map.r_of_t(map.t_of_r(x)) - x) / x).abs()).fold(0.0, f64::max);
        rep.push(CheckRecord::le(format!("round_trip[{count}]"), trip, ROUND_TRIP_TOL, 0.0));
        match transformed_residual(&v, tc.n, tc.p, tc.gamma, tc.beta) {
            Ok(res) => {
                let rel = relative_residual(&res, &v, tc.n, tc.p, tc.gamma, tc.beta);
                residuals.push(json!({"nodes": count, "relative_residual": rel}));
                rep.push(CheckRecord::le(format!("residual[{count}]"), rel, tc.tol, 0.0));
                if k + 1 == tc.nodes.len() {
                    let mut s = Series::new("transformed_residual", &["t", "residual"]);
                    for (t, x) in res.grid().iter().zip(res.values()) {
                        s.push(vec![*t, *x]);
                    }
                    rep.series.push(s);
                }
            }
            Err(e) => rep.push(CheckRecord::failed(format!("residual[{count}]"), e)),
        }
    }
    rep.value("residuals", residuals);
    Ok(rep)
}

/// Checks the four reference compatibility pairs.
pub fn run_pairs(cfg: Option<&ProblemConfig>) -> Result<VerificationReport, CliError> {
    let p = cfg.and_then(|c| c.weights.as_ref()).map_or(2.0, |w| w.p);
    let (hash, seed) = cfg.map_or((String::new(), 0), |c| (c.hash(), c.seed));
    let mut rep = VerificationReport::new("pairs", hash, seed);
    // e^{-t} underflows near t = 745, so samples stop well before that
    let samples = geomspace(1e-6, 1e2, 400);
    let equality = ["power(alpha=1)", "exp-over-t"];
    for pair in PsiGPair::reference_rows() {
        match check_psi_g_condition(&pair, &samples, None) {
            Ok(r) => {
                let tol = PSI_G_TOL * pair.c.abs().max(1.0);
                rep.push(CheckRecord::le(format!("psi_g[{}]", pair.name), pair.c, r.max_c, tol));
                if equality.contains(&pair.name.as_str()) {
                    rep.push(CheckRecord::le(format!("equality[{}]", pair.name), r.equality_defect, PSI_G_TOL, 0.0));
                }
            }
            Err(e) => rep.push(CheckRecord::failed(format!("psi_g[{}]", pair.name), e)),
        }
        match check_theta_behavior(&pair, p, &default_probe()) {
            Ok(t) => rep.push(
                CheckRecord::flag(format!("theta[{}]", pair.name), t.acceptable())
                    .with_detail(format!("theta {:?}, psi/g {:?}", t.theta, t.psi_over_g)),
            ),
            Err(e) => rep.push(CheckRecord::failed(format!("theta[{}]", pair.name), e)),
        }
    }
    Ok(rep)
}
