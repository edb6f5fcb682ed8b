//! Strong and weak verification of `-Δ_{p,a} u >= b Φ(u)` and the
//! admissibility threshold `σ₀`.

use crate::error::{Error, Result};
use crate::model::{PdiProblem, PsiGPair, RadialProfile, Sigma0, SigmaResult};
use crate::radial::{
    p_laplace_radial, p_power, radial_derivative, require_compact_support, require_nonnegative, QuadratureGrid,
};

/// Critical-set threshold relative to `max a |u'|^p`.
pub const DEFAULT_EPS_GRAD: f64 = 1e-10;
/// Local relative tolerance of the strong-form check.
pub const STRONG_REL_TOL: f64 = 1e-6;
/// Largest relative move of `σ₀` under one grid doubling.
pub const SIGMA0_CERTIFY: f64 = 0.01;

/// `(-Δ_{p,a} u) - b Φ(u)` on the interior nodes.
pub fn strong_residual(problem: &PdiProblem, u: &RadialProfile, grid: &QuadratureGrid) -> Result<RadialProfile> {
    let parts = StrongParts::new(problem, u, grid)?;
    let res = parts.lap.iter().zip(&parts.source).map(|(l, s)| l - s).collect();
    RadialProfile::new(parts.r, res)
}

struct StrongParts {
    r: Vec<f64>,
    lap: Vec<f64>,
    source: Vec<f64>,
}

impl StrongParts {
    fn new(problem: &PdiProblem, u: &RadialProfile, grid: &QuadratureGrid) -> Result<Self> {
        let u = grid.bind(u)?;
        if let Some((i, v)) = u.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeValue { what: "u", r: grid.nodes()[i], value: *v });
        }
        let lap = p_laplace_radial(&u, &problem.a, problem.p, grid)?;
        let r = lap.grid().to_vec();
        let vals = &u.values()[1..grid.len() - 1];
        let source = r.iter().zip(vals).map(|(&x, &v)| problem.b.eval(x) * problem.phi.value(v)).collect();
        Ok(Self { r, lap: lap.values().to_vec(), source })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongCheck {
    /// Every node satisfies `res >= -tol · max(|-Δ_{p,a} u|, |b Φ(u)|)`.
    pub holds: bool,
    /// `max |res| / max |b Φ(u)|` (or `max |res|` when the source vanishes).
    pub relative_sup: f64,
    pub min_residual: f64,
    pub worst_r: f64,
}

pub fn check_strong(problem: &PdiProblem, u: &RadialProfile, grid: &QuadratureGrid, rel_tol: f64) -> Result<StrongCheck> {
    let parts = StrongParts::new(problem, u, grid)?;
    let mut holds = true;
    let mut min_residual = f64::INFINITY;
    let mut worst_r = parts.r[0];
    let mut worst_slack = f64::INFINITY;
    let mut sup_res: f64 = 0.0;
    let mut sup_src: f64 = 0.0;
    for ((&r, &l), &s) in parts.r.iter().zip(&parts.lap).zip(&parts.source) {
        let res = l - s;
        let slack = res + rel_tol * l.abs().max(s.abs());
        if slack < 0.0 {
            holds = false;
        }
        if slack < worst_slack {
            worst_slack = slack;
            worst_r = r;
        }
        min_residual = min_residual.min(res);
        sup_res = sup_res.max(res.abs());
        sup_src = sup_src.max(s.abs());
    }
    let relative_sup = if sup_src > 0.0 { sup_res / sup_src } else { sup_res };
    Ok(StrongCheck { holds, relative_sup, min_residual, worst_r })
}

/// `∫ a |u'|^{p-2} u' w' dx - ∫ Φ(u) b w dx` for a nonnegative, compactly
/// supported `w`.
pub fn weak_form_margin(problem: &PdiProblem, u: &RadialProfile, w: &RadialProfile, grid: &QuadratureGrid) -> Result<f64> {
    let u = grid.bind(u)?;
    let w = grid.bind(w)?;
    let wv = w.values();
    require_compact_support("test function w", wv, grid)?;
    require_nonnegative("test function w", wv, grid)?;
    let du = radial_derivative(&u)?;
    let dw = radial_derivative(&w)?;
    let r = grid.nodes();
    let integrand: Vec<f64> = (0..grid.len())
        .map(|i| {
            problem.a.eval(r[i]) * p_power(du.values()[i], problem.p) * dw.values()[i]
                - problem.phi.value(u.values()[i]) * problem.b.eval(r[i]) * wv[i]
        })
        .collect();
    Ok(grid.integrate_samples(&integrand))
}

/// Nodes outside the numerical critical set: `a |u'|^p > eps · max a |u'|^p`.
pub fn noncritical_mask(a_grad_p: &[f64], eps: f64) -> Vec<bool> {
    let top = a_grad_p.iter().cloned().fold(0.0, f64::max);
    a_grad_p.iter().map(|&v| v > eps * top).collect()
}

/// `a |u'|^p` at the grid nodes.
pub fn a_grad_p(problem: &PdiProblem, u: &RadialProfile, grid: &QuadratureGrid) -> Result<Vec<f64>> {
    let u = grid.bind(u)?;
    let du = radial_derivative(&u)?;
    Ok(grid
        .nodes()
        .iter()
        .zip(du.values())
        .map(|(&r, d)| problem.a.eval(r) * d.abs().powf(problem.p))
        .collect())
}

/// `σ₀ = sup s`, `s = -Φ(u) b g(u) / (a |u'|^p)` over noncritical nodes with
/// `u > 0`. `eps` defaults to [`DEFAULT_EPS_GRAD`].
pub fn compute_sigma0(
    problem: &PdiProblem,
    u: &RadialProfile,
    pair: &PsiGPair,
    eps: Option<f64>,
    grid: &QuadratureGrid,
) -> Result<SigmaResult> {
    let eps = eps.unwrap_or(DEFAULT_EPS_GRAD);
    let ub = grid.bind(u)?;
    let grad = a_grad_p(problem, &ub, grid)?;
    let mask = noncritical_mask(&grad, eps);
    let r = grid.nodes();
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = None;
    let mut evaluated = 0;
    let mut empty = false;
    let mut any_positive = false;
    for i in 0..grid.len() {
        let v = ub.values()[i];
        if !(v > 0.0) {
            continue;
        }
        any_positive = true;
        let source = problem.phi.value(v) * problem.b.eval(r[i]);
        if !mask[i] {
            if source < 0.0 {
                empty = true;
            }
            continue;
        }
        let s = -source * pair.g.value(v) / grad[i];
        if !s.is_finite() {
            return Err(Error::NonFinite { what: "sigma ratio", r: r[i], value: s });
        }
        evaluated += 1;
        if s > sup {
            sup = s;
            argmax = Some(r[i]);
        }
    }
    let sigma0 = if empty {
        Sigma0::PlusInfinity
    } else if evaluated == 0 || !any_positive {
        Sigma0::ConstantProfile
    } else {
        Sigma0::Finite(sup + 0.0)
    };
    Ok(SigmaResult { sigma0, admissible_upper: pair.c, evaluated_nodes: evaluated, argmax_r: argmax })
}

/// Accepts `σ` when `σ₀ <= σ < C`; a constant profile admits every `σ < C`.
pub fn check_shift(result: &SigmaResult, sigma: f64) -> Result<()> {
    if !(sigma < result.admissible_upper) {
        return Err(Error::ShiftNotBelowC { sigma, c: result.admissible_upper });
    }
    match result.sigma0 {
        Sigma0::Finite(s0) if sigma < s0 => Err(Error::ShiftBelowSigma0 { sigma, sigma0: s0 }),
        Sigma0::PlusInfinity => Err(Error::NoFiniteSigma0(
            "Φ(u) b < 0 somewhere on the critical set of u".to_string(),
        )),
        _ => Ok(()),
    }
}

/// True when both values are finite and differ by less than 1 % of the finer one.
pub fn certify_sigma0(coarse: &SigmaResult, fine: &SigmaResult) -> bool {
    match (coarse.sigma0, fine.sigma0) {
        (Sigma0::Finite(a), Sigma0::Finite(b)) => {
            if b == 0.0 {
                a == 0.0
            } else {
                ((a - b) / b).abs() < SIGMA0_CERTIFY
            }
        }
        _ => false,
    }
}
