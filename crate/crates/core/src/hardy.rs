//! Hardy-type inequalities `∫ |ξ|^p dμ1 <= K ∫ |ξ'|^p dμ2`: construction from
//! a supersolution, the sharp two-weight form and the Hardy-Poincaré family.

use crate::caccioppoli::{Densities, InequalityMargin};
use crate::compatibility::{check_bp_weight, Gate};
use crate::error::{Error, Result};
use crate::model::{
    hardy_mu2_constant, hp_constant, make_hp_weights, Coefficient, HardyData, Optimality, PdiProblem, Provenance,
    PsiGPair, RadialDomain, RadialProfile, ScalarFn, Sharpness, WeightFunction,
};
use crate::radial::{radial_derivative, require_compact_support, require_nonnegative, QuadratureGrid};
use crate::supersolution::weak_form_margin;
use crate::testfn::TestFunction;

/// `|ξ|^p` samples below this fraction of the peak are outside the support.
pub const XI_FLOOR: f64 = 1e-12;
/// Relative size of the weak residual accepted as equality.
pub const EIGEN_TOL: f64 = 1e-4;

/// `μ1 = (Φ(u) b + σ a |u'|^p / g(u)) Ψ(u) χ_{u>0}` and
/// `μ2 = a Ψ(u) g(u)^{p-1} χ_{u>0, u'≠0}`, tabulated on the grid, with
/// constant `((p-1)/(C-σ))^{p-1}`.
pub fn construct_hardy_measures(
    problem: &PdiProblem,
    u: &RadialProfile,
    pair: &PsiGPair,
    sigma: f64,
    gate: Gate<'_>,
    grid: &QuadratureGrid,
) -> Result<HardyData> {
    gate.check()?;
    let dens = Densities::new(problem, u, pair, sigma, grid)?;
    let constant = hardy_mu2_constant(problem.p, pair.c, sigma)?;
    let nodes = grid.nodes().to_vec();
    let mu1 = Coefficient::Signed(RadialProfile::new(nodes.clone(), dens.mu1.clone())?);
    let mu2 = WeightFunction::tabulated(RadialProfile::new(nodes, dens.mu2.clone())?)?;
    let provenance = Provenance::Supersolution { pair: pair.name.clone(), sigma, c: pair.c };
    let mut hd = HardyData::new(mu1, mu2, constant, problem.p, provenance)?;
    if dens.u_touches_zero {
        hd.flags.push("u vanishes on grid nodes; both indicator masks applied literally".to_string());
    }
    if matches!(gate, Gate::Waived) {
        hd.flags.push("hypothesis checks waived".to_string());
    }
    Ok(hd)
}

/// Samples a density on `nodes`, reusing tabulated values on the same grid.
pub fn sample_coefficient(c: &Coefficient, nodes: &[f64]) -> Vec<f64> {
    match c {
        Coefficient::Signed(p) => sample_profile(p, nodes),
        Coefficient::Weight(w) => sample_weight(w, nodes),
    }
}

pub fn sample_weight(w: &WeightFunction, nodes: &[f64]) -> Vec<f64> {
    match w {
        WeightFunction::Tabulated(p) => sample_profile(p, nodes),
        w => w.sample(nodes),
    }
}

fn sample_profile(p: &RadialProfile, nodes: &[f64]) -> Vec<f64> {
    if p.is_on(nodes) {
        p.values().to_vec()
    } else {
        nodes.iter().map(|&r| p.eval(r)).collect()
    }
}

/// `(∫ |ξ|^p dμ1, K ∫ |ξ'|^p dμ2)`, the gradient side taken where
/// `|ξ|^p > XI_FLOOR · max |ξ|^p`.
pub fn hardy_margin(hd: &HardyData, xi: &RadialProfile, grid: &QuadratureGrid) -> Result<InequalityMargin> {
    let xi = grid.bind(xi)?;
    require_compact_support("test function xi", xi.values(), grid)?;
    let (lhs, raw) = sides(hd, &xi, grid, Some(XI_FLOOR))?;
    Ok(InequalityMargin::new(lhs, hd.constant * raw, hd.constant))
}

/// `(∫ |ξ|^p dμ1, ∫ |ξ'|^p dμ2)` without the constant; with `floor` the
/// gradient side skips nodes where `|ξ|^p <= floor · max |ξ|^p`.
pub(crate) fn sides(hd: &HardyData, xi: &RadialProfile, grid: &QuadratureGrid, floor: Option<f64>) -> Result<(f64, f64)> {
    let p = hd.p;
    let nodes = grid.nodes();
    let mu1 = sample_coefficient(&hd.mu1_density, nodes);
    let mu2 = sample_weight(&hd.mu2_density, nodes);
    let dxi = radial_derivative(xi)?;
    let xp: Vec<f64> = xi.values().iter().map(|v| v.abs().powf(p)).collect();
    let lhs_vals: Vec<f64> = mu1.iter().zip(&xp).map(|(m, x)| m * x).collect();
    let rhs_vals: Vec<f64> = mu2.iter().zip(dxi.values()).map(|(m, d)| m * d.abs().powf(p)).collect();
    let rhs = match floor {
        Some(f) => {
            let cut = f * xp.iter().cloned().fold(0.0, f64::max);
            let support: Vec<bool> = xp.iter().map(|&v| v > cut).collect();
            grid.integrate_masked(&rhs_vals, &support)
        }
        None => grid.integrate_samples(&rhs_vals),
    };
    Ok((grid.integrate_samples(&lhs_vals), rhs))
}

/// `∫ |ξ|^p b <= ∫ |ξ'|^p a`, valid when a nonnegative nontrivial
/// supersolution of `-Δ_{p,a} u >= b u^{p-1}` exists. An eigenfunction `u₀`
/// attaining equality in weak form marks the constant as sharp.
pub fn sharp_case_measures(
    a: &WeightFunction,
    b: &WeightFunction,
    p: f64,
    domain: &RadialDomain,
    grid: &QuadratureGrid,
    eigen: Option<&RadialProfile>,
) -> Result<HardyData> {
    let bs = b.sample(grid.nodes());
    require_nonnegative("b", &bs, grid)?;
    let bp = check_bp_weight(a, p, domain, grid)?;
    if !bp.holds {
        return Err(Error::AssumptionFailed("a^{-1/(p-1)} is not locally integrable".to_string()));
    }
    let mut hd = HardyData::new(Coefficient::Weight(b.clone()), a.clone(), 1.0, p, Provenance::SharpCase)?;
    if bs.iter().all(|&v| v == 0.0) {
        hd.sharpness = Sharpness::NotApplicable;
        return Ok(hd);
    }
    if let Some(u0) = eigen {
        let problem = PdiProblem::new(*domain, p, a.clone(), Coefficient::Weight(b.clone()), ScalarFn::power(p - 1.0))?;
        if eigen_equality(&problem, u0, grid)? {
            hd.sharpness = Sharpness::ProvedByEigenfunction;
        } else {
            hd.flags.push("supplied eigenfunction does not attain equality".to_string());
        }
    }
    Ok(hd)
}

// weak equality against bumps spread over the positivity set of u0
fn eigen_equality(problem: &PdiProblem, u0: &RadialProfile, grid: &QuadratureGrid) -> Result<bool> {
    let u = grid.bind(u0)?;
    if u.values().iter().any(|&v| v < 0.0) || u.max_value() <= 0.0 {
        return Ok(false);
    }
    let (lo, hi) = (grid.r_first(), grid.r_last());
    let span = hi - lo;
    for k in 0..5 {
        let a = lo + span * (0.05 + 0.15 * k as f64);
        let w = TestFunction::bump(a, a + 0.3 * span)?.sample(grid.nodes())?;
        let margin = weak_form_margin(problem, &u, &w, grid)?;
        let source: Vec<f64> = (0..grid.len())
            .map(|i| problem.phi.value(u.values()[i]) * problem.b.eval(grid.nodes()[i]) * w.values()[i])
            .collect();
        let scale = grid.integrate_samples(&source).abs();
        if !(margin.abs() <= EIGEN_TOL * scale) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `C̄ ∫ |ξ|^p v1 <= ∫ |∇ξ|^p v2` written with `μ1 = v1`, `μ2 = v2` and
/// constant `1/C̄`.
pub fn hardy_poincare_data(n: u32, p: f64, gamma: f64, r_param: f64) -> Result<HardyData> {
    let (v1, v2) = make_hp_weights(n, p, gamma, r_param)?;
    let c = hp_constant(n, p, gamma, r_param)?;
    let mut hd = HardyData::new(
        Coefficient::Weight(v1),
        v2,
        1.0 / c.value,
        p,
        Provenance::HardyPoincare { n, p, gamma, r_param },
    )?;
    if c.optimality == Optimality::Unknown {
        hd.flags.push("optimality of the constant is not known for these parameters".to_string());
    }
    Ok(hd)
}

/// `((n-p)/p)^p ∫ |ξ|^p |x|^{-p} <= ∫ |∇ξ|^p` for `p < n`.
pub fn classical_hardy_data(n: u32, p: f64) -> Result<HardyData> {
    let nf = n as f64;
    if !(p < nf) {
        return Err(crate::error::invalid(format!("classical Hardy needs p < n, got p = {p}, n = {n}")));
    }
    HardyData::new(
        Coefficient::Weight(WeightFunction::Power { exponent: -p }),
        WeightFunction::Constant(1.0),
        (p / (nf - p)).powf(p),
        p,
        Provenance::Weights { label: format!("classical Hardy n={n} p={p}") },
    )
}
