//! Caccioppoli-type estimates: the Young-type split, the local estimate with
//! its remainder `C̃(R)`, the global estimate and the truncation `min{u+δ, R}`.

use crate::error::{invalid, Result};
use crate::model::{caccioppoli_constant, PdiProblem, PsiGPair, RadialProfile};
use crate::radial::{radial_derivative, require_compact_support, require_nonnegative, QuadratureGrid};
use crate::supersolution::{a_grad_p, check_shift, compute_sigma0, noncritical_mask, DEFAULT_EPS_GRAD};

/// Test-function samples below this fraction of the peak are outside the support.
pub const PHI_FLOOR: f64 = 1e-12;
/// `u` samples below this fraction of `max u` count as zero.
pub const U_FLOOR: f64 = 1e-14;

/// `(s1 s2^{p-1}, s1^p/(p τ^{p-1}) + (p-1)/p · τ s2^p)`; the first never
/// exceeds the second.
pub fn young_split(s1: f64, s2: f64, p: f64, tau: f64) -> (f64, f64) {
    let lhs = s1 * s2.powf(p - 1.0);
    let rhs = s1.powf(p) / (p * tau.powf(p - 1.0)) + (p - 1.0) / p * tau * s2.powf(p);
    (lhs, rhs)
}

/// Both sides of an inequality `lhs <= rhs` with its acceptance tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityMargin {
    pub lhs: f64,
    pub rhs: f64,
    /// Multiplicative constant in front of the gradient integral.
    pub constant: f64,
    pub tolerance: f64,
}

impl InequalityMargin {
    pub(crate) fn new(lhs: f64, rhs: f64, constant: f64) -> Self {
        Self { lhs, rhs, constant, tolerance: rhs.abs() * 1e-9 + 1e-12 }
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.margin() >= -self.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMargin {
    pub margin: InequalityMargin,
    /// The remainder `C̃(R)`, already included in `margin.rhs`.
    pub c_tilde: f64,
}

/// Nodal densities built from `u`, the pair and the shift.
#[derive(Debug, Clone, PartialEq)]
pub struct Densities {
    pub u: Vec<f64>,
    /// `u > U_FLOOR · max u`.
    pub positive: Vec<bool>,
    /// Outside the numerical critical set of `u`.
    pub noncritical: Vec<bool>,
    /// `(Φ(u) b + σ a |u'|^p / g(u)) Ψ(u)` on `{u > 0}`, zero elsewhere.
    pub mu1: Vec<f64>,
    /// `a Ψ(u) g(u)^{p-1}` on `{u > 0, u' ≠ 0}`, zero elsewhere.
    pub mu2: Vec<f64>,
    /// `a |u'|^{p-1}`.
    pub a_grad_p1: Vec<f64>,
    /// `Φ(u) b`.
    pub source: Vec<f64>,
    pub u_touches_zero: bool,
}

impl Densities {
    /// Validates `σ₀ <= σ < C` and samples every density on the grid.
    pub fn new(problem: &PdiProblem, u: &RadialProfile, pair: &PsiGPair, sigma: f64, grid: &QuadratureGrid) -> Result<Self> {
        let u = grid.bind(u)?;
        require_nonnegative("u", u.values(), grid)?;
        let s0 = compute_sigma0(problem, &u, pair, None, grid)?;
        check_shift(&s0, sigma)?;
        let grad = a_grad_p(problem, &u, grid)?;
        let noncritical = noncritical_mask(&grad, DEFAULT_EPS_GRAD);
        let du = radial_derivative(&u)?;
        let floor = U_FLOOR * u.max_value();
        let r = grid.nodes();
        let p = problem.p;
        let uv = u.values().to_vec();
        let positive: Vec<bool> = uv.iter().map(|&v| v > floor && v > 0.0).collect();
        let mut mu1 = vec![0.0; uv.len()];
        let mut mu2 = vec![0.0; uv.len()];
        let mut source = vec![0.0; uv.len()];
        let mut a_grad_p1 = vec![0.0; uv.len()];
        for i in 0..uv.len() {
            let a = problem.a.eval(r[i]);
            source[i] = problem.phi.value(uv[i]) * problem.b.eval(r[i]);
            a_grad_p1[i] = a * du.values()[i].abs().powf(p - 1.0);
            if !positive[i] {
                continue;
            }
            let psi = pair.psi.value(uv[i]);
            let g = pair.g.value(uv[i]);
            mu1[i] = (source[i] + sigma * grad[i] / g) * psi;
            if noncritical[i] {
                mu2[i] = a * psi * g.powf(p - 1.0);
            }
        }
        let u_touches_zero = uv.iter().any(|&v| v <= floor);
        Ok(Self { u: uv, positive, noncritical, mu1, mu2, a_grad_p1, source, u_touches_zero })
    }
}

struct PhiSamples<'a> {
    values: &'a [f64],
    gradient_term: Vec<f64>,
    support: Vec<bool>,
}

// |φ'|^p φ^{1-p} on {φ > floor}
fn phi_samples<'a>(phi: &'a RadialProfile, p: f64, grid: &QuadratureGrid) -> Result<PhiSamples<'a>> {
    let values = phi.values();
    require_nonnegative("test function phi", values, grid)?;
    require_compact_support("test function phi", values, grid)?;
    let dphi = radial_derivative(phi)?;
    let floor = PHI_FLOOR * phi.max_value();
    let support: Vec<bool> = values.iter().map(|&v| v > floor).collect();
    let gradient_term = values
        .iter()
        .zip(dphi.values())
        .zip(&support)
        .map(|((&v, d), &s)| if s { d.abs().powf(p) * v.powf(1.0 - p) } else { 0.0 })
        .collect();
    Ok(PhiSamples { values, gradient_term, support })
}

/// `∫ (Φ(u) b + σ a |u'|^p/g(u)) Ψ(u) φ  <=  c ∫ a Ψ(u) g(u)^{p-1} |φ'|^p φ^{1-p}`
/// with `c = (p-1)^{p-1} / (p^p (C-σ)^{p-1})`.
pub fn caccioppoli_margin(
    problem: &PdiProblem,
    u: &RadialProfile,
    pair: &PsiGPair,
    sigma: f64,
    phi: &RadialProfile,
    grid: &QuadratureGrid,
) -> Result<InequalityMargin> {
    let dens = Densities::new(problem, u, pair, sigma, grid)?;
    caccioppoli_from_densities(&dens, problem.p, pair.c, sigma, phi, grid)
}

/// [`caccioppoli_margin`] reusing precomputed densities.
pub fn caccioppoli_from_densities(
    dens: &Densities,
    p: f64,
    c_pair: f64,
    sigma: f64,
    phi: &RadialProfile,
    grid: &QuadratureGrid,
) -> Result<InequalityMargin> {
    let c = caccioppoli_constant(p, c_pair, sigma)?;
    let phi = grid.bind(phi)?;
    let ph = phi_samples(&phi, p, grid)?;
    let lhs_vals: Vec<f64> = dens.mu1.iter().zip(ph.values).map(|(m, f)| m * f).collect();
    let rhs_vals: Vec<f64> = dens.mu2.iter().zip(&ph.gradient_term).map(|(m, t)| m * t).collect();
    let lhs = grid.integrate_samples(&lhs_vals);
    let rhs = c * grid.integrate_masked(&rhs_vals, &ph.support);
    Ok(InequalityMargin::new(lhs, rhs, c))
}

/// The local estimate on `{0 < u < R}` with remainder
/// `C̃(R) = Ψ(R) [∫_{u >= R/2} a |u'|^{p-1} |φ'| - ∫_{u >= R/2} Φ(u) b φ]`.
pub fn local_estimate_margin(
    problem: &PdiProblem,
    u: &RadialProfile,
    pair: &PsiGPair,
    sigma: f64,
    phi: &RadialProfile,
    big_r: f64,
    grid: &QuadratureGrid,
) -> Result<LocalMargin> {
    if !(big_r > 0.0) {
        return Err(invalid(format!("cap R must be positive, got {big_r}")));
    }
    let p = problem.p;
    let dens = Densities::new(problem, u, pair, sigma, grid)?;
    let c = caccioppoli_constant(p, pair.c, sigma)?;
    let phi = grid.bind(phi)?;
    let ph = phi_samples(&phi, p, grid)?;
    let dphi = radial_derivative(&phi)?;
    let below: Vec<bool> = dens.u.iter().zip(&dens.positive).map(|(&v, &pos)| pos && v < big_r).collect();
    let upper: Vec<bool> = dens.u.iter().map(|&v| v >= big_r / 2.0).collect();
    let lhs_vals: Vec<f64> = dens.mu1.iter().zip(ph.values).map(|(m, f)| m * f).collect();
    let lhs = grid.integrate_masked(&lhs_vals, &below);
    let rhs_mask: Vec<bool> = below.iter().zip(&ph.support).map(|(a, b)| *a && *b).collect();
    let rhs_vals: Vec<f64> = dens.mu2.iter().zip(&ph.gradient_term).map(|(m, t)| m * t).collect();
    let flux: Vec<f64> = dens.a_grad_p1.iter().zip(dphi.values()).map(|(a, d)| a * d.abs()).collect();
    let src: Vec<f64> = dens.source.iter().zip(ph.values).map(|(s, f)| s * f).collect();
    let c_tilde = if upper.iter().any(|&m| m) {
        pair.psi.value(big_r) * (grid.integrate_masked(&flux, &upper) - grid.integrate_masked(&src, &upper))
    } else {
        0.0
    };
    let rhs = c * grid.integrate_masked(&rhs_vals, &rhs_mask) + c_tilde;
    Ok(LocalMargin { margin: InequalityMargin::new(lhs, rhs, c), c_tilde })
}

/// `min{u + δ, R}` with zero derivative where the cap binds.
pub fn truncate_profile(u: &RadialProfile, delta: f64, big_r: f64) -> Result<RadialProfile> {
    if !(delta > 0.0 && delta < big_r) {
        return Err(invalid(format!("truncation needs 0 < delta < R, got delta = {delta}, R = {big_r}")));
    }
    let du = radial_derivative(u)?;
    let (values, deriv): (Vec<f64>, Vec<f64>) = u
        .values()
        .iter()
        .zip(du.values())
        .map(|(&v, &d)| if v + delta >= big_r { (big_r, 0.0) } else { (v + delta, d) })
        .unzip();
    let out = if u.derivative_values().is_some() {
        RadialProfile::with_derivative(u.grid().to_vec(), values, deriv)?
    } else {
        RadialProfile::new(u.grid().to_vec(), values)?
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{make_talenti_profile, RadialDomain, ScalarFn, WeightFunction};
    use crate::radial::Grading;
    use crate::testfn::TestFunction;

    fn setup(nodes: usize) -> (PdiProblem, RadialProfile, QuadratureGrid) {
        let d = RadialDomain::full_space(3, 1e3).unwrap();
        let g = QuadratureGrid::new(&d, nodes, Grading::Log).unwrap();
        let u = make_talenti_profile(3, 2.0, 0.0, 3.0, g.nodes()).unwrap();
        let b = WeightFunction::tabulated(u.abs_pow(4.0).scale(3.0)).unwrap();
        let prob = PdiProblem::new(d, 2.0, WeightFunction::Constant(1.0), b.into(), ScalarFn::identity()).unwrap();
        (prob, u, g)
    }

    #[test]
    fn young_examples() {
        assert_eq!(young_split(3.0, 2.0, 2.0, 1.0), (6.0, 6.5));
        let (l, r) = young_split(0.0, 2.0, 3.0, 0.5);
        assert_eq!(l, 0.0);
        assert!((r - 2.0 / 3.0 * 0.5 * 8.0).abs() < 1e-15);
        let (l, r) = young_split(1.5 * 0.7, 0.7, 2.5, 1.5);
        assert!((l - r).abs() <= 1e-12 * r);
    }

    #[test]
    fn talenti_global_estimate() {
        let (prob, u, g) = setup(4000);
        let phi = TestFunction::bump(0.1, 10.0).unwrap().sample(g.nodes()).unwrap();
        let m = caccioppoli_margin(&prob, &u, &PsiGPair::power(1.0), 0.0, &phi, &g).unwrap();
        assert_eq!(m.constant, 0.25);
        assert!(m.holds(), "{m:?}");
        assert!(m.lhs > 0.0);
    }

    #[test]
    fn zero_cases() {
        let (prob, u, g) = setup(400);
        let pair = PsiGPair::power(1.0);
        let zero = RadialProfile::constant(g.nodes(), 0.0).unwrap();
        let m = caccioppoli_margin(&prob, &u, &pair, 0.0, &zero, &g).unwrap();
        assert_eq!((m.lhs, m.rhs), (0.0, 0.0));
        let phi = TestFunction::bump(0.1, 10.0).unwrap().sample(g.nodes()).unwrap();
        let m = caccioppoli_margin(&prob, &zero, &pair, 0.0, &phi, &g).unwrap();
        assert_eq!((m.lhs, m.rhs), (0.0, 0.0));
        assert!(m.holds());
        let l = local_estimate_margin(&prob, &u, &pair, 0.0, &zero, 0.5, &g).unwrap();
        assert_eq!((l.margin.lhs, l.margin.rhs, l.c_tilde), (0.0, 0.0, 0.0));
    }

    #[test]
    fn shift_outside_range_rejected() {
        let (prob, u, g) = setup(400);
        let phi = TestFunction::bump(0.1, 10.0).unwrap().sample(g.nodes()).unwrap();
        let pair = PsiGPair::power(1.0);
        assert!(matches!(caccioppoli_margin(&prob, &u, &pair, 1.0, &phi, &g), Err(Error::ShiftNotBelowC { .. })));
        assert!(matches!(caccioppoli_margin(&prob, &u, &pair, -1.0, &phi, &g), Err(Error::ShiftBelowSigma0 { .. })));
        let neg = phi.scale(-1.0);
        assert!(matches!(caccioppoli_margin(&prob, &u, &pair, 0.0, &neg, &g), Err(Error::NegativeValue { .. })));
    }

    #[test]
    fn local_estimate() {
        let (prob, u, g) = setup(4000);
        let pair = PsiGPair::power(1.0);
        let phi = TestFunction::bump(0.1, 10.0).unwrap().sample(g.nodes()).unwrap();
        let global = caccioppoli_margin(&prob, &u, &pair, 0.0, &phi, &g).unwrap();
        let big = local_estimate_margin(&prob, &u, &pair, 0.0, &phi, 2.5, &g).unwrap();
        assert_eq!(big.c_tilde, 0.0);
        assert_eq!(big.margin.lhs, global.lhs);
        assert_eq!(big.margin.rhs, global.rhs);
        let small = local_estimate_margin(&prob, &u, &pair, 0.0, &phi, 0.5, &g).unwrap();
        assert!(small.c_tilde != 0.0);
        assert!(small.margin.holds(), "{small:?}");
    }

    #[test]
    fn truncation() {
        let nodes: Vec<f64> = (0..200).map(|i| 0.05 * i as f64).collect();
        let u = make_talenti_profile(3, 2.0, 0.0, 3.0, &nodes).unwrap();
        let t = truncate_profile(&u, 0.1, 0.8).unwrap();
        assert_eq!(t.values()[0], 0.8);
        assert_eq!(t.derivative_values().unwrap()[0], 0.0);
        let last = nodes.len() - 1;
        assert!((t.values()[last] - u.values()[last] - 0.1).abs() < 1e-15);
        let free = truncate_profile(&u, 0.1, 5.0).unwrap();
        assert!(free.values().iter().zip(u.values()).all(|(a, b)| (a - b - 0.1).abs() < 1e-15));
        assert!(truncate_profile(&u, 0.8, 0.8).is_err());
    }
}
