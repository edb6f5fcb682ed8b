//! Numerical checks of the structural hypotheses: the `B_p` weight
//! condition, the `(Ψ, g)` inequality, the behaviour of `Θ` and `Ψ/g` near
//! zero, and the vanishing of the tail integrals.

use crate::error::{invalid, Error, Result};
use crate::model::{DomainKind, PdiProblem, PsiGPair, RadialDomain, RadialProfile, WeightFunction};
use crate::radial::{geomspace, radial_derivative, Grading, QuadratureGrid};

/// Relative slack in `g Ψ' + C Ψ <= tol · Ψ`.
pub const PSI_G_TOL: f64 = 1e-8;
/// Relative change tolerated between successive nested integrals.
pub const BP_STABILITY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpMethod {
    /// `r^α` near the origin: integrable iff `α/(p-1) < n`.
    AnalyticPower,
    /// Integrals over annuli shrinking toward the origin.
    NestedAnnuli,
    /// The origin is not interior, so only compact interior sets matter.
    CompactInterior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpReport {
    pub holds: bool,
    pub integral_samples: Vec<f64>,
    pub method: BpMethod,
}

/// Local integrability of `a^{-1/(p-1)}`.
pub fn check_bp_weight(a: &WeightFunction, p: f64, domain: &RadialDomain, grid: &QuadratureGrid) -> Result<BpReport> {
    if !(p > 1.0) {
        return Err(invalid(format!("exponent p must satisfy p > 1, got {p}")));
    }
    let q = -1.0 / (p - 1.0);
    let measure = domain.measure();
    let integrand = |r: f64| a.eval(r).powf(q);
    let interior_origin = domain.touches_origin() && domain.kind() != DomainKind::Interval;

    if !interior_origin {
        let nodes = &grid.nodes()[1..grid.len() - 1];
        let vals: Vec<f64> = nodes.iter().map(|&r| integrand(r)).collect();
        let inner = QuadratureGrid::from_nodes(nodes.to_vec(), measure, false, grid.grading())?;
        let total = inner.integrate_samples(&vals);
        return Ok(BpReport { holds: total.is_finite(), integral_samples: vec![total], method: BpMethod::CompactInterior });
    }

    let positive_away = grid.nodes().iter().all(|&r| integrand(r).is_finite());
    if let Some((coeff, alpha)) = a.origin_power() {
        if coeff > 0.0 {
            let dim = domain.n() as f64;
            let holds = positive_away && alpha / (p - 1.0) < dim;
            let sample = if holds { measure.power_cell(coeff.powf(q), alpha * q, domain.r_max()) } else { f64::INFINITY };
            return Ok(BpReport { holds, integral_samples: vec![sample], method: BpMethod::AnalyticPower });
        }
    }

    let r_max = domain.r_max();
    let decades = ((r_max / grid.r_first()).log10().floor() as i32).clamp(2, 12);
    let per_decade = (grid.len() / decades as usize).clamp(32, 400);
    let nested = |scale: usize| -> Result<Vec<f64>> {
        (1..=decades)
            .map(|k| {
                let inner = r_max * 10f64.powi(-k);
                let nodes = geomspace(inner, r_max, scale * per_decade * k as usize + 1);
                let g = QuadratureGrid::from_nodes(nodes, measure, false, Grading::Log)?;
                let vals: Vec<f64> = g.nodes().iter().map(|&r| integrand(r)).collect();
                Ok(g.integrate_samples(&vals))
            })
            .collect()
    };
    let coarse = nested(1)?;
    let fine = nested(2)?;
    let finite = coarse.iter().chain(&fine).all(|v| v.is_finite());
    let holds = finite && positive_away && {
        let m = coarse.len();
        let settled = (coarse[m - 1] / coarse[m - 2] - 1.0).abs() < BP_STABILITY;
        let refined = coarse.iter().zip(&fine).all(|(c, f)| ((f - c) / f).abs() < BP_STABILITY);
        settled && refined
    };
    Ok(BpReport { holds, integral_samples: coarse, method: BpMethod::NestedAnnuli })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiGReport {
    pub holds: bool,
    /// `inf_t -g(t) Ψ'(t) / Ψ(t)` over the samples.
    pub max_c: f64,
    pub worst_t: f64,
    /// `max_t |g Ψ'/Ψ + C|`, relative to `max(1, C)`; zero for equality pairs.
    pub equality_defect: f64,
    pub samples: usize,
}

/// `g(t) Ψ'(t) <= -C Ψ(t)` at every sample, optionally restricted to `[k1, k2]`.
pub fn check_psi_g_condition(pair: &PsiGPair, samples: &[f64], interval: Option<(f64, f64)>) -> Result<PsiGReport> {
    let ts: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|&t| interval.is_none_or(|(k1, k2)| t >= k1 && t <= k2))
        .collect();
    if ts.is_empty() {
        return Err(invalid("no sample points for the (Ψ, g) check"));
    }
    let scale = pair.c.abs().max(1.0);
    let mut max_c = f64::INFINITY;
    let mut worst_t = ts[0];
    let mut defect: f64 = 0.0;
    let mut holds = true;
    for &t in &ts {
        if !(t > 0.0) {
            return Err(invalid(format!("sample t = {t} must be positive")));
        }
        let psi = pair.psi.value(t);
        let g = pair.g.value(t);
        if !(psi > 0.0) {
            return Err(Error::NonPositivePair { which: "Ψ", t, value: psi });
        }
        if !(g > 0.0) {
            return Err(Error::NonPositivePair { which: "g", t, value: g });
        }
        let ratio = g * pair.psi.derivative(t) / psi;
        if ratio + pair.c > PSI_G_TOL * scale {
            holds = false;
        }
        if -ratio < max_c {
            max_c = -ratio;
            worst_t = t;
        }
        defect = defect.max((ratio + pair.c).abs() / scale);
    }
    Ok(PsiGReport { holds, max_c, worst_t, equality_defect: defect, samples: ts.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NearZero {
    /// Nonincreasing in `t` on the probed neighbourhood of zero.
    Nonincreasing,
    Bounded,
    FailsBoth,
}

impl NearZero {
    pub fn acceptable(self) -> bool {
        self != NearZero::FailsBoth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaReport {
    pub theta: NearZero,
    pub psi_over_g: NearZero,
}

impl ThetaReport {
    pub fn acceptable(&self) -> bool {
        self.theta.acceptable() && self.psi_over_g.acceptable()
    }
}

/// `t = 10^{-k/2}` for `k = 0..=24`.
pub fn default_probe() -> Vec<f64> {
    (0..=24).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect()
}

/// Classifies `Θ = Ψ g^{p-1}` and `Ψ/g` along a probe decreasing to zero.
pub fn check_theta_behavior(pair: &PsiGPair, p: f64, probe: &[f64]) -> Result<ThetaReport> {
    if probe.len() < 4 {
        return Err(invalid("the probe sequence needs at least 4 points"));
    }
    if probe.windows(2).any(|w| !(w[1] < w[0])) || !(probe[probe.len() - 1] > 0.0) {
        return Err(invalid("the probe must decrease strictly within (0, t0]"));
    }
    let theta: Vec<f64> = probe.iter().map(|&t| pair.theta(t, p)).collect();
    let ratio: Vec<f64> = probe.iter().map(|&t| pair.psi.value(t) / pair.g.value(t)).collect();
    Ok(ThetaReport { theta: classify(&theta), psi_over_g: classify(&ratio) })
}

// values are ordered along decreasing t
fn classify(v: &[f64]) -> NearZero {
    let finite = v.iter().all(|x| x.is_finite());
    if finite && v.windows(2).all(|w| w[1] > w[0]) {
        return NearZero::Nonincreasing;
    }
    if finite {
        let half = v.len() / 2;
        let head = v[..half].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tail = v[half..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if tail <= 1.01 * head {
            return NearZero::Bounded;
        }
    }
    if v.windows(2).all(|w| w[1] >= w[0]) {
        return NearZero::Nonincreasing;
    }
    NearZero::FailsBoth
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub converges: bool,
}

/// `Z1(R) = Ψ(R) ∫_{K ∩ {u >= R/2}} |u'|^{p-1} a` and
/// `Z2(R) = Ψ(R) ∫_{K ∩ {u >= R/2}} Φ(u) b` along `r_sequence`, where `K` is
/// the radial shell `[k.0, k.1]`.
///
/// Converges when both `|Z|` sequences are nonincreasing over the second half
/// of the sequence and end below `tol` times their maximum.
pub fn check_vanishing_tails(
    problem: &PdiProblem,
    u: &RadialProfile,
    pair: &PsiGPair,
    k: (f64, f64),
    r_sequence: &[f64],
    grid: &QuadratureGrid,
    tol: f64,
) -> Result<TailReport> {
    if r_sequence.is_empty() || r_sequence.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("R sequence must be nonempty and increasing"));
    }
    let u = grid.bind(u)?;
    let du = radial_derivative(&u)?;
    let r = grid.nodes();
    let uv = u.values();
    let grad: Vec<f64> = du
        .values()
        .iter()
        .zip(r)
        .map(|(d, &x)| d.abs().powf(problem.p - 1.0) * problem.a.eval(x))
        .collect();
    let source: Vec<f64> = uv.iter().zip(r).map(|(&v, &x)| problem.phi.value(v) * problem.b.eval(x)).collect();
    let mut z1 = Vec::with_capacity(r_sequence.len());
    let mut z2 = Vec::with_capacity(r_sequence.len());
    for &big_r in r_sequence {
        let mask: Vec<bool> = r.iter().zip(uv).map(|(&x, &v)| x >= k.0 && x <= k.1 && v >= big_r / 2.0).collect();
        let psi = pair.psi.value(big_r);
        z1.push(psi * grid.integrate_masked(&grad, &mask));
        z2.push(psi * grid.integrate_masked(&source, &mask));
    }
    let converges = vanishes(&z1, tol) && vanishes(&z2, tol);
    Ok(TailReport { z1, z2, converges })
}

fn vanishes(z: &[f64], tol: f64) -> bool {
    let a: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    if a.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let peak = a.iter().cloned().fold(0.0, f64::max);
    let last = *a.last().unwrap();
    if last == 0.0 {
        return true;
    }
    let half = a.len() / 2;
    a[half..].windows(2).all(|w| w[1] <= w[0]) && last <= tol * peak
}

/// Everything checked about a problem, a candidate solution and a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub bp: BpReport,
    pub psi_g: PsiGReport,
    pub theta: ThetaReport,
    /// `u` vanishes at some node, so the behaviour on `{u = 0}` is not settled
    /// by construction.
    pub u_touches_zero: bool,
    pub flags: Vec<String>,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.bp.holds && self.psi_g.holds && self.theta.acceptable()
    }
}

/// Runs the weight, pair and `Θ` checks, sampling the pair on the range of `u`.
pub fn check_assumptions(problem: &PdiProblem, u: &RadialProfile, pair: &PsiGPair, grid: &QuadratureGrid) -> Result<AssumptionReport> {
    let bp = check_bp_weight(&problem.a, problem.p, &problem.domain, grid)?;
    let u = grid.bind(u)?;
    let positive: Vec<f64> = u.values().iter().copied().filter(|&v| v > 0.0).collect();
    let samples = if positive.is_empty() {
        geomspace(1e-6, 1e6, 241)
    } else {
        let lo = positive.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = positive.iter().cloned().fold(0.0, f64::max);
        if hi > lo {
            geomspace(lo, hi, 241)
        } else {
            vec![lo]
        }
    };
    let psi_g = check_psi_g_condition(pair, &samples, None)?;
    let theta = check_theta_behavior(pair, problem.p, &default_probe())?;
    let u_touches_zero = u.values().iter().any(|&v| v <= 0.0);
    let mut flags = Vec::new();
    if u_touches_zero {
        flags.push("u vanishes on grid nodes; behaviour on {u = 0} not settled by construction".to_string());
    }
    if !bp.holds {
        flags.push("a^{-1/(p-1)} is not locally integrable".to_string());
    }
    if !psi_g.holds {
        flags.push(format!("g Ψ' <= -C Ψ fails at t = {} (largest valid C = {})", psi_g.worst_t, psi_g.max_c));
    }
    if !theta.acceptable() {
        flags.push("Θ or Ψ/g is neither nonincreasing nor bounded near 0".to_string());
    }
    Ok(AssumptionReport { bp, psi_g, theta, u_touches_zero, flags })
}

/// Whether a construction may proceed.
#[derive(Debug, Clone, Copy)]
pub enum Gate<'a> {
    Verified(&'a AssumptionReport),
    /// Explicitly skip the hypothesis checks.
    Waived,
}

impl Gate<'_> {
    pub fn check(&self) -> Result<()> {
        match self {
            Gate::Waived => Ok(()),
            Gate::Verified(r) if r.holds() => Ok(()),
            Gate::Verified(r) => Err(Error::AssumptionFailed(r.flags.join("; "))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Coefficient, ScalarFn};

    fn ts() -> Vec<f64> {
        geomspace(1e-6, 1e2, 400)
    }

    #[test]
    fn bp_examples() {
        let d = RadialDomain::ball(3, 1.0).unwrap();
        let g = QuadratureGrid::new(&d, 400, Grading::Log).unwrap();
        for p in [1.5, 2.0, 4.0] {
            assert!(check_bp_weight(&WeightFunction::Constant(1.0), p, &d, &g).unwrap().holds);
        }
        let r2 = check_bp_weight(&WeightFunction::Power { exponent: 2.0 }, 2.0, &d, &g).unwrap();
        assert!(r2.holds);
        assert_eq!(r2.method, BpMethod::AnalyticPower);
        let e = WeightFunction::ExpPower { coeff: -1.0, exponent: -1.0 };
        let re = check_bp_weight(&e, 2.0, &d, &g).unwrap();
        assert!(!re.holds);
        assert_eq!(re.method, BpMethod::NestedAnnuli);
    }

    #[test]
    fn bp_numeric_agrees_with_power_criterion() {
        let d = RadialDomain::ball(3, 1.0).unwrap();
        let g = QuadratureGrid::new(&d, 400, Grading::Log).unwrap();
        for (alpha, expect) in [(1.0, true), (2.5, true), (3.5, false), (5.0, false)] {
            let w = WeightFunction::Power { exponent: alpha };
            let tab = WeightFunction::tabulated(
                RadialProfile::from_fn(&geomspace(1e-14, 2.0, 3000), |r| r.powf(alpha)).unwrap(),
            )
            .unwrap();
            assert_eq!(check_bp_weight(&w, 2.0, &d, &g).unwrap().holds, expect, "alpha {alpha}");
            assert_eq!(check_bp_weight(&tab, 2.0, &d, &g).unwrap().holds, expect, "tabulated alpha {alpha}");
        }
    }

    #[test]
    fn reference_rows_hold() {
        let rows = PsiGPair::reference_rows();
        for (i, pair) in rows.iter().enumerate() {
            let rep = check_psi_g_condition(pair, &ts(), None).unwrap();
            assert!(rep.holds, "{}", pair.name);
            if i == 0 || i == 3 {
                assert!(rep.equality_defect < 1e-8, "{} defect {}", pair.name, rep.equality_defect);
            }
        }
        let rep = check_psi_g_condition(&PsiGPair::power(1.7), &ts(), None).unwrap();
        assert!((rep.max_c - 1.7).abs() < 1e-12);
        let log = check_psi_g_condition(&rows[1], &ts(), None).unwrap();
        assert!(log.max_c >= 1.0 - 1e-12 && log.worst_t < 1e-5);
    }

    #[test]
    fn too_large_c_fails() {
        let mut pair = PsiGPair::power(1.0);
        pair.c = 1.1;
        let rep = check_psi_g_condition(&pair, &ts(), None).unwrap();
        assert!(!rep.holds);
    }

    #[test]
    fn nonpositive_pair_rejected() {
        let pair = PsiGPair::custom("bad", ScalarFn::Constant(-1.0), ScalarFn::identity(), 0.0, crate::model::PsiMonotonicity::Nonincreasing);
        assert!(matches!(check_psi_g_condition(&pair, &ts(), None), Err(Error::NonPositivePair { .. })));
    }

    #[test]
    fn interval_restriction() {
        let pair = PsiGPair::log_product(std::f64::consts::E).unwrap();
        let rep = check_psi_g_condition(&pair, &ts(), Some((1.0, 10.0))).unwrap();
        assert!(rep.max_c > 1.2);
        assert!(rep.samples < 400);
    }

    #[test]
    fn theta_examples() {
        let probe = default_probe();
        let r = check_theta_behavior(&PsiGPair::power(1.0), 2.0, &probe).unwrap();
        assert_eq!(r.theta, NearZero::Bounded);
        assert_eq!(r.psi_over_g, NearZero::Nonincreasing);
        let r = check_theta_behavior(&PsiGPair::power(0.5), 2.0, &probe).unwrap();
        assert_eq!(r.theta, NearZero::Bounded);
        assert_eq!(r.psi_over_g, NearZero::Nonincreasing);
        let e = PsiGPair::custom("exp", ScalarFn::ExpDecay { rate: 1.0 }, ScalarFn::Constant(1.0), 1.0, crate::model::PsiMonotonicity::Nonincreasing);
        let r = check_theta_behavior(&e, 2.0, &probe).unwrap();
        assert_eq!(r.theta, NearZero::Nonincreasing);
        assert_eq!(r.psi_over_g, NearZero::Nonincreasing);
    }

    #[test]
    fn theta_fails_both_for_oscillating_growth() {
        let osc = ScalarFn::Table {
            t: default_probe().into_iter().rev().collect(),
            values: default_probe().iter().rev().enumerate().map(|(i, t)| (1.0 + 0.9 * (i as f64 * 2.0).sin()) * t.powf(-0.2)).collect(),
        };
        let pair = PsiGPair::custom("osc", osc, ScalarFn::Constant(1.0), 0.0, crate::model::PsiMonotonicity::Increasing);
        let r = check_theta_behavior(&pair, 2.0, &default_probe()).unwrap();
        assert_eq!(r.psi_over_g, NearZero::FailsBoth);
    }

    #[test]
    fn tails_vanish_for_bounded_u() {
        let d = RadialDomain::full_space(3, 1e3).unwrap();
        let g = QuadratureGrid::new(&d, 800, Grading::Log).unwrap();
        let u = crate::model::make_talenti_profile(3, 2.0, 0.0, 3.0, g.nodes()).unwrap();
        let b = WeightFunction::tabulated(u.abs_pow(4.0).scale(3.0)).unwrap();
        let prob = PdiProblem::new(d, 2.0, WeightFunction::Constant(1.0), Coefficient::Weight(b), ScalarFn::identity()).unwrap();
        let rep = check_vanishing_tails(&prob, &u, &PsiGPair::power(1.0), (1e-6, 1e3), &[4.0], &g, 1e-3).unwrap();
        assert_eq!(rep.z1, vec![0.0]);
        assert_eq!(rep.z2, vec![0.0]);
        assert!(rep.converges);
    }

    #[test]
    fn tails_decay_for_singular_u() {
        let d = RadialDomain::annulus(3, 1e-8, 1.0).unwrap();
        let g = QuadratureGrid::new(&d, 1200, Grading::Log).unwrap();
        let u = RadialProfile::from_fn_with_derivative(g.nodes(), |r| r.powf(-0.5), |r| -0.5 * r.powf(-1.5)).unwrap();
        let prob = PdiProblem::new(d, 2.0, WeightFunction::Constant(1.0), Coefficient::zero(), ScalarFn::identity()).unwrap();
        let rep = check_vanishing_tails(&prob, &u, &PsiGPair::power(1.0), (1e-8, 1.0), &[10.0, 100.0, 1000.0], &g, 1e-3).unwrap();
        assert!(rep.z1[0] > 0.0);
        assert!(rep.z1.windows(2).all(|w| w[1] < w[0]));
        assert!(rep.converges);
    }
}
