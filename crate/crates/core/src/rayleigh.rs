//! Weighted p-Rayleigh quotients `∫ |ξ'|^p dμ2 / ∫ |ξ|^p dμ1`: evaluation,
//! minimization over continuous piecewise-linear functions and parametric
//! probes.
//!
//! The minimizer works on the P1 finite-element space of the grid. Every
//! reported value is the exact quotient of a feasible function (up to the
//! Gauss rule used per cell), so it bounds the infimum from above.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::hardy::sides;
use crate::model::{HardyData, RadialProfile};
use crate::radial::{gauss_legendre, p_power, QuadratureGrid};
use crate::testfn::LogCutoff;

/// Gauss points per cell.
const GAUSS_POINTS: usize = 7;
/// Largest relative error accepted by the gradient self-test.
pub const GRADIENT_SELF_TEST_TOL: f64 = 1e-5;

/// `∫ |ξ'|^p dμ2 / ∫ |ξ|^p dμ1` with the Hardy constant left out.
pub fn rayleigh_quotient(hd: &HardyData, xi: &RadialProfile, grid: &QuadratureGrid) -> Result<f64> {
    let xi = grid.bind(xi)?;
    let (num, den) = {
        let (l, r) = sides(hd, &xi, grid, None)?;
        (r, l)
    };
    if !(den > 0.0) {
        return Err(Error::OrthogonalToMu1(den));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `ξ = 0` at both ends of the grid.
    DirichletBoth,
    /// `ξ = 0` at the outer end only; the inner value is free.
    DirichletOuter,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// On spherical measures the best [`Init::TalentiLike`] exponent from a
    /// scan over `s = 0.25, 0.5, ..., 8`; otherwise [`Init::Tent`].
    Auto,
    /// `(1 + r^{p/(p-1)})^{-exponent}`, forced to vanish at Dirichlet ends.
    TalentiLike { exponent: f64 },
    /// Hat function peaking mid-grid (in `ln r` on log grids).
    Tent,
    Supplied(RadialProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerOptions {
    pub max_iterations: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Step contraction during backtracking.
    pub shrink: f64,
    /// Step expansion after an accepted step.
    pub grow: f64,
    /// Stop once the relative change of the quotient falls below this.
    pub convergence_tol: f64,
    pub boundary: Boundary,
    pub init: Init,
    /// Run the gradient self-test before descending.
    pub self_test: bool,
    pub seed: u64,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            armijo: 1e-4,
            shrink: 0.5,
            grow: 2.0,
            convergence_tol: 1e-11,
            boundary: Boundary::DirichletBoth,
            init: Init::Auto,
            self_test: true,
            seed: 0,
        }
    }
}

impl MinimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(invalid("convergence_tol must be positive"));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) || !(self.shrink > 0.0 && self.shrink < 1.0) || !(self.grow >= 1.0) {
            return Err(invalid("backtracking needs 0 < armijo < 1, 0 < shrink < 1 and grow >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimization {
    pub value: f64,
    pub minimizer: RadialProfile,
    /// Quotient after every accepted step, starting with the initial one.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub gradient_check: Option<f64>,
}

/// The quotient restricted to P1 functions on the grid nodes.
pub struct P1Quotient {
    x: Vec<f64>,
    h: Vec<f64>,
    /// `∫_cell μ2 dr·density`.
    stiff: Vec<f64>,
    /// Gauss weights times `μ1 · density · h`, `GAUSS_POINTS` per cell.
    mass: Vec<f64>,
    /// Gauss abscissae mapped to `[0, 1]`.
    s: Vec<f64>,
    p: f64,
    free: (usize, usize),
    spherical: bool,
}

impl P1Quotient {
    pub fn new(hd: &HardyData, grid: &QuadratureGrid, boundary: Boundary) -> Result<Self> {
        let x = grid.nodes().to_vec();
        let n = x.len();
        let (gx, gw) = gauss_legendre(GAUSS_POINTS);
        let s: Vec<f64> = gx.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let measure = grid.measure();
        let mut h = Vec::with_capacity(n - 1);
        let mut stiff = Vec::with_capacity(n - 1);
        let mut mass = Vec::with_capacity((n - 1) * GAUSS_POINTS);
        for c in 0..n - 1 {
            let hc = x[c + 1] - x[c];
            h.push(hc);
            let mut sc = 0.0;
            for q in 0..GAUSS_POINTS {
                let r = x[c] + s[q] * hc;
                let rho = measure.density(r);
                let w = 0.5 * gw[q] * hc * rho;
                sc += w * hd.mu2_density.eval(r);
                mass.push(w * hd.mu1_density.eval(r));
            }
            stiff.push(sc);
        }
        if let Some(v) = stiff.iter().chain(&mass).find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "cell weight", r: f64::NAN, value: *v });
        }
        let free = match boundary {
            Boundary::DirichletBoth => (1, n - 2),
            Boundary::DirichletOuter => (0, n - 2),
        };
        Ok(Self { x, h, stiff, mass, s, p: hd.p, free, spherical: measure.is_spherical() })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// `(numerator, denominator)`.
    pub fn parts(&self, xi: &[f64]) -> (f64, f64) {
        let p = self.p;
        let mut num = 0.0;
        let mut den = 0.0;
        for c in 0..self.h.len() {
            let d = (xi[c + 1] - xi[c]) / self.h[c];
            num += self.stiff[c] * d.abs().powf(p);
            for q in 0..GAUSS_POINTS {
                let v = xi[c] + self.s[q] * (xi[c + 1] - xi[c]);
                den += self.mass[c * GAUSS_POINTS + q] * v.abs().powf(p);
            }
        }
        (num, den)
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        let (n, d) = self.parts(xi);
        n / d
    }

    /// Quotient and its exact gradient; fixed nodes get zero.
    pub fn value_and_gradient(&self, xi: &[f64]) -> (f64, f64, Vec<f64>) {
        let p = self.p;
        let n = self.x.len();
        let mut gn = vec![0.0; n];
        let mut gd = vec![0.0; n];
        let (mut num, mut den) = (0.0, 0.0);
        for c in 0..self.h.len() {
            let d = (xi[c + 1] - xi[c]) / self.h[c];
            num += self.stiff[c] * d.abs().powf(p);
            let f = self.stiff[c] * p * p_power(d, p) / self.h[c];
            gn[c + 1] += f;
            gn[c] -= f;
            for q in 0..GAUSS_POINTS {
                let m = self.mass[c * GAUSS_POINTS + q];
                let v = xi[c] + self.s[q] * (xi[c + 1] - xi[c]);
                den += m * v.abs().powf(p);
                let dv = m * p * p_power(v, p);
                gd[c] += dv * (1.0 - self.s[q]);
                gd[c + 1] += dv * self.s[q];
            }
        }
        let qv = num / den;
        let mut g: Vec<f64> = gn.iter().zip(&gd).map(|(a, b)| (a - qv * b) / den).collect();
        self.pin(&mut g);
        (qv, den, g)
    }

    fn pin(&self, v: &mut [f64]) {
        let (lo, hi) = self.free;
        for (i, x) in v.iter_mut().enumerate() {
            if i < lo || i > hi {
                *x = 0.0;
            }
        }
    }

    /// Solves `K z = g` on the free nodes with
    /// `K = p(p-1) Σ_c stiff_c max(|d_c|, δ)^{p-2} / h_c^2` assembled as a
    /// tridiagonal matrix.
    fn precondition(&self, xi: &[f64], g: &[f64], den: f64) -> Vec<f64> {
        let p = self.p;
        let cells = self.h.len();
        let slopes: Vec<f64> = (0..cells).map(|c| ((xi[c + 1] - xi[c]) / self.h[c]).abs()).collect();
        let top = slopes.iter().cloned().fold(0.0, f64::max);
        let floor = (1e-8 * top).max(f64::MIN_POSITIVE);
        let k: Vec<f64> = (0..cells)
            .map(|c| p * (p - 1.0) * self.stiff[c] * slopes[c].max(floor).powf(p - 2.0) / (self.h[c] * self.h[c]) / den)
            .collect();
        let (lo, hi) = self.free;
        let m = hi - lo + 1;
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        for j in 0..m {
            let i = lo + j;
            if i > 0 {
                diag[j] += k[i - 1];
            }
            if i < cells {
                diag[j] += k[i];
            }
            if j + 1 < m {
                off[j] = -k[i];
            }
        }
        let rhs: Vec<f64> = g[lo..=hi].to_vec();
        let sol = thomas(&off, &diag, &off, &rhs);
        let mut z = vec![0.0; xi.len()];
        z[lo..=hi].copy_from_slice(&sol);
        z
    }
}

/// Tridiagonal solve (`sub[i]` couples rows `i+1, i`; `sup[i]` rows `i, i+1`).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { sup[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = sup[i] / m;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

fn initial_iterate(q: &P1Quotient, hd: &HardyData, opts: &MinimizerOptions, log_grid: bool) -> Result<Vec<f64>> {
    let x = &q.x;
    let n = x.len();
    let (a, b) = (x[0], x[n - 1]);
    let mut xi: Vec<f64> = match &opts.init {
        Init::Auto => {
            let spherical = hd.mu2_density.eval(1.0).is_finite() && q.spherical;
            let chosen = if spherical {
                let mut best = (f64::INFINITY, 1.0);
                for k in 1..=32 {
                    let s = 0.25 * k as f64;
                    let o = MinimizerOptions { init: Init::TalentiLike { exponent: s }, ..opts.clone() };
                    let cand = initial_iterate(q, hd, &o, log_grid)?;
                    let v = q.value(&cand);
                    if v < best.0 {
                        best = (v, s);
                    }
                }
                Init::TalentiLike { exponent: best.1 }
            } else {
                Init::Tent
            };
            let o = MinimizerOptions { init: chosen, ..opts.clone() };
            return initial_iterate(q, hd, &o, log_grid);
        }
        Init::Supplied(profile) => x.iter().map(|&r| profile.eval(r)).collect(),
        Init::TalentiLike { exponent } => {
            let e = hd.p / (hd.p - 1.0);
            x.iter().map(|&r| (1.0 + r.powf(e)).powf(-exponent) * (1.0 - r / b)).collect()
        }
        Init::Tent => {
            let t: Vec<f64> = if log_grid {
                x.iter().map(|&r| (r / a).ln() / (b / a).ln()).collect()
            } else {
                x.iter().map(|&r| (r - a) / (b - a)).collect()
            };
            t.iter().map(|&s| 1.0 - (2.0 * s - 1.0).abs()).collect()
        }
    };
    xi[n - 1] = 0.0;
    if opts.boundary == Boundary::DirichletBoth {
        xi[0] = 0.0;
    }
    Ok(xi)
}

/// Compares the analytic gradient with central differences along `trials`
/// seeded random directions at a perturbation of `xi`; returns the largest
/// relative error.
pub fn gradient_self_test(q: &P1Quotient, xi: &[f64], trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = xi.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut base = xi.to_vec();
    for v in base.iter_mut() {
        *v += 0.05 * scale * rng.gen_range(-1.0..1.0);
    }
    q.pin_fixed(&mut base, xi);
    let (_, _, g) = q.value_and_gradient(&base);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut dir: Vec<f64> = (0..xi.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        q.pin(&mut dir);
        let dn = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bn = base.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = 1e-5 * bn / dn;
        let plus: Vec<f64> = base.iter().zip(&dir).map(|(b, d)| b + h * d).collect();
        let minus: Vec<f64> = base.iter().zip(&dir).map(|(b, d)| b - h * d).collect();
        let fd = (q.value(&plus) - q.value(&minus)) / (2.0 * h);
        let an: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt() * dn;
        worst = worst.max((fd - an).abs() / an.abs().max(1e-3 * gn).max(f64::MIN_POSITIVE));
    }
    worst
}

impl P1Quotient {
    fn pin_fixed(&self, v: &mut [f64], reference: &[f64]) {
        let (lo, hi) = self.free;
        for i in 0..v.len() {
            if i < lo || i > hi {
                v[i] = reference[i];
            }
        }
    }
}

/// Preconditioned gradient descent with Armijo backtracking on the P1
/// quotient, renormalizing `∫ |ξ|^p dμ1 = 1` after every step.
pub fn minimize_rayleigh(hd: &HardyData, grid: &QuadratureGrid, opts: &MinimizerOptions) -> Result<Minimization> {
    opts.validate()?;
    let q = P1Quotient::new(hd, grid, opts.boundary)?;
    let log_grid = matches!(grid.grading(), crate::radial::Grading::Log);
    let mut xi = initial_iterate(&q, hd, opts, log_grid)?;
    let gradient_check = if opts.self_test {
        let err = gradient_self_test(&q, &xi, 4, opts.seed);
        if !(err < GRADIENT_SELF_TEST_TOL) {
            return Err(Error::AssumptionFailed(format!("gradient self-test failed: relative error {err:e}")));
        }
        Some(err)
    } else {
        None
    };
    let (_, den0) = q.parts(&xi);
    if !(den0 > 0.0) {
        return Err(Error::OrthogonalToMu1(den0));
    }
    normalize(&mut xi, den0, hd.p);
    let (mut value, mut den, mut grad) = q.value_and_gradient(&xi);
    if !value.is_finite() {
        return Err(Error::NonFiniteQuotient { iteration: 0 });
    }
    let mut trace = vec![value];
    let mut step = 1.0;
    let mut converged = false;
    for it in 1..=opts.max_iterations {
        let dir: Vec<f64> = q.precondition(&xi, &grad, den).iter().map(|v| -v).collect();
        let slope: f64 = grad.iter().zip(&dir).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut alpha = step;
        for _ in 0..60 {
            let trial: Vec<f64> = xi.iter().zip(&dir).map(|(x, d)| x + alpha * d).collect();
            let tv = q.value(&trial);
            if tv.is_finite() && tv <= value + opts.armijo * alpha * slope {
                accepted = Some((trial, tv));
                break;
            }
            alpha *= opts.shrink;
        }
        let Some((mut trial, _)) = accepted else {
            converged = true;
            break;
        };
        step = (alpha * opts.grow).min(1e6);
        let (_, d) = q.parts(&trial);
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::NonFiniteQuotient { iteration: it });
        }
        normalize(&mut trial, d, hd.p);
        let (nv, nd, ng) = q.value_and_gradient(&trial);
        if !nv.is_finite() {
            return Err(Error::NonFiniteQuotient { iteration: it });
        }
        let change = (value - nv).abs() / nv.abs().max(f64::MIN_POSITIVE);
        let nv = nv.min(value);
        xi = trial;
        value = nv;
        den = nd;
        grad = ng;
        trace.push(value);
        if change < opts.convergence_tol {
            converged = true;
            break;
        }
    }
    let value = q.value(&xi);
    if let Some(last) = trace.last_mut() {
        *last = last.min(value);
    }
    let minimizer = RadialProfile::new(q.x.clone(), xi)?;
    Ok(Minimization { value, minimizer, trace, converged, gradient_check })
}

fn normalize(xi: &mut [f64], den: f64, p: f64) {
    let s = den.powf(-1.0 / p);
    for v in xi.iter_mut() {
        *v *= s;
    }
}

/// Parametric trial functions for [`sharpness_probe`].
#[derive(Debug, Clone, PartialEq)]
pub enum TrialFamily {
    /// `(1 + r^{p/(p-1)})^{-s}` times a smooth cutoff.
    TalentiPower { cutoff: LogCutoff },
    /// Fixed profiles indexed by the parameter (rounded to an index).
    Profiles(Vec<RadialProfile>),
}

impl TrialFamily {
    pub fn member(&self, param: f64, p: f64, nodes: &[f64]) -> Result<RadialProfile> {
        match self {
            TrialFamily::TalentiPower { cutoff } => {
                let e = p / (p - 1.0);
                RadialProfile::from_fn_with_derivative(
                    nodes,
                    |r| (1.0 + r.powf(e)).powf(-param) * cutoff.value(r),
                    |r| {
                        let base = 1.0 + r.powf(e);
                        let f = base.powf(-param);
                        let df = -param * base.powf(-param - 1.0) * e * r.powf(e - 1.0);
                        df * cutoff.value(r) + f * cutoff.derivative(r)
                    },
                )
            }
            TrialFamily::Profiles(list) => {
                let i = param.round();
                if !(i >= 0.0 && (i as usize) < list.len()) {
                    return Err(invalid(format!("profile index {param} out of range")));
                }
                Ok(list[i as usize].clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub best_quotient: f64,
    pub best_param: f64,
    /// `(param, quotient)` for every member, in parameter order.
    pub values: Vec<(f64, f64)>,
}

/// Evaluates the quotient over the family in parallel and keeps the smallest.
pub fn sharpness_probe(hd: &HardyData, grid: &QuadratureGrid, family: &TrialFamily, params: &[f64]) -> Result<ProbeResult> {
    if params.is_empty() {
        return Err(invalid("the parameter grid is empty"));
    }
    let values: Vec<(f64, f64)> = params
        .par_iter()
        .map(|&s| {
            let xi = family.member(s, hd.p, grid.nodes())?;
            Ok((s, rayleigh_quotient(hd, &xi, grid)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_param, best_quotient) = values
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY), |acc, (s, v)| if v < acc.1 { (s, v) } else { acc });
    Ok(ProbeResult { best_quotient, best_param, values })
}
