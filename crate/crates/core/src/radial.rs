//! Radial quadrature and discrete differential operators.

use std::borrow::Cow;

use crate::error::{invalid, Error, Result};
use crate::model::{Coefficient, RadialDomain, RadialMeasure, RadialProfile, WeightFunction};

/// Default inner radius for problems whose domain reaches the origin.
pub const DEFAULT_R_MIN: f64 = 1e-6;
/// Default outer truncation radius for full-space problems.
pub const DEFAULT_R_MAX: f64 = 1e3;
pub const DEFAULT_NODES: usize = 4000;

/// Node placement strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    Log,
    /// Log-spaced up to `split`, uniform beyond it.
    Hybrid { split: f64 },
}

/// Composite nonuniform Simpson rule on a graded radial grid.
///
/// `integrate` returns `∫_{r_0}^{r_N} f(r) density(r) dr` plus, when the
/// domain reaches the origin, the contribution of the cell `[0, r_0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    measure_weights: Vec<f64>,
    measure: RadialMeasure,
    grading: Grading,
    closes_origin: bool,
}

/// Order of the composite rule (error `O(h^4)`).
pub const QUADRATURE_ORDER: u32 = 4;

impl QuadratureGrid {
    pub fn new(domain: &RadialDomain, n_nodes: usize, grading: Grading) -> Result<Self> {
        let inner = if domain.touches_origin() {
            match grading {
                Grading::Uniform => domain.r_max() * 1e-9,
                _ => DEFAULT_R_MIN.min(domain.r_max() * 1e-6),
            }
        } else {
            domain.r_min()
        };
        Self::with_inner(domain, n_nodes, grading, inner)
    }

    /// Like [`new`](Self::new) but with an explicit innermost node for
    /// domains touching the origin.
    pub fn with_inner(domain: &RadialDomain, n_nodes: usize, grading: Grading, inner: f64) -> Result<Self> {
        if n_nodes < 5 {
            return Err(invalid(format!("a quadrature grid needs at least 5 nodes, got {n_nodes}")));
        }
        let lo = if domain.touches_origin() { inner } else { domain.r_min() };
        let hi = domain.r_max();
        if !(lo > 0.0 && lo < hi) {
            return Err(invalid(format!("innermost node {lo} must lie in (0, {hi})")));
        }
        let nodes = match grading {
            Grading::Uniform => linspace(lo, hi, n_nodes),
            Grading::Log => geomspace(lo, hi, n_nodes),
            Grading::Hybrid { split } => {
                if !(split > lo && split < hi) {
                    return Err(invalid(format!("hybrid split {split} must lie in ({lo}, {hi})")));
                }
                let span = (split / lo).ln() + (hi - split) / split;
                let n_log = (((split / lo).ln() / span) * (n_nodes - 1) as f64).round().max(2.0) as usize;
                let n_uni = n_nodes - n_log;
                let mut v = geomspace(lo, split, n_log + 1);
                v.pop();
                v.extend(linspace(split, hi, n_uni));
                v
            }
        };
        Self::from_nodes(nodes, domain.measure(), domain.touches_origin(), grading)
    }

    pub fn from_nodes(nodes: Vec<f64>, measure: RadialMeasure, closes_origin: bool, grading: Grading) -> Result<Self> {
        if nodes.len() < 5 {
            return Err(invalid("a quadrature grid needs at least 5 nodes"));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) || !(nodes[0] > 0.0) {
            return Err(invalid("grid nodes must be positive and strictly increasing"));
        }
        let weights = simpson_weights(&nodes);
        let measure_weights = nodes.iter().zip(&weights).map(|(&r, &w)| w * measure.density(r)).collect();
        Ok(Self { nodes, weights, measure_weights, measure, grading, closes_origin })
    }

    /// The default full-space grid: log-spaced on `(1e-6, 1e3)` with 4000 nodes.
    pub fn default_for(domain: &RadialDomain) -> Result<Self> {
        Self::new(domain, DEFAULT_NODES, Grading::Log)
    }

    /// The grid obtained by inserting a node in every cell (spacing halved).
    pub fn refined(&self) -> Result<Self> {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(match self.grading {
                Grading::Log => (w[0] * w[1]).sqrt(),
                _ => 0.5 * (w[0] + w[1]),
            });
        }
        nodes.push(*self.nodes.last().unwrap());
        Self::from_nodes(nodes, self.measure, self.closes_origin, self.grading)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Plain `dr` weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `dr` weights multiplied by the radial density.
    pub fn measure_weights(&self) -> &[f64] {
        &self.measure_weights
    }

    pub fn measure(&self) -> RadialMeasure {
        self.measure
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_last(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn closes_origin(&self) -> bool {
        self.closes_origin
    }

    /// Measure of the cell `[0, r_0]` (zero when the domain does not reach the origin).
    pub fn cap_volume(&self) -> f64 {
        if self.closes_origin {
            self.measure.primitive(self.nodes[0])
        } else {
            0.0
        }
    }

    /// Quadrature of nodal samples; the origin cell uses the first sample.
    pub fn integrate_samples(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        let body: f64 = self.measure_weights.iter().zip(values).map(|(w, v)| w * v).sum();
        if self.closes_origin {
            body + self.cap_volume() * values[0]
        } else {
            body
        }
    }

    /// Quadrature of `values` restricted to nodes where `mask` holds.
    pub fn integrate_masked(&self, values: &[f64], mask: &[bool]) -> f64 {
        let body: f64 = self
            .measure_weights
            .iter()
            .zip(values)
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|((w, v), _)| w * v)
            .sum();
        if self.closes_origin && mask[0] {
            body + self.cap_volume() * values[0]
        } else {
            body
        }
    }

    /// Samples `profile` on the nodes, resampling only when needed.
    pub fn bind<'a>(&self, profile: &'a RadialProfile) -> Result<Cow<'a, RadialProfile>> {
        profile.on_nodes(&self.nodes)
    }
}

/// Something that can be evaluated at a radius.
pub trait RadialFunction {
    fn eval_at(&self, r: f64) -> f64;

    /// Leading behaviour `coeff · r^exponent` near the origin, if known.
    fn origin_power(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<F: Fn(f64) -> f64> RadialFunction for F {
    fn eval_at(&self, r: f64) -> f64 {
        self(r)
    }
}

impl RadialFunction for WeightFunction {
    fn eval_at(&self, r: f64) -> f64 {
        self.eval(r)
    }

    fn origin_power(&self) -> Option<(f64, f64)> {
        WeightFunction::origin_power(self)
    }
}

impl RadialFunction for Coefficient {
    fn eval_at(&self, r: f64) -> f64 {
        self.eval(r)
    }

    fn origin_power(&self) -> Option<(f64, f64)> {
        Coefficient::origin_power(self)
    }
}

impl RadialFunction for RadialProfile {
    fn eval_at(&self, r: f64) -> f64 {
        self.eval(r)
    }
}

/// `∫_Ω f(|x|) dx` over the grid's domain.
pub fn integrate_radial(f: &impl RadialFunction, grid: &QuadratureGrid) -> Result<f64> {
    let mut body = 0.0;
    for (&r, &w) in grid.nodes.iter().zip(&grid.measure_weights) {
        let v = f.eval_at(r);
        if !v.is_finite() {
            return Err(Error::NonFinite { what: "integrand", r, value: v });
        }
        body += w * v;
    }
    if !grid.closes_origin {
        return Ok(body);
    }
    let r0 = grid.nodes[0];
    let cap = match f.origin_power() {
        Some((coeff, alpha)) if alpha != 0.0 => grid.measure.power_cell(coeff, alpha, r0),
        _ => grid.cap_volume() * f.eval_at(r0),
    };
    if !cap.is_finite() {
        return Err(Error::NonFinite { what: "integrand near the origin", r: 0.0, value: cap });
    }
    Ok(body + cap)
}

/// `w'` on the profile's grid: the carried analytic derivative when present,
/// otherwise second-order finite differences (one-sided at the ends).
pub fn radial_derivative(w: &RadialProfile) -> Result<RadialProfile> {
    let r = w.grid();
    if let Some(d) = w.derivative_values() {
        return RadialProfile::new(r.to_vec(), d.to_vec());
    }
    let v = w.values();
    let n = r.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = r[i] - r[i - 1];
        let h1 = r[i + 1] - r[i];
        d[i] = (h0 * h0 * v[i + 1] - h1 * h1 * v[i - 1] + (h1 * h1 - h0 * h0) * v[i]) / (h0 * h1 * (h0 + h1));
    }
    d[0] = three_point_end(r[0], &r[0..3], &v[0..3]);
    d[n - 1] = three_point_end(r[n - 1], &r[n - 3..], &v[n - 3..]);
    RadialProfile::new(r.to_vec(), d)
}

fn three_point_end(at: f64, x: &[f64], y: &[f64]) -> f64 {
    let w = fd_weights(at, x, 1);
    w[1].iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `|s|^{p-2} s`, with the degenerate value `0` at `s = 0` for every `p > 1`.
pub fn p_power(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(p - 2.0) * s
    }
}

/// `-Δ_{p,a} w = -r^{1-n} (r^{n-1} a |w'|^{p-2} w')'` on the interior nodes.
///
/// With an analytic derivative the flux is formed at the nodes and
/// differentiated with five-point stencils; otherwise the flux lives on the
/// staggered midpoint grid and is differenced conservatively.
pub fn p_laplace_radial(w: &RadialProfile, a: &WeightFunction, p: f64, grid: &QuadratureGrid) -> Result<RadialProfile> {
    if !(p > 1.0) {
        return Err(invalid(format!("exponent p must satisfy p > 1, got {p}")));
    }
    let w = grid.bind(w)?;
    let r = grid.nodes();
    let n = r.len();
    let measure = grid.measure();
    let mut out = vec![0.0; n - 2];
    match w.derivative_values() {
        Some(d) => {
            let flux: Vec<f64> = (0..n).map(|j| a.eval(r[j]) * measure.density(r[j]) * p_power(d[j], p)).collect();
            for i in 1..n - 1 {
                let start = i.saturating_sub(2).min(n - 5);
                let wts = fd_weights(r[i], &r[start..start + 5], 1);
                let df: f64 = wts[1].iter().zip(&flux[start..start + 5]).map(|(c, f)| c * f).sum();
                out[i - 1] = -df / measure.density(r[i]);
            }
        }
        None => {
            let v = w.values();
            let flux: Vec<f64> = (0..n - 1)
                .map(|j| {
                    let m = 0.5 * (r[j] + r[j + 1]);
                    let s = (v[j + 1] - v[j]) / (r[j + 1] - r[j]);
                    a.eval(m) * measure.density(m) * p_power(s, p)
                })
                .collect();
            for i in 1..n - 1 {
                let m_lo = 0.5 * (r[i - 1] + r[i]);
                let m_hi = 0.5 * (r[i] + r[i + 1]);
                out[i - 1] = -(flux[i] - flux[i - 1]) / (measure.primitive(m_hi) - measure.primitive(m_lo));
            }
        }
    }
    if let Some((i, v)) = out.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { what: "p-Laplacian", r: r[i + 1], value: *v });
    }
    RadialProfile::new(r[1..n - 1].to_vec(), out)
}

/// End values below this fraction of the peak count as zero.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Checks that nodal samples vanish (up to [`SUPPORT_TOL`] relative) at the
/// outer end and, unless the origin is an interior point, at the inner end.
pub fn require_compact_support(what: &'static str, values: &[f64], grid: &QuadratureGrid) -> Result<()> {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let small = |v: f64| v.abs() <= SUPPORT_TOL * peak;
    let inner_free = grid.closes_origin() && grid.measure().is_spherical();
    if !small(values[values.len() - 1]) || (!inner_free && !small(values[0])) {
        return Err(Error::NotCompactlySupported(what));
    }
    Ok(())
}

/// Checks that nodal samples are nonnegative.
pub fn require_nonnegative(what: &'static str, values: &[f64], grid: &QuadratureGrid) -> Result<()> {
    match values.iter().enumerate().find(|(_, v)| **v < 0.0) {
        Some((i, v)) => Err(Error::NegativeValue { what, r: grid.nodes()[i], value: *v }),
        None => Ok(()),
    }
}

/// Pads an interior-node field with zeros at both ends.
pub fn pad_interior(values: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(values.len() + 2);
    v.push(0.0);
    v.extend_from_slice(values);
    v.push(0.0);
    v
}

/// Finite-difference weights for derivatives `0..=m` at `z` on nodes `x`.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; k];
    let mut ws = vec![0.0; k];
    for i in 0..k {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 0 { 1.0 } else if k == 1 { x } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    v[n - 1] = hi;
    v
}

pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

/// Composite Simpson weights on an arbitrary increasing grid; an odd cell
/// count closes the last cell with the quadratic through the last three nodes.
fn simpson_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let cells = n - 1;
    let mut w = vec![0.0; n];
    let pairs = cells / 2;
    for k in 0..pairs {
        let i = 2 * k;
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let s = h0 + h1;
        w[i] += s / 6.0 * (2.0 - h1 / h0);
        w[i + 1] += s * s * s / (6.0 * h0 * h1);
        w[i + 2] += s / 6.0 * (2.0 - h0 / h1);
    }
    if cells % 2 == 1 {
        let i = n - 3;
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        w[i] += -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        w[i + 1] += h1 * (h1 + 3.0 * h0) / (6.0 * h0);
        w[i + 2] += h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TalentiProfile;
    use std::f64::consts::PI;

    fn ball(n: u32, r: f64) -> RadialDomain {
        RadialDomain::ball(n, r).unwrap()
    }

    #[test]
    fn simpson_exact_for_cubics_on_odd_and_even_grids() {
        for n in [7usize, 8] {
            let x: Vec<f64> = (0..n).map(|i| 0.3 + (i as f64).powf(1.3) * 0.2).collect();
            let w = simpson_weights(&x);
            let (a, b) = (x[0], x[n - 1]);
            let q: f64 = x.iter().zip(&w).map(|(r, w)| w * r * r).sum();
            assert!((q - (b.powi(3) - a.powi(3)) / 3.0).abs() < 1e-12);
        }
        // symmetric pairs integrate cubics exactly
        let x: Vec<f64> = (0..9).map(|i| 0.5 + 0.25 * i as f64).collect();
        let w = simpson_weights(&x);
        let q: f64 = x.iter().zip(&w).map(|(r, w)| w * r * r * r).sum();
        assert!((q - (2.5f64.powi(4) - 0.5f64.powi(4)) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn ball_volume() {
        let g = QuadratureGrid::default_for(&ball(3, 1.0)).unwrap();
        let v = integrate_radial(&|_r: f64| 1.0, &g).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn inverse_radius_in_three_dimensions() {
        let g = QuadratureGrid::default_for(&ball(3, 1.0)).unwrap();
        let v = integrate_radial(&|r: f64| 1.0 / r, &g).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-10, "{v}");
        let w = WeightFunction::Power { exponent: -1.0 };
        let v = integrate_radial(&w, &g).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn half_gaussian_on_interval() {
        let d = RadialDomain::interval(0.0, 8.0).unwrap();
        let g = QuadratureGrid::new(&d, 4001, Grading::Uniform).unwrap();
        let v = integrate_radial(&|r: f64| (-r * r).exp(), &g).unwrap();
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn non_finite_integrand_reports_radius() {
        let g = QuadratureGrid::new(&ball(3, 1.0), 101, Grading::Uniform).unwrap();
        let err = integrate_radial(&|r: f64| if r > 0.5 { f64::NAN } else { 1.0 }, &g).unwrap_err();
        assert!(matches!(err, Error::NonFinite { r, .. } if r > 0.5));
    }

    #[test]
    fn non_integrable_origin_power_is_rejected() {
        let g = QuadratureGrid::default_for(&ball(3, 1.0)).unwrap();
        assert!(integrate_radial(&WeightFunction::Power { exponent: -3.5 }, &g).is_err());
    }

    #[test]
    fn quadrature_converges_at_declared_order() {
        let d = RadialDomain::interval(0.0, 3.0).unwrap();
        let exact = PI.sqrt() / 2.0 * erf_approx(3.0);
        let g1 = QuadratureGrid::new(&d, 41, Grading::Uniform).unwrap();
        let g2 = g1.refined().unwrap();
        let f = |r: f64| (-r * r).exp();
        let e1 = (integrate_radial(&f, &g1).unwrap() - exact).abs();
        let e2 = (integrate_radial(&f, &g2).unwrap() - exact).abs();
        assert!(e1 / e2 > 0.8 * 2f64.powi(QUADRATURE_ORDER as i32), "{e1} {e2}");
    }

    // erf by its Taylor series; accurate to ~1e-16 for |x| <= 3
    fn erf_approx(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..200 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn derivative_examples() {
        let g = QuadratureGrid::new(&ball(3, 2.0), 201, Grading::Uniform).unwrap();
        let sq = RadialProfile::from_fn(g.nodes(), |r| r * r).unwrap();
        let d = radial_derivative(&sq).unwrap();
        for (r, v) in g.nodes().iter().zip(d.values()) {
            assert!((v - 2.0 * r).abs() < 1e-9);
        }
        let c = RadialProfile::from_fn(g.nodes(), |_| 5.0).unwrap();
        assert!(radial_derivative(&c).unwrap().values().iter().all(|v| v.abs() < 1e-12));
        let t = TalentiProfile::new(3, 2.0, 0.0, 3.0).unwrap().sample(g.nodes()).unwrap();
        let d = radial_derivative(&t).unwrap();
        for (r, v) in g.nodes().iter().zip(d.values()) {
            assert!((v + r * (1.0 + r * r).powf(-1.5)).abs() < 1e-14);
        }
        // finite-difference path on the same profile
        let d = radial_derivative(&t.clone().without_derivative()).unwrap();
        for (r, v) in g.nodes().iter().zip(d.values()) {
            assert!((v + r * (1.0 + r * r).powf(-1.5)).abs() < 1e-4);
        }
    }

    #[test]
    fn laplacian_of_r_squared_is_six() {
        let g = QuadratureGrid::default_for(&ball(3, 10.0)).unwrap();
        let one = WeightFunction::Constant(1.0);
        for w in [
            RadialProfile::from_fn(g.nodes(), |r| r * r).unwrap(),
            RadialProfile::from_fn_with_derivative(g.nodes(), |r| r * r, |r| 2.0 * r).unwrap(),
        ] {
            let l = p_laplace_radial(&w, &one, 2.0, &g).unwrap();
            for v in l.values() {
                assert!((v + 6.0).abs() < 1e-6, "{v}");
            }
        }
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let g = QuadratureGrid::new(&ball(3, 10.0), 50, Grading::Log).unwrap();
        let w = RadialProfile::from_fn(g.nodes(), |_| 2.5).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let l = p_laplace_radial(&w, &WeightFunction::Power { exponent: 1.0 }, p, &g).unwrap();
            assert!(l.values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn laplacian_of_talenti_profile() {
        let g = QuadratureGrid::default_for(&RadialDomain::full_space(3, 1e3).unwrap()).unwrap();
        let t = TalentiProfile::new(3, 2.0, 0.0, 3.0).unwrap().sample(g.nodes()).unwrap();
        let l = p_laplace_radial(&t, &WeightFunction::Constant(1.0), 2.0, &g).unwrap();
        let mut worst: f64 = 0.0;
        for (r, v) in l.grid().iter().zip(l.values()) {
            let exact = 3.0 * (1.0 + r * r).powf(-2.5);
            worst = worst.max((v - exact).abs() / exact);
        }
        assert!(worst < 1e-6, "{worst}");
        // staggered path, second order
        let l = p_laplace_radial(&t.without_derivative(), &WeightFunction::Constant(1.0), 2.0, &g).unwrap();
        let worst = l
            .grid()
            .iter()
            .zip(l.values())
            .filter(|(r, _)| **r > 1e-2 && **r < 10.0)
            .map(|(r, v)| (v - 3.0 * (1.0 + r * r).powf(-2.5)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for k in [1usize, 2, 5, 7] {
            let (x, w) = gauss_legendre(k);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * k - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "k={k}: {q} vs {exact}");
        }
    }
}
