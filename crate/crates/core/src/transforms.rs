//! The radial change of variable `t = (p/(p-β)) r^{(p-β)/p}` and the
//! two-weight ODE satisfied by the transformed profile.

use crate::error::{invalid, Error, Result};
use crate::model::{critical_exponent, Extrapolation, RadialProfile};
use crate::radial::{fd_weights, p_power};

/// `t(r) = (p/(p-β)) r^{(p-β)/p}` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeOfVariable {
    pub beta: f64,
    pub p: f64,
}

impl ChangeOfVariable {
    pub fn new(beta: f64, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(invalid(format!("exponent p must satisfy p > 1, got {p}")));
        }
        if !(beta < p) {
            return Err(invalid(format!("change of variable needs beta < p, got beta = {beta}, p = {p}")));
        }
        Ok(Self { beta, p })
    }

    fn k(&self) -> f64 {
        (self.p - self.beta) / self.p
    }

    pub fn t_of_r(&self, r: f64) -> f64 {
        if self.beta == 0.0 {
            return r;
        }
        r.powf(self.k()) / self.k()
    }

    pub fn r_of_t(&self, t: f64) -> f64 {
        if self.beta == 0.0 {
            return t;
        }
        (self.k() * t).powf(1.0 / self.k())
    }

    /// `dt/dr = r^{-β/p}`
    pub fn dt_dr(&self, r: f64) -> f64 {
        r.powf(-self.beta / self.p)
    }
}

/// `v(t) = w(r(t))` on the image of the profile's grid, with
/// `v'(t) = w'(r) r^{β/p}` when `w` carries a derivative.
pub fn radial_change_of_variable(beta: f64, p: f64, w: &RadialProfile) -> Result<(RadialProfile, ChangeOfVariable)> {
    let map = ChangeOfVariable::new(beta, p)?;
    let t: Vec<f64> = w.grid().iter().map(|&r| map.t_of_r(r)).collect();
    let v = match w.derivative_values() {
        Some(d) => {
            let dv = w.grid().iter().zip(d).map(|(&r, &dw)| dw / map.dt_dr(r)).collect();
            RadialProfile::with_derivative(t, w.values().to_vec(), dv)?
        }
        None => RadialProfile::new(t, w.values().to_vec())?,
    };
    // r^e = const · t^{e p/(p-β)}
    let extrapolation = match w.extrapolation() {
        Extrapolation::PowerTail { exponent } => Extrapolation::PowerTail { exponent: exponent / map.k() },
        e => e,
    };
    Ok((v.with_extrapolation(extrapolation), map))
}

/// `N = p(n-β)/(p-β)`, the dimension carried by the transformed equation.
pub fn effective_dimension(n: f64, p: f64, beta: f64) -> f64 {
    p * (n - beta) / (p - beta)
}

/// `-(t^{N-1} |v'|^{p-2} v')' - γ t^{N-1} |v|^{p*_β-2} v` on the interior
/// nodes, with `N` from [`effective_dimension`] and `p*_β = p(n-β)/(n-p)`.
pub fn transformed_residual(v: &RadialProfile, n: u32, p: f64, gamma: f64, beta: f64) -> Result<RadialProfile> {
    let nf = n as f64;
    if !(beta < p && p < nf) {
        return Err(invalid(format!("transformed equation needs beta < p < n, got beta = {beta}, p = {p}, n = {n}")));
    }
    let dim = effective_dimension(nf, p, beta);
    let q = critical_exponent(nf, p, beta);
    let t = v.grid();
    let m = t.len();
    if m < 5 {
        return Err(invalid("transformed residual needs at least 5 nodes"));
    }
    let dv: Vec<f64> = match v.derivative_values() {
        Some(d) => d.to_vec(),
        None => crate::radial::radial_derivative(v)?.values().to_vec(),
    };
    let flux: Vec<f64> = (0..m).map(|j| t[j].powf(dim - 1.0) * p_power(dv[j], p)).collect();
    let mut out = Vec::with_capacity(m - 2);
    for i in 1..m - 1 {
        let start = i.saturating_sub(2).min(m - 5);
        let w = fd_weights(t[i], &t[start..start + 5], 1);
        let df: f64 = w[1].iter().zip(&flux[start..start + 5]).map(|(c, f)| c * f).sum();
        let vi = v.values()[i];
        let res = -df - gamma * t[i].powf(dim - 1.0) * p_power(vi, q);
        if !res.is_finite() {
            return Err(Error::NonFinite { what: "transformed residual", r: t[i], value: res });
        }
        out.push(res);
    }
    RadialProfile::new(t[1..m - 1].to_vec(), out)
}

/// `max |residual| / max γ t^{N-1} |v|^{p*_β-1}` over the interior nodes.
pub fn relative_residual(residual: &RadialProfile, v: &RadialProfile, n: u32, p: f64, gamma: f64, beta: f64) -> f64 {
    let nf = n as f64;
    let dim = effective_dimension(nf, p, beta);
    let q = critical_exponent(nf, p, beta);
    let t = v.grid();
    let scale = (1..t.len() - 1)
        .map(|i| gamma * t[i].powf(dim - 1.0) * v.values()[i].abs().powf(q - 1.0))
        .fold(0.0, f64::max);
    residual.max_abs() / scale
}
