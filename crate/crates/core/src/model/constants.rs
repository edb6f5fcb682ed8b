use super::profile::{Extrapolation, RadialProfile};
use super::weight::WeightFunction;
use crate::error::{invalid, Error, Result};

/// The explicit radial solution of `-Δ_p u = γ |x|^{-β} u^{p*_β - 1}` on `R^n`:
/// `u(r) = c (1 + r^{(p-β)/(p-1)})^{-(n-p)/(p-β)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalentiProfile {
    pub n: f64,
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    pub scale: f64,
}

impl TalentiProfile {
    pub fn new(n: u32, p: f64, beta: f64, gamma: f64) -> Result<Self> {
        let nf = n as f64;
        if !(beta < p && p < nf) {
            return Err(invalid(format!("profile needs beta < p < n, got beta={beta}, p={p}, n={n}")));
        }
        if !(p > 1.0) {
            return Err(invalid(format!("profile needs p > 1, got {p}")));
        }
        if !(gamma > 0.0) {
            return Err(invalid(format!("profile needs gamma > 0, got {gamma}")));
        }
        let bracket = (nf - beta) / gamma * ((nf - p) / (p - 1.0)).powf(p - 1.0);
        // the scale solves c^{p*_β - p} = bracket with p*_β - p = p(p-β)/(n-p)
        let scale = bracket.powf((nf - p) / (p * (p - beta)));
        Ok(Self { n: nf, p, beta, gamma, scale })
    }

    /// `p*_β = p (n-β)/(n-p)`
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.n, self.p, self.beta)
    }

    fn inner_exponent(&self) -> f64 {
        (self.p - self.beta) / (self.p - 1.0)
    }

    fn outer_exponent(&self) -> f64 {
        -(self.n - self.p) / (self.p - self.beta)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.scale * (1.0 + r.powf(self.inner_exponent())).powf(self.outer_exponent())
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let k = self.inner_exponent();
        let m = self.outer_exponent();
        if r == 0.0 {
            return if k > 1.0 { 0.0 } else if k == 1.0 { self.scale * m } else { f64::NEG_INFINITY };
        }
        let x = r.powf(k);
        self.scale * m * (1.0 + x).powf(m - 1.0) * k * x / r
    }

    /// Decay exponent of the profile at infinity, `-(n-p)/(p-1)`.
    pub fn tail_exponent(&self) -> f64 {
        self.inner_exponent() * self.outer_exponent()
    }

    pub fn sample(&self, nodes: &[f64]) -> Result<RadialProfile> {
        Ok(RadialProfile::from_fn_with_derivative(nodes, |r| self.value(r), |r| self.derivative(r))?
            .with_extrapolation(Extrapolation::PowerTail { exponent: self.tail_exponent() }))
    }

    /// The coefficient `γ r^{-β}` of the equation solved by this profile.
    pub fn coefficient(&self) -> WeightFunction {
        if self.beta == 0.0 {
            WeightFunction::Constant(self.gamma)
        } else {
            WeightFunction::Constant(self.gamma).times(WeightFunction::Power { exponent: -self.beta })
        }
    }
}

/// `p*_β = p (n-β)/(n-p)`.
pub fn critical_exponent(n: f64, p: f64, beta: f64) -> f64 {
    p * (n - beta) / (n - p)
}

pub fn make_talenti_profile(n: u32, p: f64, beta: f64, gamma: f64, nodes: &[f64]) -> Result<RadialProfile> {
    TalentiProfile::new(n, p, beta, gamma)?.sample(nodes)
}

/// Parameters `(n, p, γ, r)` of the Hardy-Poincaré family with weights
/// `v1 = (1 + r|x|^{p/(p-1)})(1 + |x|^{p/(p-1)})^{γ(p-1)-p}` and
/// `v2 = (1 + |x|^{p/(p-1)})^{(p-1)γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpParams {
    pub n: u32,
    pub p: f64,
    pub gamma: f64,
    pub r_param: f64,
}

impl HpParams {
    pub fn new(n: u32, p: f64, gamma: f64, r_param: f64) -> Result<Self> {
        let nf = n as f64;
        if n == 0 {
            return Err(invalid("dimension n must be at least 1"));
        }
        if !(p > 1.0) {
            return Err(invalid(format!("constraint p > 1 failed: p = {p}")));
        }
        let gamma_min = 1.0 - nf / p;
        if !(gamma > gamma_min) {
            return Err(invalid(format!("constraint gamma > 1 - n/p = {gamma_min} failed: gamma = {gamma}")));
        }
        let r_max = 1.0 - p / nf + gamma * p / nf;
        if !(r_param > 0.0) {
            return Err(invalid(format!("constraint r_param > 0 failed: r_param = {r_param}")));
        }
        if !(r_param < r_max) {
            return Err(invalid(format!(
                "constraint r_param < 1 - p/n + gamma p/n = {r_max} failed: r_param = {r_param}"
            )));
        }
        Ok(Self { n, p, gamma, r_param })
    }
}

pub fn make_hp_weights(n: u32, p: f64, gamma: f64, r_param: f64) -> Result<(WeightFunction, WeightFunction)> {
    let hp = HpParams::new(n, p, gamma, r_param)?;
    Ok((
        WeightFunction::HpV1 { gamma: hp.gamma, p: hp.p, r_param: hp.r_param },
        WeightFunction::Talenti { gamma: hp.gamma, p: hp.p },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimality {
    /// The parameters fall in a regime where the constant is known to be best.
    Optimal,
    /// Nothing is claimed outside the known regimes.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpConstant {
    pub value: f64,
    pub optimality: Optimality,
}

/// `n (p/(p-1))^{p-1} (γ - 1 + (n/p)(1 - r))^{p-1}`, evaluated as
/// `n (p (γ - 1 + (n/p)(1-r)) / (p-1))^{p-1}` so that `r = 1` reproduces
/// `n (p(γ-1)/(p-1))^{p-1}` bit for bit.
pub fn hp_constant(n: u32, p: f64, gamma: f64, r_param: f64) -> Result<HpConstant> {
    let hp = HpParams::new(n, p, gamma, r_param)?;
    let nf = n as f64;
    let inner = hp.gamma - 1.0 + nf / p * (1.0 - hp.r_param);
    let value = nf * (p * inner / (p - 1.0)).powf(p - 1.0);
    let boundary = 1.0 + nf * (1.0 - 1.0 / p);
    let optimal = hp.gamma > nf * hp.r_param + 1.0 - nf / p
        || (hp.r_param == 1.0 && (hp.gamma - boundary).abs() <= 1e-12 * boundary.abs());
    Ok(HpConstant {
        value,
        optimality: if optimal { Optimality::Optimal } else { Optimality::Unknown },
    })
}

/// `(p-1)^{p-1} / (p^p (C-σ)^{p-1})`
pub fn caccioppoli_constant(p: f64, c: f64, sigma: f64) -> Result<f64> {
    check_shift(p, c, sigma)?;
    Ok((p - 1.0).powf(p - 1.0) / (p.powf(p) * (c - sigma).powf(p - 1.0)))
}

/// `((p-1)/(C-σ))^{p-1}`
pub fn hardy_mu2_constant(p: f64, c: f64, sigma: f64) -> Result<f64> {
    check_shift(p, c, sigma)?;
    Ok(((p - 1.0) / (c - sigma)).powf(p - 1.0))
}

fn check_shift(p: f64, c: f64, sigma: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(invalid(format!("exponent p must satisfy p > 1, got {p}")));
    }
    if !(sigma < c) {
        return Err(Error::ShiftNotBelowC { sigma, c });
    }
    Ok(())
}
