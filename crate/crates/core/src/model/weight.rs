use super::profile::RadialProfile;
use crate::error::{invalid, Error, Result};

/// A nonnegative radial weight from a closed family.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    Constant(f64),
    /// `r^exponent`
    Power { exponent: f64 },
    /// `(1 + r^{p/(p-1)})^{(p-1)γ}`
    Talenti { gamma: f64, p: f64 },
    /// `(1 + s·r^{p/(p-1)}) (1 + r^{p/(p-1)})^{γ(p-1)-p}` with `s = r_param`
    HpV1 { gamma: f64, p: f64, r_param: f64 },
    /// `exp(coeff · r^exponent)`
    ExpPower { coeff: f64, exponent: f64 },
    Product(Vec<WeightFunction>),
    Tabulated(RadialProfile),
}

impl WeightFunction {
    pub fn constant(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(invalid(format!("constant weight must be finite and nonnegative, got {k}")));
        }
        Ok(WeightFunction::Constant(k))
    }

    pub fn tabulated(profile: RadialProfile) -> Result<Self> {
        if let Some((i, v)) = profile.values().iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeValue { what: "tabulated weight", r: profile.grid()[i], value: *v });
        }
        Ok(WeightFunction::Tabulated(profile))
    }

    pub fn times(self, other: WeightFunction) -> Self {
        match self {
            WeightFunction::Product(mut v) => {
                v.push(other);
                WeightFunction::Product(v)
            }
            w => WeightFunction::Product(vec![w, other]),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            WeightFunction::Constant(k) => *k,
            WeightFunction::Power { exponent } => {
                if *exponent == 0.0 {
                    1.0
                } else {
                    r.powf(*exponent)
                }
            }
            WeightFunction::Talenti { gamma, p } => {
                (1.0 + r.powf(p / (p - 1.0))).powf((p - 1.0) * gamma)
            }
            WeightFunction::HpV1 { gamma, p, r_param } => {
                let x = r.powf(p / (p - 1.0));
                (1.0 + r_param * x) * (1.0 + x).powf(gamma * (p - 1.0) - p)
            }
            WeightFunction::ExpPower { coeff, exponent } => (coeff * r.powf(*exponent)).exp(),
            WeightFunction::Product(ws) => ws.iter().map(|w| w.eval(r)).product(),
            WeightFunction::Tabulated(p) => p.eval(r),
        }
    }

    /// Leading behaviour `coeff · r^exponent` as `r → 0`, when the family declares one.
    pub fn origin_power(&self) -> Option<(f64, f64)> {
        match self {
            WeightFunction::Constant(k) => Some((*k, 0.0)),
            WeightFunction::Power { exponent } => Some((1.0, *exponent)),
            WeightFunction::Talenti { .. } | WeightFunction::HpV1 { .. } => Some((1.0, 0.0)),
            WeightFunction::ExpPower { coeff, exponent } => {
                if *exponent > 0.0 {
                    Some((1.0, 0.0))
                } else if *exponent == 0.0 {
                    Some((coeff.exp(), 0.0))
                } else {
                    None
                }
            }
            WeightFunction::Product(ws) => ws.iter().try_fold((1.0, 0.0), |(c, e), w| {
                w.origin_power().map(|(c2, e2)| (c * c2, e + e2))
            }),
            WeightFunction::Tabulated(_) => None,
        }
    }

    pub fn sample(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&r| self.eval(r)).collect()
    }
}

/// A coefficient that may change sign, such as `b` in `-Δ_{p,a} u >= b Φ(u)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Weight(WeightFunction),
    Signed(RadialProfile),
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Weight(WeightFunction::Constant(0.0))
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Coefficient::Weight(w) => w.eval(r),
            Coefficient::Signed(p) => p.eval(r),
        }
    }

    pub fn sample(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&r| self.eval(r)).collect()
    }

    pub fn origin_power(&self) -> Option<(f64, f64)> {
        match self {
            Coefficient::Weight(w) => w.origin_power(),
            Coefficient::Signed(_) => None,
        }
    }

    pub fn as_weight(&self) -> Option<&WeightFunction> {
        match self {
            Coefficient::Weight(w) => Some(w),
            Coefficient::Signed(_) => None,
        }
    }
}

impl From<WeightFunction> for Coefficient {
    fn from(w: WeightFunction) -> Self {
        Coefficient::Weight(w)
    }
}
