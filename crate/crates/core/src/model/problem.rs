use super::domain::RadialDomain;
use super::scalar::ScalarFn;
use super::weight::{Coefficient, WeightFunction};
use crate::error::{invalid, Result};

/// `-Δ_{p,a} u >= b(x) Φ(u)` posed on a radial domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PdiProblem {
    pub domain: RadialDomain,
    pub p: f64,
    pub a: WeightFunction,
    pub b: Coefficient,
    pub phi: ScalarFn,
}

impl PdiProblem {
    pub fn new(domain: RadialDomain, p: f64, a: WeightFunction, b: Coefficient, phi: ScalarFn) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("exponent p must satisfy p > 1, got {p}")));
        }
        Ok(Self { domain, p, a, b, phi })
    }

    pub fn n(&self) -> u32 {
        self.domain.n()
    }
}

/// `σ₀ = inf 𝒜` as an extended real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma0 {
    Finite(f64),
    /// The admissible set is empty at grid resolution.
    PlusInfinity,
    /// Every node lies in the critical set, so the admissible set is all of
    /// `R`; reported only, never used downstream.
    ConstantProfile,
}

impl Sigma0 {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Sigma0::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaResult {
    pub sigma0: Sigma0,
    /// The compatibility constant `C`; shifts must satisfy `σ₀ <= σ < C`.
    pub admissible_upper: f64,
    /// Nodes where the ratio was evaluated (outside the critical set).
    pub evaluated_nodes: usize,
    /// Radius at which the supremum is attained on the grid.
    pub argmax_r: Option<f64>,
}

impl SigmaResult {
    pub fn is_admissible(&self, sigma: f64) -> bool {
        match self.sigma0 {
            Sigma0::Finite(s0) => s0 <= sigma && sigma < self.admissible_upper,
            _ => false,
        }
    }
}

/// How a Hardy inequality was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Supersolution { pair: String, sigma: f64, c: f64 },
    SharpCase,
    HardyPoincare { n: u32, p: f64, gamma: f64, r_param: f64 },
    Weights { label: String },
}

/// Whether the constant of a Hardy inequality is known to be the best one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sharpness {
    ProvedByEigenfunction,
    Unknown,
    NotApplicable,
}

/// `∫ |ξ|^p dμ1 <= constant · ∫ |∇ξ|^p μ2_density dx`.
///
/// `mu2_density` is the raw weight; the multiplicative constant is kept
/// separately so quotients can be compared with named constants.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyData {
    pub mu1_density: Coefficient,
    pub mu2_density: WeightFunction,
    pub constant: f64,
    pub p: f64,
    pub provenance: Provenance,
    pub sharpness: Sharpness,
    pub flags: Vec<String>,
}

impl HardyData {
    pub fn new(mu1_density: Coefficient, mu2_density: WeightFunction, constant: f64, p: f64, provenance: Provenance) -> Result<Self> {
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(invalid(format!("Hardy constant must be positive, got {constant}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("exponent p must satisfy p > 1, got {p}")));
        }
        Ok(Self {
            mu1_density,
            mu2_density,
            constant,
            p,
            provenance,
            sharpness: Sharpness::Unknown,
            flags: Vec::new(),
        })
    }
}
