//! Domain types, closed-form weight/profile families and explicit constants.

mod constants;
mod domain;
mod pair;
mod problem;
mod profile;
mod scalar;
mod weight;

pub use constants::{
    caccioppoli_constant, critical_exponent, hardy_mu2_constant, hp_constant, make_hp_weights, make_talenti_profile,
    HpConstant, HpParams, Optimality, TalentiProfile,
};
pub use domain::{unit_sphere_area, DomainKind, RadialDomain, RadialMeasure};
pub use pair::{PsiGPair, PsiMonotonicity};
pub use problem::{
    HardyData, PdiProblem, Provenance, Sharpness, Sigma0, SigmaResult,
};
pub use profile::{Extrapolation, RadialProfile};
pub use scalar::ScalarFn;
pub use weight::{Coefficient, WeightFunction};
