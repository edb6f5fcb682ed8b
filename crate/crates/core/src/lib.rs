//! Caccioppoli-type estimates and Hardy-type inequalities manufactured from
//! nonnegative supersolutions of `-div(a |∇u|^{p-2} ∇u) >= b Φ(u)`.
//!
//! Everything is posed radially: a problem lives on a ball, an annulus, a
//! truncated copy of `R^n` or a one-dimensional interval, and every integral
//! `∫_Ω f(|x|) dx` is reduced to a weighted integral over a graded radial grid.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: domain types, weight and profile families, explicit constants.
//! * [`radial`]: quadrature and the strong-form weighted p-Laplacian.
//! * [`compatibility`]: the numerically checkable hypotheses on `(a, b, Ψ, g, u)`.
//! * [`supersolution`]: strong/weak residuals and the admissibility threshold `σ₀`.
//! * [`caccioppoli`]: both sides of the local and global Caccioppoli estimates.
//! * [`hardy`]: Hardy measures built from a supersolution and their margins.
//! * [`rayleigh`]: quotient minimization used to probe sharpness of constants.
//! * [`transforms`]: the radial change of variables `t = p/(p-β) r^{(p-β)/p}`.
//! * [`testfn`]: the library of compactly supported test functions.

// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod caccioppoli;
pub mod compatibility;
pub mod error;
pub mod hardy;
pub mod model;
pub mod radial;
pub mod rayleigh;
pub mod supersolution;
pub mod testfn;
pub mod transforms;

pub use error::{Error, Result};
pub use model::{
    Coefficient, DomainKind, Extrapolation, HardyData, PdiProblem, PsiGPair, RadialDomain,
    RadialMeasure, RadialProfile, ScalarFn, Sigma0, SigmaResult, WeightFunction,
};
pub use radial::{Grading, QuadratureGrid};
