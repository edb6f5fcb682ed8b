use super::scalar::ScalarFn;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiMonotonicity {
    Nonincreasing,
    Increasing,
}

/// The auxiliary pair `(Ψ, g)` together with the constant `C` in `g Ψ' <= -C Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiGPair {
    pub name: String,
    pub psi: ScalarFn,
    pub g: ScalarFn,
    pub c: f64,
    pub psi_monotonicity: PsiMonotonicity,
}

impl PsiGPair {
    /// `Ψ = t^{-α}`, `g = t`, `C = α` (equality).
    pub fn power(alpha: f64) -> Self {
        Self {
            name: format!("power(alpha={alpha})"),
            psi: ScalarFn::power(-alpha),
            g: ScalarFn::identity(),
            c: alpha,
            psi_monotonicity: if alpha >= 0.0 {
                PsiMonotonicity::Nonincreasing
            } else {
                PsiMonotonicity::Increasing
            },
        }
    }

    /// `Ψ = (t ln(a+t))^{-1}`, `g = t ln(a+t)`, `C = ln a`, for `a > 1`.
    pub fn log_product(a: f64) -> Result<Self> {
        if !(a > 1.0) {
            return Err(invalid(format!("log-product pair needs a > 1, got {a}")));
        }
        let g = ScalarFn::identity().times(ScalarFn::LogShift { shift: a });
        Ok(Self {
            name: format!("log-product(a={a})"),
            psi: g.clone().recip(),
            g,
            c: a.ln(),
            psi_monotonicity: PsiMonotonicity::Nonincreasing,
        })
    }

    /// `Ψ = e^{-t}` with `g(t) = C (1 + t/(1+t))`, so `g >= C` and `g' >= 0 >= -C`.
    pub fn exponential(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(invalid(format!("exponential pair needs C > 0, got {c}")));
        }
        let sat = ScalarFn::identity().times(ScalarFn::Constant(1.0).plus(ScalarFn::identity()).recip());
        Ok(Self {
            name: format!("exponential(C={c})"),
            psi: ScalarFn::ExpDecay { rate: 1.0 },
            g: ScalarFn::Constant(c).times(ScalarFn::Constant(1.0).plus(sat)),
            c,
            psi_monotonicity: PsiMonotonicity::Nonincreasing,
        })
    }

    /// `Ψ = e^{-t}/t`, `g = t/(1+t)`, `C = 1` (equality).
    pub fn exp_over_t() -> Self {
        Self {
            name: "exp-over-t".to_string(),
            psi: ScalarFn::ExpDecay { rate: 1.0 }.times(ScalarFn::power(-1.0)),
            g: ScalarFn::identity().times(ScalarFn::Constant(1.0).plus(ScalarFn::identity()).recip()),
            c: 1.0,
            psi_monotonicity: PsiMonotonicity::Nonincreasing,
        }
    }

    pub fn custom(name: impl Into<String>, psi: ScalarFn, g: ScalarFn, c: f64, psi_monotonicity: PsiMonotonicity) -> Self {
        Self { name: name.into(), psi, g, c, psi_monotonicity }
    }

    /// The four reference couples: power (α = 1), log-product (a = e),
    /// exponential (C = 1) and exp-over-t.
    pub fn reference_rows() -> Vec<PsiGPair> {
        vec![
            Self::power(1.0),
            Self::log_product(std::f64::consts::E).expect("a = e > 1"),
            Self::exponential(1.0).expect("C = 1 > 0"),
            Self::exp_over_t(),
        ]
    }

    /// `Θ(t) = Ψ(t) g(t)^{p-1}`
    pub fn theta(&self, t: f64, p: f64) -> f64 {
        self.psi.value(t) * self.g.value(t).powf(p - 1.0)
    }
}
