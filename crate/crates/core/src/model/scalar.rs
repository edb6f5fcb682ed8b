/// A scalar function of `t > 0` with an exact derivative.
///
/// Used for `Φ`, `Ψ` and `g`. The variants form a small expression algebra;
/// only [`ScalarFn::Table`] falls back to finite differences.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Constant(f64),
    /// `coeff · t^exponent`
    Power { coeff: f64, exponent: f64 },
    /// `exp(-rate · t)`
    ExpDecay { rate: f64 },
    /// `ln(shift + t)`
    LogShift { shift: f64 },
    Product(Vec<ScalarFn>),
    Sum(Vec<ScalarFn>),
    Reciprocal(Box<ScalarFn>),
    /// Piecewise-linear interpolation of `(t, value)` samples, clamped at the ends.
    Table { t: Vec<f64>, values: Vec<f64> },
}

impl ScalarFn {
    pub fn identity() -> Self {
        ScalarFn::Power { coeff: 1.0, exponent: 1.0 }
    }

    pub fn power(exponent: f64) -> Self {
        ScalarFn::Power { coeff: 1.0, exponent }
    }

    pub fn scaled_power(coeff: f64, exponent: f64) -> Self {
        ScalarFn::Power { coeff, exponent }
    }

    pub fn recip(self) -> Self {
        ScalarFn::Reciprocal(Box::new(self))
    }

    pub fn times(self, other: ScalarFn) -> Self {
        match self {
            ScalarFn::Product(mut v) => {
                v.push(other);
                ScalarFn::Product(v)
            }
            s => ScalarFn::Product(vec![s, other]),
        }
    }

    pub fn plus(self, other: ScalarFn) -> Self {
        match self {
            ScalarFn::Sum(mut v) => {
                v.push(other);
                ScalarFn::Sum(v)
            }
            s => ScalarFn::Sum(vec![s, other]),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            ScalarFn::Constant(c) => *c,
            ScalarFn::Power { coeff, exponent } => {
                if *exponent == 0.0 {
                    *coeff
                } else {
                    coeff * t.powf(*exponent)
                }
            }
            ScalarFn::ExpDecay { rate } => (-rate * t).exp(),
            ScalarFn::LogShift { shift } => (shift + t).ln(),
            ScalarFn::Product(fs) => fs.iter().map(|f| f.value(t)).product(),
            ScalarFn::Sum(fs) => fs.iter().map(|f| f.value(t)).sum(),
            ScalarFn::Reciprocal(f) => 1.0 / f.value(t),
            ScalarFn::Table { t: ts, values } => interp_linear(ts, values, t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            ScalarFn::Constant(_) => 0.0,
            ScalarFn::Power { coeff, exponent } => {
                if *exponent == 0.0 {
                    0.0
                } else {
                    coeff * exponent * t.powf(exponent - 1.0)
                }
            }
            ScalarFn::ExpDecay { rate } => -rate * (-rate * t).exp(),
            ScalarFn::LogShift { shift } => 1.0 / (shift + t),
            ScalarFn::Product(fs) => {
                let vals: Vec<f64> = fs.iter().map(|f| f.value(t)).collect();
                (0..fs.len())
                    .map(|i| {
                        fs[i].derivative(t)
                            * vals
                                .iter()
                                .enumerate()
                                .filter(|(j, _)| *j != i)
                                .map(|(_, v)| v)
                                .product::<f64>()
                    })
                    .sum()
            }
            ScalarFn::Sum(fs) => fs.iter().map(|f| f.derivative(t)).sum(),
            ScalarFn::Reciprocal(f) => {
                let v = f.value(t);
                -f.derivative(t) / (v * v)
            }
            ScalarFn::Table { .. } => central_difference(|s| self.value(s), t),
        }
    }

    /// Whether [`derivative`](Self::derivative) is exact rather than a finite difference.
    pub fn has_analytic_derivative(&self) -> bool {
        match self {
            ScalarFn::Table { .. } => false,
            ScalarFn::Product(fs) | ScalarFn::Sum(fs) => fs.iter().all(Self::has_analytic_derivative),
            ScalarFn::Reciprocal(f) => f.has_analytic_derivative(),
            _ => true,
        }
    }
}

/// Fourth-order central difference with step `1e-5 · t`.
pub(crate) fn central_difference(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    let h = 1e-5 * t.abs().max(f64::MIN_POSITIVE.sqrt());
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

fn interp_linear(ts: &[f64], vs: &[f64], t: f64) -> f64 {
    if ts.is_empty() {
        return f64::NAN;
    }
    if t <= ts[0] {
        return vs[0];
    }
    let last = ts.len() - 1;
    if t >= ts[last] {
        return vs[last];
    }
    let i = ts.partition_point(|&x| x <= t) - 1;
    let s = (t - ts[i]) / (ts[i + 1] - ts[i]);
    vs[i] + s * (vs[i + 1] - vs[i])
}
