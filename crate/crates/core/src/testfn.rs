//! Compactly supported test functions: tents, smooth bumps, their powers,
//! randomized knot tents and smooth cutoffs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::model::RadialProfile;

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// Piecewise linear: 0 at `lo`, 1 at `peak`, 0 at `hi`.
    Tent { lo: f64, peak: f64, hi: f64 },
    /// `exp(-1/(1-s^2))` with `s` mapping `(lo, hi)` onto `(-1, 1)`.
    Bump { lo: f64, hi: f64 },
    /// Piecewise linear through `(knots[i], values[i])`, zero at the end knots.
    Knots { knots: Vec<f64>, values: Vec<f64> },
    /// `base^exponent` (the base is nonnegative).
    Power { base: Box<TestFunction>, exponent: f64 },
}

impl TestFunction {
    pub fn tent(lo: f64, peak: f64, hi: f64) -> Result<Self> {
        if !(lo < peak && peak < hi) {
            return Err(invalid(format!("tent needs lo < peak < hi, got ({lo}, {peak}, {hi})")));
        }
        Ok(TestFunction::Tent { lo, peak, hi })
    }

    pub fn bump(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(invalid(format!("bump needs lo < hi, got ({lo}, {hi})")));
        }
        Ok(TestFunction::Bump { lo, hi })
    }

    pub fn knots(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 3 || knots.len() != values.len() {
            return Err(invalid("knot tent needs at least 3 knots with matching values"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("knots must be strictly increasing"));
        }
        if values[0] != 0.0 || *values.last().unwrap() != 0.0 || values.iter().any(|v| *v < 0.0) {
            return Err(invalid("knot values must be nonnegative and vanish at the end knots"));
        }
        Ok(TestFunction::Knots { knots, values })
    }

    pub fn pow(self, exponent: f64) -> Self {
        TestFunction::Power { base: Box::new(self), exponent }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Tent { lo, hi, .. } | TestFunction::Bump { lo, hi } => (*lo, *hi),
            TestFunction::Knots { knots, .. } => (knots[0], *knots.last().unwrap()),
            TestFunction::Power { base, .. } => base.support(),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            TestFunction::Tent { lo, peak, hi } => {
                if r <= *lo || r >= *hi {
                    0.0
                } else if r <= *peak {
                    (r - lo) / (peak - lo)
                } else {
                    (hi - r) / (hi - peak)
                }
            }
            TestFunction::Bump { lo, hi } => {
                let s = (2.0 * r - lo - hi) / (hi - lo);
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - s * s)).exp()
                }
            }
            TestFunction::Knots { knots, values } => {
                let last = knots.len() - 1;
                if r <= knots[0] || r >= knots[last] {
                    return 0.0;
                }
                let i = knots.partition_point(|&k| k <= r) - 1;
                let t = (r - knots[i]) / (knots[i + 1] - knots[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
            TestFunction::Power { base, exponent } => base.value(r).max(0.0).powf(*exponent),
        }
    }

    /// Derivative; at kinks the right-sided slope is used.
    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            TestFunction::Tent { lo, peak, hi } => {
                if r < *lo || r >= *hi {
                    0.0
                } else if r < *peak {
                    1.0 / (peak - lo)
                } else {
                    -1.0 / (hi - peak)
                }
            }
            TestFunction::Bump { lo, hi } => {
                let s = (2.0 * r - lo - hi) / (hi - lo);
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - s * s;
                    (-1.0 / q).exp() * (-2.0 * s / (q * q)) * 2.0 / (hi - lo)
                }
            }
            TestFunction::Knots { knots, values } => {
                let last = knots.len() - 1;
                if r < knots[0] || r >= knots[last] {
                    return 0.0;
                }
                let i = knots.partition_point(|&k| k <= r) - 1;
                (values[i + 1] - values[i]) / (knots[i + 1] - knots[i])
            }
            TestFunction::Power { base, exponent } => {
                let v = base.value(r);
                if v <= 0.0 {
                    0.0
                } else {
                    exponent * v.powf(exponent - 1.0) * base.derivative(r)
                }
            }
        }
    }

    pub fn sample(&self, nodes: &[f64]) -> Result<RadialProfile> {
        RadialProfile::from_fn_with_derivative(nodes, |r| self.value(r), |r| self.derivative(r))
    }
}

/// A smooth monotone step: 1 below `inner`, 0 above `outer`, with the
/// transition taken in `ln r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl LogCutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner < outer) {
            return Err(invalid(format!("cutoff needs 0 < inner < outer, got ({inner}, {outer})")));
        }
        Ok(Self { inner, outer })
    }

    fn x(&self, r: f64) -> f64 {
        (r / self.inner).ln() / (self.outer / self.inner).ln()
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.inner {
            return 1.0;
        }
        if r >= self.outer {
            return 0.0;
        }
        let x = self.x(r);
        let (a, b) = (transition(1.0 - x), transition(x));
        a / (a + b)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r <= self.inner || r >= self.outer {
            return 0.0;
        }
        let x = self.x(r);
        let (f_x, f_1x) = (transition(x), transition(1.0 - x));
        let (df_x, df_1x) = (f_x / (x * x), f_1x / ((1.0 - x) * (1.0 - x)));
        let d = f_x + f_1x;
        let ds = -(df_1x * f_x + f_1x * df_x) / (d * d);
        ds / (r * (self.outer / self.inner).ln())
    }
}

fn transition(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// A deterministic, seeded family of `count` test functions supported in
/// `(lo, hi)`: tents, bumps, bump powers and randomized knot tents in turn.
pub fn library(lo: f64, hi: f64, count: usize, p: f64, seed: u64) -> Result<Vec<TestFunction>> {
    if !(lo < hi && lo >= 0.0) {
        return Err(invalid(format!("library support must satisfy 0 <= lo < hi, got ({lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // work in log coordinates when the support spans decades
    let logscale = lo > 0.0 && hi / lo > 20.0;
    let map = |u: f64| if logscale { lo * (hi / lo).powf(u) } else { lo + (hi - lo) * u };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut u: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..1.0)).collect();
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (a, b) = (u[0] * 0.5, 0.5 + u[1] * 0.5);
        let f = match k % 4 {
            0 => {
                let m = rng.gen_range(0.2..0.8);
                TestFunction::tent(map(a), map(a + m * (b - a)), map(b))?
            }
            1 => TestFunction::bump(map(a), map(b))?,
            2 => TestFunction::bump(map(a), map(b))?.pow(p),
            _ => {
                let m = 5;
                let knots: Vec<f64> = (0..m).map(|i| map(a + (b - a) * i as f64 / (m - 1) as f64)).collect();
                let values: Vec<f64> = (0..m)
                    .map(|i| if i == 0 || i == m - 1 { 0.0 } else { rng.gen_range(0.1..1.0) })
                    .collect();
                TestFunction::knots(knots, values)?
            }
        };
        out.push(f);
    }
    Ok(out)
}
