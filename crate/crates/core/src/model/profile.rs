use crate::error::{invalid, Result};

/// How a profile is continued outside its sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extrapolation {
    /// Hold the end values.
    Clamp,
    /// Beyond the last node continue as `w(r_end) (r / r_end)^exponent`;
    /// below the first node hold the first value.
    PowerTail { exponent: f64 },
}

/// A radial function `w(r)` sampled on a strictly increasing grid.
///
/// When `derivative_values` is present the profile is interpolated with
/// cubic Hermite polynomials, otherwise piecewise linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    derivative: Option<Vec<f64>>,
    extrapolation: Extrapolation,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::build(grid, values, None)
    }

    pub fn with_derivative(grid: Vec<f64>, values: Vec<f64>, derivative: Vec<f64>) -> Result<Self> {
        Self::build(grid, values, Some(derivative))
    }

    fn build(grid: Vec<f64>, values: Vec<f64>, derivative: Option<Vec<f64>>) -> Result<Self> {
        if grid.len() < 3 {
            return Err(invalid(format!("a profile needs at least 3 nodes, got {}", grid.len())));
        }
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if let Some(d) = &derivative {
            if d.len() != grid.len() {
                return Err(invalid("derivative samples must match the grid length"));
            }
        }
        if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(invalid(format!("grid is not strictly increasing near r = {}", w[0])));
        }
        if grid.iter().any(|r| !r.is_finite()) {
            return Err(invalid("grid contains non-finite radii"));
        }
        Ok(Self { grid, values, derivative, extrapolation: Extrapolation::Clamp })
    }

    /// Samples `f` (and optionally its derivative `df`) at `nodes`.
    pub fn from_fn(nodes: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(nodes.to_vec(), nodes.iter().map(|&r| f(r)).collect())
    }

    pub fn from_fn_with_derivative(
        nodes: &[f64],
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        Self::with_derivative(
            nodes.to_vec(),
            nodes.iter().map(|&r| f(r)).collect(),
            nodes.iter().map(|&r| df(r)).collect(),
        )
    }

    pub fn constant(nodes: &[f64], value: f64) -> Result<Self> {
        Self::with_derivative(nodes.to_vec(), vec![value; nodes.len()], vec![0.0; nodes.len()])
    }

    pub fn with_extrapolation(mut self, extrapolation: Extrapolation) -> Self {
        self.extrapolation = extrapolation;
        self
    }

    pub fn without_derivative(mut self) -> Self {
        self.derivative = None;
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative_values(&self) -> Option<&[f64]> {
        self.derivative.as_deref()
    }

    pub fn extrapolation(&self) -> Extrapolation {
        self.extrapolation
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// True when the profile is sampled exactly on `nodes`.
    pub fn is_on(&self, nodes: &[f64]) -> bool {
        self.grid.as_slice() == nodes
    }

    fn locate(&self, r: f64) -> usize {
        // index i with grid[i] <= r < grid[i+1]
        match self.grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.grid.len() - 2),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let last = self.grid.len() - 1;
        if r <= self.grid[0] {
            return self.values[0];
        }
        if r >= self.grid[last] {
            return match self.extrapolation {
                Extrapolation::Clamp => self.values[last],
                Extrapolation::PowerTail { exponent } => {
                    self.values[last] * (r / self.grid[last]).powf(exponent)
                }
            };
        }
        let i = self.locate(r);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let s = (r - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        match &self.derivative {
            Some(d) => {
                let (m0, m1) = (d[i] * h, d[i + 1] * h);
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * m0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * m1
            }
            None => y0 + s * (y1 - y0),
        }
    }

    pub fn eval_derivative(&self, r: f64) -> f64 {
        let last = self.grid.len() - 1;
        if r < self.grid[0] {
            return 0.0;
        }
        if r > self.grid[last] {
            return match self.extrapolation {
                Extrapolation::Clamp => 0.0,
                Extrapolation::PowerTail { exponent } => {
                    self.values[last] * exponent * (r / self.grid[last]).powf(exponent - 1.0)
                        / self.grid[last]
                }
            };
        }
        let i = self.locate(r);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let s = (r - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        match &self.derivative {
            Some(d) => {
                let (m0, m1) = (d[i] * h, d[i + 1] * h);
                let s2 = s * s;
                ((6.0 * s2 - 6.0 * s) * y0
                    + (3.0 * s2 - 4.0 * s + 1.0) * m0
                    + (-6.0 * s2 + 6.0 * s) * y1
                    + (3.0 * s2 - 2.0 * s) * m1)
                    / h
            }
            None => (y1 - y0) / h,
        }
    }

    /// Re-samples the profile on `nodes`, keeping derivative information.
    pub fn resample(&self, nodes: &[f64]) -> Result<Self> {
        let values = nodes.iter().map(|&r| self.eval(r)).collect();
        let out = if self.derivative.is_some() {
            Self::with_derivative(nodes.to_vec(), values, nodes.iter().map(|&r| self.eval_derivative(r)).collect())?
        } else {
            Self::new(nodes.to_vec(), values)?
        };
        Ok(out.with_extrapolation(self.extrapolation))
    }

    /// Borrowed view on `nodes`, resampling only when the grids differ.
    pub fn on_nodes(&self, nodes: &[f64]) -> Result<std::borrow::Cow<'_, Self>> {
        if self.is_on(nodes) {
            Ok(std::borrow::Cow::Borrowed(self))
        } else {
            Ok(std::borrow::Cow::Owned(self.resample(nodes)?))
        }
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| lambda * v).collect(),
            derivative: self.derivative.as_ref().map(|d| d.iter().map(|v| lambda * v).collect()),
            extrapolation: self.extrapolation,
        }
    }

    /// `|w|^e` with the chain-rule derivative `e |w|^{e-1} sgn(w) w'`.
    pub fn abs_pow(&self, e: f64) -> Self {
        let values = self.values.iter().map(|v| v.abs().powf(e)).collect();
        let derivative = self.derivative.as_ref().map(|d| {
            self.values
                .iter()
                .zip(d)
                .map(|(&v, &dv)| if v == 0.0 { 0.0 } else { e * v.abs().powf(e - 1.0) * v.signum() * dv })
                .collect()
        });
        Self { grid: self.grid.clone(), values, derivative, extrapolation: Extrapolation::Clamp }
    }

    /// Nodewise product `w · z` (both on the same grid).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !other.is_on(&self.grid) {
            return Err(invalid("profiles multiplied on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        let derivative = match (&self.derivative, &other.derivative) {
            (Some(da), Some(db)) => Some(
                (0..self.len())
                    .map(|i| da[i] * other.values[i] + self.values[i] * db[i])
                    .collect(),
            ),
            _ => None,
        };
        Ok(Self { grid: self.grid.clone(), values, derivative, extrapolation: Extrapolation::Clamp })
    }
}
