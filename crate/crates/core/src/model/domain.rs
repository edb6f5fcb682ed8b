use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Ball,
    Annulus,
    FullSpaceTruncated,
    /// A one-dimensional interval `(r_min, r_max)` with plain Lebesgue measure.
    Interval,
}

/// A rotationally symmetric region `{ r_min < |x| < r_max }` of `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDomain {
    n: u32,
    r_min: f64,
    r_max: f64,
    kind: DomainKind,
}

impl RadialDomain {
    pub fn new(n: u32, r_min: f64, r_max: f64, kind: DomainKind) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension n must be at least 1"));
        }
        if !(r_min.is_finite() && r_max.is_finite()) || r_min < 0.0 || r_min >= r_max {
            return Err(invalid(format!(
                "radii must satisfy 0 <= r_min < r_max < inf, got ({r_min}, {r_max})"
            )));
        }
        match kind {
            DomainKind::Interval if n != 1 => {
                return Err(invalid("an interval domain requires n = 1"));
            }
            DomainKind::Annulus if r_min <= 0.0 => {
                return Err(invalid("an annulus requires r_min > 0"));
            }
            DomainKind::Ball | DomainKind::FullSpaceTruncated if r_min != 0.0 => {
                return Err(invalid(format!("{kind:?} domains are centred at the origin (r_min = 0)")));
            }
            _ => {}
        }
        Ok(Self { n, r_min, r_max, kind })
    }

    pub fn ball(n: u32, radius: f64) -> Result<Self> {
        Self::new(n, 0.0, radius, DomainKind::Ball)
    }

    pub fn annulus(n: u32, inner: f64, outer: f64) -> Result<Self> {
        Self::new(n, inner, outer, DomainKind::Annulus)
    }

    pub fn full_space(n: u32, r_max: f64) -> Result<Self> {
        Self::new(n, 0.0, r_max, DomainKind::FullSpaceTruncated)
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(1, lo, hi, DomainKind::Interval)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// True when the closed domain reaches `r = 0`, i.e. the innermost grid
    /// cell has to be closed off analytically.
    pub fn touches_origin(&self) -> bool {
        self.r_min == 0.0
    }

    pub fn measure(&self) -> RadialMeasure {
        RadialMeasure {
            n: self.n,
            spherical: self.kind != DomainKind::Interval,
        }
    }

    pub fn with_r_max(&self, r_max: f64) -> Result<Self> {
        Self::new(self.n, self.r_min, r_max, self.kind)
    }
}

/// The radial density turning `∫_Ω f(|x|) dx` into `∫ f(r) density(r) dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMeasure {
    n: u32,
    spherical: bool,
}

impl RadialMeasure {
    pub fn spherical(n: u32) -> Self {
        Self { n, spherical: true }
    }

    pub fn line() -> Self {
        Self { n: 1, spherical: false }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_spherical(&self) -> bool {
        self.spherical
    }

    /// `|S^{n-1}| r^{n-1}`, or `1` on an interval.
    pub fn density(&self, r: f64) -> f64 {
        if self.spherical {
            unit_sphere_area(self.n) * r.powi(self.n as i32 - 1)
        } else {
            1.0
        }
    }

    /// Antiderivative of [`density`](Self::density) vanishing at 0.
    pub fn primitive(&self, r: f64) -> f64 {
        if self.spherical {
            unit_sphere_area(self.n) * r.powi(self.n as i32) / self.n as f64
        } else {
            r
        }
    }

    /// `∫_0^{r0} c s^α density(s) ds`, infinite when the power is not integrable at 0.
    pub fn power_cell(&self, coeff: f64, alpha: f64, r0: f64) -> f64 {
        let (area, shift) = if self.spherical {
            (unit_sphere_area(self.n), self.n as f64)
        } else {
            (1.0, 1.0)
        };
        let e = alpha + shift;
        if e <= 0.0 {
            if coeff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            coeff * area * r0.powf(e) / e
        }
    }
}

/// Surface area of the unit sphere `S^{n-1} ⊂ R^n` (`2` for `n = 1`).
pub fn unit_sphere_area(n: u32) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * unit_sphere_area(n - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn domain_invariants() {
        assert!(RadialDomain::new(3, 1.0, 1.0, DomainKind::Annulus).is_err());
        assert!(RadialDomain::new(2, 0.0, 1.0, DomainKind::Interval).is_err());
        assert!(RadialDomain::new(0, 0.0, 1.0, DomainKind::Ball).is_err());
        assert!(RadialDomain::annulus(3, 0.0, 1.0).is_err());
        let i = RadialDomain::interval(0.0, PI).unwrap();
        assert_eq!(i.measure().density(2.0), 1.0);
        assert!(i.touches_origin());
        let a = RadialDomain::annulus(3, 0.5, 2.0).unwrap();
        assert!(!a.touches_origin());
    }

    #[test]
    fn ball_volume_from_primitive() {
        let m = RadialMeasure::spherical(3);
        assert!((m.primitive(1.0) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((m.power_cell(1.0, -1.0, 1.0) - 2.0 * PI).abs() < 1e-14);
        assert!(m.power_cell(1.0, -3.0, 1.0).is_infinite());
    }
}
