use crate::{Cx, Error, Result};

/// A uniform evaluation grid slightly off the boundary of the relevant
/// domain: `epsilon` above the real line, or `1 - epsilon` in radius for the
/// disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
    pub epsilon: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, count: usize, epsilon: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::ParamDomain("grid count must be >= 2".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::ParamDomain("grid epsilon must lie in (0, 1)".into()));
        }
        if !(x_min < x_max) {
            return Err(Error::ParamDomain("grid needs x_min < x_max".into()));
        }
        Ok(GridSpec { x_min, x_max, count, epsilon })
    }

    /// Symmetric grid sized from a support-radius estimate, following the
    /// boundary-test convention X = 8 (1 + radius).
    pub fn for_support_radius(radius: f64, count: usize, epsilon: f64) -> Self {
        let x = 8.0 * (1.0 + radius.abs());
        GridSpec { x_min: -x, x_max: x, count, epsilon }
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.x_max - self.x_min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.x_min + step * i as f64).collect()
    }

    /// Grid points lifted to the horizontal line Im z = epsilon.
    pub fn boundary_points(&self) -> Vec<Cx> {
        self.points().into_iter().map(|x| Cx::new(x, self.epsilon)).collect()
    }
}

/// Deterministic sample of the open upper half-plane used by validity
/// checks: `nx` columns over [-x_max, x_max] at `ny` geometrically spaced
/// heights in [y_min, y_max].
pub fn upper_halfplane_samples(x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Vec<Cx> {
    let mut pts = Vec::with_capacity(nx * ny);
    let ratio = (y_max / y_min).powf(1.0 / (ny.saturating_sub(1)).max(1) as f64);
    for j in 0..ny {
        let y = y_min * ratio.powi(j as i32);
        for i in 0..nx {
            let x = -x_max + 2.0 * x_max * i as f64 / (nx - 1) as f64;
            pts.push(Cx::new(x, y));
        }
    }
    pts
}

/// Concentric-circle sample of the unit disc: radii 0.1..=r_max with `nr`
/// rings and `ntheta` angles per ring.
pub fn disc_samples(r_max: f64, nr: usize, ntheta: usize) -> Vec<Cx> {
    let mut pts = Vec::with_capacity(nr * ntheta);
    for j in 0..nr {
        let r = 0.1 + (r_max - 0.1) * j as f64 / (nr.saturating_sub(1)).max(1) as f64;
        for i in 0..ntheta {
            let th = 2.0 * std::f64::consts::PI * i as f64 / ntheta as f64;
            pts.push(Cx::from_polar(r, th));
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_params() {
        assert!(GridSpec::new(0.0, 1.0, 1, 0.1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 10, 0.0).is_err());
        assert!(GridSpec::new(1.0, 0.0, 10, 0.1).is_err());
    }

    #[test]
    fn grid_points_span_range() {
        let g = GridSpec::new(-2.0, 2.0, 5, 1e-6).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], -2.0);
        assert_eq!(p[4], 2.0);
        assert_eq!(p[2], 0.0);
    }
}
