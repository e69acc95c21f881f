use crate::{Cx, Error, Result};

/// Number of quadrature nodes for density components of Levy measures.
pub const TAU_QUAD_NODES: usize = 2048;

/// A finite non-negative measure on the real line (or on [0, inf)),
/// represented as atoms plus an optional uniform-grid density integrated by
/// the trapezoid rule.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<GridDensity>,
}

/// Density samples on a uniform grid over [x0, x1].
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    pub x0: f64,
    pub x1: f64,
    pub values: Vec<f64>,
}

impl TauMeasure {
    pub fn zero() -> Self {
        TauMeasure { atoms: Vec::new(), density: None }
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(_, w) in &atoms {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidMeasure("tau atom weights must be >= 0 and finite".into()));
            }
        }
        Ok(TauMeasure { atoms, density: None })
    }

    pub fn from_density(x0: f64, x1: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(x0 < x1) {
            return Err(Error::InvalidMeasure("tau density needs x0 < x1".into()));
        }
        let n = TAU_QUAD_NODES;
        let values: Vec<f64> = (0..n)
            .map(|i| f(x0 + (x1 - x0) * i as f64 / (n - 1) as f64))
            .collect();
        if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidMeasure("tau density must be >= 0 and finite".into()));
        }
        Ok(TauMeasure { atoms: Vec::new(), density: Some(GridDensity { x0, x1, values }) })
    }

    pub fn mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|&(_, w)| w).sum();
        atom_mass + self.density.as_ref().map_or(0.0, |d| trapezoid(d, |_| 1.0))
    }

    pub fn is_zero(&self) -> bool {
        self.mass() == 0.0
    }

    /// Integral of a complex kernel against the measure.
    pub fn integrate(&self, kernel: impl Fn(f64) -> Cx) -> Cx {
        let mut acc = Cx::new(0.0, 0.0);
        for &(x, w) in &self.atoms {
            acc += kernel(x) * w;
        }
        if let Some(d) = &self.density {
            acc += trapezoid_cx(d, kernel);
        }
        acc
    }

    /// Scale the total measure by a non-negative factor.
    pub fn scaled(&self, s: f64) -> TauMeasure {
        TauMeasure {
            atoms: self.atoms.iter().map(|&(x, w)| (x, w * s)).collect(),
            density: self.density.as_ref().map(|d| GridDensity {
                x0: d.x0,
                x1: d.x1,
                values: d.values.iter().map(|v| v * s).collect(),
            }),
        }
    }
}

fn trapezoid(d: &GridDensity, f: impl Fn(f64) -> f64) -> f64 {
    let n = d.values.len();
    let h = (d.x1 - d.x0) / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let x = d.x0 + h * i as f64;
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * d.values[i] * f(x);
    }
    acc * h
}

fn trapezoid_cx(d: &GridDensity, f: impl Fn(f64) -> Cx) -> Cx {
    let n = d.values.len();
    let h = (d.x1 - d.x0) / (n - 1) as f64;
    let mut acc = Cx::new(0.0, 0.0);
    for i in 0..n {
        let x = d.x0 + h * i as f64;
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += f(x) * (w * d.values[i]);
    }
    acc * h
}

/// A finite non-negative measure on the unit circle: atoms given by angle
/// plus a uniform (Haar) component of the stated mass.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleTau {
    pub atoms: Vec<(f64, f64)>,
    pub uniform: f64,
}

impl CircleTau {
    pub fn zero() -> Self {
        CircleTau { atoms: Vec::new(), uniform: 0.0 }
    }

    pub fn new(atoms: Vec<(f64, f64)>, uniform: f64) -> Result<Self> {
        if uniform < 0.0 || atoms.iter().any(|&(_, w)| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidMeasure("circle tau must be non-negative".into()));
        }
        Ok(CircleTau { atoms, uniform })
    }

    pub fn mass(&self) -> f64 {
        self.uniform + self.atoms.iter().map(|&(_, w)| w).sum::<f64>()
    }

    /// Integral of the Herglotz kernel (1 + zeta z)/(1 - zeta z) against the
    /// measure. The Haar component integrates the kernel to its mean, which
    /// is the constant 1.
    pub fn herglotz(&self, z: Cx) -> Cx {
        let mut acc = Cx::new(self.uniform, 0.0);
        for &(angle, w) in &self.atoms {
            let zeta = Cx::from_polar(1.0, angle);
            acc += (1.0 + zeta * z) / (1.0 - zeta * z) * w;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_integration() {
        let tau = TauMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap();
        let z = Cx::new(0.0, 2.0);
        // (1 + x z)/(z - x) at x = 0 is 1/z
        let v = tau.integrate(|x| (1.0 + x * z) / (z - x));
        let expect = 1.0 / z;
        assert!((v - expect).norm() < 1e-14);
        assert!((tau.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_mass_is_trapezoid() {
        let tau = TauMeasure::from_density(0.0, 1.0, |_| 2.0).unwrap();
        assert!((tau.mass() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn haar_herglotz_is_one() {
        let tau = CircleTau::new(vec![], 0.5).unwrap();
        let v = tau.herglotz(Cx::new(0.3, 0.2));
        assert!((v - Cx::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_negative_weights() {
        assert!(TauMeasure::from_atoms(vec![(0.0, -1.0)]).is_err());
        assert!(CircleTau::new(vec![(0.0, -0.1)], 0.0).is_err());
    }
}
