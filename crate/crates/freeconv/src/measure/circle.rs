use crate::measure::real::FnEvaluator;
use crate::{Cx, Error, Result};

/// A probability measure on the unit circle, exposed through its η-transform
/// on the open disc.
#[derive(Debug, Clone)]
pub enum CircleRep {
    /// Unit-modulus locations with positive weights.
    Atoms(Vec<(Cx, f64)>),
    Haar,
    PointMass(Cx),
    /// η(z) = cz with c = e^{−a+ib}; the circle analogue of the Cauchy law.
    PoissonKernel { a: f64, b: f64 },
    /// η(z) = Σ_{k≥1} coeff[k−1] · z^k.
    EtaSeries(Vec<Cx>),
    EtaMap(FnEvaluator),
}

#[derive(Debug, Clone)]
pub struct CircleMeasure {
    pub rep: CircleRep,
    /// A recorded argument of the first moment, possibly outside (−π, π].
    /// `None` means principal.
    pub m1_arg_choice: Option<f64>,
}

impl CircleMeasure {
    pub fn from_atoms(atoms: Vec<(Cx, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("atom list is empty".into()));
        }
        let mass: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("atom weights sum to {mass}, expected 1")));
        }
        for &(zeta, w) in &atoms {
            if w <= 0.0 {
                return Err(Error::InvalidMeasure("atom weights must be > 0".into()));
            }
            if (zeta.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidMeasure(format!("atom location {zeta} is not on the unit circle")));
            }
        }
        Ok(CircleMeasure { rep: CircleRep::Atoms(atoms), m1_arg_choice: None })
    }

    pub fn haar() -> Self {
        CircleMeasure { rep: CircleRep::Haar, m1_arg_choice: None }
    }

    pub fn point(zeta: Cx) -> Result<Self> {
        if (zeta.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("point mass {zeta} is not on the unit circle")));
        }
        Ok(CircleMeasure { rep: CircleRep::PointMass(zeta), m1_arg_choice: None })
    }

    pub fn poisson_kernel(a: f64, b: f64) -> Result<Self> {
        if a < 0.0 {
            return Err(Error::ParamDomain("Poisson kernel needs a >= 0".into()));
        }
        Ok(CircleMeasure { rep: CircleRep::PoissonKernel { a, b }, m1_arg_choice: None })
    }

    pub fn from_eta_map(eta: FnEvaluator) -> Self {
        CircleMeasure { rep: CircleRep::EtaMap(eta), m1_arg_choice: None }
    }

    pub fn with_arg_choice(mut self, phi: f64) -> Self {
        self.m1_arg_choice = Some(phi);
        self
    }

    pub fn is_haar(&self) -> bool {
        matches!(self.rep, CircleRep::Haar)
    }

    /// η-transform on the open disc.
    pub fn eta(&self, z: Cx) -> Cx {
        match &self.rep {
            CircleRep::Atoms(atoms) => {
                let psi: Cx = atoms
                    .iter()
                    .map(|&(zeta, w)| zeta * z / (1.0 - zeta * z) * w)
                    .sum();
                psi / (1.0 + psi)
            }
            CircleRep::Haar => Cx::new(0.0, 0.0),
            CircleRep::PointMass(zeta) => zeta * z,
            CircleRep::PoissonKernel { a, b } => Cx::from_polar((-a).exp(), *b) * z,
            CircleRep::EtaSeries(coeffs) => {
                let mut acc = Cx::new(0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    acc = (acc + c) * z;
                }
                acc
            }
            CircleRep::EtaMap(f) => f.call(z),
        }
    }

    /// Moment generating function ψ = η/(1−η).
    pub fn psi(&self, z: Cx) -> Cx {
        let e = self.eta(z);
        e / (1.0 - e)
    }

    /// First moment m₁ = η'(0).
    pub fn m1(&self) -> Cx {
        match &self.rep {
            CircleRep::Atoms(atoms) => atoms.iter().map(|&(zeta, w)| zeta * w).sum(),
            CircleRep::Haar => Cx::new(0.0, 0.0),
            CircleRep::PointMass(zeta) => *zeta,
            CircleRep::PoissonKernel { a, b } => Cx::from_polar((-a).exp(), *b),
            CircleRep::EtaSeries(coeffs) => coeffs.first().copied().unwrap_or(Cx::new(0.0, 0.0)),
            CircleRep::EtaMap(_) => eta_derivative_at_zero(|z| self.eta(z)),
        }
    }

    pub fn moment(&self, k: usize) -> Result<Cx> {
        if k == 0 {
            return Ok(Cx::new(1.0, 0.0));
        }
        match &self.rep {
            CircleRep::Atoms(atoms) => {
                Ok(atoms.iter().map(|&(zeta, w)| zeta.powu(k as u32) * w).sum())
            }
            CircleRep::Haar => Ok(Cx::new(0.0, 0.0)),
            CircleRep::PointMass(zeta) => Ok(zeta.powu(k as u32)),
            CircleRep::PoissonKernel { a, b } => {
                Ok(Cx::from_polar((-a * k as f64).exp(), b * k as f64))
            }
            _ => Err(Error::MomentUnavailable),
        }
    }
}

/// Fourth-order Richardson estimate of f'(0) for f analytic with f(0) = 0.
pub fn eta_derivative_at_zero(f: impl Fn(Cx) -> Cx) -> Cx {
    let h = 1e-2;
    let e = |x: f64| f(Cx::new(x, 0.0));
    (8.0 * (e(h) - e(-h)) - (e(2.0 * h) - e(-2.0 * h))) / (12.0 * h)
}

/// First moment together with its recorded argument. Errors when the moment
/// vanishes for a non-Haar measure, where no argument can be assigned.
pub fn first_moment_circle(mu: &CircleMeasure) -> Result<(Cx, f64)> {
    let m1 = mu.m1();
    if mu.is_haar() {
        return Ok((Cx::new(0.0, 0.0), 0.0));
    }
    if m1.norm() < 1e-12 {
        return Err(Error::AmbiguousArgument);
    }
    let arg = match mu.m1_arg_choice {
        Some(phi) => {
            // The chosen argument must agree with the value modulo 2π.
            let delta = (phi - m1.arg()) / (2.0 * std::f64::consts::PI);
            if (delta - delta.round()).abs() > 1e-6 {
                return Err(Error::Spec(format!(
                    "recorded argument {phi} does not match m1 = {m1} modulo 2pi"
                )));
            }
            phi
        }
        None => m1.arg(),
    };
    Ok((m1, arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn point_mass_eta_and_m1() {
        let zeta = Cx::from_polar(1.0, PI / 3.0);
        let mu = CircleMeasure::point(zeta).unwrap();
        let z = Cx::new(0.2, 0.1);
        assert!((mu.eta(z) - zeta * z).norm() < 1e-15);
        let (m1, arg) = first_moment_circle(&mu).unwrap();
        assert!((m1 - zeta).norm() < 1e-15);
        assert!((arg - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn haar_is_degenerate() {
        let mu = CircleMeasure::haar();
        assert_eq!(mu.eta(Cx::new(0.3, 0.4)), Cx::new(0.0, 0.0));
        let (m1, _) = first_moment_circle(&mu).unwrap();
        assert_eq!(m1, Cx::new(0.0, 0.0));
    }

    #[test]
    fn poisson_kernel_eta_is_linear() {
        let mu = CircleMeasure::poisson_kernel(0.5, 0.3).unwrap();
        let c = Cx::from_polar((-0.5f64).exp(), 0.3);
        let z = Cx::new(0.4, -0.2);
        assert!((mu.eta(z) - c * z).norm() < 1e-15);
        assert!((mu.m1() - c).norm() < 1e-15);
    }

    #[test]
    fn two_atom_eta_contracts() {
        let i = Cx::new(0.0, 1.0);
        let mu = CircleMeasure::from_atoms(vec![(Cx::new(1.0, 0.0), 0.5), (i, 0.5)]).unwrap();
        let z = Cx::new(0.3, 0.2);
        assert!(mu.eta(z).norm() <= z.norm() + 1e-12);
        let (m1, _) = first_moment_circle(&mu).unwrap();
        assert!((m1 - (Cx::new(1.0, 0.0) + i) / 2.0).norm() < 1e-14);
    }

    #[test]
    fn eta_map_m1_by_differentiation() {
        let c = Cx::new(0.3, 0.4);
        let mu = CircleMeasure::from_eta_map(FnEvaluator::new(move |z| c * z + 0.1 * z * z));
        assert!((mu.m1() - c).norm() < 1e-9);
    }

    #[test]
    fn symmetric_bernoulli_ambiguous_argument() {
        let mu = CircleMeasure::from_atoms(vec![
            (Cx::new(1.0, 0.0), 0.5),
            (Cx::new(-1.0, 0.0), 0.5),
        ])
        .unwrap();
        assert!(matches!(first_moment_circle(&mu), Err(Error::AmbiguousArgument)));
    }
}
