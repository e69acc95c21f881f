use crate::measure::real::FnEvaluator;
use crate::{Cx, Error, Result};

/// A probability measure on [0, ∞), exposed through its η-transform on
/// ℂ∖ℝ₊.
#[derive(Debug, Clone)]
pub enum HalfRep {
    Atoms(Vec<(f64, f64)>),
    PointMass(f64),
    /// Marchenko–Pastur law of rate λ > 0.
    FreePoisson(f64),
    EtaMap(FnEvaluator),
}

#[derive(Debug, Clone)]
pub struct HalfLineMeasure {
    pub rep: HalfRep,
}

impl HalfLineMeasure {
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("atom list is empty".into()));
        }
        let mass: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("atom weights sum to {mass}, expected 1")));
        }
        if atoms.iter().any(|&(x, w)| x < 0.0 || w <= 0.0) {
            return Err(Error::InvalidMeasure("atoms must sit on [0, inf) with positive weights".into()));
        }
        Ok(HalfLineMeasure { rep: HalfRep::Atoms(atoms) })
    }

    pub fn point(a: f64) -> Result<Self> {
        if a < 0.0 {
            return Err(Error::ParamDomain("point mass location must be >= 0".into()));
        }
        Ok(HalfLineMeasure { rep: HalfRep::PointMass(a) })
    }

    pub fn free_poisson(lambda: f64) -> Result<Self> {
        if lambda <= 0.0 {
            return Err(Error::ParamDomain("free Poisson rate must be > 0".into()));
        }
        Ok(HalfLineMeasure { rep: HalfRep::FreePoisson(lambda) })
    }

    pub fn from_eta_map(eta: FnEvaluator) -> Self {
        HalfLineMeasure { rep: HalfRep::EtaMap(eta) }
    }

    pub fn is_point_zero(&self) -> bool {
        match &self.rep {
            HalfRep::PointMass(a) => *a == 0.0,
            HalfRep::Atoms(atoms) => atoms.len() == 1 && atoms[0].0 == 0.0,
            _ => false,
        }
    }

    /// Moment generating function ψ(z) = ∫ xz/(1−xz) dμ.
    pub fn psi(&self, z: Cx) -> Cx {
        match &self.rep {
            HalfRep::Atoms(atoms) => atoms
                .iter()
                .map(|&(x, w)| x * z / (1.0 - x * z) * w)
                .sum(),
            HalfRep::PointMass(a) => a * z / (1.0 - a * z),
            HalfRep::FreePoisson(lambda) => {
                // ψ(z) = G(1/z)/z − 1 with the Marchenko–Pastur Cauchy
                // transform G(w) = (w + 1 − λ − √(w−a₋)√(w−a₊)) / (2w),
                // a± = (1 ± √λ)².
                let w = 1.0 / z;
                let s = lambda.sqrt();
                let am = (1.0 - s) * (1.0 - s);
                let ap = (1.0 + s) * (1.0 + s);
                let root = (w - am).sqrt() * (w - ap).sqrt();
                let g = (w + 1.0 - lambda - root) / (2.0 * w);
                g / z - 1.0
            }
            HalfRep::EtaMap(f) => {
                let e = f.call(z);
                e / (1.0 - e)
            }
        }
    }

    pub fn eta(&self, z: Cx) -> Cx {
        match &self.rep {
            HalfRep::PointMass(a) => *a * z,
            HalfRep::EtaMap(f) => f.call(z),
            _ => {
                let psi = self.psi(z);
                psi / (1.0 + psi)
            }
        }
    }

    pub fn moment(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        match &self.rep {
            HalfRep::Atoms(atoms) => Ok(atoms.iter().map(|&(x, w)| w * x.powi(k as i32)).sum()),
            HalfRep::PointMass(a) => Ok(a.powi(k as i32)),
            HalfRep::FreePoisson(lambda) => {
                // m_k = Σ_{j=1}^{k} λ^j N(k, j) with Narayana numbers.
                let mut acc = 0.0;
                for j in 1..=k {
                    acc += lambda.powi(j as i32) * narayana(k, j);
                }
                Ok(acc)
            }
            HalfRep::EtaMap(_) => Err(Error::MomentUnavailable),
        }
    }
}

fn narayana(k: usize, j: usize) -> f64 {
    binom(k, j) * binom(k, j - 1) / k as f64
}

fn binom(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..r {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_eta_is_linear() {
        let mu = HalfLineMeasure::point(2.0).unwrap();
        let z = Cx::new(0.1, 0.2);
        assert!((mu.eta(z) - 2.0 * z).norm() < 1e-15);
    }

    #[test]
    fn atoms_eta_matches_point_mass() {
        let p = HalfLineMeasure::point(2.0).unwrap();
        let a = HalfLineMeasure::from_atoms(vec![(2.0, 1.0)]).unwrap();
        let z = Cx::new(-0.3, 0.4);
        assert!((p.eta(z) - a.eta(z)).norm() < 1e-13);
    }

    #[test]
    fn free_poisson_moments() {
        let mu = HalfLineMeasure::free_poisson(1.0).unwrap();
        // Rate-1 moments are the Catalan numbers 1, 2, 5, 14.
        assert!((mu.moment(1).unwrap() - 1.0).abs() < 1e-12);
        assert!((mu.moment(2).unwrap() - 2.0).abs() < 1e-12);
        assert!((mu.moment(3).unwrap() - 5.0).abs() < 1e-12);
        assert!((mu.moment(4).unwrap() - 14.0).abs() < 1e-12);
    }

    #[test]
    fn free_poisson_psi_matches_moment_series() {
        let mu = HalfLineMeasure::free_poisson(1.0).unwrap();
        // For small |z|, psi(z) = Σ m_k z^k.
        let z = Cx::new(0.02, 0.01);
        let series: Cx = (1..=12)
            .map(|k| mu.moment(k).unwrap() * z.powu(k as u32))
            .sum();
        assert!((mu.psi(z) - series).norm() < 1e-12);
    }

    #[test]
    fn free_poisson_eta_contracts_argument() {
        let mu = HalfLineMeasure::free_poisson(1.0).unwrap();
        for &z in &[Cx::new(0.3, 0.4), Cx::new(-1.0, 0.5), Cx::new(-5.0, 0.0001)] {
            let e = mu.eta(z);
            assert!(e.arg() >= z.arg() - 1e-10, "z={z} eta={e}");
            assert!(e.arg() < std::f64::consts::PI);
        }
    }

    #[test]
    fn rejects_negative_support() {
        assert!(HalfLineMeasure::from_atoms(vec![(-1.0, 1.0)]).is_err());
        assert!(HalfLineMeasure::point(-0.5).is_err());
    }
}
