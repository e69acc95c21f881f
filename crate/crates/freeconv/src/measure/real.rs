use std::fmt;
use std::sync::Arc;

use crate::measure::jacobi::moments_from_jacobi;
use crate::measure::tau::TauMeasure;
use crate::{Cx, Error, Result, I};

/// Shared callable wrapper so transform-backed representations stay `Clone`.
#[derive(Clone)]
pub struct FnEvaluator(pub Arc<dyn Fn(Cx) -> Cx + Send + Sync>);

impl FnEvaluator {
    pub fn new(f: impl Fn(Cx) -> Cx + Send + Sync + 'static) -> Self {
        FnEvaluator(Arc::new(f))
    }

    pub fn call(&self, z: Cx) -> Cx {
        (self.0)(z)
    }
}

impl fmt::Debug for FnEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnEvaluator(..)")
    }
}

/// Closed-form families on the real line with exact transform formulas.
#[derive(Debug, Clone, PartialEq)]
pub enum RealFamily {
    Point { a: f64 },
    Cauchy { a: f64, b: f64 },
    /// Jacobi parameters (β₀, β₁, β₁, …; γ₀, γ₁, γ₁, …). Covers the point
    /// mass (γ₀ = 0), semicircle (β₀ = β₁, γ₀ = γ₁), arcsine, Bernoulli,
    /// Kesten–McKay (0, t, 0, 1 reordered as β₀=β₁=0, γ₀=1, γ₁=t).
    FreeMeixner { beta0: f64, gamma0: f64, beta1: f64, gamma1: f64 },
    /// F(z) = z + b√z with 0 ≤ arg b ≤ π/2.
    BooleanHalfStable { b: Cx },
}

impl RealFamily {
    /// Reciprocal Cauchy transform on ℂ₊.
    pub fn f(&self, z: Cx) -> Cx {
        match *self {
            RealFamily::Point { a } => z - a,
            RealFamily::Cauchy { a, b } => z - a + I * b,
            RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 } => {
                z - beta0 - gamma0 * fm_tail(z, beta1, gamma1)
            }
            RealFamily::BooleanHalfStable { b } => z + b * z.sqrt(),
        }
    }

    /// Second-sheet values: F continued analytically through the cut
    /// carried by the absolutely continuous part (where the reflected
    /// principal evaluator is not the continuation).
    pub fn f_second(&self, z: Cx) -> Cx {
        match *self {
            RealFamily::Point { a } => z - a,
            RealFamily::Cauchy { a, b } => z - a + I * b,
            RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 } => {
                z - beta0 - gamma0 * fm_tail_second(z, beta1, gamma1)
            }
            RealFamily::BooleanHalfStable { b } => z - b * z.sqrt(),
        }
    }

    /// Closed-form Voiculescu transform where one exists.
    pub fn phi_closed(&self, z: Cx) -> Option<Cx> {
        match *self {
            RealFamily::Point { a } => Some(Cx::new(a, 0.0)),
            RealFamily::Cauchy { a, b } => Some(Cx::new(a, -b)),
            RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 }
                if beta0 == beta1 && gamma0 == gamma1 =>
            {
                // Semicircle: φ(z) = β₀ + γ₀/z.
                Some(beta0 + gamma0 / z)
            }
            RealFamily::FreeMeixner { .. } => None,
            RealFamily::BooleanHalfStable { b } => {
                // φ(z) = b²/2 − √(b²z + b⁴/4), written so the branch is the
                // analytic continuation of −b√z from large |z|.
                Some(b * b / 2.0 - b * (z + b * b * 0.25).sqrt())
            }
        }
    }

    pub fn moment(&self, k: usize) -> Result<f64> {
        match *self {
            RealFamily::Point { a } => Ok(a.powi(k as i32)),
            RealFamily::Cauchy { .. } => {
                if k == 0 {
                    Ok(1.0)
                } else {
                    Err(Error::MomentUndefined("Cauchy distributions have no moments of order >= 1".into()))
                }
            }
            RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 } => {
                Ok(moments_from_jacobi(&[beta0, beta1], &[gamma0, gamma1], k)[k])
            }
            RealFamily::BooleanHalfStable { .. } => {
                if k == 0 {
                    Ok(1.0)
                } else {
                    Err(Error::MomentUndefined("Boolean 1/2-stable laws have no moments of order >= 1".into()))
                }
            }
        }
    }

    pub fn support_hint(&self) -> f64 {
        match *self {
            RealFamily::Point { a } => a.abs(),
            RealFamily::Cauchy { a, b } => a.abs() + b + 1.0,
            RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 } => {
                beta0.abs().max(beta1.abs()) + 2.0 * gamma1.sqrt() + 2.0 * gamma0.sqrt()
            }
            RealFamily::BooleanHalfStable { b } => 4.0 * (1.0 + b.norm_sqr()),
        }
    }
}

/// Tail w(z) of the free Meixner continued fraction with constant
/// coefficients (β₁, γ₁): w = 1/(z − β₁ − γ₁ w), branch w ~ 1/z at ∞.
pub fn fm_tail(z: Cx, beta1: f64, gamma1: f64) -> Cx {
    let s = z - beta1;
    if gamma1 == 0.0 {
        return 1.0 / s;
    }
    let a = 2.0 * gamma1.sqrt();
    // √(s−a)·√(s+a) is analytic off the support segment and ~ s at ∞.
    let root = (s - a).sqrt() * (s + a).sqrt();
    (s - root) / (2.0 * gamma1)
}

/// The other branch of the tail: `fm_tail` continued through the cut
/// [β₁ − 2√γ₁, β₁ + 2√γ₁].
pub fn fm_tail_second(z: Cx, beta1: f64, gamma1: f64) -> Cx {
    let s = z - beta1;
    if gamma1 == 0.0 {
        return 1.0 / s;
    }
    let a = 2.0 * gamma1.sqrt();
    let root = (s - a).sqrt() * (s + a).sqrt();
    (s + root) / (2.0 * gamma1)
}

/// A probability measure on ℝ in one of several representations.
#[derive(Debug, Clone)]
pub enum RealRep {
    Atoms(Vec<(f64, f64)>),
    ClosedForm(RealFamily),
    Jacobi { beta: Vec<f64>, gamma: Vec<f64>, depth: usize },
    /// Direct F-evaluator on ℂ₊.
    Transform(FnEvaluator),
    /// φ(z) = γ + ∫ (1+xz)/(z−x) τ(dx); freely infinitely divisible by
    /// construction, so all powers t ≥ 0 exist.
    LevyFree { gamma: f64, tau: TauMeasure },
    /// K(z) = γ + ∫ (1+xz)/(z−x) τ(dx); F = z − K.
    LevyBoolean { gamma: f64, tau: TauMeasure },
    /// Direct Voiculescu-transform evaluator (used for scaled powers of
    /// measures whose φ is closed-form but F is not).
    PhiMap(FnEvaluator),
}

#[derive(Debug, Clone)]
pub struct RealLineMeasure {
    pub rep: RealRep,
    pub support_hint: f64,
}

impl RealLineMeasure {
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("atom list is empty".into()));
        }
        let mass: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if atoms.iter().any(|&(x, w)| w <= 0.0 || !x.is_finite()) {
            return Err(Error::InvalidMeasure("atom weights must be > 0 and locations finite".into()));
        }
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("atom weights sum to {mass}, expected 1")));
        }
        let hint = atoms.iter().map(|&(x, _)| x.abs()).fold(0.0, f64::max);
        Ok(RealLineMeasure { rep: RealRep::Atoms(atoms), support_hint: hint })
    }

    pub fn point(a: f64) -> Self {
        RealLineMeasure {
            rep: RealRep::ClosedForm(RealFamily::Point { a }),
            support_hint: a.abs(),
        }
    }

    pub fn closed_form(fam: RealFamily) -> Self {
        let hint = fam.support_hint();
        RealLineMeasure { rep: RealRep::ClosedForm(fam), support_hint: hint }
    }

    pub fn from_jacobi(beta: Vec<f64>, gamma: Vec<f64>, depth: usize) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidMeasure("jacobi beta list is empty".into()));
        }
        if gamma.len() + 1 < beta.len() || gamma.len() > beta.len() {
            return Err(Error::InvalidMeasure("jacobi needs len(gamma) = len(beta) or len(beta) - 1".into()));
        }
        if gamma.iter().any(|g| *g < 0.0) {
            return Err(Error::InvalidMeasure("jacobi gamma entries must be >= 0".into()));
        }
        let hint = beta.iter().map(|b| b.abs()).fold(0.0, f64::max)
            + 2.0 * gamma.iter().map(|g| g.sqrt()).fold(0.0, f64::max);
        Ok(RealLineMeasure { rep: RealRep::Jacobi { beta, gamma, depth }, support_hint: hint })
    }

    pub fn from_transform(f: FnEvaluator, support_hint: f64) -> Self {
        RealLineMeasure { rep: RealRep::Transform(f), support_hint }
    }

    pub fn from_phi_map(phi: FnEvaluator, support_hint: f64) -> Self {
        RealLineMeasure { rep: RealRep::PhiMap(phi), support_hint }
    }

    pub fn from_levy_free(gamma: f64, tau: TauMeasure) -> Self {
        let hint = levy_hint(gamma, &tau);
        RealLineMeasure { rep: RealRep::LevyFree { gamma, tau }, support_hint: hint }
    }

    pub fn from_levy_boolean(gamma: f64, tau: TauMeasure) -> Self {
        let hint = levy_hint(gamma, &tau);
        RealLineMeasure { rep: RealRep::LevyBoolean { gamma, tau }, support_hint: hint }
    }

    /// Whether free powers with exponent in [0, 1) are available (requires a
    /// directly scalable φ).
    pub fn has_scalable_phi(&self) -> bool {
        match &self.rep {
            RealRep::LevyFree { .. } | RealRep::PhiMap(_) => true,
            RealRep::ClosedForm(f) => f.phi_closed(Cx::new(0.0, 1.0)).is_some(),
            _ => false,
        }
    }

    pub fn moment(&self, k: usize) -> Result<f64> {
        match &self.rep {
            RealRep::Atoms(atoms) => {
                Ok(atoms.iter().map(|&(x, w)| w * x.powi(k as i32)).sum())
            }
            RealRep::ClosedForm(f) => f.moment(k),
            RealRep::Jacobi { beta, gamma, .. } => {
                Ok(moments_from_jacobi(beta, gamma, k)[k])
            }
            RealRep::Transform(_) | RealRep::LevyFree { .. } | RealRep::LevyBoolean { .. } | RealRep::PhiMap(_) => {
                Err(Error::MomentUnavailable)
            }
        }
    }
}

fn levy_hint(gamma: f64, tau: &TauMeasure) -> f64 {
    let atom_reach = tau.atoms.iter().map(|&(x, _)| x.abs()).fold(0.0, f64::max);
    let dens_reach = tau
        .density
        .as_ref()
        .map_or(0.0, |d| d.x0.abs().max(d.x1.abs()));
    gamma.abs() + atom_reach + dens_reach + 2.0 * (1.0 + tau.mass()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_f_is_affine() {
        let f = RealFamily::Cauchy { a: 0.0, b: 1.0 };
        let v = f.f(Cx::new(0.0, 1.0));
        assert!((v - Cx::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn semicircle_f_matches_quadratic() {
        // Var-1 semicircle: G solves G² − zG + 1 = 0, F = 1/G.
        let fam = RealFamily::FreeMeixner { beta0: 0.0, gamma0: 1.0, beta1: 0.0, gamma1: 1.0 };
        let z = Cx::new(0.7, 1.3);
        let f = fam.f(z);
        let g = 1.0 / f;
        assert!((g * g - z * g + 1.0).norm() < 1e-12);
        assert!(f.im >= z.im);
    }

    #[test]
    fn bernoulli_fm_head_matches_atoms() {
        // ½(δ₋₁+δ₁): G = z/(z²−1), F = z − 1/z; head (0, 0; 1, 0).
        let fam = RealFamily::FreeMeixner { beta0: 0.0, gamma0: 1.0, beta1: 0.0, gamma1: 0.0 };
        let z = Cx::new(0.4, 0.9);
        assert!((fam.f(z) - (z - 1.0 / z)).norm() < 1e-14);
    }

    #[test]
    fn half_stable_phi_inverts_f() {
        // φ(F(z)) must equal z − F(z) = −b√z.
        for theta in [std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2] {
            let b = Cx::from_polar(1.0, theta / 2.0);
            let fam = RealFamily::BooleanHalfStable { b };
            for &z in &[Cx::new(0.5, 0.8), Cx::new(-2.0, 0.3), Cx::new(3.0, 2.0)] {
                let fz = fam.f(z);
                let phi = fam.phi_closed(fz).unwrap();
                assert!((phi - (z - fz)).norm() < 1e-12, "theta={theta} z={z}");
            }
        }
    }

    #[test]
    fn kesten_mckay_moments() {
        // KM(t): head (0, 0; 1, t); m2 = 1, m4 = 1 + t.
        let fam = RealFamily::FreeMeixner { beta0: 0.0, gamma0: 1.0, beta1: 0.0, gamma1: 0.5 };
        assert!((fam.moment(2).unwrap() - 1.0).abs() < 1e-14);
        assert!((fam.moment(4).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn atom_validation() {
        assert!(RealLineMeasure::from_atoms(vec![(0.0, 0.5), (1.0, 0.6)]).is_err());
        assert!(RealLineMeasure::from_atoms(vec![(0.0, 0.5), (1.0, 0.5)]).is_ok());
        assert!(RealLineMeasure::from_atoms(vec![]).is_err());
    }

    #[test]
    fn cauchy_moments_refused() {
        let m = RealLineMeasure::closed_form(RealFamily::Cauchy { a: 0.0, b: 1.0 });
        assert!(matches!(m.moment(1), Err(Error::MomentUndefined(_))));
        assert_eq!(m.moment(0).unwrap(), 1.0);
    }
}
