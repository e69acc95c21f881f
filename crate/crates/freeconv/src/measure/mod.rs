pub mod circle;
pub mod halfline;
pub mod jacobi;
pub mod json;
pub mod real;
pub mod tau;
pub mod validate;
pub mod zoo;

pub use circle::{first_moment_circle, CircleMeasure, CircleRep};
pub use halfline::{HalfLineMeasure, HalfRep};
pub use jacobi::JacobiHead;
pub use real::{FnEvaluator, RealFamily, RealLineMeasure, RealRep};
pub use tau::{CircleTau, TauMeasure};
pub use zoo::{make_zoo_measure, AnyMeasure};

use crate::{Cx, Error, Result};

/// Additive Lévy data (γ, τ): shared by the free form (drives φ) and the
/// Boolean form (drives K).
#[derive(Debug, Clone)]
pub struct LevyTripletAdditive {
    pub gamma: f64,
    pub tau: TauMeasure,
}

/// Multiplicative Lévy data on the circle: k(z) = γ · exp(∫ (1+ζz)/(1−ζz) τ(dζ)).
#[derive(Debug, Clone)]
pub struct LevyDataMultCircle {
    pub gamma: Cx,
    pub tau: CircleTau,
}

/// Multiplicative Lévy data on the half-line:
/// log k(z) = −a z + b + ∫ (1+xz)/(z−x) τ(dx).
#[derive(Debug, Clone)]
pub struct LevyDataMultHalfline {
    pub a: f64,
    pub b: f64,
    pub tau: TauMeasure,
}

/// φ(z) = γ + ∫ (1+xz)/(z−x) τ(dx). Freely infinitely divisible by
/// construction; all powers t ≥ 0 are available by scaling the triplet.
pub fn from_levy_additive_free(triplet: LevyTripletAdditive) -> RealLineMeasure {
    RealLineMeasure::from_levy_free(triplet.gamma, triplet.tau)
}

/// K(z) = γ + ∫ (1+xz)/(z−x) τ(dx), so F(z) = z − K(z).
pub fn from_levy_additive_boolean(triplet: LevyTripletAdditive) -> RealLineMeasure {
    RealLineMeasure::from_levy_boolean(triplet.gamma, triplet.tau)
}

/// Build a circle measure from multiplicative Lévy data. The result carries
/// η(z) = z / k(z) and is multiplicatively Boolean infinitely divisible by
/// construction.
pub fn from_levy_mult_circle(data: LevyDataMultCircle) -> Result<CircleMeasure> {
    if (data.gamma.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::ParamDomain("circle Levy gamma must have modulus 1".into()));
    }
    let gamma = data.gamma;
    let tau = data.tau;
    // Constant k means η is linear: recognize the Poisson-kernel case so it
    // keeps its closed form.
    if tau.atoms.is_empty() {
        let c = (gamma * (Cx::new(tau.uniform, 0.0)).exp()).inv();
        let a = -c.norm().ln();
        let b = c.arg();
        if a >= 0.0 {
            return CircleMeasure::poisson_kernel(a, b);
        }
    }
    let eta = FnEvaluator::new(move |z: Cx| {
        let k = gamma * tau.herglotz(z).exp();
        z / k
    });
    Ok(CircleMeasure::from_eta_map(eta))
}

/// Build a half-line measure from multiplicative Lévy data. The candidate
/// η(z) = z · exp(a z − b − ∫ (1+xz)/(z−x) τ(dx)) is certified a posteriori
/// on a grid; invalid data is rejected.
pub fn from_levy_mult_halfline(data: LevyDataMultHalfline) -> Result<HalfLineMeasure> {
    if data.a < 0.0 {
        return Err(Error::ParamDomain("half-line Levy data needs a >= 0".into()));
    }
    if data.tau.atoms.iter().any(|&(x, _)| x < 0.0) {
        return Err(Error::ParamDomain("half-line Levy tau must live on [0, inf)".into()));
    }
    let LevyDataMultHalfline { a, b, tau } = data;
    let eta = move |z: Cx| -> Cx {
        let integral = tau.integrate(|x| (1.0 + x * z) / (z - x));
        z * (a * z - b - integral).exp()
    };
    let report = validate::validate_eta_halfline(&eta)?;
    if !report.ok {
        return Err(Error::InvalidMeasure(format!(
            "half-line Levy data does not produce a valid eta (violation {:.3e} at {:?})",
            report.max_violation, report.witness
        )));
    }
    Ok(HalfLineMeasure::from_eta_map(FnEvaluator::new(eta)))
}
