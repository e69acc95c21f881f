//! Boolean and free additive convolution powers, subordination, the
//! interpolating semigroup, shifts and dilations on the real line.

use crate::measure::{FnEvaluator, RealFamily, RealLineMeasure, RealRep};
use crate::{Cx, Error, Result};

/// Subordination data for μ^{⊞t}: F_{μ^{⊞t}} = F_μ ∘ ω with
/// ω = z/t + (1 − 1/t) F_μ(ω) as a Denjoy–Wolff fixed point.
#[derive(Debug, Clone)]
pub struct SubordinationSolution {
    pub mu: RealLineMeasure,
    pub t: f64,
}

impl SubordinationSolution {
    pub fn omega(&self, z: Cx) -> Result<Cx> {
        if z.im <= 0.0 {
            return Err(Error::Domain(format!("subordination needs Im z > 0, got {z}")));
        }
        let t = self.t;
        let mut w = z;
        let tol = 1e-12 * (1.0 + z.norm());
        for _ in 0..300 {
            let fw = self.mu.f(w)?;
            let mut next = z / t + (1.0 - 1.0 / t) * fw;
            // Round-off can push an iterate onto the real line; damp back.
            let mut guard = 0;
            while next.im <= 0.0 && guard < 60 {
                next = (next + w) / 2.0;
                guard += 1;
            }
            if next.im <= 0.0 {
                return Err(Error::FixedPoint(format!("iterate left the upper half-plane at z = {z}")));
            }
            if (next - w).norm() < tol {
                return Ok(next);
            }
            w = next;
        }
        Err(Error::FixedPoint(format!("no convergence after 300 iterations at z = {z}")))
    }

    /// Residual of the defining equation at z, for diagnostics.
    pub fn residual(&self, z: Cx) -> Result<f64> {
        let w = self.omega(z)?;
        let fw = self.mu.f(w)?;
        Ok((w - z / self.t - (1.0 - 1.0 / self.t) * fw).norm())
    }
}

/// μ^{⊎t}: F_out(z) = (1 − t) z + t F_μ(z). Closed-form representations are
/// preserved where the family is stable under the map.
pub fn boolean_power(mu: &RealLineMeasure, t: f64) -> Result<RealLineMeasure> {
    if t < 0.0 {
        return Err(Error::UnsupportedPower("Boolean powers need t >= 0".into()));
    }
    if t == 1.0 {
        return Ok(mu.clone());
    }
    if t == 0.0 {
        return Ok(RealLineMeasure::point(0.0));
    }
    let out = match &mu.rep {
        RealRep::ClosedForm(RealFamily::Point { a }) => RealLineMeasure::point(t * a),
        RealRep::ClosedForm(RealFamily::Cauchy { a, b }) => {
            RealLineMeasure::closed_form(RealFamily::Cauchy { a: t * a, b: t * b })
        }
        RealRep::ClosedForm(RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 }) => {
            RealLineMeasure::closed_form(RealFamily::FreeMeixner {
                beta0: t * beta0,
                gamma0: t * gamma0,
                beta1: *beta1,
                gamma1: *gamma1,
            })
        }
        RealRep::ClosedForm(RealFamily::BooleanHalfStable { b }) => {
            RealLineMeasure::closed_form(RealFamily::BooleanHalfStable { b: t * b })
        }
        RealRep::Atoms(atoms) if atoms.len() == 1 => RealLineMeasure::point(t * atoms[0].0),
        RealRep::Jacobi { beta, gamma, depth } => {
            let mut beta = beta.clone();
            let mut gamma = gamma.clone();
            beta[0] *= t;
            if !gamma.is_empty() {
                gamma[0] *= t;
            }
            RealLineMeasure::from_jacobi(beta, gamma, *depth)?
        }
        RealRep::LevyBoolean { gamma, tau } => {
            RealLineMeasure::from_levy_boolean(t * gamma, tau.scaled(t))
        }
        _ => {
            let base = mu.clone();
            let hint = mu.support_hint * t.max(1.0) + t;
            RealLineMeasure::from_transform(
                FnEvaluator::new(move |z| match base.f(z) {
                    Ok(f) => (1.0 - t) * z + t * f,
                    Err(_) => Cx::new(f64::NAN, f64::NAN),
                }),
                hint,
            )
        }
    };
    Ok(out)
}

/// μ^{⊞t}. For t ≥ 1 this uses analytic subordination; t ∈ [0, 1) is only
/// available when the representation carries a directly scalable φ
/// (closed-form φ or Lévy data), in which case any t ≥ 0 scales φ.
pub fn free_power(mu: &RealLineMeasure, t: f64) -> Result<RealLineMeasure> {
    if t < 0.0 {
        return Err(Error::UnsupportedPower("free powers need t >= 0".into()));
    }
    if t == 1.0 {
        return Ok(mu.clone());
    }
    match &mu.rep {
        RealRep::ClosedForm(RealFamily::Point { a }) => return Ok(RealLineMeasure::point(t * a)),
        RealRep::ClosedForm(RealFamily::Cauchy { a, b }) => {
            if t == 0.0 {
                return Ok(RealLineMeasure::point(0.0));
            }
            return Ok(RealLineMeasure::closed_form(RealFamily::Cauchy { a: t * a, b: t * b }));
        }
        RealRep::ClosedForm(RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 })
            if beta0 == beta1 && gamma0 == gamma1 =>
        {
            // Semicircle: φ = β₀ + γ₀/z scales inside the family.
            return crate::measure::zoo::semicircle(t * beta0, t * gamma0);
        }
        RealRep::LevyFree { gamma, tau } => {
            return Ok(RealLineMeasure::from_levy_free(t * gamma, tau.scaled(t)));
        }
        _ => {}
    }
    if t < 1.0 {
        if mu.has_scalable_phi() {
            let base = mu.clone();
            let hint = mu.support_hint + 1.0;
            return Ok(RealLineMeasure::from_phi_map(
                FnEvaluator::new(move |z| t * base.phi_direct(z).expect("scalable phi")),
                hint,
            ));
        }
        return Err(Error::UnsupportedPower(format!(
            "free power t = {t} < 1 needs an infinitely divisible representation"
        )));
    }
    let sub = SubordinationSolution { mu: mu.clone(), t };
    let hint = mu.support_hint * t + 2.0 * (t * (1.0 + mu.support_hint)).sqrt();
    Ok(RealLineMeasure::from_transform(
        FnEvaluator::new(move |z| match sub.omega(z).and_then(|w| sub.mu.f(w)) {
            Ok(f) => f,
            Err(_) => Cx::new(f64::NAN, f64::NAN),
        }),
        hint,
    ))
}

/// The interpolating semigroup: 𝔹_t(μ) = (μ^{⊞(1+t)})^{⊎ 1/(1+t)}. At t = 1
/// this is the Boolean-to-free Bercovici–Pata bijection.
pub fn bt_map(mu: &RealLineMeasure, t: f64) -> Result<RealLineMeasure> {
    if t < 0.0 {
        return Err(Error::UnsupportedPower("the semigroup is defined for t >= 0".into()));
    }
    if t == 0.0 {
        return Ok(mu.clone());
    }
    match &mu.rep {
        // Fixed points: point masses and Cauchy laws.
        RealRep::ClosedForm(RealFamily::Point { .. }) | RealRep::ClosedForm(RealFamily::Cauchy { .. }) => {
            return Ok(mu.clone())
        }
        RealRep::Atoms(atoms) if atoms.len() == 1 => return Ok(mu.clone()),
        _ => {}
    }
    let sub = SubordinationSolution { mu: mu.clone(), t: 1.0 + t };
    let hint = mu.support_hint + 2.0 * (t * (1.0 + mu.support_hint)).sqrt() + t;
    Ok(RealLineMeasure::from_transform(
        FnEvaluator::new(move |z| {
            // F_out(z) = z + F_μ(ω(z)) − ω(z): the complementary
            // subordination path, algebraically equal to the compositional
            // definition (cross-checked in tests).
            match sub.omega(z) {
                Ok(w) => match sub.mu.f(w) {
                    Ok(f) => z + f - w,
                    Err(_) => Cx::new(f64::NAN, f64::NAN),
                },
                Err(_) => Cx::new(f64::NAN, f64::NAN),
            }
        }),
        hint,
    ))
}

/// The compositional path for the same semigroup, kept as an independent
/// cross-check of `bt_map`.
pub fn bt_map_compositional(mu: &RealLineMeasure, t: f64) -> Result<RealLineMeasure> {
    boolean_power(&free_power(mu, 1.0 + t)?, 1.0 / (1.0 + t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// μ ⊞ δ_a: F_out(z) = F_μ(z − a).
    Free,
    /// μ ⊎ δ_a: F_out(z) = F_μ(z) − a.
    Boolean,
}

pub fn translate(mu: &RealLineMeasure, a: f64, mode: ShiftMode) -> Result<RealLineMeasure> {
    if a == 0.0 {
        return Ok(mu.clone());
    }
    let out = match (&mu.rep, mode) {
        (RealRep::ClosedForm(RealFamily::Point { a: p }), _) => RealLineMeasure::point(p + a),
        (RealRep::ClosedForm(RealFamily::Cauchy { a: c, b }), _) => {
            RealLineMeasure::closed_form(RealFamily::Cauchy { a: c + a, b: *b })
        }
        (RealRep::ClosedForm(RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 }), ShiftMode::Free) => {
            RealLineMeasure::closed_form(RealFamily::FreeMeixner {
                beta0: beta0 + a,
                gamma0: *gamma0,
                beta1: beta1 + a,
                gamma1: *gamma1,
            })
        }
        (RealRep::ClosedForm(RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 }), ShiftMode::Boolean) => {
            RealLineMeasure::closed_form(RealFamily::FreeMeixner {
                beta0: beta0 + a,
                gamma0: *gamma0,
                beta1: *beta1,
                gamma1: *gamma1,
            })
        }
        (RealRep::Atoms(atoms), ShiftMode::Free) => {
            RealLineMeasure::from_atoms(atoms.iter().map(|&(x, w)| (x + a, w)).collect())?
        }
        (RealRep::Jacobi { beta, gamma, depth }, ShiftMode::Free) => {
            RealLineMeasure::from_jacobi(beta.iter().map(|b| b + a).collect(), gamma.clone(), *depth)?
        }
        (RealRep::Jacobi { beta, gamma, depth }, ShiftMode::Boolean) => {
            let mut beta = beta.clone();
            beta[0] += a;
            RealLineMeasure::from_jacobi(beta, gamma.clone(), *depth)?
        }
        (RealRep::LevyFree { gamma, tau }, ShiftMode::Free) => {
            RealLineMeasure::from_levy_free(gamma + a, tau.clone())
        }
        (RealRep::LevyBoolean { gamma, tau }, ShiftMode::Boolean) => {
            RealLineMeasure::from_levy_boolean(gamma + a, tau.clone())
        }
        _ => {
            let base = mu.clone();
            let hint = mu.support_hint + a.abs();
            let f = match mode {
                ShiftMode::Free => FnEvaluator::new(move |z: Cx| match base.f(z - a) {
                    Ok(f) => f,
                    Err(_) => Cx::new(f64::NAN, f64::NAN),
                }),
                ShiftMode::Boolean => FnEvaluator::new(move |z: Cx| match base.f(z) {
                    Ok(f) => f - a,
                    Err(_) => Cx::new(f64::NAN, f64::NAN),
                }),
            };
            RealLineMeasure::from_transform(f, hint)
        }
    };
    Ok(out)
}

/// Dilation D_s: F_out(z) = s F_μ(z/s).
pub fn dilate(mu: &RealLineMeasure, s: f64) -> Result<RealLineMeasure> {
    if s <= 0.0 {
        return Err(Error::ParamDomain("dilation factor must be > 0".into()));
    }
    let out = match &mu.rep {
        RealRep::Atoms(atoms) => {
            RealLineMeasure::from_atoms(atoms.iter().map(|&(x, w)| (s * x, w)).collect())?
        }
        RealRep::ClosedForm(RealFamily::Point { a }) => RealLineMeasure::point(s * a),
        RealRep::ClosedForm(RealFamily::Cauchy { a, b }) => {
            RealLineMeasure::closed_form(RealFamily::Cauchy { a: s * a, b: s * b })
        }
        RealRep::ClosedForm(RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 }) => {
            RealLineMeasure::closed_form(RealFamily::FreeMeixner {
                beta0: s * beta0,
                gamma0: s * s * gamma0,
                beta1: s * beta1,
                gamma1: s * s * gamma1,
            })
        }
        RealRep::ClosedForm(RealFamily::BooleanHalfStable { b }) => {
            RealLineMeasure::closed_form(RealFamily::BooleanHalfStable { b: b * s.sqrt() })
        }
        RealRep::Jacobi { beta, gamma, depth } => RealLineMeasure::from_jacobi(
            beta.iter().map(|b| s * b).collect(),
            gamma.iter().map(|g| s * s * g).collect(),
            *depth,
        )?,
        RealRep::LevyFree { .. } | RealRep::PhiMap(_) => {
            let base = mu.clone();
            let hint = mu.support_hint * s;
            RealLineMeasure::from_phi_map(
                FnEvaluator::new(move |z| s * base.phi_direct(z / s).expect("scalable phi")),
                hint,
            )
        }
        _ => {
            let base = mu.clone();
            let hint = mu.support_hint * s;
            RealLineMeasure::from_transform(
                FnEvaluator::new(move |z: Cx| match base.f(z / s) {
                    Ok(f) => s * f,
                    Err(_) => Cx::new(f64::NAN, f64::NAN),
                }),
                hint,
            )
        }
    };
    Ok(out)
}

/// Moments by contour integration of z^k G(z) over |z| = 4(1 + support
/// hint). Works for transform-backed representations where direct moment
/// rules are unavailable; requires compact support (not Cauchy-type tails).
pub fn moments_via_contour(mu: &RealLineMeasure, k: usize) -> Result<f64> {
    match mu.moment(k) {
        Ok(m) => return Ok(m),
        Err(Error::MomentUnavailable) => {}
        Err(e) => return Err(e),
    }
    let r = 4.0 * (1.0 + mu.support_hint);
    let n = 1024;
    let mut acc = Cx::new(0.0, 0.0);
    for j in 0..n {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
        let z = Cx::from_polar(r, theta);
        let g = mu.g(z)?;
        acc += z.powu(k as u32 + 1) * g;
    }
    Ok((acc / n as f64).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::zoo::{arcsine, bernoulli, kesten_mckay, semicircle};
    use crate::measure::JacobiHead;

    fn f_close(a: &RealLineMeasure, b: &RealLineMeasure, tol: f64) {
        for z in crate::grid::upper_halfplane_samples(4.0, 9, 0.05, 3.0, 4) {
            let fa = a.f(z).unwrap();
            let fb = b.f(z).unwrap();
            assert!((fa - fb).norm() < tol, "z={z}: {fa} vs {fb}");
        }
    }

    #[test]
    fn boolean_power_point_and_identity() {
        let d = RealLineMeasure::point(1.5);
        let p = boolean_power(&d, 3.0).unwrap();
        f_close(&p, &RealLineMeasure::point(4.5), 1e-12);
        let b = bernoulli();
        f_close(&boolean_power(&b, 1.0).unwrap(), &b, 1e-12);
    }

    #[test]
    fn boolean_power_is_multiplicative() {
        let mu = kesten_mckay(0.5).unwrap();
        let a = boolean_power(&boolean_power(&mu, 0.7).unwrap(), 2.0).unwrap();
        let b = boolean_power(&mu, 1.4).unwrap();
        f_close(&a, &b, 1e-12);
    }

    #[test]
    fn free_power_semicircle_is_dilation() {
        let sc = semicircle(0.0, 1.0).unwrap();
        let doubled = free_power(&sc, 2.0).unwrap();
        let dilated = dilate(&sc, 2f64.sqrt()).unwrap();
        f_close(&doubled, &dilated, 1e-9);
    }

    #[test]
    fn free_power_of_bernoulli_is_arcsine() {
        let b = bernoulli();
        let squared = free_power(&b, 2.0).unwrap();
        f_close(&squared, &arcsine(), 1e-8);
        // Jacobi head of the output from contour moments: (0, 0; 2, 1).
        let m: Vec<f64> = (1..=4).map(|k| moments_via_contour(&squared, k).unwrap()).collect();
        let head = JacobiHead::from_moments(m[0], m[1], m[2], m[3]).unwrap();
        assert!(head.beta0.abs() < 1e-7);
        assert!((head.gamma0 - 2.0).abs() < 1e-7);
        assert!(head.beta1.abs() < 1e-6);
        assert!((head.gamma1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn free_power_is_multiplicative() {
        let mu = kesten_mckay(0.5).unwrap();
        let a = free_power(&free_power(&mu, 1.5).unwrap(), 2.0).unwrap();
        let b = free_power(&mu, 3.0).unwrap();
        f_close(&a, &b, 1e-8);
    }

    #[test]
    fn subordination_on_point_mass_is_affine() {
        // For δ_a, F(w) = w − a gives ω(z) = z − (t−1)a exactly.
        let sub = SubordinationSolution { mu: RealLineMeasure::point(0.7), t: 3.0 };
        let z = Cx::new(0.4, 1.1);
        let w = sub.omega(z).unwrap();
        assert!((w - (z - 1.4)).norm() < 1e-10);
        assert!(sub.residual(z).unwrap() < 1e-10);
    }

    #[test]
    fn bt_fixed_points() {
        let c = RealLineMeasure::closed_form(RealFamily::Cauchy { a: 1.0, b: 2.0 });
        f_close(&bt_map(&c, 1.0).unwrap(), &c, 1e-9);
        let d = RealLineMeasure::point(0.3);
        f_close(&bt_map(&d, 0.5).unwrap(), &d, 1e-12);
    }

    #[test]
    fn bt_of_bernoulli_is_semicircle() {
        let out = bt_map(&bernoulli(), 1.0).unwrap();
        f_close(&out, &semicircle(0.0, 1.0).unwrap(), 1e-9);
    }

    #[test]
    fn bt_paths_agree() {
        for mu in [bernoulli(), kesten_mckay(0.5).unwrap(), arcsine()] {
            for t in [0.3, 1.0, 2.0] {
                let fast = bt_map(&mu, t).unwrap();
                let slow = bt_map_compositional(&mu, t).unwrap();
                f_close(&fast, &slow, 1e-9);
            }
        }
    }

    #[test]
    fn shifts_and_commutation() {
        let c = RealLineMeasure::closed_form(RealFamily::Cauchy { a: 0.0, b: 1.0 });
        let shifted = translate(&c, 2.0, ShiftMode::Free).unwrap();
        f_close(&shifted, &RealLineMeasure::closed_form(RealFamily::Cauchy { a: 2.0, b: 1.0 }), 1e-12);

        let d = RealLineMeasure::point(0.0);
        f_close(
            &translate(&d, 1.3, ShiftMode::Boolean).unwrap(),
            &RealLineMeasure::point(1.3),
            1e-12,
        );

        // (μ ⊞ δ_a)^{⊎t} = (μ^{⊎t} ⊞ δ_a) ⊎ δ_{(t−1)a}.
        let mu = kesten_mckay(0.5).unwrap();
        let (a, t) = (0.8, 1.7);
        let lhs = boolean_power(&translate(&mu, a, ShiftMode::Free).unwrap(), t).unwrap();
        let rhs = translate(
            &translate(&boolean_power(&mu, t).unwrap(), a, ShiftMode::Free).unwrap(),
            (t - 1.0) * a,
            ShiftMode::Boolean,
        )
        .unwrap();
        f_close(&lhs, &rhs, 1e-10);
    }

    #[test]
    fn dilation_commutes_with_bt() {
        let mu = bernoulli();
        let (s, t) = (1.5, 0.8);
        let lhs = bt_map(&dilate(&mu, s).unwrap(), t).unwrap();
        let rhs = dilate(&bt_map(&mu, t).unwrap(), s).unwrap();
        f_close(&lhs, &rhs, 1e-8);
    }

    #[test]
    fn unsupported_small_free_power() {
        assert!(matches!(
            free_power(&bernoulli(), 0.5),
            Err(Error::UnsupportedPower(_))
        ));
        // Semicircle has closed φ, so small powers work.
        let half = free_power(&semicircle(0.0, 1.0).unwrap(), 0.5).unwrap();
        f_close(&half, &semicircle(0.0, 0.5).unwrap(), 1e-9);
    }

    #[test]
    fn contour_moments_match_direct() {
        let mu = kesten_mckay(0.7).unwrap();
        for k in 0..=6 {
            let direct = mu.moment(k).unwrap();
            // Force the contour path through a transform wrapper.
            let base = mu.clone();
            let wrapped = RealLineMeasure::from_transform(
                FnEvaluator::new(move |z| base.f(z).unwrap()),
                mu.support_hint,
            );
            let contour = moments_via_contour(&wrapped, k).unwrap();
            assert!((direct - contour).abs() < 1e-7 * (1.0 + direct.abs()), "k={k}: {direct} vs {contour}");
        }
    }
}
