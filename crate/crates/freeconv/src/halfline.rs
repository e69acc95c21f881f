//! Multiplicative Boolean and free powers on [0, ∞), the half-line
//! semigroup, the multiplicative Bercovici–Pata bijection, conversions to
//! and from real-line representations, and the pullback divisibility
//! indicator.

use crate::additive;
use crate::grid::{upper_halfplane_samples, GridSpec};
use crate::indicator::IndicatorEstimate;
use crate::measure::validate::{validate_eta_halfline, ValidationReport};
use crate::measure::{FnEvaluator, HalfLineMeasure, HalfRep, RealLineMeasure, TauMeasure};
use crate::transform::{
    eval_mult_transform_half, newton_invert, stieltjes_density, MultWhich,
};
use crate::{Cx, Error, Result};

/// Rough support radius used when sizing real-line grids for a half-line
/// measure.
pub fn support_radius(mu: &HalfLineMeasure) -> f64 {
    match &mu.rep {
        HalfRep::Atoms(atoms) => atoms.iter().map(|&(x, _)| x).fold(0.0, f64::max),
        HalfRep::PointMass(a) => *a,
        HalfRep::FreePoisson(lambda) => (1.0 + lambda.sqrt()).powi(2),
        HalfRep::EtaMap(_) => 8.0,
    }
}

/// η'(0) by central differencing along the imaginary axis, which stays
/// inside ℂ∖ℝ₊ for every representation.
pub fn eta_prime0(mu: &HalfLineMeasure) -> Cx {
    if let Ok(m1) = mu.moment(1) {
        return Cx::new(m1, 0.0);
    }
    let d = |h: f64| {
        let ih = Cx::new(0.0, h);
        (mu.eta(ih) - mu.eta(-ih)) / (2.0 * ih)
    };
    let h = 1e-3;
    (4.0 * d(h) - d(2.0 * h)) / 3.0
}

/// μ^{⊎ₓt} for t ∈ [0, 1]: η_out(z) = z · (η_μ(z)/z)^t with the principal
/// power, which is single-valued because arg(η/z) ∈ (−π, π) on ℂ∖ℝ₊.
pub fn boolean_power_halfline(mu: &HalfLineMeasure, t: f64) -> Result<HalfLineMeasure> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::UnsupportedPower(format!(
            "half-line Boolean powers exist only for t in [0, 1]; t = {t} can leave the half-line"
        )));
    }
    if t == 0.0 {
        return HalfLineMeasure::point(1.0);
    }
    if t == 1.0 {
        return Ok(mu.clone());
    }
    match &mu.rep {
        HalfRep::PointMass(a) => return HalfLineMeasure::point(a.powf(t)),
        HalfRep::Atoms(atoms) if atoms.len() == 1 => {
            return HalfLineMeasure::point(atoms[0].0.powf(t))
        }
        _ => {}
    }
    if mu.is_point_zero() {
        return HalfLineMeasure::point(0.0);
    }
    let base = mu.clone();
    let eta = FnEvaluator::new(move |z: Cx| {
        if z.norm() < 1e-300 {
            return z;
        }
        let q = base.eta(z) / z;
        if q.norm() < 1e-300 {
            return Cx::new(0.0, 0.0);
        }
        z * (t * q.ln()).exp()
    });
    Ok(HalfLineMeasure::from_eta_map(eta))
}

/// μ^{⊠t} for t ≥ 1 (μ ≠ δ₀): η_out = η_μ ∘ ω with the subordinator
/// ω(z) = z · (η_μ(ω)/ω)^{t−1}.
pub fn free_power_halfline(mu: &HalfLineMeasure, t: f64) -> Result<HalfLineMeasure> {
    if t < 1.0 {
        return Err(Error::UnsupportedPower("half-line free powers need t >= 1".into()));
    }
    if mu.is_point_zero() {
        return Err(Error::UnsupportedPower("free multiplicative powers need mu != delta_0".into()));
    }
    if t == 1.0 {
        return Ok(mu.clone());
    }
    match &mu.rep {
        HalfRep::PointMass(a) => return HalfLineMeasure::point(a.powf(t)),
        HalfRep::Atoms(atoms) if atoms.len() == 1 => {
            return HalfLineMeasure::point(atoms[0].0.powf(t))
        }
        _ => {}
    }
    let base = mu.clone();
    let eta = FnEvaluator::new(move |z: Cx| match half_omega(&base, t, z) {
        Ok(w) => base.eta(w),
        Err(_) => Cx::new(f64::NAN, f64::NAN),
    });
    Ok(HalfLineMeasure::from_eta_map(eta))
}

fn half_omega(mu: &HalfLineMeasure, t: f64, z: Cx) -> Result<Cx> {
    if z.norm() < 1e-300 {
        return Ok(z);
    }
    let mut w = z;
    let tol = 1e-12 * (1.0 + z.norm());
    let mut damping = false;
    for iter in 0..400 {
        let q = mu.eta(w) / w;
        if q.norm() < 1e-300 || !q.is_finite() {
            return Err(Error::FixedPoint(format!("eta/omega degenerated at z = {z}")));
        }
        let mut next = z * ((t - 1.0) * q.ln()).exp();
        if next.im == 0.0 && next.re >= 0.0 {
            return Err(Error::FixedPoint(format!("subordinator hit the cut at z = {z}")));
        }
        if damping {
            next = 0.5 * (next + w);
        }
        if (next - w).norm() < tol {
            return Ok(next);
        }
        if iter == 80 {
            // Slow or oscillating progress: switch to relaxation.
            damping = true;
        }
        w = next;
    }
    Err(Error::FixedPoint(format!("half-line subordination did not converge at z = {z}")))
}

/// The half-line semigroup 𝕄_t = (free power t+1) then (Boolean power
/// 1/(t+1)); no branch bookkeeping is needed off the circle.
pub fn mt_map_halfline(mu: &HalfLineMeasure, t: f64) -> Result<HalfLineMeasure> {
    if t < 0.0 {
        return Err(Error::UnsupportedPower("the semigroup is defined for t >= 0".into()));
    }
    if t == 0.0 {
        return Ok(mu.clone());
    }
    let rho = free_power_halfline(mu, t + 1.0)?;
    boolean_power_halfline(&rho, 1.0 / (t + 1.0))
}

/// Multiplicative Boolean-to-free Bercovici–Pata bijection on [0, ∞):
/// η_out is the functional inverse of z ↦ z·k_μ(z) = z²/η_μ(z), so
/// Σ_out = k_μ.
pub fn lambda_mb_halfline(mu: &HalfLineMeasure) -> Result<HalfLineMeasure> {
    if mu.is_point_zero() {
        return Err(Error::UnsupportedPower("k-transform of delta_0 is undefined".into()));
    }
    match &mu.rep {
        HalfRep::PointMass(_) => return Ok(mu.clone()),
        HalfRep::Atoms(atoms) if atoms.len() == 1 => {
            return HalfLineMeasure::point(atoms[0].0)
        }
        _ => {}
    }
    let m1 = eta_prime0(mu);
    let base = mu.clone();
    let eta = FnEvaluator::new(move |w: Cx| {
        if w.norm() < 1e-300 {
            return w;
        }
        let fwd = |z: Cx| -> Result<Cx> {
            let e = base.eta(z);
            if e.norm() < 1e-300 {
                return Err(Error::Domain("eta vanished".into()));
            }
            Ok(z * z / e)
        };
        match newton_invert(&fwd, w, w * m1, |z| z.im != 0.0 || z.re < 0.0) {
            Ok(sol) => sol.value,
            Err(_) => Cx::new(f64::NAN, f64::NAN),
        }
    });
    Ok(HalfLineMeasure::from_eta_map(eta))
}

/// View a half-line measure through its real-line transforms:
/// F(z) = z · (1 − η(1/z)).
pub fn real_from_half(mu: &HalfLineMeasure) -> RealLineMeasure {
    match &mu.rep {
        HalfRep::Atoms(atoms) => {
            RealLineMeasure::from_atoms(atoms.clone()).expect("half-line atoms are valid real atoms")
        }
        HalfRep::PointMass(a) => RealLineMeasure::point(*a),
        _ => {
            let hint = support_radius(mu);
            let base = mu.clone();
            let f = FnEvaluator::new(move |z: Cx| z * (1.0 - base.eta(1.0 / z)));
            RealLineMeasure::from_transform(f, hint)
        }
    }
}

/// Reinterpret a real-line measure supported on [0, ∞) multiplicatively:
/// η(z) = 1 − z · F(1/z).
pub fn half_from_real(mu: &RealLineMeasure) -> HalfLineMeasure {
    let base = mu.clone();
    let eta = FnEvaluator::new(move |z: Cx| {
        if z.norm() < 1e-300 {
            return z * base.support_hint.max(1.0); // harmless linearization at 0
        }
        let mut w = 1.0 / z;
        if w.im == 0.0 {
            // F is continuous up to ℝ∖supp; step just off the axis so every
            // representation can evaluate.
            w += Cx::new(0.0, 1e-9);
        }
        match base.f(w) {
            Ok(v) => 1.0 - z * v,
            Err(_) => Cx::new(f64::NAN, f64::NAN),
        }
    });
    HalfLineMeasure::from_eta_map(eta)
}

/// Additive free power of a half-line measure. The result is certified to
/// stay on [0, ∞): spectral mass on the negative axis above 1e−6 is an
/// error.
pub fn free_additive_power_half(mu: &HalfLineMeasure, t: f64) -> Result<HalfLineMeasure> {
    let real = real_from_half(mu);
    let out = additive::free_power(&real, t)?;
    let x = 8.0 * (1.0 + out.support_hint);
    // Probe close to the axis: at height eps the Cauchy kernel leaks
    // O(eps) mass across a nearby support edge, so eps must sit well
    // below the 1e-6 mass threshold.
    let grid = GridSpec::new(-x, -1e-3, 241, 1e-8)?;
    let density = stieltjes_density(&out, &grid)?;
    let dx = (grid.x_max - grid.x_min) / (grid.count - 1) as f64;
    let mass: f64 = density.rows.iter().map(|&(_, d)| d * dx).sum::<f64>()
        + density.atoms.iter().map(|&(_, w)| w).sum::<f64>();
    if mass > 1e-6 {
        return Err(Error::InvalidMeasure(format!(
            "free additive power put mass {mass:.3e} on the negative axis"
        )));
    }
    Ok(half_from_real(&out))
}

/// Additive Boolean power of a half-line measure, which stays on [0, ∞)
/// for every t ≥ 0.
pub fn boolean_additive_power_half(mu: &HalfLineMeasure, t: f64) -> Result<HalfLineMeasure> {
    let real = real_from_half(mu);
    let out = additive::boolean_power(&real, t)?;
    Ok(half_from_real(&out))
}

/// Dilation x ↦ sx, s > 0: η_out(z) = η(sz).
pub fn dilate_half(mu: &HalfLineMeasure, s: f64) -> Result<HalfLineMeasure> {
    if s <= 0.0 {
        return Err(Error::ParamDomain("half-line dilation needs s > 0".into()));
    }
    match &mu.rep {
        HalfRep::Atoms(atoms) => {
            HalfLineMeasure::from_atoms(atoms.iter().map(|&(x, w)| (s * x, w)).collect())
        }
        HalfRep::PointMass(a) => HalfLineMeasure::point(s * a),
        _ => {
            let base = mu.clone();
            Ok(HalfLineMeasure::from_eta_map(FnEvaluator::new(move |z| base.eta(s * z))))
        }
    }
}

/// ((π_λ^{⊞t})^{⊠s})^{⊎r} as a real-line measure, starting from the free
/// Poisson law of rate λ written through its free Lévy data
/// (γ = t·λ/2, τ = (t·λ/2)·δ₁ for the ⊞-power).
pub fn poisson_power_chain(lambda: f64, t: f64, s: f64, r: f64) -> Result<RealLineMeasure> {
    if lambda <= 0.0 {
        return Err(Error::ParamDomain("free Poisson rate must be > 0".into()));
    }
    let tau = TauMeasure::from_atoms(vec![(1.0, t * lambda / 2.0)])?;
    let boxplus_t = RealLineMeasure::from_levy_free(t * lambda / 2.0, tau);
    let half = half_from_real(&boxplus_t);
    let boxtimes_s = free_power_halfline(&half, s)?;
    let back = real_from_half(&boxtimes_s);
    additive::boolean_power(&back, r)
}

/// Evidence that log Σ_μ is a Lévy exponent of the right sign:
/// Im log Σ(z) ≤ 0 on sampled points of ℂ₊.
pub fn sigma_positivity_evidence(mu: &HalfLineMeasure) -> Result<ValidationReport> {
    let mut ok = true;
    let mut max_violation = f64::NEG_INFINITY;
    let mut witness = None;
    let mut failures = 0usize;
    let pts: Vec<Cx> = upper_halfplane_samples(0.4, 9, 0.02, 0.4, 6);
    let total = pts.len();
    for z in pts {
        match eval_mult_transform_half(mu, MultWhich::Sigma, z) {
            Ok(sigma) => {
                let v = sigma.ln().im;
                if v > max_violation {
                    max_violation = v;
                    witness = Some(z);
                }
                if v > 1e-7 {
                    ok = false;
                }
            }
            Err(_) => failures += 1,
        }
    }
    if failures * 2 > total {
        return Err(Error::Inconclusive(format!(
            "Sigma evaluation failed at {failures}/{total} sample points"
        )));
    }
    Ok(ValidationReport { ok, max_violation, witness })
}

/// θ(μ) = sup{t ≥ 0 : μ ∈ 𝕄_t(half-line measures)}, estimated by pulling μ
/// back through the candidate preimage and round-tripping. The lower bound
/// is certified by the round trip; the upper end only records where the
/// pullback stopped looking like a measure.
pub fn theta_indicator_halfline(mu: &HalfLineMeasure, t_max: f64, tol_t: f64) -> Result<IndicatorEstimate> {
    if matches!(&mu.rep, HalfRep::PointMass(_))
        || matches!(&mu.rep, HalfRep::Atoms(a) if a.len() == 1)
    {
        return Ok(IndicatorEstimate {
            lower: t_max,
            upper: None,
            probes: vec![],
            method: "pullback-bisection-halfline".to_string(),
            inconclusive_probes: 0,
        });
    }
    let mut probes = Vec::new();
    let mut test = |t: f64| -> Result<bool> {
        let nu = match pullback_candidate(mu, t) {
            Ok(nu) => nu,
            Err(_) => {
                probes.push((t, f64::INFINITY));
                return Ok(false);
            }
        };
        let valid = match validate_eta_halfline(|z| nu.eta(z)) {
            Ok(report) => report.ok,
            Err(_) => false,
        };
        if !valid {
            probes.push((t, f64::INFINITY));
            return Ok(false);
        }
        // Certify: the round trip must reproduce μ.
        let round = mt_map_halfline(&nu, t)?;
        let mut max_dev = 0.0f64;
        for &z in &[
            Cx::new(0.3, 0.4),
            Cx::new(-0.8, 0.2),
            Cx::new(-2.5, 1.0),
            Cx::new(1.2, 2.0),
            Cx::new(-0.1, 0.05),
        ] {
            let dev = (round.eta(z) - mu.eta(z)).norm();
            if !dev.is_finite() {
                max_dev = f64::INFINITY;
                break;
            }
            max_dev = max_dev.max(dev);
        }
        probes.push((t, max_dev));
        Ok(max_dev < 1e-7)
    };

    let mut lower = 0.0f64;
    let mut upper: Option<f64> = None;
    let mut t = 1.0f64.min(t_max);
    if test(t)? {
        lower = t;
        while t < t_max {
            t = (t * 2.0).min(t_max);
            if test(t)? {
                lower = t;
            } else {
                upper = Some(t);
                break;
            }
        }
    } else {
        upper = Some(t);
        while t > tol_t {
            t /= 2.0;
            if test(t)? {
                lower = t;
                break;
            }
            upper = Some(t);
        }
    }
    if let Some(mut hi) = upper {
        let mut lo = lower;
        while hi - lo > tol_t {
            let mid = 0.5 * (hi + lo);
            if test(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lower = lo;
        upper = Some(hi);
    }
    Ok(IndicatorEstimate {
        lower,
        upper,
        probes,
        method: "pullback-bisection-halfline".to_string(),
        inconclusive_probes: 0,
    })
}

/// The unique candidate ν with 𝕄_t(ν) = μ: with ρ the formal Boolean
/// (t+1)-power of μ and ω(z) = z(η_μ(z)/z)^t, subordination gives
/// η_ν(ω(z)) = η_ρ(z).
fn pullback_candidate(mu: &HalfLineMeasure, t: f64) -> Result<HalfLineMeasure> {
    let m1 = eta_prime0(mu);
    if !m1.is_finite() || m1.norm() < 1e-12 {
        return Err(Error::Inconclusive("first moment unavailable for the pullback".into()));
    }
    let base = mu.clone();
    let scale = m1.powf(t);
    let eta = FnEvaluator::new(move |w: Cx| {
        if w.norm() < 1e-300 {
            return w;
        }
        let omega = |z: Cx| -> Result<Cx> {
            let q = base.eta(z) / z;
            if q.norm() < 1e-300 {
                return Err(Error::Domain("eta vanished".into()));
            }
            Ok(z * (t * q.ln()).exp())
        };
        match newton_invert(&omega, w, w / scale, |z| z.im != 0.0 || z.re < 0.0) {
            Ok(sol) => {
                let z = sol.value;
                let q = base.eta(z) / z;
                z * ((t + 1.0) * q.ln()).exp()
            }
            Err(_) => Cx::new(f64::NAN, f64::NAN),
        }
    });
    Ok(HalfLineMeasure::from_eta_map(eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atoms() -> HalfLineMeasure {
        HalfLineMeasure::from_atoms(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap()
    }

    #[test]
    fn boolean_power_point_masses() {
        let mu = HalfLineMeasure::point(4.0).unwrap();
        let p = boolean_power_halfline(&mu, 0.5).unwrap();
        let z = Cx::new(-0.3, 0.4);
        assert!((p.eta(z) - 2.0 * z).norm() < 1e-12);
        assert!(boolean_power_halfline(&mu, 1.5).is_err());
    }

    #[test]
    fn boolean_power_interpolates_eta_ratio() {
        let mu = two_atoms();
        let p = boolean_power_halfline(&mu, 0.5).unwrap();
        for &z in &[Cx::new(0.2, 0.3), Cx::new(-1.0, 0.5)] {
            let q = mu.eta(z) / z;
            assert!((p.eta(z) - z * q.sqrt()).norm() < 1e-12, "z = {z}");
        }
        assert!(validate_eta_halfline(|z| p.eta(z)).unwrap().ok);
    }

    #[test]
    fn free_power_point_and_validity() {
        let mu = HalfLineMeasure::point(2.0).unwrap();
        let p = free_power_halfline(&mu, 3.0).unwrap();
        let z = Cx::new(0.05, 0.1);
        assert!((p.eta(z) - 8.0 * z).norm() < 1e-12);

        let p = free_power_halfline(&two_atoms(), 2.0).unwrap();
        assert!(validate_eta_halfline(|z| p.eta(z)).unwrap().ok);
    }

    #[test]
    fn free_power_matches_additive_on_projections() {
        // μ^{⊠2} of ½(δ₁+δ₂): spot-check the subordination equation
        // η(ω) with ω = z(η(ω)/ω) ⇔ ω² = z·η(ω).
        let mu = two_atoms();
        let p = free_power_halfline(&mu, 2.0).unwrap();
        for &z in &[Cx::new(0.1, 0.2), Cx::new(-0.7, 0.4)] {
            let w = half_omega(&mu, 2.0, z).unwrap();
            assert!((w * w - z * mu.eta(w)).norm() < 1e-9, "z = {z}");
            assert!((p.eta(z) - mu.eta(w)).norm() < 1e-12);
        }
    }

    #[test]
    fn mt_fixes_point_masses() {
        let mu = HalfLineMeasure::point(3.0).unwrap();
        let out = mt_map_halfline(&mu, 2.0).unwrap();
        let z = Cx::new(-0.2, 0.3);
        assert!((out.eta(z) - 3.0 * z).norm() < 1e-12);
    }

    #[test]
    fn lambda_mb_on_point_masses_and_sigma() {
        let mu = two_atoms();
        let out = lambda_mb_halfline(&mu).unwrap();
        // Σ_out = k_μ at a few points.
        for &z in &[Cx::new(-0.3, 0.2), Cx::new(0.1, 0.15)] {
            let k = eval_mult_transform_half(&mu, MultWhich::KTransform, z).unwrap();
            let sigma = eval_mult_transform_half(&out, MultWhich::Sigma, z).unwrap();
            assert!((k - sigma).norm() < 1e-8, "z = {z}: {k} vs {sigma}");
        }
    }

    #[test]
    fn conversions_round_trip() {
        let mu = HalfLineMeasure::free_poisson(1.0).unwrap();
        let real = real_from_half(&mu);
        let back = half_from_real(&real);
        for &z in &[Cx::new(0.2, 0.3), Cx::new(-1.0, 0.5), Cx::new(-0.2, 0.01)] {
            assert!((back.eta(z) - mu.eta(z)).norm() < 1e-9, "z = {z}");
        }
    }

    #[test]
    fn real_view_of_free_poisson_is_a_pick_function() {
        use crate::measure::validate::validate_f_real;
        let real = real_from_half(&HalfLineMeasure::free_poisson(1.0).unwrap());
        assert!(validate_f_real(|z| real.f(z), 6.0).unwrap().ok);
    }

    #[test]
    fn additive_powers_stay_on_halfline() {
        let mu = two_atoms();
        let p = free_additive_power_half(&mu, 2.0).unwrap();
        assert!(validate_eta_halfline(|z| p.eta(z)).unwrap().ok);
        let b = boolean_additive_power_half(&mu, 0.5).unwrap();
        assert!(validate_eta_halfline(|z| b.eta(z)).unwrap().ok);
    }

    #[test]
    fn dilation_scales_atoms() {
        let mu = dilate_half(&two_atoms(), 2.0).unwrap();
        match &mu.rep {
            HalfRep::Atoms(a) => {
                assert_eq!(a[0].0, 2.0);
                assert_eq!(a[1].0, 4.0);
            }
            _ => panic!("expected atoms"),
        }
    }

    #[test]
    fn poisson_chain_builds() {
        let mu = poisson_power_chain(1.0, 2.0, 2.0, 0.5).unwrap();
        let z = Cx::new(0.3, 1.5);
        assert!(mu.f(z).unwrap().is_finite());
    }

    #[test]
    fn point_mass_indicator_is_infinite() {
        let mu = HalfLineMeasure::point(2.0).unwrap();
        let est = theta_indicator_halfline(&mu, 8.0, 0.05).unwrap();
        assert!(est.upper.is_none());
    }

    #[test]
    fn pullback_round_trip_at_small_t() {
        // Every measure is 𝕄_0(itself); at tiny t the pullback should
        // still succeed for the free Poisson law, which is ⊠-infinitely
        // divisible.
        let mu = HalfLineMeasure::free_poisson(1.0).unwrap();
        let nu = pullback_candidate(&mu, 0.5).unwrap();
        let round = mt_map_halfline(&nu, 0.5).unwrap();
        for &z in &[Cx::new(0.2, 0.3), Cx::new(-0.8, 0.2)] {
            assert!((round.eta(z) - mu.eta(z)).norm() < 1e-8, "z = {z}");
        }
    }
}
