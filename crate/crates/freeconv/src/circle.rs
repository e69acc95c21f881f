//! Branch-indexed multiplicative Boolean and free powers on the unit
//! circle, the interpolating semigroup, the multiplicative Bercovici–Pata
//! bijection, and the circle divisibility indicator.

use std::f64::consts::PI;

use crate::indicator::{FidVerdict, IndicatorEstimate};
use crate::measure::validate::validate_eta_circle;
use crate::measure::{first_moment_circle, CircleMeasure, CircleRep, FnEvaluator};
use crate::transform::newton_invert;
use crate::{Cx, Error, Result, I};

const TWO_PI: f64 = 2.0 * PI;

/// Integer branch window of an argument: 0 on (−π, π), floor(φ/π) for
/// φ ≥ π, ceil(φ/π) for φ ≤ −π. One deterministic selection consistent
/// with the overlapping window conventions and the mirror identity.
pub fn bracket(phi: f64) -> i64 {
    if phi.abs() < PI {
        0
    } else if phi >= PI {
        (phi / PI).floor() as i64
    } else {
        (phi / PI).ceil() as i64
    }
}

/// Continuous logarithm u^{(n)} of the k-transform on the disc:
/// exp(u^{(n)}(z)) = k(z), u^{(n)} = u^{(0)} − 2πni, with
/// Im u^{(0)}(0) ∈ (−π, π).
#[derive(Debug, Clone)]
pub struct BranchLog {
    pub base: CircleMeasure,
    pub n: i64,
    anchor: Cx,
}

/// Build the branch logarithm, certifying that the measure admits one:
/// η must have its only zero at the origin (checked by the argument
/// principle on |z| = 0.95), the first moment must not vanish, and the
/// principal anchor must avoid the ±π boundary.
pub fn branch_log(mu: &CircleMeasure, n: i64) -> Result<BranchLog> {
    if mu.is_haar() {
        return Err(Error::Incompatible("Haar measure has no branch logarithm".into()));
    }
    let m1 = mu.m1();
    if m1.norm() < 1e-12 {
        return Err(Error::NotBooleanMultId("first moment vanishes; k has no value at 0".into()));
    }
    if (m1.arg().abs() - PI).abs() < 1e-12 {
        return Err(Error::BoundaryBranch(
            "Im u(0) = ±pi: approximate the measure by ones with off-axis first moment".into(),
        ));
    }
    let winding = eta_winding(mu, 0.95, 1024);
    if winding != 1 {
        return Err(Error::NotBooleanMultId(format!(
            "eta has winding number {winding} on |z| = 0.95; extra zeros block the logarithm"
        )));
    }
    // u(0) = log k(0) = −Log m1, principal.
    let anchor = -m1.ln();
    Ok(BranchLog { base: mu.clone(), n, anchor })
}

fn eta_winding(mu: &CircleMeasure, r: f64, samples: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = mu.eta(Cx::from_polar(r, 0.0));
    for j in 1..=samples {
        let theta = TWO_PI * j as f64 / samples as f64;
        let cur = mu.eta(Cx::from_polar(r, theta));
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / TWO_PI).round() as i64
}

impl BranchLog {
    fn k_at(&self, z: Cx) -> Result<Cx> {
        let e = self.base.eta(z);
        if e.norm() < 1e-300 {
            return Err(Error::Domain(format!("eta vanished at {z}; k undefined")));
        }
        Ok(z / e)
    }

    /// u^{(n)}(z) by radial continuation from the anchor at the origin.
    pub fn u(&self, z: Cx) -> Result<Cx> {
        Ok(self.u0(z)? - TWO_PI * self.n as f64 * I)
    }

    fn u0(&self, z: Cx) -> Result<Cx> {
        let r = z.norm();
        if r < 1e-9 {
            return Ok(self.anchor);
        }
        if r >= 1.0 {
            return Err(Error::Domain(format!("branch logarithm needs |z| < 1, got {z}")));
        }
        let dir = z / r;
        // Start close to the origin, where k is near k(0) and the principal
        // offset from the anchor is reliable.
        let r0 = (1e-3f64).min(r);
        let k0 = self.k_at(dir * r0)?;
        // k(0) = exp(anchor); offset the anchor by the principal log of the
        // ratio, which is safe this close to the origin.
        let l0 = (k0 / self.anchor.exp()).ln();
        if l0.im.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::BoundaryBranch(format!(
                "k moves too fast near the origin at direction {dir}"
            )));
        }
        let u0 = self.anchor + l0;
        let steps = 32;
        let ratio = (r / r0).powf(1.0 / steps as f64);
        let mut r_a = r0;
        let mut k_a = k0;
        let mut u_a = u0;
        for j in 1..=steps {
            let r_b = if j == steps { r } else { r0 * ratio.powi(j) };
            let (k_b, u_b) = self.advance(dir, r_a, k_a, u_a, r_b, 12)?;
            r_a = r_b;
            k_a = k_b;
            u_a = u_b;
        }
        Ok(u_a)
    }

    fn advance(&self, dir: Cx, r_a: f64, k_a: Cx, u_a: Cx, r_b: f64, depth: usize) -> Result<(Cx, Cx)> {
        let k_b = self.k_at(dir * r_b)?;
        let l = (k_b / k_a).ln();
        if l.im.abs() <= std::f64::consts::FRAC_PI_2 {
            return Ok((k_b, u_a + l));
        }
        if depth == 0 {
            return Err(Error::BoundaryBranch(format!(
                "radial continuation could not resolve the branch near {}",
                dir * r_b
            )));
        }
        let r_m = 0.5 * (r_a + r_b);
        let (k_m, u_m) = self.advance(dir, r_a, k_a, u_a, r_m, depth - 1)?;
        self.advance(dir, r_m, k_m, u_m, r_b, depth - 1)
    }
}

/// μ^{⊎ₓ_n t}: η_out(z) = z · exp(−t · u^{(n)}(z)).
pub fn boolean_power_circle(mu: &CircleMeasure, t: f64, n: i64) -> Result<CircleMeasure> {
    if t < 0.0 {
        return Err(Error::UnsupportedPower("Boolean powers need t >= 0".into()));
    }
    if mu.is_haar() {
        return Ok(CircleMeasure::haar());
    }
    match &mu.rep {
        // Constant u keeps the closed forms closed.
        CircleRep::PoissonKernel { a, b } => {
            return CircleMeasure::poisson_kernel(t * a, t * (b + TWO_PI * n as f64))
        }
        CircleRep::PointMass(zeta) => {
            let theta = zeta.arg();
            if (theta.abs() - PI).abs() < 1e-12 {
                return Err(Error::BoundaryBranch("point mass at −1 sits on the branch boundary".into()));
            }
            return CircleMeasure::point(Cx::from_polar(1.0, t * (theta + TWO_PI * n as f64)));
        }
        _ => {}
    }
    let branch = branch_log(mu, n)?;
    let eta = FnEvaluator::new(move |z: Cx| match branch.u(z) {
        Ok(u) => z * (-t * u).exp(),
        Err(_) => Cx::new(f64::NAN, f64::NAN),
    });
    Ok(CircleMeasure::from_eta_map(eta))
}

/// μ^{⊠_n t} for t ≥ 1: η_out = η_μ ∘ ω with ω = z · exp(−(t−1) u^{(n)}(ω))
/// and |ω(z)| ≤ |z|.
pub fn free_power_circle(mu: &CircleMeasure, t: f64, n: i64) -> Result<CircleMeasure> {
    if t < 1.0 {
        return Err(Error::UnsupportedPower("free multiplicative powers need t >= 1".into()));
    }
    if mu.is_haar() {
        return Ok(CircleMeasure::haar());
    }
    if t == 1.0 {
        return Ok(mu.clone());
    }
    match &mu.rep {
        CircleRep::PoissonKernel { a, b } => {
            return CircleMeasure::poisson_kernel(t * a, t * b + TWO_PI * n as f64 * (t - 1.0))
        }
        CircleRep::PointMass(zeta) => {
            let theta = zeta.arg();
            if (theta.abs() - PI).abs() < 1e-12 {
                return Err(Error::BoundaryBranch("point mass at −1 sits on the branch boundary".into()));
            }
            return CircleMeasure::point(Cx::from_polar(1.0, t * theta + TWO_PI * n as f64 * (t - 1.0)));
        }
        _ => {}
    }
    let branch = branch_log(mu, n)?;
    let base = mu.clone();
    let eta = FnEvaluator::new(move |z: Cx| match circle_omega(&branch, t, z) {
        Ok(w) => base.eta(w),
        Err(_) => Cx::new(f64::NAN, f64::NAN),
    });
    Ok(CircleMeasure::from_eta_map(eta))
}

fn circle_omega(branch: &BranchLog, t: f64, z: Cx) -> Result<Cx> {
    if z.norm() < 1e-14 {
        return Ok(z);
    }
    let mut w = z;
    let tol = 1e-12 * (1.0 + z.norm());
    for _ in 0..300 {
        let u = branch.u(w)?;
        let mut next = z * (-(t - 1.0) * u).exp();
        // (Ω2): |ω| ≤ |z|; round-off excursions are projected back.
        if next.norm() > z.norm() {
            next = next / next.norm() * z.norm();
        }
        if (next - w).norm() < tol {
            return Ok(next);
        }
        w = next;
    }
    Err(Error::FixedPoint(format!("circle subordination did not converge at z = {z}")))
}

/// The circle semigroup 𝕄_t^{(n)}: free power t+1 at the recorded argument
/// of m₁, then Boolean power 1/(t+1) at the transported argument, keeping
/// the first moment constant.
pub fn mt_map(mu: &CircleMeasure, t: f64, n: i64) -> Result<CircleMeasure> {
    if t < 0.0 {
        return Err(Error::UnsupportedPower("the semigroup is defined for t >= 0".into()));
    }
    if mu.is_haar() {
        return Ok(CircleMeasure::haar());
    }
    if t == 0.0 {
        return Ok(mu.clone());
    }
    let (m1, arg) = first_moment_circle(mu)?;
    if (m1.arg().abs() - PI).abs() < 1e-12 {
        return Err(Error::BoundaryBranch(
            "arg m1 = ±pi: the semigroup needs the limiting prescription, not implemented".into(),
        ));
    }
    // The recorded argument for this branch index.
    let psi = arg + TWO_PI * n as f64;
    let n_free = ((psi - m1.arg()) / TWO_PI).round() as i64;
    let rho = free_power_circle(mu, t + 1.0, n_free)?;
    let m1_rho = rho.m1();
    if m1_rho.norm() < 1e-12 {
        return Err(Error::NotBooleanMultId("free power lost its first moment".into()));
    }
    // Transport the argument: arg m₁(ρ) ≡ (t+1)ψ modulo 2π; the Boolean
    // branch offset restores the exact value so m₁ stays constant.
    let n_bool = (((t + 1.0) * psi - m1_rho.arg()) / TWO_PI).round() as i64;
    let out = boolean_power_circle(&rho, 1.0 / (t + 1.0), n_bool)?;
    Ok(out.with_arg_choice(psi))
}

/// Multiplicative Boolean-to-free Bercovici–Pata bijection:
/// η_out is the functional inverse of z ↦ z·k_μ(z), so Σ_out = k_μ.
pub fn lambda_mb_circle(mu: &CircleMeasure) -> Result<CircleMeasure> {
    if mu.is_haar() {
        return Ok(CircleMeasure::haar());
    }
    let m1 = mu.m1();
    if m1.norm() < 1e-12 {
        return Err(Error::NotBooleanMultId("first moment vanishes".into()));
    }
    match &mu.rep {
        CircleRep::PoissonKernel { .. } | CircleRep::PointMass(_) => return Ok(mu.clone()),
        _ => {}
    }
    let base = mu.clone();
    let eta = FnEvaluator::new(move |w: Cx| {
        if w.norm() < 1e-14 {
            return w;
        }
        let fwd = |z: Cx| -> Result<Cx> {
            let e = base.eta(z);
            if e.norm() < 1e-300 {
                return Err(Error::Domain("eta vanished".into()));
            }
            Ok(z * z / e)
        };
        match newton_invert(&fwd, w, w * m1, |z| z.norm() < 1.0) {
            Ok(sol) => sol.value,
            Err(_) => Cx::new(f64::NAN, f64::NAN),
        }
    });
    Ok(CircleMeasure::from_eta_map(eta))
}

#[derive(Debug, Clone)]
pub struct MidReport {
    pub verdict: FidVerdict,
    /// Largest −Re log Σ observed (positive means Herglotz violation).
    pub max_violation: f64,
    pub witness: Option<Cx>,
    pub failure_fraction: f64,
}

/// ⊠-infinite-divisibility test on 𝕋: Σ must extend over the sampled disc
/// with Re log Σ ≥ 0 (Herglotz positivity of the Lévy exponent), i.e.
/// |Σ(z)| ≥ 1.
pub fn is_mid_circle(mu: &CircleMeasure) -> Result<MidReport> {
    if mu.is_haar() {
        return Ok(MidReport { verdict: FidVerdict::Divisible, max_violation: 0.0, witness: None, failure_fraction: 0.0 });
    }
    let m1 = mu.m1();
    if m1.norm() < 1e-12 {
        return Err(Error::Inconclusive("first moment vanishes; Sigma has no anchor at 0".into()));
    }
    let n_rays = 48;
    let n_radii = 14;
    let r_max = 0.9;
    let mut max_violation = f64::NEG_INFINITY;
    let mut witness = None;
    let mut failures = 0usize;
    let total = n_rays * n_radii;
    for i in 0..n_rays {
        let theta = TWO_PI * i as f64 / n_rays as f64;
        // March outward along the ray, re-seeding the inversion with the
        // previous solution (radial continuation of η⁻¹).
        let mut seed_scale = 1.0 / m1;
        let mut lost = false;
        for j in 1..=n_radii {
            let r = r_max * j as f64 / n_radii as f64;
            let w = Cx::from_polar(r, theta);
            if lost {
                failures += 1;
                continue;
            }
            let fwd = |z: Cx| -> Result<Cx> { Ok(mu.eta(z)) };
            match newton_invert(&fwd, w, w * seed_scale, |z| z.norm() < 1.0) {
                Ok(sol) => {
                    seed_scale = sol.value / w;
                    let sigma = sol.value / w;
                    let v = -sigma.norm().ln();
                    if v > max_violation {
                        max_violation = v;
                        witness = Some(w);
                    }
                }
                Err(_) => {
                    failures += 1;
                    lost = true;
                }
            }
        }
    }
    let failure_fraction = failures as f64 / total as f64;
    let verdict = if failure_fraction > 0.3 {
        FidVerdict::Inconclusive
    } else if max_violation > 1e-7 {
        FidVerdict::NotDivisible
    } else {
        FidVerdict::Divisible
    };
    Ok(MidReport { verdict, max_violation, witness, failure_fraction })
}

/// θ^{(n)}(μ) = sup{t ≥ 0 : μ^{⊎ₓ_n t} is ⊠-infinitely divisible}, by
/// bisection through Boolean powers.
pub fn theta_indicator_circle(mu: &CircleMeasure, n: i64, t_max: f64, tol_t: f64) -> Result<IndicatorEstimate> {
    if mu.is_haar() {
        return Ok(IndicatorEstimate {
            lower: t_max,
            upper: None,
            probes: vec![],
            method: "boolean-bisection-circle".to_string(),
            inconclusive_probes: 0,
        });
    }
    let mut probes = Vec::new();
    let mut inconclusive = 0usize;
    let mut test = |t: f64| -> Result<Option<bool>> {
        let power = boolean_power_circle(mu, t, n)?;
        let report = is_mid_circle(&power)?;
        probes.push((t, report.max_violation));
        Ok(match report.verdict {
            FidVerdict::Divisible => Some(true),
            FidVerdict::NotDivisible => Some(false),
            FidVerdict::Inconclusive => {
                inconclusive += 1;
                None
            }
        })
    };

    let mut lower = 0.0f64;
    let mut upper: Option<f64> = None;
    let mut t = 1.0f64;
    if test(t)? == Some(true) {
        lower = t;
        while t < t_max {
            t = (t * 2.0).min(t_max);
            match test(t)? {
                Some(true) => lower = t,
                _ => {
                    upper = Some(t);
                    break;
                }
            }
            if t >= t_max {
                break;
            }
        }
    } else {
        upper = Some(t);
        while t > tol_t {
            t /= 2.0;
            match test(t)? {
                Some(true) => {
                    lower = t;
                    break;
                }
                _ => upper = Some(t),
            }
        }
    }
    if let Some(mut hi) = upper {
        let mut lo = lower;
        while hi - lo > tol_t {
            let mid = 0.5 * (hi + lo);
            match test(mid)? {
                Some(true) => lo = mid,
                _ => hi = mid,
            }
        }
        lower = lo;
        upper = Some(hi);
    }
    Ok(IndicatorEstimate {
        lower,
        upper,
        probes,
        method: "boolean-bisection-circle".to_string(),
        inconclusive_probes: inconclusive,
    })
}

/// Grid validity assertion used by tests and the harness after circle
/// power operations.
pub fn assert_valid_circle(mu: &CircleMeasure) -> Result<()> {
    let report = validate_eta_circle(|z| mu.eta(z))?;
    if !report.ok {
        return Err(Error::InvalidMeasure(format!(
            "circle eta violates the disc contraction by {:.3e}",
            report.max_violation
        )));
    }
    Ok(())
}
