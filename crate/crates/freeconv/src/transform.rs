//! Evaluation of the analytic transforms: G, F, K on the line; ψ, η, k, Σ
//! multiplicatively; numeric functional inversion; Stieltjes inversion.

use crate::grid::GridSpec;
use crate::measure::jacobi::continued_fraction_g;
use crate::measure::{CircleMeasure, HalfLineMeasure, RealLineMeasure, RealRep};
use crate::{Cx, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditiveWhich {
    G,
    F,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultWhich {
    Psi,
    Eta,
    KTransform,
    Sigma,
}

#[derive(Debug, Clone, Copy)]
pub struct InversionResult {
    pub value: Cx,
    pub residual: f64,
    pub iterations: usize,
}

impl InversionResult {
    pub fn exact(value: Cx) -> Self {
        InversionResult { value, residual: 0.0, iterations: 0 }
    }
}

/// Depth used for Jacobi representations that do not pin their own.
pub const DEFAULT_CF_DEPTH: usize = 200;

impl RealLineMeasure {
    /// Reciprocal Cauchy transform on ℂ₊ (extended to ℂ₋ by reflection).
    pub fn f(&self, z: Cx) -> Result<Cx> {
        if z.im < 0.0 {
            return Ok(self.f(z.conj())?.conj());
        }
        match &self.rep {
            RealRep::Atoms(atoms) => {
                let g: Cx = atoms.iter().map(|&(x, w)| w / (z - x)).sum();
                if g.norm() < 1e-300 {
                    return Err(Error::Domain(format!("Cauchy transform vanished at {z}")));
                }
                Ok(1.0 / g)
            }
            RealRep::ClosedForm(fam) => Ok(fam.f(z)),
            RealRep::Jacobi { beta, gamma, depth } => {
                let g = continued_fraction_g(beta, gamma, z, *depth)?;
                Ok(1.0 / g)
            }
            RealRep::Transform(f) => Ok(f.call(z)),
            RealRep::LevyBoolean { gamma, tau } => {
                let k = gamma + tau.integrate(|x| (1.0 + x * z) / (z - x));
                Ok(z - k)
            }
            RealRep::LevyFree { .. } | RealRep::PhiMap(_) => {
                // F is the functional inverse of w ↦ w + φ(w).
                let fwd = |w: Cx| -> Result<Cx> { Ok(w + self.phi_direct(w).expect("phi is direct here")) };
                let sol = newton_invert(&fwd, z, z, |w| w.im > 0.0)?;
                Ok(sol.value)
            }
        }
    }

    /// Analytic continuation of F through the support cut (the second
    /// sheet), for representations whose transform is algebraic. `None`
    /// when the continuation has no closed form.
    pub fn f_cut(&self, z: Cx) -> Option<Cx> {
        match &self.rep {
            // Rational F: the formula is its own continuation.
            RealRep::Atoms(atoms) => {
                let g: Cx = atoms.iter().map(|&(x, w)| w / (z - x)).sum();
                (g.norm() >= 1e-300).then(|| 1.0 / g)
            }
            RealRep::ClosedForm(fam) => Some(fam.f_second(z)),
            _ => None,
        }
    }

    pub fn g(&self, z: Cx) -> Result<Cx> {
        let f = self.f(z)?;
        if f.norm() < 1e-300 {
            return Err(Error::Domain(format!("F vanished at {z}")));
        }
        Ok(1.0 / f)
    }

    /// Energy function K(z) = z − F(z).
    pub fn k_energy(&self, z: Cx) -> Result<Cx> {
        Ok(z - self.f(z)?)
    }

    /// Closed-form φ where the representation carries one.
    pub fn phi_direct(&self, z: Cx) -> Option<Cx> {
        match &self.rep {
            RealRep::ClosedForm(fam) => fam.phi_closed(z),
            RealRep::LevyFree { gamma, tau } => {
                Some(gamma + tau.integrate(|x| (1.0 + x * z) / (z - x)))
            }
            RealRep::PhiMap(phi) => Some(phi.call(z)),
            _ => None,
        }
    }

    /// Voiculescu transform φ(z) = F⁻¹(z) − z, by formula when available,
    /// otherwise by Newton inversion of F.
    pub fn phi(&self, z: Cx, tol: f64) -> Result<InversionResult> {
        if let Some(v) = self.phi_direct(z) {
            return Ok(InversionResult::exact(v));
        }
        let fwd = |w: Cx| self.f(w);
        let mut sol = newton_invert_tol(&fwd, z, z, |w| w.im > 0.0, tol)?;
        sol.value -= z;
        Ok(sol)
    }
}

pub fn eval_additive_transform(mu: &RealLineMeasure, which: AdditiveWhich, z: Cx) -> Result<Cx> {
    if z.im <= 0.0 {
        return Err(Error::Domain(format!("additive transforms need Im z > 0, got {z}")));
    }
    match which {
        AdditiveWhich::G => mu.g(z),
        AdditiveWhich::F => mu.f(z),
        AdditiveWhich::K => mu.k_energy(z),
    }
}

pub fn eval_phi(mu: &RealLineMeasure, z: Cx, tol: f64) -> Result<InversionResult> {
    mu.phi(z, tol)
}

fn eta_prime0_circle(mu: &CircleMeasure) -> Cx {
    mu.m1()
}

fn eta_prime0_half(mu: &HalfLineMeasure) -> Cx {
    match mu.moment(1) {
        Ok(m1) => Cx::new(m1, 0.0),
        Err(_) => {
            // Differentiate along the imaginary axis: the positive real axis
            // is a cut for half-line representations.
            let d = |h: f64| {
                let ih = Cx::new(0.0, h);
                (mu.eta(ih) - mu.eta(-ih)) / (2.0 * ih)
            };
            let h = 1e-3;
            (4.0 * d(h) - d(2.0 * h)) / 3.0
        }
    }
}

pub fn eval_mult_transform_circle(mu: &CircleMeasure, which: MultWhich, z: Cx) -> Result<Cx> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("circle transforms need |z| < 1, got {z}")));
    }
    mult_transform(|w| mu.eta(w), eta_prime0_circle(mu), which, z, |w| w.norm() < 1.0)
}

pub fn eval_mult_transform_half(mu: &HalfLineMeasure, which: MultWhich, z: Cx) -> Result<Cx> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::Domain(format!("half-line transforms need z outside [0, inf), got {z}")));
    }
    mult_transform(|w| mu.eta(w), eta_prime0_half(mu), which, z, |w| {
        w.im != 0.0 || w.re < 0.0
    })
}

fn mult_transform(
    eta: impl Fn(Cx) -> Cx,
    eta_prime0: Cx,
    which: MultWhich,
    z: Cx,
    domain: impl Fn(Cx) -> bool,
) -> Result<Cx> {
    match which {
        MultWhich::Eta => Ok(eta(z)),
        MultWhich::Psi => {
            let e = eta(z);
            Ok(e / (1.0 - e))
        }
        MultWhich::KTransform => {
            // k(z) = z/η(z), extended by 1/η'(0) at the origin.
            if z.norm() < 1e-12 {
                if eta_prime0.norm() < 1e-300 {
                    return Err(Error::Domain("k undefined: eta'(0) = 0".into()));
                }
                return Ok(1.0 / eta_prime0);
            }
            let e = eta(z);
            if e.norm() < 1e-300 {
                return Err(Error::Domain(format!("k undefined: eta({z}) = 0")));
            }
            Ok(z / e)
        }
        MultWhich::Sigma => {
            // Σ(z) = η⁻¹(z)/z, extended by 1/η'(0) at the origin.
            if eta_prime0.norm() < 1e-300 {
                return Err(Error::Domain("Sigma undefined: eta'(0) = 0".into()));
            }
            if z.norm() < 1e-12 {
                return Ok(1.0 / eta_prime0);
            }
            let fwd = |w: Cx| -> Result<Cx> { Ok(eta(w)) };
            let sol = newton_invert(&fwd, z, z / eta_prime0, domain)?;
            Ok(sol.value / z)
        }
    }
}

/// Newton inversion of `forward` at `target` from `seed`, with a domain
/// guard. Derivatives are central finite differences; steps that raise the
/// residual or leave the domain are halved.
pub fn newton_invert(
    forward: &dyn Fn(Cx) -> Result<Cx>,
    target: Cx,
    seed: Cx,
    domain: impl Fn(Cx) -> bool,
) -> Result<InversionResult> {
    let tol = 1e-11 * (1.0 + target.norm());
    newton_invert_tol(forward, target, seed, domain, tol)
}

pub fn newton_invert_tol(
    forward: &dyn Fn(Cx) -> Result<Cx>,
    target: Cx,
    seed: Cx,
    domain: impl Fn(Cx) -> bool,
    tol: f64,
) -> Result<InversionResult> {
    let mut w = seed;
    let mut residual = (forward(w)? - target).norm();
    for iter in 0..100 {
        if residual <= tol {
            return Ok(InversionResult { value: w, residual, iterations: iter });
        }
        let h = 1e-6 * (1.0 + w.norm());
        let d = (forward(w + h)? - forward(w - h)?) / (2.0 * h);
        if d.norm() < 1e-300 {
            return Err(Error::NonConvergence { residual, iterations: iter });
        }
        let mut step = (forward(w)? - target) / d;
        let mut accepted = false;
        for _ in 0..12 {
            let cand = w - step;
            if domain(cand) {
                if let Ok(fc) = forward(cand) {
                    let r = (fc - target).norm();
                    if r < residual {
                        w = cand;
                        residual = r;
                        accepted = true;
                        break;
                    }
                }
            }
            step /= 2.0;
        }
        if !accepted {
            return Err(Error::NonConvergence { residual, iterations: iter });
        }
    }
    if residual <= tol {
        Ok(InversionResult { value: w, residual, iterations: 100 })
    } else {
        Err(Error::NonConvergence { residual, iterations: 100 })
    }
}

/// Density and atom candidates recovered from boundary values of G.
#[derive(Debug, Clone)]
pub struct DensityOutput {
    pub rows: Vec<(f64, f64)>,
    pub atoms: Vec<(f64, f64)>,
}

impl DensityOutput {
    pub fn to_csv(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push('\n');
        for &(x, d) in &self.rows {
            out.push_str(&format!("{x},{d}\n"));
        }
        for &(x, w) in &self.atoms {
            out.push_str(&format!("# atom,{x},{w}\n"));
        }
        out
    }
}

/// Stieltjes inversion: density(x) ≈ −(1/π) Im G(x + iε). Points where
/// ε·|Im G| exceeds 0.1 are reported as atom candidates instead.
pub fn stieltjes_density(mu: &RealLineMeasure, grid: &GridSpec) -> Result<DensityOutput> {
    if !(1e-8..=1e-2).contains(&grid.epsilon) {
        return Err(Error::ParamDomain("stieltjes epsilon must lie in [1e-8, 1e-2]".into()));
    }
    let mut rows = Vec::with_capacity(grid.count);
    let mut atoms = Vec::new();
    for z in grid.boundary_points() {
        let g = mu.g(z)?;
        let mass_scale = grid.epsilon * g.im.abs();
        if mass_scale > 0.1 {
            atoms.push((z.re, -grid.epsilon * g.im));
            rows.push((z.re, 0.0));
        } else {
            rows.push((z.re, -g.im / std::f64::consts::PI));
        }
    }
    Ok(DensityOutput { rows, atoms })
}

/// Circle density by the Poisson-kernel limit: density(θ) ≈
/// (1/2π) Re(1 + 2ψ(r e^{−iθ})) at r = 1 − ε.
pub fn circle_density_from_eta(mu: &CircleMeasure, n_points: usize) -> Result<DensityOutput> {
    let eps = 1e-8;
    let r = 1.0 - eps;
    let mut rows = Vec::with_capacity(n_points);
    let mut atoms = Vec::new();
    for i in 0..n_points {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / n_points as f64;
        let z = Cx::from_polar(r, -theta);
        let psi = mu.psi(z);
        if !psi.is_finite() {
            atoms.push((theta, f64::NAN));
            rows.push((theta, 0.0));
            continue;
        }
        let d = (1.0 + 2.0 * psi.re) / (2.0 * std::f64::consts::PI);
        // A unit atom at θ produces a Poisson-kernel spike of height ~1/(πε).
        if d * eps * std::f64::consts::PI > 0.05 {
            atoms.push((theta, d * eps * std::f64::consts::PI));
            rows.push((theta, 0.0));
        } else {
            rows.push((theta, d));
        }
    }
    Ok(DensityOutput { rows, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::zoo::{bernoulli, kesten_mckay, semicircle};
    use crate::measure::{RealFamily, TauMeasure};

    #[test]
    fn trivial_g_values() {
        let d0 = RealLineMeasure::point(0.0);
        let z = Cx::new(0.0, 1.0);
        assert!((d0.g(z).unwrap() - Cx::new(0.0, -1.0)).norm() < 1e-14);
        let cauchy = RealLineMeasure::closed_form(RealFamily::Cauchy { a: 0.0, b: 1.0 });
        assert!((cauchy.f(z).unwrap() - Cx::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn semicircle_g_matches_continued_fraction() {
        let sc = semicircle(0.0, 1.0).unwrap();
        let jac = RealLineMeasure::from_jacobi(vec![0.0], vec![1.0], 200).unwrap();
        let z = Cx::new(0.0, 2.0);
        assert!((sc.g(z).unwrap() - jac.g(z).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn phi_newton_agrees_with_levy_semicircle() {
        // Semicircle: φ(z) = 1/z; the Jacobi representation must recover it
        // through Newton inversion of F.
        let jac = RealLineMeasure::from_jacobi(vec![0.0], vec![1.0], 400).unwrap();
        let z = Cx::new(0.0, 2.0);
        let sol = jac.phi(z, 1e-11).unwrap();
        assert!((sol.value - 1.0 / z).norm() < 1e-8, "phi = {}", sol.value);
    }

    #[test]
    fn levy_free_semicircle_f() {
        // (γ=0, τ=δ₀): φ(z) = 1/z, the standard semicircle; F must match the
        // closed form through inversion.
        let lf = RealLineMeasure::from_levy_free(0.0, TauMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap());
        let sc = semicircle(0.0, 1.0).unwrap();
        for &z in &[Cx::new(0.0, 1.0), Cx::new(1.5, 0.5), Cx::new(-2.0, 0.01)] {
            let a = lf.f(z).unwrap();
            let b = sc.f(z).unwrap();
            assert!((a - b).norm() < 1e-9, "z={z} {a} vs {b}");
        }
    }

    #[test]
    fn levy_boolean_bernoulli_f() {
        // (γ=0, τ=δ₀): K = 1/z, F = z − 1/z, the symmetric Bernoulli law.
        let lb = RealLineMeasure::from_levy_boolean(0.0, TauMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap());
        let bern = bernoulli();
        let z = Cx::new(0.7, 0.4);
        assert!((lb.f(z).unwrap() - bern.f(z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn im_g_negative_im_f_expands() {
        for mu in [semicircle(0.3, 2.0).unwrap(), kesten_mckay(0.5).unwrap(), bernoulli()] {
            for z in crate::grid::upper_halfplane_samples(5.0, 10, 1e-3, 3.0, 5) {
                let g = mu.g(z).unwrap();
                let f = mu.f(z).unwrap();
                assert!(g.im < 0.0);
                assert!(f.im >= z.im - 1e-12);
            }
        }
    }

    #[test]
    fn cauchy_density_at_zero() {
        let cauchy = RealLineMeasure::closed_form(RealFamily::Cauchy { a: 0.0, b: 1.0 });
        let grid = GridSpec::new(-5.0, 5.0, 1001, 1e-6).unwrap();
        let out = stieltjes_density(&cauchy, &grid).unwrap();
        let mid = out.rows.iter().min_by(|a, b| a.0.abs().total_cmp(&b.0.abs())).unwrap();
        assert!((mid.1 - 1.0 / std::f64::consts::PI).abs() < 1e-4);
        assert!(out.atoms.is_empty());
    }

    #[test]
    fn kesten_mckay_density_at_zero() {
        for t in [0.5, 1.0, 2.0] {
            let mu = kesten_mckay(t).unwrap();
            let grid = GridSpec::new(-4.0, 4.0, 801, 1e-6).unwrap();
            let out = stieltjes_density(&mu, &grid).unwrap();
            let mid = out.rows.iter().min_by(|a, b| a.0.abs().total_cmp(&b.0.abs())).unwrap();
            assert!((mid.1 - t.sqrt() / std::f64::consts::PI).abs() < 1e-3, "t={t} d={}", mid.1);
        }
    }

    #[test]
    fn point_mass_atom_detected() {
        let mu = RealLineMeasure::point(0.0);
        let grid = GridSpec::new(-1.0, 1.0, 2001, 1e-6).unwrap();
        let out = stieltjes_density(&mu, &grid).unwrap();
        let atom = out.atoms.iter().min_by(|a, b| a.0.abs().total_cmp(&b.0.abs())).unwrap();
        assert!(atom.0.abs() < 1e-3);
        assert!((atom.1 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn density_integrates_to_one() {
        let mu = semicircle(0.0, 1.0).unwrap();
        let grid = GridSpec::new(-8.0, 8.0, 4001, 1e-6).unwrap();
        let out = stieltjes_density(&mu, &grid).unwrap();
        let h = 16.0 / 4000.0;
        let total: f64 = out.rows.iter().map(|&(_, d)| d * h).sum::<f64>()
            + out.atoms.iter().map(|&(_, w)| w).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-3, "total mass {total}");
    }

    #[test]
    fn circle_density_haar_and_poisson_kernel() {
        let haar = CircleMeasure::haar();
        let out = circle_density_from_eta(&haar, 64).unwrap();
        for &(_, d) in &out.rows {
            assert!((d - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
        }
        let (a, b) = (0.5, 0.3);
        let pk = CircleMeasure::poisson_kernel(a, b).unwrap();
        let out = circle_density_from_eta(&pk, 256).unwrap();
        for &(theta, d) in &out.rows {
            let e = (-a as f64).exp();
            let expect = (1.0 - e * e)
                / (2.0 * std::f64::consts::PI * (1.0 + e * e - 2.0 * e * (theta - b).cos()));
            assert!((d - expect).abs() < 1e-6, "theta={theta}");
        }
    }

    #[test]
    fn circle_atom_flagged() {
        let mu = CircleMeasure::point(Cx::new(0.0, 1.0)).unwrap();
        let out = circle_density_from_eta(&mu, 64).unwrap();
        assert!(out
            .atoms
            .iter()
            .any(|&(theta, _)| (theta - std::f64::consts::FRAC_PI_2).abs() < 0.1));
    }

    #[test]
    fn sigma_consistency_on_circle() {
        // δ_a on the circle: η = az with |a| = 1 ⇒ Σ ≡ 1/a.
        let zeta = Cx::from_polar(1.0, 0.7);
        let mu = CircleMeasure::point(zeta).unwrap();
        let z = Cx::new(0.2, 0.1);
        let s = eval_mult_transform_circle(&mu, MultWhich::Sigma, z).unwrap();
        assert!((s - 1.0 / zeta).norm() < 1e-9);
        let k = eval_mult_transform_circle(&mu, MultWhich::KTransform, z).unwrap();
        assert!((k - 1.0 / zeta).norm() < 1e-12);
    }

    #[test]
    fn sigma_on_halfline_point_mass() {
        let mu = HalfLineMeasure::point(2.0).unwrap();
        let z = Cx::new(-0.2, 0.05);
        let s = eval_mult_transform_half(&mu, MultWhich::Sigma, z).unwrap();
        assert!((s - 0.5).norm() < 1e-9);
    }

    #[test]
    fn eta_inversion_roundtrip() {
        let mu = HalfLineMeasure::free_poisson(1.0).unwrap();
        for &z in &[Cx::new(-0.05, 0.0), Cx::new(-0.1, 0.02), Cx::new(0.03, 0.04)] {
            let e = mu.eta(z);
            let fwd = |w: Cx| -> Result<Cx> { Ok(mu.eta(w)) };
            let sol = newton_invert(&fwd, e, z * 0.9, |w| w.im != 0.0 || w.re < 0.0).unwrap();
            assert!((sol.value - z).norm() < 1e-9, "z={z} got {}", sol.value);
        }
    }
}
