use crate::grid::{disc_samples, upper_halfplane_samples};
use crate::{Cx, Error, Result};

/// Outcome of a grid validity check.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub ok: bool,
    pub max_violation: f64,
    pub witness: Option<Cx>,
}

impl ValidationReport {
    fn clean() -> Self {
        ValidationReport { ok: true, max_violation: 0.0, witness: None }
    }

    fn record(&mut self, violation: f64, z: Cx, tol: f64) {
        if violation > self.max_violation {
            self.max_violation = violation;
            self.witness = Some(z);
        }
        if violation > tol {
            self.ok = false;
        }
    }
}

pub const ETA_TOL: f64 = 1e-9;

/// η-transform contraction check on the disc: |η(z)| ≤ |z|.
pub fn validate_eta_circle(eta: impl Fn(Cx) -> Cx) -> Result<ValidationReport> {
    let mut report = ValidationReport::clean();
    for z in disc_samples(0.95, 10, 64) {
        let e = eta(z);
        if !e.is_finite() {
            return Err(Error::Domain(format!("eta evaluator returned a non-finite value at {z}")));
        }
        report.record(e.norm() - z.norm(), z, ETA_TOL);
    }
    spot_check_analytic(&eta, &[Cx::new(0.3, 0.2), Cx::new(-0.4, 0.1), Cx::new(0.1, -0.5)])?;
    Ok(report)
}

/// η-transform argument check on ℂ₊: arg η(z) ∈ [arg z, π). By symmetry
/// (η(z̄) = conj η(z)) sampling the upper half-plane suffices.
pub fn validate_eta_halfline(eta: impl Fn(Cx) -> Cx) -> Result<ValidationReport> {
    let mut report = ValidationReport::clean();
    for z in upper_halfplane_samples(6.0, 40, 1e-3, 4.0, 12) {
        let e = eta(z);
        if !e.is_finite() {
            return Err(Error::Domain(format!("eta evaluator returned a non-finite value at {z}")));
        }
        let lower = z.arg() - e.arg();
        let upper = e.arg() - std::f64::consts::PI;
        report.record(lower.max(upper), z, ETA_TOL);
    }
    spot_check_analytic(&eta, &[Cx::new(0.5, 0.5), Cx::new(-2.0, 1.0), Cx::new(1.0, 3.0)])?;
    Ok(report)
}

/// Cauchy–Riemann spot check: for analytic f, ∂f/∂x = −i ∂f/∂y.
fn spot_check_analytic(f: &impl Fn(Cx) -> Cx, points: &[Cx]) -> Result<()> {
    let h = 1e-5;
    for &z in points {
        let dx = (f(z + h) - f(z - h)) / (2.0 * h);
        let dy = (f(z + Cx::new(0.0, h)) - f(z - Cx::new(0.0, h))) / (2.0 * h);
        let scale = 1.0 + dx.norm();
        if (dx - dy * Cx::new(0.0, -1.0)).norm() > 1e-4 * scale {
            return Err(Error::Domain(format!(
                "Cauchy-Riemann mismatch at {z}: evaluator does not look analytic"
            )));
        }
    }
    Ok(())
}

/// Pick-function check for a real-line F-evaluator: Im F(z) ≥ Im z on a
/// 200-point sample of ℂ₊.
pub fn validate_f_real(f: impl Fn(Cx) -> Result<Cx>, x_max: f64) -> Result<ValidationReport> {
    let mut report = ValidationReport::clean();
    for z in upper_halfplane_samples(x_max, 25, 1e-4, 8.0, 8) {
        let v = f(z)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("F evaluator returned a non-finite value at {z}")));
        }
        report.record(z.im - v.im, z, ETA_TOL);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_eta_passes_both_modes() {
        assert!(validate_eta_circle(|z| z).unwrap().ok);
        assert!(validate_eta_halfline(|z| z).unwrap().ok);
    }

    #[test]
    fn doubling_eta_fails_circle() {
        let r = validate_eta_circle(|z| 2.0 * z).unwrap();
        assert!(!r.ok);
        assert!(r.max_violation > 0.9);
    }

    #[test]
    fn conjugation_is_rejected_as_non_analytic() {
        assert!(validate_eta_circle(|z: Cx| 0.5 * z.conj()).is_err());
    }

    #[test]
    fn halfline_arg_violation_detected() {
        // η(z) = −z has arg η = arg z − π < arg z on ℂ₊.
        let r = validate_eta_halfline(|z| -z).unwrap();
        assert!(!r.ok);
    }
}
