use crate::{Cx, Error, Result};

/// Head (β₀, β₁; γ₀, γ₁) of a Jacobi-parameter sequence, enough to bound the
/// divisibility indicator for measures with four moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiHead {
    pub beta0: f64,
    pub beta1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
}

impl JacobiHead {
    pub fn new(beta0: f64, beta1: f64, gamma0: f64, gamma1: f64) -> Result<Self> {
        if gamma0 < 0.0 || gamma1 < 0.0 {
            return Err(Error::ParamDomain("jacobi gamma entries must be >= 0".into()));
        }
        // Degenerate variance forces the whole tail to vanish.
        let (beta1, gamma1) = if gamma0 == 0.0 { (beta0, 0.0) } else { (beta1, gamma1) };
        Ok(JacobiHead { beta0, beta1, gamma0, gamma1 })
    }

    /// Orthogonalize (1, x, x²) against the moment sequence.
    pub fn from_moments(m1: f64, m2: f64, m3: f64, m4: f64) -> Result<Self> {
        let beta0 = m1;
        let gamma0 = m2 - m1 * m1;
        if gamma0 < -1e-12 {
            return Err(Error::ParamDomain("moment sequence has negative variance".into()));
        }
        if gamma0 <= 1e-12 {
            return JacobiHead::new(beta0, beta0, 0.0, 0.0);
        }
        let beta1 = (m3 - 2.0 * m1 * m2 + m1 * m1 * m1) / gamma0;
        // P2 = x² - (β₀+β₁)x + (β₀β₁ - γ₀); γ₁ = ||P2||² / ||P1||².
        let c0 = beta0 * beta1 - gamma0;
        let c1 = -(beta0 + beta1);
        let norm2 = m4
            + 2.0 * c1 * m3
            + (c1 * c1 + 2.0 * c0) * m2
            + 2.0 * c0 * c1 * m1
            + c0 * c0;
        if norm2 < -1e-9 {
            return Err(Error::ParamDomain("moment sequence is not positive definite".into()));
        }
        JacobiHead::new(beta0, beta1, gamma0, (norm2 / gamma0).max(0.0))
    }

    pub fn moments(&self) -> (f64, f64, f64, f64) {
        let m = moments_from_jacobi(
            &[self.beta0, self.beta1, 0.0],
            &[self.gamma0, self.gamma1, 0.0],
            4,
        );
        (m[1], m[2], m[3], m[4])
    }
}

/// Cauchy transform from Jacobi parameters by backward recurrence on the
/// continued fraction, truncated with γ_depth = 0.
pub fn continued_fraction_g(beta: &[f64], gamma: &[f64], z: Cx, depth: usize) -> Result<Cx> {
    let bn = |i: usize| beta.get(i).copied().unwrap_or_else(|| beta.last().copied().unwrap_or(0.0));
    let gn = |i: usize| gamma.get(i).copied().unwrap_or_else(|| gamma.last().copied().unwrap_or(0.0));
    let mut tail = Cx::new(0.0, 0.0);
    for i in (0..=depth).rev() {
        let denom = z - bn(i) - tail;
        if denom.norm() < 1e-300 {
            return Err(Error::Domain(format!("continued fraction pole near z = {z}")));
        }
        if i == 0 {
            return Ok(1.0 / denom);
        }
        tail = gn(i - 1) / denom;
    }
    unreachable!()
}

/// Moments from Jacobi parameters via the three-term recursion for the
/// coordinates of x^k e₀ in the orthonormal-like basis:
/// (x v)_m = v_{m-1} + β_m v_m + γ_m v_{m+1}.
pub fn moments_from_jacobi(beta: &[f64], gamma: &[f64], k_max: usize) -> Vec<f64> {
    let bn = |i: usize| beta.get(i).copied().unwrap_or_else(|| beta.last().copied().unwrap_or(0.0));
    let gn = |i: usize| gamma.get(i).copied().unwrap_or_else(|| gamma.last().copied().unwrap_or(0.0));
    let mut v = vec![0.0; k_max + 2];
    v[0] = 1.0;
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    for _ in 1..=k_max {
        let mut next = vec![0.0; k_max + 2];
        for m in 0..=k_max {
            let mut acc = bn(m) * v[m];
            if m > 0 {
                acc += v[m - 1];
            }
            acc += gn(m) * v[m + 1];
            next[m] = acc;
        }
        v = next;
        out.push(v[0]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_moments_are_catalan() {
        let m = moments_from_jacobi(&[0.0], &[1.0], 8);
        assert_eq!(m[0], 1.0);
        assert_eq!(m[2], 1.0);
        assert_eq!(m[4], 2.0);
        assert_eq!(m[6], 5.0);
        assert_eq!(m[8], 14.0);
        assert_eq!(m[1], 0.0);
        assert_eq!(m[3], 0.0);
    }

    #[test]
    fn q_gaussian_head_ratio() {
        // m = (0, 1, 0, 2+q) has γ₁/γ₀ = 1 + q.
        for q in [-0.5, 0.0, 0.5] {
            let h = JacobiHead::from_moments(0.0, 1.0, 0.0, 2.0 + q).unwrap();
            assert!((h.gamma0 - 1.0).abs() < 1e-12);
            assert!((h.gamma1 - (1.0 + q)).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_head_degenerates() {
        let a = 1.7;
        let h = JacobiHead::from_moments(a, a * a, a * a * a, a * a * a * a).unwrap();
        assert_eq!(h.gamma0, 0.0);
        assert_eq!(h.gamma1, 0.0);
        assert!((h.beta0 - a).abs() < 1e-12);
    }

    #[test]
    fn arcsine_head() {
        let h = JacobiHead::from_moments(0.0, 2.0, 0.0, 6.0).unwrap();
        assert!((h.beta0).abs() < 1e-12);
        assert!((h.gamma0 - 2.0).abs() < 1e-12);
        assert!((h.beta1).abs() < 1e-12);
        assert!((h.gamma1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn head_moment_roundtrip() {
        let h = JacobiHead::new(0.3, -0.2, 1.5, 0.8).unwrap();
        let (m1, m2, m3, m4) = h.moments();
        let back = JacobiHead::from_moments(m1, m2, m3, m4).unwrap();
        assert!((back.beta0 - h.beta0).abs() < 1e-10);
        assert!((back.beta1 - h.beta1).abs() < 1e-10);
        assert!((back.gamma0 - h.gamma0).abs() < 1e-10);
        assert!((back.gamma1 - h.gamma1).abs() < 1e-10);
    }

    #[test]
    fn cf_point_mass() {
        let g = continued_fraction_g(&[1.0], &[0.0], Cx::new(0.0, 1.0), 0).unwrap();
        let expect = 1.0 / Cx::new(-1.0, 1.0);
        assert!((g - expect).norm() < 1e-14);
    }

    #[test]
    fn cf_bernoulli() {
        // J = (0; 1, 0): G(z) = z/(z² − 1); at z = i this is −i/2.
        let z = Cx::new(0.0, 1.0);
        let g = continued_fraction_g(&[0.0, 0.0], &[1.0, 0.0], z, 1).unwrap();
        assert!((g - Cx::new(0.0, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn cf_semicircle_matches_closed_form() {
        let z = Cx::new(0.0, 2.0);
        let g = continued_fraction_g(&[0.0], &[1.0], z, 200).unwrap();
        let closed = (z - (z * z - 4.0).sqrt()) / 2.0;
        assert!((g - closed).norm() < 1e-10);
        let g2 = continued_fraction_g(&[0.0], &[1.0], z, 250).unwrap();
        assert!((g - g2).norm() < 1e-8);
    }
}
