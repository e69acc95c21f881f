use std::collections::BTreeMap;

use crate::measure::circle::CircleMeasure;
use crate::measure::halfline::HalfLineMeasure;
use crate::measure::real::{RealFamily, RealLineMeasure};
use crate::{Cx, Error, Result};

/// A measure living on any of the three supported spaces.
#[derive(Debug, Clone)]
pub enum AnyMeasure {
    Real(RealLineMeasure),
    Circle(CircleMeasure),
    Half(HalfLineMeasure),
}

impl AnyMeasure {
    pub fn space(&self) -> &'static str {
        match self {
            AnyMeasure::Real(_) => "real",
            AnyMeasure::Circle(_) => "circle",
            AnyMeasure::Half(_) => "halfline",
        }
    }

    pub fn as_real(&self) -> Result<&RealLineMeasure> {
        match self {
            AnyMeasure::Real(m) => Ok(m),
            _ => Err(Error::Incompatible(format!("expected a real-line measure, got {}", self.space()))),
        }
    }

    pub fn as_circle(&self) -> Result<&CircleMeasure> {
        match self {
            AnyMeasure::Circle(m) => Ok(m),
            _ => Err(Error::Incompatible(format!("expected a circle measure, got {}", self.space()))),
        }
    }

    pub fn as_half(&self) -> Result<&HalfLineMeasure> {
        match self {
            AnyMeasure::Half(m) => Ok(m),
            _ => Err(Error::Incompatible(format!("expected a half-line measure, got {}", self.space()))),
        }
    }
}

pub fn semicircle(mean: f64, var: f64) -> Result<RealLineMeasure> {
    if var < 0.0 {
        return Err(Error::ParamDomain("semicircle variance must be >= 0".into()));
    }
    Ok(RealLineMeasure::closed_form(RealFamily::FreeMeixner {
        beta0: mean,
        gamma0: var,
        beta1: mean,
        gamma1: var,
    }))
}

/// Symmetric Bernoulli ½(δ₋₁ + δ₁).
pub fn bernoulli() -> RealLineMeasure {
    RealLineMeasure::from_atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

/// Kesten–McKay law with parameter t > 0: Jacobi parameters
/// (0, 0, 0, …; 1, t, t, …), density √(4t − x²) / (2π(1 − (1−t)x²)).
pub fn kesten_mckay(t: f64) -> Result<RealLineMeasure> {
    if t <= 0.0 {
        return Err(Error::ParamDomain("Kesten-McKay parameter must be > 0".into()));
    }
    Ok(RealLineMeasure::closed_form(RealFamily::FreeMeixner {
        beta0: 0.0,
        gamma0: 1.0,
        beta1: 0.0,
        gamma1: t,
    }))
}

pub fn arcsine() -> RealLineMeasure {
    RealLineMeasure::closed_form(RealFamily::FreeMeixner {
        beta0: 0.0,
        gamma0: 2.0,
        beta1: 0.0,
        gamma1: 1.0,
    })
}

/// Boolean ½-stable law with F(z) = z + b√z, b = scale · e^{iθ/2},
/// θ ∈ [0, π].
pub fn boolean_half_stable(theta: f64, scale: f64) -> Result<RealLineMeasure> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) || scale <= 0.0 {
        return Err(Error::ParamDomain("need theta in [0, pi] and scale > 0".into()));
    }
    let b = Cx::from_polar(scale, theta / 2.0);
    Ok(RealLineMeasure::closed_form(RealFamily::BooleanHalfStable { b }))
}

pub fn free_meixner(beta0: f64, gamma0: f64, beta1: f64, gamma1: f64) -> Result<RealLineMeasure> {
    if gamma0 < 0.0 || gamma1 < 0.0 {
        return Err(Error::ParamDomain("free Meixner gamma entries must be >= 0".into()));
    }
    Ok(RealLineMeasure::closed_form(RealFamily::FreeMeixner { beta0, gamma0, beta1, gamma1 }))
}

/// Family catalogue for the CLI: name → (space, parameter schema).
pub fn family_catalogue() -> BTreeMap<&'static str, (&'static str, &'static str)> {
    BTreeMap::from([
        ("point", ("real", "a: location")),
        ("cauchy", ("real", "a: center, b: scale > 0")),
        ("semicircle", ("real", "mean, var >= 0")),
        ("bernoulli", ("real", "none (symmetric, atoms at ±1)")),
        ("arcsine", ("real", "none (support [-2, 2])")),
        ("kesten_mckay", ("real", "t > 0")),
        ("free_meixner", ("real", "beta0, gamma0 >= 0, beta1, gamma1 >= 0")),
        ("boolean_half_stable", ("real", "theta in [0, pi] (arg b^2), scale > 0 (default 1)")),
        ("point_circle", ("circle", "angle (radians)")),
        ("haar", ("circle", "none")),
        ("poisson_kernel", ("circle", "a >= 0, b: real")),
        ("point_halfline", ("halfline", "a >= 0")),
        ("free_poisson", ("halfline", "lambda > 0")),
    ])
}

pub fn make_zoo_measure(family: &str, params: &BTreeMap<String, f64>) -> Result<AnyMeasure> {
    let get = |key: &str| -> Result<f64> {
        params
            .get(key)
            .copied()
            .ok_or_else(|| Error::ParamDomain(format!("family `{family}` needs parameter `{key}`")))
    };
    let opt = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
    Ok(match family {
        "point" => AnyMeasure::Real(RealLineMeasure::point(get("a")?)),
        "cauchy" => {
            let b = get("b")?;
            if b <= 0.0 {
                return Err(Error::ParamDomain("Cauchy scale must be > 0".into()));
            }
            AnyMeasure::Real(RealLineMeasure::closed_form(RealFamily::Cauchy { a: get("a")?, b }))
        }
        "semicircle" => AnyMeasure::Real(semicircle(opt("mean", 0.0), opt("var", 1.0))?),
        "bernoulli" => AnyMeasure::Real(bernoulli()),
        "arcsine" => AnyMeasure::Real(arcsine()),
        "kesten_mckay" => AnyMeasure::Real(kesten_mckay(get("t")?)?),
        "free_meixner" => AnyMeasure::Real(free_meixner(
            get("beta0")?,
            get("gamma0")?,
            get("beta1")?,
            get("gamma1")?,
        )?),
        "boolean_half_stable" => {
            AnyMeasure::Real(boolean_half_stable(get("theta")?, opt("scale", 1.0))?)
        }
        "point_circle" => {
            AnyMeasure::Circle(CircleMeasure::point(Cx::from_polar(1.0, get("angle")?))?)
        }
        "haar" => AnyMeasure::Circle(CircleMeasure::haar()),
        "poisson_kernel" => AnyMeasure::Circle(CircleMeasure::poisson_kernel(get("a")?, get("b")?)?),
        "point_halfline" => AnyMeasure::Half(HalfLineMeasure::point(get("a")?)?),
        "free_poisson" => AnyMeasure::Half(HalfLineMeasure::free_poisson(get("lambda")?)?),
        other => return Err(Error::UnknownFamily(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zoo_cauchy_f() {
        let params = BTreeMap::from([("a".to_string(), 0.0), ("b".to_string(), 1.0)]);
        let m = make_zoo_measure("cauchy", &params).unwrap();
        let m = m.as_real().unwrap();
        if let crate::measure::real::RealRep::ClosedForm(f) = &m.rep {
            let v = f.f(Cx::new(0.0, 1.0));
            assert!((v - Cx::new(0.0, 2.0)).norm() < 1e-15);
        } else {
            panic!("expected closed form");
        }
    }

    #[test]
    fn zoo_rejects_unknown_family() {
        assert!(matches!(
            make_zoo_measure("gaussian", &BTreeMap::new()),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn zoo_rejects_out_of_domain() {
        let params = BTreeMap::from([("t".to_string(), -1.0)]);
        assert!(make_zoo_measure("kesten_mckay", &params).is_err());
        let params = BTreeMap::from([("a".to_string(), 0.0), ("b".to_string(), -1.0)]);
        assert!(make_zoo_measure("cauchy", &params).is_err());
    }

    #[test]
    fn kesten_mckay_at_one_is_semicircle() {
        // KM(1) has Jacobi parameters (0; 1, 1, 1, ...), the standard
        // semicircle on [-2, 2].
        let km = kesten_mckay(1.0).unwrap();
        let sc = semicircle(0.0, 1.0).unwrap();
        assert!((km.moment(4).unwrap() - sc.moment(4).unwrap()).abs() < 1e-14);
        assert!((km.moment(6).unwrap() - sc.moment(6).unwrap()).abs() < 1e-14);
    }
}
