use std::collections::BTreeMap;

use serde::Deserialize;

use crate::measure::circle::CircleMeasure;
use crate::measure::halfline::HalfLineMeasure;
use crate::measure::real::RealLineMeasure;
use crate::measure::zoo::{make_zoo_measure, AnyMeasure};
use crate::measure::{
    from_levy_additive_boolean, from_levy_additive_free, from_levy_mult_circle,
    from_levy_mult_halfline, CircleTau, LevyDataMultCircle, LevyDataMultHalfline,
    LevyTripletAdditive, TauMeasure,
};
use crate::{Cx, Error, Result};

/// On-disk measure description. Unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureSpec {
    space: String,
    kind: String,
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    params: Option<BTreeMap<String, f64>>,
    /// Atom pairs [location, weight]; circle locations are angles in radians.
    #[serde(default)]
    atoms: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    beta: Option<Vec<f64>>,
    #[serde(default)]
    gamma: Option<Vec<f64>>,
}

pub fn parse_measure_json(text: &str) -> Result<AnyMeasure> {
    let spec: MeasureSpec =
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("bad measure spec: {e}")))?;
    build(spec)
}

fn build(spec: MeasureSpec) -> Result<AnyMeasure> {
    let params = spec.params.clone().unwrap_or_default();
    let get = |key: &str| -> Result<f64> {
        params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Spec(format!("kind `{}` needs params.{key}", spec.kind)))
    };
    match (spec.space.as_str(), spec.kind.as_str()) {
        (_, "closed_form") => {
            let family = spec
                .family
                .as_deref()
                .ok_or_else(|| Error::Spec("closed_form needs a family".into()))?;
            let m = make_zoo_measure(family, &params)?;
            if m.space() != spec.space {
                return Err(Error::Spec(format!(
                    "family `{family}` lives on {}, spec says {}",
                    m.space(),
                    spec.space
                )));
            }
            Ok(m)
        }
        ("real", "atoms") => {
            Ok(AnyMeasure::Real(RealLineMeasure::from_atoms(atom_pairs(&spec)?)?))
        }
        ("circle", "atoms") => {
            let atoms = atom_pairs(&spec)?
                .into_iter()
                .map(|(angle, w)| (Cx::from_polar(1.0, angle), w))
                .collect();
            Ok(AnyMeasure::Circle(CircleMeasure::from_atoms(atoms)?))
        }
        ("halfline", "atoms") => {
            Ok(AnyMeasure::Half(HalfLineMeasure::from_atoms(atom_pairs(&spec)?)?))
        }
        ("real", "jacobi") => {
            let beta = spec.beta.clone().ok_or_else(|| Error::Spec("jacobi needs beta".into()))?;
            let gamma = spec.gamma.clone().ok_or_else(|| Error::Spec("jacobi needs gamma".into()))?;
            let depth = params.get("depth").copied().unwrap_or(200.0) as usize;
            Ok(AnyMeasure::Real(RealLineMeasure::from_jacobi(beta, gamma, depth)?))
        }
        ("real", "levy_free") => Ok(AnyMeasure::Real(from_levy_additive_free(
            LevyTripletAdditive { gamma: get("gamma")?, tau: tau_from_spec(&spec)? },
        ))),
        ("real", "levy_boolean") => Ok(AnyMeasure::Real(from_levy_additive_boolean(
            LevyTripletAdditive { gamma: get("gamma")?, tau: tau_from_spec(&spec)? },
        ))),
        ("circle", "levy_mult") => {
            let tau = CircleTau::new(
                spec.atoms.clone().unwrap_or_default().into_iter().map(|[a, w]| (a, w)).collect(),
                params.get("uniform").copied().unwrap_or(0.0),
            )?;
            let gamma = Cx::from_polar(1.0, get("gamma_arg")?);
            Ok(AnyMeasure::Circle(from_levy_mult_circle(LevyDataMultCircle { gamma, tau })?))
        }
        ("halfline", "levy_mult") => Ok(AnyMeasure::Half(from_levy_mult_halfline(
            LevyDataMultHalfline { a: get("a")?, b: get("b")?, tau: tau_from_spec(&spec)? },
        )?)),
        (space, kind) => Err(Error::Spec(format!(
            "unsupported space/kind combination `{space}`/`{kind}`"
        ))),
    }
}

fn atom_pairs(spec: &MeasureSpec) -> Result<Vec<(f64, f64)>> {
    spec.atoms
        .clone()
        .ok_or_else(|| Error::Spec("kind `atoms` needs an atom list".into()))
        .map(|v| v.into_iter().map(|[x, w]| (x, w)).collect())
}

fn tau_from_spec(spec: &MeasureSpec) -> Result<TauMeasure> {
    TauMeasure::from_atoms(
        spec.atoms.clone().unwrap_or_default().into_iter().map(|[x, w]| (x, w)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_closed_form() {
        let m = parse_measure_json(
            r#"{"space":"real","kind":"closed_form","family":"cauchy","params":{"a":0,"b":1}}"#,
        )
        .unwrap();
        assert_eq!(m.space(), "real");
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = parse_measure_json(
            r#"{"space":"real","kind":"atoms","atoms":[[0,1]],"extra":1}"#,
        );
        assert!(matches!(err, Err(Error::Spec(_))));
    }

    #[test]
    fn rejects_space_mismatch() {
        let err = parse_measure_json(
            r#"{"space":"circle","kind":"closed_form","family":"cauchy","params":{"a":0,"b":1}}"#,
        );
        assert!(matches!(err, Err(Error::Spec(_))));
    }

    #[test]
    fn parses_levy_boolean_bernoulli() {
        // (γ=0, τ=δ₀): K(z) = 1/z, the symmetric Bernoulli law.
        let m = parse_measure_json(
            r#"{"space":"real","kind":"levy_boolean","params":{"gamma":0},"atoms":[[0,1]]}"#,
        )
        .unwrap();
        assert_eq!(m.space(), "real");
    }

    #[test]
    fn parses_circle_atoms_by_angle() {
        let m = parse_measure_json(
            r#"{"space":"circle","kind":"atoms","atoms":[[0,0.5],[1.5707963267948966,0.5]]}"#,
        )
        .unwrap();
        let c = m.as_circle().unwrap();
        let (m1, _) = crate::measure::first_moment_circle(c).unwrap();
        assert!((m1 - Cx::new(0.5, 0.5)).norm() < 1e-12);
    }
}
