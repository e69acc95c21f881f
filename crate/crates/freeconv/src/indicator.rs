//! Free infinite divisibility testing and indicator estimation.
//!
//! A measure is freely infinitely divisible iff its Voiculescu transform φ
//! extends analytically to ℂ₊ with Im φ ≤ 0. Representations carrying a
//! closed-form φ have the extension by construction, so a boundary scan of
//! Im φ decides. For inversion-backed φ the extension itself is in
//! question: φ is continued column-by-column downward from a large-height
//! anchor where Newton from the trivial seed is reliable, and the resulting
//! field is checked for horizontal discontinuities (a jump between adjacent
//! columns witnesses a branch point of F⁻¹ inside ℂ₊, which rules out
//! divisibility even when the principal branch keeps Im φ ≤ 0 everywhere).

use rayon::prelude::*;

use crate::additive::{boolean_power, bt_map};
use crate::grid::GridSpec;
use crate::measure::{JacobiHead, RealLineMeasure, RealRep};
use crate::transform::newton_invert;
use crate::{Cx, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidVerdict {
    Divisible,
    NotDivisible,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct FidReport {
    pub verdict: FidVerdict,
    /// Largest Im φ seen (only meaningful where continuation succeeded).
    pub max_im: f64,
    pub argmax: Cx,
    /// Fraction of grid points where inversion failed.
    pub failure_fraction: f64,
    /// Largest relative continuation jump between adjacent columns.
    pub max_jump: f64,
}

/// Boundary tolerance: 1e−6 scaled by the typical transform magnitude.
fn fid_tol(scale: f64) -> f64 {
    1e-6 * (1.0 + scale)
}

pub fn is_fid_real(mu: &RealLineMeasure, grid: &GridSpec) -> Result<FidReport> {
    if mu.phi_direct(Cx::new(0.0, 1.0)).is_some() {
        boundary_scan_direct(mu, grid)
    } else {
        continuation_scan(mu, grid)
    }
}

/// Direct-φ path: the extension exists by construction, so only the sign of
/// Im φ near the boundary matters.
fn boundary_scan_direct(mu: &RealLineMeasure, grid: &GridSpec) -> Result<FidReport> {
    let mut pts = grid.boundary_points();
    // Also sample higher lines: Im φ is harmonic, but cheap insurance
    // against boundary maxima hiding between grid nodes.
    for y in [0.5, 2.0, 8.0] {
        for x in grid.points().iter().step_by(8) {
            pts.push(Cx::new(*x, y));
        }
    }
    let mut max_im = f64::NEG_INFINITY;
    let mut argmax = pts[0];
    let mut scale: f64 = 0.0;
    for z in pts {
        let v = mu.phi_direct(z).expect("direct phi");
        scale = scale.max(v.norm());
        if v.im > max_im {
            max_im = v.im;
            argmax = z;
        }
    }
    let verdict = if max_im <= fid_tol(scale) {
        FidVerdict::Divisible
    } else {
        FidVerdict::NotDivisible
    };
    Ok(FidReport { verdict, max_im, argmax, failure_fraction: 0.0, max_jump: 0.0 })
}

/// Grid height levels: geometric from the anchor height down to ε.
fn height_levels(y_top: f64, eps: f64, ny: usize) -> Vec<f64> {
    let ratio = (y_top / eps).powf(1.0 / (ny - 1) as f64);
    (0..ny).map(|r| y_top / ratio.powi(r as i32)).collect()
}

/// One column of the φ field: Newton continuation of w = F⁻¹(z) downward
/// from the anchor. `None` marks inversion failure (the rest of the column
/// is abandoned to avoid re-anchoring on a wrong sheet). The flag reports
/// whether the abandonment was benign: when w was hugging the real axis at
/// the last success, the continuation was about to dive through the support,
/// where F⁻¹ simply stops being the inverse — expected even for divisible
/// measures, so such cells should not count against the scan.
fn continue_column(mu: &RealLineMeasure, x: f64, heights: &[f64]) -> (Vec<Option<Cx>>, bool) {
    let fwd = |w: Cx| mu.f(w);
    let dive_band = 0.05 * (1.0 + mu.support_hint);
    let mut out = Vec::with_capacity(heights.len());
    let mut seed = Cx::new(x, heights[0]);
    for &y in heights {
        let z = Cx::new(x, y);
        // No half-plane guard: the continuation of F⁻¹ legitimately leaves
        // ℂ₊ (it re-enters ℂ₋ through spectral gaps, where the reflected
        // evaluator is the correct analytic continuation).
        match newton_invert(&fwd, z, seed, |w| w.is_finite()) {
            Ok(sol) => {
                seed = sol.value;
                out.push(Some(sol.value - z));
            }
            Err(_) => {
                let benign = seed.im.abs() < dive_band;
                out.push(None);
                while out.len() < heights.len() {
                    out.push(None);
                }
                return (out, benign);
            }
        }
    }
    (out, true)
}

/// Direct search for a branch point of F⁻¹ in ℂ₊: a critical point w₀ of F
/// with Im w₀ ≥ 0 whose critical value z₀ = F(w₀) lies strictly inside ℂ₊.
/// Near z₀ the inverse branches like a square root, so φ cannot extend
/// through it. This catches obstructions sitting just above the region
/// where inverse-based continuation is valid — too low for the grid scan
/// to bracket between live rows.
fn branch_point_in_upper(mu: &RealLineMeasure, x_lo: f64, x_hi: f64, y_top: f64) -> Option<Cx> {
    let scale = 1.0 + mu.support_hint;
    let z_tol = 1e-3 * scale;
    let x_bound = x_hi.abs().max(x_lo.abs()) + 1.0;
    let nx = 121;
    let ny = 60;
    let y_lo: f64 = 1e-4 * scale;
    let ratio = (y_top / y_lo).powf(1.0 / (ny - 1) as f64);

    let mut hits: Vec<Cx> = Vec::new();
    let mut sweep = |f: &dyn Fn(Cx) -> Option<Cx>, both_halves: bool| {
        let f = |w: Cx| f(w).filter(|v| v.is_finite());
        let df = |w: Cx| {
            let h = 1e-5 * (1.0 + w.norm());
            Some((f(w + h)? - f(w - h)?) / (2.0 * h))
        };
        for i in 0..nx {
            let x = x_lo + (x_hi - x_lo) * i as f64 / (nx - 1) as f64;
            for r in 0..ny {
                let y = y_lo * ratio.powi(r);
                let signs: &[f64] = if both_halves { &[1.0, -1.0] } else { &[1.0] };
                for &sgn in signs {
                    let w = Cx::new(x, sgn * y);
                    match df(w) {
                        Some(d) if d.norm() <= 0.6 => {}
                        _ => continue,
                    }
                    // Polish F'(w) = 0 with Newton on the numerical
                    // derivative.
                    let mut w0 = w;
                    let mut ok = false;
                    for _ in 0..60 {
                        let d = match df(w0) {
                            Some(d) => d,
                            None => break,
                        };
                        if d.norm() < 1e-9 {
                            ok = true;
                            break;
                        }
                        let h = 1e-5 * (1.0 + w0.norm());
                        let dd = match (df(w0 + h), df(w0 - h)) {
                            (Some(a), Some(b)) => (a - b) / (2.0 * h),
                            _ => break,
                        };
                        if dd.norm() < 1e-12 {
                            break;
                        }
                        let step = d / dd;
                        if !step.is_finite() || step.norm() > 2.0 * scale {
                            break;
                        }
                        w0 -= step;
                    }
                    if !ok {
                        continue;
                    }
                    if !both_halves && w0.im < -1e-6 * scale {
                        continue;
                    }
                    // A critical point on the axis is two-sided: the cut
                    // makes the critical value jump across it, so probe
                    // both approaches.
                    let mut evals = vec![w0];
                    if w0.im.abs() < 1e-9 * scale {
                        evals = vec![Cx::new(w0.re, 1e-9 * scale), Cx::new(w0.re, -1e-9 * scale)];
                    }
                    for we in evals {
                        if let Some(z0) = f(we) {
                            if z0.im > z_tol && z0.re.abs() <= x_bound {
                                hits.push(z0);
                            }
                        }
                    }
                }
            }
        }
    };

    // Principal sheet: critical points in the closed upper half-plane.
    sweep(&|w| mu.f(w).ok(), false);
    // Second sheet through the support cut, where available; its critical
    // points sit below the axis but their values are reachable by
    // continuing φ across the image of the support.
    if mu.f_cut(Cx::new(0.0, 1.0)).is_some() {
        sweep(&|w| mu.f_cut(w), true);
    }

    hits.into_iter().max_by(|a, b| a.im.total_cmp(&b.im))
}

fn continuation_scan(mu: &RealLineMeasure, grid: &GridSpec) -> Result<FidReport> {
    // Expensive transform-backed representations get a coarser field.
    let cheap = !matches!(mu.rep, RealRep::Transform(_));
    let nx = if cheap { 321 } else { 161 };
    let ny = if cheap { 48 } else { 32 };
    let y_top = 8.0 * (1.0 + mu.support_hint);
    let heights = height_levels(y_top, grid.epsilon, ny);
    let xs: Vec<f64> = {
        let step = (grid.x_max - grid.x_min) / (nx - 1) as f64;
        (0..nx).map(|i| grid.x_min + step * i as f64).collect()
    };
    let cols: Vec<(Vec<Option<Cx>>, bool)> = xs
        .par_iter()
        .map(|&x| continue_column(mu, x, &heights))
        .collect();
    let field: Vec<&Vec<Option<Cx>>> = cols.iter().map(|(c, _)| c).collect();

    // Only non-benign abandonments count: a column diving through the
    // support is the expected end of the inverse's validity, not a defect.
    let total = nx * ny;
    let failures: usize = cols
        .iter()
        .filter(|&&(_, benign)| !benign)
        .map(|(c, _)| c.iter().filter(|v| v.is_none()).count())
        .sum();
    let failure_fraction = failures as f64 / total as f64;

    let mut max_im = f64::NEG_INFINITY;
    let mut argmax = Cx::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for (j, col) in field.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            if let Some(phi) = v {
                scale = scale.max(phi.norm());
                if phi.im > max_im {
                    max_im = phi.im;
                    argmax = Cx::new(xs[j], heights[r]);
                }
            }
        }
    }

    // Monodromy (loop-consistency) test. Vertical continuation alone cannot
    // see a branch point of F⁻¹: both neighbouring columns may settle on the
    // principal branch, whose cut hides between them. So each row is also
    // continued horizontally from its left end; a persistent disagreement
    // with the vertical field means continuation along the two paths (down
    // the left edge then across, versus straight down) encircled a branch
    // point — φ does not extend, and μ is not divisible.
    let fwd = |w: Cx| mu.f(w);
    // Careful continuation of φ along a horizontal segment in substeps;
    // `None` only after every substep seed failed.
    let cross = |from_phi: Cx, z_from: Cx, z_to: Cx| -> Option<Cx> {
        let mut w = from_phi + z_from;
        for s in 1..=8 {
            let zt = z_from + (z_to - z_from) * (s as f64 / 8.0);
            w = newton_invert(&fwd, zt, w, |v| v.is_finite()).ok()?.value;
        }
        Some(w - z_to)
    };
    let rows: Vec<(f64, bool, bool)> = (0..ny)
        .into_par_iter()
        .map(|r| {
            let mut row_max: f64 = 0.0;
            let mut mismatch_run = 0usize;
            let mut row_jump = false;
            let mut crossfail = false;
            // Last trusted row value and its position.
            let mut current: Option<(Cx, usize)> = None;
            for j in 0..nx {
                let col_val = field[j][r];
                let z = Cx::new(xs[j], heights[r]);
                let (prev, jprev) = match current {
                    None => {
                        // Anchor on the vertical field.
                        if let Some(cv) = col_val {
                            current = Some((cv, j));
                        }
                        continue;
                    }
                    Some(p) => p,
                };
                let z_prev = Cx::new(xs[jprev], heights[r]);
                let row_val = match newton_invert(&fwd, z, prev + z, |w| w.is_finite()) {
                    Ok(sol) => Some(sol.value - z),
                    Err(_) => cross(prev, z_prev, z),
                };
                match (row_val, col_val) {
                    (Some(rv), Some(cv)) => {
                        let rel = (rv - cv).norm() / (1.0 + rv.norm() + cv.norm());
                        if rel > 1e-5 {
                            // Rule out a Newton hop before believing the
                            // mismatch: redo the whole step in substeps.
                            match cross(prev, z_prev, z) {
                                Some(rw) => {
                                    let rel2 = (rw - cv).norm() / (1.0 + rw.norm() + cv.norm());
                                    row_max = row_max.max(rel2);
                                    if rel2 > 1e-5 {
                                        mismatch_run += 1;
                                        if mismatch_run >= 2 {
                                            row_jump = true;
                                        }
                                        current = Some((rw, j));
                                    } else {
                                        mismatch_run = 0;
                                        current = Some((cv, j));
                                    }
                                }
                                None => {
                                    mismatch_run = 0;
                                    current = Some((cv, j));
                                }
                            }
                        } else {
                            row_max = row_max.max(rel);
                            mismatch_run = 0;
                            current = Some((rv, j));
                        }
                    }
                    (None, Some(cv)) => {
                        // The segment could not be continued forward. If it
                        // cannot be continued backward either (or comes back
                        // on a different sheet), the values straddle a cut
                        // that blocks analytic continuation.
                        let benign = cross(cv, z, z_prev)
                            .map(|back| {
                                (back - prev).norm() / (1.0 + back.norm() + prev.norm()) <= 1e-5
                            })
                            .unwrap_or(false);
                        if !benign {
                            crossfail = true;
                        }
                        mismatch_run = 0;
                        current = Some((cv, j));
                    }
                    (Some(rv), None) => {
                        mismatch_run = 0;
                        current = Some((rv, j));
                    }
                    (None, None) => {
                        mismatch_run = 0;
                        current = None;
                    }
                }
            }
            (row_max, row_jump, crossfail)
        })
        .collect();
    let max_jump = rows.iter().map(|&(m, _, _)| m).fold(0.0f64, f64::max);
    let crossfail_rows = rows.iter().filter(|&&(_, _, c)| c).count();
    let jump = rows.iter().any(|&(_, j, _)| j) || crossfail_rows >= 2;

    let branch = branch_point_in_upper(mu, grid.x_min, grid.x_max, y_top);

    let verdict = if jump || branch.is_some() || max_im > fid_tol(scale) {
        FidVerdict::NotDivisible
    } else if failure_fraction > 0.01 {
        FidVerdict::Inconclusive
    } else {
        FidVerdict::Divisible
    };
    // A located branch point is the most informative witness to report.
    let argmax = branch.unwrap_or(argmax);
    Ok(FidReport { verdict, max_im, argmax, failure_fraction, max_jump })
}

/// Bracketing estimate of a divisibility indicator, with the probe history.
#[derive(Debug, Clone)]
pub struct IndicatorEstimate {
    pub lower: f64,
    /// `None` encodes +∞ (still divisible at t_max).
    pub upper: Option<f64>,
    pub probes: Vec<(f64, f64)>,
    pub method: String,
    pub inconclusive_probes: usize,
}

impl IndicatorEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "probes": self.probes,
            "inconclusive_probes": self.inconclusive_probes,
        })
    }

    pub fn brackets(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && self.upper.map_or(true, |u| value <= u + slack)
    }

    pub fn width(&self) -> Option<f64> {
        self.upper.map(|u| u - self.lower)
    }
}

/// φ(μ) = sup{t ≥ 0 : μ^{⊎t} is freely infinitely divisible}. The set of
/// divisible Boolean powers is the interval [0, φ(μ)], so the indicator is
/// found by bisection on the divisibility predicate.
pub fn phi_indicator(mu: &RealLineMeasure, t_max: f64, tol_t: f64) -> Result<IndicatorEstimate> {
    let probe_grid = GridSpec::for_support_radius(mu.support_hint, 801, 1e-6);
    let mut probes = Vec::new();
    let mut inconclusive = 0usize;
    let mut test = |t: f64| -> Result<Option<bool>> {
        let power = boolean_power(mu, t)?;
        let grid = GridSpec::for_support_radius(power.support_hint, probe_grid.count, probe_grid.epsilon);
        let report = is_fid_real(&power, &grid)?;
        probes.push((t, report.max_im.max(report.max_jump - 1.0)));
        Ok(match report.verdict {
            FidVerdict::Divisible => Some(true),
            FidVerdict::NotDivisible => Some(false),
            FidVerdict::Inconclusive => {
                inconclusive += 1;
                None
            }
        })
    };

    // Geometric sweep to find a bracket.
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
                // Inconclusive points shrink from above so the reported
                // bracket stays valid (never tightened past an unknown).
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
        method: "boolean-bisection".to_string(),
        inconclusive_probes: inconclusive,
    })
}

/// γ₁/γ₀ bounds the indicator from above; +∞ for degenerate variance.
pub fn jacobi_upper_bound(head: &JacobiHead) -> f64 {
    if head.gamma0 == 0.0 {
        f64::INFINITY
    } else {
        head.gamma1 / head.gamma0
    }
}

/// Indicator shift along the semigroup: φ(𝔹_t μ) = φ(μ) + t. Exposed as a
/// convenience for the identity suite.
pub fn phi_indicator_after_bt(mu: &RealLineMeasure, t: f64, t_max: f64, tol_t: f64) -> Result<IndicatorEstimate> {
    phi_indicator(&bt_map(mu, t)?, t_max, tol_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::zoo::{arcsine, bernoulli, boolean_half_stable, kesten_mckay, semicircle};
    use crate::measure::RealFamily;

    fn default_grid(mu: &RealLineMeasure) -> GridSpec {
        GridSpec::for_support_radius(mu.support_hint, 801, 1e-6)
    }

    #[test]
    fn semicircle_is_divisible() {
        let mu = semicircle(0.0, 1.0).unwrap();
        let r = is_fid_real(&mu, &default_grid(&mu)).unwrap();
        assert_eq!(r.verdict, FidVerdict::Divisible);
    }

    #[test]
    fn cauchy_and_half_stable_are_divisible() {
        let c = RealLineMeasure::closed_form(RealFamily::Cauchy { a: 0.0, b: 1.0 });
        assert_eq!(is_fid_real(&c, &default_grid(&c)).unwrap().verdict, FidVerdict::Divisible);
        let h = boolean_half_stable(std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let r = is_fid_real(&h, &default_grid(&h)).unwrap();
        assert_eq!(r.verdict, FidVerdict::Divisible);
        // The boundary maximum of Im φ sits at the origin.
        assert!(r.argmax.re.abs() < 0.2, "argmax at {}", r.argmax);
        assert!(r.max_im <= 1e-6);
    }

    #[test]
    fn bernoulli_is_not_divisible() {
        let b = bernoulli();
        let r = is_fid_real(&b, &default_grid(&b)).unwrap();
        assert_eq!(r.verdict, FidVerdict::NotDivisible, "report: {r:?}");
    }

    #[test]
    fn arcsine_is_not_divisible() {
        let a = arcsine();
        let r = is_fid_real(&a, &default_grid(&a)).unwrap();
        assert_eq!(r.verdict, FidVerdict::NotDivisible, "report: {r:?}");
    }

    #[test]
    fn kesten_mckay_powers_flip_at_parameter() {
        // μ_t^{⊎s} is divisible iff s ≤ t.
        let mu = kesten_mckay(0.5).unwrap();
        for (s, expect) in [(0.3, FidVerdict::Divisible), (0.5, FidVerdict::Divisible), (0.8, FidVerdict::NotDivisible), (2.0, FidVerdict::NotDivisible)] {
            let p = boolean_power(&mu, s).unwrap();
            let r = is_fid_real(&p, &default_grid(&p)).unwrap();
            assert_eq!(r.verdict, expect, "s = {s}, report: {r:?}");
        }
    }

    #[test]
    fn jacobi_bound_values() {
        let q = JacobiHead::from_moments(0.0, 1.0, 0.0, 2.5).unwrap();
        assert!((jacobi_upper_bound(&q) - 1.5).abs() < 1e-12);
        let d = JacobiHead::from_moments(2.0, 4.0, 8.0, 16.0).unwrap();
        assert!(jacobi_upper_bound(&d).is_infinite());
    }

    #[test]
    fn kesten_mckay_indicator_bracket() {
        let mu = kesten_mckay(0.5).unwrap();
        let est = phi_indicator(&mu, 8.0, 0.02).unwrap();
        assert!(est.brackets(0.5, 0.0), "estimate: {est:?}");
        assert!(est.width().unwrap() <= 0.04 + 1e-12);
    }

    #[test]
    fn cauchy_indicator_is_infinite() {
        let c = RealLineMeasure::closed_form(RealFamily::Cauchy { a: 0.0, b: 1.0 });
        let est = phi_indicator(&c, 64.0, 0.02).unwrap();
        assert!(est.upper.is_none(), "estimate: {est:?}");
        assert!(est.lower >= 64.0 - 1e-9);
    }

    #[test]
    fn bernoulli_indicator_is_zero() {
        let est = phi_indicator(&bernoulli(), 8.0, 0.02).unwrap();
        assert_eq!(est.lower, 0.0);
        assert!(est.upper.unwrap() <= 0.05, "estimate: {est:?}");
    }
}
