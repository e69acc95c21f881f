use freeconv::additive::{boolean_power, bt_map};
use freeconv::grid::GridSpec;
use freeconv::indicator::is_fid_real;
use freeconv::measure::zoo::{bernoulli, boolean_half_stable};
use std::f64::consts::PI;

#[test]
#[ignore]
fn dbg_bhs_bt_image() {
    let mu = bt_map(&boolean_half_stable(PI / 2.0, 1.0).unwrap(), 1.0).unwrap();
    for s in [0.125, 0.25, 0.5, 1.0] {
        let nu = boolean_power(&mu, s).unwrap();
        let grid = GridSpec::for_support_radius(nu.support_hint, 801, 1e-6);
        let rep = is_fid_real(&nu, &grid).unwrap();
        println!(
            "s={s}: {:?} max_im={:.3e} jump={:.3e} fail={:.4} argmax={}",
            rep.verdict, rep.max_im, rep.max_jump, rep.failure_fraction, rep.argmax
        );
    }
}

#[test]
#[ignore]
fn dbg_bernoulli_power2() {
    let mu = boolean_power(&bernoulli(), 2.0).unwrap();
    for s in [0.125, 0.25, 0.5] {
        let nu = boolean_power(&mu, s).unwrap();
        let grid = GridSpec::for_support_radius(nu.support_hint, 801, 1e-6);
        let rep = is_fid_real(&nu, &grid).unwrap();
        println!(
            "s={s}: {:?} max_im={:.3e} jump={:.3e} fail={:.4} argmax={} hint={}",
            rep.verdict, rep.max_im, rep.max_jump, rep.failure_fraction, rep.argmax, nu.support_hint
        );
    }
}
