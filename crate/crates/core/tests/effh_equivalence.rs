use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use spinbath_core::effh::{analytic_dynamics, build_effective_model, effh_rates};
use spinbath_core::qcore::{qubit_state, BathAxis};
use spinbath_core::rcmap::ModelConfig;
use spinbath_core::redfield::{build_generator, propagate, steady_state, PropagationOptions};
use spinbath_core::spectral::BathSpec;

fn bath(axis: BathAxis, eps: f64, gamma: f64, t: f64) -> BathSpec {
    BathSpec {
        axis,
        lambda: 8.0 * eps,
        omega: 8.0,
        gamma,
        temperature: t,
        cutoff: 1000.0,
    }
}

fn model(ex: f64, ey: Option<f64>, ez: f64, gamma: f64, t: f64) -> ModelConfig {
    let mut baths = vec![
        bath(BathAxis::X, ex, gamma, t),
        bath(BathAxis::Z, ez, gamma, t),
    ];
    if let Some(ey) = ey {
        baths.push(bath(BathAxis::Y, ey, gamma, t));
    }
    ModelConfig {
        delta: 1.0,
        tunneling: 0.0,
        baths,
    }
}

fn max_entry_deviation(m: &ModelConfig, rho11: f64, rho12: C64, t_max: f64) -> f64 {
    let t = m.baths[0].temperature;
    let rates = effh_rates(m).unwrap();
    let eff = build_effective_model(m).unwrap();
    let gen = build_generator(&eff.hamiltonian, &eff.couplings).unwrap();
    let rho0 = qubit_state(rho11, rho12).unwrap();
    let times: Vec<f64> = (0..=400).map(|i| i as f64 * t_max / 400.0).collect();
    let numeric = propagate(&gen, &rho0, &times, &PropagationOptions::default()).unwrap();
    let exact = analytic_dynamics(&rates, 1.0 / t, &rho0, &times).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in numeric.states.iter().zip(&exact.states) {
        for v in (a.matrix() - b.matrix()).iter() {
            worst = worst.max(v.norm());
        }
    }
    worst
}

#[test]
fn redfield_matches_closed_form_for_random_models() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..4 {
        let ex = rng.gen_range(0.1..1.5);
        let ez = rng.gen_range(0.1..1.5);
        let ey = if rng.gen_bool(0.5) {
            Some(rng.gen_range(0.1..1.0))
        } else {
            None
        };
        let t = rng.gen_range(0.1..2.0);
        let m = model(ex, ey, ez, 0.05 / PI, t);
        let rho11: f64 = rng.gen_range(0.2..0.8);
        let radius = (rho11 * (1.0 - rho11)).sqrt() * rng.gen_range(0.0..1.0);
        let rho12 = C64::from_polar(radius, rng.gen_range(0.0..2.0 * PI));
        let dev = max_entry_deviation(&m, rho11, rho12, 20.0);
        assert!(dev < 1e-6, "{m:?}: deviation {dev:e}");
    }
}

#[test]
fn redfield_matches_overdamped_closed_form() {
    let m = model(0.5, None, 0.3, 1.0, 1.0);
    let rates = effh_rates(&m).unwrap();
    assert!(
        rates.theta.re == 0.0 && rates.theta.im > 0.0,
        "{:?}",
        rates.theta
    );
    let dev = max_entry_deviation(&m, 0.7, C64::new(0.2, 0.3), 20.0);
    assert!(dev < 1e-6, "deviation {dev:e}");
}

#[test]
fn steady_state_is_gibbs_at_dressed_splitting() {
    for (t, ex, ez) in [(1.0, 0.5, 0.5), (0.1, 1.0, 1.0)] {
        let m = model(ex, None, ez, 0.05 / PI, t);
        let rates = effh_rates(&m).unwrap();
        let eff = build_effective_model(&m).unwrap();
        let gen = build_generator(&eff.hamiltonian, &eff.couplings).unwrap();
        let ss = steady_state(&gen).unwrap();
        let rho11 = ss.matrix()[(1, 1)].re;
        let x = rates.omega21 / t;
        let want = x.exp() / (x.exp() + 1.0);
        assert!((rho11 - want).abs() < 1e-6, "{rho11} vs {want}");
    }
}
