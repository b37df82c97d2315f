use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use spinbath_core::effh::{analytic_dynamics, effh_rates, kappa_pair, kappa_triple};
use spinbath_core::oracle::DephasingKernel;
use spinbath_core::qcore::{
    hermitian_deviation, pauli, qubit_state, trace, BathAxis, ComplexMatrix,
};
use spinbath_core::rcmap::{build_extended, ModelConfig};
use spinbath_core::redfield::{apply_generator, build_generator, Coupling};
use spinbath_core::spectral::{rate_gamma, BathSpec, SpectralDensity};

fn density() -> impl Strategy<Value = SpectralDensity> {
    prop_oneof![
        (0.1..10.0f64, 1.0..12.0f64, 0.001..0.5f64).prop_map(|(lambda, omega, gamma)| {
            SpectralDensity::Brownian {
                lambda,
                omega,
                gamma,
            }
        }),
        (0.001..0.5f64, 1.0..100.0f64)
            .prop_map(|(gamma, cutoff)| SpectralDensity::Ohmic { gamma, cutoff }),
        (0.0..2.0f64, 0.001..0.5f64, 1.0..100.0f64).prop_map(|(epsilon, gamma, cutoff)| {
            SpectralDensity::EffectiveOhmic {
                epsilon,
                gamma,
                cutoff,
            }
        }),
    ]
}

fn axis() -> impl Strategy<Value = BathAxis> {
    prop_oneof![Just(BathAxis::X), Just(BathAxis::Y), Just(BathAxis::Z)]
}

fn hermitian(d: usize, values: &[f64]) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(d, d, |i, j| {
        C64::new(
            values[(i * d + j) % values.len()],
            values[(j * d + i + 1) % values.len()],
        )
    });
    &a + a.adjoint()
}

fn xz_model(ex: f64, ez: f64, t: f64) -> ModelConfig {
    let bath = |axis, eps: f64| BathSpec {
        axis,
        lambda: 8.0 * eps,
        omega: 8.0,
        gamma: 0.05 / PI,
        temperature: t,
        cutoff: 1000.0,
    };
    ModelConfig {
        delta: 1.0,
        tunneling: 0.0,
        baths: vec![bath(BathAxis::X, ex), bath(BathAxis::Z, ez)],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rates_obey_detailed_balance(j in density(), w in 0.01..20.0f64, t in 0.05..10.0f64) {
        let up = rate_gamma(&j, w, t).unwrap();
        let down = rate_gamma(&j, -w, t).unwrap();
        prop_assert!(up >= 0.0 && down >= 0.0);
        if up > 0.0 {
            prop_assert!((down / (up * (-w / t).exp()) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        delta in 0.2..2.0f64,
        tunneling in -1.0..1.0f64,
        ax in axis(),
        j in density(),
        t in 0.05..5.0f64,
        values in prop::collection::vec(-1.0..1.0f64, 8),
    ) {
        let h = pauli(BathAxis::Z) * C64::new(delta, 0.0) + pauli(BathAxis::X) * C64::new(tunneling, 0.0);
        let gen = build_generator(&h, &[Coupling::new(pauli(ax), j, t)]).unwrap();
        let rho = hermitian(2, &values);
        let out = apply_generator(&gen, &rho).unwrap();
        prop_assert!(trace(&out).norm() <= 1e-10 * (1.0 + out.norm()));
        prop_assert!(hermitian_deviation(&out) <= 1e-12 * (1.0 + out.norm()));
    }

    #[test]
    fn extended_generator_preserves_trace(
        lx in 0.0..6.0f64,
        lz in 0.0..6.0f64,
        t in 0.1..2.0f64,
        values in prop::collection::vec(-1.0..1.0f64, 16),
    ) {
        let mut m = xz_model(0.0, 0.0, t);
        m.baths[0].lambda = lx;
        m.baths[1].lambda = lz;
        let ext = build_extended(&m, 3).unwrap();
        let gen = build_generator(&ext.hamiltonian, &ext.couplings).unwrap();
        let rho = hermitian(ext.dim(), &values);
        let out = apply_generator(&gen, &rho).unwrap();
        prop_assert!(trace(&out).norm() <= 1e-10 * (1.0 + out.norm()));
        prop_assert!(hermitian_deviation(&out) <= 1e-10 * (1.0 + out.norm()));
    }

    #[test]
    fn pair_dressing_is_bounded_and_reflection_symmetric(a in 0.0..3.0f64, b in 0.0..3.0f64) {
        let p = kappa_pair(a, b).unwrap();
        let q = kappa_pair(b, a).unwrap();
        for k in [p.h, p.f, p.g] {
            prop_assert!(k.abs() <= 1.0 + 1e-12);
        }
        prop_assert!((p.h - q.g).abs() < 1e-9);
        prop_assert!((p.f - q.f).abs() < 1e-9);
    }

    #[test]
    fn triple_dressing_is_bounded(ex in 0.0..2.0f64, ey in 0.0..2.0f64, ez in 0.0..2.0f64) {
        let d = kappa_triple(ex, ey, ez).unwrap();
        for k in d.kappas() {
            prop_assert!(k.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn decoherence_rates_are_nonnegative(ex in 0.0..1.2f64, ez in 0.0..1.2f64, t in 0.0..2.0f64) {
        let r = effh_rates(&xz_model(ex, ez, t)).unwrap();
        prop_assert!(r.gamma_d >= 0.0 && r.gamma_x_eff >= 0.0 && r.gamma_z_eff >= 0.0);
        prop_assert!(r.dressing.kappa_z <= 1.0);
    }

    #[test]
    fn analytic_states_stay_normalized(
        ex in 0.05..1.2f64,
        ez in 0.05..1.2f64,
        t in 0.05..2.0f64,
        rho11 in 0.05..0.95f64,
        phase in 0.0..(2.0 * PI),
        time in 0.0..30.0f64,
    ) {
        let r = effh_rates(&xz_model(ex, ez, t)).unwrap();
        let mag = 0.9 * (rho11 * (1.0 - rho11)).sqrt();
        let rho0 = qubit_state(rho11, C64::from_polar(mag, phase)).unwrap();
        let traj = analytic_dynamics(&r, 1.0 / t, &rho0, &[0.0, time]).unwrap();
        let m = traj.states[1].matrix();
        prop_assert!((trace(m) - C64::new(1.0, 0.0)).norm() < 1e-14);
        prop_assert!(hermitian_deviation(m) < 1e-14);
    }

    #[test]
    fn dephasing_exponent_is_nonpositive_and_hotter_is_faster(
        lambda in 0.5..8.0f64,
        t1 in 0.05..1.0f64,
        dt in 0.01..2.0f64,
        time in 0.0..6.0f64,
    ) {
        let bath = |temperature| BathSpec {
            axis: BathAxis::Z,
            lambda,
            omega: 8.0,
            gamma: 0.05 / PI,
            temperature,
            cutoff: 1000.0,
        };
        let cold = DephasingKernel::new(&bath(t1), 1.0).unwrap().gamma(time).unwrap();
        let hot = DephasingKernel::new(&bath(t1 + dt), 1.0).unwrap().gamma(time).unwrap();
        prop_assert!(cold <= 0.0);
        prop_assert!(hot <= cold + 1e-9);
    }
}
