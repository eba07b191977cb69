//! Randomized invariants of the spectral operators, overlap metrics, and
//! ramp construction.

use std::sync::Arc;

use num_complex::Complex;
use proptest::prelude::*;
use tg_sta::{
    density_overlap, many_body_fidelity, tf_chemical_potential, AnsatzKind, ComplexField,
    DensityProfile, Grid64, OrbitalSet, RampSchedule, Spectral, TrapSpec,
};

fn grid() -> Arc<Grid64> {
    Arc::new(Grid64::new(-10.0, 10.0, 128).unwrap())
}

/// Smooth, well-decayed field from a few random Fourier-envelope parameters.
fn field(g: &Arc<Grid64>, amps: &[f64; 3], shift: f64) -> ComplexField<f64> {
    ComplexField::from_fn(g.clone(), |x| {
        let env = (-(x - shift) * (x - shift) / 2.0).exp();
        let re = env * (amps[0] + amps[1] * x);
        let im = env * amps[2] * x * x;
        Complex::new(re, im)
    })
}

fn amp() -> impl Strategy<Value = f64> {
    -2.0f64..2.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval_holds(a in [amp(), amp(), amp()], shift in -1.0f64..1.0) {
        let g = grid();
        let f = field(&g, &a, shift);
        let direct = f.norm();
        let spectral = Spectral::new(g.clone());
        let mut buf = f.values().to_vec();
        spectral.forward(&mut buf);
        let hat: f64 = buf.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx()
            / g.n_points() as f64;
        prop_assert!((direct - hat).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn second_derivative_is_linear(
        a in [amp(), amp(), amp()],
        b in [amp(), amp(), amp()],
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let g = grid();
        let f = field(&g, &a, 0.3);
        let h = field(&g, &b, -0.4);
        let combo = ComplexField::new(
            g.clone(),
            f.values()
                .iter()
                .zip(h.values())
                .map(|(u, v)| u.scale(alpha) + v.scale(beta))
                .collect(),
        )
        .unwrap();
        let lhs = combo.second_derivative();
        let df = f.second_derivative();
        let dh = h.second_derivative();
        for ((l, u), v) in lhs.values().iter().zip(df.values()).zip(dh.values()) {
            let rhs = u.scale(alpha) + v.scale(beta);
            prop_assert!((l - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn second_derivative_is_self_adjoint(
        a in [amp(), amp(), amp()],
        b in [amp(), amp(), amp()],
        s in -1.0f64..1.0,
    ) {
        let g = grid();
        let f = field(&g, &a, s);
        let h = field(&g, &b, -s);
        let lhs = f.inner_product(&h.second_derivative()).unwrap();
        let rhs = f.second_derivative().inner_product(&h).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn overlap_symmetric_and_bounded(
        c1 in -3.0f64..3.0,
        c2 in -3.0f64..3.0,
        w1 in 0.5f64..2.0,
        w2 in 0.5f64..2.0,
    ) {
        let g = grid();
        let mk = |c: f64, w: f64| {
            DensityProfile::new(
                g.clone(),
                g.xs().iter().map(|&x| (-((x - c) / w).powi(2)).exp()).collect(),
            )
            .unwrap()
        };
        let a = mk(c1, w1);
        let b = mk(c2, w2);
        let ab = density_overlap(&a, &b).unwrap();
        let ba = density_overlap(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((density_overlap(&a, &a).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fidelity_invariant_under_orbital_rotation(theta in 0.0f64..std::f64::consts::TAU) {
        let g = grid();
        let norm = |f: ComplexField<f64>| {
            let mut f = f;
            f.renormalize(1.0);
            f
        };
        let phi0 = norm(ComplexField::from_real_fn(g.clone(), |x| (-x * x / 2.0).exp()));
        let phi1 = norm(ComplexField::from_real_fn(g.clone(), |x| x * (-x * x / 2.0).exp()));
        let psi0 = norm(ComplexField::from_real_fn(g.clone(), |x| (-x * x / 1.8).exp()));
        let psi1 = norm(ComplexField::from_real_fn(g.clone(), |x| x * (-x * x / 2.2).exp()));
        let target = OrbitalSet { orbitals: vec![psi0, psi1], energies: vec![0.0; 2], time: 0.0 };
        let plain = OrbitalSet {
            orbitals: vec![phi0.clone(), phi1.clone()],
            energies: vec![0.0; 2],
            time: 0.0,
        };
        let (c, s) = (theta.cos(), theta.sin());
        let mixed = OrbitalSet {
            orbitals: vec![
                ComplexField::new(
                    g.clone(),
                    phi0.values()
                        .iter()
                        .zip(phi1.values())
                        .map(|(u, v)| u.scale(c) + v.scale(s))
                        .collect(),
                )
                .unwrap(),
                ComplexField::new(
                    g.clone(),
                    phi0.values()
                        .iter()
                        .zip(phi1.values())
                        .map(|(u, v)| u.scale(-s) + v.scale(c))
                        .collect(),
                )
                .unwrap(),
            ],
            energies: vec![0.0; 2],
            time: 0.0,
        };
        let f_plain = many_body_fidelity(&plain, &target).unwrap();
        let f_mixed = many_body_fidelity(&mixed, &target).unwrap();
        prop_assert!((f_plain - f_mixed).abs() <= 1e-10);
    }

    #[test]
    fn ramp_endpoints_match_trap(
        omega_f_sq in 0.5f64..20.0,
        t_f in 0.3f64..5.0,
        n in 5.0f64..50.0,
    ) {
        let trap = TrapSpec::new(1.0, omega_f_sq, 0.0, t_f).unwrap();
        for sched in [
            RampSchedule::ermakov(trap).unwrap(),
            RampSchedule::variational(trap, AnsatzKind::ThomasFermi, n).unwrap(),
        ] {
            prop_assert!((sched.omega_sq(0.0) - 1.0).abs() <= 1e-8);
            prop_assert!((sched.omega_sq(t_f) - omega_f_sq).abs() <= 1e-8 * omega_f_sq);
            let p = sched.poly();
            prop_assert!(p.b_dot(0.0).abs() <= 1e-10);
            prop_assert!(p.b_dot(t_f).abs() <= 1e-10 || p.b_dot(t_f).abs() <= 1e-8 * (p.bf() - p.b0()).abs() / t_f);
        }
    }

    #[test]
    fn chemical_potential_roundtrip(n in 2.0f64..200.0, gamma in 0.0f64..2.0) {
        let mu = tf_chemical_potential(n, gamma).unwrap();
        prop_assert!(mu > 0.0);
        if gamma == 0.0 {
            prop_assert!((mu - n).abs() <= 1e-10 * n);
        }
        let mu2 = tf_chemical_potential(n * 1.01, gamma).unwrap();
        prop_assert!(mu2 > mu);
    }
}
