//! Property tests for the algebraic invariants: theta parity and
//! quasi-periodicity, derivative-channel consistency, winding recovery,
//! coherent-vector geometry, and Hamiltonian linearity.

use helix_core::elliptic::{bell, ell, EllipticContext};
use helix_core::helix::{build_shs, commensurability, local_expectations, local_vector};
use helix_core::lattice::{build_lattice, Boundary, ChiralityVector};
use helix_core::model::{apply_hamiltonian, DenseState, ModelSpec};
use helix_core::spin::build_spin_rep;
use num_complex::Complex64;
use proptest::prelude::*;

fn tau_strategy() -> impl Strategy<Value = Complex64> {
    (-0.3..0.3f64, 0.3..1.5f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn point_strategy() -> impl Strategy<Value = (f64, f64)> {
    (0.05..0.95f64, 0.05..0.9f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_parity(tau in tau_strategy(), (re, imf) in point_strategy()) {
        let ctx = EllipticContext::new(tau).unwrap();
        let u = Complex64::new(re, imf * tau.im);
        for alpha in 1..=4u8 {
            let plus = ell(alpha, u, &ctx).unwrap().value;
            let minus = ell(alpha, -u, &ctx).unwrap().value;
            let want = if alpha == 1 { -minus } else { minus };
            let denom = plus.norm().max(minus.norm()).max(1e-3);
            prop_assert!((plus - want).norm() / denom < 1e-12);
        }
    }

    #[test]
    fn unit_shift_signs(tau in tau_strategy(), (re, imf) in point_strategy()) {
        let ctx = EllipticContext::new(tau).unwrap();
        let u = Complex64::new(re, imf * tau.im);
        for (alpha, sign) in [(1u8, -1.0), (2, -1.0), (3, 1.0), (4, 1.0)] {
            let shifted = ell(alpha, u + 1.0, &ctx).unwrap().value;
            let base = ell(alpha, u, &ctx).unwrap().value;
            let denom = base.norm().max(1e-3);
            prop_assert!((shifted - sign * base).norm() / denom < 1e-11);
        }
    }

    #[test]
    fn derivative_channel_matches_finite_differences(
        tau in tau_strategy(),
        (re, imf) in point_strategy(),
    ) {
        let ctx = EllipticContext::new(tau).unwrap();
        let u = Complex64::new(re, imf * tau.im);
        let h = 1e-6;
        for alpha in 1..=4u8 {
            let v = bell(alpha, u, &ctx).unwrap();
            let fd = (bell(alpha, u + h, &ctx).unwrap().value
                - bell(alpha, u - h, &ctx).unwrap().value)
                / (2.0 * h);
            let denom = v.derivative.norm().max(1.0);
            prop_assert!((v.derivative - fd).norm() / denom < 1e-6);
        }
    }

    #[test]
    fn winding_recovery(
        tau in tau_strategy(),
        p in -6i64..=6,
        q in -6i64..=6,
        len in 3usize..=40,
    ) {
        let eta = (2.0 * p as f64 * tau + Complex64::new(2.0 * q as f64, 0.0)) / len as f64;
        let w = commensurability(eta, tau, &[len], 1e-9).unwrap();
        prop_assert_eq!(w.p[0], p);
        prop_assert_eq!(w.q[0], q);
        prop_assert!(w.residuals[0] < 1e-12);
    }

    #[test]
    fn coherent_vector_geometry(
        twice_s in 1u32..=6,
        (re, imf) in point_strategy(),
    ) {
        let ctx = EllipticContext::new(Complex64::new(0.0, 0.8)).unwrap();
        let rep = build_spin_rep(twice_s).unwrap();
        let u = Complex64::new(re, imf * 0.8);
        let v = local_vector(u, &rep, &ctx).unwrap();
        let norm: f64 = v.coeffs.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-13);
        let e = local_expectations(&v, &rep);
        let len = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        prop_assert!((len - rep.s()).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_linearity(seed in 0u64..1 << 32) {
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[5], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xxz(Complex64::new(0.4, 0.0), rep, lat);
        let mut state = DenseState::zeros(2, 5);
        let mut acc = seed;
        let mut next = || {
            acc = acc.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (acc >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for a in state.amplitudes.iter_mut() {
            *a = Complex64::new(next(), next());
        }
        let alpha = Complex64::new(next(), next());
        let hx = apply_hamiltonian(&spec, &state).unwrap();
        let mut scaled = DenseState::zeros(2, 5);
        scaled.axpy(alpha, &state);
        let h_scaled = apply_hamiltonian(&spec, &scaled).unwrap();
        let mut want = DenseState::zeros(2, 5);
        want.axpy(alpha, &hx);
        for (a, b) in h_scaled.amplitudes.iter().zip(&want.amplitudes) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn shs_locals_match_single_site_path(u_re in 0.05..0.9f64) {
        let ctx = EllipticContext::new(Complex64::new(0.0, 0.8)).unwrap();
        let rep = build_spin_rep(2).unwrap();
        let lat = build_lattice(&[11], Boundary::Periodic).unwrap();
        let eta = Complex64::new(2.0 / 11.0, 0.0);
        let spec = ModelSpec::xyz(eta, ctx.clone(), rep.clone(), lat);
        let eps = ChiralityVector::uniform(1, 1);
        let u = Complex64::new(u_re, 0.0);
        let state = build_shs(u, &eps, &spec).unwrap();
        for (j, local) in state.locals.iter().enumerate() {
            let direct = local_vector(u + eta * j as f64, &rep, &ctx).unwrap();
            prop_assert_eq!(&local.coeffs, &direct.coeffs);
        }
    }
}
