use proptest::prelude::*;
use upb_core::dynamics::{build_liouvillian, steady_state, BathParams, SystemParams};
use upb_core::squeezing::{pn_distribution, SqueezeParams};
use upb_core::weakdrive::solve_manifolds;
use upb_core::{FockBasis, C64};

fn params() -> impl Strategy<Value = SystemParams> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.1..3.0f64, 0.5..2.0f64, 0.5..2.0f64).prop_map(
        |(d1, d2, u1, u2, j, k1, k2)| SystemParams {
            delta1: d1,
            delta2: d2,
            u1,
            u2,
            j_hop: j,
            f1: C64::new(1e-3, 0.0),
            f2: C64::new(0.0, 0.0),
            kappa1: k1,
            kappa2: k2,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn amplitudes_scale_with_drive_order(p in params(), s in 0.2..5.0f64) {
        let a = solve_manifolds(&p, 3, None).unwrap();
        let b = solve_manifolds(&p.with_drives(p.f1 * s, p.f2 * s), 3, None).unwrap();
        for &(n, m) in a.basis().states() {
            let expect = a.get(n, m) * s.powi((n + m) as i32);
            prop_assert!((b.get(n, m) - expect).norm() <= 1e-9 * expect.norm().max(1e-300));
        }
    }

    #[test]
    fn drive_phase_rotates_each_manifold(p in params(), phi in 0.0..std::f64::consts::TAU) {
        let w = C64::from_polar(1.0, phi);
        let a = solve_manifolds(&p, 3, None).unwrap();
        let b = solve_manifolds(&p.with_drives(p.f1 * w, p.f2 * w), 3, None).unwrap();
        for &(n, m) in a.basis().states() {
            let expect = a.get(n, m) * w.powi((n + m) as i32);
            prop_assert!((b.get(n, m) - expect).norm() <= 1e-9 * a.get(n, m).norm().max(1e-300));
        }
    }

    #[test]
    fn mode_exchange_transposes_amplitudes(p in params()) {
        let a = solve_manifolds(&p, 3, None).unwrap();
        let b = solve_manifolds(&p.swapped(), 3, None).unwrap();
        for &(n, m) in a.basis().states() {
            prop_assert!((a.get(n, m) - b.get(m, n)).norm() <= 1e-9 * a.get(n, m).norm().max(1e-300));
        }
    }

    #[test]
    fn squeezed_distribution_is_normalized(alpha in 0.0..1.5f64, r in 0.0..1.0f64) {
        let p = pn_distribution(&SqueezeParams::intensity(alpha, r), 120).unwrap();
        let total: f64 = p.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "sum {total}");
        prop_assert!(p.iter().all(|&x| x >= -1e-15));
    }

    #[test]
    fn generator_preserves_trace(p in params(), n_th in 0.0..0.5f64, eta in 0.0..0.5f64, casc in 0.0..1.0f64) {
        let bath = BathParams { n_th, dephasing_rate: eta, cascade_efficiency: casc, squeeze_reservoir: None };
        let l = build_liouvillian(&p.with_drives(C64::new(0.3, 0.1), C64::new(0.0, 0.2)), &bath, &FockBasis::new(3)).unwrap();
        prop_assert!(l.trace_defect() < 1e-12, "defect {}", l.trace_defect());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn steady_state_is_a_density_matrix(p in params(), f in 0.05..0.5f64, n_th in 0.0..0.2f64) {
        let bath = BathParams { n_th, ..Default::default() };
        let l = build_liouvillian(&p.with_drives(C64::new(f, 0.0), C64::new(0.0, 0.0)), &bath, &FockBasis::new(4)).unwrap();
        let rho = steady_state(&l).unwrap();
        prop_assert!(rho.validate().is_ok());
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
    }
}
