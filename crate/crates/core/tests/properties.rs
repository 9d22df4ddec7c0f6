//! Property-based invariants of the transform, the Hartree forms, and the
//! field file format.

use hartree_core::*;
use proptest::prelude::*;

fn grid_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0..10.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_and_parseval(values in (4usize..48).prop_flat_map(grid_values)) {
        let dom = DomainSpec::line(values.len());
        let u = SpectralField::from_grid(&dom, &values).unwrap();
        let back = u.grid_values();
        for (a, b) in back.iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        let grid_sq: f64 = values.iter().map(|v| v * v).sum::<f64>() * dom.quadrature_weight();
        let coeff_sq: f64 = u.coeffs().iter().map(|c| c * c).sum();
        prop_assert!((grid_sq - coeff_sq).abs() <= 1e-10 * (1.0 + coeff_sq));
    }

    #[test]
    fn trace_bound_holds_for_arbitrary_coefficients(
        coeffs in proptest::collection::vec(-5.0..5.0f64, 8),
        m in 0.1..10.0f64,
    ) {
        let dom = DomainSpec::line(8);
        let u = SpectralField::from_coeffs(&dom, coeffs).unwrap();
        let mass = Mass::new(m).unwrap();
        let l2 = u.l2_norm();
        prop_assert!(m * l2 * l2 <= u.quadratic_form(mass) * (1.0 + 1e-12));
    }

    #[test]
    fn hartree_forms_scale_and_symmetrize(
        a in grid_values(12),
        b in grid_values(12),
        alpha in 0.1..3.0f64,
    ) {
        let dom = DomainSpec::line(12);
        let u = SpectralField::from_grid(&dom, &a).unwrap();
        let w = SpectralField::from_grid(&dom, &b).unwrap();
        let q = hartree_quartic(&u);
        prop_assert!(q >= 0.0);
        let scaled = hartree_quartic(&u.scaled(alpha));
        prop_assert!((scaled - alpha.powi(4) * q).abs() <= 1e-9 * (1.0 + scaled.abs()));
        let t_uw = hartree_trilinear(&w, &u, &w).unwrap();
        let t_wu = hartree_trilinear(&w, &w, &u).unwrap();
        prop_assert!((t_uw - t_wu).abs() <= 1e-11 * (1.0 + t_uw.abs()));
    }

    #[test]
    fn solitary_wave_preserves_modulus(
        values in grid_values(9),
        omega in -5.0..5.0f64,
        t in -100.0..100.0f64,
    ) {
        let dom = DomainSpec::line(9);
        let u = SpectralField::from_grid(&dom, &values).unwrap();
        for (psi, v) in solitary_wave(&u, omega, t).iter().zip(&values) {
            prop_assert!((psi.norm() - v.abs()).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn field_files_round_trip(coeffs in proptest::collection::vec(-1e6..1e6f64, 10)) {
        let dir = tempfile::tempdir().unwrap();
        let dom = DomainSpec::line(10);
        let u = SpectralField::from_coeffs(&dom, coeffs).unwrap();
        for (name, enc) in [("t.field", io::Encoding::Text), ("b.field", io::Encoding::Binary)] {
            let p = dir.path().join(name);
            io::write_field(&p, &u, io::FieldRepr::Spectral, enc).unwrap();
            let loaded = io::read_field(&p).unwrap();
            prop_assert_eq!(loaded.field.coeffs(), u.coeffs());
        }
    }

    #[test]
    fn energy_scaling_in_the_quadratic_regime(
        coeffs in proptest::collection::vec(-2.0..2.0f64, 10),
        alpha in -3.0..3.0f64,
    ) {
        let dom = DomainSpec::line(10);
        let ctx = EnergyContext::new(
            &dom,
            OperatorParams::new(1.0, 0.3, 0.0).unwrap(),
            NonlinearitySpec::zero(Dimension::One),
        )
        .unwrap();
        let u = SpectralField::from_coeffs(&dom, coeffs).unwrap();
        let e = ctx.energy(&u);
        let scaled = ctx.energy(&u.scaled(alpha));
        prop_assert!((scaled - alpha * alpha * e).abs() <= 1e-10 * (1.0 + scaled.abs()));
    }
}
