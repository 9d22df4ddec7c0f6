//! Harmonic extension of a trace field to the half cylinder
//! `Omega x (0, inf)` and the solitary-wave reconstruction.
//!
//! The extension of `u = sum_k c_k phi_k` solving `-Delta v + m^2 v = 0` with
//! `v(., 0) = u` and lateral Dirichlet data is available in closed form,
//! `v(x, y) = sum_k c_k exp(-sqrt(lambda_k + m^2) y) phi_k(x)`, and its
//! Neumann trace `-dv/dy|_{y=0}` equals `sqrt(-Delta + m^2) u`. The solver
//! never discretizes the cylinder; these routines only exist so that tests
//! can verify the correspondence by finite differences.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{Dimension, Mass, SpectralField};
use crate::error::{Error, Result};

/// Evaluate the harmonic extension at a point `(x, y)` of the closed cylinder.
pub fn evaluate_extension(u: &SpectralField, m: Mass, x: &[f64], y: f64) -> Result<f64> {
    if y < 0.0 || !y.is_finite() {
        return Err(Error::NegativeHeight(y));
    }
    let dom = u.domain();
    let d = dom.dimension().as_usize();
    if x.len() != d {
        return Err(Error::OutsideDomain(format!(
            "point has {} coordinates, domain is {d}-dimensional",
            x.len()
        )));
    }
    if x.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
        return Err(Error::OutsideDomain(format!("{x:?}")));
    }
    let n = dom.points_per_axis();
    let m2 = m.value() * m.value();
    let amp = std::f64::consts::SQRT_2.powi(d as i32);
    let sin1: Vec<f64> = (1..=n).map(|k| (k as f64 * PI * x[0]).sin()).collect();
    let lambdas = dom.laplace_eigenvalues();
    let value = match dom.dimension() {
        Dimension::One => u
            .coeffs()
            .iter()
            .zip(lambdas)
            .zip(&sin1)
            .map(|((c, l), s)| c * (-(l + m2).sqrt() * y).exp() * s)
            .sum::<f64>(),
        Dimension::Two => {
            let sin2: Vec<f64> = (1..=n).map(|k| (k as f64 * PI * x[1]).sin()).collect();
            let mut acc = 0.0;
            for (j, c) in u.coeffs().iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let k = dom.multi_index(j);
                acc += c
                    * (-(lambdas[j] + m2).sqrt() * y).exp()
                    * sin1[k[0] - 1]
                    * sin2[k[1] - 1];
            }
            acc
        }
    };
    Ok(amp * value)
}

/// Residuals of the extension problem measured by centered differences.
#[derive(Debug, Clone, Copy)]
pub struct ExtensionResidual {
    /// max over samples of `|-Delta_h v + m^2 v|`
    pub pde_max: f64,
    /// max over sample bases of `|(v(x,0) - v(x,h))/h - (sqrt(-Delta+m^2)u)(x)|`
    pub neumann_max: f64,
}

/// Check the cylinder PDE and the Neumann trace at the given interior samples
/// with difference step `h`. Samples are `(x, y)` with `x` in the open box and
/// `y >= h` so the stencil stays in the closed cylinder.
pub fn extension_residual(
    u: &SpectralField,
    m: Mass,
    samples: &[(Vec<f64>, f64)],
    h: f64,
) -> Result<ExtensionResidual> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "difference step must be positive, got {h}"
        )));
    }
    let d = u.domain().dimension().as_usize();
    let m2 = m.value() * m.value();
    let sqrt_u = u.apply_sqrt_op(m);
    let mut pde_max: f64 = 0.0;
    let mut neumann_max: f64 = 0.0;
    for (x, y) in samples {
        if x.len() != d || x.iter().any(|&c| !(0.0 < c && c < 1.0)) {
            return Err(Error::OutsideDomain(format!("{x:?}")));
        }
        if *y < h {
            return Err(Error::OutsideDomain(format!(
                "height {y} below difference step {h}"
            )));
        }
        // x +- h may leave the box; the odd-periodic continuation of the
        // finite sine series solves the same equation on all of R^d x R+,
        // but we keep the stencil inside to honor the domain contract.
        let center = evaluate_extension(u, m, x, *y)?;
        let mut lap = 0.0;
        for axis in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[axis] = (x[axis] + h).min(1.0);
            xm[axis] = (x[axis] - h).max(0.0);
            // 0.999: the stencil arm may round to just under h
            if xp[axis] - x[axis] < 0.999 * h || x[axis] - xm[axis] < 0.999 * h {
                return Err(Error::OutsideDomain(format!(
                    "{x:?} closer than h={h} to the lateral boundary"
                )));
            }
            lap += (evaluate_extension(u, m, &xp, *y)?
                - 2.0 * center
                + evaluate_extension(u, m, &xm, *y)?)
                / (h * h);
        }
        lap += (evaluate_extension(u, m, x, y + h)?
            - 2.0 * center
            + evaluate_extension(u, m, x, y - h)?)
            / (h * h);
        pde_max = pde_max.max((-lap + m2 * center).abs());

        let trace = evaluate_extension(u, m, x, 0.0)?;
        let above = evaluate_extension(u, m, x, h)?;
        let neumann_fd = (trace - above) / h;
        neumann_max = neumann_max.max((neumann_fd - sqrt_u.eval_at(x)?).abs());
    }
    Ok(ExtensionResidual {
        pde_max,
        neumann_max,
    })
}

/// Solitary-wave reconstruction `psi(x, t) = exp(-i omega t) u(x)` on the grid.
pub fn solitary_wave(u: &SpectralField, omega: f64, t: f64) -> Vec<Complex64> {
    let phase = Complex64::from_polar(1.0, -omega * t);
    u.grid_values().iter().map(|&v| phase * v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use approx::assert_relative_eq;

    fn phi1(n: usize) -> SpectralField {
        SpectralField::eigenfunction(&DomainSpec::line(n), [1, 0])
    }

    #[test]
    fn trace_condition_at_zero_height() {
        let dom = DomainSpec::line(31);
        let vals: Vec<f64> = (0..31).map(|j| (j as f64 * 0.21).sin()).collect();
        let u = SpectralField::from_grid(&dom, &vals).unwrap();
        let m = Mass::new(1.3).unwrap();
        for j in [0usize, 10, 30] {
            let x = dom.node(j);
            assert_relative_eq!(
                evaluate_extension(&u, m, x, 0.0).unwrap(),
                vals[j],
                max_relative = 1e-10,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn single_mode_closed_form() {
        // v(1/2, 1) = sqrt(2) exp(-sqrt(pi^2+1)); oracle is the direct
        // exponential evaluation of the decay profile.
        let u = phi1(63);
        let m = Mass::new(1.0).unwrap();
        let got = evaluate_extension(&u, m, &[0.5], 1.0).unwrap();
        let oracle = std::f64::consts::SQRT_2 * (-(PI * PI + 1.0).sqrt()).exp();
        assert_relative_eq!(got, oracle, max_relative = 1e-13);
        assert_relative_eq!(oracle, 0.052_322_19, max_relative = 1e-6);
    }

    #[test]
    fn lateral_boundary_vanishes() {
        let u = phi1(16);
        let m = Mass::new(2.0).unwrap();
        for y in [0.0, 0.5, 2.0] {
            assert!(evaluate_extension(&u, m, &[0.0], y).unwrap().abs() < 1e-14);
            assert!(evaluate_extension(&u, m, &[1.0], y).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn negative_height_rejected() {
        let u = phi1(8);
        assert!(matches!(
            evaluate_extension(&u, Mass::new(1.0).unwrap(), &[0.5], -0.1),
            Err(Error::NegativeHeight(_))
        ));
    }

    #[test]
    fn energy_decays_with_height() {
        // Q of the level sections shrinks as y grows (every mode decays).
        let dom = DomainSpec::line(31);
        let vals: Vec<f64> = (0..31).map(|j| 1.0 / (1.0 + j as f64)).collect();
        let u = SpectralField::from_grid(&dom, &vals).unwrap();
        let m = Mass::new(1.0).unwrap();
        let section = |y: f64| -> f64 {
            let grid: Vec<f64> = (0..31)
                .map(|j| evaluate_extension(&u, m, dom.node(j), y).unwrap())
                .collect();
            SpectralField::from_grid(&dom, &grid).unwrap().quadratic_form(m)
        };
        let (e0, e1, e2) = (section(0.0), section(0.3), section(1.0));
        assert!(e0 > e1 && e1 > e2);
    }

    #[test]
    fn pde_residual_is_second_order() {
        let u = phi1(63);
        let m = Mass::new(1.0).unwrap();
        let samples: Vec<(Vec<f64>, f64)> = (1..10)
            .flat_map(|i| (1..10).map(move |j| (vec![i as f64 / 10.0], j as f64 / 10.0)))
            .collect();
        let r1 = extension_residual(&u, m, &samples, 1e-2).unwrap();
        let r2 = extension_residual(&u, m, &samples, 5e-3).unwrap();
        let ratio = r1.pde_max / r2.pde_max;
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn neumann_mismatch_is_first_order() {
        let u = phi1(63);
        let m = Mass::new(1.0).unwrap();
        let samples: Vec<(Vec<f64>, f64)> =
            (1..10).map(|i| (vec![i as f64 / 10.0], 0.5)).collect();
        let r1 = extension_residual(&u, m, &samples, 1e-3).unwrap();
        let r2 = extension_residual(&u, m, &samples, 5e-4).unwrap();
        let ratio = r2.neumann_max / r1.neumann_max;
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
        // error ~ h * A_1^2/2 * |phi_1|_inf
        assert!(r1.neumann_max < 1.2e-3 * (PI * PI + 1.0) * std::f64::consts::SQRT_2);
    }

    #[test]
    fn zero_field_zero_residual() {
        let dom = DomainSpec::line(16);
        let z = SpectralField::zero(&dom);
        let r = extension_residual(&z, Mass::new(1.0).unwrap(), &[(vec![0.5], 0.5)], 1e-2).unwrap();
        assert_eq!(r.pde_max, 0.0);
        assert_eq!(r.neumann_max, 0.0);
    }

    #[test]
    fn sample_outside_domain_rejected() {
        let u = phi1(16);
        let m = Mass::new(1.0).unwrap();
        assert!(extension_residual(&u, m, &[(vec![1.5], 0.5)], 1e-2).is_err());
        assert!(extension_residual(&u, m, &[(vec![0.5], 1e-4)], 1e-2).is_err());
    }

    #[test]
    fn solitary_wave_phase_and_modulus() {
        let dom = DomainSpec::line(31);
        let vals: Vec<f64> = (0..31).map(|j| (j as f64 * 0.4).cos()).collect();
        let u = SpectralField::from_grid(&dom, &vals).unwrap();
        let omega = 0.7;

        let at0 = solitary_wave(&u, omega, 0.0);
        for (p, v) in at0.iter().zip(&vals) {
            assert_relative_eq!(p.re, *v, epsilon = 1e-14);
            assert!(p.im.abs() < 1e-14);
        }

        let period = 2.0 * PI / omega;
        for (p, v) in solitary_wave(&u, omega, period).iter().zip(&vals) {
            assert_relative_eq!(p.re, *v, epsilon = 1e-12);
            assert!(p.im.abs() < 1e-12);
        }

        for t in [0.13, 2.9, 77.7] {
            for (p, v) in solitary_wave(&u, omega, t).iter().zip(&vals) {
                assert_relative_eq!(p.norm(), v.abs(), epsilon = 1e-12);
            }
        }
    }
}
