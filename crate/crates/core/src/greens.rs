//! Hartree potential `<G, u^2>` and the associated quartic and trilinear
//! forms.
//!
//! The kernel G is the exact Dirichlet Green function of the Laplacian on the
//! box, realized implicitly by the spectral solve of `-Delta phi = 4 pi u^2`,
//! `phi = 0` on the boundary: `phi_k = 4 pi (u^2)_k / lambda_k`. The kernel is
//! never tabulated. The pointwise square is formed on the nodal grid; a
//! 3/2-rule padded variant removes the aliasing of product modes back into
//! the retained band.

use std::f64::consts::PI;

use crate::domain::{Dimension, DomainSpec, SpectralField};
use crate::error::Result;

/// A field tagged as a Hartree potential (result of the Poisson solve).
#[derive(Debug, Clone)]
pub struct PotentialField {
    field: SpectralField,
    min_grid_value: f64,
}

impl PotentialField {
    pub fn field(&self) -> &SpectralField {
        &self.field
    }

    pub fn into_field(self) -> SpectralField {
        self.field
    }

    /// Minimum nodal value; for squared sources this stays above `-1e-10`
    /// (discrete shadow of the maximum principle).
    pub fn min_grid_value(&self) -> f64 {
        self.min_grid_value
    }
}

/// Sine coefficients of the nodal square `u^2`.
pub(crate) fn squared_source_coeffs(u: &SpectralField, dealias: bool) -> Vec<f64> {
    let dom = u.domain();
    if !dealias {
        let sq: Vec<f64> = u.grid_values().iter().map(|v| v * v).collect();
        return dom.forward(&sq);
    }
    padded_square(dom, u.coeffs())
}

/// 3/2-rule square: evaluate u on an enlarged grid, square, transform back,
/// keep the original band. Alias images of product modes land above n.
pub(crate) fn padded_square(dom: &DomainSpec, coeffs: &[f64]) -> Vec<f64> {
    let n = dom.points_per_axis();
    let np = dom.padded_axis();
    let st = dom.padded_transform();
    let mp = (np + 1) as f64;
    let inv_scale = std::f64::consts::SQRT_2;
    let fwd_scale = std::f64::consts::SQRT_2 / mp;
    match dom.dimension() {
        Dimension::One => {
            let mut wide = vec![0.0; np];
            wide[..n].copy_from_slice(coeffs);
            let mut grid = st.raw(&wide);
            for v in &mut grid {
                *v *= inv_scale;
                *v *= *v;
            }
            let mut back = st.raw(&grid);
            back.truncate(n);
            for c in &mut back {
                *c *= fwd_scale;
            }
            back
        }
        Dimension::Two => {
            let mut wide = vec![0.0; np * np];
            for r in 0..n {
                wide[r * np..r * np + n].copy_from_slice(&coeffs[r * n..(r + 1) * n]);
            }
            st.raw_rows(&mut wide, np);
            st.raw_cols(&mut wide, np);
            let s = inv_scale * inv_scale;
            for v in &mut wide {
                *v *= s;
                *v *= *v;
            }
            st.raw_rows(&mut wide, np);
            st.raw_cols(&mut wide, np);
            let s = fwd_scale * fwd_scale;
            let mut out = Vec::with_capacity(n * n);
            for r in 0..n {
                out.extend(wide[r * np..r * np + n].iter().map(|c| c * s));
            }
            out
        }
    }
}

fn potential_from_source(u: &SpectralField, source: Vec<f64>) -> PotentialField {
    let dom = u.domain();
    let coeffs: Vec<f64> = source
        .iter()
        .zip(dom.laplace_eigenvalues())
        .map(|(s, l)| 4.0 * PI * s / l)
        .collect();
    let field = SpectralField::from_coeffs(dom, coeffs).expect("finite by construction");
    let min_grid_value = field.grid_values().iter().fold(f64::INFINITY, |a, &v| a.min(v));
    PotentialField {
        field,
        min_grid_value,
    }
}

/// Solve `-Delta phi = 4 pi u^2`, `phi = 0` on the boundary.
pub fn green_potential(u: &SpectralField) -> PotentialField {
    potential_from_source(u, squared_source_coeffs(u, false))
}

/// Same with the 3/2-rule dealiased square.
pub fn green_potential_dealiased(u: &SpectralField) -> PotentialField {
    potential_from_source(u, squared_source_coeffs(u, true))
}

pub(crate) fn quartic_with(u: &SpectralField, dealias: bool) -> f64 {
    let s = squared_source_coeffs(u, dealias);
    s.iter()
        .zip(u.domain().laplace_eigenvalues())
        .map(|(sk, l)| 4.0 * PI * sk * sk / l)
        .sum()
}

/// The bare integral `int <G, u^2> u^2 dx` (the energy carries lambda/4).
pub fn hartree_quartic(u: &SpectralField) -> f64 {
    quartic_with(u, false)
}

/// The trilinear form `int <G, v^2> u w dx` appearing in the derivative of
/// the energy. Symmetric in (u, w) and symmetric under exchanging the squared
/// slot with the product slot (kernel symmetry).
pub fn hartree_trilinear(v: &SpectralField, u: &SpectralField, w: &SpectralField) -> Result<f64> {
    v.check_domain(u)?;
    v.check_domain(w)?;
    let s = squared_source_coeffs(v, false);
    let prod: Vec<f64> = u
        .grid_values()
        .iter()
        .zip(w.grid_values())
        .map(|(a, b)| a * b)
        .collect();
    let t = v.domain().forward(&prod);
    Ok(s
        .iter()
        .zip(&t)
        .zip(v.domain().laplace_eigenvalues())
        .map(|((sk, tk), l)| 4.0 * PI * sk * tk / l)
        .sum())
}

/// Spectral residual `max_k |lambda_k phi_k - 4 pi (u^2)_k|`, relative to the
/// source scale. Zero up to rounding by construction.
pub fn poisson_residual(phi: &PotentialField, u: &SpectralField) -> f64 {
    let s = squared_source_coeffs(u, false);
    let scale = s
        .iter()
        .map(|v| (4.0 * PI * v).abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    phi.field
        .coeffs()
        .iter()
        .zip(u.domain().laplace_eigenvalues())
        .zip(&s)
        .map(|((p, l), sk)| (l * p - 4.0 * PI * sk).abs())
        .fold(0.0, f64::max)
        / scale
}
