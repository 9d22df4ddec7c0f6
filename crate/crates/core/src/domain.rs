//! Fields on the box Omega = (0,1)^d, d in {1,2}, expanded in the Dirichlet
//! eigenbasis of the negative Laplacian.
//!
//! Eigenpairs are exact on the box: for a multi-index k in {1..n}^d,
//! `lambda_k = pi^2 |k|^2` and `phi_k(x) = 2^{d/2} prod_i sin(k_i pi x_i)`,
//! orthonormal in L^2(Omega). The interior grid `x_j = j/(n+1)` carries the
//! uniform quadrature weight `1/(n+1)^d`, under which the discrete transform
//! is an exact change of basis (DST-I orthogonality): grid sums of products of
//! eigenfunctions reproduce the continuum inner products without mesh error.
//!
//! The pseudo-relativistic operator `sqrt(-Delta + m^2)` is diagonal here with
//! symbol `sqrt(lambda_k + m^2)`, and the energy of the harmonic extension to
//! the half cylinder equals the trace-space quadratic form
//! `Q_m(u) = sum_k sqrt(lambda_k + m^2) c_k^2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::dst::SineTransform;
use crate::error::{Error, Result};

/// Spatial dimension of the box domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn as_usize(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }

    /// Upper endpoint of the admissible growth interval (2, 2d/(d-1)).
    /// Degenerates to +inf in one dimension.
    pub fn critical_exponent(self) -> f64 {
        match self {
            Dimension::One => f64::INFINITY,
            Dimension::Two => 4.0,
        }
    }
}

/// Strictly positive mass parameter of `sqrt(-Delta + m^2)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Mass(f64);

impl Mass {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::NonPositiveMass(m));
        }
        Ok(Mass(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Coefficients of the stationary equation
/// `sqrt(-Delta + m^2) u - omega u - lambda <G,u^2> u - f(x,u) = 0`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OperatorParams {
    pub m: Mass,
    pub omega: f64,
    pub lambda: f64,
}

impl OperatorParams {
    pub fn new(m: f64, omega: f64, lambda: f64) -> Result<Self> {
        let m = Mass::new(m)?;
        if !omega.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidParameter(
                "omega and lambda must be finite".into(),
            ));
        }
        Ok(Self { m, omega, lambda })
    }
}

/// The box domain with its interior grid and Dirichlet eigenpairs.
pub struct DomainSpec {
    dim: Dimension,
    n: usize,
    /// `pi^2 |k|^2` in lexicographic multi-index order.
    lambdas: Vec<f64>,
    /// Interior node coordinates; second entry unused in 1D.
    nodes: Vec<[f64; 2]>,
    transform: SineTransform,
    padded: OnceLock<SineTransform>,
}

impl DomainSpec {
    fn build(dim: Dimension, n: usize) -> Arc<Self> {
        assert!(n >= 1, "need at least one interior node per axis");
        let m = (n + 1) as f64;
        let len = n.pow(dim.as_usize() as u32);
        let mut lambdas = Vec::with_capacity(len);
        let mut nodes = Vec::with_capacity(len);
        match dim {
            Dimension::One => {
                for k in 1..=n {
                    lambdas.push(PI * PI * (k * k) as f64);
                    nodes.push([k as f64 / m, 0.0]);
                }
            }
            Dimension::Two => {
                for k1 in 1..=n {
                    for k2 in 1..=n {
                        lambdas.push(PI * PI * ((k1 * k1 + k2 * k2) as f64));
                        nodes.push([k1 as f64 / m, k2 as f64 / m]);
                    }
                }
            }
        }
        Arc::new(Self {
            dim,
            n,
            lambdas,
            nodes,
            transform: SineTransform::new(n),
            padded: OnceLock::new(),
        })
    }

    /// One-dimensional box (0,1) with n interior nodes.
    pub fn line(n: usize) -> Arc<Self> {
        Self::build(Dimension::One, n)
    }

    /// Two-dimensional box (0,1)^2 with n interior nodes per axis.
    pub fn square(n: usize) -> Arc<Self> {
        Self::build(Dimension::Two, n)
    }

    pub fn with_dimension(dim: Dimension, n: usize) -> Arc<Self> {
        Self::build(dim, n)
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of interior nodes / spectral modes.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one interior node, `1/(n+1)^d`.
    pub fn quadrature_weight(&self) -> f64 {
        let m = (self.n + 1) as f64;
        m.powi(-(self.dim.as_usize() as i32))
    }

    /// Laplacian eigenvalues in lexicographic multi-index order.
    pub fn laplace_eigenvalues(&self) -> &[f64] {
        &self.lambdas
    }

    /// Coordinates of interior node `j` (lexicographic order).
    pub fn node(&self, j: usize) -> &[f64] {
        &self.nodes[j][..self.dim.as_usize()]
    }

    /// Multi-index of flat mode index `j`, entries in 1..=n.
    pub fn multi_index(&self, j: usize) -> [usize; 2] {
        match self.dim {
            Dimension::One => [j + 1, 0],
            Dimension::Two => [j / self.n + 1, j % self.n + 1],
        }
    }

    pub fn flat_index(&self, k: [usize; 2]) -> usize {
        match self.dim {
            Dimension::One => k[0] - 1,
            Dimension::Two => (k[0] - 1) * self.n + (k[1] - 1),
        }
    }

    /// Symbols `sqrt(lambda_k + m^2)` of the pseudo-relativistic operator.
    pub fn sqrt_symbols(&self, m: Mass) -> Vec<f64> {
        let m2 = m.value() * m.value();
        self.lambdas.iter().map(|&l| (l + m2).sqrt()).collect()
    }

    pub(crate) fn same_grid(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n
    }

    /// Grid values -> eigenbasis coefficients (exact discrete projection).
    pub(crate) fn forward(&self, grid: &[f64]) -> Vec<f64> {
        debug_assert_eq!(grid.len(), self.len());
        let m = (self.n + 1) as f64;
        let axis_scale = std::f64::consts::SQRT_2 / m;
        match self.dim {
            Dimension::One => {
                let mut out = self.transform.raw(grid);
                for c in &mut out {
                    *c *= axis_scale;
                }
                out
            }
            Dimension::Two => {
                let mut buf = grid.to_vec();
                self.transform.raw_rows(&mut buf, self.n);
                self.transform.raw_cols(&mut buf, self.n);
                let s = axis_scale * axis_scale;
                for c in &mut buf {
                    *c *= s;
                }
                buf
            }
        }
    }

    /// Eigenbasis coefficients -> grid values.
    pub(crate) fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.len());
        let axis_scale = std::f64::consts::SQRT_2;
        match self.dim {
            Dimension::One => {
                let mut out = self.transform.raw(coeffs);
                for v in &mut out {
                    *v *= axis_scale;
                }
                out
            }
            Dimension::Two => {
                let mut buf = coeffs.to_vec();
                self.transform.raw_rows(&mut buf, self.n);
                self.transform.raw_cols(&mut buf, self.n);
                let s = axis_scale * axis_scale;
                for v in &mut buf {
                    *v *= s;
                }
                buf
            }
        }
    }

    /// Padded axis size for alias-free evaluation of quadratic products
    /// (3/2 rule): modes up to 2n alias above n on the enlarged grid.
    pub(crate) fn padded_axis(&self) -> usize {
        (3 * self.n).div_ceil(2)
    }

    pub(crate) fn padded_transform(&self) -> &SineTransform {
        self.padded
            .get_or_init(|| SineTransform::new(self.padded_axis()))
    }
}

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainSpec")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for DomainSpec {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other)
    }
}

/// A real field on Omega in dual grid / sine-coefficient representation.
///
/// Immutable after construction; grid values are computed lazily and cached,
/// so cloned and shared fields are cheap to evaluate repeatedly.
pub struct SpectralField {
    domain: Arc<DomainSpec>,
    coeffs: Vec<f64>,
    grid: OnceLock<Vec<f64>>,
}

impl SpectralField {
    /// Build a field from interior grid samples (lexicographic node order).
    pub fn from_grid(domain: &Arc<DomainSpec>, values: &[f64]) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::SizeMismatch {
                expected: domain.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let coeffs = domain.forward(values);
        let field = Self {
            domain: Arc::clone(domain),
            coeffs,
            grid: OnceLock::new(),
        };
        let _ = field.grid.set(values.to_vec());
        Ok(field)
    }

    /// Build a field directly from eigenbasis coefficients.
    pub fn from_coeffs(domain: &Arc<DomainSpec>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != domain.len() {
            return Err(Error::SizeMismatch {
                expected: domain.len(),
                got: coeffs.len(),
            });
        }
        if let Some(index) = coeffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            domain: Arc::clone(domain),
            coeffs,
            grid: OnceLock::new(),
        })
    }

    pub fn zero(domain: &Arc<DomainSpec>) -> Self {
        Self {
            domain: Arc::clone(domain),
            coeffs: vec![0.0; domain.len()],
            grid: OnceLock::new(),
        }
    }

    /// The eigenfunction `phi_k`, for multi-index `k` with entries in 1..=n.
    pub fn eigenfunction(domain: &Arc<DomainSpec>, k: [usize; 2]) -> Self {
        let mut coeffs = vec![0.0; domain.len()];
        coeffs[domain.flat_index(k)] = 1.0;
        Self {
            domain: Arc::clone(domain),
            coeffs,
            grid: OnceLock::new(),
        }
    }

    pub fn domain(&self) -> &Arc<DomainSpec> {
        &self.domain
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Pointwise values at the interior nodes (cached).
    pub fn grid_values(&self) -> &[f64] {
        self.grid.get_or_init(|| self.domain.inverse(&self.coeffs))
    }

    /// Evaluate the sine series at an arbitrary point of the closed box.
    pub fn eval_at(&self, x: &[f64]) -> Result<f64> {
        let d = self.domain.dim.as_usize();
        if x.len() != d {
            return Err(Error::OutsideDomain(format!(
                "point has {} coordinates, domain is {d}-dimensional",
                x.len()
            )));
        }
        if x.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            return Err(Error::OutsideDomain(format!("{x:?}")));
        }
        let n = self.domain.n;
        let amp = std::f64::consts::SQRT_2.powi(d as i32);
        let sin_axis = |coord: f64| -> Vec<f64> {
            (1..=n).map(|k| (k as f64 * PI * coord).sin()).collect()
        };
        let s1 = sin_axis(x[0]);
        let value = match self.domain.dim {
            Dimension::One => self
                .coeffs
                .iter()
                .zip(&s1)
                .map(|(c, s)| c * s)
                .sum::<f64>(),
            Dimension::Two => {
                let s2 = sin_axis(x[1]);
                let mut acc = 0.0;
                for k1 in 0..n {
                    let row = &self.coeffs[k1 * n..(k1 + 1) * n];
                    let partial: f64 = row.iter().zip(&s2).map(|(c, s)| c * s).sum();
                    acc += s1[k1] * partial;
                }
                acc
            }
        };
        Ok(amp * value)
    }

    /// Apply `sqrt(-Delta + m^2)`: diagonal scaling by `sqrt(lambda_k + m^2)`.
    pub fn apply_sqrt_op(&self, m: Mass) -> Self {
        let m2 = m.value() * m.value();
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.domain.lambdas.iter())
            .map(|(c, l)| c * (l + m2).sqrt())
            .collect();
        Self {
            domain: Arc::clone(&self.domain),
            coeffs,
            grid: OnceLock::new(),
        }
    }

    /// Trace-space energy `Q_m(u) = sum_k sqrt(lambda_k + m^2) c_k^2`,
    /// the squared norm of the energy-minimizing harmonic extension.
    pub fn quadratic_form(&self, m: Mass) -> f64 {
        let m2 = m.value() * m.value();
        self.coeffs
            .iter()
            .zip(self.domain.lambdas.iter())
            .map(|(c, l)| (l + m2).sqrt() * c * c)
            .sum()
    }

    /// Inner product associated with `quadratic_form`.
    pub fn q_inner(&self, other: &Self, m: Mass) -> Result<f64> {
        self.check_domain(other)?;
        let m2 = m.value() * m.value();
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .zip(self.domain.lambdas.iter())
            .map(|((a, b), l)| (l + m2).sqrt() * a * b)
            .sum())
    }

    pub fn q_norm(&self, m: Mass) -> f64 {
        self.quadratic_form(m).sqrt()
    }

    /// L^2(Omega) norm; exact by the discrete Parseval identity.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn l2_inner(&self, other: &Self) -> Result<f64> {
        self.check_domain(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    /// L^p norm via grid quadrature (p finite).
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0 && p.is_finite());
        let w = self.domain.quadrature_weight();
        let sum: f64 = self.grid_values().iter().map(|v| v.abs().powf(p)).sum();
        (w * sum).powf(1.0 / p)
    }

    pub fn linf_norm(&self) -> f64 {
        self.grid_values().iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            domain: Arc::clone(&self.domain),
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
            grid: OnceLock::new(),
        }
    }

    /// `a*u + b*w`.
    pub fn lin_comb(a: f64, u: &Self, b: f64, w: &Self) -> Result<Self> {
        u.check_domain(w)?;
        let coeffs = u
            .coeffs
            .iter()
            .zip(w.coeffs.iter())
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self {
            domain: Arc::clone(&u.domain),
            coeffs,
            grid: OnceLock::new(),
        })
    }

    /// Nodal positive part `max(u, 0)`.
    pub fn positive_part(&self) -> Self {
        let grid: Vec<f64> = self.grid_values().iter().map(|v| v.max(0.0)).collect();
        Self::from_grid(&self.domain, &grid).expect("finite by construction")
    }

    /// Nodal signed negative part `min(u, 0)`.
    pub fn negative_part_signed(&self) -> Self {
        let grid: Vec<f64> = self.grid_values().iter().map(|v| v.min(0.0)).collect();
        Self::from_grid(&self.domain, &grid).expect("finite by construction")
    }

    pub(crate) fn check_domain(&self, other: &Self) -> Result<()> {
        if self.domain.same_grid(&other.domain) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }
}

impl Clone for SpectralField {
    fn clone(&self) -> Self {
        // The grid cache is dropped; it regenerates on demand.
        Self {
            domain: Arc::clone(&self.domain),
            coeffs: self.coeffs.clone(),
            grid: OnceLock::new(),
        }
    }
}

impl fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralField")
            .field("domain", &self.domain)
            .field("modes", &self.coeffs.len())
            .finish()
    }
}
