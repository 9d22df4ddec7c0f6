//! The energy functional of the stationary problem and its sign-constrained
//! variants, with gradients taken in the trace-space metric.
//!
//! With `Q_m(u) = sum_k sqrt(lambda_k + m^2) c_k^2` and the active part
//! `w(u)` (u itself, its nodal positive part, or its nodal negative part),
//!
//! ```text
//! J(u) = Q_m(u)/2 - (omega/2)|u|_2^2 - (lambda/4) int <G,w^2> w^2 - int F(x,w)
//! ```
//!
//! All integrals use the nodal quadrature of the transforms, so the discrete
//! gradient below is the exact derivative of the discrete energy; the
//! finite-difference consistency checks in the verification suite certify
//! precisely this. The gradient is returned as the Riesz representative in
//! the Q-inner product (Sobolev gradient), which makes the quadratic part of
//! the flow the identity and keeps descent behavior mesh-independent.

use std::f64::consts::PI;
use std::sync::Arc;


use crate::domain::{DomainSpec, OperatorParams, SpectralField};
use crate::error::{Error, Result};
use crate::greens::padded_square;
use crate::nonlin::NonlinearitySpec;
use crate::sampling;

/// Which functional: the unconstrained J or the sign-restricted J+/J-.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SignMode {
    Plain,
    Plus,
    Minus,
}

impl SignMode {
    fn active_value(self, v: f64) -> f64 {
        match self {
            SignMode::Plain => v,
            SignMode::Plus => v.max(0.0),
            SignMode::Minus => v.min(0.0),
        }
    }

    fn active_mask(self, v: f64) -> f64 {
        match self {
            SignMode::Plain => 1.0,
            SignMode::Plus => {
                if v > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SignMode::Minus => {
                if v < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Binds domain, operator parameters, reaction term and sign selector.
#[derive(Clone)]
pub struct EnergyContext {
    domain: Arc<DomainSpec>,
    params: OperatorParams,
    nonlin: NonlinearitySpec,
    sign: SignMode,
    sqrt_sym: Vec<f64>,
    dealias: bool,
    /// Sign multiplier on the Hartree gradient term; a deliberate-fault hook
    /// for the verification suite, 1.0 in normal operation.
    hartree_grad_flip: f64,
}

impl EnergyContext {
    /// Validates the small-amplitude margin `omega + theta_inf < m` before
    /// any solve can run.
    pub fn new(
        domain: &Arc<DomainSpec>,
        params: OperatorParams,
        nonlin: NonlinearitySpec,
    ) -> Result<Self> {
        if nonlin.dimension() != domain.dimension() {
            return Err(Error::InvalidParameter(
                "nonlinearity was built for a different dimension".into(),
            ));
        }
        let sum = params.omega + nonlin.theta_sup();
        if !(sum < params.m.value()) {
            return Err(Error::SmallAmplitudeMargin {
                sum,
                m: params.m.value(),
            });
        }
        let sqrt_sym = domain.sqrt_symbols(params.m);
        Ok(Self {
            domain: Arc::clone(domain),
            params,
            nonlin,
            sign: SignMode::Plain,
            sqrt_sym,
            dealias: false,
            hartree_grad_flip: 1.0,
        })
    }

    pub fn with_sign(&self, sign: SignMode) -> Self {
        let mut ctx = self.clone();
        ctx.sign = sign;
        ctx
    }

    pub fn with_dealiasing(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    /// Flip the sign of the Hartree term in the gradient only (not the
    /// energy). Exists so the verification suite can prove its
    /// finite-difference check catches an inconsistent gradient.
    pub fn with_hartree_gradient_fault(mut self) -> Self {
        self.hartree_grad_flip = -1.0;
        self
    }

    pub fn domain(&self) -> &Arc<DomainSpec> {
        &self.domain
    }

    pub fn params(&self) -> OperatorParams {
        self.params
    }

    pub fn nonlin(&self) -> &NonlinearitySpec {
        &self.nonlin
    }

    pub fn sign(&self) -> SignMode {
        self.sign
    }

    pub(crate) fn sqrt_symbols(&self) -> &[f64] {
        &self.sqrt_sym
    }

    fn active_grid(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&v| self.sign.active_value(v)).collect()
    }

    /// Sine coefficients of `w^2` for the configured product rule.
    fn source_coeffs(&self, w_grid: &[f64]) -> Vec<f64> {
        if self.dealias {
            let w_coeffs = self.domain.forward(w_grid);
            padded_square(&self.domain, &w_coeffs)
        } else {
            let sq: Vec<f64> = w_grid.iter().map(|v| v * v).collect();
            self.domain.forward(&sq)
        }
    }

    /// Energy value; `energy(0) = 0` for every sign mode.
    pub fn energy(&self, u: &SpectralField) -> f64 {
        self.energy_breakdown(u).total
    }

    /// Energy with its constituent integrals (used by the Cerami monitor).
    pub fn energy_breakdown(&self, u: &SpectralField) -> EnergyBreakdown {
        let c = u.coeffs();
        let quadratic: f64 = self
            .sqrt_sym
            .iter()
            .zip(c)
            .map(|(a, ck)| a * ck * ck)
            .sum();
        let l2_sq: f64 = c.iter().map(|ck| ck * ck).sum();
        let w_grid = self.active_grid(u.grid_values());
        let source = self.source_coeffs(&w_grid);
        let quartic: f64 = source
            .iter()
            .zip(self.domain.laplace_eigenvalues())
            .map(|(s, l)| 4.0 * PI * s * s / l)
            .sum();
        let wq = self.domain.quadrature_weight();
        let mut f_integral = 0.0;
        let mut sigma_integral = 0.0;
        for (j, &wj) in w_grid.iter().enumerate() {
            let x = self.domain.node(j);
            f_integral += self.nonlin.big_f(x, wj);
            sigma_integral += self.nonlin.sigma(x, wj);
        }
        f_integral *= wq;
        sigma_integral *= wq;
        let total = 0.5 * quadratic
            - 0.5 * self.params.omega * l2_sq
            - 0.25 * self.params.lambda * quartic
            - f_integral;
        EnergyBreakdown {
            quadratic,
            l2_sq,
            quartic_integral: quartic,
            f_integral,
            sigma_integral,
            total,
        }
    }

    /// Coefficients of the unpreconditioned derivative: `r_k` such that
    /// `J'(u) v = sum_k r_k v_k`.
    pub(crate) fn euclid_residual(&self, u: &SpectralField) -> Vec<f64> {
        let c = u.coeffs();
        let w_grid = self.active_grid(u.grid_values());
        let source = self.source_coeffs(&w_grid);
        let lambdas = self.domain.laplace_eigenvalues();
        let phi_coeffs: Vec<f64> = source
            .iter()
            .zip(lambdas)
            .map(|(s, l)| 4.0 * PI * s / l)
            .collect();
        let phi_grid = self.domain.inverse(&phi_coeffs);
        let lam = self.params.lambda * self.hartree_grad_flip;
        let mut reaction = vec![0.0; w_grid.len()];
        for (j, rj) in reaction.iter_mut().enumerate() {
            let x = self.domain.node(j);
            *rj = lam * phi_grid[j] * w_grid[j] + self.nonlin.f(x, w_grid[j]);
        }
        let reaction_coeffs = self.domain.forward(&reaction);
        (0..c.len())
            .map(|k| {
                self.sqrt_sym[k] * c[k] - self.params.omega * c[k] - reaction_coeffs[k]
            })
            .collect()
    }

    /// Sobolev gradient: the Riesz representative g of J'(u) in the Q-inner
    /// product, `g_k = r_k / sqrt(lambda_k + m^2)`.
    pub fn gradient(&self, u: &SpectralField) -> SpectralField {
        let r = self.euclid_residual(u);
        let coeffs: Vec<f64> = r
            .iter()
            .zip(&self.sqrt_sym)
            .map(|(rk, a)| rk / a)
            .collect();
        SpectralField::from_coeffs(&self.domain, coeffs).expect("finite by construction")
    }

    /// Dual norm of J'(u), equal to the Q-norm of the Sobolev gradient.
    pub fn gradient_dual_norm(&self, u: &SpectralField) -> f64 {
        self.euclid_residual(u)
            .iter()
            .zip(&self.sqrt_sym)
            .map(|(rk, a)| rk * rk / a)
            .sum::<f64>()
            .sqrt()
    }

    /// L^2 norm of the unconstrained stationary-equation residual
    /// `sqrt(-Delta+m^2)u - omega u - lambda <G,u^2> u - f(x,u)`.
    ///
    /// Uses the plain active part regardless of the sign mode; at converged
    /// one-signed critical points the two coincide.
    pub fn residual_stationary(&self, u: &SpectralField) -> f64 {
        let plain = if self.sign == SignMode::Plain {
            self.clone()
        } else {
            self.with_sign(SignMode::Plain)
        };
        plain
            .euclid_residual(u)
            .iter()
            .map(|r| r * r)
            .sum::<f64>()
            .sqrt()
    }

    /// Hessian data at a fixed field, for Newton refinement.
    pub(crate) fn hessian_cache(&self, u: &SpectralField) -> HessianCache {
        let grid = u.grid_values().to_vec();
        let active: Vec<f64> = grid.iter().map(|&v| self.sign.active_value(v)).collect();
        let mask: Vec<f64> = grid.iter().map(|&v| self.sign.active_mask(v)).collect();
        let source = self.source_coeffs(&active);
        let phi_coeffs: Vec<f64> = source
            .iter()
            .zip(self.domain.laplace_eigenvalues())
            .map(|(s, l)| 4.0 * PI * s / l)
            .collect();
        let phi_grid = self.domain.inverse(&phi_coeffs);
        let fprime: Vec<f64> = active
            .iter()
            .enumerate()
            .map(|(j, &wj)| self.nonlin.df(self.domain.node(j), wj))
            .collect();
        HessianCache {
            active,
            mask,
            phi_grid,
            fprime,
        }
    }

    /// Apply the second derivative of the (sign-restricted) energy in
    /// coefficient space: the Jacobian of `euclid_residual`.
    pub(crate) fn hessian_apply(&self, cache: &HessianCache, w: &[f64]) -> Vec<f64> {
        let w_grid = self.domain.inverse(w);
        let mw: Vec<f64> = w_grid
            .iter()
            .zip(&cache.mask)
            .map(|(v, m)| v * m)
            .collect();
        let prod: Vec<f64> = cache.active.iter().zip(&mw).map(|(a, b)| a * b).collect();
        let psi_coeffs: Vec<f64> = self
            .domain
            .forward(&prod)
            .iter()
            .zip(self.domain.laplace_eigenvalues())
            .map(|(s, l)| 4.0 * PI * s / l)
            .collect();
        let psi_grid = self.domain.inverse(&psi_coeffs);
        let lam = self.params.lambda * self.hartree_grad_flip;
        let bracket: Vec<f64> = (0..w_grid.len())
            .map(|j| {
                cache.mask[j]
                    * (2.0 * lam * psi_grid[j] * cache.active[j]
                        + lam * cache.phi_grid[j] * mw[j]
                        + cache.fprime[j] * mw[j])
            })
            .collect();
        let bracket_coeffs = self.domain.forward(&bracket);
        (0..w.len())
            .map(|k| (self.sqrt_sym[k] - self.params.omega) * w[k] - bracket_coeffs[k])
            .collect()
    }

    /// Certify that 0 is a strict local minimum: sample fields of Q-norm rho
    /// and compare the sampled minimum against the analytic lower bound
    /// `c~ rho^2 - (lambda/4) C_G rho^4 - C_eps S_r^r rho^r` built from
    /// measured embedding constants.
    pub fn verify_local_min(&self, rho: f64, count: usize, seed: u64) -> LocalMinCertificate {
        assert!(rho > 0.0 && count >= 1);
        let m = self.params.m;
        let eps = 0.5 * (m.value() - self.params.omega - self.nonlin.theta_sup());
        debug_assert!(eps > 0.0, "context validated at construction");

        // measured constants (inflated 5% so they majorize fresh samples)
        let pool = sampling::estimation_pool(&self.domain, m, 160, seed ^ 0xc0de);
        let mut s_r: f64 = 0.0;
        let mut c_g: f64 = 0.0;
        let r = self.nonlin.growth_exponent().min(6.0);
        for v in &pool {
            let q = v.quadratic_form(m);
            if q <= 0.0 {
                continue;
            }
            s_r = s_r.max(v.lp_norm(r) / q.sqrt());
            c_g = c_g.max(crate::greens::hartree_quartic(v) / (q * q));
            let vp = v.positive_part();
            c_g = c_g.max(crate::greens::hartree_quartic(&vp) / (q * q));
        }
        let (s_r, c_g) = (1.05 * s_r, 1.05 * c_g);

        let c_eps = self.nonlin.joined_bound_constant(eps);
        let shift = (self.params.omega + self.nonlin.theta_sup() + eps).max(0.0);
        let c_tilde = 0.5 * (1.0 - shift / m.value());
        let lambda_pos = self.params.lambda.max(0.0);
        let lower_bound = c_tilde * rho * rho
            - 0.25 * lambda_pos * c_g * rho.powi(4)
            - c_eps * s_r.powf(r) * rho.powf(r);

        let mut sampled_min = f64::INFINITY;
        for i in 0..count {
            let v = sampling::q_isotropic(&self.domain, m, seed.wrapping_add(i as u64));
            let q = v.q_norm(m);
            let v = v.scaled(rho / q);
            sampled_min = sampled_min.min(self.energy(&v));
        }
        let ok = lower_bound > 0.0 && sampled_min > 0.0 && sampled_min + 1e-12 >= lower_bound;
        LocalMinCertificate {
            rho,
            sampled_min,
            lower_bound,
            c_tilde,
            c_g_hat: c_g,
            s_r_hat: s_r,
            c_eps,
            epsilon: eps,
            ok,
            samples: count,
            seed,
        }
    }

    /// Tabulate `J(t v)` on a geometric ray and locate the first sign
    /// change, bisection-refined. Superquadratic dominance drives the ray to
    /// minus infinity for lambda > 0; with no crossing inside `t_max` the
    /// scan reports `crossing: None` (a geometry outcome, not an error).
    pub fn ray_divergence(&self, v: &SpectralField, t_max: f64) -> Result<RayScan> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ray bound must be positive and finite, got {t_max}"
            )));
        }
        let grid = v.grid_values();
        let l2 = v.l2_norm();
        if l2 == 0.0 {
            return Err(Error::InvalidParameter("ray seed must be nonzero".into()));
        }
        let tol = 1e-12 * v.linf_norm();
        match self.sign {
            SignMode::Plus => {
                if grid.iter().any(|&g| g < -tol) {
                    return Err(Error::InvalidParameter(
                        "ray seed for the positive functional must be nonnegative".into(),
                    ));
                }
            }
            SignMode::Minus => {
                if grid.iter().any(|&g| g > tol) {
                    return Err(Error::InvalidParameter(
                        "ray seed for the negative functional must be nonpositive".into(),
                    ));
                }
            }
            SignMode::Plain => {}
        }
        let mut samples = Vec::new();
        let mut crossing = None;
        let mut prev_t = 0.0;
        let mut t = 1e-2;
        while t <= t_max {
            let j = self.energy(&v.scaled(t));
            samples.push((t, j));
            if j < 0.0 {
                // refine the first crossing by bisection
                let (mut lo, mut hi) = (prev_t, t);
                while hi - lo > 1e-6 * hi.max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    if self.energy(&v.scaled(mid)) < 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                crossing = Some(hi);
                break;
            }
            prev_t = t;
            t *= 1.3;
        }
        Ok(RayScan { samples, crossing })
    }
}

/// Energy value with constituent integrals of the active part.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyBreakdown {
    pub quadratic: f64,
    pub l2_sq: f64,
    pub quartic_integral: f64,
    pub f_integral: f64,
    pub sigma_integral: f64,
    pub total: f64,
}

pub(crate) struct HessianCache {
    active: Vec<f64>,
    mask: Vec<f64>,
    phi_grid: Vec<f64>,
    fprime: Vec<f64>,
}

/// Result of the strict-local-minimum certificate at radius rho.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LocalMinCertificate {
    pub rho: f64,
    pub sampled_min: f64,
    pub lower_bound: f64,
    pub c_tilde: f64,
    pub c_g_hat: f64,
    pub s_r_hat: f64,
    pub c_eps: f64,
    pub epsilon: f64,
    /// Positive analytic bound and sampled values above it. A false value at
    /// large rho is the expected geometry boundary, not an error.
    pub ok: bool,
    pub samples: usize,
    pub seed: u64,
}

/// Ray table `(t, J(t v))` with the refined first zero crossing.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RayScan {
    pub samples: Vec<(f64, f64)>,
    pub crossing: Option<f64>,
}
