//! Mountain-pass critical points by path deformation.
//!
//! A discrete path from 0 to a terminal field with negative energy is
//! deformed sweep by sweep: the maximal-energy node descends along its
//! Sobolev gradient (Armijo backtracking), the path is re-parametrized by
//! Q-arc-length when nodes drift apart, and the hump of the path settles
//! onto the pass. Pure node descent localizes the saddle but its gradient
//! floor scales with the node spacing, so once the sweep phase stalls a
//! dense Newton stage drives the stationary residual to the configured
//! tolerance from the max node. Per-iterate Cerami quantities
//! `(1 + |u_n|) |J'(u_n)|` and the sigma / Hartree integrals are recorded
//! along the way.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::domain::{DomainSpec, SpectralField};
use crate::energy::{EnergyContext, SignMode};
use crate::error::{Error, Result};

/// Largest dense Newton system we are willing to assemble.
const MAX_DENSE: usize = 4096;
/// Energy comparisons treat differences below this as ties.
const TIE_TOL: f64 = 1e-12;

/// Tuning knobs of the path solver.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveConfig {
    /// Number of path nodes P (>= 3).
    pub path_nodes: usize,
    /// Q-metric gradient tolerance declaring a critical point.
    pub grad_tol: f64,
    /// Hard cap on deformation sweeps.
    pub max_sweeps: usize,
    /// Gradient level at which the Newton stage takes over early.
    pub switch_grad_tol: f64,
    /// Sweeps without measurable descent before switching to Newton.
    pub stall_window: usize,
    /// Relative per-sweep descent below which a sweep counts as stalled.
    pub stall_rel_tol: f64,
    /// Armijo slope fraction.
    pub armijo_c: f64,
    /// Backtracking halvings before a line search gives up.
    pub ls_max_backtracks: u32,
    /// Ray-search bound for the terminal endpoint.
    pub t_max: f64,
    /// Radius and sample count of the strict-local-minimum certificate.
    pub certificate_rho: f64,
    pub certificate_samples: usize,
    /// Newton stage: max steps per attempt and max attempts.
    pub polish_max_steps: usize,
    pub polish_attempts: usize,
    /// Seed for certificate sampling.
    pub seed: u64,
    /// Use the 3/2-rule padded square in all energy evaluations.
    pub dealias: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            path_nodes: 41,
            grad_tol: 1e-8,
            max_sweeps: 100_000,
            switch_grad_tol: 1e-4,
            stall_window: 40,
            stall_rel_tol: 1e-10,
            armijo_c: 1e-4,
            ls_max_backtracks: 45,
            t_max: 1e3,
            certificate_rho: 0.1,
            certificate_samples: 48,
            polish_max_steps: 40,
            polish_attempts: 3,
            seed: 0,
            dealias: false,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.path_nodes < 3 {
            return Err(Error::InvalidParameter(
                "path needs at least 3 nodes".into(),
            ));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "gradient tolerance must be positive".into(),
            ));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParameter("sweep cap must be positive".into()));
        }
        Ok(())
    }
}

/// Per-iterate compactness quantities of the descent stream.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct CeramiDiagnostics {
    pub q_norms: Vec<f64>,
    pub dual_norms: Vec<f64>,
    /// `(1 + |u_n|_Q) |J'(u_n)|_*`
    pub products: Vec<f64>,
    pub energies: Vec<f64>,
    /// `int sigma(x, w(u_n)) dx` of the sign-active part
    pub sigma_integrals: Vec<f64>,
    /// `int <G, w^2> w^2 dx` of the sign-active part
    pub quartic_integrals: Vec<f64>,
    /// Product series grows steadily instead of decaying.
    pub product_diverging: bool,
    /// Norms run away while the energy stays in a band; would contradict
    /// the boundedness of Cerami sequences, so it is flagged as a numerical
    /// pathology.
    pub norm_diverging_bounded_energy: bool,
}

impl CeramiDiagnostics {
    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    fn push(&mut self, q_norm: f64, dual: f64, energy: f64, sigma: f64, quartic: f64) {
        self.q_norms.push(q_norm);
        self.dual_norms.push(dual);
        self.products.push((1.0 + q_norm) * dual);
        self.energies.push(energy);
        self.sigma_integrals.push(sigma);
        self.quartic_integrals.push(quartic);
    }

    fn record(&mut self, ctx: &EnergyContext, u: &SpectralField) {
        let b = ctx.energy_breakdown(u);
        let dual = ctx.gradient_dual_norm(u);
        self.push(
            u.q_norm(ctx.params().m),
            dual,
            b.total,
            b.sigma_integral,
            b.quartic_integral,
        );
    }

    fn finalize_flags(&mut self) {
        let n = self.len();
        if n < 6 {
            return;
        }
        let k = (n / 4).max(8).min(n - 1);
        // divergence = still rising at the end AND an order of magnitude
        // above the series low point
        let tail = &self.products[n - k..];
        let increasing = tail.windows(2).all(|w| w[1] > w[0]);
        let low = self.products.iter().cloned().fold(f64::INFINITY, f64::min);
        self.product_diverging = increasing && tail[k - 1] > 10.0 * (low + f64::MIN_POSITIVE);

        let norms = &self.q_norms[n - k..];
        let energies = &self.energies[n - k..];
        let norm_low = self.q_norms.iter().cloned().fold(f64::INFINITY, f64::min);
        let norm_up =
            norms.windows(2).all(|w| w[1] > w[0]) && norms[k - 1] > 1.5 * (norm_low + 1e-300);
        let e_lo = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let e_hi = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e_mid = 0.5 * (e_lo + e_hi);
        let bounded = (e_hi - e_lo) <= 0.01 * (1.0 + e_mid.abs());
        self.norm_diverging_bounded_energy = norm_up && bounded;
    }
}

/// Compute Cerami diagnostics for an explicit iterate stream.
pub fn cerami_monitor<'a, I>(ctx: &EnergyContext, iterates: I) -> CeramiDiagnostics
where
    I: IntoIterator<Item = &'a SpectralField>,
{
    let mut diag = CeramiDiagnostics::default();
    for u in iterates {
        diag.record(ctx, u);
    }
    diag.finalize_flags();
    diag
}

/// Discrete admissible path: `p_0 = 0`, terminal node below zero energy.
#[derive(Debug, Clone)]
pub struct PathState {
    pub nodes: Vec<SpectralField>,
    pub energies: Vec<f64>,
}

impl PathState {
    fn init(ctx: &EnergyContext, endpoint: &SpectralField, count: usize) -> Self {
        let mut nodes = Vec::with_capacity(count);
        let mut energies = Vec::with_capacity(count);
        for i in 0..count {
            let t = i as f64 / (count - 1) as f64;
            let node = endpoint.scaled(t);
            energies.push(ctx.energy(&node));
            nodes.push(node);
        }
        Self { nodes, energies }
    }

    /// Lowest index attaining the maximum within the tie tolerance.
    pub fn max_index(&self) -> usize {
        let max = self.energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.energies
            .iter()
            .position(|&e| e >= max - TIE_TOL)
            .expect("nonempty path")
    }

    pub fn max_energy(&self) -> f64 {
        self.energies[self.max_index()]
    }

    /// Mean Q-distance from node `i` to its neighbors; the deformation trust
    /// region, so a single sweep cannot throw the hump node across a ridge.
    fn local_spacing(&self, ctx: &EnergyContext, i: usize) -> f64 {
        let m = ctx.params().m;
        let mut acc = 0.0;
        let mut cnt = 0.0;
        if i > 0 {
            let d = SpectralField::lin_comb(1.0, &self.nodes[i], -1.0, &self.nodes[i - 1])
                .expect("same domain");
            acc += d.q_norm(m);
            cnt += 1.0;
        }
        if i + 1 < self.nodes.len() {
            let d = SpectralField::lin_comb(1.0, &self.nodes[i + 1], -1.0, &self.nodes[i])
                .expect("same domain");
            acc += d.q_norm(m);
            cnt += 1.0;
        }
        acc / cnt
    }

    /// Redistribute interior nodes to equal Q-arc-length. Skipped (returns
    /// false) when the spacing is already essentially uniform. Interpolating
    /// across a ridge segment can raise the max-node energy; that is the
    /// mechanism that repairs a path whose hump node descended too far.
    fn reparametrize(&mut self, ctx: &EnergyContext) -> bool {
        let m = ctx.params().m;
        let p = self.nodes.len();
        let mut seg = Vec::with_capacity(p - 1);
        for i in 0..p - 1 {
            let d = SpectralField::lin_comb(1.0, &self.nodes[i + 1], -1.0, &self.nodes[i])
                .expect("same domain");
            seg.push(d.q_norm(m).max(1e-300));
        }
        let total: f64 = seg.iter().sum();
        let max_seg = seg.iter().cloned().fold(0.0, f64::max);
        let min_seg = seg.iter().cloned().fold(f64::INFINITY, f64::min);
        if max_seg <= 1.2 * min_seg {
            return false;
        }
        let mut cum = vec![0.0];
        for s in &seg {
            cum.push(cum.last().unwrap() + s);
        }
        let mut new_nodes = Vec::with_capacity(p);
        new_nodes.push(self.nodes[0].clone());
        let mut seg_idx = 0;
        for i in 1..p - 1 {
            let target = total * i as f64 / (p - 1) as f64;
            while seg_idx + 2 < cum.len() && cum[seg_idx + 1] < target {
                seg_idx += 1;
            }
            let local = (target - cum[seg_idx]) / seg[seg_idx];
            let node = SpectralField::lin_comb(
                1.0 - local,
                &self.nodes[seg_idx],
                local,
                &self.nodes[seg_idx + 1],
            )
            .expect("same domain");
            new_nodes.push(node);
        }
        new_nodes.push(self.nodes[p - 1].clone());
        let new_energies: Vec<f64> = new_nodes.iter().map(|u| ctx.energy(u)).collect();
        self.nodes = new_nodes;
        self.energies = new_energies;
        true
    }
}

/// Terminal field of an admissible path.
#[derive(Debug, Clone)]
pub struct Endpoint {
    pub field: SpectralField,
    /// First zero crossing of the ray, refined by bisection.
    pub t_crossing: f64,
    /// Scale actually used for the terminal node (pushed past the crossing).
    pub t_used: f64,
}

/// Scale a nonnegative (for J+) or nonpositive (for J-) seed until the
/// energy turns negative. Failure to cross inside `t_max` is the geometry
/// failing, reported as an error distinct from non-convergence.
pub fn find_endpoint(
    ctx: &EnergyContext,
    v0: &SpectralField,
    config: &SolveConfig,
) -> Result<Endpoint> {
    let scan = ctx.ray_divergence(v0, config.t_max)?;
    let t_crossing = scan.crossing.ok_or_else(|| {
        Error::GeometryFailure(format!(
            "energy stays nonnegative along the ray up to t = {}",
            config.t_max
        ))
    })?;
    // push past the crossing so the terminal energy is solidly negative
    let mut t_used = 1.25 * t_crossing;
    let mut field = v0.scaled(t_used);
    if ctx.energy(&field) >= 0.0 {
        t_used = t_crossing;
        field = v0.scaled(t_used);
        if ctx.energy(&field) >= 0.0 {
            return Err(Error::GeometryFailure(
                "refined crossing did not produce negative energy".into(),
            ));
        }
    }
    Ok(Endpoint {
        field,
        t_crossing,
        t_used,
    })
}

/// Default seed direction: the first eigenfunction, mirrored for J-.
pub fn default_seed(ctx: &EnergyContext) -> SpectralField {
    let phi1 = SpectralField::eigenfunction(ctx.domain(), ctx.domain().multi_index(0));
    match ctx.sign() {
        SignMode::Minus => phi1.scaled(-1.0).negative_part_signed(),
        _ => phi1.positive_part(),
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LpNorms {
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    pub linf: f64,
}

/// Everything recorded about one mountain-pass solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveReport {
    pub sign: SignMode,
    pub dimension: usize,
    pub n: usize,
    pub critical_value: f64,
    pub gradient_norm: f64,
    pub residual_stationary: f64,
    pub sweeps: usize,
    pub polish_steps: usize,
    pub converged: bool,
    pub sign_certified: bool,
    /// lambda > 0, the regime covered by the two-solutions existence theory;
    /// other couplings are solved on a best-effort basis.
    pub lambda_within_theory: bool,
    pub min_value: f64,
    pub max_value: f64,
    pub lp_norms: LpNorms,
    pub eta_lower_bound: f64,
    pub eta_sampled_min: f64,
    pub endpoint_crossing: f64,
    pub endpoint_scale: f64,
    pub path_energies: Vec<f64>,
    pub max_energy_series: Vec<f64>,
    pub cerami: CeramiDiagnostics,
    pub seed: u64,
    pub refinement: Option<DriftReport>,
}

enum PolishOutcome {
    Converged(SpectralField, usize),
    Failed(usize),
}

/// Dense Newton on the stationary system from a starting point inside the
/// saddle basin. Damped steps must shrink the Euclidean residual.
fn newton_polish(
    ctx: &EnergyContext,
    start: &SpectralField,
    config: &SolveConfig,
    diag: &mut CeramiDiagnostics,
) -> PolishOutcome {
    let dim = ctx.domain().len();
    if dim > MAX_DENSE {
        return PolishOutcome::Failed(0);
    }
    let target = config.grad_tol * 0.02;
    let mut u = start.clone();
    let mut steps = 0;
    for _ in 0..config.polish_max_steps {
        let r = ctx.euclid_residual(&u);
        let rnorm: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dual: f64 = r
            .iter()
            .zip(ctx.sqrt_symbols())
            .map(|(rk, a)| rk * rk / a)
            .sum::<f64>()
            .sqrt();
        if steps > 0 {
            diag.record(ctx, &u);
        }
        if dual <= target {
            return PolishOutcome::Converged(u, steps);
        }
        let cache = ctx.hessian_cache(&u);
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for k in 0..dim {
            e[k] = 1.0;
            let col = ctx.hessian_apply(&cache, &e);
            e[k] = 0.0;
            for (i, v) in col.iter().enumerate() {
                h[(i, k)] = *v;
            }
        }
        let rhs = DVector::from_iterator(dim, r.iter().map(|v| -v));
        let delta = match h.lu().solve(&rhs) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => return PolishOutcome::Failed(steps),
        };
        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..25 {
            let coeffs: Vec<f64> = u
                .coeffs()
                .iter()
                .zip(delta.iter())
                .map(|(c, d)| c + scale * d)
                .collect();
            let cand = SpectralField::from_coeffs(ctx.domain(), coeffs);
            let cand = match cand {
                Ok(c) => c,
                Err(_) => {
                    scale *= 0.5;
                    continue;
                }
            };
            let rn: f64 = ctx
                .euclid_residual(&cand)
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            if rn < rnorm * (1.0 - 1e-4 * scale) {
                u = cand;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return PolishOutcome::Failed(steps);
        }
        steps += 1;
    }
    // cap reached; accept if the tolerance (not the tighter target) is met
    let dual = ctx.gradient_dual_norm(&u);
    diag.record(ctx, &u);
    if dual <= config.grad_tol {
        PolishOutcome::Converged(u, steps)
    } else {
        PolishOutcome::Failed(steps)
    }
}

fn sign_purity(ctx: &EnergyContext, u: &SpectralField, tol: f64) -> bool {
    let m = ctx.params().m;
    match ctx.sign() {
        SignMode::Plain => true,
        SignMode::Plus => {
            let neg = u.negative_part_signed();
            let interior_min = u.grid_values().iter().cloned().fold(f64::INFINITY, f64::min);
            neg.q_norm(m) <= 10.0 * tol && interior_min > 0.0
        }
        SignMode::Minus => {
            let pos = u.positive_part();
            let interior_max = u
                .grid_values()
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            pos.q_norm(m) <= 10.0 * tol && interior_max < 0.0
        }
    }
}

/// Run the mountain-pass search with the default seed direction.
pub fn mountain_pass(
    ctx: &EnergyContext,
    config: &SolveConfig,
) -> Result<(SpectralField, SolveReport)> {
    mountain_pass_with_seed(ctx, &default_seed(ctx), config)
}

/// Run the mountain-pass search from a caller-supplied seed direction.
pub fn mountain_pass_with_seed(
    ctx: &EnergyContext,
    v0: &SpectralField,
    config: &SolveConfig,
) -> Result<(SpectralField, SolveReport)> {
    config.validate()?;
    let ctx = if config.dealias {
        ctx.clone().with_dealiasing(true)
    } else {
        ctx.clone()
    };
    let m = ctx.params().m;

    let cert = ctx.verify_local_min(
        config.certificate_rho,
        config.certificate_samples,
        config.seed,
    );
    if !cert.ok {
        return Err(Error::GeometryFailure(format!(
            "no strict local minimum certificate at rho = {}: sampled min {:.3e}, bound {:.3e}",
            cert.rho, cert.sampled_min, cert.lower_bound
        )));
    }
    let endpoint = find_endpoint(&ctx, v0, config)?;

    let mut path = PathState::init(&ctx, &endpoint.field, config.path_nodes);
    let mut diag = CeramiDiagnostics::default();
    let mut max_series = Vec::new();
    let mut best: Option<SpectralField> = None;
    let mut step_init = 1.0_f64;
    let mut sweeps = 0;
    let mut polish_steps = 0;
    let mut stall_count = 0;
    let mut last_max = f64::INFINITY;
    let mut polish_tries = 0;
    let mut solution: Option<SpectralField> = None;

    while sweeps < config.max_sweeps {
        sweeps += 1;
        let idx = path.max_index();
        if idx == 0 || idx == path.nodes.len() - 1 {
            return Err(Error::GeometryFailure(
                "path maximum sits on an endpoint".into(),
            ));
        }
        let u = path.nodes[idx].clone();
        let e_u = path.energies[idx];
        let g = ctx.gradient(&u);
        let g_sq = g.quadratic_form(m);
        let g_norm = g_sq.sqrt();
        best = Some(u.clone());

        if g_norm <= config.grad_tol {
            diag.record(&ctx, &u);
            solution = Some(u);
            break;
        }

        // Armijo backtracking along the negative Sobolev gradient
        // (directional derivative -|g|_Q^2), with the initial step capped by
        // the local node spacing so the node cannot leave the hump region in
        // a single sweep.
        let spacing = path.local_spacing(&ctx, idx);
        let mut step = step_init.min(0.5 * spacing / g_norm).max(1e-14);
        let mut moved = None;
        for _ in 0..config.ls_max_backtracks {
            let cand = SpectralField::lin_comb(1.0, &u, -step, &g).expect("same domain");
            let e_new = ctx.energy(&cand);
            if e_new <= e_u - config.armijo_c * step * g_sq {
                moved = Some((cand, e_new));
                break;
            }
            step *= 0.5;
        }

        let stalled = match moved {
            Some((cand, e_new)) => {
                step_init = (step * 2.0).clamp(1e-12, 8.0);
                path.nodes[idx] = cand;
                path.energies[idx] = e_new;
                // deformation never raises the hump: all other nodes kept
                debug_assert!(path.max_energy() <= e_u + TIE_TOL);
                let b = ctx.energy_breakdown(&path.nodes[idx]);
                let dual = ctx.gradient_dual_norm(&path.nodes[idx]);
                diag.push(
                    path.nodes[idx].q_norm(m),
                    dual,
                    b.total,
                    b.sigma_integral,
                    b.quartic_integral,
                );

                max_series.push(path.max_energy());
                path.reparametrize(&ctx);
                let now_max = path.max_energy();
                let progressed = last_max - now_max > config.stall_rel_tol * (1.0 + now_max.abs());
                last_max = now_max;
                if progressed {
                    stall_count = 0;
                } else {
                    stall_count += 1;
                }
                stall_count >= config.stall_window
            }
            None => true, // line search exhausted: descent has bottomed out
        };

        let switch = g_norm <= config.switch_grad_tol || stalled;
        if switch && sweeps >= 8 && polish_tries < config.polish_attempts {
            polish_tries += 1;
            stall_count = 0;
            let start_idx = path.max_index();
            let start = path.nodes[start_idx].clone();
            match newton_polish(&ctx, &start, config, &mut diag) {
                PolishOutcome::Converged(u_star, steps) => {
                    polish_steps += steps;
                    let j_star = ctx.energy(&u_star);
                    let nontrivial = u_star.q_norm(m) >= 10.0 * config.grad_tol;
                    // the node maximum undershoots the true pass level by
                    // O(spacing^2), so allow a generous band above the hump
                    // while still rejecting convergence to higher critical
                    // levels (those sit far above the pass)
                    let near_hump = j_star <= 1.25 * path.max_energy() + 0.05;
                    if nontrivial && j_star > 0.0 && near_hump {
                        solution = Some(u_star);
                        break;
                    }
                    // converged to the wrong critical point; keep sweeping
                    best = Some(u_star);
                }
                PolishOutcome::Failed(steps) => {
                    polish_steps += steps;
                }
            }
        }
    }

    let converged_field = solution.is_some();
    let u_final = solution.or(best).ok_or_else(|| {
        Error::Unconverged("no iterate produced".into())
    })?;
    diag.finalize_flags();

    let grad_final = ctx.gradient_dual_norm(&u_final);
    let resid_final = ctx.residual_stationary(&u_final);
    let sign_ok = sign_purity(&ctx, &u_final, config.grad_tol);
    let grid = u_final.grid_values();
    let report = SolveReport {
        sign: ctx.sign(),
        dimension: ctx.domain().dimension().as_usize(),
        n: ctx.domain().points_per_axis(),
        critical_value: ctx.energy(&u_final),
        gradient_norm: grad_final,
        residual_stationary: resid_final,
        sweeps,
        polish_steps,
        converged: converged_field
            && grad_final <= config.grad_tol
            && sign_ok
            && resid_final <= 10.0 * config.grad_tol.max(1e-12),
        sign_certified: sign_ok,
        lambda_within_theory: ctx.params().lambda > 0.0,
        min_value: grid.iter().cloned().fold(f64::INFINITY, f64::min),
        max_value: grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        lp_norms: LpNorms {
            l1: u_final.lp_norm(1.0),
            l2: u_final.l2_norm(),
            l4: u_final.lp_norm(4.0),
            linf: u_final.linf_norm(),
        },
        eta_lower_bound: cert.lower_bound,
        eta_sampled_min: cert.sampled_min,
        endpoint_crossing: endpoint.t_crossing,
        endpoint_scale: endpoint.t_used,
        path_energies: path.energies.clone(),
        max_energy_series: max_series,
        cerami: diag,
        seed: config.seed,
        refinement: None,
    };
    Ok((u_final, report))
}

/// Outcome of the two sign-constrained solves.
#[derive(Debug)]
pub struct BothSigns {
    pub u_plus: SpectralField,
    pub report_plus: SolveReport,
    pub u_minus: SpectralField,
    pub report_minus: SolveReport,
    /// `max_x |u_plus(x) + u_minus(x)|`; zero for reactions even in s.
    pub mirror_deviation: f64,
}

/// Find the positive and the negative mountain-pass solution.
pub fn solve_both_signs(ctx: &EnergyContext, config: &SolveConfig) -> Result<BothSigns> {
    let (u_plus, report_plus) = mountain_pass(&ctx.with_sign(SignMode::Plus), config)?;
    let (u_minus, report_minus) = mountain_pass(&ctx.with_sign(SignMode::Minus), config)?;
    let mirror_deviation = u_plus
        .grid_values()
        .iter()
        .zip(u_minus.grid_values())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max);
    Ok(BothSigns {
        u_plus,
        report_plus,
        u_minus,
        report_minus,
        mirror_deviation,
    })
}

/// Discretization-independence report for a converged solution.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DriftReport {
    pub coarse_n: usize,
    pub fine_n: usize,
    pub energy_drift: f64,
    pub l2_drift: f64,
    pub linf_drift: f64,
    pub fine_converged: bool,
    pub fine_critical_value: f64,
}

/// Embed coarse coefficients into the refined mode set (exact prolongation:
/// the eigenfunctions of the coarse grid are a subset of the fine ones).
fn prolong(coarse: &SpectralField, fine_dom: &Arc<DomainSpec>) -> SpectralField {
    let n = coarse.domain().points_per_axis();
    let nf = fine_dom.points_per_axis();
    let mut coeffs = vec![0.0; fine_dom.len()];
    match fine_dom.dimension() {
        crate::domain::Dimension::One => {
            coeffs[..n].copy_from_slice(coarse.coeffs());
        }
        crate::domain::Dimension::Two => {
            for k1 in 0..n {
                coeffs[k1 * nf..k1 * nf + n]
                    .copy_from_slice(&coarse.coeffs()[k1 * n..(k1 + 1) * n]);
            }
        }
    }
    SpectralField::from_coeffs(fine_dom, coeffs).expect("finite by construction")
}

/// Re-solve at the doubled resolution (2n+1 preserves grid nesting) from the
/// prolonged field and report the drift of the critical value and the field.
pub fn refine_and_compare(
    u0: &SpectralField,
    ctx: &EnergyContext,
    config: &SolveConfig,
) -> Result<DriftReport> {
    let m = ctx.params().m;
    let trivial = u0.q_norm(m) < 10.0 * config.grad_tol;
    let purely_quadratic = ctx.params().lambda == 0.0 && ctx.nonlin().is_zero();
    if trivial && !purely_quadratic {
        return Err(Error::InvalidParameter(
            "refinement input is the trivial field, not a mountain-pass point".into(),
        ));
    }
    if !trivial && ctx.gradient_dual_norm(u0) > 1e-4 {
        return Err(Error::InvalidParameter(
            "refinement input is not close to a critical point".into(),
        ));
    }
    let n = u0.domain().points_per_axis();
    let fine_n = 2 * n + 1;
    let fine_dom = DomainSpec::with_dimension(u0.domain().dimension(), fine_n);
    let fine_ctx = EnergyContext::new(&fine_dom, ctx.params(), ctx.nonlin().clone())?
        .with_sign(ctx.sign());
    let seed = prolong(u0, &fine_dom);
    let coarse_energy = ctx.energy(u0);

    let mut diag = CeramiDiagnostics::default();
    let (fine, fine_converged) = match newton_polish(&fine_ctx, &seed, config, &mut diag) {
        PolishOutcome::Converged(u, _) => (u, true),
        PolishOutcome::Failed(_) => (seed.clone(), false),
    };
    let fine_energy = fine_ctx.energy(&fine);

    let seed_coeffs = seed.coeffs();
    let diff_sq: f64 = fine
        .coeffs()
        .iter()
        .zip(seed_coeffs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let base = u0.l2_norm().max(1e-300);
    let linf_diff = fine
        .grid_values()
        .iter()
        .zip(seed.grid_values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let linf_base = u0.linf_norm().max(1e-300);
    Ok(DriftReport {
        coarse_n: n,
        fine_n,
        energy_drift: (fine_energy - coarse_energy).abs(),
        l2_drift: diff_sq.sqrt() / base,
        linf_drift: linf_diff / linf_base,
        fine_converged,
        fine_critical_value: fine_energy,
    })
}
