//! Shared helpers for the integration suites, including the independent
//! Nehari-refinement oracle used to cross-validate mountain-pass levels.

use std::sync::Arc;

use hartree_core::{DomainSpec, EnergyContext, SpectralField};

/// Maximize `t -> J(t u)` over t > 0 by bracketing on a geometric grid and
/// golden-section refinement. The ray map has a unique interior maximum for
/// the superquadratic reactions used here.
pub fn ray_argmax(ctx: &EnergyContext, u: &SpectralField, t_hi: f64) -> f64 {
    let j = |t: f64| ctx.energy(&u.scaled(t));
    let mut ts = vec![0.0];
    let mut js = vec![0.0];
    let mut t = 1e-3;
    let mut best = (0usize, 0.0f64);
    while t <= t_hi {
        ts.push(t);
        js.push(j(t));
        if *js.last().unwrap() > best.1 {
            best = (ts.len() - 1, *js.last().unwrap());
        }
        t *= 1.4;
    }
    let hi_idx = (best.0 + 1).min(ts.len() - 1);
    let (mut a, mut b) = (ts[best.0.saturating_sub(1)], ts[hi_idx]);
    // golden-section for the maximum
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut fc, mut fd) = (j(c), j(d));
    for _ in 0..200 {
        if b - a < 1e-12 * b.max(1.0) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = j(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = j(d);
        }
    }
    0.5 * (a + b)
}

/// Minimize the energy over the ray-maximized (Nehari-type) constraint
/// `J'(u) u = 0` by plain Sobolev-gradient descent with ray rescaling after
/// every step. Independent of the path-deformation/Newton solver; shares
/// only the energy and gradient evaluations it certifies.
pub fn nehari_refine(
    ctx: &EnergyContext,
    seed: &SpectralField,
    max_iters: usize,
) -> (f64, SpectralField) {
    let m = ctx.params().m;
    let t0 = ray_argmax(ctx, seed, 1e3);
    let mut v = seed.scaled(t0);
    let mut energy = ctx.energy(&v);
    let mut step = 0.5;
    for _ in 0..max_iters {
        let g = ctx.gradient(&v);
        let g_sq = g.quadratic_form(m);
        if g_sq.sqrt() <= 1e-10 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let cand = SpectralField::lin_comb(1.0, &v, -step, &g).unwrap();
            let t = ray_argmax(ctx, &cand, 1e3);
            let cand = cand.scaled(t);
            let e_new = ctx.energy(&cand);
            if e_new <= energy - 1e-4 * step * g_sq {
                v = cand;
                energy = e_new;
                step = (step * 1.5).min(2.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (energy, v)
}

pub fn grid_of(domain: &Arc<DomainSpec>, f: impl Fn(&[f64]) -> f64) -> SpectralField {
    let values: Vec<f64> = (0..domain.len()).map(|j| f(domain.node(j))).collect();
    SpectralField::from_grid(domain, &values).unwrap()
}
