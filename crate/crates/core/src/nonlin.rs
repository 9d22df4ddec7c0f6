//! The reaction term f, its primitive F, the quantity
//! `sigma(x,s) = f(x,s) s - 2 F(x,s)`, and executable checkers for the
//! structural hypotheses of the superlinear problem:
//!
//! * growth: `|f(x,s)| <= a(x) + c |s|^{r-1}` with subcritical r,
//! * superquadratic potential: `F(x,s)/s^2 -> +inf` as `|s| -> inf`,
//! * quasi-monotone sigma: `sigma(x,s) <= sigma(x,t) + beta*(x)` for ordered
//!   s, t of equal sign,
//! * small-amplitude bound: `limsup_{s->0} F(x,s)/s^2 <= theta(x)/2` with
//!   `|theta|_inf < m - omega`,
//!
//! together with a checker for the Ambrosetti-Rabinowitz condition
//! `0 < mu F(x,s) <= s f(x,s)`, which the log-type built-in violates for
//! every mu > 2 while satisfying all hypotheses above.
//!
//! Verdicts come from seeded sampling plus deterministic scan grids, not
//! symbolic proof; an `Inconclusive` state keeps slow-growth cases honest.
//! Sampling cannot rule out violations on null sets of x; verdicts are
//! statements about the scanned points only.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::Dimension;
use crate::error::{Error, Result};

pub type XFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinKind {
    Power,
    LogLike,
    Zero,
    Custom,
}

/// Pointwise reaction term with growth metadata.
#[derive(Clone)]
pub struct NonlinearitySpec {
    name: String,
    kind: NonlinKind,
    dim: Dimension,
    f: SFn,
    big_f: SFn,
    df: SFn,
    r: f64,
    c: f64,
    a: XFn,
    a_sup: f64,
    theta: XFn,
    theta_sup: f64,
    beta_star: XFn,
    claims_ar: bool,
}

impl std::fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearitySpec")
            .field("name", &self.name)
            .field("r", &self.r)
            .field("claims_ar", &self.claims_ar)
            .finish()
    }
}

/// Growth metadata passed to [`NonlinearitySpec::custom`].
pub struct GrowthData {
    pub r: f64,
    pub c: f64,
    pub a: XFn,
    pub a_sup: f64,
    pub theta: XFn,
    pub theta_sup: f64,
    pub beta_star: XFn,
}

fn const_fn(v: f64) -> XFn {
    Arc::new(move |_x: &[f64]| v)
}

impl NonlinearitySpec {
    fn validate_r(r: f64, dim: Dimension) -> Result<()> {
        let upper = dim.critical_exponent();
        if !(r > 2.0) || !(r < upper) {
            return Err(Error::GrowthExponentOutOfRange { r, upper });
        }
        Ok(())
    }

    /// Pure power reaction `f = |s|^{r-2} s`; satisfies the
    /// Ambrosetti-Rabinowitz condition with mu = r.
    pub fn power(r: f64, dim: Dimension) -> Result<Self> {
        Self::validate_r(r, dim)?;
        Ok(Self {
            name: format!("power({r})"),
            kind: NonlinKind::Power,
            dim,
            f: Arc::new(move |_x, s| s.abs().powf(r - 2.0) * s),
            big_f: Arc::new(move |_x, s| s.abs().powf(r) / r),
            df: Arc::new(move |_x, s| (r - 1.0) * s.abs().powf(r - 2.0)),
            r,
            c: 1.0,
            a: const_fn(0.0),
            a_sup: 0.0,
            theta: const_fn(0.0),
            theta_sup: 0.0,
            beta_star: const_fn(0.0),
            claims_ar: true,
        })
    }

    /// Logarithmically superquadratic reaction `f = s ln(1 + s^2)`.
    ///
    /// `F(s) = ((1+s^2) ln(1+s^2) - s^2)/2` grows faster than any multiple of
    /// `s^2` but slower than every power `|s|^mu` with mu > 2, so the
    /// Ambrosetti-Rabinowitz inequality eventually fails for every mu > 2,
    /// while `sigma(s) = s^2 - ln(1+s^2)` is even and increasing in `|s|`
    /// (quasi-monotone with zero slack).
    pub fn loglike(dim: Dimension) -> Self {
        Self {
            name: "loglike".into(),
            kind: NonlinKind::LogLike,
            dim,
            f: Arc::new(|_x, s| s * (s * s).ln_1p()),
            big_f: Arc::new(|_x, s| {
                let l = (s * s).ln_1p();
                0.5 * ((1.0 + s * s) * l - s * s)
            }),
            df: Arc::new(|_x, s| (s * s).ln_1p() + 2.0 * s * s / (1.0 + s * s)),
            r: 3.0,
            c: 1.0,
            a: const_fn(1.0),
            a_sup: 1.0,
            theta: const_fn(0.0),
            theta_sup: 0.0,
            beta_star: const_fn(0.0),
            claims_ar: false,
        }
    }

    /// The trivial reaction; reduces the problem to its quadratic part.
    pub fn zero(dim: Dimension) -> Self {
        Self {
            name: "zero".into(),
            kind: NonlinKind::Zero,
            dim,
            f: Arc::new(|_x, _s| 0.0),
            big_f: Arc::new(|_x, _s| 0.0),
            df: Arc::new(|_x, _s| 0.0),
            r: 2.5,
            c: 0.0,
            a: const_fn(0.0),
            a_sup: 0.0,
            theta: const_fn(0.0),
            theta_sup: 0.0,
            beta_star: const_fn(0.0),
            claims_ar: false,
        }
    }

    /// Select a built-in by name: "power" (needs r), "loglike", "zero".
    pub fn builtin(name: &str, r: Option<f64>, dim: Dimension) -> Result<Self> {
        match name {
            "power" => {
                let r = r.ok_or_else(|| {
                    Error::InvalidParameter("power nonlinearity needs an exponent r".into())
                })?;
                Self::power(r, dim)
            }
            "loglike" => Ok(Self::loglike(dim)),
            "zero" => Ok(Self::zero(dim)),
            other => Err(Error::InvalidParameter(format!(
                "unknown nonlinearity kind '{other}'"
            ))),
        }
    }

    /// Fully custom reaction. `df` is the partial derivative of f in s,
    /// needed by the Newton stage of the solver.
    pub fn custom(
        name: &str,
        dim: Dimension,
        f: SFn,
        big_f: SFn,
        df: SFn,
        growth: GrowthData,
        claims_ar: bool,
    ) -> Result<Self> {
        Self::validate_r(growth.r, dim)?;
        Ok(Self {
            name: name.into(),
            kind: NonlinKind::Custom,
            dim,
            f,
            big_f,
            df,
            r: growth.r,
            c: growth.c,
            a: growth.a,
            a_sup: growth.a_sup,
            theta: growth.theta,
            theta_sup: growth.theta_sup,
            beta_star: growth.beta_star,
            claims_ar,
        })
    }

    /// Multiply by a bounded positive spatial weight. Growth metadata is
    /// rescaled conservatively by the weight supremum.
    pub fn with_weight(self, weight: XFn, weight_sup: f64) -> Result<Self> {
        if !(weight_sup > 0.0) || !weight_sup.is_finite() {
            return Err(Error::InvalidParameter(
                "weight supremum must be positive and finite".into(),
            ));
        }
        let (f, big_f, df) = (self.f, self.big_f, self.df);
        let (a, theta, beta_star) = (self.a, self.theta, self.beta_star);
        let (w1, w2, w3, w4, w5, w6) = (
            Arc::clone(&weight),
            Arc::clone(&weight),
            Arc::clone(&weight),
            Arc::clone(&weight),
            Arc::clone(&weight),
            weight,
        );
        Ok(Self {
            name: format!("{} (x-weighted)", self.name),
            kind: NonlinKind::Custom,
            dim: self.dim,
            f: Arc::new(move |x, s| w1(x) * f(x, s)),
            big_f: Arc::new(move |x, s| w2(x) * big_f(x, s)),
            df: Arc::new(move |x, s| w3(x) * df(x, s)),
            r: self.r,
            c: self.c * weight_sup,
            a: Arc::new(move |x| w4(x) * a(x)),
            a_sup: self.a_sup * weight_sup,
            theta: Arc::new(move |x| w5(x) * theta(x)),
            theta_sup: self.theta_sup * weight_sup,
            beta_star: Arc::new(move |x| w6(x) * beta_star(x)),
            claims_ar: self.claims_ar,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> NonlinKind {
        self.kind
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.kind == NonlinKind::Zero
    }

    pub fn f(&self, x: &[f64], s: f64) -> f64 {
        (self.f)(x, s)
    }

    pub fn big_f(&self, x: &[f64], s: f64) -> f64 {
        (self.big_f)(x, s)
    }

    pub fn df(&self, x: &[f64], s: f64) -> f64 {
        (self.df)(x, s)
    }

    /// `sigma(x,s) = f(x,s) s - 2 F(x,s)`, evaluated from f and F so the
    /// defining identity holds by construction.
    pub fn sigma(&self, x: &[f64], s: f64) -> f64 {
        self.f(x, s) * s - 2.0 * self.big_f(x, s)
    }

    pub fn growth_exponent(&self) -> f64 {
        self.r
    }

    pub fn growth_constant(&self) -> f64 {
        self.c
    }

    pub fn a(&self, x: &[f64]) -> f64 {
        (self.a)(x)
    }

    pub fn a_sup(&self) -> f64 {
        self.a_sup
    }

    pub fn theta(&self, x: &[f64]) -> f64 {
        (self.theta)(x)
    }

    pub fn theta_sup(&self) -> f64 {
        self.theta_sup
    }

    pub fn beta_star(&self, x: &[f64]) -> f64 {
        (self.beta_star)(x)
    }

    pub fn claims_ar(&self) -> bool {
        self.claims_ar
    }

    /// Largest amplitude delta (from a log grid) below which
    /// `F(x,s) <= (theta(x)+eps)/2 s^2` holds at every scanned point.
    pub fn small_s_radius(&self, eps: f64) -> f64 {
        assert!(eps > 0.0);
        let xs = sample_points(self.dim, 8, 0x5eed);
        let mut delta = f64::NAN;
        // scan from large to small; keep the largest verified radius
        for i in (0..160).rev() {
            let cand = 10f64.powf(-9.0 + 11.0 * i as f64 / 159.0); // 1e-9 ..= 1e2
            let ok = log_grid(cand * 1e-3, cand, 24).iter().all(|&s| {
                xs.iter().all(|x| {
                    let bound = 0.5 * (self.theta(x) + eps) * s * s;
                    self.big_f(x, s) <= bound && self.big_f(x, -s) <= bound
                })
            });
            if ok {
                delta = cand;
                break;
            }
        }
        delta
    }

    /// Constant of the joined small/large amplitude bound
    /// `F <= (theta+eps)/2 s^2 + C_eps |s|^r`.
    pub fn joined_bound_constant(&self, eps: f64) -> f64 {
        let delta = self.small_s_radius(eps);
        if !delta.is_finite() {
            return f64::INFINITY;
        }
        self.a_sup / delta.powf(self.r - 1.0) + self.c / self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of one hypothesis check: verdict, worst sampled point, margin.
/// Reproducible given the seed; single-threaded scan order is fixed.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HypothesisReport {
    pub hypothesis: String,
    pub verdict: Verdict,
    pub worst_x: Option<Vec<f64>>,
    pub worst_s: Option<f64>,
    /// Signed slack of the checked inequality at the worst point
    /// (nonnegative means satisfied).
    pub margin: f64,
    pub samples: usize,
    pub seed: u64,
}

fn sample_points(dim: Dimension, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..dim.as_usize())
                .map(|_| rng.random_range(1e-3..1.0 - 1e-3))
                .collect()
        })
        .collect()
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Growth bound `|f| <= a(x) + c |s|^{r-1}` and its integrated form
/// `|F| <= a(x)|s| + (c/r)|s|^r`, sampled with |s| log-uniform up to 1e6.
pub fn check_growth(spec: &NonlinearitySpec, seed: u64, count: usize) -> HypothesisReport {
    assert!(count >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = sample_points(spec.dim, 16, seed ^ 0x9e37_79b9);
    let mut worst = (f64::INFINITY, None, None);
    let check = |x: &[f64], s: f64, worst: &mut (f64, Option<Vec<f64>>, Option<f64>)| {
        let rhs_f = spec.a(x) + spec.c * s.abs().powf(spec.r - 1.0);
        let rhs_ff = spec.a(x) * s.abs() + spec.c / spec.r * s.abs().powf(spec.r);
        let slack_f = (rhs_f - spec.f(x, s).abs()) / (1.0 + rhs_f);
        let slack_ff = (rhs_ff - spec.big_f(x, s).abs()) / (1.0 + rhs_ff);
        let slack = slack_f.min(slack_ff);
        if slack < worst.0 {
            *worst = (slack, Some(x.to_vec()), Some(s));
        }
    };
    // deterministic grid plus random refinement
    for x in &xs {
        for &mag in &log_grid(1e-8, 1e6, 96) {
            check(x, mag, &mut worst);
            check(x, -mag, &mut worst);
        }
    }
    for _ in 0..count {
        let x = &xs[rng.random_range(0..xs.len())];
        let mag = 10f64.powf(rng.random_range(-8.0..6.0));
        let s = if rng.random_bool(0.5) { mag } else { -mag };
        check(x, s, &mut worst);
    }
    let verdict = if worst.0 >= -1e-9 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    HypothesisReport {
        hypothesis: "growth".into(),
        verdict,
        worst_x: worst.1,
        worst_s: worst.2,
        margin: worst.0,
        samples: count,
        seed,
    }
}

/// Superquadratic potential: the x-minimum of `F(x,s)/s^2` must increase
/// along the decade sequence s = 10, 100, ..., S_max and clear a linearly
/// growing threshold. Slow but genuine growth reports `Inconclusive`.
pub fn check_superquadratic(spec: &NonlinearitySpec, s_max: f64) -> HypothesisReport {
    assert!(s_max > 1.0);
    let xs = sample_points(spec.dim, 12, 0xabcd);
    let decades = (s_max.log10().floor() as usize).max(1);
    let mut ratios = Vec::with_capacity(decades);
    for j in 1..=decades {
        let s = 10f64.powi(j as i32).min(s_max);
        let r = xs
            .iter()
            .map(|x| (spec.big_f(x, s) / (s * s)).min(spec.big_f(x, -s) / (s * s)))
            .fold(f64::INFINITY, f64::min);
        ratios.push(r);
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-12));
    let cleared = ratios
        .iter()
        .enumerate()
        .all(|(i, &r)| r >= (i + 1) as f64);
    let verdict = if increasing && cleared {
        Verdict::Pass
    } else if increasing {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    HypothesisReport {
        hypothesis: "superquadratic".into(),
        verdict,
        worst_x: None,
        worst_s: Some(10f64.powi(ratios.len() as i32)),
        margin: *ratios.last().unwrap(),
        samples: ratios.len(),
        seed: 0,
    }
}

/// Quasi-monotone sigma: `sigma(x,s) <= sigma(x,t) + beta*(x)` on ordered
/// pairs of equal sign. Scans a deterministic magnitude grid (every ordered
/// pair) plus seeded random pairs.
pub fn check_quasimonotone(spec: &NonlinearitySpec, seed: u64, count: usize) -> HypothesisReport {
    let xs = sample_points(spec.dim, 6, seed ^ 0x51ab);
    // log grid for scale coverage, linear band for moderate amplitudes where
    // oscillatory dips would slip between log nodes
    let mut mags = log_grid(1e-6, 1e4, 72);
    mags.extend((0..96).map(|i| 0.05 + 12.0 * i as f64 / 95.0));
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut worst = (f64::INFINITY, None, None);
    let check = |x: &[f64], s: f64, t: f64, worst: &mut (f64, Option<Vec<f64>>, Option<f64>)| {
        // s between 0 and t (same sign, |s| <= |t|)
        let slack = spec.sigma(x, t) + spec.beta_star(x) + 1e-12 - spec.sigma(x, s);
        let scale = 1.0 + spec.sigma(x, t).abs();
        let rel = slack / scale;
        if rel < worst.0 {
            *worst = (rel, Some(x.to_vec()), Some(s));
        }
    };
    for x in &xs {
        for i in 0..mags.len() {
            for j in i..mags.len() {
                check(x, mags[i], mags[j], &mut worst);
                check(x, -mags[i], -mags[j], &mut worst);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let x = &xs[rng.random_range(0..xs.len())];
        let lo = 10f64.powf(rng.random_range(-6.0..4.0));
        let hi = 10f64.powf(rng.random_range(lo.log10()..4.000001));
        if rng.random_bool(0.5) {
            check(x, lo, hi, &mut worst);
        } else {
            check(x, -lo, -hi, &mut worst);
        }
    }
    let verdict = if worst.0 >= 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    HypothesisReport {
        hypothesis: "quasimonotone".into(),
        verdict,
        worst_x: worst.1,
        worst_s: worst.2,
        margin: worst.0,
        samples: count,
        seed,
    }
}

/// Small-amplitude bound: `limsup_{s->0} F/s^2 <= theta/2` probed on
/// shrinking windows, plus the arithmetic margin `theta_inf < m - omega`.
pub fn check_small_s(
    spec: &NonlinearitySpec,
    m: f64,
    omega: f64,
) -> HypothesisReport {
    let margin_arith = m - omega - spec.theta_sup();
    if margin_arith <= 0.0 {
        return HypothesisReport {
            hypothesis: "small_s".into(),
            verdict: Verdict::Fail,
            worst_x: None,
            worst_s: None,
            margin: margin_arith,
            samples: 0,
            seed: 0,
        };
    }
    let xs = sample_points(spec.dim, 8, 0x77);
    let deltas = [1.0, 0.3, 0.1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6];
    let excess = |delta: f64| -> (f64, Option<Vec<f64>>, Option<f64>) {
        let mut worst = (f64::NEG_INFINITY, None, None);
        for &s in &log_grid(delta * 1e-2, delta, 24) {
            for x in &xs {
                for sgn in [s, -s] {
                    let e = spec.big_f(x, sgn) / (s * s) - 0.5 * spec.theta(x);
                    if e > worst.0 {
                        worst = (e, Some(x.clone()), Some(sgn));
                    }
                }
            }
        }
        worst
    };
    let first = excess(deltas[0]).0;
    let (last, wx, ws) = excess(*deltas.last().unwrap());
    let verdict = if last <= 1e-3 {
        Verdict::Pass
    } else if last < 0.5 * first {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    HypothesisReport {
        hypothesis: "small_s".into(),
        verdict,
        worst_x: wx,
        worst_s: ws,
        margin: -last,
        samples: deltas.len() * 24,
        seed: 0,
    }
}

/// Joined bound `F <= (theta+eps)/2 s^2 + C_eps |s|^r` with the measured
/// small-amplitude radius; scanned over all amplitudes up to 1e6.
pub fn check_joined_bound(spec: &NonlinearitySpec, eps: f64) -> HypothesisReport {
    let c_eps = spec.joined_bound_constant(eps);
    let xs = sample_points(spec.dim, 8, 0x99);
    let mut worst = (f64::INFINITY, None, None);
    for &s in &log_grid(1e-8, 1e6, 128) {
        for x in &xs {
            for sgn in [s, -s] {
                let rhs = 0.5 * (spec.theta(x) + eps) * s * s + c_eps * s.abs().powf(spec.r);
                let slack = (rhs - spec.big_f(x, sgn)) / (1.0 + rhs);
                if slack < worst.0 {
                    worst = (slack, Some(x.clone()), Some(sgn));
                }
            }
        }
    }
    HypothesisReport {
        hypothesis: "joined_bound".into(),
        verdict: if worst.0 >= -1e-9 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        worst_x: worst.1,
        worst_s: worst.2,
        margin: worst.0,
        samples: 128 * 16,
        seed: 0,
    }
}

/// Consistency of the stored evaluators: dF/ds = f by central differences
/// and the sigma identity, on seeded samples.
pub fn check_primitive_consistency(
    spec: &NonlinearitySpec,
    seed: u64,
    count: usize,
) -> HypothesisReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = sample_points(spec.dim, 8, seed ^ 0x1234);
    let mut worst = (f64::INFINITY, None, None);
    for _ in 0..count {
        let x = &xs[rng.random_range(0..xs.len())];
        let mag = 10f64.powf(rng.random_range(-3.0..3.0));
        let s = if rng.random_bool(0.5) { mag } else { -mag };
        let h = 6e-6 * (1.0 + s.abs());
        let fd = (spec.big_f(x, s + h) - spec.big_f(x, s - h)) / (2.0 * h);
        let scale = 1.0 + spec.f(x, s).abs();
        let rel = 1e-6 - (fd - spec.f(x, s)).abs() / scale;
        let sig = (spec.sigma(x, s) - (spec.f(x, s) * s - 2.0 * spec.big_f(x, s))).abs();
        let slack = rel.min(1e-12 - sig);
        if slack < worst.0 {
            worst = (slack, Some(x.clone()), Some(s));
        }
    }
    HypothesisReport {
        hypothesis: "primitive_consistency".into(),
        verdict: if worst.0 >= 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        worst_x: worst.1,
        worst_s: worst.2,
        margin: worst.0,
        samples: count,
        seed,
    }
}

/// Outcome of the Ambrosetti-Rabinowitz scan.
#[derive(Debug, Clone, serde::Serialize)]
pub enum ArVerdict {
    /// No violation up to the scanned amplitude (inconclusive beyond it).
    Holds { scanned_to: f64 },
    /// Witness where `mu F(x, s) > s f(x, s)` (or F fails positivity).
    Fails {
        witness_x: Vec<f64>,
        witness_s: f64,
        mu_f: f64,
        sf: f64,
    },
}

impl ArVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ArVerdict::Holds { .. })
    }
}

/// Scan `0 < mu F(x,s) <= s f(x,s)` on a log amplitude grid up to `s_max`.
///
/// For reactions that are superquadratic but sub-power (the log-like
/// built-in), the violation amplitude grows like `exp(mu/(mu-2))`; pass a
/// generous `s_max` (1e60 reaches mu ~ 2.008). Witnesses for mu below about
/// 2.003 overflow f64 and are undetectable at this precision.
pub fn check_ar(spec: &NonlinearitySpec, mu: f64, s_max: f64) -> Result<ArVerdict> {
    if !(mu > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "Ambrosetti-Rabinowitz exponent must exceed 2, got {mu}"
        )));
    }
    if !(s_max > 1.0) || !s_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "scan bound must be a finite amplitude above 1, got {s_max}"
        )));
    }
    let xs = sample_points(spec.dim, 4, 0xa11ce);
    for &mag in &log_grid(1e-6, s_max, 4096) {
        for x in &xs {
            for s in [mag, -mag] {
                let big = spec.big_f(x, s);
                let sf = s * spec.f(x, s);
                let mu_f = mu * big;
                let tol = 1e-12 * (1.0 + sf.abs());
                if big <= 0.0 || mu_f > sf + tol {
                    return Ok(ArVerdict::Fails {
                        witness_x: x.clone(),
                        witness_s: s,
                        mu_f,
                        sf,
                    });
                }
            }
        }
    }
    Ok(ArVerdict::Holds { scanned_to: s_max })
}

/// Consolidated verdict table for one reaction spec.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HypothesisBundle {
    pub growth: HypothesisReport,
    pub superquadratic: HypothesisReport,
    pub quasimonotone: HypothesisReport,
    pub small_s: HypothesisReport,
    pub consistency: HypothesisReport,
    pub ar: Vec<(f64, ArVerdict)>,
}

impl HypothesisBundle {
    pub fn structural_pass(&self) -> bool {
        [
            &self.growth,
            &self.superquadratic,
            &self.quasimonotone,
            &self.small_s,
            &self.consistency,
        ]
        .iter()
        .all(|r| r.verdict == Verdict::Pass)
    }
}

/// Run every checker. The A-R scan uses mu = r for reactions that claim the
/// condition and the probe set {2.01, 2.1, 3} otherwise.
pub fn run_hypotheses(
    spec: &NonlinearitySpec,
    m: f64,
    omega: f64,
    seed: u64,
) -> Result<HypothesisBundle> {
    let mus: Vec<f64> = if spec.claims_ar() {
        vec![spec.growth_exponent()]
    } else {
        vec![2.01, 2.1, 3.0]
    };
    let mut ar = Vec::new();
    for mu in mus {
        ar.push((mu, check_ar(spec, mu, 1e60)?));
    }
    Ok(HypothesisBundle {
        growth: check_growth(spec, seed, 4000),
        superquadratic: check_superquadratic(spec, 1e6),
        quasimonotone: check_quasimonotone(spec, seed.wrapping_add(1), 4000),
        small_s: check_small_s(spec, m, omega),
        consistency: check_primitive_consistency(spec, seed.wrapping_add(2), 4000),
        ar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const D1: Dimension = Dimension::One;

    #[test]
    fn power_sigma_closed_form() {
        let p = NonlinearitySpec::power(3.0, D1).unwrap();
        // sigma = (1 - 2/r) |s|^r
        assert_relative_eq!(p.sigma(&[0.5], 2.0), 8.0 / 3.0, max_relative = 1e-14);
        assert_eq!(p.sigma(&[0.5], 0.0), 0.0);
        for &s in &[-30.0, -0.3, 0.0, 0.7, 40.0] {
            assert!(p.sigma(&[0.5], s) >= 0.0);
        }
    }

    #[test]
    fn loglike_sigma_value_from_integration_oracle() {
        let g = NonlinearitySpec::loglike(D1);
        // Simpson integration of f from 0 to 1 as an independent primitive
        let n = 4000;
        let h = 1.0 / n as f64;
        let mut int = 0.0;
        for i in 0..n {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let mid = 0.5 * (a + b);
            int += h / 6.0
                * (g.f(&[0.1], a) + 4.0 * g.f(&[0.1], mid) + g.f(&[0.1], b));
        }
        assert_relative_eq!(g.big_f(&[0.1], 1.0), int, max_relative = 1e-9);
        // sigma(1) = 1 - ln 2
        assert_relative_eq!(
            g.sigma(&[0.1], 1.0),
            1.0 - std::f64::consts::LN_2,
            max_relative = 1e-13
        );
        assert_eq!(g.sigma(&[0.1], 0.0), 0.0);
    }

    #[test]
    fn zero_builtin_vanishes() {
        let z = NonlinearitySpec::zero(D1);
        assert_eq!(z.f(&[0.2], 5.0), 0.0);
        assert_eq!(z.big_f(&[0.2], 5.0), 0.0);
        assert_eq!(z.sigma(&[0.2], 5.0), 0.0);
    }

    #[test]
    fn power_exponent_range_enforced() {
        assert!(NonlinearitySpec::power(2.0, D1).is_err());
        assert!(NonlinearitySpec::power(3.5, Dimension::Two).is_ok());
        assert!(NonlinearitySpec::power(4.0, Dimension::Two).is_err());
        assert!(NonlinearitySpec::power(5.0, D1).is_ok()); // subcritical in 1D
    }

    #[test]
    fn growth_passes_for_builtins() {
        let p = NonlinearitySpec::power(3.0, D1).unwrap();
        assert_eq!(check_growth(&p, 7, 2000).verdict, Verdict::Pass);
        let g = NonlinearitySpec::loglike(D1);
        let rep = check_growth(&g, 7, 2000);
        assert_eq!(rep.verdict, Verdict::Pass, "margin {}", rep.margin);
    }

    #[test]
    fn growth_fails_on_exponent_mismatch() {
        // cubic reaction declared with r = 2.5 must be caught at large |s|
        let bad = NonlinearitySpec::custom(
            "mislabeled-cubic",
            D1,
            Arc::new(|_x, s| s * s * s),
            Arc::new(|_x, s| s.powi(4) / 4.0),
            Arc::new(|_x, s| 3.0 * s * s),
            GrowthData {
                r: 2.5,
                c: 1.0,
                a: const_fn(0.0),
                a_sup: 0.0,
                theta: const_fn(0.0),
                theta_sup: 0.0,
                beta_star: const_fn(0.0),
            },
            false,
        )
        .unwrap();
        let rep = check_growth(&bad, 11, 2000);
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.worst_s.unwrap().abs() > 1e2);
    }

    #[test]
    fn superquadratic_verdicts() {
        let p = NonlinearitySpec::power(3.0, D1).unwrap();
        assert_eq!(check_superquadratic(&p, 1e6).verdict, Verdict::Pass);
        let g = NonlinearitySpec::loglike(D1);
        assert_eq!(check_superquadratic(&g, 1e6).verdict, Verdict::Pass);
        // bounded F/s^2 must fail
        let flat = NonlinearitySpec::custom(
            "quadratic-cap",
            D1,
            Arc::new(|_x, s| 0.4 * s),
            Arc::new(|_x, s| 0.2 * s * s),
            Arc::new(|_x, _s| 0.4),
            GrowthData {
                r: 2.5,
                c: 1.0,
                a: const_fn(1.0),
                a_sup: 1.0,
                theta: const_fn(0.4),
                theta_sup: 0.4,
                beta_star: const_fn(0.0),
            },
            false,
        )
        .unwrap();
        assert_eq!(check_superquadratic(&flat, 1e6).verdict, Verdict::Fail);
    }

    #[test]
    fn quasimonotone_builtins_pass_with_zero_slack() {
        // loglike: sigma'(s) = 2 s^3/(1+s^2) >= 0 on s >= 0
        let g = NonlinearitySpec::loglike(D1);
        assert_eq!(check_quasimonotone(&g, 3, 2000).verdict, Verdict::Pass);
        let p = NonlinearitySpec::power(2.7, D1).unwrap();
        assert_eq!(check_quasimonotone(&p, 3, 2000).verdict, Verdict::Pass);
    }

    #[test]
    fn quasimonotone_detects_engineered_dip() {
        // f = 4 s^3 - c sin(2s) gives sigma = 2 s^4 - c (s sin 2s + cos 2s - 1)
        // which loses more than the allowed slack around s ~ 3 for c = 40.
        let c = 40.0;
        let dip = NonlinearitySpec::custom(
            "dip",
            D1,
            Arc::new(move |_x, s| 4.0 * s * s * s - c * (2.0 * s).sin()),
            Arc::new(move |_x, s| s.powi(4) + c * ((2.0 * s).cos() - 1.0) / 2.0),
            Arc::new(move |_x, s| 12.0 * s * s - 2.0 * c * (2.0 * s).cos()),
            GrowthData {
                r: 3.9,
                c: 10.0,
                a: const_fn(c),
                a_sup: c,
                theta: const_fn(0.0),
                theta_sup: 0.0,
                beta_star: const_fn(1.0),
            },
            false,
        )
        .unwrap();
        // sanity: the dip really exceeds the slack of 1
        let s = dip.sigma(&[0.5], 2.8);
        let t = dip.sigma(&[0.5], 3.2);
        assert!(s > t + 1.0, "dip depth {}", s - t);
        assert_eq!(check_quasimonotone(&dip, 3, 2000).verdict, Verdict::Fail);
    }

    #[test]
    fn small_s_verdicts() {
        let g = NonlinearitySpec::loglike(D1);
        assert_eq!(check_small_s(&g, 1.0, 0.5).verdict, Verdict::Pass);
        let p = NonlinearitySpec::power(3.0, D1).unwrap();
        assert_eq!(check_small_s(&p, 1.0, 0.0).verdict, Verdict::Pass);
        // arithmetic failure: theta_inf >= m - omega
        let themed = NonlinearitySpec::custom(
            "theta-heavy",
            D1,
            Arc::new(|_x, s| 0.01 * s),
            Arc::new(|_x, s| 0.005 * s * s),
            Arc::new(|_x, _s| 0.01),
            GrowthData {
                r: 2.5,
                c: 0.0,
                a: const_fn(1.0),
                a_sup: 1.0,
                theta: const_fn(0.01),
                theta_sup: 0.01,
                beta_star: const_fn(0.0),
            },
            false,
        )
        .unwrap();
        let rep = check_small_s(&themed, 1.0, 0.999);
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.margin <= 0.0);
    }

    #[test]
    fn small_s_radius_matches_analytic_values() {
        // power(3): F/s^2 = |s|/3 <= eps/2 at |s| <= 3 eps/2
        let p = NonlinearitySpec::power(3.0, D1).unwrap();
        let delta = p.small_s_radius(0.5);
        assert!(delta <= 0.75 && delta > 0.5, "delta {delta}");
        // loglike: F/s^2 ~ s^2/4 near zero
        let g = NonlinearitySpec::loglike(D1);
        let delta = g.small_s_radius(0.25);
        assert!(delta > 0.6 && delta < 0.8, "delta {delta}");
        assert_eq!(check_joined_bound(&g, 0.25).verdict, Verdict::Pass);
    }

    #[test]
    fn ar_holds_for_power_at_its_exponent() {
        let p = NonlinearitySpec::power(3.0, D1).unwrap();
        assert!(check_ar(&p, 3.0, 1e6).unwrap().holds());
    }

    #[test]
    fn ar_fails_for_loglike_at_every_mu() {
        // ratio s f / F decreases to 2, so any mu > 2 is eventually violated;
        // the crossing sits near ln(1+s^2) = mu/(mu-2).
        let g = NonlinearitySpec::loglike(D1);
        for (mu, expect_scale) in [(3.0, 10.0), (2.1, 1e5), (2.01, 1e44)] {
            match check_ar(&g, mu, 1e60).unwrap() {
                ArVerdict::Fails { witness_s, mu_f, sf, .. } => {
                    assert!(mu_f > sf);
                    assert!(
                        witness_s.abs() < expect_scale * 1e3,
                        "mu={mu}: witness {witness_s}"
                    );
                }
                ArVerdict::Holds { .. } => panic!("mu={mu} should fail"),
            }
        }
        // tighter mu needs a larger scan window: crossing near exp(200)
        assert!(!check_ar(&g, 2.005, 1e100).unwrap().holds());
        // and is not found in a short window
        assert!(check_ar(&g, 2.005, 1e6).unwrap().holds());
    }

    #[test]
    fn ar_rejects_mu_at_or_below_two() {
        let g = NonlinearitySpec::loglike(D1);
        assert!(check_ar(&g, 2.0, 1e6).is_err());
        assert!(check_ar(&g, 1.5, 1e6).is_err());
    }

    #[test]
    fn primitive_consistency_for_builtins() {
        for spec in [
            NonlinearitySpec::power(3.0, D1).unwrap(),
            NonlinearitySpec::power(2.3, D1).unwrap(),
            NonlinearitySpec::loglike(D1),
            NonlinearitySpec::zero(D1),
        ] {
            let rep = check_primitive_consistency(&spec, 5, 10_000);
            assert_eq!(rep.verdict, Verdict::Pass, "{}: {}", spec.name(), rep.margin);
        }
    }

    #[test]
    fn loglike_headline_table() {
        // all structural hypotheses pass while A-R fails for each probe mu
        let g = NonlinearitySpec::loglike(D1);
        let bundle = run_hypotheses(&g, 1.0, 0.5, 42).unwrap();
        assert!(bundle.structural_pass());
        assert!(bundle.ar.iter().all(|(_, v)| !v.holds()));
    }

    #[test]
    fn weighted_spec_keeps_hypotheses() {
        let g = NonlinearitySpec::loglike(D1)
            .with_weight(Arc::new(|x: &[f64]| 1.0 + 0.5 * x[0]), 1.5)
            .unwrap();
        assert_eq!(check_growth(&g, 9, 2000).verdict, Verdict::Pass);
        assert_eq!(check_quasimonotone(&g, 9, 2000).verdict, Verdict::Pass);
        assert_eq!(check_primitive_consistency(&g, 9, 2000).verdict, Verdict::Pass);
    }
}
