//! Integration engine.
//!
//! One entry point, [`integrate`], covering every measure/region pairing the
//! crate supports. Method selection is by resolved region shape:
//!
//! * Dirac combinations and counting prefixes: exact finite summation.
//! * Boxes and interval unions on the line: adaptive Gauss–Kronrod 7/15.
//! * Boxes in dimension 2 and 3: globally adaptive tensor Gauss–Kronrod
//!   (panels bisected along their longest axis).
//! * Everything else (Euclidean balls, sublevel sets, higher-dimensional or
//!   unstructured regions): Monte Carlo by rejection from the bounding box.
//!
//! Monte Carlo is deterministic for a fixed seed regardless of thread count:
//! samples are generated in fixed-size batches, batch `i` uses an independent
//! counter-derived stream, rounds grow on a fixed schedule, and batch results
//! are reduced in index order.

use rayon::prelude::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::func::VectorFn;
use crate::measure::Measure;
use crate::region::{Region, Shape};

/// Stop once `err <= max(abs, rel * scale)` where `scale` is the magnitude of
/// the current estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
}

impl Tol {
    pub fn absolute(abs: f64) -> Tol {
        Tol { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Tol {
        Tol { abs: 0.0, rel }
    }

    pub fn mixed(abs: f64, rel: f64) -> Tol {
        Tol { abs, rel }
    }

    #[inline]
    pub(crate) fn met(&self, err: f64, scale: f64) -> bool {
        err <= self.abs.max(self.rel * scale)
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol { abs: 1e-9, rel: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOpts {
    pub tol: Tol,
    pub seed: u64,
    /// Cap on integrand evaluations (samples, for Monte Carlo).
    pub budget: u64,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts { tol: Tol::default(), seed: 0, budget: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Adaptive1d,
    Tensor,
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralEstimate {
    pub value: Vec<f64>,
    /// Estimated absolute error (componentwise maximum; two standard errors
    /// for Monte Carlo).
    pub abs_error: f64,
    pub evaluations: u64,
    pub method: Method,
}

/// Deterministic seed derivation for independent sub-streams.
pub(crate) fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Integrate `f` (componentwise, shared sample set) against `mu` over
/// `region`.
pub fn integrate(
    f: &VectorFn,
    mu: &Measure,
    region: &Region,
    opts: &QuadOpts,
) -> Result<IntegralEstimate> {
    if region.dim() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), found: region.dim() });
    }
    // A known-constant integrand reduces to c * mass, which has exact paths
    // (boxes, balls, interval unions, atomic measures) no sampler can match.
    if let Some(c) = f.constant_value() {
        let mass = integrate_mass(mu, region, opts)?;
        let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        return Ok(IntegralEstimate {
            value: c.iter().map(|ci| ci * mass.value[0]).collect(),
            abs_error: mass.abs_error * scale,
            evaluations: mass.evaluations,
            method: mass.method,
        });
    }
    match mu {
        Measure::Dirac { points } => dirac_sum(f, points, region),
        Measure::Counting => match region.resolve() {
            Shape::Prefix(n) => counting_sum(f, n),
            _ => Err(Error::UnsupportedRegion(
                "the counting measure integrates over prefix regions [0, n] only".into(),
            )),
        },
        Measure::Density { density, .. } => {
            let d = f.dim();
            let fd = f.clone();
            let rho = density.clone();
            let g = move |x: &[f64], out: &mut [f64]| {
                fd.eval_into(x, out);
                let w = rho.eval(x);
                for o in out.iter_mut() {
                    *o *= w;
                }
            };
            integrate_weighted(d, &g, region, opts)
        }
        Measure::Product(factors) => match flatten_densities(factors) {
            Some(flat) => integrate(f, &flat, region, opts),
            None => Err(Error::UnsupportedRegion(
                "product measures with atomic factors integrate masses only".into(),
            )),
        },
    }
}

/// The mass `mu(region)` as a one-component estimate. Takes exact shortcuts
/// that `integrate` cannot: constant densities over boxes, balls and interval
/// unions, and factorized products over product regions.
pub fn integrate_mass(mu: &Measure, region: &Region, opts: &QuadOpts) -> Result<IntegralEstimate> {
    match mu {
        Measure::Density { uniform: Some(c), .. } => match region.resolve() {
            Shape::Rect { lower, upper } => {
                let vol: f64 = lower.iter().zip(&upper).map(|(l, u)| u - l).product();
                Ok(exact(vec![c * vol]))
            }
            Shape::Intervals(iv) => {
                let len: f64 = iv.iter().map(|(a, b)| b - a).sum();
                Ok(exact(vec![c * len]))
            }
            Shape::EuclBall { center, radius } => {
                Ok(exact(vec![c * ball_volume(center.len(), radius)]))
            }
            Shape::Prefix(_) => Err(Error::UnsupportedRegion(
                "a density does not integrate over natural-number prefixes".into(),
            )),
            Shape::General => one_integral(mu, region, opts),
        },
        Measure::Product(factors) => {
            if let Region::Product(parts) = region {
                if parts.len() == factors.len() {
                    return product_mass(factors, parts, opts);
                }
            }
            match flatten_densities(factors) {
                Some(flat) => integrate_mass(&flat, region, opts),
                None => Err(Error::UnsupportedRegion(
                    "product measure mass needs a matching product region".into(),
                )),
            }
        }
        _ => one_integral(mu, region, opts),
    }
}

fn one_integral(mu: &Measure, region: &Region, opts: &QuadOpts) -> Result<IntegralEstimate> {
    // Deliberately not `VectorFn::constant`: that would bounce back here
    // through the constant-integrand shortcut in `integrate`.
    let one = VectorFn::new(1, |_, out| out[0] = 1.0);
    integrate(&one, mu, region, opts)
}

fn product_mass(
    factors: &[Measure],
    parts: &[Region],
    opts: &QuadOpts,
) -> Result<IntegralEstimate> {
    let mut vals = Vec::with_capacity(factors.len());
    let mut errs = Vec::with_capacity(factors.len());
    let mut evals = 0u64;
    let mut method = Method::Exact;
    for (i, (m, r)) in factors.iter().zip(parts).enumerate() {
        let sub = QuadOpts { seed: derive_seed(opts.seed, i as u64), ..*opts };
        let est = integrate_mass(m, r, &sub)?;
        vals.push(est.value[0]);
        errs.push(est.abs_error);
        evals += est.evaluations;
        method = worse_method(method, est.method);
    }
    let total: f64 = vals.iter().product();
    // First-order error propagation.
    let mut err = 0.0;
    for i in 0..vals.len() {
        let others: f64 =
            vals.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.abs()).product();
        err += errs[i] * others;
    }
    Ok(IntegralEstimate { value: vec![total], abs_error: err, evaluations: evals.max(1), method })
}

fn worse_method(a: Method, b: Method) -> Method {
    use Method::*;
    match (a, b) {
        (MonteCarlo, _) | (_, MonteCarlo) => MonteCarlo,
        (Tensor, _) | (_, Tensor) => Tensor,
        (Adaptive1d, _) | (_, Adaptive1d) => Adaptive1d,
        _ => Exact,
    }
}

fn exact(value: Vec<f64>) -> IntegralEstimate {
    IntegralEstimate { value, abs_error: 0.0, evaluations: 1, method: Method::Exact }
}

fn flatten_densities(factors: &[Measure]) -> Option<Measure> {
    let mut dims = Vec::with_capacity(factors.len());
    let mut denss = Vec::with_capacity(factors.len());
    let mut uniform = Some(1.0f64);
    for f in factors {
        match f {
            Measure::Density { dim, density, uniform: u } => {
                dims.push(*dim);
                denss.push(density.clone());
                uniform = match (uniform, u) {
                    (Some(a), Some(b)) => Some(a * b),
                    _ => None,
                };
            }
            Measure::Product(inner) => match flatten_densities(inner) {
                Some(Measure::Density { dim, density, uniform: u }) => {
                    dims.push(dim);
                    denss.push(density);
                    uniform = match (uniform, u) {
                        (Some(a), Some(b)) => Some(a * b),
                        _ => None,
                    };
                }
                _ => return None,
            },
            _ => return None,
        }
    }
    let total_dim: usize = dims.iter().sum();
    let density = crate::func::ScalarFn::new(move |x: &[f64]| {
        let mut w = 1.0;
        let mut off = 0;
        for (d, rho) in dims.iter().zip(&denss) {
            w *= rho.eval(&x[off..off + d]);
            off += d;
        }
        w
    });
    Some(Measure::Density { dim: total_dim, density, uniform })
}

/// Unit-ball volume recurrence: `V_d = V_{d-2} * 2 pi r^2 / d`.
pub(crate) fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0 * radius,
        d => ball_volume(d - 2, radius) * 2.0 * std::f64::consts::PI * radius * radius / d as f64,
    }
}

// ---------------------------------------------------------------------------
// Exact atomic paths

fn dirac_sum(f: &VectorFn, points: &[(Vec<f64>, f64)], region: &Region) -> Result<IntegralEstimate> {
    let d = f.dim();
    let mut total = vec![0.0; d];
    let mut out = vec![0.0; d];
    let mut evals = 0u64;
    for (p, w) in points {
        if region.contains(p) {
            f.eval_into(p, &mut out);
            for (t, o) in total.iter_mut().zip(&out) {
                *t += w * o;
            }
            evals += 1;
        }
    }
    if total.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonIntegrable("atomic sum is not finite".into()));
    }
    Ok(IntegralEstimate { value: total, abs_error: 0.0, evaluations: evals.max(1), method: Method::Exact })
}

fn counting_sum(f: &VectorFn, n: u64) -> Result<IntegralEstimate> {
    let d = f.dim();
    let mut total = vec![0.0; d];
    let mut comp = vec![0.0; d];
    let mut out = vec![0.0; d];
    for k in 0..=n {
        f.eval_into(&[k as f64], &mut out);
        for i in 0..d {
            kahan_add(&mut total[i], &mut comp[i], out[i]);
        }
    }
    if total.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonIntegrable("counting sum is not finite".into()));
    }
    Ok(IntegralEstimate { value: total, abs_error: 0.0, evaluations: n + 1, method: Method::Exact })
}

#[inline]
fn kahan_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let y = v - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

// ---------------------------------------------------------------------------
// Weighted dispatch over region shapes

fn integrate_weighted(
    d: usize,
    g: &(dyn Fn(&[f64], &mut [f64]) + Sync),
    region: &Region,
    opts: &QuadOpts,
) -> Result<IntegralEstimate> {
    match region.resolve() {
        Shape::Rect { lower, upper } => match lower.len() {
            1 => adaptive_1d(d, g, &[(lower[0], upper[0])], opts),
            2 | 3 => adaptive_tensor(d, g, &lower, &upper, opts),
            _ => monte_carlo(d, g, &lower, &upper, None, opts),
        },
        Shape::Intervals(iv) => {
            if iv.is_empty() {
                return Ok(IntegralEstimate {
                    value: vec![0.0; d],
                    abs_error: 0.0,
                    evaluations: 1,
                    method: Method::Exact,
                });
            }
            adaptive_1d(d, g, &iv, opts)
        }
        Shape::EuclBall { center, radius } => {
            let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
            let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
            let inside = move |x: &[f64]| {
                x.iter().zip(&center).map(|(v, c)| (v - c) * (v - c)).sum::<f64>()
                    <= radius * radius
            };
            monte_carlo(d, g, &lo, &hi, Some(&inside), opts)
        }
        Shape::Prefix(_) => Err(Error::UnsupportedRegion(
            "prefix regions pair with the counting measure".into(),
        )),
        Shape::General => {
            let (lo, hi) = region.bounding_box();
            let inside = move |x: &[f64]| region.contains(x);
            monte_carlo(d, g, &lo, &hi, Some(&inside), opts)
        }
    }
}

// ---------------------------------------------------------------------------
// Gauss–Kronrod 7/15

/// (node, Kronrod weight, Gauss weight or 0) on [-1, 1].
const GK15: [(f64, f64, f64); 15] = [
    (-0.991455371120812639206854697526329, 0.022935322010529224963732008058970, 0.0),
    (-0.949107912342758524526189684047851, 0.063092092629978553290700663189204, 0.129484966168869693270611432679082),
    (-0.864864423359769072789712788640926, 0.104790010322250183839876322541518, 0.0),
    (-0.741531185599394439863864773280788, 0.140653259715525918745189590510238, 0.279705391489276667901467771423780),
    (-0.586087235467691130294144838258730, 0.169004726639267902826583426598550, 0.0),
    (-0.405845151377397166906606412076961, 0.190350578064785409913256402421014, 0.381830050505118944950369775488975),
    (-0.207784955007898467600689403773245, 0.204432940075298892414161999234649, 0.0),
    (0.0, 0.209482141084727828012999174891714, 0.417959183673469387755102040816327),
    (0.207784955007898467600689403773245, 0.204432940075298892414161999234649, 0.0),
    (0.405845151377397166906606412076961, 0.190350578064785409913256402421014, 0.381830050505118944950369775488975),
    (0.586087235467691130294144838258730, 0.169004726639267902826583426598550, 0.0),
    (0.741531185599394439863864773280788, 0.140653259715525918745189590510238, 0.279705391489276667901467771423780),
    (0.864864423359769072789712788640926, 0.104790010322250183839876322541518, 0.0),
    (0.949107912342758524526189684047851, 0.063092092629978553290700663189204, 0.129484966168869693270611432679082),
    (0.991455371120812639206854697526329, 0.022935322010529224963732008058970, 0.0),
];

struct Panel {
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    err: f64,
    /// Axis whose Gauss/Kronrod gap dominates; where a bisection helps most.
    axis: usize,
}

/// GK 7/15 on one interval; returns (kronrod, err = max |kronrod - gauss|).
fn gk_eval_1d(
    d: usize,
    g: &(dyn Fn(&[f64], &mut [f64]) + Sync),
    a: f64,
    b: f64,
) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut ik = vec![0.0; d];
    let mut ig = vec![0.0; d];
    let mut out = vec![0.0; d];
    for (x, wk, wg) in GK15 {
        g(&[c + h * x], &mut out);
        for i in 0..d {
            ik[i] += wk * out[i];
            if wg != 0.0 {
                ig[i] += wg * out[i];
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..d {
        ik[i] *= h;
        ig[i] *= h;
        err = err.max((ik[i] - ig[i]).abs());
    }
    (ik, err)
}

/// Tensor GK 7/15. Alongside the full Kronrod value this accumulates, per
/// axis, the mixed rule that is Gauss along that axis and Kronrod along the
/// rest; the gap to the Kronrod value isolates which axis carries the error,
/// so the caller can bisect where it actually helps.
fn gk_eval_tensor(
    d: usize,
    g: &(dyn Fn(&[f64], &mut [f64]) + Sync),
    lower: &[f64],
    upper: &[f64],
) -> (Vec<f64>, f64, usize, u64) {
    let m = lower.len();
    debug_assert!(m == 2 || m == 3);
    let c: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect();
    let h: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| 0.5 * (u - l)).collect();
    let mut ik = vec![0.0; d];
    let mut mixed = vec![vec![0.0; d]; m];
    let mut out = vec![0.0; d];
    let mut evals = 0u64;
    let mut x = vec![0.0; m];
    let kdim = if m == 2 { 1 } else { GK15.len() };
    for (xi, wki, wgi) in GK15 {
        x[0] = c[0] + h[0] * xi;
        for (xj, wkj, wgj) in GK15 {
            x[1] = c[1] + h[1] * xj;
            for k in 0..kdim {
                let (wk2, wg2) = if m == 3 {
                    let (xk, wkk, wgk_) = GK15[k];
                    x[2] = c[2] + h[2] * xk;
                    (wkk, wgk_)
                } else {
                    (1.0, 1.0)
                };
                g(&x, &mut out);
                evals += 1;
                let wks = [wki, wkj, wk2];
                let wgs = [wgi, wgj, wg2];
                let wk = wki * wkj * wk2;
                for i in 0..d {
                    ik[i] += wk * out[i];
                }
                for a in 0..m {
                    if wgs[a] == 0.0 {
                        continue;
                    }
                    let mut w = wgs[a];
                    for b in 0..m {
                        if b != a {
                            w *= wks[b];
                        }
                    }
                    for i in 0..d {
                        mixed[a][i] += w * out[i];
                    }
                }
            }
        }
    }
    let scale: f64 = h.iter().product();
    for i in 0..d {
        ik[i] *= scale;
    }
    let mut err = 0.0f64;
    let mut worst = 0.0f64;
    let mut axis = 0usize;
    for a in 0..m {
        let mut ea = 0.0f64;
        for i in 0..d {
            ea = ea.max((ik[i] - mixed[a][i] * scale).abs());
        }
        if ea > worst {
            worst = ea;
            axis = a;
        }
        err += ea;
    }
    (ik, err, axis, evals)
}

fn panel_totals(panels: &[Panel], d: usize) -> (Vec<f64>, f64) {
    let mut value = vec![0.0; d];
    let mut comp = vec![0.0; d];
    let mut err = 0.0;
    for p in panels {
        for i in 0..d {
            kahan_add(&mut value[i], &mut comp[i], p.value[i]);
        }
        err += p.err;
    }
    (value, err)
}

fn scale_of(value: &[f64]) -> f64 {
    value.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn check_finite_panels(value: &[f64]) -> Result<()> {
    if value.iter().any(|v| !v.is_finite() || v.abs() > 1e300) {
        return Err(Error::NonIntegrable("estimate diverged past the overflow guard".into()));
    }
    Ok(())
}

fn adaptive_1d(
    d: usize,
    g: &(dyn Fn(&[f64], &mut [f64]) + Sync),
    intervals: &[(f64, f64)],
    opts: &QuadOpts,
) -> Result<IntegralEstimate> {
    let mut panels: Vec<Panel> = Vec::new();
    let mut evals = 0u64;
    for &(a, b) in intervals {
        let (value, err) = gk_eval_1d(d, g, a, b);
        evals += 15;
        panels.push(Panel { lower: vec![a], upper: vec![b], value, err, axis: 0 });
    }
    loop {
        let (value, err) = panel_totals(&panels, d);
        check_finite_panels(&value)?;
        let estimate = IntegralEstimate {
            value: value.clone(),
            abs_error: err,
            evaluations: evals,
            method: Method::Adaptive1d,
        };
        if opts.tol.met(err, scale_of(&value)) {
            return Ok(estimate);
        }
        if evals + 30 > opts.budget {
            return Err(Error::BudgetExceeded { partial: estimate });
        }
        // Split the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { lower, upper, .. } = panels.swap_remove(worst);
        let (a, b) = (lower[0], upper[0]);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            // Interval at floating-point resolution; keep its estimate.
            let (value, errv) = gk_eval_1d(d, g, a, b);
            evals += 15;
            panels.push(Panel { lower, upper, value, err: errv, axis: 0 });
            let (value, err) = panel_totals(&panels, d);
            check_finite_panels(&value)?;
            return Ok(IntegralEstimate {
                value,
                abs_error: err,
                evaluations: evals,
                method: Method::Adaptive1d,
            });
        }
        for (a2, b2) in [(a, mid), (mid, b)] {
            let (value, err) = gk_eval_1d(d, g, a2, b2);
            evals += 15;
            panels.push(Panel { lower: vec![a2], upper: vec![b2], value, err, axis: 0 });
        }
    }
}

fn adaptive_tensor(
    d: usize,
    g: &(dyn Fn(&[f64], &mut [f64]) + Sync),
    lower: &[f64],
    upper: &[f64],
    opts: &QuadOpts,
) -> Result<IntegralEstimate> {
    let per_panel = (GK15.len() as u64).pow(lower.len() as u32);
    let (value, err, axis, mut evals) = gk_eval_tensor(d, g, lower, upper);
    let mut panels =
        vec![Panel { lower: lower.to_vec(), upper: upper.to_vec(), value, err, axis }];
    loop {
        let (value, err) = panel_totals(&panels, d);
        check_finite_panels(&value)?;
        let estimate = IntegralEstimate {
            value: value.clone(),
            abs_error: err,
            evaluations: evals,
            method: Method::Tensor,
        };
        if opts.tol.met(err, scale_of(&value)) {
            return Ok(estimate);
        }
        if evals + 2 * per_panel > opts.budget {
            return Err(Error::BudgetExceeded { partial: estimate });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { lower, upper, axis, .. } = panels.swap_remove(worst);
        // Bisect where the error lives; fall back to the longest axis if
        // that direction is already at floating-point resolution.
        let mut axis = axis;
        let mut mid = 0.5 * (lower[axis] + upper[axis]);
        if !(mid > lower[axis] && mid < upper[axis]) {
            axis = (0..lower.len())
                .max_by(|&i, &j| (upper[i] - lower[i]).total_cmp(&(upper[j] - lower[j])))
                .unwrap();
            mid = 0.5 * (lower[axis] + upper[axis]);
        }
        if !(mid > lower[axis] && mid < upper[axis]) {
            let (value, errv, axis, e) = gk_eval_tensor(d, g, &lower, &upper);
            evals += e;
            panels.push(Panel { lower, upper, value, err: errv, axis });
            let (value, err) = panel_totals(&panels, d);
            check_finite_panels(&value)?;
            return Ok(IntegralEstimate {
                value,
                abs_error: err,
                evaluations: evals,
                method: Method::Tensor,
            });
        }
        for half in 0..2 {
            let mut lo = lower.clone();
            let mut hi = upper.clone();
            if half == 0 {
                hi[axis] = mid;
            } else {
                lo[axis] = mid;
            }
            let (value, err, axis, e) = gk_eval_tensor(d, g, &lo, &hi);
            evals += e;
            panels.push(Panel { lower: lo, upper: hi, value, err, axis });
        }
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo

const BATCH: u64 = 4096;

struct BatchOut {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    accepted: u64,
    finite: bool,
}

fn monte_carlo(
    d: usize,
    g: &(dyn Fn(&[f64], &mut [f64]) + Sync),
    lower: &[f64],
    upper: &[f64],
    inside: Option<&(dyn Fn(&[f64]) -> bool + Sync)>,
    opts: &QuadOpts,
) -> Result<IntegralEstimate> {
    let m = lower.len();
    let volume: f64 = lower.iter().zip(upper).map(|(l, u)| u - l).product();
    if volume <= 0.0 {
        return Ok(IntegralEstimate {
            value: vec![0.0; d],
            abs_error: 0.0,
            evaluations: 1,
            method: Method::MonteCarlo,
        });
    }
    let run_batch = |batch_idx: u64| -> BatchOut {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(batch_idx);
        let mut x = vec![0.0; m];
        let mut out = vec![0.0; d];
        let mut sum = vec![0.0; d];
        let mut sumsq = vec![0.0; d];
        let mut accepted = 0u64;
        let mut finite = true;
        for _ in 0..BATCH {
            for i in 0..m {
                let u: f64 = rng.gen();
                x[i] = lower[i] + (upper[i] - lower[i]) * u;
            }
            let keep = inside.map_or(true, |p| p(&x));
            if keep {
                g(&x, &mut out);
                accepted += 1;
                for i in 0..d {
                    let v = out[i];
                    if !v.is_finite() {
                        finite = false;
                    }
                    sum[i] += v;
                    sumsq[i] += v * v;
                }
            }
        }
        BatchOut { sum, sumsq, accepted, finite }
    };

    let mut sum = vec![0.0; d];
    let mut sum_c = vec![0.0; d];
    let mut sumsq = vec![0.0; d];
    let mut sumsq_c = vec![0.0; d];
    let mut n: u64 = 0;
    let mut accepted: u64 = 0;
    let mut next_batch: u64 = 0;
    let mut round_batches: u64 = 4;
    loop {
        let batches: Vec<BatchOut> =
            (next_batch..next_batch + round_batches).into_par_iter().map(run_batch).collect();
        next_batch += round_batches;
        n += round_batches * BATCH;
        // Reduce in batch order so results are thread-count independent.
        for b in &batches {
            if !b.finite {
                return Err(Error::NonIntegrable(
                    "integrand produced a non-finite value".into(),
                ));
            }
            accepted += b.accepted;
            for i in 0..d {
                kahan_add(&mut sum[i], &mut sum_c[i], b.sum[i]);
                kahan_add(&mut sumsq[i], &mut sumsq_c[i], b.sumsq[i]);
            }
        }

        let nf = n as f64;
        let mut value = vec![0.0; d];
        let mut err = 0.0f64;
        for i in 0..d {
            let mean = sum[i] / nf;
            value[i] = volume * mean;
            let var = ((sumsq[i] - sum[i] * sum[i] / nf) / (nf - 1.0)).max(0.0);
            err = err.max(2.0 * volume * (var / nf).sqrt());
        }
        check_finite_panels(&value)?;
        let estimate = IntegralEstimate {
            value: value.clone(),
            abs_error: err,
            evaluations: n,
            method: Method::MonteCarlo,
        };
        if opts.tol.met(err, scale_of(&value)) {
            return Ok(estimate);
        }
        if inside.is_some() && n >= 32_768 && (accepted as f64) < 0.001 * nf {
            // Rejection has effectively stalled; the declared box is far too
            // loose for this region.
            return Err(Error::BudgetExceeded { partial: estimate });
        }
        let remaining = opts.budget.saturating_sub(n) / BATCH;
        if remaining == 0 {
            return Err(Error::BudgetExceeded { partial: estimate });
        }
        round_batches = (round_batches * 2).min(remaining);
    }
}
