//! Renormalization sequences: increasing families `U_0 ⊆ U_1 ⊆ …` of
//! regions, each with positive finite mass, that jointly exhaust the space.
//! Every mean value in this crate is taken along such a family.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::measure::{self, Measure};
use crate::quad::{self, QuadOpts, Tol};
use crate::region::Region;

#[derive(Clone)]
pub struct RenormSequence {
    gen: Arc<dyn Fn(u64) -> Region + Send + Sync>,
    label: String,
}

impl fmt::Debug for RenormSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RenormSequence").field("label", &self.label).finish()
    }
}

impl RenormSequence {
    pub fn from_fn(
        label: impl Into<String>,
        gen: impl Fn(u64) -> Region + Send + Sync + 'static,
    ) -> RenormSequence {
        RenormSequence { gen: Arc::new(gen), label: label.into() }
    }

    pub fn region(&self, n: u64) -> Region {
        (self.gen)(n)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Cubes `[-(n+1), n+1]^dim`.
    pub fn cubes(dim: usize) -> RenormSequence {
        RenormSequence::from_fn(format!("cubes({dim})"), move |n| {
            Region::cube(dim, (n + 1) as f64).expect("cube construction")
        })
    }

    /// Euclidean balls of radius `n + 1` about the origin.
    pub fn balls(dim: usize) -> RenormSequence {
        RenormSequence::from_fn(format!("balls({dim})"), move |n| {
            Region::ball(vec![0.0; dim], (n + 1) as f64, crate::region::BallNorm::Euclidean)
                .expect("ball construction")
        })
    }

    /// Cubes `[-2^n, 2^n]^dim`; geometric growth reaches the asymptotic
    /// regime in far fewer steps than unit increments.
    pub fn geometric_cubes(dim: usize) -> RenormSequence {
        RenormSequence::from_fn(format!("geometric_cubes({dim})"), move |n| {
            Region::cube(dim, 2.0f64.powi(n.min(1000) as i32)).expect("cube construction")
        })
    }

    /// Natural-number prefixes `{0, 1, …, n}` for the counting measure.
    pub fn prefixes() -> RenormSequence {
        RenormSequence::from_fn("prefixes", |n| Region::prefix(n))
    }

    /// A symmetric interval plus a comb of positive half-waves:
    /// `[-2πn, 2πn] ∪ ⋃_{j=0}^{n} [2(n+j)π, (2(n+j)+1)π]`.
    ///
    /// Against Lebesgue measure this family weights the positive half-waves
    /// of the sine enough to pull its mean value away from zero.
    pub fn halfwave_comb() -> RenormSequence {
        let pi = std::f64::consts::PI;
        RenormSequence::from_fn("halfwave_comb", move |n| {
            let nf = n as f64;
            let mut parts = Vec::with_capacity(n as usize + 2);
            if n > 0 {
                parts.push(Region::interval(-2.0 * pi * nf, 2.0 * pi * nf).unwrap());
            }
            for j in 0..=n {
                let m = (n + j) as f64;
                parts.push(Region::interval(2.0 * m * pi, (2.0 * m + 1.0) * pi).unwrap());
            }
            Region::union(parts).expect("halfwave comb union")
        })
    }

    /// The same regions shifted by a fixed vector.
    pub fn translate(&self, shift: Vec<f64>) -> Result<RenormSequence> {
        // Validate against the first region; dimensions are constant along
        // the family.
        Region::translate(self.region(0), shift.clone())?;
        let inner = self.clone();
        Ok(RenormSequence::from_fn(
            format!("{}+shift", self.label),
            move |n| Region::translate(inner.region(n), shift.clone()).expect("validated shift"),
        ))
    }

    /// The same regions dilated by a fixed positive factor.
    pub fn scale(&self, factor: f64) -> Result<RenormSequence> {
        Region::scale(self.region(0), factor)?;
        let inner = self.clone();
        Ok(RenormSequence::from_fn(format!("{}*{factor}", self.label), move |n| {
            Region::scale(inner.region(n), factor).expect("validated factor")
        }))
    }
}

#[derive(Debug, Clone)]
pub struct RenormCheckOptions {
    /// Indices `0..n_checks` are inspected.
    pub n_checks: u64,
    /// Measure-weighted sample points per step for the inclusion check.
    pub samples_per_step: usize,
    /// Points that must be covered by some inspected region.
    pub probes: Vec<Vec<f64>>,
    pub seed: u64,
    pub tol: Tol,
}

impl Default for RenormCheckOptions {
    fn default() -> Self {
        RenormCheckOptions {
            n_checks: 12,
            samples_per_step: 1000,
            probes: Vec::new(),
            seed: 0,
            tol: Tol::mixed(1e-9, 1e-3),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RenormReport {
    pub masses: Vec<f64>,
    /// Sampled points of `U_n` that fell outside `U_{n+1}`.
    pub monotone_failures: u64,
    pub positive_mass: bool,
    pub nondecreasing_mass: bool,
    pub uncovered_probes: Vec<Vec<f64>>,
}

impl RenormReport {
    pub fn ok(&self) -> bool {
        self.monotone_failures == 0
            && self.positive_mass
            && self.nondecreasing_mass
            && self.uncovered_probes.is_empty()
    }
}

/// Sampled audit of the renormalization contract for `seq` against `mu`:
/// positive finite masses, inclusion `U_n ⊆ U_{n+1}` at measure-weighted
/// sample points, nondecreasing masses, and coverage of the given probes.
pub fn validate_renorm(
    seq: &RenormSequence,
    mu: &Measure,
    opts: &RenormCheckOptions,
) -> Result<RenormReport> {
    let mut masses = Vec::with_capacity(opts.n_checks as usize);
    let mut errs = Vec::with_capacity(opts.n_checks as usize);
    for n in 0..opts.n_checks {
        let est = measure::measure_of(
            mu,
            &seq.region(n),
            opts.tol,
            quad::derive_seed(opts.seed, n),
        )?;
        masses.push(est.value);
        errs.push(est.abs_error);
    }
    let positive_mass = masses.iter().all(|&m| m.is_finite() && m > 0.0);
    let nondecreasing_mass = masses
        .windows(2)
        .zip(errs.windows(2))
        .all(|(m, e)| m[1] - m[0] >= -3.0 * (e[0] + e[1]) - 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(quad::derive_seed(opts.seed, 0xC0FFEE));
    let mut monotone_failures = 0u64;
    for n in 0..opts.n_checks.saturating_sub(1) {
        let cur = seq.region(n);
        let next = seq.region(n + 1);
        for _ in 0..opts.samples_per_step {
            if let Some(x) = measure::sample_measure_point(mu, &cur, &mut rng, 256) {
                if !next.contains(&x) {
                    monotone_failures += 1;
                }
            }
        }
    }

    let uncovered_probes = opts
        .probes
        .iter()
        .filter(|p| !(0..opts.n_checks).any(|n| seq.region(n).contains(p)))
        .cloned()
        .collect();

    Ok(RenormReport { masses, monotone_failures, positive_mass, nondecreasing_mass, uncovered_probes })
}

/// `mu(U_n Δ V_n) / mu(U_n)` — the natural distance between two
/// renormalizations at step `n`. Vanishing ratios as `n` grows mean the two
/// families share all weak mean values.
pub fn symmetric_difference_ratio(
    a: &RenormSequence,
    b: &RenormSequence,
    mu: &Measure,
    n: u64,
    opts: &QuadOpts,
) -> Result<f64> {
    let ra = a.region(n);
    let rb = b.region(n);
    let base = quad::integrate_mass(mu, &ra, opts)?.value[0];
    let a_minus_b = Region::difference(ra.clone(), rb.clone())?;
    let b_minus_a = Region::difference(rb, ra)?;
    let opts_b = QuadOpts { seed: quad::derive_seed(opts.seed, 1), ..*opts };
    let d1 = quad::integrate_mass(mu, &a_minus_b, opts)?.value[0];
    let d2 = quad::integrate_mass(mu, &b_minus_a, &opts_b)?.value[0];
    Ok((d1 + d2) / base)
}
