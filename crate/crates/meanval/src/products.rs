//! Mean values on countable product spaces via cylindrical functions.
//!
//! A product space carries one measure and one renormalization family per
//! factor; the renormalization of the product at step `n` is the product of
//! the factor regions at step `n`. A cylindrical function reads only finitely
//! many factors, and for such functions the masses of all unread factors
//! cancel between numerator and denominator — so the mean value over the
//! infinite product reduces exactly to a finite-dimensional one, no matter
//! how many (or what) factors sit outside the support. [`wmv_cylindrical`]
//! computes it on the minimal support; [`wmv_cylindrical_on`] lets you pick a
//! larger support to watch the cancellation happen numerically.
//!
//! Functions that are not cylindrical but are uniform limits of cylindrical
//! approximants inherit a mean value in the limit; [`wmv_uniform_limit`]
//! evaluates a finite schedule of approximants and reports the limit with an
//! honest error bound.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::func::VectorFn;
use crate::meanvalue::{self, ConvergenceCriteria, MeanValueResult, Status};
use crate::measure::{self, Measure};
use crate::quad::{self, QuadOpts};
use crate::region::Region;
use crate::renorm::RenormSequence;

#[derive(Debug, Clone)]
pub struct Factor {
    pub measure: Measure,
    pub renorm: RenormSequence,
}

impl Factor {
    pub fn new(measure: Measure, renorm: RenormSequence) -> Factor {
        Factor { measure, renorm }
    }

    /// The standard line factor: Lebesgue measure with symmetric intervals.
    pub fn lebesgue_line() -> Factor {
        Factor { measure: Measure::lebesgue(1), renorm: RenormSequence::cubes(1) }
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }
}

/// A countable product of measured factors: finitely many explicit ones,
/// optionally followed by infinitely many copies of a tail factor.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    named: Vec<Factor>,
    tail: Option<Factor>,
}

impl ProductSpace {
    pub fn new(named: Vec<Factor>) -> Result<ProductSpace> {
        if named.is_empty() {
            return Err(Error::InvalidInput("a product needs at least one factor".into()));
        }
        Ok(ProductSpace { named, tail: None })
    }

    /// Append infinitely many copies of `tail` after the named factors.
    pub fn with_tail(mut self, tail: Factor) -> ProductSpace {
        self.tail = Some(tail);
        self
    }

    /// Countably many copies of one factor.
    pub fn power(factor: Factor) -> ProductSpace {
        ProductSpace { named: Vec::new(), tail: Some(factor) }
    }

    pub fn factor(&self, i: usize) -> Result<&Factor> {
        if i < self.named.len() {
            return Ok(&self.named[i]);
        }
        self.tail.as_ref().ok_or_else(|| {
            Error::InvalidInput(format!(
                "factor {i} out of range: {} named factors and no tail",
                self.named.len()
            ))
        })
    }

    pub fn named_len(&self) -> usize {
        self.named.len()
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }

    /// Product measure and renormalization of the factors with the given
    /// indices, in index order.
    pub fn truncate(&self, indices: &[usize]) -> Result<(Measure, RenormSequence)> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("empty factor selection".into()));
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("factor indices must be strictly increasing".into()));
        }
        let mut measures = Vec::with_capacity(indices.len());
        let mut renorms = Vec::with_capacity(indices.len());
        for &i in indices {
            let f = self.factor(i)?;
            measures.push(f.measure.clone());
            renorms.push(f.renorm.clone());
        }
        let measure = if measures.len() == 1 {
            measures.pop().unwrap()
        } else {
            Measure::product(measures)?
        };
        let label = format!("product[{indices:?}]");
        let seq = RenormSequence::from_fn(label, move |n| {
            if renorms.len() == 1 {
                renorms[0].region(n)
            } else {
                Region::product(renorms.iter().map(|r| r.region(n)).collect())
                    .expect("validated factors")
            }
        });
        Ok((measure, seq))
    }
}

/// A function on the product that reads only the factors listed in
/// `support` (strictly increasing indices). The kernel receives the
/// concatenated coordinates of exactly those factors.
#[derive(Debug, Clone)]
pub struct CylindricalFunction {
    pub support: Vec<usize>,
    pub kernel: VectorFn,
}

impl CylindricalFunction {
    pub fn new(support: Vec<usize>, kernel: VectorFn) -> Result<CylindricalFunction> {
        if support.is_empty() {
            return Err(Error::InvalidInput("cylindrical support must be nonempty".into()));
        }
        if support.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "cylindrical support indices must be strictly increasing".into(),
            ));
        }
        Ok(CylindricalFunction { support, kernel })
    }
}

/// Mean value of a cylindrical function over the whole product, computed on
/// its minimal support. Exactness of the off-support cancellation is what
/// makes this well-defined; see the module docs.
pub fn wmv_cylindrical(
    space: &ProductSpace,
    cyl: &CylindricalFunction,
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<MeanValueResult> {
    wmv_cylindrical_on(space, cyl, &cyl.support, crit, opts)
}

/// Mean value of a cylindrical function computed over an enlarged support:
/// `indices` must contain the function's support. The kernel is extended by
/// ignoring the extra coordinates, and the result must match
/// [`wmv_cylindrical`] up to quadrature error — a direct numerical check of
/// the cylindrical-extension invariance.
pub fn wmv_cylindrical_on(
    space: &ProductSpace,
    cyl: &CylindricalFunction,
    indices: &[usize],
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<MeanValueResult> {
    for s in &cyl.support {
        if !indices.contains(s) {
            return Err(Error::InvalidInput(format!(
                "computation support {indices:?} does not contain function support index {s}"
            )));
        }
    }
    let (measure, seq) = space.truncate(indices)?;
    // Offsets of each selected factor inside the concatenated point.
    let mut offsets = Vec::with_capacity(indices.len());
    let mut acc = 0usize;
    for &i in indices {
        offsets.push(acc);
        acc += space.factor(i)?.dim();
    }
    let mut slots = Vec::new(); // (offset into big point, len) per support factor
    for s in &cyl.support {
        let pos = indices.iter().position(|i| i == s).unwrap();
        slots.push((offsets[pos], space.factor(*s)?.dim()));
    }
    let support_dim: usize = slots.iter().map(|(_, l)| l).sum();
    let kernel = cyl.kernel.clone();
    let f = VectorFn::new(kernel.dim(), move |x, out| {
        let mut packed = Vec::with_capacity(support_dim);
        for (off, len) in &slots {
            packed.extend_from_slice(&x[*off..*off + *len]);
        }
        kernel.eval_into(&packed, out);
    });
    meanvalue::wmv(&f, &measure, &seq, crit, opts)
}

/// A finite schedule of cylindrical approximants `f_N` with uniform bounds
/// `sup |f - f_N| <= eps_N`. Supports must grow and bounds must not.
#[derive(Debug, Clone)]
pub struct ApproximantSchedule {
    terms: Vec<(CylindricalFunction, f64)>,
}

impl ApproximantSchedule {
    pub fn new(terms: Vec<(CylindricalFunction, f64)>) -> Result<ApproximantSchedule> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("empty approximant schedule".into()));
        }
        for (i, ((a, ea), (b, eb))) in terms.iter().zip(terms.iter().skip(1)).enumerate() {
            if eb > ea {
                return Err(Error::InvalidInput(format!(
                    "uniform bounds must be nonincreasing, but term {} has {} after {}",
                    i + 1,
                    eb,
                    ea
                )));
            }
            if !a.support.iter().all(|s| b.support.contains(s)) {
                return Err(Error::InvalidInput(format!(
                    "supports must be nested, but term {} drops a factor of term {i}",
                    i + 1
                )));
            }
        }
        if terms.iter().any(|(_, e)| !(*e >= 0.0)) {
            return Err(Error::InvalidInput("uniform bounds must be nonnegative".into()));
        }
        Ok(ApproximantSchedule { terms })
    }

    pub fn terms(&self) -> &[(CylindricalFunction, f64)] {
        &self.terms
    }
}

#[derive(Debug, Clone)]
pub struct ScheduleResult {
    pub per_term: Vec<MeanValueResult>,
    /// Mean value of the last approximant — the best available estimate of
    /// the limit mean value.
    pub value: Vec<f64>,
    /// Honest bound on the distance to the true limit: the trailing
    /// term-to-term movement plus twice the final uniform bound.
    pub bound: f64,
}

/// Mean value of a uniform limit of cylindrical functions. Every term must
/// converge ([`Error::TermDiverged`] otherwise). If `wmv` of the limit
/// function exists it differs from term `N` by at most `2 * eps_N`, so the
/// reported bound is term movement plus `2 * eps_last`.
pub fn wmv_uniform_limit(
    space: &ProductSpace,
    schedule: &ApproximantSchedule,
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<ScheduleResult> {
    let mut per_term = Vec::with_capacity(schedule.terms.len());
    for (i, (cyl, _)) in schedule.terms.iter().enumerate() {
        let term_opts = QuadOpts { seed: quad::derive_seed(opts.seed, 0x9000 + i as u64), ..*opts };
        let res = wmv_cylindrical(space, cyl, crit, &term_opts)?;
        if res.status != Status::Converged {
            return Err(Error::TermDiverged { index: i });
        }
        per_term.push(res);
    }
    let last = per_term.last().unwrap();
    let value = last.value.clone();
    let mut movement = 0.0f64;
    if per_term.len() >= 2 {
        let prev = &per_term[per_term.len() - 2];
        for (a, b) in prev.value.iter().zip(&value) {
            movement = movement.max((a - b).abs());
        }
    }
    let eps_last = schedule.terms.last().unwrap().1;
    Ok(ScheduleResult { per_term, value, bound: movement + 2.0 * eps_last })
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest observed `|target - f_N| - eps_N` (positive means violated).
    pub max_excess: f64,
}

/// Sampled audit that `|target - f_N| <= eps_N` really holds on the factors
/// both functions read. Points are drawn factor-by-factor from the measures
/// restricted to the renormalization regions at `level`.
pub fn check_uniform_bounds(
    space: &ProductSpace,
    schedule: &ApproximantSchedule,
    target: &CylindricalFunction,
    level: u64,
    samples: usize,
    seed: u64,
) -> Result<BoundsReport> {
    for (i, (cyl, _)) in schedule.terms.iter().enumerate() {
        if !cyl.support.iter().all(|s| target.support.contains(s)) {
            return Err(Error::InvalidInput(format!(
                "term {i} reads factors the target does not"
            )));
        }
    }
    let mut offsets = std::collections::HashMap::new();
    let mut acc = 0usize;
    for &s in &target.support {
        offsets.insert(s, acc);
        acc += space.factor(s)?.dim();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    let mut checked = 0usize;
    let mut point = vec![0.0; acc];
    for _ in 0..samples {
        for &s in &target.support {
            let fac = space.factor(s)?;
            let region = fac.renorm.region(level);
            let x = measure::sample_measure_point(&fac.measure, &region, &mut rng, 512)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("could not sample factor {s} at level {level}"))
                })?;
            let off = offsets[&s];
            point[off..off + x.len()].copy_from_slice(&x);
        }
        let tv = target.kernel.eval(&point);
        for (cyl, eps) in &schedule.terms {
            let mut sub = Vec::new();
            for &s in &cyl.support {
                let off = offsets[&s];
                let len = space.factor(s)?.dim();
                sub.extend_from_slice(&point[off..off + len]);
            }
            let av = cyl.kernel.eval(&sub);
            let dist = tv
                .iter()
                .zip(&av)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let excess = dist - eps;
            max_excess = max_excess.max(excess);
            if excess > 1e-12 {
                violations += 1;
            }
            checked += 1;
        }
    }
    Ok(BoundsReport { checked, violations, max_excess })
}

/// A membership predicate over the concatenated coordinates of a factor
/// selection, used to sanity-check where a cylindrical extension may be
/// evaluated.
#[derive(Clone)]
pub struct AdmissibleDomain {
    pub indices: Vec<usize>,
    pub contains: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
}

impl std::fmt::Debug for AdmissibleDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AdmissibleDomain").field("indices", &self.indices).finish()
    }
}

#[derive(Debug, Clone)]
pub struct AdmissibleReport {
    pub checked: usize,
    pub failures: usize,
    pub fail_fraction: f64,
    /// 95% normal-approximation half-width on the failure fraction.
    pub ci_halfwidth: f64,
}

/// Stability of domain membership under single-factor resampling: starting
/// from `base` (which must be admissible), each trial resamples one factor
/// coordinate from its measure at `level` and re-tests membership. A high
/// failure fraction means the domain is fragile around `base` and the
/// cylindrical extension should not be trusted there.
pub fn check_admissible(
    space: &ProductSpace,
    domain: &AdmissibleDomain,
    base: &[f64],
    level: u64,
    samples: usize,
    seed: u64,
) -> Result<AdmissibleReport> {
    let mut dims = Vec::with_capacity(domain.indices.len());
    let mut total = 0usize;
    for &i in &domain.indices {
        let d = space.factor(i)?.dim();
        dims.push(d);
        total += d;
    }
    if base.len() != total {
        return Err(Error::DimensionMismatch { expected: total, found: base.len() });
    }
    if !(domain.contains)(base) {
        return Err(Error::InvalidInput("base point is not in the domain".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut point = base.to_vec();
    for t in 0..samples {
        let slot = t % domain.indices.len();
        let fac = space.factor(domain.indices[slot])?;
        let region = fac.renorm.region(level);
        let x = measure::sample_measure_point(&fac.measure, &region, &mut rng, 512)
            .ok_or_else(|| Error::InvalidInput("factor sampling failed".into()))?;
        let off: usize = dims[..slot].iter().sum();
        point.copy_from_slice(base);
        point[off..off + x.len()].copy_from_slice(&x);
        if !(domain.contains)(&point) {
            failures += 1;
        }
    }
    let p = failures as f64 / samples.max(1) as f64;
    let ci = 1.96 * (p * (1.0 - p) / samples.max(1) as f64).sqrt();
    Ok(AdmissibleReport { checked: samples, failures, fail_fraction: p, ci_halfwidth: ci })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::ScalarFn;

    fn crit(eps: f64, n_max: u64) -> ConvergenceCriteria {
        ConvergenceCriteria { eps, n_max, ..Default::default() }
    }

    /// A line factor whose windows double: partial averages of integrable
    /// kernels reach the detector's window in ~15 steps instead of ~1000.
    fn geometric_line() -> Factor {
        Factor::new(Measure::lebesgue(1), RenormSequence::geometric_cubes(1))
    }

    fn gauss_pair() -> CylindricalFunction {
        // Reads factors 0 and 2 of the product.
        CylindricalFunction::new(
            vec![0, 2],
            VectorFn::from_scalar(ScalarFn::new(|x| (-(x[0] * x[0] + x[1] * x[1])).exp())),
        )
        .unwrap()
    }

    #[test]
    fn support_enlargement_is_invariant() {
        let space = ProductSpace::power(geometric_line());
        let cyl = gauss_pair();
        let c = crit(1e-5, 60);
        let opts = QuadOpts::default();
        let minimal = wmv_cylindrical(&space, &cyl, &c, &opts).unwrap();
        let enlarged = wmv_cylindrical_on(&space, &cyl, &[0, 1, 2], &c, &opts).unwrap();
        assert_eq!(minimal.status, Status::Converged);
        assert_eq!(enlarged.status, Status::Converged);
        // Both integrable bumps average to zero against growing volume.
        assert!(minimal.value[0].abs() < 1e-3);
        assert!((minimal.value[0] - enlarged.value[0]).abs() < 1e-3);
    }

    #[test]
    fn constant_cylindrical_mean_is_exact_in_any_support() {
        let space = ProductSpace::power(Factor::lebesgue_line());
        let cyl =
            CylindricalFunction::new(vec![1], VectorFn::constant(&[4.25])).unwrap();
        let c = crit(1e-9, 50);
        let a = wmv_cylindrical(&space, &cyl, &c, &QuadOpts::default()).unwrap();
        let b = wmv_cylindrical_on(&space, &cyl, &[0, 1, 3], &c, &QuadOpts::default()).unwrap();
        assert!((a.value[0] - 4.25).abs() < 1e-12);
        assert!((b.value[0] - 4.25).abs() < 1e-12);
    }

    #[test]
    fn mixed_factor_products_report_masses() {
        // One continuous factor, one counting factor: masses factorize
        // exactly even though generic integration would not apply.
        let space = ProductSpace::new(vec![
            Factor::lebesgue_line(),
            Factor::new(Measure::counting(), RenormSequence::prefixes()),
        ])
        .unwrap();
        let (measure, seq) = space.truncate(&[0, 1]).unwrap();
        let est = quad::integrate_mass(&measure, &seq.region(4), &QuadOpts::default()).unwrap();
        assert_eq!(est.value[0], 50.0); // [-5,5] x {0..4} -> 10 * 5
    }

    #[test]
    fn schedule_limit_with_honest_bound() {
        // f_N = sum of N separated bumps; the mean of each term is 0, the
        // uniform bounds shrink geometrically, and the limit mean is 0.
        let space = ProductSpace::power(geometric_line());
        let mut terms = Vec::new();
        for n in 1..=3usize {
            let kernel = VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| 0.5f64.powi(i as i32) * (-v * v).exp())
                    .sum()
            }));
            let support: Vec<usize> = (0..n).collect();
            let eps = 0.5f64.powi(n as i32); // tail sum of dropped bumps
            terms.push((CylindricalFunction::new(support, kernel).unwrap(), eps));
        }
        let schedule = ApproximantSchedule::new(terms).unwrap();
        // eps 2e-3 keeps the per-step quadrature tolerance coarse enough for
        // the 3-dimensional sum-of-slabs integrand.
        let res = wmv_uniform_limit(&space, &schedule, &crit(2e-3, 40), &QuadOpts::default())
            .unwrap();
        assert_eq!(res.per_term.len(), 3);
        assert!(res.value[0].abs() < 5e-3, "{}", res.value[0]);
        assert!(res.bound <= 0.26, "{}", res.bound);
        assert!(res.bound >= 2.0 * 0.125);
    }

    #[test]
    fn schedule_validation_rejects_bad_input() {
        let c1 = CylindricalFunction::new(vec![0], VectorFn::constant(&[0.0])).unwrap();
        let c2 = CylindricalFunction::new(vec![0, 1], VectorFn::constant(&[0.0])).unwrap();
        // Growing bounds refused.
        assert!(ApproximantSchedule::new(vec![(c1.clone(), 0.1), (c2.clone(), 0.2)]).is_err());
        // Shrinking supports refused.
        assert!(ApproximantSchedule::new(vec![(c2.clone(), 0.2), (c1.clone(), 0.1)]).is_err());
        assert!(ApproximantSchedule::new(vec![(c1, 0.2), (c2, 0.1)]).is_ok());
    }

    #[test]
    fn uniform_bound_audit_catches_lies() {
        let space = ProductSpace::power(Factor::lebesgue_line());
        let target = CylindricalFunction::new(
            vec![0, 1],
            VectorFn::from_scalar(ScalarFn::new(|x| (-x[0] * x[0]).exp() + 0.3 * x[1].sin())),
        )
        .unwrap();
        let approx = CylindricalFunction::new(
            vec![0],
            VectorFn::from_scalar(ScalarFn::new(|x| (-x[0] * x[0]).exp())),
        )
        .unwrap();
        // The dropped term has sup 0.3: claiming 0.3 holds, claiming 0.1
        // does not.
        let honest = ApproximantSchedule::new(vec![(approx.clone(), 0.3)]).unwrap();
        let rep = check_uniform_bounds(&space, &honest, &target, 3, 400, 11).unwrap();
        assert_eq!(rep.violations, 0, "{rep:?}");

        let lying = ApproximantSchedule::new(vec![(approx, 0.1)]).unwrap();
        let rep = check_uniform_bounds(&space, &lying, &target, 3, 400, 11).unwrap();
        assert!(rep.violations > 0, "{rep:?}");
        assert!(rep.max_excess > 0.1, "{rep:?}");
    }

    #[test]
    fn admissibility_is_stable_for_box_domains() {
        let space = ProductSpace::power(Factor::lebesgue_line());
        // Domain: both coordinates within the level-9 window [-10, 10].
        let wide = AdmissibleDomain {
            indices: vec![0, 1],
            contains: Arc::new(|x: &[f64]| x.iter().all(|v| v.abs() <= 10.0)),
        };
        let rep = check_admissible(&space, &wide, &[0.0, 0.0], 9, 2000, 5).unwrap();
        assert_eq!(rep.failures, 0, "{rep:?}");

        // Domain: both coordinates in [-1, 1] — resampling at level 9
        // escapes it most of the time.
        let narrow = AdmissibleDomain {
            indices: vec![0, 1],
            contains: Arc::new(|x: &[f64]| x.iter().all(|v| v.abs() <= 1.0)),
        };
        let rep = check_admissible(&space, &narrow, &[0.0, 0.0], 9, 2000, 5).unwrap();
        assert!(rep.fail_fraction > 0.8, "{rep:?}");
        assert!(rep.ci_halfwidth < 0.05);
    }
}
