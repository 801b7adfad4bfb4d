//! Weak and strong mean values.
//!
//! The weak mean value of `f` against a measure `mu` along a renormalization
//! sequence `U_n` is the limit of the partial averages
//! `a_n = (1/mu(U_n)) ∫_{U_n} f dmu`. The strong mean value exists when every
//! admissible renormalization gives the same limit; [`mv_check`] probes that
//! by running several families and comparing.

use serde::{Deserialize, Serialize};

use crate::detector::{Verdict, WindowDetector};
use crate::error::{Error, Result};
use crate::func::VectorFn;
use crate::measure::Measure;
use crate::quad::{self, QuadOpts, Tol};
use crate::region::Region;
use crate::renorm::RenormSequence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCriteria {
    /// Window spread below which the sequence counts as settled.
    pub eps: f64,
    /// How many trailing partial averages the spread is taken over.
    pub window: usize,
    /// Hard cap on the renormalization index.
    pub n_max: u64,
    /// Feed the detector Aitken-extrapolated values instead of raw averages.
    /// A heuristic accelerator for smoothly converging sequences; off by
    /// default.
    pub aitken: bool,
}

impl Default for ConvergenceCriteria {
    fn default() -> Self {
        ConvergenceCriteria { eps: 1e-3, window: 5, n_max: 200, aitken: false }
    }
}

impl ConvergenceCriteria {
    pub fn with_eps(eps: f64) -> Self {
        ConvergenceCriteria { eps, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// The trailing window settled; `value` is its mean.
    Converged,
    /// Bounded, persistent, non-shrinking spread.
    Oscillating,
    /// Iteration cap hit without a verdict; `value` is the last average.
    MaxIterations,
}

#[derive(Debug, Clone, Default)]
pub struct MeanValueHistory {
    pub n: Vec<u64>,
    pub mass: Vec<f64>,
    pub averages: Vec<Vec<f64>>,
    /// Trailing-window spread at each step (over however many entries exist).
    pub spread: Vec<f64>,
}

impl MeanValueHistory {
    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    fn push(&mut self, n: u64, mass: f64, avg: Vec<f64>, window: usize) {
        self.n.push(n);
        self.mass.push(mass);
        self.averages.push(avg);
        let tail = &self.averages[self.averages.len().saturating_sub(window)..];
        let d = tail[0].len();
        let mut s = 0.0f64;
        for i in 0..d {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in tail {
                lo = lo.min(v[i]);
                hi = hi.max(v[i]);
            }
            s = s.max(hi - lo);
        }
        self.spread.push(s);
    }

    /// Columns: `n,mu_Un,v0..v{d-1},spread`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.averages.first().map_or(1, |v| v.len());
        write!(w, "n,mu_Un")?;
        for i in 0..d {
            write!(w, ",v{i}")?;
        }
        writeln!(w, ",spread")?;
        for r in 0..self.len() {
            write!(w, "{},{}", self.n[r], fmt_full(self.mass[r]))?;
            for v in &self.averages[r] {
                write!(w, ",{}", fmt_full(*v))?;
            }
            writeln!(w, ",{}", fmt_full(self.spread[r]))?;
        }
        Ok(())
    }
}

/// Shortest decimal that round-trips.
fn fmt_full(x: f64) -> String {
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

#[derive(Debug, Clone)]
pub struct MeanValueResult {
    pub value: Vec<f64>,
    pub status: Status,
    /// Partial averages actually computed.
    pub steps: u64,
    /// Detector spread at the stopping step.
    pub spread: f64,
    pub history: MeanValueHistory,
}

impl MeanValueResult {
    pub fn scalar(&self) -> f64 {
        self.value[0]
    }
}

/// One normalized partial average `( ∫_{U} f dmu / mu(U), mu(U) )`.
///
/// The quadrature tolerance is derived from `eps` (a tenth of it, split
/// between mass and numerator), but never tighter than `opts.tol` — so a
/// caller chasing a very small window spread with cheap integrals can floor
/// the per-step effort through `opts`.
pub fn partial_average(
    f: &VectorFn,
    mu: &Measure,
    region: &Region,
    n: u64,
    eps: f64,
    opts: &QuadOpts,
) -> Result<(Vec<f64>, f64)> {
    let trel = (eps / 10.0).max(opts.tol.rel);
    let mass_opts = QuadOpts {
        tol: Tol { abs: opts.tol.abs, rel: trel / 2.0 },
        seed: quad::derive_seed(opts.seed, 0),
        budget: opts.budget,
    };
    let mass_est = quad::integrate_mass(mu, region, &mass_opts)?;
    let mass = mass_est.value[0];
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::ZeroMassRegion { n });
    }
    let num_opts = QuadOpts {
        tol: Tol { abs: opts.tol.abs.max(trel * mass / 2.0), rel: trel / 2.0 },
        seed: quad::derive_seed(opts.seed, 1),
        budget: opts.budget,
    };
    let num = quad::integrate(f, mu, region, &num_opts)?;
    Ok((num.value.iter().map(|v| v / mass).collect(), mass))
}

fn aitken_last(raw: &[Vec<f64>]) -> Vec<f64> {
    let k = raw.len();
    if k < 3 {
        return raw[k - 1].clone();
    }
    let (x0, x1, x2) = (&raw[k - 3], &raw[k - 2], &raw[k - 1]);
    let mut out = Vec::with_capacity(x2.len());
    for i in 0..x2.len() {
        let denom = x2[i] - 2.0 * x1[i] + x0[i];
        let num = x2[i] - x1[i];
        let scale = x2[i].abs().max(x1[i].abs()).max(x0[i].abs()).max(1.0);
        if denom.abs() <= 1e-12 * scale {
            out.push(x2[i]);
        } else {
            out.push(x2[i] - num * num / denom);
        }
    }
    out
}

struct Driver {
    det: WindowDetector,
    raw: Vec<Vec<f64>>,
    history: MeanValueHistory,
    crit: ConvergenceCriteria,
    outcome: Option<(Status, Vec<f64>)>,
}

impl Driver {
    fn new(crit: &ConvergenceCriteria) -> Driver {
        Driver {
            det: WindowDetector::new(crit.eps, crit.window),
            raw: Vec::new(),
            history: MeanValueHistory::default(),
            crit: *crit,
            outcome: None,
        }
    }

    /// Returns true when iteration should stop.
    fn step(&mut self, n: u64, mass: f64, avg: Vec<f64>) -> bool {
        self.raw.push(avg.clone());
        let fed = if self.crit.aitken { aitken_last(&self.raw) } else { avg.clone() };
        self.history.push(n, mass, avg, self.crit.window);
        match self.det.push(&fed) {
            Verdict::Continue => {
                self.outcome = Some((Status::MaxIterations, fed));
                false
            }
            Verdict::Converged(mean) => {
                self.outcome = Some((Status::Converged, mean));
                true
            }
            Verdict::Oscillating => {
                self.outcome = Some((Status::Oscillating, fed));
                true
            }
        }
    }

    fn finish(self) -> MeanValueResult {
        let (status, value) = self.outcome.expect("at least one step");
        MeanValueResult {
            value,
            status,
            steps: self.history.len() as u64,
            spread: self.det.spread(),
            history: self.history,
        }
    }
}

/// Weak mean value of `f` against `mu` along `seq`.
pub fn wmv(
    f: &VectorFn,
    mu: &Measure,
    seq: &RenormSequence,
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<MeanValueResult> {
    let mut driver = Driver::new(crit);
    for n in 0..=crit.n_max {
        let region = seq.region(n);
        check_sublevel_contained(&region)?;
        let step_opts = QuadOpts { seed: quad::derive_seed(opts.seed, n), ..*opts };
        let (avg, mass) = partial_average(f, mu, &region, n, crit.eps, &step_opts)?;
        if driver.step(n, mass, avg) {
            break;
        }
    }
    Ok(driver.finish())
}

/// Cesàro mean `lim (x_0 + … + x_n) / (n+1)` of the sequence `x_k = f(k)`.
///
/// Equivalent to [`wmv`] with the counting measure over prefixes, but runs
/// each step in O(1) via incremental sums, so very long horizons are cheap.
pub fn cesaro(f: &VectorFn, crit: &ConvergenceCriteria) -> Result<MeanValueResult> {
    let d = f.dim();
    let mut sum = vec![0.0; d];
    let mut comp = vec![0.0; d];
    let mut out = vec![0.0; d];
    let mut driver = Driver::new(crit);
    for n in 0..=crit.n_max {
        f.eval_into(&[n as f64], &mut out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonIntegrable(format!("sequence term {n} is not finite")));
        }
        for i in 0..d {
            let y = out[i] - comp[i];
            let t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
        let k = (n + 1) as f64;
        let avg: Vec<f64> = sum.iter().map(|s| s / k).collect();
        if driver.step(n, k, avg) {
            break;
        }
    }
    Ok(driver.finish())
}

/// Weak mean value along a continuum-indexed family `t ↦ U_t`, evaluated on
/// an increasing grid of parameters.
pub fn wmv_continuum(
    f: &VectorFn,
    mu: &Measure,
    family: &dyn Fn(f64) -> Region,
    t_grid: &[f64],
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<MeanValueResult> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty parameter grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("parameter grid must be strictly increasing".into()));
    }
    let mut driver = Driver::new(crit);
    for (k, &t) in t_grid.iter().enumerate().take(crit.n_max as usize + 1) {
        let region = family(t);
        check_sublevel_contained(&region)?;
        let step_opts = QuadOpts { seed: quad::derive_seed(opts.seed, k as u64), ..*opts };
        let (avg, mass) = partial_average(f, mu, &region, k as u64, crit.eps, &step_opts)?;
        if driver.step(k as u64, mass, avg) {
            break;
        }
    }
    Ok(driver.finish())
}

/// Sublevel regions carry a sampling box; if the sublevel set pokes through
/// the box boundary the box is clipping it and every average would be
/// silently wrong. Probe the faces and refuse.
fn check_sublevel_contained(region: &Region) -> Result<()> {
    use rand::{Rng, SeedableRng};
    if let Region::Sublevel { f, threshold, box_lower, box_upper } = region {
        let d = box_lower.len();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5B1E);
        let per_face = (256 / (2 * d)).max(8);
        let mut x = vec![0.0; d];
        for axis in 0..d {
            for face in 0..2 {
                for _ in 0..per_face {
                    for i in 0..d {
                        let u: f64 = rng.gen();
                        x[i] = box_lower[i] + (box_upper[i] - box_lower[i]) * u;
                    }
                    x[axis] = if face == 0 { box_lower[axis] } else { box_upper[axis] };
                    if f.eval(&x) <= *threshold {
                        return Err(Error::UnboundedSublevel);
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct StrongMeanReport {
    /// One converged (or not) run per renormalization family, keyed by label.
    pub runs: Vec<(String, MeanValueResult)>,
    /// All runs converged and all limits agree within `3 * eps`.
    pub strong: bool,
    pub max_disagreement: f64,
    /// Mean of the per-family limits, present when `strong`.
    pub value: Option<Vec<f64>>,
}

/// Probe for a strong (renormalization-independent) mean value by computing
/// the weak mean along each family and comparing limits.
pub fn mv_check(
    f: &VectorFn,
    mu: &Measure,
    seqs: &[RenormSequence],
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<StrongMeanReport> {
    if seqs.len() < 2 {
        return Err(Error::InvalidInput("a strong-mean check needs at least two families".into()));
    }
    let mut runs = Vec::with_capacity(seqs.len());
    for (i, seq) in seqs.iter().enumerate() {
        let run_opts = QuadOpts { seed: quad::derive_seed(opts.seed, 0x40 + i as u64), ..*opts };
        let res = wmv(f, mu, seq, crit, &run_opts)?;
        runs.push((seq.label().to_string(), res));
    }
    let all_converged = runs.iter().all(|(_, r)| r.status == Status::Converged);
    let mut max_disagreement = 0.0f64;
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let (a, b) = (&runs[i].1.value, &runs[j].1.value);
            for (x, y) in a.iter().zip(b) {
                max_disagreement = max_disagreement.max((x - y).abs());
            }
        }
    }
    let strong = all_converged && max_disagreement <= 3.0 * crit.eps;
    let value = strong.then(|| {
        let d = runs[0].1.value.len();
        let mut v = vec![0.0; d];
        for (_, r) in &runs {
            for i in 0..d {
                v[i] += r.value[i];
            }
        }
        for x in &mut v {
            *x /= runs.len() as f64;
        }
        v
    });
    Ok(StrongMeanReport { runs, strong, max_disagreement, value })
}

#[derive(Debug, Clone)]
pub struct NullityReport {
    pub result: MeanValueResult,
    /// The mean of `|<a,x>| / (1 + |<a,x>|)` over growing balls is 0 when
    /// `a = 0` and 1 otherwise; `is_null` applies the midpoint cut.
    pub is_null: bool,
    pub threshold: f64,
}

/// Detect whether the linear functional `x ↦ <a, x>` is null by averaging a
/// bounded transform of it over growing balls.
pub fn homology_nullity(
    a: &[f64],
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<NullityReport> {
    if a.is_empty() {
        return Err(Error::InvalidInput("coefficient vector must be nonempty".into()));
    }
    let coeffs = a.to_vec();
    let f = VectorFn::from_scalar(crate::func::ScalarFn::new(move |x: &[f64]| {
        let t: f64 = coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        t.abs() / (1.0 + t.abs())
    }));
    let mu = Measure::lebesgue(a.len());
    let seq = RenormSequence::balls(a.len());
    let result = wmv(&f, &mu, &seq, crit, opts)?;
    let threshold = 0.5;
    let is_null = result.value[0] < threshold;
    Ok(NullityReport { result, is_null, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::ScalarFn;

    fn crit(eps: f64, n_max: u64) -> ConvergenceCriteria {
        ConvergenceCriteria { eps, n_max, ..Default::default() }
    }

    #[test]
    fn constant_function_has_mean_one() {
        let f = VectorFn::constant(&[1.0]);
        let mu = Measure::lebesgue(1);
        let res = wmv(&f, &mu, &RenormSequence::cubes(1), &crit(1e-9, 50), &QuadOpts::default())
            .unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!((res.value[0] - 1.0).abs() < 1e-12);
        // Converges as soon as the window fills.
        assert_eq!(res.steps, 5);
    }

    #[test]
    fn dirac_mean_recovers_point_value() {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| x[0] * x[0] + 1.0));
        let mu = Measure::dirac(vec![0.5]);
        let res = wmv(&f, &mu, &RenormSequence::cubes(1), &crit(1e-9, 50), &QuadOpts::default())
            .unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!((res.value[0] - 1.25).abs() < 1e-12);

        // A point mass the first region misses is a contract violation: the
        // partial average is 0/0 there, and the run refuses honestly.
        let far = Measure::dirac(vec![3.0]);
        let err =
            wmv(&f, &far, &RenormSequence::cubes(1), &crit(1e-9, 50), &QuadOpts::default())
                .unwrap_err();
        assert!(matches!(err, Error::ZeroMassRegion { n: 0 }), "{err:?}");
    }

    #[test]
    fn integrable_functions_average_to_zero() {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| (-x[0] * x[0]).exp()));
        let mu = Measure::lebesgue(1);
        let res =
            wmv(&f, &mu, &RenormSequence::cubes(1), &crit(1e-6, 2000), &QuadOpts::default())
                .unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!(res.value[0].abs() < 6e-4, "{}", res.value[0]);
    }

    #[test]
    fn sine_over_symmetric_intervals_vanishes() {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| x[0].sin()));
        let mu = Measure::lebesgue(1);
        let res =
            wmv(&f, &mu, &RenormSequence::cubes(1), &crit(1e-6, 2000), &QuadOpts::default())
                .unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!(res.value[0].abs() < 1e-3, "{}", res.value[0]);
    }

    #[test]
    fn sine_over_halfwave_comb_does_not_vanish() {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| x[0].sin()));
        let mu = Measure::lebesgue(1);
        let res = wmv(
            &f,
            &mu,
            &RenormSequence::halfwave_comb(),
            &crit(2e-4, 2000),
            &QuadOpts::default(),
        )
        .unwrap();
        assert_eq!(res.status, Status::Converged);
        let expect = 2.0 / (5.0 * std::f64::consts::PI);
        assert!((res.value[0] - expect).abs() < 5e-3, "{} vs {expect}", res.value[0]);
    }

    #[test]
    fn finite_measure_mean_is_classical() {
        // Uniform density on a region the renormalization swallows quickly:
        // the mean value is the plain normalized integral.
        let f = VectorFn::from_scalar(ScalarFn::new(|x| x[0]));
        let bump = ScalarFn::new(|x: &[f64]| if (0.0..=4.0).contains(&x[0]) { 1.0 } else { 0.0 });
        let mu = Measure::density(1, bump);
        let res = wmv(&f, &mu, &RenormSequence::cubes(1), &crit(1e-5, 100), &QuadOpts::default())
            .unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!((res.value[0] - 2.0).abs() < 1e-3, "{}", res.value[0]);
    }

    #[test]
    fn cesaro_alternating_converges_to_zero() {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| if x[0] as u64 % 2 == 0 { 1.0 } else { -1.0 }));
        let c = ConvergenceCriteria { eps: 1e-4, n_max: 500_000, ..Default::default() };
        let res = cesaro(&f, &c).unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!(res.value[0].abs() < 1e-4, "{}", res.value[0]);
    }

    #[test]
    fn cesaro_matches_generic_counting_wmv() {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| 2.0 + 1.0 / (x[0] + 1.0)));
        let c = crit(1e-4, 400);
        let fast = cesaro(&f, &c).unwrap();
        let slow = wmv(
            &f,
            &Measure::counting(),
            &RenormSequence::prefixes(),
            &c,
            &QuadOpts::default(),
        )
        .unwrap();
        assert_eq!(fast.status, slow.status);
        assert_eq!(fast.steps, slow.steps);
        assert!((fast.value[0] - slow.value[0]).abs() < 1e-12);
    }

    #[test]
    fn oscillating_partial_averages_are_flagged() {
        // x_k = (2k+1) cos(pi k) makes the running average exactly (-1)^n.
        let f = VectorFn::from_scalar(ScalarFn::new(|x| {
            let k = x[0];
            (2.0 * k + 1.0) * (std::f64::consts::PI * k).cos()
        }));
        let res = cesaro(&f, &crit(1e-3, 500)).unwrap();
        assert_eq!(res.status, Status::Oscillating);
    }

    #[test]
    fn max_iterations_reported_honestly() {
        // 1/log(n+2) decays too slowly to settle within 40 steps at 1e-6.
        let f = VectorFn::from_scalar(ScalarFn::new(|x| 1.0 / (x[0] + 2.0).ln()));
        let res = cesaro(&f, &crit(1e-6, 40)).unwrap();
        assert_eq!(res.status, Status::MaxIterations);
        assert_eq!(res.steps, 41);
    }

    #[test]
    fn history_records_every_step() {
        let f = VectorFn::constant(&[2.0]);
        let mu = Measure::lebesgue(1);
        let res = wmv(&f, &mu, &RenormSequence::cubes(1), &crit(1e-9, 50), &QuadOpts::default())
            .unwrap();
        assert_eq!(res.history.len(), res.steps as usize);
        assert_eq!(res.history.n[0], 0);
        assert!((res.history.mass[0] - 2.0).abs() < 1e-12);
        let mut csv = Vec::new();
        res.history.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("n,mu_Un,v0,spread\n"), "{text}");
        assert_eq!(text.lines().count(), res.history.len() + 1);
    }

    #[test]
    fn strong_mean_of_constant_holds_across_families() {
        let f = VectorFn::constant(&[7.5]);
        let mu = Measure::lebesgue(2);
        let seqs = [
            RenormSequence::cubes(2),
            RenormSequence::balls(2),
            RenormSequence::cubes(2).translate(vec![1.0, -2.0]).unwrap(),
        ];
        let rep = mv_check(&f, &mu, &seqs, &crit(1e-6, 60), &QuadOpts::default()).unwrap();
        assert!(rep.strong, "disagreement {}", rep.max_disagreement);
        assert!((rep.value.unwrap()[0] - 7.5).abs() < 1e-9);
    }

    #[test]
    fn indicator_of_half_space_is_not_strong() {
        // Mean of 1_{x >= 0} is 1/2 over symmetric cubes but 1 over cubes
        // shifted far right: renormalization-dependent, hence not strong.
        let f = VectorFn::from_scalar(ScalarFn::new(|x| if x[0] >= 0.0 { 1.0 } else { 0.0 }));
        let mu = Measure::lebesgue(1);
        let shifted = RenormSequence::from_fn("right-shifted cubes", |n| {
            let h = (n + 1) as f64;
            Region::interval(-h + 2.0 * h * 0.9, h + 2.0 * h * 0.9).unwrap()
        });
        let seqs = [RenormSequence::cubes(1), shifted];
        let rep = mv_check(&f, &mu, &seqs, &crit(1e-6, 100), &QuadOpts::default()).unwrap();
        assert!(!rep.strong);
        assert!(rep.max_disagreement > 0.4, "{}", rep.max_disagreement);
    }

    #[test]
    fn continuum_family_matches_discrete() {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| (-x[0] * x[0]).exp()));
        let mu = Measure::lebesgue(1);
        let grid: Vec<f64> = (0..60).map(|k| 20.0 * 1.5f64.powi(k)).collect();
        let res = wmv_continuum(
            &f,
            &mu,
            &|t| Region::interval(-t, t).unwrap(),
            &grid,
            &crit(1e-6, 200),
            &QuadOpts::default(),
        )
        .unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!(res.value[0].abs() < 1e-4, "{}", res.value[0]);
    }

    #[test]
    fn clipped_sublevel_boxes_are_rejected() {
        let grid = [1.0, 2.0, 3.0];
        // |x| <= t pokes through the fixed box [-2, 2] once t reaches 2.
        let res = wmv_continuum(
            &VectorFn::from_scalar(ScalarFn::new(|x| x[0] + 1.0)),
            &Measure::lebesgue(1),
            &|t| {
                Region::sublevel(ScalarFn::new(|x: &[f64]| x[0].abs()), t, vec![-2.0], vec![2.0])
                    .unwrap()
            },
            &grid,
            &crit(1e-3, 10),
            &QuadOpts { tol: Tol::mixed(1e-9, 2e-2), ..Default::default() },
        );
        assert!(matches!(res, Err(Error::UnboundedSublevel)), "{res:?}");
    }

    #[test]
    fn zero_functional_is_null_and_nonzero_is_not() {
        let c = ConvergenceCriteria { eps: 0.02, n_max: 60, ..Default::default() };
        let opts = QuadOpts { tol: Tol::mixed(1e-9, 2e-3), seed: 7, ..Default::default() };
        let nul = homology_nullity(&[0.0, 0.0], &c, &opts).unwrap();
        assert!(nul.is_null);
        assert!(nul.result.value[0].abs() < 1e-12);

        let non = homology_nullity(&[1.0, 0.0], &c, &opts).unwrap();
        assert!(!non.is_null, "value {}", non.result.value[0]);
        assert!(non.result.value[0] > 0.7);
    }

    #[test]
    fn aitken_accelerates_geometric_tails() {
        // Partial averages approach 1 like c * 0.8^n; Aitken should lock on
        // far sooner than the raw window.
        let f = VectorFn::from_scalar(ScalarFn::new(|x| {
            let n = x[0];
            // Telescoping term: running average becomes 1 + 0.8^(n+1).
            let a_n = 1.0 + 0.8f64.powf(n + 1.0);
            let a_prev = if n == 0.0 { 0.0 } else { 1.0 + 0.8f64.powf(n) };
            (n + 1.0) * a_n - n * a_prev
        }));
        let mut c = crit(1e-9, 400);
        let raw = cesaro(&f, &c).unwrap();
        c.aitken = true;
        let fast = cesaro(&f, &c).unwrap();
        assert_eq!(fast.status, Status::Converged);
        assert!((fast.value[0] - 1.0).abs() < 1e-6, "{}", fast.value[0]);
        assert!(fast.steps < raw.steps, "{} !< {}", fast.steps, raw.steps);
    }
}
