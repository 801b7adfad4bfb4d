//! Acceptance battery: one test per advertised guarantee of the crate, each
//! ending in a single PASS/FAIL line with the measured residual and the
//! tolerance it is held to. Tolerances are part of the contract — loosening
//! them here is the same as weakening the library's claims.
//!
//! All randomness is seeded, so every run is reproducible.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use meanval::asymptotics::{self, ScaleClass};
use meanval::config::{self, RunConfig};
use meanval::hilbert::{Flag, HilbertFn};
use meanval::meanvalue::{self, ConvergenceCriteria, Status};
use meanval::products::{
    wmv_cylindrical, wmv_uniform_limit, ApproximantSchedule, CylindricalFunction, Factor,
    ProductSpace,
};
use meanval::quad::{QuadOpts, Tol};
use meanval::region::BallNorm;
use meanval::{Measure, Region, RenormSequence, ScalarFn, VectorFn};

fn verdict(name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("{tag} {name} — {detail}");
    assert!(ok, "{tag} {name} — {detail}");
}

fn crit(eps: f64, n_max: u64) -> ConvergenceCriteria {
    ConvergenceCriteria { eps, n_max, ..Default::default() }
}

fn opts_rel(rel: f64, seed: u64) -> QuadOpts {
    QuadOpts { tol: Tol::mixed(1e-9, rel), seed, ..Default::default() }
}

/// Point masses are averaged exactly: the mean along any window family whose
/// first window already holds the atom is the function value at the atom.
#[test]
fn a01_point_mass_means_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let mut worst = 0.0f64;
    let mut all_converged = true;
    for case in 0..20u64 {
        let d = 1 + (case as usize) % 3;
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.9..0.9)).collect();
        let (a, b, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (p, q) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let f = VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| {
            let prod: f64 = x.iter().product();
            let norm2: f64 = x.iter().map(|v| v * v).sum();
            a + b * (x[0] + c).sin() + p * prod + q * norm2
        }));
        let expected = f.eval(&x)[0];
        let res = meanvalue::wmv(
            &f,
            &Measure::dirac(x.clone()),
            &RenormSequence::cubes(d),
            &crit(1e-6, 10),
            &QuadOpts::default(),
        )
        .unwrap();
        all_converged &= res.status == Status::Converged;
        worst = worst.max((res.scalar() - expected).abs());
    }
    verdict(
        "a01 point-mass means are exact",
        all_converged && worst <= 1e-12,
        &format!("20 random (f, x): worst |wmv - f(x)| = {worst:.3e} (tol 1e-12)"),
    );
}

/// Against a finite measure the renormalized mean collapses to the classical
/// normalized integral.
#[test]
fn a02_finite_measure_mean_is_the_classical_average() {
    let gauss = Measure::density(1, ScalarFn::new(|x: &[f64]| (-x[0] * x[0]).exp()));
    let seq = RenormSequence::cubes(1);
    let c = crit(1e-5, 60);
    // Closed forms: ∫cos·e^{-x²} = √π e^{-1/4}, ∫e^{-2x²} = √(π/2).
    let cases: Vec<(VectorFn, f64)> = vec![
        (VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| x[0].cos())), (-0.25f64).exp()),
        (
            VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| (-x[0] * x[0]).exp())),
            std::f64::consts::FRAC_1_SQRT_2,
        ),
    ];
    let mut worst = 0.0f64;
    let mut all_converged = true;
    for (i, (f, exact)) in cases.iter().enumerate() {
        let res = meanvalue::wmv(f, &gauss, &seq, &c, &opts_rel(1e-6, 20 + i as u64)).unwrap();
        all_converged &= res.status == Status::Converged;
        worst = worst.max((res.scalar() - exact).abs());
    }
    verdict(
        "a02 finite-measure mean matches the classical average",
        all_converged && worst <= 1e-4,
        &format!("worst |wmv - ∫f dμ / μ(R)| = {worst:.3e} (tol 1e-4)"),
    );
}

/// Integrable functions average to zero against an infinite-mass measure.
#[test]
fn a03_integrable_decay_has_null_mean() {
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| (-x[0] * x[0]).exp()));
    let res = meanvalue::wmv(
        &f,
        &Measure::lebesgue(1),
        &RenormSequence::cubes(1),
        &crit(1e-6, 2400),
        &QuadOpts::default(),
    )
    .unwrap();
    verdict(
        "a03 integrable decay has a null mean",
        res.status == Status::Converged && res.scalar().abs() <= 1e-3,
        &format!("|wmv(e^(-x²))| = {:.3e} after {} windows (tol 1e-3)", res.scalar().abs(), res.steps),
    );
}

/// The mean of sin depends on the window family: symmetric cubes kill it,
/// a half-wave comb retains 2/(5π); hence no strong mean.
#[test]
fn a04_oscillation_depends_on_the_window_family() {
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| x[0].sin()));
    let rep = meanvalue::mv_check(
        &f,
        &Measure::lebesgue(1),
        &[RenormSequence::cubes(1), RenormSequence::halfwave_comb()],
        &crit(2e-4, 160),
        &QuadOpts::default(),
    )
    .unwrap();
    let by_label = |l: &str| {
        rep.runs
            .iter()
            .find(|(label, _)| label.starts_with(l))
            .map(|(_, r)| r)
            .expect("family ran")
    };
    let cubes = by_label("cubes");
    let comb = by_label("halfwave");
    let target = 2.0 / (5.0 * std::f64::consts::PI);
    let e_cubes = cubes.scalar().abs();
    let e_comb = (comb.scalar() - target).abs();
    let ok = cubes.status == Status::Converged
        && comb.status == Status::Converged
        && e_cubes <= 1e-3
        && e_comb <= 5e-3
        && !rep.strong;
    verdict(
        "a04 oscillation depends on the window family",
        ok,
        &format!(
            "|cube mean| = {e_cubes:.2e} (tol 1e-3), |comb mean - 2/(5π)| = {e_comb:.2e} (tol 5e-3), strong = {}",
            rep.strong
        ),
    );
}

/// Cesàro means: the alternating sequence averages to zero, convergent
/// sequences average to their limit, and a million terms stay cheap.
#[test]
fn a05_cesaro_means_of_sequences() {
    let started = Instant::now();
    let alternating = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
        if (x[0] as i64) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }));
    let r1 = meanvalue::cesaro(&alternating, &crit(1.25e-6, 1_000_000)).unwrap();

    let limit = 0.75;
    let convergent =
        VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| limit + 0.5f64.powi(x[0] as i32)));
    let r2 = meanvalue::cesaro(&convergent, &crit(5e-7, 20_000)).unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    let e1 = r1.scalar().abs();
    let e2 = (r2.scalar() - limit).abs();
    let ok = r1.status == Status::Converged
        && r2.status == Status::Converged
        && e1 <= 1e-6
        && e2 <= 1e-3
        && elapsed < 5.0;
    verdict(
        "a05 cesàro means of sequences",
        ok,
        &format!(
            "|mean(±1)| = {e1:.2e} (tol 1e-6), |mean(u_n) - L| = {e2:.2e} (tol 1e-3), {elapsed:.2}s (< 5s)"
        ),
    );
}

/// The mean against a sum of measures is the asymptotic-weight mixture of
/// the individual means, across randomized density pairs.
#[test]
fn a06_measure_sums_mix_with_scale_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC6);
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| if x[0] >= 0.0 { 1.0 } else { 0.0 }));
    let seq = RenormSequence::geometric_cubes(1);
    let c = crit(1e-5, 60);
    let mut worst_mix = 0.0f64;
    let mut worst_direct = 0.0f64;
    for case in 0..10u64 {
        let c_mu = rng.gen_range(0.5..2.0);
        let c_nu = rng.gen_range(0.5..2.0);
        let h = rng.gen_range(0.25..2.0);
        let b = rng.gen_range(0.25..3.0);
        let mu = Measure::uniform(1, c_mu);
        let nu = Measure::density(
            1,
            ScalarFn::new(move |x: &[f64]| {
                let step = if x[0] >= 0.0 { h } else { 0.0 };
                c_nu * (1.0 + step) + b * (-x[0] * x[0]).exp()
            }),
        );
        let rep =
            asymptotics::wmv_measure_sum(&f, &mu, &nu, &seq, &c, &opts_rel(1e-6, 0x60 + case))
                .unwrap();
        // The bump is integrable, so the limit ignores it.
        let exact = (c_mu + c_nu * (1.0 + h)) / (2.0 * c_mu + c_nu * (2.0 + h));
        worst_mix = worst_mix.max(rep.residual);
        worst_direct = worst_direct.max((rep.direct.scalar() - exact).abs());
    }
    verdict(
        "a06 measure sums mix with scale weights",
        worst_mix <= 1e-3 && worst_direct <= 1e-3,
        &format!(
            "10 random (μ, ν): worst mixing residual = {worst_mix:.2e}, worst |direct - closed form| = {worst_direct:.2e} (tol 1e-3)"
        ),
    );
}

/// Measures sharing a mean value form a convex cone: convex combinations
/// keep the common mean.
#[test]
fn a07_convex_combinations_preserve_a_shared_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC7);
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| if x[0] >= 0.0 { 1.0 } else { 0.0 }));
    let seq = RenormSequence::geometric_cubes(1);
    let c = crit(1e-5, 60);
    let mut worst_premise = 0.0f64;
    let mut worst = 0.0f64;
    for pair in 0..5u64 {
        let h = rng.gen_range(0.25..2.0);
        let s = rng.gen_range(0.5..3.0);
        let b = rng.gen_range(0.5..3.0);
        let nu = Measure::density(
            1,
            ScalarFn::new(move |x: &[f64]| 1.0 + if x[0] >= 0.0 { h } else { 0.0 }),
        );
        let nu2 = Measure::density(
            1,
            ScalarFn::new(move |x: &[f64]| {
                s * (1.0 + if x[0] >= 0.0 { h } else { 0.0 }) + b * (-x[0] * x[0]).exp()
            }),
        );
        let shared = (1.0 + h) / (2.0 + h);
        let v1 = meanvalue::wmv(&f, &nu, &seq, &c, &opts_rel(1e-6, 0x70 + pair)).unwrap();
        let v2 = meanvalue::wmv(&f, &nu2, &seq, &c, &opts_rel(1e-6, 0x80 + pair)).unwrap();
        worst_premise =
            worst_premise.max((v1.scalar() - shared).abs()).max((v2.scalar() - shared).abs());
        for (k, t) in [0.25, 0.5, 0.75].into_iter().enumerate() {
            let combo = nu.try_scale(t).unwrap().try_add(&nu2.try_scale(1.0 - t).unwrap()).unwrap();
            let v = meanvalue::wmv(&f, &combo, &seq, &c, &opts_rel(1e-6, 0x90 + 4 * pair + k as u64))
                .unwrap();
            worst = worst.max((v.scalar() - shared).abs());
        }
    }
    verdict(
        "a07 convex combinations preserve a shared mean",
        worst_premise <= 1.5e-3 && worst <= 3e-3,
        &format!(
            "5 random pairs × t ∈ {{0.25, 0.5, 0.75}}: worst |wmv(tν + (1-t)ν') - c| = {worst:.2e} (tol 3e-3)"
        ),
    );
}

/// The scale calculus: complementary weights sum to one, the weight is
/// 1/(1 + ratio), and both layers compose along chains of measures.
#[test]
fn a08_scale_calculus_identities() {
    let opts = QuadOpts::default();
    let mut worst = 0.0f64;

    // Finite triples: constant multiples over unit cubes, then mixed
    // Gaussian-bump densities over geometric cubes.
    let triples: Vec<(Measure, Measure, Measure, RenormSequence, ConvergenceCriteria)> = vec![
        (
            Measure::lebesgue(1),
            Measure::lebesgue(1).try_scale(2.0).unwrap(),
            Measure::lebesgue(1).try_scale(6.0).unwrap(),
            RenormSequence::cubes(1),
            crit(1e-6, 30),
        ),
        (
            Measure::lebesgue(1),
            Measure::density(1, ScalarFn::new(|x: &[f64]| 1.0 + 3.0 * (-x[0] * x[0]).exp())),
            Measure::density(1, ScalarFn::new(|x: &[f64]| 4.0 + (-x[0] * x[0]).exp())),
            RenormSequence::geometric_cubes(1),
            crit(1e-5, 40),
        ),
    ];
    for (mu, nu, rho, seq, c) in &triples {
        let mn = asymptotics::compare(mu, nu, seq, c, &opts).unwrap();
        let nm = asymptotics::compare(nu, mu, seq, c, &opts).unwrap();
        let nr = asymptotics::compare(nu, rho, seq, c, &opts).unwrap();
        let mr = asymptotics::compare(mu, rho, seq, c, &opts).unwrap();
        // Complementary weights from two independent measurements.
        worst = worst.max((mn.big_theta + nm.big_theta - 1.0).abs());
        // Weight-vs-ratio, with the ratio taken from the reverse run.
        worst = worst.max((mn.big_theta - 1.0 / (1.0 + 1.0 / nm.theta)).abs());
        // Ratio and weight composition along mu -> nu -> rho.
        let t_comp = asymptotics::theta_compose(mn.theta, nr.theta).unwrap();
        worst = worst.max((mr.theta - t_comp).abs() / mr.theta.max(1.0));
        let h_comp = asymptotics::big_theta_compose(mn.big_theta, nr.big_theta).unwrap();
        worst = worst.max((mr.big_theta - h_comp).abs());
    }

    // Degenerate pair: a unit point mass is negligible next to Lebesgue
    // (both masses are exact here), and the weights still complement.
    let mu = Measure::lebesgue(1);
    let atom = Measure::dirac(vec![0.0]);
    let seq = RenormSequence::geometric_cubes(1);
    let small = asymptotics::compare(&mu, &atom, &seq, &crit(1e-5, 40), &opts).unwrap();
    let large = asymptotics::compare(&atom, &mu, &seq, &crit(1e-5, 40), &opts).unwrap();
    let classes_ok = matches!(small.class, ScaleClass::Negligible)
        && matches!(large.class, ScaleClass::Dominant)
        && large.theta.is_infinite();
    worst = worst.max((small.big_theta + large.big_theta - 1.0).abs());

    verdict(
        "a08 scale-calculus identities",
        classes_ok && worst <= 2e-2,
        &format!("worst identity residual = {worst:.2e} (tol 2e-2), degenerate classes ok = {classes_ok}"),
    );
}

/// Bounded functions with a limit at infinity have that limit as their mean
/// along compact exhaustions.
#[test]
fn a09_limits_at_infinity_are_means() {
    let cases: Vec<(VectorFn, f64)> = vec![
        (VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.6 + (-x[0] * x[0]).exp())), 0.6),
        (VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| -0.4 + 1.0 / (1.0 + x[0] * x[0]))), -0.4),
        (
            VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 1.2 * x[0] * x[0] / (1.0 + x[0] * x[0]))),
            1.2,
        ),
        (VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.25 + x[0] / (1.0 + x[0] * x[0]))), 0.25),
        (
            VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
                2.0 + 2.0 * x[0].cos() * (-x[0] * x[0]).exp()
            })),
            2.0,
        ),
    ];
    let seq = RenormSequence::geometric_cubes(1);
    let c = crit(1e-5, 40);
    let mut worst = 0.0f64;
    let mut all_converged = true;
    for (i, (f, limit)) in cases.iter().enumerate() {
        let res = meanvalue::wmv(f, &Measure::lebesgue(1), &seq, &c, &opts_rel(1e-6, i as u64))
            .unwrap();
        all_converged &= res.status == Status::Converged;
        worst = worst.max((res.scalar() - limit).abs());
    }
    verdict(
        "a09 limits at infinity are means",
        all_converged && worst <= 1e-3,
        &format!("5 bounded functions: worst |wmv - lim f| = {worst:.2e} (tol 1e-3)"),
    );
}

/// Uniformly small perturbations perturb the mean by as little: the means of
/// f + g/(n+1) approach the mean of f.
#[test]
fn a10_uniform_perturbations_converge_to_the_base_mean() {
    let f = |x: f64| 0.7 + 1.5 * (-x * x).exp();
    let g = |x: f64| 0.5 + 0.8 * (3.0 * x).sin() * (-x * x).exp();
    let seq = RenormSequence::geometric_cubes(1);
    let c = crit(1e-5, 40);
    let base = meanvalue::wmv(
        &VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| f(x[0]))),
        &Measure::lebesgue(1),
        &seq,
        &c,
        &opts_rel(1e-6, 0xA0),
    )
    .unwrap();
    let mut gaps = Vec::new();
    for (i, n) in [0u32, 1, 3, 7, 15, 31, 63, 127, 255, 340].into_iter().enumerate() {
        let scale = 1.0 / f64::from(n + 1);
        let fun = VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| f(x[0]) + scale * g(x[0])));
        let res = meanvalue::wmv(
            &fun,
            &Measure::lebesgue(1),
            &seq,
            &c,
            &opts_rel(1e-6, 0xB0 + i as u64),
        )
        .unwrap();
        gaps.push((res.scalar() - base.scalar()).abs());
    }
    let last = *gaps.last().unwrap();
    let ok = last <= 2e-3 && last < gaps[0] && gaps[0] > 0.1;
    verdict(
        "a10 uniform perturbations converge to the base mean",
        ok,
        &format!("|wmv(f + g/(n+1)) - wmv(f)|: {:.3} at n=0 shrinking to {last:.2e} at n=340 (tol 2e-3)", gaps[0]),
    );
}

/// Translating the windows or translating the function leaves the mean
/// unchanged, over cubes and over balls.
#[test]
fn a11_translation_leaves_the_mean_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCB);
    let shifts: Vec<Vec<f64>> =
        (0..5).map(|_| (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
        0.2 + 0.2 * (-(x[0] * x[0] + x[1] * x[1])).exp()
    }));
    let mu = Measure::lebesgue(2);
    let mut worst = 0.0f64;
    for (fam, base_seq, c, opts) in [
        ("cubes", RenormSequence::cubes(2), crit(1e-4, 60), opts_rel(1e-6, 0xC0)),
        ("balls", RenormSequence::balls(2), crit(1.2e-3, 40), opts_rel(1e-3, 0xD0)),
    ] {
        let base = meanvalue::wmv(&f, &mu, &base_seq, &c, &opts).unwrap();
        for (i, v) in shifts.iter().enumerate() {
            let salt = (i as u64 + 1) * if fam == "cubes" { 3 } else { 7 };
            let moved_seq = base_seq.translate(v.clone()).unwrap();
            let w1 = meanvalue::wmv(
                &f,
                &mu,
                &moved_seq,
                &c,
                &QuadOpts { seed: opts.seed + salt, ..opts },
            )
            .unwrap();
            let (va, vb) = (v[0], v[1]);
            let fv = VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| {
                let (y0, y1) = (x[0] + va, x[1] + vb);
                0.2 + 0.2 * (-(y0 * y0 + y1 * y1)).exp()
            }));
            let w2 = meanvalue::wmv(
                &fv,
                &mu,
                &base_seq,
                &c,
                &QuadOpts { seed: opts.seed + salt + 1, ..opts },
            )
            .unwrap();
            worst = worst
                .max((base.scalar() - w1.scalar()).abs())
                .max((base.scalar() - w2.scalar()).abs());
        }
    }
    verdict(
        "a11 translation leaves the mean unchanged",
        worst <= 3e-3,
        &format!("cubes and balls × 5 random shifts: worst |wmv - translated wmv| = {worst:.2e} (tol 3e-3)"),
    );
}

/// A cone indicator separates window shapes: cubes and balls converge to
/// different closed-form values, so the strong mean does not exist.
#[test]
fn a12_window_shape_changes_the_mean() {
    let t = (std::f64::consts::PI / 8.0).tan();
    let cone = VectorFn::from_scalar(ScalarFn::new(move |y: &[f64]| {
        if y[0].abs() <= y[1].abs() * t {
            1.0
        } else {
            0.0
        }
    }));
    let rep = meanvalue::mv_check(
        &cone,
        &Measure::lebesgue(2),
        &[RenormSequence::cubes(2), RenormSequence::balls(2)],
        &crit(5e-3, 20),
        &opts_rel(1e-3, 0xACC),
    )
    .unwrap();
    let by_label = |l: &str| {
        rep.runs
            .iter()
            .find(|(label, _)| label.starts_with(l))
            .map(|(_, r)| r)
            .expect("family ran")
    };
    let e_cubes = (by_label("cubes").scalar() - t / 2.0).abs();
    let e_balls = (by_label("balls").scalar() - 0.25).abs();
    let ok = e_cubes <= 5e-3 && e_balls <= 5e-3 && !rep.strong;
    verdict(
        "a12 window shape changes the mean",
        ok,
        &format!(
            "|cube mean - tan(π/8)/2| = {e_cubes:.2e}, |ball mean - 1/4| = {e_balls:.2e} (tol 5e-3), strong = {}",
            rep.strong
        ),
    );
}

/// Means along the continuum of sublevel sets of ‖x‖² on R² behave exactly
/// like the line versions: integrable decay vanishes, limits at infinity
/// are attained.
#[test]
fn a13_sublevel_families_reproduce_line_means() {
    // {‖x‖² ≤ t} is the disk of radius √t; pass it exactly.
    let disks = |t: f64| Region::ball(vec![0.0, 0.0], t.sqrt(), BallNorm::Euclidean).unwrap();
    let grid: Vec<f64> = (0..20).map(|k| 256.0 * 2.0f64.powi(k)).collect();
    let decay = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
        (-(x[0] * x[0] + x[1] * x[1])).exp()
    }));
    let r1 = meanvalue::wmv_continuum(
        &decay,
        &Measure::lebesgue(2),
        &disks,
        &grid,
        &crit(1e-3, 20),
        &QuadOpts::default(),
    )
    .unwrap();

    // Same potential through declared sublevel regions with a bounding box.
    let potential = || ScalarFn::new(|x: &[f64]| x[0] * x[0] + x[1] * x[1]);
    let sublevels = move |t: f64| {
        // The tightest box enclosing {x² + y² ≤ t}, padded a touch so the
        // containment probes stay strictly outside the set.
        let half = t.sqrt() + 0.05;
        Region::sublevel(potential(), t, vec![-half; 2], vec![half; 2]).unwrap()
    };
    let grid2: Vec<f64> = (0..12).map(|k| 4.0 * 4.0f64.powi(k)).collect();
    let settle = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
        0.7 + 0.5 * (-(x[0] * x[0] + x[1] * x[1])).exp()
    }));
    let r2 = meanvalue::wmv_continuum(
        &settle,
        &Measure::lebesgue(2),
        &sublevels,
        &grid2,
        &crit(2e-3, 12),
        &opts_rel(1e-3, 0xACD),
    )
    .unwrap();

    let e1 = r1.scalar().abs();
    let e2 = (r2.scalar() - 0.7).abs();
    let ok = r1.status == Status::Converged
        && r2.status == Status::Converged
        && e1 <= 1e-3
        && e2 <= 1e-3;
    verdict(
        "a13 sublevel families reproduce the line means",
        ok,
        &format!("|mean(decay)| = {e1:.2e}, |mean(settling) - 0.7| = {e2:.2e} (tol 1e-3)"),
    );
}

/// The nullity detector: the averaged bounded transform of <a, x> is 0 only
/// for a = 0, saturates toward 1 otherwise, and runs in bounded time.
#[test]
fn a14_nullity_detector_separates_zero_from_nonzero() {
    let started = Instant::now();
    let zero = meanvalue::homology_nullity(&[0.0, 0.0], &crit(1e-3, 30), &QuadOpts::default())
        .unwrap();
    let zero_ok = zero.is_null && zero.result.scalar().abs() <= 1e-3;

    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut lowest = f64::INFINITY;
    let mut all_detected = true;
    for case in 0..10u64 {
        let d = 2 + (case as usize) % 2;
        let mut a: Vec<f64>;
        loop {
            a = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            if a.iter().map(|v| v * v).sum::<f64>().sqrt() >= 0.5 {
                break;
            }
        }
        let rep =
            meanvalue::homology_nullity(&a, &crit(1e-6, 25), &opts_rel(1e-2, 0xE0 + case)).unwrap();
        lowest = lowest.min(rep.result.scalar());
        all_detected &= !rep.is_null;
    }

    let unit = meanvalue::homology_nullity(&[1.0, 0.0], &crit(1e-12, 50), &opts_rel(2.5e-3, 0xF0))
        .unwrap();
    let unit_value = unit.result.scalar();
    let elapsed = started.elapsed().as_secs_f64();
    let ok = zero_ok && all_detected && lowest >= 0.45 && unit_value > 0.9 && elapsed <= 120.0;
    verdict(
        "a14 nullity detector separates zero from nonzero",
        ok,
        &format!(
            "zero: {:.1e} (null = {}), 10 random a: lowest mean = {lowest:.3} (≥ 0.45), unit a by window 50: {unit_value:.3} (> 0.9), {elapsed:.1}s (≤ 120s)",
            zero.result.scalar(),
            zero.is_null
        ),
    );
}

/// Product means factorize over tensor products of functions with
/// convergent factor means.
#[test]
fn a15_product_means_factorize() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCF);
    let line = || Factor::new(Measure::lebesgue(1), RenormSequence::geometric_cubes(1));
    let space = ProductSpace::new(vec![line(), line()]).unwrap();
    let c = crit(1e-4, 40);
    let mut worst = 0.0f64;
    for pair in 0..5u64 {
        let (c1, b1) = (rng.gen_range(0.4..1.5), rng.gen_range(0.5..2.0));
        let (c2, b2) = (rng.gen_range(0.4..1.5), rng.gen_range(0.5..2.0));
        let f1 = move |x: f64| c1 + b1 * (-x * x).exp();
        let f2 = move |x: f64| c2 + b2 * (-x * x).exp();
        let tensor = CylindricalFunction::new(
            vec![0, 1],
            VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| f1(x[0]) * f2(x[1]))),
        )
        .unwrap();
        let left = CylindricalFunction::new(
            vec![0],
            VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| f1(x[0]))),
        )
        .unwrap();
        let right = CylindricalFunction::new(
            vec![1],
            VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| f2(x[0]))),
        )
        .unwrap();
        let vt = wmv_cylindrical(&space, &tensor, &c, &opts_rel(1e-6, 3 * pair)).unwrap();
        let v1 = wmv_cylindrical(&space, &left, &c, &opts_rel(1e-6, 3 * pair + 1)).unwrap();
        let v2 = wmv_cylindrical(&space, &right, &c, &opts_rel(1e-6, 3 * pair + 2)).unwrap();
        worst = worst.max((vt.scalar() - v1.scalar() * v2.scalar()).abs());
    }
    verdict(
        "a15 product means factorize",
        worst <= 5e-3,
        &format!("5 random tensor pairs: worst |wmv(f₁⊗f₂) - wmv(f₁)·wmv(f₂)| = {worst:.2e} (tol 5e-3)"),
    );
}

/// Two interleaved approximant schedules of the same target settle on the
/// same mean: the uniform-limit value is schedule-independent.
#[test]
fn a16_interleaved_schedules_agree() {
    let space =
        ProductSpace::power(Factor::new(Measure::lebesgue(1), RenormSequence::geometric_cubes(1)));
    let term = |n: u32| {
        let kernel = VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| {
            let t = x[0];
            let e = (-t * t).exp();
            let mut s = 1.1;
            for k in 0..=n {
                s += 0.5f64.powi(k as i32) * e * (f64::from(k) * t).cos();
            }
            s
        }));
        (CylindricalFunction::new(vec![0], kernel).unwrap(), 0.5f64.powi(n as i32))
    };
    let even = ApproximantSchedule::new(vec![term(0), term(2), term(4), term(6), term(8)]).unwrap();
    let odd = ApproximantSchedule::new(vec![term(1), term(3), term(5), term(7), term(9)]).unwrap();
    let c = crit(1e-5, 40);
    let ra = wmv_uniform_limit(&space, &even, &c, &opts_rel(1e-6, 1)).unwrap();
    let rb = wmv_uniform_limit(&space, &odd, &c, &opts_rel(1e-6, 2)).unwrap();
    let gap = (ra.value[0] - rb.value[0]).abs();
    verdict(
        "a16 interleaved schedules agree",
        gap <= 3e-3,
        &format!("|even-schedule limit - odd-schedule limit| = {gap:.2e} (tol 3e-3)"),
    );
}

/// The Hilbert-space mean is invariant under natural dilations, in-flag
/// translations and (for radial kernels) kernel rotations, and restriction
/// onto the support stage is the identical computation.
#[test]
fn a17_hilbert_mean_invariances() {
    let mut worst = 0.0f64;

    // Natural dilations x -> x/α on a one-dimensional stage.
    let line = HilbertFn::new(
        Flag::coordinate(1),
        0,
        VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.6 + (-x[0] * x[0]).exp())),
    )
    .unwrap();
    let c1 = crit(5e-5, 320);
    let base1 = line.mean(&c1, &QuadOpts::default()).unwrap();
    for alpha in [1u32, 2, 3] {
        let v = line.dilate(alpha).unwrap().mean(&c1, &QuadOpts::default()).unwrap();
        worst = worst.max((v.scalar() - base1.scalar()).abs());
    }

    // In-flag translations of a planar kernel.
    let radial = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
        0.5 + (-(x[0] * x[0] + x[1] * x[1])).exp()
    }));
    let plane = HilbertFn::new(Flag::coordinate(2), 1, radial).unwrap();
    let c2 = crit(1e-4, 80);
    let base2 = plane.mean(&c2, &QuadOpts::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC11);
    for _ in 0..3 {
        let v: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t = plane.translate(&v).unwrap().mean(&c2, &QuadOpts::default()).unwrap();
        worst = worst.max((t.scalar() - base2.scalar()).abs());
    }

    // Kernel rotations; the kernel is radial, so the mean must not move.
    for _ in 0..3 {
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let q = vec![vec![phi.cos(), -phi.sin()], vec![phi.sin(), phi.cos()]];
        let r = plane.rotate_kernel(&q).unwrap().mean(&c2, &QuadOpts::default()).unwrap();
        worst = worst.max((r.scalar() - base2.scalar()).abs());
    }

    // Enlarge then restrict back onto the support stage: the round trip
    // reproduces the original mean exactly, not just approximately.
    let narrow = HilbertFn::new(
        Flag::coordinate(2),
        0,
        VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.3 + (-x[0] * x[0]).exp())),
    )
    .unwrap();
    let c3 = crit(1e-4, 200);
    let round_trip = narrow.enlarge(1).unwrap().restrict(0, 64, 0xAC12).unwrap();
    let direct = narrow.mean(&c3, &QuadOpts::default()).unwrap();
    let restricted = round_trip.mean(&c3, &QuadOpts::default()).unwrap();
    let restriction_gap = (direct.scalar() - restricted.scalar()).abs();

    verdict(
        "a17 hilbert mean invariances",
        worst <= 3e-3 && restriction_gap == 0.0,
        &format!(
            "dilation/translation/rotation worst residual = {worst:.2e} (tol 3e-3), restriction gap = {restriction_gap:.1e} (exact)"
        ),
    );
}

/// Rerunning any configuration with the same seed reproduces the history
/// byte for byte, including the Monte Carlo paths.
#[test]
fn a18_reruns_are_byte_identical() {
    let configs = [
        // Monte Carlo: a planar density over balls.
        r#"{
            "kind": "wmv",
            "seed": 11,
            "dim": 2,
            "function": ["exp(-(x0^2 + x1^2) / 4)"],
            "measure": {"type": "lebesgue"},
            "renorm": {"type": "balls"},
            "criteria": {"eps": 0.02, "n_max": 12},
            "quad": {"rel_tol": 0.002}
        }"#,
        // Deterministic quadrature: a line integrand over cubes.
        r#"{
            "kind": "wmv",
            "seed": 7,
            "dim": 1,
            "function": ["0.3 + exp(-x0^2)"],
            "measure": {"type": "lebesgue"},
            "renorm": {"type": "cubes"},
            "criteria": {"eps": 1e-4, "n_max": 80}
        }"#,
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (i, src) in configs.iter().enumerate() {
        let cfg = RunConfig::from_json(src).unwrap();
        let csv = |outcome: &config::Outcome| {
            let mut buf = Vec::new();
            outcome.history.as_ref().expect("wmv runs trace history").write_csv(&mut buf).unwrap();
            buf
        };
        let first = config::run(&cfg).unwrap();
        let second = config::run(&cfg).unwrap();
        let same_history = csv(&first) == csv(&second);
        let same_report = first.report.to_string() == second.report.to_string();
        ok &= same_history && same_report;
        if i > 0 {
            detail.push_str(", ");
        }
        detail.push_str(&format!(
            "config {}: history identical = {same_history}, report identical = {same_report}",
            i + 1
        ));
    }
    verdict("a18 reruns are byte-identical", ok, &detail);
}
