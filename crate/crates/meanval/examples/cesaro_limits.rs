//! Sequences as functions on the naturals: Cesàro averages.
//!
//! With the counting measure and prefix windows `{0, 1, ..., n}` the
//! renormalized mean of a sequence is its Cesàro average. The alternating
//! sequence has no limit but a perfectly good mean (zero); a convergent
//! sequence averages to its limit; and the harmonic-like drift is slow enough
//! that the detector refuses to call it converged early.

use meanval::error::Result;
use meanval::meanvalue::{self, ConvergenceCriteria};
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn, VectorFn};

fn seq_fn(f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> VectorFn {
    // The integrand receives the index as x[0].
    VectorFn::from_scalar(ScalarFn::new(move |x: &[f64]| f(x[0] as u64)))
}

fn main() -> Result<()> {
    // (-1)^n: exact integer arithmetic inside, mean 0.
    let alternating = seq_fn(|n| if n % 2 == 0 { 1.0 } else { -1.0 });
    let crit = ConvergenceCriteria { eps: 1.25e-6, n_max: 1_000_000, ..Default::default() };
    let r = meanvalue::cesaro(&alternating, &crit)?;
    println!(
        "cesaro((-1)^n)        = {:+.2e}   ({:?} at n = {})",
        r.scalar(),
        r.status,
        r.steps
    );

    // A geometric approach to 3/4.
    let convergent = seq_fn(|n| 0.75 + 0.5f64.powi(n as i32));
    let crit = ConvergenceCriteria { eps: 1e-7, n_max: 10_000, ..Default::default() };
    let r = meanvalue::cesaro(&convergent, &crit)?;
    println!("cesaro(3/4 + 2^-n)    = {:+.6}   ({:?} at n = {})", r.scalar(), r.status, r.steps);

    // The same average through the general machinery: counting measure over
    // prefix windows. Slower than the incremental path, same numbers.
    let crit = ConvergenceCriteria { eps: 1e-3, n_max: 3000, ..Default::default() };
    let r = meanvalue::wmv(
        &seq_fn(|n| if n % 2 == 0 { 1.0 } else { -1.0 }),
        &Measure::counting(),
        &RenormSequence::prefixes(),
        &crit,
        &QuadOpts::default(),
    )?;
    println!("wmv over prefixes     = {:+.2e}   ({:?} at n = {})", r.scalar(), r.status, r.steps);

    // A cautionary tale: sin(π ln n) is bounded with NO Cesàro limit — the
    // running averages oscillate forever with amplitude 1/sqrt(1+π²) ≈ 0.30,
    // just at logarithmic speed. Drift that slow can fool any finite-window
    // detector: whenever the average crosses the slowly-moving sequence the
    // trailing window flattens and a premature verdict comes out.
    let slow = |n: u64| (((n as f64) + 1.0).ln() * std::f64::consts::PI).sin();
    let crit = ConvergenceCriteria { eps: 1e-6, n_max: 1_000_000, ..Default::default() };
    let r = meanvalue::cesaro(&seq_fn(slow), &crit)?;
    println!(
        "cesaro(sin(π ln n))   = {:+.4}     ({:?} at n = {} — a premature verdict!)",
        r.scalar(),
        r.status,
        r.steps
    );
    // The remedy is the same as everywhere in this crate: cross-check the
    // claimed limit at a different budget. The averages disagree in sign,
    // so no limit exists and the early verdict is exposed.
    for n_max in [10_000u64, 1_000_000] {
        let crit = ConvergenceCriteria { eps: 1e-12, n_max, ..Default::default() };
        let r = meanvalue::cesaro(&seq_fn(slow), &crit)?;
        println!("  average at budget {n_max:>9}: {:+.3} ({:?})", r.scalar(), r.status);
    }
    Ok(())
}
