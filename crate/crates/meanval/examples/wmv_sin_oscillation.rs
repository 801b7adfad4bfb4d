//! The weak mean of `sin` depends on how you grow the windows.
//!
//! Over symmetric intervals `[-n-1, n+1]` the positive and negative half-waves
//! cancel and the partial averages go to 0. Over a comb that keeps appending
//! positive half-waves `[2kπ, (2k+1)π]` the averages settle at `2/(5π)`
//! instead. Both limits exist — they just disagree, so `sin` has weak mean
//! values but no strong one, and `mv_check` says so.

use meanval::error::Result;
use meanval::meanvalue::{self, ConvergenceCriteria};
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn, VectorFn};

fn main() -> Result<()> {
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| x[0].sin()));
    let mu = Measure::lebesgue(1);
    let crit = ConvergenceCriteria { eps: 2e-4, n_max: 160, ..Default::default() };
    let opts = QuadOpts::default();

    let report = meanvalue::mv_check(
        &f,
        &mu,
        &[RenormSequence::cubes(1), RenormSequence::halfwave_comb()],
        &crit,
        &opts,
    )?;

    for (label, run) in &report.runs {
        println!(
            "{label:<16} -> {:+.6}  ({:?} after {} windows, spread {:.1e})",
            run.scalar(),
            run.status,
            run.steps,
            run.spread
        );
    }
    println!("reference comb limit 2/(5π) = {:+.6}", 2.0 / (5.0 * std::f64::consts::PI));
    println!(
        "strong mean exists: {} (largest disagreement between families {:.4})",
        report.strong, report.max_disagreement
    );

    // A peek at how the comb averages drift in: every appended half-wave
    // nudges the average, the growing bulk pulls it back toward the limit.
    let comb = RenormSequence::halfwave_comb();
    let run = meanvalue::wmv(&f, &mu, &comb, &crit, &opts)?;
    println!("\ncomb partial averages:");
    for i in (0..run.history.len()).step_by(run.history.len() / 8 + 1) {
        println!(
            "  n = {:>3}  mass = {:>9.2}  a_n = {:+.6}",
            run.history.n[i], run.history.mass[i], run.history.averages[i][0]
        );
    }
    Ok(())
}
