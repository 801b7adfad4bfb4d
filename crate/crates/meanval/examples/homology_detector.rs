//! Deciding nullity of a linear functional by averaging, not by solving.
//!
//! For a vector `a`, average the bounded transform `|<a,x>| / (1 + |<a,x>|)`
//! over growing balls. If `a = 0` every average is exactly 0; if `a != 0` the
//! transform tends to 1 along almost every ray and the averages climb toward
//! 1. Thresholding at 1/2 turns a question about a cohomology-class
//! representative ("is this cocycle a coboundary?") into a single scalar —
//! no basis, no linear solve, just means.

use meanval::error::Result;
use meanval::meanvalue::{self, ConvergenceCriteria};
use meanval::quad::{QuadOpts, Tol};

fn main() -> Result<()> {
    let crit = ConvergenceCriteria { eps: 1e-3, n_max: 30, ..Default::default() };
    let r = meanvalue::homology_nullity(&[0.0, 0.0], &crit, &QuadOpts::default())?;
    println!(
        "a = (0, 0):    mean = {:.3e}  null = {}",
        r.result.scalar(),
        r.is_null
    );

    // Nonzero coefficients in several directions and dimensions. The mean
    // needs only to clear the 1/2 threshold, so modest Monte Carlo accuracy
    // is plenty.
    let opts = QuadOpts { tol: Tol::mixed(1e-9, 5e-3), seed: 13, ..Default::default() };
    let crit = ConvergenceCriteria { eps: 1e-6, n_max: 25, ..Default::default() };
    for a in [vec![1.0, 0.0], vec![0.3, -0.4], vec![2.0, 1.0, -1.0]] {
        let r = meanvalue::homology_nullity(&a, &crit, &opts)?;
        println!(
            "a = {:?}: mean = {:.3} after {} windows, null = {}",
            a,
            r.result.scalar(),
            r.result.steps,
            r.is_null
        );
    }

    // The verdict is asymptotic: a tiny coefficient looks null until the
    // windows reach the scale 1/|a|. Same vector, two budgets.
    let small = [0.05, 0.0];
    for n_max in [25u64, 400] {
        let crit = ConvergenceCriteria { eps: 1e-6, n_max, ..Default::default() };
        let r = meanvalue::homology_nullity(&small, &crit, &opts)?;
        println!(
            "a = {small:?} with {n_max:>3} windows: mean = {:.3}, null = {}",
            r.result.scalar(),
            r.is_null
        );
    }

    // The climb toward 1: with a = (1, 0) the average over the ball of
    // radius R is 1 - O(log R / R).
    let crit = ConvergenceCriteria { eps: 1e-12, n_max: 40, ..Default::default() };
    let opts = QuadOpts { tol: Tol::mixed(1e-9, 5e-3), seed: 29, ..Default::default() };
    let r = meanvalue::homology_nullity(&[1.0, 0.0], &crit, &opts)?;
    println!("\ntrajectory for a = (1, 0):");
    for i in (0..r.result.history.len()).step_by(8) {
        println!(
            "  R = {:>3}  mean = {:.4}",
            r.result.history.n[i] + 1,
            r.result.history.averages[i][0]
        );
    }
    println!("  (tends to 1; any nonzero functional is eventually detected)");
    Ok(())
}
