//! Means of uniform limits via approximant schedules.
//!
//! A function that reads infinitely many factors is out of reach of a single
//! cylindrical computation, but if cylindrical approximants `f_N` converge to
//! it uniformly with declared errors `eps_N`, the mean of the limit is the
//! limit of the means. A schedule carries the pairs `(f_N, eps_N)`;
//! `wmv_uniform_limit` runs them and reports the value with a stability
//! bound, and `check_uniform_bounds` audits the declared errors by sampling.

use meanval::error::Result;
use meanval::meanvalue::ConvergenceCriteria;
use meanval::products::{
    self, wmv_uniform_limit, ApproximantSchedule, CylindricalFunction, Factor, ProductSpace,
};
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn, VectorFn};

// Partial sums of sum_k 2^-k exp(-x0^2) cos(k x0), plus the constant 1.1.
// The tail is bounded by 2^-N, which is the declared uniform error.
fn term(n: u32) -> (CylindricalFunction, f64) {
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
}

fn main() -> Result<()> {
    let space =
        ProductSpace::power(Factor::new(Measure::lebesgue(1), RenormSequence::geometric_cubes(1)));
    let crit = ConvergenceCriteria { eps: 1e-5, n_max: 40, ..Default::default() };
    let opts = QuadOpts::default();

    let schedule = ApproximantSchedule::new((0..=8).map(term).collect())?;
    let r = wmv_uniform_limit(&space, &schedule, &crit, &opts)?;
    println!("term means along the schedule:");
    for (i, term_result) in r.per_term.iter().enumerate() {
        println!("  N = {i}:  {:.7}", term_result.scalar());
    }
    println!("limit mean = {:.7} ± {:.1e}", r.value[0], r.bound);
    println!("(every cosine term with k >= 1 is integrable and averages out; 1.1 remains)");

    // Schedule independence: the odd-index schedule reaches the same value.
    let odd = ApproximantSchedule::new(vec![term(1), term(3), term(5), term(7), term(9)])?;
    let r_odd = wmv_uniform_limit(&space, &odd, &crit, &opts)?;
    println!(
        "\nodd-index schedule: {:.7} (difference {:.1e})",
        r_odd.value[0],
        (r.value[0] - r_odd.value[0]).abs()
    );

    // Audit the declared eps_N against the N = 10 partial sum as the target.
    let (target, _) = term(10);
    let audit = products::check_uniform_bounds(&space, &odd, &target, 6, 400, 17)?;
    println!(
        "\nbound audit at 400 sampled points: {} violations (worst excess {:+.2e})",
        audit.violations, audit.max_excess
    );
    Ok(())
}
