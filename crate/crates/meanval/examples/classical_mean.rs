//! Sanity anchors: the renormalized mean agrees with what it must generalize.
//!
//! Against a finite measure it is the classical normalized integral; against a
//! point mass it is evaluation at the point; and a bounded function with a
//! limit at infinity has that limit as its mean against Lebesgue measure.

use meanval::error::Result;
use meanval::meanvalue::{self, ConvergenceCriteria};
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn, VectorFn};

fn main() -> Result<()> {
    let opts = QuadOpts::default();

    // 1. Finite measure: mean of cos against exp(-x^2) dx. The closed form is
    //    exp(-1/4) (ratio of two Gaussian integrals).
    let gauss = Measure::density(1, ScalarFn::new(|x: &[f64]| (-x[0] * x[0]).exp()));
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| x[0].cos()));
    let crit = ConvergenceCriteria { eps: 1e-5, n_max: 60, ..Default::default() };
    let r = meanvalue::wmv(&f, &gauss, &RenormSequence::cubes(1), &crit, &opts)?;
    println!("mean of cos against a Gaussian: {:.8}", r.scalar());
    println!("closed form exp(-1/4):          {:.8}", (-0.25f64).exp());

    // 2. Point mass at p: the mean is f(p), exactly, from the first window on.
    let p = vec![0.3, -0.7];
    let g = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| x[0] * x[0] + (x[1]).sin()));
    let atom = Measure::dirac(p.clone());
    let r = meanvalue::wmv(&g, &atom, &RenormSequence::cubes(2), &crit, &opts)?;
    println!("\nmean against a point mass at {:?}: {:.12}", p, r.scalar());
    println!("direct evaluation f(p):           {:.12}", g.eval(&p)[0]);

    // 3. Limit at infinity: f -> 0.6, and the integrable hump near the origin
    //    is washed out by the growing windows.
    let settling = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
        0.6 + 3.0 * (-x[0] * x[0]).exp()
    }));
    let crit = ConvergenceCriteria { eps: 1e-5, n_max: 40, ..Default::default() };
    let r = meanvalue::wmv(
        &settling,
        &Measure::lebesgue(1),
        &RenormSequence::geometric_cubes(1),
        &crit,
        &opts,
    )?;
    println!(
        "\nmean of 0.6 + 3 exp(-x^2) against Lebesgue: {:.6} ({} windows)",
        r.scalar(),
        r.steps
    );
    println!("the hump contributes nothing in the limit; only the value at infinity survives");
    Ok(())
}
