//! Means under sums and scalings of measures.
//!
//! Scaling a measure never changes the mean (the factor cancels against the
//! mass). Adding two measures mixes their means with weights given by the
//! asymptotic mass ratio — `wmv_measure_sum` computes both sides of that
//! identity and reports the residual. Measures sharing a mean form a convex
//! cone: any convex combination keeps the common value.

use meanval::asymptotics;
use meanval::error::Result;
use meanval::meanvalue::{self, ConvergenceCriteria};
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn, VectorFn};

fn main() -> Result<()> {
    let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| if x[0] >= 0.0 { 1.0 } else { 0.0 }));
    let seq = RenormSequence::geometric_cubes(1);
    let crit = ConvergenceCriteria { eps: 1e-5, n_max: 60, ..Default::default() };
    let opts = QuadOpts::default();

    // mu is flat; nu weights the right half-line 3x and carries an integrable
    // bump that the limit ignores.
    let mu = Measure::uniform(1, 1.0);
    let nu = Measure::density(
        1,
        ScalarFn::new(|x: &[f64]| {
            let side = if x[0] >= 0.0 { 3.0 } else { 1.0 };
            side + 2.0 * (-x[0] * x[0]).exp()
        }),
    );

    let rep = asymptotics::wmv_measure_sum(&f, &mu, &nu, &seq, &crit, &opts)?;
    println!("mean against mu alone:  {:.6}", rep.mu_only.scalar());
    println!("mean against nu alone:  {:.6}", rep.nu_only.scalar());
    println!("mass ratio theta(mu,nu) = {:.4}", rep.comparison.theta);
    println!(
        "mixing weights: Theta = {:.4} on mu, {:.4} on nu",
        rep.comparison.big_theta,
        1.0 - rep.comparison.big_theta
    );
    println!("direct mean against mu + nu: {:.6}", rep.direct.scalar());
    println!("Theta-weighted combination:  {:.6}", rep.mixed[0]);
    println!("identity residual:           {:.2e}", rep.residual);

    // Scaling invariance: 5 * nu has the same mean as nu.
    let scaled = nu.try_scale(5.0)?;
    let r = meanvalue::wmv(&f, &scaled, &seq, &crit, &opts)?;
    println!("\nmean against 5 * nu: {:.6} (scaling cancels)", r.scalar());

    // Convex cone: both measures below give the half-line indicator the mean
    // 2/3, and so does every convex combination.
    let a = Measure::density(
        1,
        ScalarFn::new(|x: &[f64]| if x[0] >= 0.0 { 2.0 } else { 1.0 }),
    );
    let b = Measure::density(
        1,
        ScalarFn::new(|x: &[f64]| {
            let side = if x[0] >= 0.0 { 8.0 } else { 4.0 };
            side + (-x[0].abs()).exp()
        }),
    );
    println!("\nconvex combinations t*a + (1-t)*b, shared mean 2/3:");
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let combo = if t == 0.0 {
            b.clone()
        } else if t == 1.0 {
            a.clone()
        } else {
            a.try_scale(t)?.try_add(&b.try_scale(1.0 - t)?)?
        };
        let r = meanvalue::wmv(&f, &combo, &seq, &crit, &opts)?;
        println!("  t = {t:.2}: {:.6}", r.scalar());
    }
    Ok(())
}
