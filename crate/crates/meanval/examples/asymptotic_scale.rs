//! The comparison calculus between measures along a renormalization.
//!
//! `theta(mu, nu)` is the limit of the window-mass ratios `nu(U_n)/mu(U_n)`;
//! `Theta(mu, nu) = 1/(1 + theta)` is the weight `mu` carries when the two
//! measures are summed. The example measures a few ratios, classifies them,
//! and checks the composition laws along a chain of three measures.

use meanval::asymptotics::{self, ScaleClass};
use meanval::error::Result;
use meanval::meanvalue::ConvergenceCriteria;
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn};

fn show(label: &str, r: &asymptotics::ComparisonResult) {
    let class = match r.class {
        ScaleClass::Negligible => "negligible".to_string(),
        ScaleClass::Dominant => "dominant".to_string(),
        ScaleClass::Comparable(t) => format!("comparable ({t:.4})"),
    };
    println!("{label:<24} theta = {:<10.4} Theta = {:<8.4} {class}", r.theta, r.big_theta);
}

fn main() -> Result<()> {
    let seq = RenormSequence::geometric_cubes(1);
    let crit = ConvergenceCriteria { eps: 1e-5, n_max: 40, ..Default::default() };
    let opts = QuadOpts::default();

    let mu = Measure::lebesgue(1);
    let nu = Measure::density(1, ScalarFn::new(|x: &[f64]| 2.0 + (-x[0] * x[0]).exp()));
    let rho = Measure::density(1, ScalarFn::new(|x: &[f64]| 6.0 + 1.0 / (1.0 + x[0] * x[0])));

    let mn = asymptotics::compare(&mu, &nu, &seq, &crit, &opts)?;
    let nm = asymptotics::compare(&nu, &mu, &seq, &crit, &opts)?;
    let nr = asymptotics::compare(&nu, &rho, &seq, &crit, &opts)?;
    let mr = asymptotics::compare(&mu, &rho, &seq, &crit, &opts)?;
    show("theta(mu, nu)", &mn);
    show("theta(nu, mu)", &nm);
    show("theta(nu, rho)", &nr);
    show("theta(mu, rho)", &mr);

    println!("\nidentities:");
    println!("  Theta(mu,nu) + Theta(nu,mu) - 1      = {:+.2e}", mn.big_theta + nm.big_theta - 1.0);
    let t = asymptotics::theta_compose(mn.theta, nr.theta)?;
    println!("  theta(mu,rho) vs composed            = {:.4} vs {:.4}", mr.theta, t);
    let h = asymptotics::big_theta_compose(mn.big_theta, nr.big_theta)?;
    println!("  Theta(mu,rho) vs composed            = {:.4} vs {:.4}", mr.big_theta, h);

    // Degenerate scales: a point mass against Lebesgue. The masses stay at 1
    // while Lebesgue's explode, so one direction converges to 0 and the other
    // trips the divergence rule.
    let atom = Measure::dirac(vec![0.0]);
    let small = asymptotics::compare(&mu, &atom, &seq, &crit, &opts)?;
    let large = asymptotics::compare(&atom, &mu, &seq, &crit, &opts)?;
    println!("\ndegenerate pair:");
    show("theta(lebesgue, atom)", &small);
    show("theta(atom, lebesgue)", &large);
    println!("  (the sum mu + atom therefore averages exactly like mu alone)");
    Ok(())
}
