//! The expression language behind JSON configs.
//!
//! Expressions denote scalar functions of `x0, x1, ...`; they parse into an
//! AST, evaluate with IEEE semantics (with loud errors instead of silent
//! infinities), and convert into the same `ScalarFn` values the rest of the
//! library consumes.

use meanval::expr;
use meanval::meanvalue::{self, ConvergenceCriteria};
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn, VectorFn};

fn main() {
    // Parse and evaluate.
    let samples = [
        ("0.5 + exp(-x0^2)", vec![0.0]),
        ("sin(x0) * cos(x1) / (1 + x0^2)", vec![1.0, 2.0]),
        ("indicator(norm2(x0, x1) <= 2)", vec![1.0, 1.0]),
        ("max(x0, -x0) - abs(x0)", vec![-3.5]),
    ];
    for (src, at) in &samples {
        let e = expr::parse(src, at.len()).expect("parses");
        println!("{src:<34} at {at:?} = {:?}", e.eval(at));
    }

    // Errors are located and explained.
    for bad in ["2 ** x0", "x0 + x9", "log(x0", "indicator(x0)"] {
        match expr::parse(bad, 2) {
            Ok(_) => println!("{bad:<34} parsed (unexpectedly)"),
            Err(e) => println!("{bad:<34} -> {e}"),
        }
    }
    let e = expr::parse("log(x0)", 1).unwrap();
    println!("log(x0) at x0 = -1 -> {:?}", e.eval(&[-1.0]));

    // Expressions plug into the mean machinery like any closure. This one
    // settles at 0.25 at infinity.
    let e = expr::parse("0.25 + x0 / (1 + x0^2)", 1).unwrap();
    let f = VectorFn::from_scalar(ScalarFn::from_expr(&e));
    let crit = ConvergenceCriteria { eps: 1e-5, n_max: 40, ..Default::default() };
    let r = meanvalue::wmv(
        &f,
        &Measure::lebesgue(1),
        &RenormSequence::geometric_cubes(1),
        &crit,
        &QuadOpts::default(),
    )
    .unwrap();
    println!("\nwmv(0.25 + x0/(1 + x0^2)) = {:.6}", r.scalar());
}
