//! Cylindrical means on a countable product of lines.
//!
//! A cylindrical function reads finitely many factors of an infinite product;
//! its mean is computed on the truncated finite-dimensional space, and the
//! unread factors cancel between numerator and mass. Consequences shown here:
//! the mean does not change when the support is padded with unread factors,
//! and it factorizes over tensor products.

use meanval::error::Result;
use meanval::meanvalue::ConvergenceCriteria;
use meanval::products::{wmv_cylindrical, CylindricalFunction, Factor, ProductSpace};
use meanval::quad::QuadOpts;
use meanval::{Measure, RenormSequence, ScalarFn, VectorFn};

fn main() -> Result<()> {
    // An infinite product of identical Lebesgue lines with doubling windows.
    let line = Factor::new(Measure::lebesgue(1), RenormSequence::geometric_cubes(1));
    let space = ProductSpace::power(line);

    let crit = ConvergenceCriteria { eps: 1e-4, n_max: 40, ..Default::default() };
    let opts = QuadOpts::default();

    // f reads factor 0 only.
    let f = CylindricalFunction::new(
        vec![0],
        VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.8 + 1.2 * (-x[0] * x[0]).exp())),
    )?;
    let v0 = wmv_cylindrical(&space, &f, &crit, &opts)?;
    println!("mean of f (support {{0}}):          {:.6}", v0.scalar());

    // The same kernel declared on factors {0, 7}, ignoring the second: the
    // 7th factor integrates out exactly.
    let padded = CylindricalFunction::new(
        vec![0, 7],
        VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.8 + 1.2 * (-x[0] * x[0]).exp())),
    )?;
    let v_pad = wmv_cylindrical(&space, &padded, &crit, &opts)?;
    println!("same kernel, support {{0, 7}}:      {:.6}", v_pad.scalar());

    // Tensor factorization: wmv(f1 ⊗ f2) = wmv(f1) * wmv(f2).
    let g = CylindricalFunction::new(
        vec![3],
        VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.5 + 0.9 * (-x[0] * x[0]).exp())),
    )?;
    let tensor = CylindricalFunction::new(
        vec![0, 3],
        VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| {
            (0.8 + 1.2 * (-x[0] * x[0]).exp()) * (0.5 + 0.9 * (-x[1] * x[1]).exp())
        })),
    )?;
    let vg = wmv_cylindrical(&space, &g, &crit, &opts)?;
    let vt = wmv_cylindrical(&space, &tensor, &crit, &opts)?;
    println!("\nmean of g (support {{3}}):          {:.6}", vg.scalar());
    println!("mean of f ⊗ g (support {{0, 3}}):   {:.6}", vt.scalar());
    println!("product of the separate means:    {:.6}", v0.scalar() * vg.scalar());

    // Truncation is explicit if you want the finite-dimensional pieces.
    let (measure, renorm) = space.truncate(&[0, 3])?;
    println!(
        "\ntruncated space for support {{0, 3}}: {}-dimensional, windows '{}'",
        measure.dim(),
        renorm.label()
    );
    Ok(())
}
