//! Measures: densities on R^m, finite Dirac combinations, the counting
//! measure on the naturals, and finite products of these.

use rand::Rng;

use crate::error::{Error, Result};
use crate::func::ScalarFn;
use crate::quad::{self, QuadOpts, Tol};
use crate::region::Region;

#[derive(Debug, Clone)]
pub enum Measure {
    /// `d mu = density dx` on R^dim. `uniform` caches the constant value for
    /// densities known to be constant, unlocking exact masses for boxes,
    /// balls and interval unions.
    Density { dim: usize, density: ScalarFn, uniform: Option<f64> },
    /// Finite combination of point masses with positive weights.
    Dirac { points: Vec<(Vec<f64>, f64)> },
    /// Counting measure on the naturals; integrates over `FinitePrefix`
    /// regions only.
    Counting,
    /// Product measure; integrates over matching `Region::Product` regions
    /// (or any region when every factor has a density).
    Product(Vec<Measure>),
}

impl Measure {
    pub fn lebesgue(dim: usize) -> Measure {
        Measure::uniform(dim, 1.0)
    }

    pub fn uniform(dim: usize, c: f64) -> Measure {
        assert!(c > 0.0 && c.is_finite(), "uniform density must be positive");
        Measure::Density {
            dim,
            density: ScalarFn::constant(c),
            uniform: Some(c),
        }
    }

    pub fn density(dim: usize, density: ScalarFn) -> Measure {
        Measure::Density { dim, density, uniform: None }
    }

    pub fn dirac(point: Vec<f64>) -> Measure {
        Measure::Dirac { points: vec![(point, 1.0)] }
    }

    pub fn dirac_comb(points: Vec<(Vec<f64>, f64)>) -> Result<Measure> {
        if points.is_empty() {
            return Err(Error::InvalidInput("dirac combination needs at least one point".into()));
        }
        let d = points[0].0.len();
        for (p, w) in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.len() });
            }
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidInput(format!("dirac weight must be positive, got {w}")));
            }
        }
        Ok(Measure::Dirac { points })
    }

    pub fn counting() -> Measure {
        Measure::Counting
    }

    pub fn product(factors: Vec<Measure>) -> Result<Measure> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("product of no measures".into()));
        }
        Ok(Measure::Product(factors))
    }

    pub fn dim(&self) -> usize {
        match self {
            Measure::Density { dim, .. } => *dim,
            Measure::Dirac { points } => points[0].0.len(),
            Measure::Counting => 1,
            Measure::Product(fs) => fs.iter().map(|f| f.dim()).sum(),
        }
    }

    /// The measure `k * mu`. Renormalized averages are invariant under this,
    /// which the test suite exercises. The counting measure has no scaled
    /// representation here.
    pub fn try_scale(&self, k: f64) -> Result<Measure> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidInput(format!("measure scale must be positive, got {k}")));
        }
        match self {
            Measure::Density { dim, density, uniform } => {
                let d = density.clone();
                Ok(Measure::Density {
                    dim: *dim,
                    density: ScalarFn::new(move |x| k * d.eval(x)),
                    uniform: uniform.map(|c| c * k),
                })
            }
            Measure::Dirac { points } => Ok(Measure::Dirac {
                points: points.iter().map(|(p, w)| (p.clone(), w * k)).collect(),
            }),
            Measure::Counting => Err(Error::IncompatibleMeasures(
                "the counting measure cannot be scaled".into(),
            )),
            Measure::Product(_) => Err(Error::IncompatibleMeasures(
                "scale a product by scaling one factor instead".into(),
            )),
        }
    }

    /// The sum `mu + nu` when both live on the same space and kind.
    pub fn try_add(&self, other: &Measure) -> Result<Measure> {
        match (self, other) {
            (
                Measure::Density { dim: d1, density: f1, uniform: u1 },
                Measure::Density { dim: d2, density: f2, uniform: u2 },
            ) => {
                if d1 != d2 {
                    return Err(Error::DimensionMismatch { expected: *d1, found: *d2 });
                }
                let (f1, f2) = (f1.clone(), f2.clone());
                Ok(Measure::Density {
                    dim: *d1,
                    density: ScalarFn::new(move |x| f1.eval(x) + f2.eval(x)),
                    uniform: match (u1, u2) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    },
                })
            }
            (Measure::Dirac { points: p1 }, Measure::Dirac { points: p2 }) => {
                let mut points = p1.clone();
                points.extend(p2.iter().cloned());
                Ok(Measure::Dirac { points })
            }
            _ => Err(Error::IncompatibleMeasures(
                "sums are supported between two densities or two Dirac combinations".into(),
            )),
        }
    }
}

/// Result of [`measure_of`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub value: f64,
    pub abs_error: f64,
}

/// The mass `mu(region)`, with an error estimate. Exact for Dirac
/// combinations, counting prefixes, and constant densities over boxes, balls
/// and interval unions; otherwise computed by the integration engine.
pub fn measure_of(mu: &Measure, region: &Region, tol: Tol, seed: u64) -> Result<MassEstimate> {
    let opts = QuadOpts { tol, seed, ..QuadOpts::default() };
    let est = quad::integrate_mass(mu, region, &opts)?;
    Ok(MassEstimate { value: est.value[0], abs_error: est.abs_error })
}

/// Sample a point of `region` distributed according to `mu` restricted to it
/// (up to the usual rejection caveats). Used by sampled validity checks, not
/// by the integration engine. Returns `None` when rejection fails
/// `max_tries` times or the measure gives the region no mass.
pub(crate) fn sample_measure_point(
    mu: &Measure,
    region: &Region,
    rng: &mut impl Rng,
    max_tries: usize,
) -> Option<Vec<f64>> {
    match mu {
        Measure::Density { uniform: Some(_), .. } => {
            crate::region::sample_point(region, rng, max_tries)
        }
        Measure::Density { density, .. } => {
            let (lo, hi) = region.bounding_box();
            // Pilot scan for an envelope of the density over the box.
            let mut envelope = 0.0f64;
            let mut x = vec![0.0; lo.len()];
            for _ in 0..512 {
                for i in 0..x.len() {
                    x[i] = if hi[i] > lo[i] { rng.gen_range(lo[i]..hi[i]) } else { lo[i] };
                }
                if region.contains(&x) {
                    envelope = envelope.max(density.eval(&x));
                }
            }
            if envelope <= 0.0 || !envelope.is_finite() {
                return None;
            }
            envelope *= 1.5;
            for _ in 0..max_tries {
                for i in 0..x.len() {
                    x[i] = if hi[i] > lo[i] { rng.gen_range(lo[i]..hi[i]) } else { lo[i] };
                }
                if region.contains(&x) && rng.gen_range(0.0..1.0) * envelope < density.eval(&x) {
                    return Some(x);
                }
            }
            None
        }
        Measure::Dirac { points } => {
            let inside: Vec<&(Vec<f64>, f64)> =
                points.iter().filter(|(p, _)| region.contains(p)).collect();
            let total: f64 = inside.iter().map(|(_, w)| w).sum();
            if total <= 0.0 {
                return None;
            }
            let mut u = rng.gen_range(0.0..total);
            for (p, w) in &inside {
                if u < *w {
                    return Some(p.clone());
                }
                u -= w;
            }
            inside.last().map(|(p, _)| p.clone())
        }
        Measure::Counting => {
            if let Region::FinitePrefix(n) = region {
                Some(vec![rng.gen_range(0..=*n) as f64])
            } else {
                None
            }
        }
        Measure::Product(factors) => {
            let parts: Vec<&Region> = match region {
                Region::Product(parts) if parts.len() == factors.len() => parts.iter().collect(),
                _ => return None,
            };
            let mut out = Vec::with_capacity(region.dim());
            for (m, r) in factors.iter().zip(parts) {
                out.extend(sample_measure_point(m, r, rng, max_tries)?);
            }
            Some(out)
        }
    }
}
