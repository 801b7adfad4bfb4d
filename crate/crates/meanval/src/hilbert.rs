//! Heuristic Lebesgue-type mean on a separable sequence space.
//!
//! A function that depends on finitely many coordinates of an orthonormal
//! flag is averaged over growing cubes written in that flag's basis. The
//! value survives flag enlargement, flag-parallel translation and natural
//! dilations, but it is *not* invariant under rotating the frame: the tests
//! pin this down with a cone indicator whose mean moves when the frame
//! turns. Treat the result as a normalization-dependent heuristic rather
//! than a canonical invariant.

use crate::error::{Error, Result};
use crate::func::VectorFn;
use crate::meanvalue::{self, ConvergenceCriteria, MeanValueResult};
use crate::measure::Measure;
use crate::quad::QuadOpts;
use crate::renorm::RenormSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative tolerance for "is this vector inside the span" decisions.
const SPAN_TOL: f64 = 1e-9;
/// Vectors whose residual falls below this fraction of their norm are
/// treated as linearly dependent and dropped.
const DROP_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Modified Gram–Schmidt with a re-orthogonalization pass. Dependent (or
/// zero) vectors are dropped rather than reported as errors, so the result
/// is an orthonormal basis of the span.
pub fn orthonormalize(vectors: &[Vec<f64>], drop_tol: f64) -> Result<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let ambient = match vectors.first() {
        Some(v) => v.len(),
        None => return Ok(basis),
    };
    if ambient == 0 {
        return Err(Error::InvalidInput("ambient dimension must be positive".into()));
    }
    for v in vectors {
        if v.len() != ambient {
            return Err(Error::DimensionMismatch { expected: ambient, found: v.len() });
        }
        let original = norm(v);
        if original == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        let rn = norm(&r);
        if rn > drop_tol * original {
            for ri in r.iter_mut() {
                *ri /= rn;
            }
            basis.push(r);
        }
    }
    Ok(basis)
}

/// An affine plane `base + span(directions)` in canonical form: the
/// directions are orthonormal and the base point is orthogonal to them, so
/// two descriptions of the same plane canonicalize identically.
#[derive(Clone, Debug)]
pub struct AffineSupport {
    base: Vec<f64>,
    directions: Vec<Vec<f64>>,
}

impl AffineSupport {
    pub fn new(base: &[f64], directions: &[Vec<f64>]) -> Result<Self> {
        let dirs = orthonormalize(directions, DROP_TOL)?;
        if let Some(d) = dirs.first() {
            if d.len() != base.len() {
                return Err(Error::DimensionMismatch { expected: d.len(), found: base.len() });
            }
        }
        let mut b = base.to_vec();
        for d in &dirs {
            let c = dot(&b, d);
            for (bi, di) in b.iter_mut().zip(d) {
                *bi -= c * di;
            }
        }
        Ok(AffineSupport { base: b, directions: dirs })
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn ambient(&self) -> usize {
        self.base.len()
    }

    /// Offset of the plane from the origin, orthogonal to every direction.
    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        if point.len() != self.ambient() {
            return false;
        }
        let mut r: Vec<f64> = point.iter().zip(&self.base).map(|(p, b)| p - b).collect();
        for d in &self.directions {
            let c = dot(&r, d);
            for (ri, di) in r.iter_mut().zip(d) {
                *ri -= c * di;
            }
        }
        norm(&r) <= SPAN_TOL * (1.0 + norm(point))
    }

    /// Coordinates of an in-plane point in the direction frame.
    pub fn coordinates(&self, point: &[f64]) -> Result<Vec<f64>> {
        if !self.contains(point) {
            return Err(Error::SupportEscapesFlag);
        }
        let rel: Vec<f64> = point.iter().zip(&self.base).map(|(p, b)| p - b).collect();
        Ok(self.directions.iter().map(|d| dot(&rel, d)).collect())
    }
}

/// Smallest affine plane containing all the points.
pub fn affine_hull(points: &[Vec<f64>]) -> Result<AffineSupport> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidInput("affine hull of an empty set".into()))?;
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    AffineSupport::new(first, &diffs)
}

/// An increasing chain of subspaces with a fixed orthonormal basis: stage
/// `k` is the span of the first `stages[k]` rows. The mean below is taken
/// relative to this frame, which is exactly why it is basis-dependent.
#[derive(Clone, Debug)]
pub struct Flag {
    vectors: Vec<Vec<f64>>,
    stages: Vec<usize>,
}

impl Flag {
    /// The coordinate flag `span(e_1) ⊂ span(e_1, e_2) ⊂ …`.
    pub fn coordinate(ambient: usize) -> Flag {
        assert!(ambient > 0, "ambient dimension must be positive");
        let vectors = (0..ambient)
            .map(|i| {
                let mut v = vec![0.0; ambient];
                v[i] = 1.0;
                v
            })
            .collect();
        Flag { vectors, stages: (1..=ambient).collect() }
    }

    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    pub fn ambient(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    pub fn stage_dim(&self, stage: usize) -> usize {
        self.stages[stage]
    }

    /// Orthonormal basis rows of stage `stage`.
    pub fn stage_basis(&self, stage: usize) -> &[Vec<f64>] {
        &self.vectors[..self.stages[stage]]
    }

    /// Frame coordinates of `v` if it lies in stage `stage`.
    pub fn coords_in_stage(&self, stage: usize, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.ambient() {
            return Err(Error::DimensionMismatch { expected: self.ambient(), found: v.len() });
        }
        let basis = self.stage_basis(stage);
        let coords: Vec<f64> = basis.iter().map(|b| dot(v, b)).collect();
        let mut r = v.to_vec();
        for (c, b) in coords.iter().zip(basis) {
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        if norm(&r) > SPAN_TOL * (1.0 + norm(v)) {
            return Err(Error::SupportEscapesFlag);
        }
        Ok(coords)
    }
}

/// Build a flag whose stage `k` spans the union of `generators[0..=k]`.
/// Generators that add nothing new are dropped, so stage dimensions can
/// repeat.
pub fn build_flag(generators: &[Vec<Vec<f64>>]) -> Result<Flag> {
    if generators.is_empty() {
        return Err(Error::InvalidInput("a flag needs at least one generator batch".into()));
    }
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut stages = Vec::with_capacity(generators.len());
    for batch in generators {
        for v in batch {
            let mut all = vectors.clone();
            all.push(v.clone());
            vectors = orthonormalize(&all, DROP_TOL)?;
        }
        stages.push(vectors.len());
    }
    if vectors.is_empty() {
        return Err(Error::InvalidInput("flag generators span only the zero space".into()));
    }
    Ok(Flag { vectors, stages })
}

/// A cylindrical function on the sequence space: `kernel` applied to the
/// coordinates of a point in the basis of one flag stage.
#[derive(Clone)]
pub struct HilbertFn {
    flag: Flag,
    stage: usize,
    kernel: VectorFn,
}

impl HilbertFn {
    pub fn new(flag: Flag, stage: usize, kernel: VectorFn) -> Result<Self> {
        if stage >= flag.depth() {
            return Err(Error::InvalidInput(format!(
                "stage {stage} out of range for a flag of depth {}",
                flag.depth()
            )));
        }
        Ok(HilbertFn { flag, stage, kernel })
    }

    /// Dimension of the plane the kernel reads.
    pub fn dim(&self) -> usize {
        self.flag.stage_dim(self.stage)
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn kernel(&self) -> &VectorFn {
        &self.kernel
    }

    /// The support plane through the origin.
    pub fn support(&self) -> AffineSupport {
        AffineSupport {
            base: vec![0.0; self.flag.ambient()],
            directions: self.flag.stage_basis(self.stage).to_vec(),
        }
    }

    /// The heuristic mean: the weak mean of the kernel against Lebesgue
    /// measure over growing cubes in the frame coordinates. Cubes — not
    /// balls — are part of the definition; changing the window shape or
    /// rotating the frame changes the value for non-radial kernels.
    pub fn mean(
        &self,
        crit: &ConvergenceCriteria,
        opts: &QuadOpts,
    ) -> Result<MeanValueResult> {
        let m = self.dim();
        meanvalue::wmv(
            &self.kernel,
            &Measure::lebesgue(m),
            &RenormSequence::cubes(m),
            crit,
            opts,
        )
    }

    /// View the same function in a later stage of the flag; the kernel
    /// ignores the added coordinates, and the extra cube factors cancel
    /// between numerator and mass, so the mean is unchanged.
    pub fn enlarge(&self, stage: usize) -> Result<HilbertFn> {
        if stage < self.stage {
            return Err(Error::InvalidInput(
                "enlargement target precedes the current stage; use restrict".into(),
            ));
        }
        if stage >= self.flag.depth() {
            return Err(Error::InvalidInput(format!(
                "stage {stage} out of range for a flag of depth {}",
                self.flag.depth()
            )));
        }
        let m_old = self.dim();
        let kernel = match self.kernel.constant_value() {
            Some(c) => VectorFn::constant(c),
            None => {
                let inner = self.kernel.clone();
                VectorFn::new(inner.dim(), move |x, out| inner.eval_into(&x[..m_old], out))
            }
        };
        Ok(HilbertFn { flag: self.flag.clone(), stage, kernel })
    }

    /// Translate by an ambient vector. The vector must lie in the current
    /// stage; translating off the flag has no kernel representation here
    /// and is refused.
    pub fn translate(&self, v: &[f64]) -> Result<HilbertFn> {
        let shift = self.flag.coords_in_stage(self.stage, v)?;
        let inner = self.kernel.clone();
        let kernel = VectorFn::new(inner.dim(), move |x, out| {
            let y: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
            inner.eval_into(&y, out);
        });
        Ok(HilbertFn { flag: self.flag.clone(), stage: self.stage, kernel })
    }

    /// Natural dilation `x ↦ x / alpha` of the support plane with
    /// `alpha ∈ {1, 2, …}`; cubes map onto (a cofinal family of) cubes, so
    /// the mean is unchanged.
    pub fn dilate(&self, alpha: u32) -> Result<HilbertFn> {
        if alpha == 0 {
            return Err(Error::InvalidInput("dilation factor must be a positive natural".into()));
        }
        let a = alpha as f64;
        let inner = self.kernel.clone();
        let kernel = VectorFn::new(inner.dim(), move |x, out| {
            let y: Vec<f64> = x.iter().map(|t| a * t).collect();
            inner.eval_into(&y, out);
        });
        Ok(HilbertFn { flag: self.flag.clone(), stage: self.stage, kernel })
    }

    /// Precompose the kernel with an orthogonal map of the stage, i.e.
    /// rotate the function while keeping the frame (equivalently, rotate
    /// the frame under the function). The mean of a non-radial kernel
    /// genuinely changes under this — the heuristic is frame-dependent.
    pub fn rotate_kernel(&self, q: &[Vec<f64>]) -> Result<HilbertFn> {
        let m = self.dim();
        if q.len() != m || q.iter().any(|row| row.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: q.iter().map(|r| r.len()).chain([q.len()]).min().unwrap_or(0),
            });
        }
        let mut deviation = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let g: f64 = (0..m).map(|k| q[k][i] * q[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((g - target).abs());
            }
        }
        if deviation > SPAN_TOL {
            return Err(Error::NotOrthogonal { deviation });
        }
        let q: Vec<Vec<f64>> = q.to_vec();
        let inner = self.kernel.clone();
        let kernel = VectorFn::new(inner.dim(), move |x, out| {
            let y: Vec<f64> = q.iter().map(|row| dot(row, x)).collect();
            inner.eval_into(&y, out);
        });
        Ok(HilbertFn { flag: self.flag.clone(), stage: self.stage, kernel })
    }

    /// Drop trailing flag coordinates after checking, on random probes,
    /// that the kernel never reads them. The restricted mean is the same
    /// computation in fewer dimensions.
    pub fn restrict(&self, stage: usize, probes: usize, seed: u64) -> Result<HilbertFn> {
        if stage > self.stage {
            return Err(Error::InvalidInput(
                "restriction target follows the current stage; use enlarge".into(),
            ));
        }
        let m_old = self.dim();
        let m_new = self.flag.stage_dim(stage);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; m_old];
        for _ in 0..probes.max(1) {
            for xi in x.iter_mut() {
                *xi = rng.gen_range(-10.0..10.0);
            }
            let reference = self.kernel.eval(&x);
            for j in m_new..m_old {
                let saved = x[j];
                x[j] = rng.gen_range(-10.0..10.0);
                let probed = self.kernel.eval(&x);
                x[j] = saved;
                let differs = reference
                    .iter()
                    .zip(&probed)
                    .any(|(a, b)| (a - b).abs() > SPAN_TOL * (1.0 + a.abs()));
                if differs {
                    return Err(Error::FlagNotContained { missing: j });
                }
            }
        }
        let kernel = match self.kernel.constant_value() {
            Some(c) => VectorFn::constant(c),
            None => {
                let inner = self.kernel.clone();
                VectorFn::new(inner.dim(), move |x, out| {
                    let mut y = vec![0.0; m_old];
                    y[..x.len()].copy_from_slice(x);
                    inner.eval_into(&y, out);
                })
            }
        };
        Ok(HilbertFn { flag: self.flag.clone(), stage, kernel })
    }
}

impl std::fmt::Debug for HilbertFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HilbertFn")
            .field("stage", &self.stage)
            .field("dim", &self.dim())
            .finish()
    }
}
