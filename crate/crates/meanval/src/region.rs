//! Regions of R^m (and of the naturals) with total membership tests.
//!
//! Regions are deliberately simple data: the integration engine inspects
//! their resolved shape to pick a method, and everything else works through
//! `contains` plus a finite bounding box.

use rand::Rng;

use crate::error::{Error, Result};
use crate::func::ScalarFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallNorm {
    Euclidean,
    Sup,
}

#[derive(Debug, Clone)]
pub enum Region {
    /// Axis-aligned box `[lower_i, upper_i]`.
    HyperRect { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64, norm: BallNorm },
    /// `{ x : f(x) <= threshold }`, with a declared finite bounding box that
    /// must enclose the sublevel set (violations are detected by sampling,
    /// see `meanvalue::wmv_continuum`).
    Sublevel { f: ScalarFn, threshold: f64, box_lower: Vec<f64>, box_upper: Vec<f64> },
    /// `[0, n]` intersected with the naturals; the only region kind the
    /// counting measure integrates over.
    FinitePrefix(u64),
    Translate { inner: Box<Region>, shift: Vec<f64> },
    /// `{ k * x : x in inner }` for `k > 0` (dilation about the origin).
    Scale { inner: Box<Region>, factor: f64 },
    Union(Vec<Region>),
    /// Set difference `a \ b`.
    Difference(Box<Region>, Box<Region>),
    /// Cartesian product; coordinates are split by factor dimension in order.
    Product(Vec<Region>),
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} must be finite")));
    }
    Ok(())
}

impl Region {
    pub fn rect(lower: Vec<f64>, upper: Vec<f64>) -> Result<Region> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), found: upper.len() });
        }
        check_finite(&lower, "rect bounds")?;
        check_finite(&upper, "rect bounds")?;
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidInput("rect has lower > upper".into()));
        }
        Ok(Region::HyperRect { lower, upper })
    }

    /// Symmetric cube `[-h, h]^dim`.
    pub fn cube(dim: usize, h: f64) -> Result<Region> {
        Region::rect(vec![-h; dim], vec![h; dim])
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Region> {
        Region::rect(vec![lo], vec![hi])
    }

    pub fn ball(center: Vec<f64>, radius: f64, norm: BallNorm) -> Result<Region> {
        if center.is_empty() {
            return Err(Error::InvalidInput("ball needs a nonempty center".into()));
        }
        check_finite(&center, "ball center")?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Region::Ball { center, radius, norm })
    }

    pub fn sublevel(
        f: ScalarFn,
        threshold: f64,
        box_lower: Vec<f64>,
        box_upper: Vec<f64>,
    ) -> Result<Region> {
        // Reuse rect validation for the box.
        let rect = Region::rect(box_lower, box_upper)?;
        let (box_lower, box_upper) = match rect {
            Region::HyperRect { lower, upper } => (lower, upper),
            _ => unreachable!(),
        };
        Ok(Region::Sublevel { f, threshold, box_lower, box_upper })
    }

    pub fn prefix(n: u64) -> Region {
        Region::FinitePrefix(n)
    }

    pub fn translate(inner: Region, shift: Vec<f64>) -> Result<Region> {
        if shift.len() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: inner.dim(), found: shift.len() });
        }
        check_finite(&shift, "shift")?;
        Ok(Region::Translate { inner: Box::new(inner), shift })
    }

    pub fn scale(inner: Region, factor: f64) -> Result<Region> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidInput(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Region::Scale { inner: Box::new(inner), factor })
    }

    pub fn union(parts: Vec<Region>) -> Result<Region> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("union of no regions".into()));
        }
        let d = parts[0].dim();
        for p in &parts[1..] {
            if p.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
        }
        Ok(Region::Union(parts))
    }

    pub fn difference(a: Region, b: Region) -> Result<Region> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
        }
        Ok(Region::Difference(Box::new(a), Box::new(b)))
    }

    pub fn product(parts: Vec<Region>) -> Result<Region> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("product of no regions".into()));
        }
        Ok(Region::Product(parts))
    }

    /// Ambient dimension (a natural-number prefix counts as one coordinate).
    pub fn dim(&self) -> usize {
        match self {
            Region::HyperRect { lower, .. } => lower.len(),
            Region::Ball { center, .. } => center.len(),
            Region::Sublevel { box_lower, .. } => box_lower.len(),
            Region::FinitePrefix(_) => 1,
            Region::Translate { inner, .. } | Region::Scale { inner, .. } => inner.dim(),
            Region::Union(parts) => parts[0].dim(),
            Region::Difference(a, _) => a.dim(),
            Region::Product(parts) => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    /// Total, deterministic membership test.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::HyperRect { lower, upper } => {
                x.iter().zip(lower).zip(upper).all(|((v, l), u)| *l <= *v && *v <= *u)
            }
            Region::Ball { center, radius, norm } => {
                let d = match norm {
                    BallNorm::Euclidean => x
                        .iter()
                        .zip(center)
                        .map(|(v, c)| (v - c) * (v - c))
                        .sum::<f64>()
                        .sqrt(),
                    BallNorm::Sup => x
                        .iter()
                        .zip(center)
                        .fold(0.0f64, |m, (v, c)| m.max((v - c).abs())),
                };
                d <= *radius
            }
            Region::Sublevel { f, threshold, .. } => f.eval(x) <= *threshold,
            Region::FinitePrefix(n) => 0.0 <= x[0] && x[0] <= *n as f64,
            Region::Translate { inner, shift } => {
                let y: Vec<f64> = x.iter().zip(shift).map(|(v, s)| v - s).collect();
                inner.contains(&y)
            }
            Region::Scale { inner, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v / factor).collect();
                inner.contains(&y)
            }
            Region::Union(parts) => parts.iter().any(|p| p.contains(x)),
            Region::Difference(a, b) => a.contains(x) && !b.contains(x),
            Region::Product(parts) => {
                let mut off = 0;
                parts.iter().all(|p| {
                    let d = p.dim();
                    let ok = p.contains(&x[off..off + d]);
                    off += d;
                    ok
                })
            }
        }
    }

    /// A finite axis-aligned box containing the region.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::HyperRect { lower, upper } => (lower.clone(), upper.clone()),
            Region::Ball { center, radius, .. } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Region::Sublevel { box_lower, box_upper, .. } => {
                (box_lower.clone(), box_upper.clone())
            }
            Region::FinitePrefix(n) => (vec![0.0], vec![*n as f64]),
            Region::Translate { inner, shift } => {
                let (lo, hi) = inner.bounding_box();
                (
                    lo.iter().zip(shift).map(|(v, s)| v + s).collect(),
                    hi.iter().zip(shift).map(|(v, s)| v + s).collect(),
                )
            }
            Region::Scale { inner, factor } => {
                let (lo, hi) = inner.bounding_box();
                (lo.iter().map(|v| v * factor).collect(), hi.iter().map(|v| v * factor).collect())
            }
            Region::Union(parts) => {
                let (mut lo, mut hi) = parts[0].bounding_box();
                for p in &parts[1..] {
                    let (l, h) = p.bounding_box();
                    for i in 0..lo.len() {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                (lo, hi)
            }
            Region::Difference(a, _) => a.bounding_box(),
            Region::Product(parts) => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for p in parts {
                    let (l, h) = p.bounding_box();
                    lo.extend(l);
                    hi.extend(h);
                }
                (lo, hi)
            }
        }
    }

    /// Structural simplification used by the integration engine to pick a
    /// method. Translations and dilations push through boxes and balls; unions
    /// and differences of one-dimensional intervals reduce to disjoint
    /// interval lists (so they integrate exactly instead of by sampling).
    pub(crate) fn resolve(&self) -> Shape {
        match self {
            Region::HyperRect { lower, upper } => {
                Shape::Rect { lower: lower.clone(), upper: upper.clone() }
            }
            Region::Ball { center, radius, norm } => match norm {
                BallNorm::Euclidean => {
                    if center.len() == 1 {
                        Shape::Rect { lower: vec![center[0] - radius], upper: vec![center[0] + radius] }
                    } else {
                        Shape::EuclBall { center: center.clone(), radius: *radius }
                    }
                }
                // A sup-norm ball is a cube.
                BallNorm::Sup => Shape::Rect {
                    lower: center.iter().map(|c| c - radius).collect(),
                    upper: center.iter().map(|c| c + radius).collect(),
                },
            },
            Region::Sublevel { .. } => Shape::General,
            Region::FinitePrefix(n) => Shape::Prefix(*n),
            Region::Translate { inner, shift } => match inner.resolve() {
                Shape::Rect { lower, upper } => Shape::Rect {
                    lower: lower.iter().zip(shift).map(|(v, s)| v + s).collect(),
                    upper: upper.iter().zip(shift).map(|(v, s)| v + s).collect(),
                },
                Shape::EuclBall { center, radius } => Shape::EuclBall {
                    center: center.iter().zip(shift).map(|(v, s)| v + s).collect(),
                    radius,
                },
                Shape::Intervals(iv) => {
                    Shape::Intervals(iv.iter().map(|(a, b)| (a + shift[0], b + shift[0])).collect())
                }
                _ => Shape::General,
            },
            Region::Scale { inner, factor } => match inner.resolve() {
                Shape::Rect { lower, upper } => Shape::Rect {
                    lower: lower.iter().map(|v| v * factor).collect(),
                    upper: upper.iter().map(|v| v * factor).collect(),
                },
                Shape::EuclBall { center, radius } => Shape::EuclBall {
                    center: center.iter().map(|v| v * factor).collect(),
                    radius: radius * factor,
                },
                Shape::Intervals(iv) => {
                    Shape::Intervals(iv.iter().map(|(a, b)| (a * factor, b * factor)).collect())
                }
                _ => Shape::General,
            },
            Region::Union(parts) => {
                if self.dim() != 1 {
                    return Shape::General;
                }
                let mut iv = Vec::new();
                for p in parts {
                    match p.resolve() {
                        Shape::Rect { lower, upper } => iv.push((lower[0], upper[0])),
                        Shape::Intervals(sub) => iv.extend(sub),
                        _ => return Shape::General,
                    }
                }
                Shape::Intervals(merge_intervals(iv))
            }
            Region::Difference(a, b) => {
                if self.dim() != 1 {
                    return Shape::General;
                }
                let av = match a.resolve() {
                    Shape::Rect { lower, upper } => vec![(lower[0], upper[0])],
                    Shape::Intervals(iv) => iv,
                    _ => return Shape::General,
                };
                let bv = match b.resolve() {
                    Shape::Rect { lower, upper } => vec![(lower[0], upper[0])],
                    Shape::Intervals(iv) => iv,
                    _ => return Shape::General,
                };
                Shape::Intervals(subtract_intervals(&merge_intervals(av), &merge_intervals(bv)))
            }
            Region::Product(parts) => {
                let mut lower = Vec::new();
                let mut upper = Vec::new();
                for p in parts {
                    match p.resolve() {
                        Shape::Rect { lower: l, upper: u } => {
                            lower.extend(l);
                            upper.extend(u);
                        }
                        _ => return Shape::General,
                    }
                }
                Shape::Rect { lower, upper }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shape {
    Rect { lower: Vec<f64>, upper: Vec<f64> },
    EuclBall { center: Vec<f64>, radius: f64 },
    /// Disjoint sorted intervals on the line.
    Intervals(Vec<(f64, f64)>),
    Prefix(u64),
    /// No usable structure: integrate by sampling via `contains`.
    General,
}

/// Sort and coalesce possibly-overlapping intervals into a disjoint list.
pub(crate) fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.retain(|(a, b)| b > a);
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.partial_cmp(&y.1).unwrap()));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some((_, ob)) if a <= *ob => *ob = ob.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Set difference of two disjoint sorted interval lists.
pub(crate) fn subtract_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(alo, ahi) in a {
        let mut lo = alo;
        for &(blo, bhi) in b {
            if bhi <= lo || blo >= ahi {
                continue;
            }
            if blo > lo {
                out.push((lo, blo));
            }
            lo = lo.max(bhi);
            if lo >= ahi {
                break;
            }
        }
        if lo < ahi {
            out.push((lo, ahi));
        }
    }
    out
}

/// Rejection-sample a point of `region` uniformly from its bounding box.
/// Returns `None` when `max_tries` samples all miss (pathologically thin
/// regions); callers treat that as inconclusive rather than as an error.
pub(crate) fn sample_point(
    region: &Region,
    rng: &mut impl Rng,
    max_tries: usize,
) -> Option<Vec<f64>> {
    if let Region::FinitePrefix(n) = region {
        let k = rng.gen_range(0..=*n);
        return Some(vec![k as f64]);
    }
    let (lo, hi) = region.bounding_box();
    let mut x = vec![0.0; lo.len()];
    for _ in 0..max_tries {
        for i in 0..x.len() {
            x[i] = if hi[i] > lo[i] { rng.gen_range(lo[i]..hi[i]) } else { lo[i] };
        }
        if region.contains(&x) {
            return Some(x);
        }
    }
    None
}
