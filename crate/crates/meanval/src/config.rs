//! JSON experiment configs and the batch runner behind the `meanval` binary.
//!
//! A config names one experiment `kind`, the objects it needs (functions as
//! expression strings, measures, window families), and optional convergence
//! and quadrature settings. [`run`] executes it and returns an [`Outcome`]:
//! a process exit code, a JSON report with deterministic key order, and the
//! per-step history when the experiment drives a single mean-value loop.
//!
//! Exit codes: 0 — converged (or strong / all-pass), 2 — oscillating (or a
//! failed strong-mean or suite check), 3 — iteration budget exhausted
//! without a verdict, and any hard error surfaces as `Err` (the binary maps
//! those to exit 1).

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::asymptotics::{self, ScaleClass};
use crate::error::{Error, Result};
use crate::expr;
use crate::func::{ScalarFn, VectorFn};
use crate::hilbert::{Flag, HilbertFn};
use crate::meanvalue::{
    self, ConvergenceCriteria, MeanValueHistory, MeanValueResult, Status,
};
use crate::measure::Measure;
use crate::products::{CylindricalFunction, Factor, ProductSpace};
use crate::quad::{QuadOpts, Tol};
use crate::renorm::RenormSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Weak mean value of a function along one window family.
    Wmv,
    /// Strong-mean probe: the same mean along several families.
    MvCheck,
    /// Mean of a sequence `k -> f(k)`.
    Cesaro,
    /// Mean along a continuum-indexed sublevel family.
    Continuum,
    /// Relative scale of two measures and the induced mixing weights.
    Asymptotics,
    /// Cylindrical mean over a product of factor spaces.
    Product,
    /// Frame-relative heuristic mean with optional transforms.
    Hilbert,
    /// Nullity probe for a linear functional.
    Homology,
    /// Built-in battery of invariance checks.
    InvarianceSuite,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Wmv => "wmv",
            Kind::MvCheck => "mv_check",
            Kind::Cesaro => "cesaro",
            Kind::Continuum => "continuum",
            Kind::Asymptotics => "asymptotics",
            Kind::Product => "product",
            Kind::Hilbert => "hilbert",
            Kind::Homology => "homology",
            Kind::InvarianceSuite => "invariance_suite",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Lebesgue,
    /// Lebesgue measure with a constant density.
    Uniform { scale: f64 },
    /// Density given as an expression in `x0..x{dim-1}`.
    Density { expr: String },
    /// Weighted atoms; weights default to 1.
    Dirac {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    Counting,
    Scaled { factor: f64, inner: Box<MeasureSpec> },
    Sum { parts: Vec<MeasureSpec> },
}

impl MeasureSpec {
    pub fn build(&self, dim: usize) -> Result<Measure> {
        match self {
            MeasureSpec::Lebesgue => Ok(Measure::lebesgue(dim)),
            MeasureSpec::Uniform { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Config(format!(
                        "uniform scale must be positive, got {scale}"
                    )));
                }
                Ok(Measure::uniform(dim, *scale))
            }
            MeasureSpec::Density { expr: src } => {
                let e = expr::parse(src, dim)?;
                Ok(Measure::density(dim, ScalarFn::from_expr(&e)))
            }
            MeasureSpec::Dirac { points, weights } => {
                if points.is_empty() {
                    return Err(Error::Config("dirac measure needs at least one point".into()));
                }
                for p in points {
                    if p.len() != dim {
                        return Err(Error::Config(format!(
                            "dirac point has dimension {}, expected {dim}",
                            p.len()
                        )));
                    }
                }
                let w = match weights {
                    Some(w) => {
                        if w.len() != points.len() {
                            return Err(Error::Config(format!(
                                "{} weights for {} points",
                                w.len(),
                                points.len()
                            )));
                        }
                        w.clone()
                    }
                    None => vec![1.0; points.len()],
                };
                Measure::dirac_comb(points.iter().cloned().zip(w).collect())
            }
            MeasureSpec::Counting => {
                if dim != 1 {
                    return Err(Error::Config(
                        "the counting measure lives on the natural numbers (dim 1)".into(),
                    ));
                }
                Ok(Measure::counting())
            }
            MeasureSpec::Scaled { factor, inner } => inner.build(dim)?.try_scale(*factor),
            MeasureSpec::Sum { parts } => {
                let mut iter = parts.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| Error::Config("measure sum needs at least one part".into()))?;
                let mut acc = first.build(dim)?;
                for p in iter {
                    acc = acc.try_add(&p.build(dim)?)?;
                }
                Ok(acc)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RenormSpec {
    Cubes,
    Balls,
    GeometricCubes,
    /// `{0, …, n}` prefixes for the counting measure.
    Prefixes,
    /// The comb of half-period intervals used by the oscillation examples.
    HalfwaveComb,
    Translate { inner: Box<RenormSpec>, offset: Vec<f64> },
}

impl RenormSpec {
    pub fn build(&self, dim: usize) -> Result<RenormSequence> {
        match self {
            RenormSpec::Cubes => Ok(RenormSequence::cubes(dim)),
            RenormSpec::Balls => Ok(RenormSequence::balls(dim)),
            RenormSpec::GeometricCubes => Ok(RenormSequence::geometric_cubes(dim)),
            RenormSpec::Prefixes => {
                if dim != 1 {
                    return Err(Error::Config("prefix windows are one-dimensional".into()));
                }
                Ok(RenormSequence::prefixes())
            }
            RenormSpec::HalfwaveComb => {
                if dim != 1 {
                    return Err(Error::Config("the half-wave comb is one-dimensional".into()));
                }
                Ok(RenormSequence::halfwave_comb())
            }
            RenormSpec::Translate { inner, offset } => inner.build(dim)?.translate(offset.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub dim: usize,
    pub measure: MeasureSpec,
    pub renorm: RenormSpec,
}

impl FactorSpec {
    pub fn build(&self) -> Result<Factor> {
        Ok(Factor::new(self.measure.build(self.dim)?, self.renorm.build(self.dim)?))
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaSpec {
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub n_max: Option<u64>,
    #[serde(default)]
    pub aitken: Option<bool>,
}

impl CriteriaSpec {
    pub fn build(&self) -> Result<ConvergenceCriteria> {
        let d = ConvergenceCriteria::default();
        let c = ConvergenceCriteria {
            eps: self.eps.unwrap_or(d.eps),
            window: self.window.unwrap_or(d.window),
            n_max: self.n_max.unwrap_or(d.n_max),
            aitken: self.aitken.unwrap_or(d.aitken),
        };
        if !(c.eps > 0.0 && c.eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {}", c.eps)));
        }
        if c.window < 2 {
            return Err(Error::Config("window must be at least 2".into()));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub budget: Option<u64>,
}

impl QuadSpec {
    pub fn build(&self, seed: u64) -> Result<QuadOpts> {
        let d = QuadOpts::default();
        let abs = self.abs_tol.unwrap_or(1e-9);
        let rel = self.rel_tol.unwrap_or(1e-6);
        if !(abs >= 0.0 && rel >= 0.0 && abs.is_finite() && rel.is_finite()) {
            return Err(Error::Config("quadrature tolerances must be nonnegative".into()));
        }
        Ok(QuadOpts { tol: Tol::mixed(abs, rel), seed, budget: self.budget.unwrap_or(d.budget) })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Thresholds {
    /// Explicit strictly increasing parameter grid.
    List(Vec<f64>),
    /// `start * factor^k` for `k < count`.
    Geometric { start: f64, factor: f64, count: usize },
}

impl Thresholds {
    fn grid(&self) -> Result<Vec<f64>> {
        let g = match self {
            Thresholds::List(v) => v.clone(),
            Thresholds::Geometric { start, factor, count } => {
                if !(*start > 0.0 && *factor > 1.0) {
                    return Err(Error::Config(
                        "geometric thresholds need start > 0 and factor > 1".into(),
                    ));
                }
                (0..*count).map(|k| start * factor.powi(k as i32)).collect()
            }
        };
        if g.is_empty() {
            return Err(Error::Config("empty threshold grid".into()));
        }
        if g.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("thresholds must be strictly increasing".into()));
        }
        Ok(g)
    }
}

/// Bounding box half-width for sublevel windows: `offset + slope * t`
/// (or `offset + slope * sqrt(t)` with `sqrt: true`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub offset: f64,
    pub slope: f64,
    #[serde(default)]
    pub sqrt: bool,
}

impl BoxSpec {
    fn half(&self, t: f64) -> f64 {
        self.offset + self.slope * if self.sqrt { t.sqrt() } else { t }
    }
}

/// One experiment. Fields beyond `kind`, `seed`, `label`, `criteria` and
/// `quad` are kind-specific; [`validate`] reports which ones are missing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub criteria: CriteriaSpec,
    #[serde(default)]
    pub quad: QuadSpec,
    #[serde(default)]
    pub dim: Option<usize>,
    /// Components of the integrand as expressions in `x0..x{dim-1}`.
    #[serde(default)]
    pub function: Option<Vec<String>>,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub mu: Option<MeasureSpec>,
    #[serde(default)]
    pub nu: Option<MeasureSpec>,
    #[serde(default)]
    pub renorm: Option<RenormSpec>,
    #[serde(default)]
    pub renorms: Option<Vec<RenormSpec>>,
    #[serde(default)]
    pub class_eps: Option<f64>,
    #[serde(default)]
    pub potential: Option<String>,
    #[serde(default)]
    pub thresholds: Option<Thresholds>,
    #[serde(default)]
    pub bounding: Option<BoxSpec>,
    #[serde(default)]
    pub factors: Option<Vec<FactorSpec>>,
    #[serde(default)]
    pub tail: Option<FactorSpec>,
    #[serde(default)]
    pub support: Option<Vec<usize>>,
    #[serde(default)]
    pub check_support: Option<Vec<usize>>,
    #[serde(default)]
    pub rotate: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub translate: Option<Vec<f64>>,
    #[serde(default)]
    pub dilate: Option<u32>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn from_json(src: &str) -> Result<RunConfig> {
        serde_json::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<RunConfig> {
        RunConfig::from_json(&std::fs::read_to_string(path)?)
    }
}

/// What a run produces: the process exit code, a JSON report (deterministic
/// key order, so byte-identical across reruns with the same config), and
/// the step history when there is a single mean-value loop to trace.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
    pub history: Option<MeanValueHistory>,
}

/// One row of the invariance battery.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteRow {
    pub id: &'static str,
    pub law: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn require<'a, T>(field: &'a Option<T>, kind: Kind, name: &str) -> Result<&'a T> {
    field.as_ref().ok_or_else(|| {
        Error::Config(format!("kind '{}' requires the field '{name}'", kind.name()))
    })
}

fn parse_function(exprs: &[String], dim: usize) -> Result<VectorFn> {
    if exprs.is_empty() {
        return Err(Error::Config("the function needs at least one component".into()));
    }
    let mut parts = Vec::with_capacity(exprs.len());
    for src in exprs {
        let e = expr::parse(src, dim)?;
        parts.push(ScalarFn::from_expr(&e).with_label(src.clone()));
    }
    Ok(VectorFn::from_scalars(parts))
}

enum Prepared {
    Wmv { f: VectorFn, mu: Measure, seq: RenormSequence },
    MvCheck { f: VectorFn, mu: Measure, seqs: Vec<RenormSequence> },
    Cesaro { f: VectorFn },
    Continuum { f: VectorFn, mu: Measure, potential: ScalarFn, grid: Vec<f64>, boxspec: BoxSpec, dim: usize },
    Asymptotics { mu: Measure, nu: Measure, seq: RenormSequence, class_eps: Option<f64> },
    Product { space: ProductSpace, cyl: CylindricalFunction, check: Option<Vec<usize>> },
    Hilbert { f: HilbertFn },
    Homology { coefficients: Vec<f64> },
    Suite,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.criteria.build()?;
    cfg.quad.build(cfg.seed)?;
    match cfg.kind {
        Kind::Wmv => {
            let dim = *require(&cfg.dim, cfg.kind, "dim")?;
            let f = parse_function(require(&cfg.function, cfg.kind, "function")?, dim)?;
            let mu = require(&cfg.measure, cfg.kind, "measure")?.build(dim)?;
            let seq = require(&cfg.renorm, cfg.kind, "renorm")?.build(dim)?;
            Ok(Prepared::Wmv { f, mu, seq })
        }
        Kind::MvCheck => {
            let dim = *require(&cfg.dim, cfg.kind, "dim")?;
            let f = parse_function(require(&cfg.function, cfg.kind, "function")?, dim)?;
            let mu = require(&cfg.measure, cfg.kind, "measure")?.build(dim)?;
            let specs = require(&cfg.renorms, cfg.kind, "renorms")?;
            if specs.len() < 2 {
                return Err(Error::Config("mv_check needs at least two renorms".into()));
            }
            let seqs = specs.iter().map(|s| s.build(dim)).collect::<Result<Vec<_>>>()?;
            Ok(Prepared::MvCheck { f, mu, seqs })
        }
        Kind::Cesaro => {
            let f = parse_function(require(&cfg.function, cfg.kind, "function")?, 1)?;
            Ok(Prepared::Cesaro { f })
        }
        Kind::Continuum => {
            let dim = *require(&cfg.dim, cfg.kind, "dim")?;
            let f = parse_function(require(&cfg.function, cfg.kind, "function")?, dim)?;
            let mu = require(&cfg.measure, cfg.kind, "measure")?.build(dim)?;
            let pot = expr::parse(require(&cfg.potential, cfg.kind, "potential")?, dim)?;
            let grid = require(&cfg.thresholds, cfg.kind, "thresholds")?.grid()?;
            let boxspec = require(&cfg.bounding, cfg.kind, "bounding")?.clone();
            for &t in &grid {
                if !(boxspec.half(t) > 0.0) {
                    return Err(Error::Config(format!(
                        "bounding box has nonpositive half-width at t = {t}"
                    )));
                }
            }
            Ok(Prepared::Continuum { f, mu, potential: ScalarFn::from_expr(&pot), grid, boxspec, dim })
        }
        Kind::Asymptotics => {
            let dim = *require(&cfg.dim, cfg.kind, "dim")?;
            let mu = require(&cfg.mu, cfg.kind, "mu")?.build(dim)?;
            let nu = require(&cfg.nu, cfg.kind, "nu")?.build(dim)?;
            let seq = require(&cfg.renorm, cfg.kind, "renorm")?.build(dim)?;
            if let Some(ce) = cfg.class_eps {
                if !(ce > 0.0 && ce < 1.0) {
                    return Err(Error::Config("class_eps must lie in (0, 1)".into()));
                }
            }
            Ok(Prepared::Asymptotics { mu, nu, seq, class_eps: cfg.class_eps })
        }
        Kind::Product => {
            let specs = require(&cfg.factors, cfg.kind, "factors")?;
            if specs.is_empty() {
                return Err(Error::Config("a product needs at least one factor".into()));
            }
            let factors = specs.iter().map(|s| s.build()).collect::<Result<Vec<_>>>()?;
            let mut space = ProductSpace::new(factors)?;
            if let Some(t) = &cfg.tail {
                space = space.with_tail(t.build()?);
            }
            let support = require(&cfg.support, cfg.kind, "support")?.clone();
            let mut kdim = 0usize;
            for &i in &support {
                kdim += space.factor(i)?.dim();
            }
            let f = parse_function(require(&cfg.function, cfg.kind, "function")?, kdim)?;
            let cyl = CylindricalFunction::new(support, f)?;
            Ok(Prepared::Product { space, cyl, check: cfg.check_support.clone() })
        }
        Kind::Hilbert => {
            let dim = *require(&cfg.dim, cfg.kind, "dim")?;
            if dim == 0 {
                return Err(Error::Config("hilbert stage dimension must be positive".into()));
            }
            let kernel = parse_function(require(&cfg.function, cfg.kind, "function")?, dim)?;
            let mut f = HilbertFn::new(Flag::coordinate(dim), dim - 1, kernel)?;
            if let Some(q) = &cfg.rotate {
                f = f.rotate_kernel(q)?;
            }
            if let Some(v) = &cfg.translate {
                f = f.translate(v)?;
            }
            if let Some(a) = cfg.dilate {
                f = f.dilate(a)?;
            }
            Ok(Prepared::Hilbert { f })
        }
        Kind::Homology => {
            let coefficients = require(&cfg.coefficients, cfg.kind, "coefficients")?.clone();
            if coefficients.is_empty() {
                return Err(Error::Config("coefficients must be nonempty".into()));
            }
            Ok(Prepared::Homology { coefficients })
        }
        Kind::InvarianceSuite => Ok(Prepared::Suite),
    }
}

/// Check a config without running it: parse the expressions, build the
/// measures and window families, and verify kind-specific requirements.
pub fn validate(cfg: &RunConfig) -> Result<()> {
    prepare(cfg).map(|_| ())
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Converged => 0,
        Status::Oscillating => 2,
        Status::MaxIterations => 3,
    }
}

fn result_json(r: &MeanValueResult) -> Value {
    json!({
        "status": serde_json::to_value(r.status).expect("status serializes"),
        "value": r.value,
        "spread": r.spread,
        "steps": r.steps,
    })
}

fn finite_or_tag(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("infinite")
    }
}

fn header(cfg: &RunConfig, exit_code: i32) -> Vec<(&'static str, Value)> {
    vec![
        ("kind", json!(cfg.kind.name())),
        ("label", json!(cfg.label)),
        ("seed", json!(cfg.seed)),
        ("exit_code", json!(exit_code)),
    ]
}

fn assemble(cfg: &RunConfig, exit_code: i32, extra: Vec<(&'static str, Value)>) -> Value {
    let mut map = serde_json::Map::new();
    for (k, v) in header(cfg, exit_code).into_iter().chain(extra) {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

/// Execute a config. Hard failures (invalid config, exhausted integration
/// budget, non-integrable data) come back as `Err`; mathematically
/// legitimate negative verdicts are encoded in the exit code instead.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let prepared = prepare(cfg)?;
    let crit = cfg.criteria.build()?;
    let opts = cfg.quad.build(cfg.seed)?;
    match prepared {
        Prepared::Wmv { f, mu, seq } => {
            let r = meanvalue::wmv(&f, &mu, &seq, &crit, &opts)?;
            let code = status_code(r.status);
            let report = assemble(cfg, code, vec![("result", result_json(&r))]);
            Ok(Outcome { exit_code: code, report, history: Some(r.history) })
        }
        Prepared::MvCheck { f, mu, seqs } => {
            let rep = meanvalue::mv_check(&f, &mu, &seqs, &crit, &opts)?;
            let code = if rep.strong { 0 } else { 2 };
            let runs: Vec<Value> = rep
                .runs
                .iter()
                .map(|(label, r)| {
                    let mut v = result_json(r);
                    v["family"] = json!(label);
                    v
                })
                .collect();
            let history = rep.runs.first().map(|(_, r)| r.history.clone());
            let report = assemble(
                cfg,
                code,
                vec![
                    ("strong", json!(rep.strong)),
                    ("max_disagreement", json!(rep.max_disagreement)),
                    ("value", json!(rep.value)),
                    ("runs", Value::Array(runs)),
                ],
            );
            Ok(Outcome { exit_code: code, report, history })
        }
        Prepared::Cesaro { f } => {
            let r = meanvalue::cesaro(&f, &crit)?;
            let code = status_code(r.status);
            let report = assemble(cfg, code, vec![("result", result_json(&r))]);
            Ok(Outcome { exit_code: code, report, history: Some(r.history) })
        }
        Prepared::Continuum { f, mu, potential, grid, boxspec, dim } => {
            let family = move |t: f64| {
                let half = boxspec.half(t);
                Region::sublevel(potential.clone(), t, vec![-half; dim], vec![half; dim])
                    .expect("bounding box validated")
            };
            let r = meanvalue::wmv_continuum(&f, &mu, &family, &grid, &crit, &opts)?;
            let code = status_code(r.status);
            let report = assemble(cfg, code, vec![("result", result_json(&r))]);
            Ok(Outcome { exit_code: code, report, history: Some(r.history) })
        }
        Prepared::Asymptotics { mu, nu, seq, class_eps } => {
            let outcome = match class_eps {
                Some(ce) => asymptotics::compare_classified(&mu, &nu, &seq, &crit, &opts, ce),
                None => asymptotics::compare(&mu, &nu, &seq, &crit, &opts),
            };
            match outcome {
                Ok(c) => {
                    let class = match c.class {
                        ScaleClass::Negligible => "negligible",
                        ScaleClass::Comparable(_) => "comparable",
                        ScaleClass::Dominant => "dominant",
                    };
                    let tail: Vec<f64> =
                        c.ratios.iter().rev().take(5).rev().copied().collect();
                    let report = assemble(
                        cfg,
                        0,
                        vec![
                            ("theta", finite_or_tag(c.theta)),
                            ("big_theta", json!(c.big_theta)),
                            ("class", json!(class)),
                            ("ratio_tail", json!(tail)),
                            ("status", json!("classified")),
                        ],
                    );
                    Ok(Outcome { exit_code: 0, report, history: None })
                }
                Err(Error::ThetaDiverges) => {
                    let report =
                        assemble(cfg, 3, vec![("status", json!("no_limit"))]);
                    Ok(Outcome { exit_code: 3, report, history: None })
                }
                Err(e) => Err(e),
            }
        }
        Prepared::Product { space, cyl, check } => {
            let r = meanvalue_of_product(&space, &cyl, check.as_deref(), &crit, &opts)?;
            Ok(r.into_outcome(cfg))
        }
        Prepared::Hilbert { f } => {
            let r = f.mean(&crit, &opts)?;
            let code = status_code(r.status);
            let report = assemble(
                cfg,
                code,
                vec![("result", result_json(&r)), ("stage_dim", json!(f.dim()))],
            );
            Ok(Outcome { exit_code: code, report, history: Some(r.history) })
        }
        Prepared::Homology { coefficients } => {
            let rep = meanvalue::homology_nullity(&coefficients, &crit, &opts)?;
            let code = status_code(rep.result.status);
            let report = assemble(
                cfg,
                code,
                vec![
                    ("result", result_json(&rep.result)),
                    ("is_null", json!(rep.is_null)),
                    ("threshold", json!(rep.threshold)),
                ],
            );
            Ok(Outcome { exit_code: code, report, history: Some(rep.result.history) })
        }
        Prepared::Suite => {
            let rows = invariance_suite(cfg.seed)?;
            let passed = rows.iter().all(|r| r.pass);
            let code = if passed { 0 } else { 2 };
            let report = assemble(
                cfg,
                code,
                vec![
                    ("passed", json!(passed)),
                    ("rows", serde_json::to_value(&rows).expect("rows serialize")),
                ],
            );
            Ok(Outcome { exit_code: code, report, history: None })
        }
    }
}

struct ProductRun {
    result: MeanValueResult,
    enlarged: Option<(Vec<f64>, f64)>,
}

impl ProductRun {
    fn into_outcome(self, cfg: &RunConfig) -> Outcome {
        let code = status_code(self.result.status);
        let mut extra = vec![("result", result_json(&self.result))];
        if let Some((value, residual)) = &self.enlarged {
            extra.push(("enlarged_value", json!(value)));
            extra.push(("support_residual", json!(residual)));
        }
        let report = assemble(cfg, code, extra);
        Outcome { exit_code: code, report, history: Some(self.result.history) }
    }
}

fn meanvalue_of_product(
    space: &ProductSpace,
    cyl: &CylindricalFunction,
    check: Option<&[usize]>,
    crit: &ConvergenceCriteria,
    opts: &QuadOpts,
) -> Result<ProductRun> {
    let result = crate::products::wmv_cylindrical(space, cyl, crit, opts)?;
    let enlarged = match check {
        Some(indices) => {
            let e = crate::products::wmv_cylindrical_on(space, cyl, indices, crit, opts)?;
            let residual = result
                .value
                .iter()
                .zip(&e.value)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            Some((e.value, residual))
        }
        None => None,
    };
    Ok(ProductRun { result, enlarged })
}

use crate::region::Region;

// ---------------------------------------------------------------------------
// Invariance battery

fn row(id: &'static str, law: &'static str, residual: f64, tolerance: f64) -> SuiteRow {
    SuiteRow { id, law, residual, tolerance, pass: residual.is_finite() && residual <= tolerance }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// The built-in battery: every closed-form law the library rests on, each
/// checked at a frozen tolerance. `seed` feeds the stochastic integrators;
/// any seed must pass.
pub fn invariance_suite(seed: u64) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let opts = QuadOpts { seed, ..Default::default() };
    let tight = ConvergenceCriteria { eps: 1e-6, n_max: 20, ..Default::default() };

    // Normalized windows: the mean of 1 is 1 against any measure.
    {
        let f = VectorFn::constant(&[1.0]);
        let r = meanvalue::wmv(&f, &Measure::lebesgue(1), &RenormSequence::cubes(1), &tight, &opts)?;
        rows.push(row(
            "unit-mean",
            "the renormalized mean of the constant 1 is 1",
            (r.value[0] - 1.0).abs(),
            1e-12,
        ));
    }

    // A point mass evaluates the function at its atom.
    {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| x[0] * x[0] + 1.0));
        let mu = Measure::dirac(vec![0.5]);
        let r = meanvalue::wmv(&f, &mu, &RenormSequence::cubes(1), &tight, &opts)?;
        rows.push(row(
            "dirac-evaluation",
            "a point mass recovers the function value at its atom",
            (r.value[0] - 1.25).abs(),
            1e-12,
        ));
    }

    // Finite measures reduce to the ordinary weighted average.
    {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| x[0]));
        let mu = Measure::dirac_comb(vec![(vec![1.0], 1.0), (vec![3.0], 3.0)])?;
        let crit = ConvergenceCriteria { eps: 1e-9, n_max: 15, ..Default::default() };
        let r = meanvalue::wmv(&f, &mu, &RenormSequence::cubes(1), &crit, &opts)?;
        rows.push(row(
            "finite-average",
            "a finite measure gives the classical weighted mean",
            (r.value[0] - 2.5).abs(),
            1e-12,
        ));
    }

    // Integrable functions vanish against infinite mass.
    {
        let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| (-x[0] * x[0]).exp()));
        let crit = ConvergenceCriteria { eps: 1e-5, n_max: 40, ..Default::default() };
        let r = meanvalue::wmv(
            &f,
            &Measure::lebesgue(1),
            &RenormSequence::geometric_cubes(1),
            &crit,
            &opts,
        )?;
        rows.push(row(
            "vanishing-integrable",
            "integrable functions average to zero in the infinite-volume limit",
            r.value[0].abs(),
            1e-3,
        ));
    }

    // Constants have a strong mean: every window family agrees.
    {
        let f = VectorFn::constant(&[2.5]);
        let seqs = vec![
            RenormSequence::cubes(1),
            RenormSequence::balls(1),
            RenormSequence::cubes(1).translate(vec![1.0])?,
        ];
        let rep = meanvalue::mv_check(&f, &Measure::lebesgue(1), &seqs, &tight, &opts)?;
        let residual = if rep.strong { rep.max_disagreement } else { f64::NAN };
        rows.push(row(
            "strong-mean-constant",
            "constants have the same mean along every admissible window family",
            residual,
            1e-9,
        ));
    }

    // Non-radial indicators are only weakly renormalizable: cubes and balls
    // each match their own closed form, and the two differ.
    {
        let t = (std::f64::consts::PI / 8.0).tan();
        let cone = VectorFn::from_scalar(ScalarFn::new(move |y: &[f64]| {
            if y[0].abs() <= y[1].abs() * t {
                1.0
            } else {
                0.0
            }
        }));
        let mu = Measure::lebesgue(2);
        let ccrit = ConvergenceCriteria { eps: 5e-3, n_max: 30, ..Default::default() };
        let vc = meanvalue::wmv(&cone, &mu, &RenormSequence::cubes(2), &ccrit, &opts)?;
        let bcrit = ConvergenceCriteria { eps: 2e-2, n_max: 12, ..Default::default() };
        let bopts = QuadOpts { tol: Tol::mixed(1e-9, 2e-3), ..opts };
        let vb = meanvalue::wmv(&cone, &mu, &RenormSequence::balls(2), &bcrit, &bopts)?;
        let residual =
            (vc.value[0] - t / 2.0).abs().max((vb.value[0] - 0.25).abs());
        rows.push(row(
            "window-shape",
            "cube and ball windows reach their distinct closed-form cone means",
            residual,
            5e-3,
        ));
    }

    // Means against a measure sum mix with the asymptotic-scale weights.
    {
        let f = VectorFn::from_scalar(ScalarFn::new(|x| if x[0] >= 0.0 { 1.0 } else { 0.0 }));
        let mu = Measure::lebesgue(1);
        let nu = Measure::density(1, ScalarFn::new(|x| if x[0] >= 0.0 { 4.0 } else { 0.0 }));
        let crit = ConvergenceCriteria { eps: 1e-5, n_max: 100, ..Default::default() };
        let rep = asymptotics::wmv_measure_sum(&f, &mu, &nu, &RenormSequence::cubes(1), &crit, &opts)?;
        rows.push(row(
            "mixing-weights",
            "the mean against a sum of measures is the weight-mixed mean",
            rep.residual,
            5e-3,
        ));
    }

    // Relative scales compose multiplicatively along a chain of measures.
    {
        let mu = Measure::lebesgue(1);
        let nu = mu.try_scale(2.0)?;
        let rho = mu.try_scale(6.0)?;
        let seq = RenormSequence::cubes(1);
        let crit = ConvergenceCriteria { eps: 1e-6, n_max: 20, ..Default::default() };
        let t12 = asymptotics::compare(&mu, &nu, &seq, &crit, &opts)?.theta;
        let t23 = asymptotics::compare(&nu, &rho, &seq, &crit, &opts)?.theta;
        let t13 = asymptotics::compare(&mu, &rho, &seq, &crit, &opts)?.theta;
        let composed = asymptotics::theta_compose(t12, t23)?;
        rows.push(row(
            "scale-composition",
            "relative scales compose multiplicatively through a middle measure",
            (composed - t13).abs(),
            1e-9,
        ));
    }

    // The two mixing weights of a pair sum to one.
    {
        let mu = Measure::lebesgue(1);
        let nu = mu.try_scale(3.0)?;
        let seq = RenormSequence::cubes(1);
        let crit = ConvergenceCriteria { eps: 1e-6, n_max: 20, ..Default::default() };
        let a = asymptotics::compare(&mu, &nu, &seq, &crit, &opts)?.big_theta;
        let b = asymptotics::compare(&nu, &mu, &seq, &crit, &opts)?.big_theta;
        rows.push(row(
            "weight-complement",
            "the mixing weights of an ordered pair sum to one",
            (a + b - 1.0).abs(),
            1e-9,
        ));
    }

    // Cylindrical means do not see factors the function ignores.
    {
        let space = ProductSpace::power(Factor::lebesgue_line());
        let cyl = CylindricalFunction::new(vec![1], VectorFn::constant(&[4.25]))?;
        let crit = ConvergenceCriteria { eps: 1e-9, n_max: 15, ..Default::default() };
        let a = crate::products::wmv_cylindrical(&space, &cyl, &crit, &opts)?;
        let b = crate::products::wmv_cylindrical_on(&space, &cyl, &[0, 1, 3], &crit, &opts)?;
        rows.push(row(
            "support-enlargement",
            "enlarging the finite support leaves a cylindrical mean unchanged",
            max_abs_diff(&a.value, &b.value),
            1e-12,
        ));
    }

    // Natural dilations preserve the frame-relative mean.
    {
        let kernel = VectorFn::from_scalar(ScalarFn::new(|y: &[f64]| y[0].cos().powi(2)));
        let f = HilbertFn::new(Flag::coordinate(1), 0, kernel)?;
        let crit = ConvergenceCriteria { eps: 5e-3, n_max: 160, ..Default::default() };
        let base = f.mean(&crit, &opts)?;
        let dilated = f.dilate(4)?.mean(&crit, &opts)?;
        rows.push(row(
            "dilation-invariance",
            "dilating by a positive natural preserves the frame-relative mean",
            max_abs_diff(&base.value, &dilated.value),
            8e-3,
        ));
    }

    // ... but rotating the frame moves it by exactly the predicted gap.
    {
        let t = (std::f64::consts::PI / 8.0).tan();
        let cone = VectorFn::from_scalar(ScalarFn::new(move |y: &[f64]| {
            if y[0].abs() <= y[1].abs() * t {
                1.0
            } else {
                0.0
            }
        }));
        let f = HilbertFn::new(Flag::coordinate(2), 1, cone)?;
        let crit = ConvergenceCriteria { eps: 5e-3, n_max: 30, ..Default::default() };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let axis = f.mean(&crit, &opts)?;
        let turned = f.rotate_kernel(&[vec![s, -s], vec![s, s]])?.mean(&crit, &opts)?;
        let gap = (1.0 - 2.0 * t) / 2.0;
        rows.push(row(
            "frame-dependence",
            "rotating the frame moves the cone mean by its predicted gap",
            ((turned.value[0] - axis.value[0]) - gap).abs(),
            4e-3,
        ));
    }

    // The sequence mean agrees with the counting-measure mean.
    {
        let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| 0.97f64.powf(x[0])));
        let crit = ConvergenceCriteria { eps: 1e-3, n_max: 600, ..Default::default() };
        let a = meanvalue::cesaro(&f, &crit)?;
        let b = meanvalue::wmv(
            &f,
            &Measure::counting(),
            &RenormSequence::prefixes(),
            &crit,
            &opts,
        )?;
        rows.push(row(
            "sequence-agreement",
            "the sequence mean equals the counting-measure mean over prefixes",
            max_abs_diff(&a.value, &b.value),
            1e-12,
        ));
    }

    // Translated window families reach the same limit.
    {
        let f = VectorFn::from_scalar(ScalarFn::new(|x: &[f64]| (-x[0] * x[0]).exp()));
        let crit = ConvergenceCriteria { eps: 1e-5, n_max: 40, ..Default::default() };
        let mu = Measure::lebesgue(1);
        let a = meanvalue::wmv(&f, &mu, &RenormSequence::geometric_cubes(1), &crit, &opts)?;
        let shifted = RenormSequence::geometric_cubes(1).translate(vec![1.0])?;
        let b = meanvalue::wmv(&f, &mu, &shifted, &crit, &opts)?;
        rows.push(row(
            "translation-stability",
            "translating the window family does not move the limit",
            max_abs_diff(&a.value, &b.value),
            1e-3,
        ));
    }

    Ok(rows)
}
