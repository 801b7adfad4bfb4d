//! Cheap clonable wrappers for scalar and vector-valued functions on R^m.

use std::fmt;
use std::sync::Arc;

use crate::expr::Expr;

/// A scalar function of a point in R^m.
#[derive(Clone)]
pub struct ScalarFn {
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    label: Option<String>,
    constant: Option<f64>,
}

impl ScalarFn {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn { f: Arc::new(f), label: None, constant: None }
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn { f: Arc::new(move |_| c), label: Some(format!("{c}")), constant: Some(c) }
    }

    /// Wrap a parsed expression. Evaluation errors (division by zero, log of
    /// a non-positive number) surface as NaN, which the integration engine
    /// reports as `NonIntegrable`.
    pub fn from_expr(e: &Expr) -> Self {
        let label = e.to_string();
        let constant = if e.max_var().is_none() { e.eval(&[]).ok() } else { None };
        let e = e.clone();
        ScalarFn {
            f: Arc::new(move |x| e.eval(x).unwrap_or(f64::NAN)),
            label: Some(label),
            constant,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// `Some(c)` when this is known to be the constant `c`; lets the
    /// integration engine replace quadrature by `c * mass`.
    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "ScalarFn({l})"),
            None => write!(f, "ScalarFn(<closure>)"),
        }
    }
}

/// A function R^m -> R^d evaluated into a caller-provided buffer, so that
/// Monte Carlo sampling shares one sample set across all components.
#[derive(Clone)]
pub struct VectorFn {
    dim: usize,
    f: Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>,
    constant: Option<Vec<f64>>,
}

impl VectorFn {
    pub fn new(dim: usize, f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        assert!(dim > 0, "codomain dimension must be positive");
        VectorFn { dim, f: Arc::new(f), constant: None }
    }

    pub fn from_scalar(s: ScalarFn) -> Self {
        let constant = s.constant_value().map(|c| vec![c]);
        VectorFn { dim: 1, f: Arc::new(move |x, out| out[0] = s.eval(x)), constant }
    }

    /// Stack several scalar components, e.g. the real and imaginary parts of
    /// a complex-valued function.
    pub fn from_scalars(parts: Vec<ScalarFn>) -> Self {
        assert!(!parts.is_empty());
        let constant = parts.iter().map(|p| p.constant_value()).collect();
        VectorFn {
            dim: parts.len(),
            f: Arc::new(move |x, out| {
                for (o, p) in out.iter_mut().zip(&parts) {
                    *o = p.eval(x);
                }
            }),
            constant,
        }
    }

    pub fn constant(values: &[f64]) -> Self {
        let values = values.to_vec();
        let keep = values.clone();
        VectorFn {
            dim: values.len(),
            f: Arc::new(move |_, out| out.copy_from_slice(&values)),
            constant: Some(keep),
        }
    }

    /// See [`ScalarFn::constant_value`].
    pub fn constant_value(&self) -> Option<&[f64]> {
        self.constant.as_deref()
    }

    #[inline]
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        (self.f)(x, out)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl From<ScalarFn> for VectorFn {
    fn from(s: ScalarFn) -> Self {
        VectorFn::from_scalar(s)
    }
}

impl fmt::Debug for VectorFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorFn(dim={})", self.dim)
    }
}
