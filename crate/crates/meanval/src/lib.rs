//! Renormalized mean values of functions with respect to infinite-volume measures.
//!
//! A renormalization sequence `U = (U_n)` for a measure `mu` is an increasing
//! family of regions of finite positive mass that exhausts the space. The weak
//! mean value of a function `f` along `U` is the limit of the partial averages
//!
//! ```text
//!     a_n = (1 / mu(U_n)) * integral of f over U_n
//! ```
//!
//! when it exists; when the limit is independent of the renormalization
//! sequence it is called the (strong) mean value. This crate provides:
//!
//! * [`measure`], [`region`], [`renorm`] — measures on R^m, regions with
//!   membership tests, renormalization sequences and their validation;
//! * [`quad`] — the integration engine (adaptive Gauss–Kronrod, tensor
//!   cubature, seeded Monte Carlo, exact atomic summation);
//! * [`meanvalue`] — partial averages, weak mean values, Cesàro limits,
//!   measure mixing, sublevel-family means, a nullity detector for bounded
//!   cocycle norms, and multi-renormalization cross-checks;
//! * [`asymptotics`] — the comparison calculus `theta`/`big_theta` between
//!   measures along a common renormalization sequence;
//! * [`products`] — cylindrical functions on countable products, product
//!   renormalizations, uniform-limit extensions, admissible-domain checks;
//! * [`hilbert`] — a coordinate model of the mean value on a separable
//!   Hilbert space with flags of affine supports and invariance transforms;
//! * [`expr`] — a small expression language used by configs and examples;
//! * [`config`] — JSON experiment configs, reports, and the invariance suite
//!   backing the `meanval` command-line tool.
//!
//! # Examples
//!
//! Each major capability has a runnable example (`cargo run -p meanval
//! --example <name>`):
//!
//! | example | shows |
//! |---|---|
//! | `renorm_basics` | measures, regions, renormalization validation |
//! | `wmv_sin_oscillation` | renormalization dependence of averages of `sin` |
//! | `classical_mean` | finite measures, Dirac masses, limits at infinity |
//! | `cesaro_limits` | counting measure and Cesàro averages |
//! | `measure_mixing` | mean values under sums and scalings of measures |
//! | `asymptotic_scale` | the `theta`/`big_theta` calculus and composition |
//! | `cube_vs_ball` | renormalization-shape dependence for a cone indicator |
//! | `morse_sublevel` | means along a continuum of sublevel sets |
//! | `homology_detector` | nullity detection for bounded cocycle norms |
//! | `product_mean` | cylindrical means and tensor factorization |
//! | `schedule_limit` | uniform-limit schedules and interleaving |
//! | `hilbert_mean` | flags, transforms and invariances in Hilbert space |
//! | `expr_functions` | the expression language |
//! | `run_config` | the JSON experiment pipeline used by the CLI |

pub mod asymptotics;
pub mod config;
mod detector;
pub mod error;
pub mod expr;
pub mod func;
pub mod hilbert;
pub mod meanvalue;
pub mod measure;
pub mod products;
pub mod quad;
pub mod region;
pub mod renorm;

pub use error::Error;
pub use func::{ScalarFn, VectorFn};
pub use meanvalue::{ConvergenceCriteria, MeanValueResult, Status};
pub use measure::Measure;
pub use region::Region;
pub use renorm::RenormSequence;
