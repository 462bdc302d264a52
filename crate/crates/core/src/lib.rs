//! Exact and empirical study of the distribution of `s2(n + a) - s2(n)`,
//! where `s2` counts the one-bits of `n`.
//!
//! For every non-negative integer `a` the asymptotic densities
//! `mu_a(d) = dens { n : s2(n + a) - s2(n) = d }` form a probability measure
//! on the integers. This crate computes `mu_a` exactly, cross-checks it along
//! several independent routes (suffix-word cylinders, characteristic-function
//! jets, closed-form variance, brute-force counting) and runs seeded
//! experiments on the behaviour of `mu_a` for random `a`.
//!
//! Module map:
//!
//! * [`bitcore`]: binary expansions and pattern statistics of `bin(a)`.
//! * [`exact`]: dyadic and general rational helpers.
//! * [`measure`]: exact representation of `mu_a` and its functionals.
//! * [`cylinder`]: suffix-word sets whose cylinders tile `{n : s2(n+a)-s2(n)=d}`.
//! * [`charfn`]: characteristic function as a 2x2 matrix chain; exact moments via jets.
//! * [`variance_formula`]: closed-form variance and its pattern-count variant.
//! * [`stochastic`]: seeded Bernoulli experiments.
//! * [`oracle`]: brute-force counting referees.
//! * [`cli`]: command-line front end.

pub mod bitcore;
pub mod charfn;
pub mod cli;
pub mod cylinder;
pub mod error;
pub mod exact;
pub mod measure;
pub mod oracle;
pub mod stochastic;
pub mod variance_formula;

pub use error::{Error, Result};
