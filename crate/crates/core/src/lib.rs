//! Generalized fractional counting and risk processes.
//!
//! The crate covers the counting process with jumps of size `1..=k` run on an
//! inverse β-stable clock (GFCP), its compound version (CGFCP), the risk
//! surplus processes built on it (GFRP, the non-homogeneous variant and the
//! calendar-premium AGFRP), and finite-time ruin analysis for the latter.
//!
//! Closed forms are evaluated through the three-parameter Mittag-Leffler
//! series in [`specfun`]; every closed form has a Monte Carlo counterpart
//! driven by reproducible per-path random streams from [`mc`].

pub mod cli;
pub mod compound;
pub mod counting;
pub mod error;
pub mod mc;
pub mod risk;
pub mod ruin;
pub mod specfun;
pub mod subordinator;

pub use error::{Error, Result};
