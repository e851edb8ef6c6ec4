//! Topological full groups of étale groupoids over Cantor sequence spaces.

pub mod bisection;
pub mod cylinder;
pub mod error;
pub mod expansivity;
pub mod expr;
pub mod fullgroup;
pub mod generators;
pub mod gf2;
pub mod germcalc;
pub mod homology0;
pub mod multisection;
pub mod perm;
pub mod presentation;
pub mod quasicrystal;

pub use error::{Error, Result};
