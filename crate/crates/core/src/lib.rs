//! Numerical solvers for multivortex solutions of the Abelian Higgs
//! (magnetic Ginzburg-Landau) model coupled to a gravitationally curved
//! plane.

pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod io;
pub mod metric;
pub mod observables;
pub mod params;
pub mod planar;
pub mod quad;
pub mod radial;
pub mod runner;
pub mod selftest;

pub use error::{Result, VortexError};
