//! Self-dual planar solver.

pub mod background;
pub mod monotone;
pub mod multigrid;

pub use background::{build_background, BackgroundPair};
pub use monotone::{monotone_solve, PlanarSolution, SolveOptions, SolveTelemetry};
pub use multigrid::{linear_poisson_solve, linear_poisson_solve_from};
