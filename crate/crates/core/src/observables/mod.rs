//! Gauge fields and the integrals and decay rates derived from a solution.

pub mod decay;
pub mod fields;
pub mod integrals;
pub mod radial;
pub mod report;

pub use decay::{decay_fit, FitWindow, PowerFit};
pub use fields::{reconstruct_fields, GaugeFields};
pub use integrals::{planar_observables, Estimate, PlanarObservables};
pub use radial::{radial_observables, RadialObservables};
pub use report::{ObservableReport, SolutionKind};
