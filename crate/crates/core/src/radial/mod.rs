//! Radially symmetric solver: nested shooting for the matter and gauge
//! profiles and a damped fixed-point iteration between them.

pub mod fixed_point;
pub mod model;
pub mod ode;
pub mod profile;
pub mod properties;
pub mod series;
pub mod shooting;

pub use fixed_point::{fixed_point_t, RadialOptions, RadialSolution, RadialTelemetry};
pub use model::{RadialMetric, RadialModel, VEquation};
pub use profile::RadialProfile;
pub use properties::{verify_radial_properties, CheckStatus, PropertyReport};
pub use shooting::{
    integrate_u, integrate_v, shoot_u, shoot_v, ShootOptions, ShootStats, ShootingOutcome,
    ShotClass,
};
