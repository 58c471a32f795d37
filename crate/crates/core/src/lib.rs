//! Exact verification of periodic-point structure for concrete dynamical
//! systems: finite self-maps, piecewise-affine interval and circle maps, and
//! one-sided subshifts of finite type.
//!
//! Everything in the engine is exact rational arithmetic. Floating point is
//! confined to [`oracle::float_root_scan`], which exists only as an
//! independent cross-check.

pub mod builtins;
pub mod error;
pub mod graph;
pub mod limits;
pub mod oracle;
pub mod periodic;
pub mod rational;
pub mod region;
pub mod system;
pub mod topology;

pub use error::{Error, Result};
pub use limits::Limits;
pub use rational::{rat, Rational};
pub use region::{CylinderUnion, IntervalUnion, OpenRegion};
pub use system::{Point, System};
