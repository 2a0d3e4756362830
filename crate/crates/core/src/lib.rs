//! A numerical laboratory for moving obstacles in 2+1-dimensional
//! spacetime.
//!
//! The crate decides time-likeness of moving boundary curves, integrates
//! the null characteristics they carry, classifies which boundary and
//! interior points can be reached by subluminal curves from the outer
//! cylinder, reproduces the travelling-wall counterexample in which a
//! thin channel stays unreachable for all time, and provides the cone
//! algebra and flow constructions used for general second-order
//! hyperbolic operators.
//!
//! Modules:
//! - [`boundary`]: curve families x(σ, t) with exact derivatives and
//!   uniform time-likeness validation,
//! - [`characteristics`]: the two null speed fields on a boundary, orbit
//!   integration, Poincaré maps, and the spreading-fan criterion,
//! - [`accessibility`]: boundary fans, the interior path construction,
//!   and a grid reachability oracle over spacetime,
//! - [`stefanov`]: the travelling-wall drift analysis, threshold
//!   selection, channel geometry, and inaccessibility verification,
//! - [`cone`]: Lorentzian cone linear algebra, flows of time-like vector
//!   fields, and the standard deformation constructions.
//!
//! All operations are pure: curves and forms may be shared freely across
//! threads, and independent integrations can run concurrently.

pub mod accessibility;
pub mod boundary;
pub mod characteristics;
pub mod cone;
pub mod error;
pub mod numerics;
pub mod stefanov;

pub use boundary::{BoundaryCurve2D, CurveFamily, SigmaDomain, StefanovWallParams, WaveShape};
pub use characteristics::{OrbitClass, SpeedField, Trajectory};
pub use error::{CoreError, Result};
