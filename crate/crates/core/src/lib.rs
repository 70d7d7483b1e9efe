//! Positive-entropy rational surface automorphisms
//! `f(x, y) = (y, -delta x + c y + sum_l a_l y^-l + y^-k)`.
//!
//! The crate is split along the natural layers of the construction:
//!
//! * [`family`]: the map, its homogeneous form and the data at infinity;
//! * [`charts`]: coordinates on the iterated blowup tower, fiber transitions
//!   and the differential checks at the parabolic set;
//! * [`lattice`]: the Picard lattice, the induced isometry `f_*`, its spectrum
//!   and the orthogonal complement `T` of the fiber classes;
//! * [`reflections`]: reflection factorizations of `f_*` and the reversor;
//! * [`dynamics`]: fixed points, multipliers, orbits and invariant manifolds;
//! * [`report`]: verification suites returning [`report::VerdictReport`].

pub mod charts;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod family;
pub mod lattice;
pub mod params;
pub mod reflections;
pub mod report;
pub mod roots;
pub mod scalar;

pub use error::{Error, Result};
pub use family::{AffinePoint, Map, ProjPoint};
pub use params::{CSpec, MapParams};
