//! Numerical laboratory for complex Hénon-type automorphisms of C^2.
//!
//! The crate builds polynomial automorphisms as compositions of Hénon factors
//! `(z1, z2) -> (p(z1) + a z2, z1)` and provides the dynamical quantities
//! attached to them: escape-time Green functions with certified error bounds,
//! slice measures of `dd^c` potentials, equidistribution-rate experiments for
//! pulled-back curves, periodic-point solvers, and Nevanlinna-type averaging
//! currents along stable manifolds of saddle points.

pub mod currents;
pub mod equidist;
pub mod error;
pub mod family;
pub mod green;
pub mod grid;
pub mod henon;
pub mod nevanlinna;
pub mod numerics;
pub mod periodic;

pub use currents::{ComplexLine, PotentialField, RadialBump, SliceMeasure, TestForm};
pub use equidist::{Curve, EquidistReport};
pub use error::{Error, Result};
pub use family::{Family, ParamScan};
pub use green::{GreenValue, OrbitTag, PointClass};
pub use grid::{Grid, SlicePlane, Window};
pub use henon::{EscapeCert, HenonFactor, HenonType};
pub use nevanlinna::{NevanlinnaPairing, ParametrizedCurve, RigidityTable, Saddle};
pub use periodic::{PeriodicPoint, PeriodicSearch, StabilityKind};
