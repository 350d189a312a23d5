//! Counting central simple algebras and quaternion algebras over ℚ and
//! quadratic fields, with the asymptotic constants, covolume formulas and
//! rigidity experiments built on top of the counts.

pub mod arith;
pub mod asymptotics;
pub mod brauer;
pub mod census;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod numeric;
pub mod rigidity;

pub use arith::{LValue, PellSolution};
pub use asymptotics::{EulerProductValue, Model, PredictionRow};
pub use brauer::{BrauerClass, CentralSimpleAlgebraQ, DescentRecord, Invariant, QuaternionAlgebraL, QuaternionAlgebraQ};
pub use census::{CensusSpec, CountTable, SeriesSpec, SplittingDensity};
pub use error::{Error, Result};
pub use fields::{PlaceQ, QuadraticField, QuadraticPlace, Signature, SplittingType};
pub use geometry::{CommensurabilityClass, GeodesicDatum, SurfaceEntry};
pub use numeric::Magnitude;
pub use rigidity::{BoundReport, LimitPair, RigidityReport};
