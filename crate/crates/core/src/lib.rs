//! Exact symbolic engine for truncated deformation quantization over a Lie
//! algebra pair (g, l).

pub mod classical;
pub mod context;
pub mod dynamical;
pub mod error;
pub mod fixtures;
pub mod groupoid;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod pbw;
pub mod poly;
pub mod rational;
pub mod report;
pub mod series;
pub mod uea;
pub mod utensor;
pub mod weyl;

pub use classical::{Bivector, Gen, Multivector};
pub use context::Context;
pub use dynamical::DynTwist;
pub use error::{Error, Result};
pub use groupoid::HTensor;
pub use lie::LieAlgebraPair;
pub use poly::{CoeffMode, CoeffRing, MultiIndex, Poly};
pub use rational::Rational;
pub use series::HbarSeries;
pub use utensor::UTensor;
