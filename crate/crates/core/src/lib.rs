//! Exact decision engine for four-dimensional ball packings, toric domains
//! and their ECH capacities.

pub mod document;
pub mod ech;
pub mod error;
pub mod exceptional;
pub mod highdim;
pub mod packing;
pub mod random;
pub mod scalar;
pub mod stabilized;
pub mod staircase;
pub mod toric;

pub use error::{DomainCode, Error, Result};
pub use exceptional::ObstructionTuple;
pub use packing::{Attainment, BallConfig, CapacityResult, Convention, Decision, Engine};
pub use scalar::{QuadraticValue, Rational};
pub use toric::{ConcaveDomain, ConvexDomain, ToricDomain, WeightData};
