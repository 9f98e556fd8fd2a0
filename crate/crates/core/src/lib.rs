//! Geometry of isospectral density operators.
//!
//! The set of density operators with a fixed spectrum σ is a co-adjoint
//! orbit D(σ) of U(n), diffeomorphic to the quotient U(n)/U(σ) of the
//! unitary group by the block-diagonal stabilizer. This crate realizes that
//! picture numerically at small dimension: the Kirillov-Kostant-Souriau
//! symplectic form and its compatible Kähler metric on the orbit, the
//! principal-bundle structure U(n) → D(σ) with its mechanical connection,
//! horizontal lifts and geometric phases of cyclic evolutions, geodesic
//! distances on the orbit, and the resulting geometric quantum speed limit.
//!
//! Conventions: density operators are trace-one positive semidefinite,
//! eigenvalues are kept in descending order, Lie algebra elements are
//! skew-Hermitian, and ℏ is an explicit parameter everywhere it enters.

pub mod connection;
pub mod dynamics;
pub mod error;
pub mod herm;
pub mod mat;
pub mod orbit;
pub mod qsl;
pub mod verify;

pub use error::{Error, Result};
pub use herm::{
    haar_unitary, random_lie_element, random_observable, DensityOperator, LieAlgebraElement,
    Observable, Spectrum, UnitaryFrame,
};
pub use orbit::TangentVector;
pub use qsl::{GeodesicOptions, MetricChoice, QslReport};
