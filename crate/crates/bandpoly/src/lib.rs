//! Orthogonal polynomials for Jacobi-type measures on several disjoint intervals.
//!
//! Two sides of the same computation live here. The exact side turns a measure
//! into a quadrature rule and reduces it to three-term recurrence
//! coefficients. The asymptotic side builds the g-function, the hyperelliptic
//! surface data (periods, theta functions, Abel map), the Szegő function and
//! the Bessel edge model, and from them predicts `a_n`, `b_n` and pointwise
//! values of the polynomials.
//!
//! Everything is `no_std` with `alloc`; floating point special functions come
//! from `libm`.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod branch;
mod contour;
mod error;
pub mod integrate;
pub mod linalg;

pub mod asymptotics;
pub mod bessel;
pub mod gfun;
pub mod measure;
pub mod quadrature;
pub mod recurrence;
pub mod riemann;
pub mod szego;

pub use branch::{BranchedR, Side};
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use asymptotics::AsymptoticModel;
pub use gfun::GData;
pub use measure::{BandSpec, Interval, MeasureSpec, PointMass, SmoothFactor};
pub use quadrature::{AuxiliaryRecurrence, Quadrature};
pub use recurrence::{PolynomialFrame, RecurrenceCoeffs};
pub use riemann::SurfaceData;
pub use szego::SzegoData;
