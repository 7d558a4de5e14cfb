//! Numerical toolkit for the quasi-periods of the Weierstrass zeta-function
//! and the ratio map `p = eta_1 / eta_2` on the upper half-plane.
//!
//! The crate is organised around the modular-form route to the quasi-periods:
//!
//! - [`qforms`]: q-series engine for E2, E4, E6, the discriminant, the
//!   J-invariant, their fixed-branch roots and derivatives, with rigorous
//!   truncation-tail bounds.
//! - [`lattice`]: rank-2 lattices, direct summation of the zeta-series as a
//!   low-precision oracle, and quasi-periods via both routes.
//! - [`group`]: the modular group, the extended reflection group, reduction
//!   to the fundamental domain, and tessellation by reflections.
//! - [`pmap`]: the ratio map `p`, its derivative, equivariance residuals,
//!   the weight-2 bound, the axis zero of E2, and inversion of `p`.
//! - [`hypergeo`]: normalised periods, the first-order system linking them,
//!   hypergeometric ODE residuals, triangle angles, and Schwarzian
//!   derivatives.
//! - [`geom`]: generalised circles, circular-arc triangles, boundary
//!   correspondence, and the argument-principle verifier.

pub mod error;
pub mod geom;
pub mod group;
pub mod hypergeo;
pub mod lattice;
pub mod pmap;
pub mod qforms;
mod series;
pub mod sphere;

pub use error::{Error, Result};
pub use qforms::{FormValue, SeriesParams, TauPoint};
pub use sphere::{chordal_distance, SpherePoint};
