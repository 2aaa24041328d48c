//! Bodies of constant width with the symmetries of a regular simplex.
//!
//! The crate evaluates support functions of the bodies `M_n`, their
//! simplex-symmetric projections `U_n`, the two Meissner bodies and their
//! Minkowski average; computes their volumes by quadrature of the
//! support-function volume functional; certifies constant width, symmetry,
//! convexity and curvature numerically; estimates high-dimensional volumes
//! by Monte Carlo; and meshes the three-dimensional bodies.
//!
//! ```
//! use constwidth::volume::{volume_u3, U3Method};
//!
//! let report = volume_u3(U3Method::Cases).unwrap();
//! assert!((report.ratio_to_ball - 0.802_970_255_149_910_1).abs() < 1e-11);
//! ```

pub mod bodies;
pub mod error;
pub mod mesh;
pub mod montecarlo;
pub mod quadrature;
pub mod sampling;
pub mod verify;
pub mod volume;

pub use bodies::{AbcPoint, Body, BodyKind, BodySpec, CaseRegion, Direction};
pub use error::{Error, Result};

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

// The guide's code listings are compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/support-functions.md")]
    mod support_functions {}
    #[doc = include_str!("../../../book/src/meissner.md")]
    mod meissner {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/volume.md")]
    mod volume {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
