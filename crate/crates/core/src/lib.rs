//! Numerical toolkit for two-parameter families of circle-map lifts
//! `F_{t,a}(x) = x + t + a·φ(x)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`circle_map`] defines the families and evaluates lifts, iterates and
//!   their derivatives.
//! * [`rotation`] computes translation numbers with certified enclosures,
//!   devil's staircases and semiconjugacy averages.
//! * [`tongue`] locates boundaries of rational Arnol'd tongues and produces
//!   parabolic witnesses on them.
//! * [`asymptotics`] extracts first-order boundary slopes and fits the order
//!   of contact of the boundaries.
//! * [`series`] is a truncated complex power-series engine used to read off
//!   parabolic multiplicities and leading coefficients of guiding maps.
//! * [`guided`] extracts the order-`n` coefficients of a family in `a` and
//!   checks their trigonometric degree.
//! * [`raster`] renders the parameter plane to PGM images.
//!
//! ```
//! use tongue_lab::circle_map::{FamilySpec, ParamPoint};
//! use tongue_lab::rotation::trans_enclosure;
//!
//! let fam = FamilySpec::standard();
//! let enc = trans_enclosure(&fam, ParamPoint::new(0.3, 0.0), 1000).unwrap();
//! assert!(enc.contains(0.3));
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod circle_map;
mod error;
pub mod fmt;
mod fourier;
pub mod guided;
pub mod raster;
pub mod rotation;
pub mod series;
pub mod tongue;
mod trig;
mod util;

pub use error::{Error, Result};
pub use tongue::Fraction;
