//! Numerics for quadratic Siegel disks, Brjuno arithmetic, and Herman rings.
//!
//! The toolkit makes a handful of objects from one-dimensional holomorphic
//! dynamics computable at desk scale:
//!
//! - [`arithmetic`] — exact continued fractions, convergents, and Brjuno-type
//!   sums used to classify rotation numbers.
//! - [`linearizer`] — Taylor coefficients of the map linearizing
//!   `P(z) = e^{2πiα} z + z²` near 0, conjugacy verification, and conformal
//!   radius estimates from coefficient growth.
//! - [`search`] — a radius oracle over α, a semicontinuity-aware intermediate
//!   value search, and the staged search that steers the conformal radius to a
//!   prescribed target while keeping the parameter and the linearizing map
//!   close to where they started.
//! - [`herman`] — Blaschke and Arnold circle families: lifts, rotation
//!   numbers, parameter solving, orbit-sampled boundary conjugacies, and
//!   Herman-ring half-modulus estimates from Fourier decay.
//!
//! The narrative guide lives in `book/`; its code snippets are compiled and
//! run as doc-tests through the [`guide`] module.

pub mod arithmetic;
mod fit;
pub mod herman;
pub mod linearizer;
pub mod search;

pub mod guide;

/// The golden mean `(√5 − 1)/2`, the canonical bounded-type rotation number.
pub const GOLDEN_MEAN: f64 = 0.6180339887498949;
