//! The book chapters, compiled as doc-tests.
//!
//! Each chapter of the mdbook guide in `book/src/` is included verbatim as
//! the documentation of an empty module, so `cargo test --doc` compiles and
//! runs every code snippet in the book. A failing snippet points at the
//! chapter module it came from.

#[doc = include_str!("../../../book/src/continued-fractions.md")]
pub mod continued_fractions {}

#[doc = include_str!("../../../book/src/linearization.md")]
pub mod linearization {}

#[doc = include_str!("../../../book/src/radius-search.md")]
pub mod radius_search {}

#[doc = include_str!("../../../book/src/herman-rings.md")]
pub mod herman_rings {}
