//! Numerical laboratory for the Landau-Lifshitz flow between hyperbolic
//! planes, the harmonic-map heat flow and the caloric gauge built on top of
//! it.
//!
//! Both domain and target are the hyperbolic plane in the global Iwasawa
//! chart (see [`geometry`]). Fields live on a truncated coordinate rectangle
//! with Dirichlet data pinned on the boundary ring.

pub mod error;
pub mod fields;
pub mod flows;
pub mod gauge;
pub mod geometry;
pub mod harmonic;
pub mod kernels;
pub mod report;

pub use error::{Error, Result};
pub use fields::{Grid, MapField, ScalarField, TangentField};
pub use geometry::{ChartPoint, DiskPoint};
