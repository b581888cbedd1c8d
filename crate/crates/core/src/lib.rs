//! Orthogeodesics and orthospectra of compact hyperbolic surfaces with
//! totally geodesic boundary.

pub mod develop;
pub mod enumerate;
pub mod error;
pub mod plane;
pub mod rigidity;
pub mod spectra;
pub mod surface;
pub mod trig;

pub use error::{Error, NonHyperbolicKind, Result};
