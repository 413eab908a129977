//! Numerical laboratory for the phase-deformed Dirac/sinh-Gordon system.

pub mod charges;
pub mod continuity;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod gauge;
pub mod jetcalc;
pub mod lax;
pub mod sl2;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{FieldState, GridSpec, ModelParams, Stencil};
pub use sl2::{Mat2, C64};
