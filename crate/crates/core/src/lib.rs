//! Exact max-slope pivot fans of simplices and products of simplices, the
//! (block-)sylvester fans they map onto, and machine-checkable certificates
//! that the slope map is a piecewise linear isomorphism between them.

pub mod arith;
pub mod error;
pub mod io;
pub mod model;
pub mod pivot;
pub mod slope_map;
pub mod sylvester;

pub use error::{Error, Result};
