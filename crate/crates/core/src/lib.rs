//! Expected widths, directional width distributions and coresets for
//! uncertain point sets under the existential and locational models.

pub mod apps;
pub mod error;
pub mod expkernel;
pub mod fpowkernel;
pub mod geom;
pub mod model;
pub mod oracle;
pub mod presets;
pub mod quantkernel;
mod sweep;
pub mod width;

pub use error::{Error, Result};
