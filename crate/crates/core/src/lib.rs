pub mod bnb;
pub mod cli;
pub mod bounding;
pub mod constraints;
pub mod error;
pub mod model;
pub mod oracle;
pub mod sdp;
pub mod uai;
pub mod verify;

pub use error::{Error, Result};
