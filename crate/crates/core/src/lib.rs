//! Entanglement distribution through pairs of qubit channels: channel
//! catalog, Choi-level checks, an SDP lower bound on the output partial
//! transpose, and optimal-input searches.

pub mod analysis;
pub mod channels;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod sdp;

pub use error::{Error, Result};
