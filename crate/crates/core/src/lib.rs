//! Reed-Solomon protection for backscatter links that ride on intermittent
//! excitation traffic.

pub mod channel;
pub mod codesearch;
pub mod error;
pub mod gf2m;
pub mod harness;
pub mod phy;
pub mod rscodec;
pub mod traffic;

pub use error::{Error, Result};
