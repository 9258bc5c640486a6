//! Vector coded caching over downlink multi-user MIMO.
//!
//! The crate covers the whole chain from user placement to averaged rates:
//!
//! * [`channel`]: cell geometry, pathloss, Rayleigh channels, pilot overhead
//!   and CSI error injection.
//! * [`caching`]: symbolic placement and delivery schedules with a verifier.
//! * [`precoding`]: BD-MRC, zero-forcing and multi-server baseline beamformers.
//! * [`allocation`]: water-filling and max-min fair power allocation, with the
//!   analytic brackets and large-array approximations.
//! * [`experiments`]: the Monte Carlo harness, effective gains and CSV output.
//!
//! All powers are linear watts and all rates are nats/s/Hz unless a name says
//! otherwise.

pub mod allocation;
pub mod caching;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod precoding;
pub mod rng;

pub use error::{Error, Result};
