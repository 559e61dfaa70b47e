//! Link-level baseband simulator for uplink multiple access with periodic
//! (comb) subcarrier allocation.
//!
//! Five schemes share one payload, channel and noise model: localized
//! OFDMA, localized SC-FDMA, and three periodic variants (plain, DCT
//! precoded, DFT precoded). The crate covers the transmit chains, a
//! block-diagonal multipath channel, per-user zero-forcing receivers, PAPR,
//! BER and PSD metrics, an analytic operation-count model and the
//! experiment harness that writes CSV results.

pub mod channel;
pub mod complexity;
pub mod error;
pub mod harness;
pub mod mapping;
pub mod metrics;
pub mod rxchain;
pub mod transforms;
pub mod txchain;

pub use error::{Error, Result};

/// Complex baseband sample.
pub type C64 = num_complex::Complex<f64>;
