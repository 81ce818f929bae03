//! Oblivious transfer between Alice and Bob over a broadcast erasure channel
//! that Eve wiretaps.
//!
//! - [`channel`]: the two-BEC broadcast channel and general finite broadcast channels.
//! - [`protocol`]: the 2-privacy and 1-privacy OT protocols with full views.
//! - [`keymat`]: expansion code, Toeplitz privacy amplification, pads.
//! - [`capacity`]: closed-form capacities and numerically evaluated outer bounds.
//! - [`analysis`]: exact and Monte Carlo leakage, provisioning tails, random-code entropy.

pub mod analysis;
pub mod bits;
pub mod capacity;
pub mod channel;
pub mod error;
pub mod gf2;
pub mod keymat;
pub mod protocol;
pub mod rng;

pub use bits::{BitString, ErasureString, Symbol};
pub use channel::{ChannelParams, DiscreteBroadcastChannel};
pub use error::{Error, Result};
pub use protocol::{PrivacyMode, Protocol, ProtocolParams};
