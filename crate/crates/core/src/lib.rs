//! Two-receiver private data transfer over independent binary erasure
//! channels.
//!
//! Alice holds `N` files. Bob and Cathy each want one file of their choice
//! and must learn nothing else; no two parties may learn anything forbidden
//! by pooling their views. The crate provides the rate formulas, a channel
//! simulator, the protocol itself, and an auditor that checks privacy by
//! exact enumeration at tiny sizes and by Monte Carlo at realistic ones.

pub mod audit;
pub mod bits;
pub mod channel;
pub mod index_set;
pub mod protocol;
pub mod rates;
pub mod rng;
pub mod scalar;

pub use bits::{BitError, BitString};
pub use channel::{broadcast, BitSequence, ChannelConfig, ReceivedSequence, Symbol};
pub use index_set::IndexSet;
pub use protocol::{
    run_protocol, AbortStage, Database, Party, ProtocolError, RunOutcome, RunRecord, RunStatus,
    Transcript, Variant,
};
pub use rates::{
    capacity_2p, rate_bounds, size_plan, ProtocolParams, RateBounds, RateError, SetSizes,
    SizePlan, DEFAULT_DELTA,
};
pub use rng::RunSeeds;
pub use scalar::{KahanSum, Probability, Real};

/// Parameters in double precision.
pub type Params = ProtocolParams<f64>;
/// Size plan in double precision.
pub type Plan = SizePlan<f64>;
/// Rate bounds in double precision.
pub type Bounds = RateBounds<f64>;
/// Rate bounds in single precision.
pub type Bounds32 = RateBounds<f32>;
