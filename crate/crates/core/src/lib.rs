#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod analysis;
pub mod bath;
pub mod channel;
pub mod error;
pub mod multiqubit;
pub mod numeric;
pub mod qfi;
pub mod state;

pub use analysis::{CrossoverReport, FlowSample, TimingReport, Window};
pub use bath::{BathParams, RateSample, RateSign, RateTable};
pub use channel::{BlochVector, ChannelCoefficients, ChannelTable};
pub use error::{Error, Result};
pub use multiqubit::{InputFamily, MultiQubitState};
pub use qfi::{Branch, Direction, PhaseEstimate, QfiReport};
pub use state::DensityMatrix;
