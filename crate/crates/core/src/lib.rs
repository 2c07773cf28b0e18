//! Channel decoding with classical and trainable message-passing decoders.
//!
//! Modules, bottom-up: [`gf2`] linear algebra, [`code`] parity-check codes and
//! Tanner graphs, [`channel`] BPSK/AWGN simulation, [`decoder`] BP, min-sum,
//! neural BP and doubly residual decoders, [`train`] reverse passes and
//! RMSprop training, [`eval`] Monte-Carlo BER estimation and cost accounting.

pub mod channel;
pub mod code;
pub mod decoder;
pub mod eval;
pub mod gf2;
pub mod parallel;
pub mod train;
