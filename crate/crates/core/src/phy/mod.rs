//! Tag framing and the sample-level OOK link.

pub mod codec;
pub mod detect;
pub mod dump;
pub mod frame;
pub mod modem;
pub mod whiten;

pub use codec::{CodecOutput, FrameCodec};
pub use detect::autodetect;
pub use frame::{frame_build, frame_parse, FrameError};
pub use modem::{apply_channel, demodulate, modulate, DemodConfig, Demodulated, NoFrame, SampleStream, PREAMBLE};
