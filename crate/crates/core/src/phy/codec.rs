//! Frame bytes to coded bits and back.
//!
//! The frame is cut into `m`-bit symbols, zero-padded to a whole number of
//! `k`-symbol blocks and each block is RS-encoded; codewords go out back to
//! back. The receiver does not know the frame length up front: it decodes
//! codewords until the length byte is available, then decodes the rest.

use crate::error::Result;
use crate::rscodec::{Decoded, ReedSolomon, RsCode};

use super::frame::{bits_to_symbols, bytes_to_bits, frame_build, frame_len, frame_parse, symbols_to_bits, MAX_PAYLOAD, MIN_PAYLOAD};

#[derive(Debug, Clone)]
pub struct FrameCodec {
    rs: ReedSolomon,
}

/// What the receiver recovered from one coded frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CodecOutput {
    /// CRC-checked payload, if the frame survived.
    pub payload: Option<Vec<u8>>,
    /// Best-effort frame bits from every codeword that was decoded. Failed
    /// codewords contribute their received systematic part.
    pub frame_bits: Vec<u8>,
    /// Bits known to be unreliable: flagged erasures inside failed codewords.
    pub unreliable: Vec<bool>,
    pub codewords_decoded: usize,
    pub codewords_failed: usize,
}

impl FrameCodec {
    pub fn new(code: RsCode) -> Result<Self> {
        Ok(Self { rs: ReedSolomon::new(code)? })
    }

    pub fn code(&self) -> RsCode {
        self.rs.code()
    }

    /// Number of codewords needed for a payload of `payload_len` bytes.
    pub fn codewords(&self, payload_len: usize) -> usize {
        let c = self.code();
        let symbols = (frame_len(payload_len) * 8).div_ceil(c.m() as usize);
        symbols.div_ceil(c.k())
    }

    pub fn coded_bits(&self, payload_len: usize) -> usize {
        let c = self.code();
        self.codewords(payload_len) * c.n() * c.m() as usize
    }

    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        let c = self.code();
        let m = c.m();
        let mut symbols = bits_to_symbols(&bytes_to_bits(&frame_build(payload)?), m);
        symbols.resize(self.codewords(payload.len()) * c.k(), 0);
        let mut out = Vec::with_capacity(self.coded_bits(payload.len()));
        for block in symbols.chunks(c.k()) {
            out.extend(symbols_to_bits(&self.rs.encode(block)?, m));
        }
        Ok(out)
    }

    /// Decode `bits` with per-bit erasure flags (a symbol with any flagged
    /// bit is an erasure). Extra trailing bits are ignored.
    pub fn decode(&self, bits: &[u8], erased: &[bool]) -> CodecOutput {
        let c = self.code();
        let m = c.m() as usize;
        let cw_bits = c.n() * m;
        let info_bits = c.k() * m;
        let mut out = CodecOutput {
            payload: None,
            frame_bits: Vec::new(),
            unreliable: Vec::new(),
            codewords_decoded: 0,
            codewords_failed: 0,
        };
        let mut needed = 8usize.div_ceil(info_bits);
        let mut length_known = false;
        while out.codewords_decoded < needed {
            let j = out.codewords_decoded;
            let Some(chunk) = bits.get(j * cw_bits..(j + 1) * cw_bits) else { break };
            let flags = &erased[j * cw_bits..((j + 1) * cw_bits).min(erased.len())];
            let received = bits_to_symbols(chunk, c.m());
            let symbol_erasures: Vec<usize> =
                (0..c.n()).filter(|&s| flags.iter().skip(s * m).take(m).any(|&e| e)).collect();
            match self.rs.decode(&received, &symbol_erasures).expect("well-formed codeword") {
                Decoded::Ok { info, .. } => {
                    out.frame_bits.extend(symbols_to_bits(&info, c.m()));
                    out.unreliable.extend(std::iter::repeat_n(false, info_bits));
                }
                Decoded::Failure => {
                    out.codewords_failed += 1;
                    out.frame_bits.extend_from_slice(&chunk[..info_bits]);
                    out.unreliable.extend(flags.iter().take(info_bits).copied());
                    out.unreliable.resize(out.frame_bits.len(), false);
                }
            }
            out.codewords_decoded += 1;
            if !length_known && out.frame_bits.len() >= 8 {
                length_known = true;
                let len = out.frame_bits[..8].iter().fold(0usize, |a, &b| (a << 1) | b as usize);
                if !(MIN_PAYLOAD..=MAX_PAYLOAD).contains(&len) {
                    return out;
                }
                needed = self.codewords(len);
            }
        }
        if out.codewords_decoded == needed && length_known {
            let bytes = super::frame::bits_to_bytes(&out.frame_bits);
            out.payload = frame_parse(&bytes).ok();
        }
        out
    }
}

/// Uncoded receive path: parse the demodulated bits as a frame directly.
pub fn parse_uncoded(bits: &[u8]) -> Option<Vec<u8>> {
    frame_parse(&super::frame::bits_to_bytes(bits)).ok()
}
