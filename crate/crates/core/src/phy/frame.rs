//! Link frame: `length (1 byte) | payload (3..=108 bytes) | CRC-16 (2 bytes)`.
//!
//! The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection,
//! no final xor) over length and payload, sent big-endian.

use crc::{Crc, CRC_16_IBM_3740};

use crate::error::{Error, Result};

pub const MIN_PAYLOAD: usize = 3;
pub const MAX_PAYLOAD: usize = 108;
/// Length byte plus CRC.
pub const OVERHEAD_BYTES: usize = 3;

const CRC16: Crc<u16> = Crc::<u16>::new(&CRC_16_IBM_3740);

pub fn crc16(data: &[u8]) -> u16 {
    CRC16.checksum(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("frame truncated")]
    Truncated,
    #[error("length field {0} outside 3..=108")]
    BadLength(u8),
    #[error("CRC mismatch")]
    Crc,
}

pub fn frame_len(payload_len: usize) -> usize {
    payload_len + OVERHEAD_BYTES
}

pub fn frame_build(payload: &[u8]) -> Result<Vec<u8>> {
    if !(MIN_PAYLOAD..=MAX_PAYLOAD).contains(&payload.len()) {
        return Err(Error::param(format!(
            "payload of {} bytes outside {MIN_PAYLOAD}..={MAX_PAYLOAD}",
            payload.len()
        )));
    }
    let mut out = Vec::with_capacity(frame_len(payload.len()));
    out.push(payload.len() as u8);
    out.extend_from_slice(payload);
    let crc = crc16(&out);
    out.extend_from_slice(&crc.to_be_bytes());
    Ok(out)
}

/// Validate a received frame. Trailing bytes past the CRC (padding) are ignored.
pub fn frame_parse(bytes: &[u8]) -> Result<Vec<u8>, FrameError> {
    let &len = bytes.first().ok_or(FrameError::Truncated)?;
    let len_us = len as usize;
    if !(MIN_PAYLOAD..=MAX_PAYLOAD).contains(&len_us) {
        return Err(FrameError::BadLength(len));
    }
    let total = frame_len(len_us);
    if bytes.len() < total {
        return Err(FrameError::Truncated);
    }
    let body = &bytes[..1 + len_us];
    let sent = u16::from_be_bytes([bytes[total - 2], bytes[total - 1]]);
    if crc16(body) != sent {
        return Err(FrameError::Crc);
    }
    Ok(body[1..].to_vec())
}

/// Bytes to bits, most significant bit first. Bits are stored as 0/1 bytes.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1)).collect()
}

/// Inverse of [`bytes_to_bits`]; a trailing partial byte is zero-filled.
pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i))))
        .collect()
}

/// Group bits into `m`-bit symbols, first bit most significant. The last
/// group is zero-padded.
pub fn bits_to_symbols(bits: &[u8], m: u32) -> Vec<u8> {
    let m = m as usize;
    bits.chunks(m)
        .map(|c| {
            let v = c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1));
            v << (m - c.len())
        })
        .collect()
}

pub fn symbols_to_bits(symbols: &[u8], m: u32) -> Vec<u8> {
    symbols.iter().flat_map(|&s| (0..m).rev().map(move |i| (s >> i) & 1)).collect()
}
