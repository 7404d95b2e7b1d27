//! Raw waveform dump: interleaved little-endian `f32` I/Q in one file and a
//! `key=value` sidecar (`<path>.hdr`) with the sample rate and bit length.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::modem::SampleStream;

fn header_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".hdr");
    PathBuf::from(p)
}

pub fn write_dump(stream: &SampleStream, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut raw = Vec::with_capacity(stream.len() * 8);
    for (i, q) in stream.i.iter().zip(&stream.q) {
        raw.extend_from_slice(&(*i as f32).to_le_bytes());
        raw.extend_from_slice(&(*q as f32).to_le_bytes());
    }
    fs::write(path, raw)?;
    let header = format!(
        "format=cf32_le\nsample_rate={}\nsamples_per_bit={}\nsamples={}\n",
        stream.sample_rate,
        stream.samples_per_bit,
        stream.len()
    );
    fs::write(header_path(path), header)?;
    Ok(())
}

pub fn read_dump(path: impl AsRef<Path>) -> Result<SampleStream> {
    let path = path.as_ref();
    let header = fs::read_to_string(header_path(path))?;
    let mut sample_rate = None;
    let mut spb = None;
    for (lineno, line) in header.lines().enumerate() {
        let Some((k, v)) = line.split_once('=') else { continue };
        let bad = |msg: String| Error::Parse { line: lineno + 1, msg };
        match k.trim() {
            "sample_rate" => sample_rate = Some(v.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "samples_per_bit" => spb = Some(v.trim().parse::<usize>().map_err(|e| bad(e.to_string()))?),
            _ => {}
        }
    }
    let raw = fs::read(path)?;
    if raw.len() % 8 != 0 {
        return Err(Error::Parse { line: 0, msg: format!("{} bytes is not a whole number of I/Q pairs", raw.len()) });
    }
    let f = |c: &[u8]| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64;
    let (i, q) = raw.chunks_exact(8).map(|c| (f(&c[..4]), f(&c[4..]))).unzip();
    Ok(SampleStream {
        i,
        q,
        sample_rate: sample_rate.ok_or_else(|| Error::Config("dump header lacks sample_rate".into()))?,
        samples_per_bit: spb.ok_or_else(|| Error::Config("dump header lacks samples_per_bit".into()))?,
    })
}
