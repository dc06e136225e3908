//! GMAP1 binary tensor format.
//!
//! ```text
//! offset  size  field
//! 0       5     magic "GMAP1"
//! 5       4     channels (u32 LE, always 4)
//! 9       4     bins N   (u32 LE)
//! 13      4     rows h   (u32 LE)
//! 17      4     cols w   (u32 LE)
//! 21      ...   4*N*h*w f32 LE values, channel order Q, cos, sin, width,
//!               each channel bin-major then row-major
//! ```

use crate::error::{Error, Result};
use crate::stack::{Channel, GraspMapStack};

pub const MAGIC: &[u8; 5] = b"GMAP1";
pub const HEADER_LEN: usize = 21;
const CHANNELS: u32 = 4;

fn tensor_err(msg: impl Into<String>) -> Error {
    Error::Tensor(msg.into())
}

pub fn write_tensor(stack: &GraspMapStack<f32>) -> Result<Vec<u8>> {
    let dim = |v: usize, name: &str| u32::try_from(v).map_err(|_| tensor_err(format!("{name} {v} exceeds u32")));
    let (bins, rows, cols) = (
        dim(stack.bins, "bins")?,
        dim(stack.rows, "rows")?,
        dim(stack.cols, "cols")?,
    );
    let n = stack.channel_len();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * n);
    out.extend_from_slice(MAGIC);
    for v in [CHANNELS, bins, rows, cols] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for c in Channel::ALL {
        let data = stack.channel(c);
        if data.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "channel {} has {} values, expected {n}",
                c.name(),
                data.len()
            )));
        }
        for v in data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn read_tensor(bytes: &[u8]) -> Result<GraspMapStack<f32>> {
    if bytes.len() < HEADER_LEN {
        return Err(tensor_err(format!("truncated header: {} bytes", bytes.len())));
    }
    if &bytes[..5] != MAGIC {
        return Err(tensor_err("bad magic, expected GMAP1"));
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().expect("4-byte slice"));
    let (channels, bins, rows, cols) = (u32_at(5), u32_at(9), u32_at(13), u32_at(17));
    if channels != CHANNELS {
        return Err(tensor_err(format!("expected 4 channels, header says {channels}")));
    }
    if bins == 0 || rows == 0 || cols == 0 {
        return Err(tensor_err(format!("empty dimensions {bins}x{rows}x{cols}")));
    }
    let n = (bins as usize)
        .checked_mul(rows as usize)
        .and_then(|v| v.checked_mul(cols as usize))
        .ok_or_else(|| tensor_err("dimensions overflow"))?;
    let expected = n
        .checked_mul(16)
        .and_then(|v| v.checked_add(HEADER_LEN))
        .ok_or_else(|| tensor_err("dimensions overflow"))?;
    if bytes.len() != expected {
        return Err(tensor_err(format!(
            "length mismatch: header implies {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let payload = &bytes[HEADER_LEN..];
    let mut channels = payload.chunks_exact(4 * n).map(|chunk| {
        chunk
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().expect("4-byte chunk")))
            .collect::<Vec<f32>>()
    });
    let mut next = || channels.next().expect("four channels");
    let stack = GraspMapStack::from_channels(
        bins as usize,
        rows as usize,
        cols as usize,
        next(),
        next(),
        next(),
        next(),
    )?;
    for c in Channel::ALL {
        if let Some(pos) = stack.channel(c).iter().position(|v| !v.is_finite()) {
            return Err(tensor_err(format!(
                "non-finite value in channel {} at element {pos}",
                c.name()
            )));
        }
    }
    Ok(stack)
}
