//! Binary CSR files.
//!
//! Layout, all little-endian: the five bytes `PCSR1`, `u64 n`, `u64 m`, a
//! `u8` weighted flag, `n + 1` `u64` offsets, `m` `u32` targets, `m` `f32`
//! weights when the flag is set, and a trailing `u32` CRC-32 of every byte
//! before it.

use std::fs;
use std::io::Write;
use std::path::Path;

use pcpm_core::CsrGraph;

use crate::error::{FormatError, Result};

pub const MAGIC: &[u8; 5] = b"PCSR1";

pub fn encode_csr(g: &CsrGraph) -> Vec<u8> {
    let weights = g.weights();
    let len = MAGIC.len() + 17 + 8 * (g.n() + 1) + 4 * g.m() * (1 + weights.is_some() as usize) + 4;
    let mut buf = Vec::with_capacity(len);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(g.n() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.m() as u64).to_le_bytes());
    buf.push(weights.is_some() as u8);
    for &o in g.offsets() {
        buf.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &t in g.targets() {
        buf.extend_from_slice(&t.to_le_bytes());
    }
    if let Some(w) = weights {
        for &x in w {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

pub fn decode_csr(bytes: &[u8]) -> Result<CsrGraph> {
    let mut r = Cursor { bytes, at: 0 };
    if r.take(MAGIC.len(), "magic")? != MAGIC {
        return Err(FormatError::BadMagic { expected: "PCSR1" });
    }
    let n = r.u64("header")?;
    let m = r.u64("header")?;
    let weighted = match r.take(1, "header")?[0] {
        0 => false,
        1 => true,
        f => {
            return Err(FormatError::Parse {
                line: 0,
                message: format!("weighted flag must be 0 or 1, found {f}"),
            })
        }
    };
    // refuse sizes the remaining bytes cannot hold before allocating
    let need = n
        .checked_add(1)
        .and_then(|x| x.checked_mul(8))
        .and_then(|x| m.checked_mul(4 * (1 + weighted as u64)).and_then(|y| x.checked_add(y)))
        .and_then(|x| x.checked_add(4));
    if need.is_none_or(|need| need > (bytes.len() - r.at) as u64) {
        return Err(FormatError::Truncated { what: "arrays" });
    }
    let (n, m) = (n as usize, m as usize);
    let offsets = (0..=n)
        .map(|_| r.u64("offsets").map(|o| o as usize))
        .collect::<Result<Vec<_>>>()?;
    let targets = (0..m)
        .map(|_| r.array::<4>("targets").map(u32::from_le_bytes))
        .collect::<Result<Vec<_>>>()?;
    let weights = if weighted {
        Some(
            (0..m)
                .map(|_| r.array::<4>("weights").map(f32::from_le_bytes))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let body = r.at;
    let stored = u32::from_le_bytes(r.array::<4>("checksum")?);
    if r.at != bytes.len() {
        return Err(FormatError::Parse {
            line: 0,
            message: format!("{} trailing bytes after checksum", bytes.len() - r.at),
        });
    }
    let computed = crc32fast::hash(&bytes[..body]);
    if stored != computed {
        return Err(FormatError::Checksum { stored, computed });
    }
    Ok(CsrGraph::from_parts(n, offsets, targets, weights)?)
}

pub fn write_binary_csr(g: &CsrGraph, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_csr(g))?;
    f.sync_all()?;
    Ok(())
}

pub fn read_binary_csr(path: &Path) -> Result<CsrGraph> {
    decode_csr(&fs::read(path)?)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8]> {
        let end = self.at.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or(FormatError::Truncated { what })?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64> {
        self.array::<8>(what).map(u64::from_le_bytes)
    }
}
