//! Binary checkpoint of a running search.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        7 bytes  "MLCKPT1"
//! version      u16
//! k            u32
//! part         u8       0 whole, 1 front, 2 middle, 3 rear
//! strategy     u8       0 rotation-extension, 1 backtracking
//! seed         u64
//! restarts     u32
//! backtracks   u64      total
//! since        u64      backtracks in the current attempt
//! steps        u64
//! best_depth   u64
//! resume_idx   u32      next candidate index at the head
//! stack_len    u64
//! stack        stack_len x u32 ranks, start terminal first, in path order
//! visited_bits u64
//! visited      ceil(visited_bits / 64) x u64 words
//! checksum     u64      CRC-64/XZ of everything above
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use crc::{Crc, CRC_64_XZ};

use crate::error::{Error, Result};
use crate::graph::Part;
use crate::search::Strategy;

pub const MAGIC: &[u8; 7] = b"MLCKPT1";
pub const VERSION: u16 = 1;

pub(crate) const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub k: u32,
    pub part: Part,
    pub strategy: Strategy,
    pub seed: u64,
    pub restarts: u32,
    pub backtracks: u64,
    pub since_restart: u64,
    pub steps: u64,
    pub best_depth: u64,
    pub resume_idx: u32,
    pub path: Vec<u32>,
    pub visited_bits: u64,
    pub visited: Vec<u64>,
}

impl Checkpoint {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(80 + 4 * self.path.len() + 8 * self.visited.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.k.to_le_bytes());
        out.push(self.part.tag());
        out.push(self.strategy.tag());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.restarts.to_le_bytes());
        out.extend_from_slice(&self.backtracks.to_le_bytes());
        out.extend_from_slice(&self.since_restart.to_le_bytes());
        out.extend_from_slice(&self.steps.to_le_bytes());
        out.extend_from_slice(&self.best_depth.to_le_bytes());
        out.extend_from_slice(&self.resume_idx.to_le_bytes());
        out.extend_from_slice(&(self.path.len() as u64).to_le_bytes());
        for r in &self.path {
            out.extend_from_slice(&r.to_le_bytes());
        }
        out.extend_from_slice(&self.visited_bits.to_le_bytes());
        for w in &self.visited {
            out.extend_from_slice(&w.to_le_bytes());
        }
        let sum = CRC64.checksum(&out);
        out.extend_from_slice(&sum.to_le_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 8 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::Format("not a search checkpoint".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().unwrap());
        let computed = CRC64.checksum(body);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        let mut r = Reader::new(&body[MAGIC.len()..]);
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint version {version}, expected {VERSION}"
            )));
        }
        let k = r.u32()?;
        let tag = r.u8()?;
        let part = Part::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown part tag {tag}")))?;
        let tag = r.u8()?;
        let strategy = Strategy::from_tag(tag)
            .ok_or_else(|| Error::Format(format!("unknown strategy tag {tag}")))?;
        let seed = r.u64()?;
        let restarts = r.u32()?;
        let backtracks = r.u64()?;
        let since_restart = r.u64()?;
        let steps = r.u64()?;
        let best_depth = r.u64()?;
        let resume_idx = r.u32()?;
        let len = r.u64()? as usize;
        let path = (0..len).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let visited_bits = r.u64()?;
        let words = visited_bits.div_ceil(64) as usize;
        let visited = (0..words).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        r.finish()?;
        Ok(Self {
            k,
            part,
            strategy,
            seed,
            restarts,
            backtracks,
            since_restart,
            steps,
            best_depth,
            resume_idx,
            path,
            visited_bits,
            visited,
        })
    }

    /// Writes through a temporary file and a rename, so a crash mid-write
    /// leaves the previous checkpoint intact.
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.encode())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Little-endian cursor over a byte slice.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.buf.len() < N {
            return Err(Error::Format("truncated file".into()));
        }
        let (head, rest) = self.buf.split_at(N);
        self.buf = rest;
        Ok(head.try_into().unwrap())
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take()?))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if !self.buf.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", self.buf.len())));
        }
        Ok(())
    }
}
