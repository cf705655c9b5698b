//! Binary file holding one reduced path.
//!
//! ```text
//! magic     7 bytes  "MLPATH1"
//! version   u16
//! k         u32
//! part      u8       0 whole, 1 front, 2 middle, 3 rear
//! scope     u8       0 global, 1 part-local
//! count     u64
//! ranks     count x u32
//! checksum  u64      CRC-64/XZ of everything above
//! ```
//!
//! All integers are little-endian. Search metadata is not stored.

use std::fs;
use std::path::Path;

use crate::checkpoint::{write_atomic, Reader, CRC64};
use crate::error::{Error, Result};
use crate::graph::Part;
use crate::ranking::RankScope;
use crate::search::{PathMeta, ReducedPath};

pub const MAGIC: &[u8; 7] = b"MLPATH1";
pub const VERSION: u16 = 1;

fn scope_tag(scope: RankScope) -> u8 {
    match scope {
        RankScope::Global => 0,
        RankScope::PartLocal => 1,
    }
}

pub fn encode(path: &ReducedPath) -> Vec<u8> {
    let mut out = Vec::with_capacity(31 + 4 * path.ranks.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&path.k.to_le_bytes());
    out.push(path.part.tag());
    out.push(scope_tag(path.scope));
    out.extend_from_slice(&(path.ranks.len() as u64).to_le_bytes());
    for r in &path.ranks {
        out.extend_from_slice(&r.to_le_bytes());
    }
    let sum = CRC64.checksum(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

/// Whether `bytes` start with the path file magic.
pub fn is_path_file(bytes: &[u8]) -> bool {
    bytes.starts_with(MAGIC)
}

pub fn decode(bytes: &[u8]) -> Result<ReducedPath> {
    if bytes.len() < MAGIC.len() + 8 || !is_path_file(bytes) {
        return Err(Error::Format("not a path file".into()));
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
        return Err(Error::Format(format!("path file version {version}, expected {VERSION}")));
    }
    let k = r.u32()?;
    let tag = r.u8()?;
    let part = Part::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown part tag {tag}")))?;
    let scope = match r.u8()? {
        0 => RankScope::Global,
        1 => RankScope::PartLocal,
        t => return Err(Error::Format(format!("unknown rank scope {t}"))),
    };
    let count = r.u64()?;
    if count > (body.len() as u64) / 4 {
        return Err(Error::Format(format!("count {count} exceeds the payload")));
    }
    let ranks = (0..count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok(ReducedPath {
        k,
        part,
        scope,
        ranks,
        meta: PathMeta::default(),
    })
}

/// Atomic write through a temporary file.
pub fn write(path: &ReducedPath, file: &Path) -> Result<()> {
    write_atomic(file, &encode(path))
}

pub fn read(file: &Path) -> Result<ReducedPath> {
    decode(&fs::read(file)?)
}
