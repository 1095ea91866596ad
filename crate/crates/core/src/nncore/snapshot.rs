//! Portable parameter snapshots.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes   b"RMTSNAP\0"
//! version    u32       currently 1
//! header_len u32
//! header     header_len bytes of UTF-8 JSON (model kind, policy count, metadata)
//! count      u32       number of tensors
//! per tensor:
//!   name_len u32, name (UTF-8)
//!   rows u32, cols u32
//!   rows*cols f64 values, row-major
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ParamSet;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"RMTSNAP\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub kind: String,
    pub policies: usize,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedArray {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub arrays: Vec<NamedArray>,
}

impl Snapshot {
    pub fn capture<P: ParamSet>(header: SnapshotHeader, params: &P) -> Self {
        let arrays = params
            .names()
            .into_iter()
            .zip(params.tensors())
            .map(|(name, t)| NamedArray {
                name,
                rows: t.rows,
                cols: t.cols,
                data: t.data.to_vec(),
            })
            .collect();
        Snapshot { header, arrays }
    }

    /// Copies stored values into `params`; names and shapes must match exactly.
    pub fn restore_into<P: ParamSet>(&self, params: &mut P) -> Result<()> {
        let names = params.names();
        let shapes: Vec<(usize, usize)> = params.tensors().iter().map(|t| (t.rows, t.cols)).collect();
        if names.len() != self.arrays.len() {
            return Err(Error::Snapshot(format!(
                "snapshot holds {} tensors, model expects {}",
                self.arrays.len(),
                names.len()
            )));
        }
        for ((array, name), shape) in self.arrays.iter().zip(&names).zip(&shapes) {
            if &array.name != name || (array.rows, array.cols) != *shape {
                return Err(Error::Snapshot(format!(
                    "tensor {} {}x{} does not match expected {} {}x{}",
                    array.name, array.rows, array.cols, name, shape.0, shape.1
                )));
            }
        }
        for (dst, array) in params.tensors_mut().into_iter().zip(&self.arrays) {
            dst.copy_from_slice(&array.data);
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = serde_json::to_vec(&self.header).map_err(std::io::Error::other)?;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        write_len(&mut w, header.len())?;
        w.write_all(&header)?;
        write_len(&mut w, self.arrays.len())?;
        for a in &self.arrays {
            write_len(&mut w, a.name.len())?;
            w.write_all(a.name.as_bytes())?;
            write_len(&mut w, a.rows)?;
            write_len(&mut w, a.cols)?;
            for v in &a.data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Snapshot(format!("unsupported version {version}")));
        }
        let header_len = read_u32(&mut r)? as usize;
        let mut header = vec![0u8; header_len];
        read_exact(&mut r, &mut header)?;
        let header: SnapshotHeader = serde_json::from_slice(&header)?;
        let count = read_u32(&mut r)? as usize;
        let mut arrays = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            let name_len = read_u32(&mut r)? as usize;
            let mut name = vec![0u8; name_len];
            read_exact(&mut r, &mut name)?;
            let name = String::from_utf8(name).map_err(|e| Error::Snapshot(e.to_string()))?;
            let rows = read_u32(&mut r)? as usize;
            let cols = read_u32(&mut r)? as usize;
            let mut data = Vec::with_capacity(rows * cols);
            let mut buf = [0u8; 8];
            for _ in 0..rows * cols {
                read_exact(&mut r, &mut buf)?;
                data.push(f64::from_le_bytes(buf));
            }
            arrays.push(NamedArray { name, rows, cols, data });
        }
        Ok(Snapshot { header, arrays })
    }
}

fn write_len<W: Write>(w: &mut W, n: usize) -> std::io::Result<()> {
    let n = u32::try_from(n).map_err(std::io::Error::other)?;
    w.write_all(&n.to_le_bytes())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| Error::Snapshot(format!("truncated snapshot: {e}")))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        Snapshot {
            header: SnapshotHeader {
                kind: "mlp".into(),
                policies: 1,
                metadata: serde_json::json!({"k": 4}),
            },
            arrays: vec![
                NamedArray {
                    name: "a".into(),
                    rows: 2,
                    cols: 1,
                    data: vec![1.5, -0.25],
                },
                NamedArray {
                    name: "b".into(),
                    rows: 1,
                    cols: 1,
                    data: vec![f64::MIN_POSITIVE],
                },
            ],
        }
    }

    #[test]
    fn bytes_round_trip() {
        let snap = sample();
        let bytes = snap.to_bytes();
        assert_eq!(&bytes[..8], MAGIC);
        assert_eq!(Snapshot::read_from(&bytes[..]).unwrap(), snap);
    }

    #[test]
    fn truncated_and_foreign_inputs_fail() {
        let bytes = sample().to_bytes();
        assert!(Snapshot::read_from(&bytes[..bytes.len() - 3]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Snapshot::read_from(&bad[..]).is_err());
        let mut future = bytes;
        future[8] = 9;
        assert!(Snapshot::read_from(&future[..]).is_err());
    }
}
