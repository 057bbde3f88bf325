//! Binary persistence of truncated-SVD factors.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  content
//! 0       8     magic "TLSVDFAC"
//! 8       4     format version (u32, currently 1)
//! 12      4     reserved, zero
//! 16      8     document count D (u64)
//! 24      8     vocabulary size V (u64)
//! 32      8     rank k (u64)
//! 40      8k    singular values (f64)
//! ..      8Dk   left factors, row-major D x k (f64)
//! ..      8Vk   right factors, row-major V x k (f64)
//! ```

use std::fs;
use std::path::Path;

use trendlens_core::features::SvdFactors;
use trendlens_core::linalg::Mat;

use crate::error::Error;

const MAGIC: &[u8; 8] = b"TLSVDFAC";
const VERSION: u32 = 1;

pub fn save_factors(path: &Path, factors: &SvdFactors) -> Result<(), Error> {
    let d = factors.left.rows;
    let v = factors.right.rows;
    let k = factors.k;
    let mut buf = Vec::with_capacity(40 + 8 * (k + d * k + v * k));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for dim in [d as u64, v as u64, k as u64] {
        buf.extend_from_slice(&dim.to_le_bytes());
    }
    for value in factors
        .singular
        .iter()
        .chain(&factors.left.data)
        .chain(&factors.right.data)
    {
        buf.extend_from_slice(&value.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_factors(path: &Path) -> Result<SvdFactors, Error> {
    let buf = fs::read(path)
        .map_err(|e| Error::input(format!("cannot read factors {}: {e}", path.display())))?;
    if buf.len() < 40 || &buf[0..8] != MAGIC {
        return Err(Error::input("not a factors file: bad magic"));
    }
    let version = u32::from_le_bytes(buf[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::input(format!(
            "unsupported factors version {version}"
        )));
    }
    let read_u64 = |offset: usize| u64::from_le_bytes(buf[offset..offset + 8].try_into().unwrap());
    let d = read_u64(16) as usize;
    let v = read_u64(24) as usize;
    let k = read_u64(32) as usize;
    let expected = 40 + 8 * (k + d * k + v * k);
    if buf.len() != expected {
        return Err(Error::input(format!(
            "factors file truncated: {} bytes, expected {expected}",
            buf.len()
        )));
    }
    let mut offset = 40;
    let mut read_block = |count: usize| -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(f64::from_le_bytes(
                buf[offset..offset + 8].try_into().unwrap(),
            ));
            offset += 8;
        }
        out
    };
    let singular = read_block(k);
    let left = Mat {
        rows: d,
        cols: k,
        data: read_block(d * k),
    };
    let right = Mat {
        rows: v,
        cols: k,
        data: read_block(v * k),
    };
    Ok(SvdFactors {
        k,
        left,
        singular,
        right,
    })
}
