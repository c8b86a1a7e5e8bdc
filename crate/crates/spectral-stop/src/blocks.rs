//! Flat binary container: an 8-byte magic, a little-endian `u64` header
//! length, a UTF-8 JSON header, then each block as little-endian `f64`
//! values in column-major order, in the order the header lists them.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use spectral_stop_core::synth::{SyntheticInstance, SyntheticSpec, TailStyle};
use spectral_stop_core::Mat;

use crate::error::{AppError, AppResult};

pub const MAGIC: &[u8; 8] = b"SSTOPBLK";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Header {
    pub kind: String,
    pub version: u32,
    pub blocks: Vec<BlockInfo>,
    /// Kind-specific metadata.
    pub meta: Value,
}

pub fn write_blocks(path: &Path, kind: &str, meta: Value, blocks: &[(&str, &Mat)]) -> AppResult<()> {
    let header = Header {
        kind: kind.to_string(),
        version: FORMAT_VERSION,
        blocks: blocks
            .iter()
            .map(|(name, m)| BlockInfo { name: name.to_string(), rows: m.nrows(), cols: m.ncols() })
            .collect(),
        meta,
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let io = |e| AppError::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    out.write_all(MAGIC).map_err(io)?;
    out.write_all(&(json.len() as u64).to_le_bytes()).map_err(io)?;
    out.write_all(&json).map_err(io)?;
    for (_, m) in blocks {
        for x in m.as_slice() {
            out.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

pub fn read_blocks(path: &Path) -> AppResult<(Header, Vec<Mat>)> {
    let io = |e| AppError::io(path, e);
    let mut input = BufReader::new(File::open(path).map_err(io)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(AppError::format(path, "not a block file"));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len).map_err(io)?;
    let len = u64::from_le_bytes(len) as usize;
    let mut json = vec![0u8; len];
    input.read_exact(&mut json).map_err(io)?;
    let header: Header =
        serde_json::from_slice(&json).map_err(|e| AppError::format(path, format!("bad header: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(AppError::format(path, format!("unsupported version {}", header.version)));
    }
    let mut blocks = Vec::with_capacity(header.blocks.len());
    let mut buf = [0u8; 8];
    for info in &header.blocks {
        let mut data = Vec::with_capacity(info.rows * info.cols);
        for _ in 0..info.rows * info.cols {
            input.read_exact(&mut buf).map_err(io)?;
            data.push(f64::from_le_bytes(buf));
        }
        blocks.push(Mat::from_col_major(info.rows, info.cols, data));
    }
    Ok((header, blocks))
}

const INSTANCE_KIND: &str = "synthetic-instance";

#[derive(Serialize, Deserialize)]
struct InstanceMeta {
    n: usize,
    r: usize,
    rho: f64,
    seed: u64,
    tail_style: String,
}

fn style_name(style: TailStyle) -> &'static str {
    match style {
        TailStyle::IdentityResidual => "identity_residual",
        TailStyle::FullHaar => "full_haar",
    }
}

/// Stores `V`, the tail basis `W` and the eigenvalues; `A` is rebuilt on
/// load.
pub fn write_instance(path: &Path, inst: &SyntheticInstance) -> AppResult<()> {
    let spec = inst.spec;
    let meta = InstanceMeta { n: spec.n, r: spec.r, rho: spec.rho, seed: spec.seed, tail_style: style_name(spec.tail_style).into() };
    let values = Mat::from_column(inst.eigenvalues());
    write_blocks(
        path,
        INSTANCE_KIND,
        serde_json::to_value(meta).expect("meta serializes"),
        &[("v", inst.v()), ("w", inst.w()), ("eigenvalues", &values)],
    )
}

pub fn read_instance(path: &Path) -> AppResult<SyntheticInstance> {
    let (header, mut blocks) = read_blocks(path)?;
    if header.kind != INSTANCE_KIND || blocks.len() != 3 {
        return Err(AppError::format(path, "not a synthetic instance"));
    }
    let meta: InstanceMeta =
        serde_json::from_value(header.meta).map_err(|e| AppError::format(path, format!("bad metadata: {e}")))?;
    let tail_style = match meta.tail_style.as_str() {
        "identity_residual" => TailStyle::IdentityResidual,
        "full_haar" => TailStyle::FullHaar,
        other => return Err(AppError::format(path, format!("unknown tail style {other}"))),
    };
    let spec = SyntheticSpec { n: meta.n, r: meta.r, rho: meta.rho, seed: meta.seed, tail_style };
    let values = blocks.pop().expect("three blocks").into_vec();
    let w = blocks.pop().expect("three blocks");
    let v = blocks.pop().expect("three blocks");
    Ok(SyntheticInstance::from_parts(spec, v, w, values)?)
}
