//! Reference eigenpairs iterated to `‖Av − λv‖ ≤ 1e-13 |λ|`, optionally
//! cached on disk.

use std::path::Path;

use serde::{Deserialize, Serialize};
use spectral_stop_core::subspace::{run, StopMode, StoppingConfig};
use spectral_stop_core::{Mat, Result as CoreResult, SymOperator};

use crate::blocks::{read_blocks, write_blocks};
use crate::error::{AppError, AppResult};

pub const ORACLE_TOL: f64 = 1e-13;
pub const ORACLE_MAX_ITERS: usize = 200_000;
/// Extra columns carried by oracle runs.
pub const ORACLE_P: usize = 8;

const ORACLE_KIND: &str = "oracle-basis";

#[derive(Clone, Debug)]
pub struct OracleBasis {
    /// Leading `r` sign-fixed Ritz vectors.
    pub vectors: Mat,
    pub values: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration budget ran out first.
    pub converged: bool,
}

#[derive(Serialize, Deserialize)]
struct OracleMeta {
    key: String,
    values: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Leading `r` eigenpairs of `op` starting from `q0` (width `r + p`).
pub fn compute_oracle<O: SymOperator + ?Sized>(op: &O, r: usize, q0: Mat) -> CoreResult<OracleBasis> {
    let p = q0.ncols().saturating_sub(r);
    let config = StoppingConfig {
        p,
        max_iters: ORACLE_MAX_ITERS,
        sign_fix: true,
        ..StoppingConfig::new(r, ORACLE_TOL, StopMode::NaiveL2)
    };
    let outcome = run(op, &config, q0)?;
    Ok(OracleBasis {
        vectors: outcome.ritz_vectors(),
        values: outcome.ritz_values(),
        iterations: outcome.t_stop,
        converged: !outcome.exhausted,
    })
}

/// Loads `<dir>/<key>.oracle` when present, otherwise computes and stores it.
/// Without a directory the basis is always computed.
pub fn cached_oracle<F>(dir: Option<&Path>, key: &str, compute: F) -> AppResult<OracleBasis>
where
    F: FnOnce() -> CoreResult<OracleBasis>,
{
    let Some(dir) = dir else {
        return Ok(compute()?);
    };
    let path = dir.join(format!("{key}.oracle"));
    if path.exists() {
        let (header, mut blocks) = read_blocks(&path)?;
        let meta: OracleMeta = serde_json::from_value(header.meta)
            .map_err(|e| AppError::format(&path, format!("bad oracle metadata: {e}")))?;
        if header.kind != ORACLE_KIND || meta.key != key || blocks.len() != 1 {
            return Err(AppError::format(&path, "cache entry does not match the request"));
        }
        return Ok(OracleBasis {
            vectors: blocks.pop().expect("one block"),
            values: meta.values,
            iterations: meta.iterations,
            converged: meta.converged,
        });
    }
    let basis = compute()?;
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let meta = OracleMeta {
        key: key.to_string(),
        values: basis.values.clone(),
        iterations: basis.iterations,
        converged: basis.converged,
    };
    write_blocks(&path, ORACLE_KIND, serde_json::to_value(meta).expect("meta serializes"), &[("vectors", &basis.vectors)])?;
    Ok(basis)
}
