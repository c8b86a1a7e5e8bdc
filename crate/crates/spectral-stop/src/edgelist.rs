//! SNAP-style edge lists: one whitespace-separated pair of integer node ids
//! per line, `#` starts a comment line.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use spectral_stop_core::netgraph::{BuildStats, GraphData};

use crate::error::{AppError, AppResult};

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: GraphData,
    pub stats: BuildStats,
    /// Edge lines read, before dropping self-loops and duplicates.
    pub raw_edges: usize,
}

pub fn load_edge_list(path: impl AsRef<Path>) -> AppResult<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    read_edge_list(BufReader::with_capacity(1 << 20, file), path)
}

/// Parses from any reader; `path` only labels error messages.
pub fn read_edge_list<R: BufRead>(mut reader: R, path: &Path) -> AppResult<LoadedGraph> {
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    let mut line = String::new();
    let mut number = 0;
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(|e| AppError::io(path, e))?;
        if read == 0 {
            break;
        }
        number += 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut fields = body.split_ascii_whitespace();
        let parse = |field: Option<&str>| -> AppResult<u64> {
            let text = field.ok_or_else(|| parse_error(path, number, "expected two node ids"))?;
            text.parse::<u64>()
                .map_err(|_| parse_error(path, number, &format!("invalid node id {text:?}")))
        };
        let u = parse(fields.next())?;
        let v = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(parse_error(path, number, "expected exactly two node ids"));
        }
        pairs.push((u, v));
    }
    if pairs.is_empty() {
        return Err(AppError::format(path, "edge list contains no edges"));
    }
    let raw_edges = pairs.len();
    let (graph, stats) = GraphData::from_labeled_edges(&pairs)?;
    Ok(LoadedGraph { graph, stats, raw_edges })
}

fn parse_error(path: &Path, line: usize, message: &str) -> AppError {
    AppError::Parse { path: path.to_path_buf(), line, message: message.to_string() }
}

/// Dataset name used in output file names and records: the file name up to
/// its first dot.
pub fn dataset_name(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}
