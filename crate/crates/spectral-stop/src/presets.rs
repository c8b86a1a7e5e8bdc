//! Per-dataset clustering parameters: target cluster count `r` and the
//! regularization `rho`.

use serde::Deserialize;

const TABLE: &str = include_str!("../presets/clustering.json");

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct Preset {
    pub name: String,
    pub aliases: Vec<String>,
    pub r: usize,
    pub rho: f64,
}

#[derive(Deserialize)]
struct Table {
    datasets: Vec<Preset>,
}

pub fn presets() -> Vec<Preset> {
    serde_json::from_str::<Table>(TABLE).expect("bundled presets parse").datasets
}

/// Looks a dataset up by name, case-insensitively, also trying the part
/// before `.ungraph` and without a `com-` prefix.
pub fn find_preset(dataset: &str) -> Option<Preset> {
    let key = dataset.to_ascii_lowercase();
    let key = key.split(".ungraph").next().unwrap_or_default().to_string();
    let short = key.strip_prefix("com-").unwrap_or(&key).to_string();
    presets().into_iter().find(|p| {
        let name = p.name.to_ascii_lowercase();
        [&key, &short].iter().any(|k| **k == name || p.aliases.iter().any(|a| a == *k))
    })
}
