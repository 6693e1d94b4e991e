//! JSON files for event chains.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use esec_core::event_chain::{
    build_esec, Esec, EsecColumn, EsecConfig, Role, RoleBinding, RoleMap, Sec, SecColumn,
    PAIR_LABELS,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene_io::read_scene;

const ROLE_ORDER: [Role; 5] = [Role::Hand, Role::Ground, Role::One, Role::Two, Role::Three];

#[derive(Debug, Serialize, Deserialize)]
struct EsecFile {
    label: Option<String>,
    t_start: f64,
    t_end: f64,
    /// Bound roles keyed by symbol (H, G, 1, 2, 3).
    roles: BTreeMap<String, RoleBinding>,
    pairs: Vec<String>,
    columns: Vec<EsecColumn>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SecFile {
    label: Option<String>,
    t_start: f64,
    t_end: f64,
    pairs: Vec<String>,
    columns: Vec<SecColumn>,
}

fn check_pairs(pairs: &[String]) -> Result<()> {
    if pairs.iter().map(String::as_str).ne(PAIR_LABELS) {
        return Err(Error::Format(format!(
            "pairs must be {PAIR_LABELS:?}, got {pairs:?}"
        )));
    }
    Ok(())
}

fn pair_list() -> Vec<String> {
    PAIR_LABELS.iter().map(|s| s.to_string()).collect()
}

pub fn esec_to_json(esec: &Esec) -> String {
    let roles = ROLE_ORDER
        .iter()
        .filter_map(|&r| Some((r.symbol().to_string(), esec.roles.binding(r)?.clone())))
        .collect();
    let file = EsecFile {
        label: esec.label.clone(),
        t_start: esec.t_start,
        t_end: esec.t_end,
        roles,
        pairs: pair_list(),
        columns: esec.columns.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("ESEC serializes");
    s.push('\n');
    s
}

pub fn esec_from_json(text: &str) -> Result<Esec> {
    let file: EsecFile = serde_json::from_str(text)?;
    check_pairs(&file.pairs)?;
    if file.columns.is_empty() {
        return Err(esec_core::Error::EmptyChain.into());
    }
    let mut roles = RoleMap::default();
    for (sym, binding) in file.roles {
        match sym.as_str() {
            "H" => roles.hand = Some(binding),
            "G" => roles.ground = Some(binding),
            "1" => roles.objects[0] = Some(binding),
            "2" => roles.objects[1] = Some(binding),
            "3" => roles.objects[2] = Some(binding),
            other => return Err(Error::Format(format!("unknown role {other:?}"))),
        }
    }
    Ok(Esec {
        columns: file.columns,
        roles,
        label: file.label,
        t_start: file.t_start,
        t_end: file.t_end,
    })
}

pub fn sec_to_json(sec: &Sec) -> String {
    let file = SecFile {
        label: sec.label.clone(),
        t_start: sec.t_start,
        t_end: sec.t_end,
        pairs: pair_list(),
        columns: sec.columns.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("SEC serializes");
    s.push('\n');
    s
}

pub fn sec_from_json(text: &str) -> Result<Sec> {
    let file: SecFile = serde_json::from_str(text)?;
    check_pairs(&file.pairs)?;
    if file.columns.is_empty() {
        return Err(esec_core::Error::EmptyChain.into());
    }
    Ok(Sec {
        columns: file.columns,
        label: file.label,
        t_start: file.t_start,
        t_end: file.t_end,
    })
}

pub fn write_esec(path: &Path, esec: &Esec) -> Result<()> {
    fs::write(path, esec_to_json(esec)).map_err(|e| Error::io(path, e))
}

pub fn read_esec(path: &Path) -> Result<Esec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    esec_from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// True for scene files (`.jsonl`), false for chain files.
pub fn is_scene_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl")
}

/// Read an ESEC file, or extract the ESEC of a scene file.
pub fn load_esec(path: &Path, cfg: &EsecConfig) -> Result<Esec> {
    if is_scene_path(path) {
        Ok(build_esec(&read_scene(path)?, cfg))
    } else {
        read_esec(path)
    }
}
