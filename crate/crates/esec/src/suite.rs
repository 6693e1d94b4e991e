//! Generated datasets on disk and input discovery.

use std::fs;
use std::path::{Path, PathBuf};

use esec_core::generator::{generate_scene, suite_params, Action, GenParams};
use esec_core::scene::SceneStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::pool;
use crate::scene_io::{read_scene, serialize_scene};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub label: String,
    pub variant: usize,
    pub seed: u64,
    pub distractors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub master_seed: u64,
    pub variants: usize,
    pub entries: Vec<ManifestEntry>,
}

/// Generate `variants` scenes per action in memory.
pub fn generate_suite_streams(
    actions: &[Action],
    variants: usize,
    master_seed: u64,
    jobs: usize,
) -> Result<Vec<(ManifestEntry, SceneStream)>> {
    if variants == 0 {
        return Err(Error::Format("variants must be at least 1".into()));
    }
    let params = suite_params(actions, variants, master_seed);
    let streams = pool(jobs)?.install(|| {
        params
            .par_iter()
            .map(generate_scene)
            .collect::<esec_core::error::Result<Vec<_>>>()
    })?;
    Ok(params
        .iter()
        .zip(streams)
        .enumerate()
        .map(|(k, (p, s))| (entry_for(p, k % variants), s))
        .collect())
}

fn entry_for(p: &GenParams, variant: usize) -> ManifestEntry {
    ManifestEntry {
        file: format!("{}_{variant:02}.jsonl", p.action.name()),
        label: p.action.name().to_string(),
        variant,
        seed: p.seed,
        distractors: p.distractors,
    }
}

/// Write a suite of scene files plus `manifest.json` into `dir`.
pub fn generate_suite(
    dir: &Path,
    actions: &[Action],
    variants: usize,
    master_seed: u64,
    jobs: usize,
) -> Result<Manifest> {
    let items = generate_suite_streams(actions, variants, master_seed, jobs)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (entry, stream) in &items {
        let path = dir.join(&entry.file);
        fs::write(&path, serialize_scene(stream)).map_err(|e| Error::io(&path, e))?;
    }
    let manifest = Manifest {
        master_seed,
        variants,
        entries: items.into_iter().map(|(e, _)| e).collect(),
    };
    let path = dir.join(MANIFEST);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Identifier of an input file: its name without `.jsonl`, `.esec.json`,
/// `.sec.json` or `.json`.
pub fn item_id(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    for ext in [".jsonl", ".esec.json", ".sec.json", ".json"] {
        if let Some(stem) = name.strip_suffix(ext) {
            return stem.to_string();
        }
    }
    name
}

fn is_input_file(path: &Path) -> bool {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
    match name {
        Some(n) => {
            (n.ends_with(".jsonl") || n.ends_with(".json"))
                && n != MANIFEST
                && !n.ends_with(".config.json")
                && n != "run_config.json"
        }
        None => false,
    }
}

/// Expand directories into their input files.
///
/// A directory with a manifest lists its files in manifest order; otherwise
/// its scene (`.jsonl`) files are taken in name order, or its chain files
/// when it has no scenes. Ids must be unique across all inputs.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(dir_inputs(p)?);
        } else {
            out.push(p.clone());
        }
    }
    let mut ids = std::collections::BTreeSet::new();
    for p in &out {
        if !ids.insert(item_id(p)) {
            return Err(Error::Format(format!(
                "duplicate input id {:?}",
                item_id(p)
            )));
        }
    }
    if out.is_empty() {
        return Err(Error::Format("no input files".into()));
    }
    Ok(out)
}

fn dir_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest = dir.join(MANIFEST);
    if manifest.is_file() {
        let text = fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
        let m: Manifest = serde_json::from_str(&text)?;
        return Ok(m.entries.iter().map(|e| dir.join(&e.file)).collect());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_input_file(p))
        .collect();
    files.sort();
    let scenes: Vec<PathBuf> = files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .cloned()
        .collect();
    Ok(if scenes.is_empty() { files } else { scenes })
}

/// Read every scene of a directory or file list.
pub fn load_scenes(paths: &[PathBuf], jobs: usize) -> Result<Vec<(String, SceneStream)>> {
    let files = collect_inputs(paths)?;
    pool(jobs)?.install(|| {
        files
            .par_iter()
            .map(|p| Ok((item_id(p), read_scene(p)?)))
            .collect()
    })
}
