//! Result directories: `result.json`, `tube.json`, `masks/mask_%06d.pgm` and `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use anchorframe_core::imageio::write_netpbm;
use anchorframe_core::{BoundingBox, FrameIndex, KeyframeResult, MaskTube};
use serde::{Deserialize, Serialize};

use crate::config::CliConfig;
use crate::error::{AppError, Result};

pub const RESULT_FILE: &str = "result.json";
pub const TUBE_FILE: &str = "tube.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const MASK_DIR: &str = "masks";

#[derive(Serialize)]
struct ResultFile<'a> {
    #[serde(flatten)]
    result: &'a KeyframeResult,
    config: &'a CliConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeRecord {
    pub frame: FrameIndex,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub occluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeFile {
    pub frames: Vec<TubeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

pub fn mask_file_name(frame: FrameIndex) -> String {
    format!("mask_{frame:06}.pgm")
}

fn write_file(root: &Path, rel: &str, bytes: &[u8], manifest: &mut Vec<ManifestEntry>) -> Result<()> {
    let path = root.join(rel);
    fs::write(&path, bytes).map_err(|e| AppError::io(&path, e))?;
    manifest.push(ManifestEntry { path: rel.to_owned(), bytes: bytes.len() as u64 });
    Ok(())
}

fn to_json<T: Serialize>(value: &T, path: &Path) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| AppError::json(path, e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Write the selection, the tube and one mask per frame into `out_dir`.
pub fn write_result(result: &KeyframeResult, tube: &MaskTube, config: &CliConfig, out_dir: &Path) -> Result<Manifest> {
    let masks = out_dir.join(MASK_DIR);
    fs::create_dir_all(&masks).map_err(|e| AppError::io(&masks, e))?;
    let mut files = Vec::with_capacity(tube.len() + 2);

    let bytes = to_json(&ResultFile { result, config }, &out_dir.join(RESULT_FILE))?;
    write_file(out_dir, RESULT_FILE, &bytes, &mut files)?;

    let records = TubeFile {
        frames: tube
            .entries()
            .iter()
            .map(|e| TubeRecord { frame: e.frame, bbox: e.bbox, occluded: e.occluded })
            .collect(),
    };
    write_file(out_dir, TUBE_FILE, &to_json(&records, &out_dir.join(TUBE_FILE))?, &mut files)?;

    for e in tube.entries() {
        let rel = format!("{MASK_DIR}/{}", mask_file_name(e.frame));
        write_file(out_dir, &rel, &write_netpbm(&e.mask), &mut files)?;
    }

    let manifest = Manifest { files };
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, to_json(&manifest, &path)?).map_err(|e| AppError::io(&path, e))?;
    Ok(manifest)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::json(path, e))
}

pub fn read_result(dir: &Path) -> Result<KeyframeResult> {
    read_json(&dir.join(RESULT_FILE))
}

pub fn read_tube(dir: &Path) -> Result<TubeFile> {
    let tube: TubeFile = read_json(&dir.join(TUBE_FILE))?;
    if let Some((i, r)) = tube.frames.iter().enumerate().find(|(i, r)| r.frame != *i) {
        return Err(AppError::Usage(format!("{TUBE_FILE}: entry {i} is for frame {}", r.frame)));
    }
    Ok(tube)
}

pub fn manifest_paths(dir: &Path, manifest: &Manifest) -> Vec<PathBuf> {
    manifest.files.iter().map(|f| dir.join(&f.path)).collect()
}
