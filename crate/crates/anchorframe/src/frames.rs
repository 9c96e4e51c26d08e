//! Frame sequences on disk: `frame_%06d.ppm` or `.pgm`, contiguous from 0.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anchorframe_core::imageio::{read_netpbm, write_netpbm, Channels, Frame, VideoSequence};

use crate::error::{AppError, Result};

pub fn frame_file_name(index: usize, channels: Channels) -> String {
    let ext = match channels {
        Channels::Gray => "pgm",
        Channels::Rgb => "ppm",
    };
    format!("frame_{index:06}.{ext}")
}

fn parse_frame_name(name: &str) -> Option<usize> {
    let stem = name.strip_prefix("frame_")?;
    let (digits, ext) = stem.split_once('.')?;
    if !matches!(ext, "ppm" | "pgm") || digits.len() < 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Frame files in `dir`, ordered by index. Gaps and duplicate indices are errors.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| AppError::io(dir, e))?;
    let mut found = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| AppError::io(dir, e))?;
        let name = entry.file_name();
        let Some(index) = name.to_str().and_then(parse_frame_name) else { continue };
        if let Some(prev) = found.insert(index, entry.path()) {
            return Err(AppError::Usage(format!(
                "frame {index} appears twice: {} and {}",
                prev.display(),
                entry.path().display()
            )));
        }
    }
    if found.is_empty() {
        return Err(AppError::Usage(format!("no frame_NNNNNN.ppm/pgm files in {}", dir.display())));
    }
    if let Some((expected, (&got, _))) = found.iter().enumerate().find(|(i, (k, _))| *i != **k) {
        return Err(AppError::Usage(format!(
            "frames in {} are not contiguous: expected index {expected}, found {got}",
            dir.display()
        )));
    }
    Ok(found.into_values().collect())
}

pub fn read_frames_dir(dir: &Path) -> Result<VideoSequence> {
    let frames = list_frames(dir)?
        .into_iter()
        .map(|path| {
            let bytes = fs::read(&path).map_err(|e| AppError::io(&path, e))?;
            read_netpbm(&bytes).map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<Frame>>>()?;
    VideoSequence::new(frames).map_err(|e| AppError::Usage(format!("{}: {e}", dir.display())))
}

/// Write every frame into `dir`, creating it if needed. Returns the paths written.
pub fn write_frames_dir(video: &VideoSequence, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    video
        .frames()
        .iter()
        .enumerate()
        .map(|(i, frame)| {
            let path = dir.join(frame_file_name(i, frame.channels()));
            fs::write(&path, write_netpbm(frame)).map_err(|e| AppError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
