//! Scene directories: frames, `truth.json` and a copy of `scene.json`.

use std::fs;
use std::path::Path;

use anchorframe_core::synth::{generate_scene, GroundTruth, SceneSpec};

use crate::error::{AppError, Result};
use crate::frames::{frame_file_name, write_frames_dir};

pub const SCENE_FILE: &str = "scene.json";
pub const TRUTH_FILE: &str = "truth.json";

pub fn read_scene_spec(path: &Path) -> Result<SceneSpec> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let spec: SceneSpec = serde_json::from_str(&text).map_err(|e| AppError::json(path, e))?;
    spec.validate()?;
    Ok(spec)
}

pub fn read_truth(path: &Path) -> Result<GroundTruth> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::json(path, e))
}

fn json_bytes<T: serde::Serialize>(value: &T, name: &str) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| AppError::json(name, e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Render `spec` and write it to `out`.
///
/// Everything is rendered before the first write, and files are staged in a
/// sibling temporary directory, so a failure leaves `out` untouched.
pub fn write_scene_dir(spec: &SceneSpec, out: &Path) -> Result<GroundTruth> {
    let (video, truth) = generate_scene(spec)?;
    let scene_json = json_bytes(spec, SCENE_FILE)?;
    let truth_json = json_bytes(&truth, TRUTH_FILE)?;

    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(parent).map_err(|e| AppError::io(parent, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".anchorframe-synth-")
        .tempdir_in(parent)
        .map_err(|e| AppError::io(parent, e))?;
    write_frames_dir(&video, staging.path())?;
    for (name, bytes) in [(SCENE_FILE, &scene_json), (TRUTH_FILE, &truth_json)] {
        let p = staging.path().join(name);
        fs::write(&p, bytes).map_err(|e| AppError::io(&p, e))?;
    }

    if !out.exists() {
        let staged = staging.keep();
        fs::rename(&staged, out).map_err(|e| AppError::io(out, e))?;
        return Ok(truth);
    }
    if !out.is_dir() {
        return Err(AppError::Usage(format!("{} exists and is not a directory", out.display())));
    }
    let mut names: Vec<String> = (0..video.len()).map(|i| frame_file_name(i, video.frame(i).channels())).collect();
    names.extend([SCENE_FILE.to_owned(), TRUTH_FILE.to_owned()]);
    for name in names {
        let (from, to) = (staging.path().join(&name), out.join(&name));
        fs::rename(&from, &to).map_err(|e| AppError::io(&to, e))?;
    }
    Ok(truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use anchorframe_core::synth::canonical_suite;

    fn small_spec() -> SceneSpec {
        let mut spec = canonical_suite().remove(0);
        spec.num_frames = 4;
        spec
    }

    #[test]
    fn writes_frames_truth_and_spec() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("scene");
        let truth = write_scene_dir(&small_spec(), &out).unwrap();
        assert_eq!(truth.len(), 4);
        assert_eq!(read_truth(&out.join(TRUTH_FILE)).unwrap(), truth);
        assert_eq!(read_scene_spec(&out.join(SCENE_FILE)).unwrap(), small_spec());
        assert_eq!(crate::frames::read_frames_dir(&out).unwrap().len(), 4);
        let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }

    #[test]
    fn rewriting_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        write_scene_dir(&small_spec(), &a).unwrap();
        write_scene_dir(&small_spec(), &b).unwrap();
        write_scene_dir(&small_spec(), &b).unwrap();
        let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert_eq!(names.len(), 6);
        for n in names {
            assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap());
        }
    }

    #[test]
    fn invalid_spec_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = small_spec();
        spec.occluders.push(anchorframe_core::synth::OccluderSpec {
            width: 10,
            height: 10,
            x: 0.0,
            y: 0.0,
            texture: anchorframe_core::synth::Texture::Solid { color: [0, 0, 0] },
            path: anchorframe_core::synth::MotionPath::Static,
            active: [2, 9],
        });
        assert!(write_scene_dir(&spec, &dir.path().join("out")).is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
