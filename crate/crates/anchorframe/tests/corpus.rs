use std::fs;
use std::path::Path;

use anchorframe::commands::{cmd_eval, cmd_select, synth_to_dir, SelectRequest};
use anchorframe::CliConfig;
use anchorframe_core::synth::{attribute_window_scene, canonical_suite, SceneSpec};
use anchorframe_core::KeywordTable;

#[test]
fn shipped_scene_files_match_the_builtin_suite() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes");
    let suite = canonical_suite();
    assert_eq!(fs::read_dir(&dir).unwrap().count(), suite.len());
    for spec in suite {
        let path = dir.join(format!("{}.json", spec.name));
        let shipped: SceneSpec = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
        assert_eq!(shipped, spec, "{}", path.display());
    }
}

#[test]
fn attribute_window_keyframe_lands_inside_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    synth_to_dir(&attribute_window_scene(), &frames).unwrap();
    let config = CliConfig::default();
    let req = SelectRequest {
        frames: &frames,
        prompt: "make the toy red",
        config: &config,
        user_box: None,
        keywords: &KeywordTable::default(),
    };
    let out = dir.path().join("out");
    let (report, manifest) = cmd_select(&req, &out).unwrap();
    assert!((30..=50).contains(&report.k_star), "k* = {}", report.k_star);
    assert_eq!(manifest.files.len(), 81 + 2);

    let eval = cmd_eval(&out, &frames.join("truth.json"), 0.8).unwrap();
    assert!(eval.kf_visibility >= 0.95);
    assert_eq!(eval.kf_attr_visibility, 1.0);
    assert!(eval.is_complete);
}
