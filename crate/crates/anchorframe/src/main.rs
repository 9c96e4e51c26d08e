use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anchorframe::commands::{cmd_eval, cmd_loss, cmd_select, cmd_synth, parse_bbox_override, SelectRequest};
use anchorframe::config::{offline_forced, CliConfig};
use anchorframe::error::{AppError, Result};
use anchorframe_core::synth::canonical_suite;
use anchorframe_core::{KeywordTable, UserBoxOverride};
use clap::{Parser, Subcommand};
use serde::Serialize;

/// Occlusion-aware keyframe selection and mask-tube propagation.
///
/// Machine-readable results go to stdout as one JSON object per line;
/// summaries and diagnostics go to stderr. Exit codes: 0 success,
/// 2 usage or input error, 3 no target found, 4 service failure.
#[derive(Debug, Parser)]
#[command(name = "anchorframe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a synthetic scene: frames, truth.json and a copy of scene.json.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick the anchor frame for an edit prompt and propagate its box to every frame.
    Select {
        /// Directory of frame_%06d.ppm/pgm files.
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        prompt: String,
        /// JSON config; missing keys keep their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// User box as t:x1,y1,x2,y2.
        #[arg(long, value_parser = parse_bbox_override)]
        bbox: Option<UserBoxOverride>,
        /// Keyword table replacing the bundled one (category<TAB>word lines).
        #[arg(long)]
        keywords: Option<PathBuf>,
        #[arg(long, default_value = "anchorframe-out")]
        out: PathBuf,
    },
    /// Score a result directory against scene ground truth.
    Eval {
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Frames with lower target visibility are left out of the tube IoU.
        #[arg(long, default_value_t = 0.8)]
        visibility_floor: f64,
    },
    /// Region-weighted squared error between AFT1 tensor files.
    Loss {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        gamma: f64,
    },
    /// Write the built-in benchmark scene specs as JSON files.
    Suite {
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    let line = serde_json::to_string(value).map_err(|e| AppError::json("<stdout>", e))?;
    println!("{line}");
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<CliConfig> {
    match path {
        Some(p) => CliConfig::load(p),
        None => Ok(CliConfig::default()),
    }
}

fn load_keywords(path: Option<&Path>) -> Result<KeywordTable> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| AppError::io(p, e))?;
            Ok(KeywordTable::parse(&text)?)
        }
        None => Ok(KeywordTable::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { spec, out } => {
            let report = cmd_synth(&spec, &out)?;
            eprintln!("wrote {} frames of {:?} to {}", report.frames, report.scene, out.display());
            emit(&report)
        }
        Command::Select { frames, prompt, config, bbox, keywords, out } => {
            let config = load_config(config.as_deref())?;
            let keywords = load_keywords(keywords.as_deref())?;
            if offline_forced() {
                log::info!("offline mode: using mock backends");
            }
            let req = SelectRequest {
                frames: &frames,
                prompt: &prompt,
                config: &config,
                user_box: bbox.as_ref(),
                keywords: &keywords,
            };
            let (report, _) = cmd_select(&req, &out)?;
            eprintln!(
                "keyframe {} (s_final {:.4}), {} files written to {}",
                report.k_star,
                report.s_final,
                report.files,
                out.display()
            );
            emit(&report)
        }
        Command::Eval { result, truth, visibility_floor } => {
            let report = cmd_eval(&result, &truth, visibility_floor)?;
            match report.mean_iou {
                Some(m) => eprintln!(
                    "keyframe {}: visibility {:.3}, tube IoU {m:.3} over {} frames",
                    report.k_star, report.kf_visibility, report.frames_evaluated
                ),
                None => eprintln!(
                    "keyframe {}: visibility {:.3}, no frames above the visibility floor",
                    report.k_star, report.kf_visibility
                ),
            }
            emit(&report)
        }
        Command::Loss { pred, target, mask, gamma } => {
            let loss = cmd_loss(&pred, &target, &mask, gamma)?;
            emit(&serde_json::json!({ "loss": loss }))
        }
        Command::Suite { out } => {
            std::fs::create_dir_all(&out).map_err(|e| AppError::io(&out, e))?;
            for spec in canonical_suite() {
                let path = out.join(format!("{}.json", spec.name));
                let mut bytes = serde_json::to_vec_pretty(&spec).map_err(|e| AppError::json(&path, e))?;
                bytes.push(b'\n');
                std::fs::write(&path, bytes).map_err(|e| AppError::io(&path, e))?;
                emit(&serde_json::json!({ "scene": spec.name, "path": path }))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
