use std::collections::HashMap;

use gaussgrasp::extraction::{extract_top_k, sample_support_grasp, smooth_quality, DecodedGrasp};
use gaussgrasp::ground_truth::{generate_maps, GraspScene};
use gaussgrasp::io::{
    encode_mask_png, render_heatmap, serialize_annotations, write_tensor, AnnotationRecord, Colormap,
};
use gaussgrasp::loss::{loss, loss_gradient_with, LossBreakdown, LossConfig, LossKind, Reduction};
use gaussgrasp::metrics::{evaluate_dataset, REPORT_VERSION};
use gaussgrasp::oracle::evaluate_oracle;
use gaussgrasp::stack::{Channel, GraspMapStack};
use gaussgrasp::synth::{synth_scene, SynthConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use crate::args::{
    EvalArgs, ExtractArgs, GenArgs, KindArg, LossArgs, OracleArgs, ReductionArg, Strategy, SynthArgs, VizArgs,
};
use crate::config::FileConfig;
use crate::data::{self, collect_all};
use crate::error::{CliError, CliResult};

/// Output file names with their contents.
type NamedFiles = Vec<(String, Vec<u8>)>;

fn colormap(name: &str) -> CliResult<Colormap> {
    Ok(name.parse::<Colormap>()?)
}

fn heatmaps(stack: &GraspMapStack<f32>, id: &str, channel: Channel, cmap: Colormap) -> CliResult<NamedFiles> {
    (0..stack.bins)
        .map(|b| {
            let png = render_heatmap(stack.plane(channel, b), stack.rows, stack.cols, channel.range(), cmap)?;
            Ok((format!("{id}.{}.b{b}.png", channel.name()), png))
        })
        .collect()
}

pub fn gen(args: &GenArgs, file: &FileConfig, pool: &ThreadPool) -> CliResult<()> {
    let cfg = file.map_config(&args.map)?;
    let cmap = colormap(&args.colormap)?;
    let out = file.out(args.out.as_deref())?;
    let scenes = data::load_scenes(&args.scenes, pool)?;

    let rendered: Vec<CliResult<NamedFiles>> = pool.install(|| {
        scenes
            .par_iter()
            .map(|scene| {
                let stack = generate_maps(scene, &cfg)?;
                let mut files = vec![(format!("{}.gmap", scene.scene_id), write_tensor(&stack)?)];
                if args.heatmaps {
                    files.extend(heatmaps(&stack, &scene.scene_id, Channel::Quality, cmap)?);
                }
                Ok(files)
            })
            .collect()
    });
    let rendered = collect_all(rendered)?;

    data::create_dir(&out)?;
    for (name, bytes) in rendered.iter().flatten() {
        data::write(&out.join(name), bytes)?;
    }
    eprintln!("gen: {} scenes -> {}", scenes.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct ExtractedGrasp {
    x: f64,
    y: f64,
    theta_deg: f64,
    opening: f64,
    jaw_size: f64,
    quality: f64,
    bin: usize,
    row: usize,
    col: usize,
}

impl From<&DecodedGrasp> for ExtractedGrasp {
    fn from(d: &DecodedGrasp) -> Self {
        let rec = AnnotationRecord::from_rect(&d.rect);
        Self {
            x: rec.x,
            y: rec.y,
            theta_deg: rec.theta,
            opening: rec.opening,
            jaw_size: rec.jaw_size,
            quality: d.quality,
            bin: d.bin,
            row: d.row,
            col: d.col,
        }
    }
}

#[derive(Serialize)]
struct ExtractScene {
    scene_id: String,
    grasps: Vec<ExtractedGrasp>,
}

#[derive(Serialize)]
struct ExtractReport {
    report_version: u32,
    strategy: &'static str,
    w_max: f64,
    seed: Option<u64>,
    smooth_sigma: f64,
    scenes: Vec<ExtractScene>,
}

pub fn extract(args: &ExtractArgs, file: &FileConfig, pool: &ThreadPool) -> CliResult<()> {
    let w_max = file.w_max(args.wmax);
    if !(w_max.is_finite() && w_max > 0.0) {
        return Err(CliError::Invalid(format!("--wmax must be > 0, got {w_max}")));
    }
    if !(args.smooth_sigma >= 0.0 && args.smooth_sigma.is_finite()) {
        return Err(CliError::Invalid(format!(
            "--smooth-sigma must be >= 0, got {}",
            args.smooth_sigma
        )));
    }
    let seed = file.seed(args.seed);
    let out = file.out(args.out.as_deref())?;
    let maps = data::files_with_ext(&args.maps, "gmap")?;

    let decoded: Vec<CliResult<(String, Vec<DecodedGrasp>)>> = pool.install(|| {
        maps.par_iter()
            .enumerate()
            .map(|(index, (id, path))| {
                let mut stack = data::load_tensor(path)?;
                if args.smooth_sigma > 0.0 {
                    stack = smooth_quality(&stack, args.smooth_sigma);
                }
                let grasps = match args.strategy {
                    Strategy::Argmax => extract_top_k(&stack, w_max, args.top_k, args.min_separation),
                    Strategy::RandomSupport => {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(index as u64);
                        sample_support_grasp(&stack, w_max, &mut rng).map(|g| vec![g])
                    }
                };
                match grasps {
                    Ok(g) if g.is_empty() => Err(CliError::Invalid(format!("{}: no grasp found", path.display()))),
                    Ok(g) => Ok((id.clone(), g)),
                    Err(e) => Err(CliError::Invalid(format!("{}: {e}", path.display()))),
                }
            })
            .collect()
    });
    let decoded = collect_all(decoded)?;

    data::create_dir(&out)?;
    for (id, grasps) in &decoded {
        let rects: Vec<_> = grasps.iter().map(|g| g.rect).collect();
        data::write(&out.join(format!("{id}.txt")), serialize_annotations(&rects))?;
    }
    let report = ExtractReport {
        report_version: REPORT_VERSION,
        strategy: match args.strategy {
            Strategy::Argmax => "argmax",
            Strategy::RandomSupport => "random-support",
        },
        w_max,
        seed: (args.strategy == Strategy::RandomSupport).then_some(seed),
        smooth_sigma: args.smooth_sigma,
        scenes: decoded
            .iter()
            .map(|(id, g)| ExtractScene {
                scene_id: id.clone(),
                grasps: g.iter().map(ExtractedGrasp::from).collect(),
            })
            .collect(),
    };
    data::write_json(&out.join("extract.json"), &report)?;
    eprintln!("extract: {} scenes -> {}", decoded.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct SceneLoss {
    scene_id: String,
    #[serde(flatten)]
    loss: LossBreakdown,
}

#[derive(Serialize)]
struct LossReport {
    report_version: u32,
    config: LossConfig,
    scene_count: usize,
    mean_total: f64,
    per_scene: Vec<SceneLoss>,
}

pub fn loss_cmd(args: &LossArgs, file: &FileConfig, pool: &ThreadPool) -> CliResult<()> {
    let cfg = LossConfig {
        kind: match args.kind {
            KindArg::Mse => LossKind::Mse,
            KindArg::SmoothL1 => LossKind::SmoothL1,
        },
        positional: args.positional,
        reduction: match args.reduction {
            ReductionArg::Mean => Reduction::Mean,
            ReductionArg::Sum => Reduction::Sum,
        },
    };
    let out = file.out(args.out.as_deref())?;
    let preds = data::files_with_ext(&args.pred, "gmap")?;
    if preds.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: no prediction tensors",
            args.pred.display()
        )));
    }

    type Computed = (SceneLoss, Option<Vec<u8>>);
    let computed: Vec<CliResult<Computed>> = pool.install(|| {
        preds
            .par_iter()
            .map(|(id, path)| {
                let gt_path = args.gt.join(format!("{id}.gmap"));
                if !gt_path.is_file() {
                    return Err(CliError::Invalid(format!(
                        "{}: no ground truth for `{id}`",
                        args.gt.display()
                    )));
                }
                let pred = data::load_tensor(path)?;
                let gt = data::load_tensor(&gt_path)?;
                let shaped = |e: gaussgrasp::Error| CliError::Invalid(format!("{id}: {e}"));
                let l = loss(&pred, &gt, &cfg).map_err(shaped)?;
                let grad = if args.write_grad {
                    Some(write_tensor(&loss_gradient_with(&pred, &gt, &cfg).map_err(shaped)?)?)
                } else {
                    None
                };
                Ok((
                    SceneLoss {
                        scene_id: id.clone(),
                        loss: l,
                    },
                    grad,
                ))
            })
            .collect()
    });
    let computed = collect_all(computed)?;

    data::create_dir(&out)?;
    for (scene, grad) in &computed {
        if let Some(bytes) = grad {
            data::write(&out.join(format!("{}.grad.gmap", scene.scene_id)), bytes)?;
        }
    }
    let n = computed.len();
    let per_scene: Vec<SceneLoss> = computed.into_iter().map(|(s, _)| s).collect();
    let report = LossReport {
        report_version: REPORT_VERSION,
        config: cfg,
        scene_count: n,
        mean_total: per_scene.iter().map(|s| s.loss.total).sum::<f64>() / n as f64,
        per_scene,
    };
    data::write_json(&out.join("loss.json"), &report)?;
    println!("mean loss over {n} scenes: {}", report.mean_total);
    Ok(())
}

pub fn eval(args: &EvalArgs, file: &FileConfig, pool: &ThreadPool) -> CliResult<()> {
    let thresholds = file.thresholds(args.thresholds.as_deref())?;
    let out = file.out(args.out.as_deref())?;
    let scenes = data::load_scenes(&args.scenes, pool)?;
    let preds = data::load_predictions(&args.pred)?;
    let report = evaluate_chunks(&scenes, &preds, &thresholds, pool)?;

    data::create_dir(&out)?;
    data::write_json(&out.join("report.json"), &report)?;
    let table = report.to_table();
    data::write(&out.join("report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

/// Evaluates scenes in parallel, then merges the per-scene rows in id order.
fn evaluate_chunks(
    scenes: &[GraspScene],
    preds: &HashMap<String, gaussgrasp::GraspRectangle>,
    thresholds: &[f64],
    pool: &ThreadPool,
) -> CliResult<gaussgrasp::EvalReport> {
    let parts: Vec<CliResult<gaussgrasp::EvalReport>> = pool.install(|| {
        scenes
            .par_iter()
            .map(|s| Ok(evaluate_dataset(preds, std::slice::from_ref(s), thresholds)?))
            .collect()
    });
    let mut rows: Vec<_> = collect_all(parts)?.into_iter().flat_map(|r| r.per_scene).collect();
    rows.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
    if let Some(w) = rows.windows(2).find(|w| w[0].scene_id == w[1].scene_id) {
        return Err(gaussgrasp::Error::DuplicateScene(w[0].scene_id.clone()).into());
    }
    let thresholds = gaussgrasp::metrics::normalize_thresholds(thresholds)?;
    Ok(gaussgrasp::metrics::aggregate(rows, thresholds))
}

pub fn oracle(args: &OracleArgs, file: &FileConfig, pool: &ThreadPool) -> CliResult<()> {
    let gp = file.gripper(&args.gripper)?;
    let out = file.out(args.out.as_deref())?;
    let scenes = data::load_scenes(&args.scenes, pool)?;
    data::require_masks(&scenes)?;
    let preds = data::load_predictions(&args.pred)?;

    let parts: Vec<CliResult<gaussgrasp::oracle::OracleReport>> = pool.install(|| {
        scenes
            .par_iter()
            .map(|s| Ok(evaluate_oracle(std::slice::from_ref(s), &preds, &gp)?))
            .collect()
    });
    let rows = collect_all(parts)?.into_iter().flat_map(|r| r.per_scene).collect();
    let report = gaussgrasp::oracle::OracleReport::from_outcomes(rows, gp);

    data::create_dir(&out)?;
    data::write_json(&out.join("oracle.json"), &report)?;
    println!(
        "success rate {:.4} over {} scenes (success {}, jaw_collision {}, miss {}, out_of_bounds {})",
        report.success_rate,
        report.scene_count,
        report.counts.success,
        report.counts.jaw_collision,
        report.counts.miss,
        report.counts.out_of_bounds
    );
    Ok(())
}

pub fn synth(args: &SynthArgs, file: &FileConfig, pool: &ThreadPool) -> CliResult<()> {
    if args.size < 64 {
        return Err(CliError::Invalid(format!("--size must be >= 64, got {}", args.size)));
    }
    let cfg = SynthConfig {
        size: args.size,
        gripper: file.gripper(&args.gripper)?,
    };
    let seed = file.seed(args.seed);
    let out = file.out(args.out.as_deref())?;

    let scenes: Vec<CliResult<(String, String, Vec<u8>)>> = pool.install(|| {
        (0..args.n as u64)
            .into_par_iter()
            .map(|i| {
                let scene = synth_scene(seed, i, &cfg);
                let mask = scene.mask.as_ref().expect("synthetic scenes carry a mask");
                Ok((
                    scene.scene_id.clone(),
                    serialize_annotations(&scene.grasps),
                    encode_mask_png(mask)?,
                ))
            })
            .collect()
    });
    let scenes = collect_all(scenes)?;

    data::create_dir(&out)?;
    for (id, grasps, mask) in &scenes {
        let dir = out.join(id);
        data::create_dir(&dir)?;
        data::write(&dir.join(data::ANNOTATIONS), grasps)?;
        data::write(&dir.join(data::MASK), mask)?;
    }
    eprintln!("synth: {} scenes (seed {seed}) -> {}", scenes.len(), out.display());
    Ok(())
}

pub fn viz(args: &VizArgs, file: &FileConfig, pool: &ThreadPool) -> CliResult<()> {
    let channels: Vec<Channel> = if args.channel == "all" {
        Channel::ALL.to_vec()
    } else {
        vec![args.channel.parse::<Channel>()?]
    };
    let cmap = colormap(&args.colormap)?;
    let out = file.out(args.out.as_deref())?;
    let maps = data::files_with_ext(&args.maps, "gmap")?;

    let rendered: Vec<CliResult<NamedFiles>> = pool.install(|| {
        maps.par_iter()
            .map(|(id, path)| {
                let stack = data::load_tensor(path)?;
                let mut files = Vec::new();
                for &c in &channels {
                    files.extend(heatmaps(&stack, id, c, cmap)?);
                }
                Ok(files)
            })
            .collect()
    });
    let rendered = collect_all(rendered)?;

    data::create_dir(&out)?;
    for (name, bytes) in rendered.iter().flatten() {
        data::write(&out.join(name), bytes)?;
    }
    eprintln!("viz: {} tensors -> {}", maps.len(), out.display());
    Ok(())
}
