use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use darktrack::calibration::{estimate_homography, estimate_homography_robust, reprojection_rmse, RobustOptions};
use darktrack::cooperative::{
    classify_sequence, export_pseudo_labels, fuse_sequence, switch_sequence, BrightnessLabel, BrightnessParams,
};
use darktrack::ho3::{build_landmark_map, LandmarkFilter};
use darktrack::io as dio;
use darktrack::loop_closure::{format_ranking_report, rank_past_frames, topk_accuracy, RansacParams};
use darktrack::metrics::{evaluate, format_table, MetricsReport, DEFAULT_IOU_THRESH};
use darktrack::sim::{full_schedule, simulate, DetectionModels, SimConfig};
use darktrack::tracker::{run_sequence, TrackerParams};
use darktrack::TrackRecord;

/// RGB-thermal multi-person tracking toolkit.
#[derive(Debug, Parser)]
#[command(name = "darktrack", version, about)]
struct Cli {
    /// Worker threads for parallel stages (0 = all cores).
    #[arg(long, global = true, env = "DARKTRACK_THREADS", default_value_t = 0)]
    threads: usize,
    /// Seed for every random choice; subcommands fall back to their own
    /// default (0, or the simulator config's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Detections CSV to tracks CSV with the BYTE tracker.
    Track(TrackArgs),
    /// Correspondences to a homography file.
    Calibrate(CalibrateArgs),
    /// Teacher tracks warped into the student camera as pseudo-labels.
    PseudoLabel(PseudoLabelArgs),
    /// Score-max fusion of two track CSVs.
    Fuse(FuseArgs),
    /// Brightness-driven switching between an RGB and a thermal track CSV.
    Switch(SwitchArgs),
    /// Per-frame mean intensities to a brightness label file.
    Classify(ClassifyArgs),
    /// HO3 landmarks from masks and tracks.
    Ho3(Ho3Args),
    /// Ranks past frames for loop closure from a landmark file.
    Loopclose(LoopArgs),
    /// Scores one prediction CSV against ground truth.
    Evaluate(EvaluateArgs),
    /// Side-by-side metrics table for several prediction CSVs.
    Report(ReportArgs),
    /// Writes a synthetic dataset.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct TrackerFlags {
    #[arg(long, default_value_t = TrackerParams::default().high_score_thresh)]
    high_score: f64,
    #[arg(long, default_value_t = TrackerParams::default().low_score_thresh)]
    low_score: f64,
    /// IoU gate for the high-score stage.
    #[arg(long, default_value_t = TrackerParams::default().iou_match_thresh_stage1)]
    stage1_iou: f64,
    /// IoU gate for the low-score stage.
    #[arg(long, default_value_t = TrackerParams::default().iou_match_thresh_stage2)]
    stage2_iou: f64,
    #[arg(long, default_value_t = TrackerParams::default().new_track_score_thresh)]
    new_track_score: f64,
    #[arg(long, default_value_t = TrackerParams::default().max_lost_frames)]
    max_lost: u32,
    #[arg(long, default_value_t = TrackerParams::default().min_hits_to_activate)]
    min_hits: u32,
}

impl TrackerFlags {
    fn params(&self) -> TrackerParams {
        TrackerParams {
            high_score_thresh: self.high_score,
            low_score_thresh: self.low_score,
            iou_match_thresh_stage1: self.stage1_iou,
            iou_match_thresh_stage2: self.stage2_iou,
            new_track_score_thresh: self.new_track_score,
            max_lost_frames: self.max_lost,
            min_hits_to_activate: self.min_hits,
        }
    }
}

#[derive(Debug, Args)]
struct TrackArgs {
    #[arg(long)]
    dets: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Sequence length when trailing frames have no detections.
    #[arg(long, default_value_t = 0)]
    frames: u32,
    #[command(flatten)]
    tracker: TrackerFlags,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// File of `sx sy tx ty` lines.
    #[arg(long, required_unless_present = "from_tracks", conflicts_with = "from_tracks")]
    correspondences: Option<PathBuf>,
    /// Two track CSVs with shared person ids; box bottom centers correspond.
    #[arg(long, num_args = 2, value_names = ["SOURCE", "TARGET"])]
    from_tracks: Option<Vec<PathBuf>>,
    #[arg(long)]
    out: PathBuf,
    /// RANSAC instead of plain DLT.
    #[arg(long)]
    robust: bool,
    #[arg(long, default_value_t = RobustOptions::default().iterations)]
    iterations: usize,
    #[arg(long, default_value_t = RobustOptions::default().inlier_threshold)]
    inlier_threshold: f64,
}

#[derive(Debug, Args)]
struct PseudoLabelArgs {
    #[arg(long)]
    teacher: PathBuf,
    #[arg(long)]
    homography: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Student image width; unbounded when omitted.
    #[arg(long)]
    width: Option<f64>,
    /// Student image height; unbounded when omitted.
    #[arg(long)]
    height: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    min_score: f64,
}

#[derive(Debug, Args)]
struct FuseArgs {
    /// First tracker (emitted only when strictly more confident).
    #[arg(long)]
    a: PathBuf,
    /// Second tracker (wins ties).
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BrightnessFlags {
    #[arg(long, default_value_t = BrightnessParams::default().threshold)]
    threshold: f64,
    #[arg(long, default_value_t = BrightnessParams::default().hysteresis)]
    hysteresis: f64,
}

impl BrightnessFlags {
    fn params(&self) -> BrightnessParams {
        BrightnessParams {
            threshold: self.threshold,
            hysteresis: self.hysteresis,
        }
    }
}

#[derive(Debug, Args)]
struct SwitchArgs {
    #[arg(long)]
    rgb: PathBuf,
    #[arg(long)]
    thermal: PathBuf,
    /// Brightness label file (`frame B|D`).
    #[arg(long, required_unless_present = "intensity", conflicts_with = "intensity")]
    brightness: Option<PathBuf>,
    /// Mean-intensity file, classified on the fly.
    #[arg(long)]
    intensity: Option<PathBuf>,
    #[command(flatten)]
    classifier: BrightnessFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    intensity: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    classifier: BrightnessFlags,
}

#[derive(Debug, Args)]
struct Ho3Args {
    /// Directory of `<frame>.pgm` masks.
    #[arg(long)]
    masks: PathBuf,
    #[arg(long)]
    tracks: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = LandmarkFilter::default().margin)]
    margin: f64,
    #[arg(long, default_value_t = LandmarkFilter::default().unoccluded_ratio)]
    unoccluded_ratio: f64,
}

#[derive(Debug, Args)]
struct LoopArgs {
    #[arg(long)]
    landmarks: PathBuf,
    /// Ground-truth `query frame` file; its queries are ranked and scored.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Frame tolerance for a correct match.
    #[arg(long, default_value_t = 10)]
    tol: u32,
    /// Past frames closer than this are not candidates.
    #[arg(long, default_value_t = 50)]
    exclusion: u32,
    #[arg(long, default_value_t = RansacParams::default().iterations)]
    iterations: usize,
    #[arg(long, default_value_t = RansacParams::default().inlier_tol)]
    inlier_tol: f64,
    #[arg(long, default_value_t = RansacParams::default().min_inliers)]
    min_inliers: usize,
    #[arg(long, default_value_t = RansacParams::default().max_scale)]
    max_scale: f64,
    /// Candidate pair radius in pixels; ungated when omitted.
    #[arg(long)]
    gate_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Segment {
    Bright,
    Dark,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Lines,
}

#[derive(Debug, Args)]
struct SegmentFlags {
    /// Brightness label file used with --segment.
    #[arg(long, requires = "segment")]
    brightness: Option<PathBuf>,
    /// Restrict scoring to frames with this label.
    #[arg(long, value_enum, requires = "brightness")]
    segment: Option<Segment>,
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        Ok(v) => Err(format!("{v} is outside [0, 1]")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = DEFAULT_IOU_THRESH, value_parser = unit_interval)]
    iou: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Row label in table output; defaults to the prediction file stem.
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    segment: SegmentFlags,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    gt: PathBuf,
    /// `NAME=PATH`, repeatable.
    #[arg(long = "run", required = true)]
    runs: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_IOU_THRESH, value_parser = unit_interval)]
    iou: f64,
    #[command(flatten)]
    segment: SegmentFlags,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// Random walkers among two occluders.
    Default,
    /// Four persons in separate lanes, no occluders.
    Lanes,
    /// Lanes with a bright first half and dark second half.
    BrightDark,
    /// Wide world, near-static persons, camera out-and-back.
    Loop,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    /// JSON config; replaces the preset.
    #[arg(long, conflicts_with_all = ["preset", "frames"])]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Preset::Default)]
    preset: Preset,
    /// Frame count for the preset.
    #[arg(long, default_value_t = 300)]
    frames: u32,
    /// Every frame dark.
    #[arg(long)]
    dark: bool,
    /// Every modality detects every visible person exactly.
    #[arg(long)]
    perfect: bool,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn segment_frames(s: &SegmentFlags) -> Result<Option<BTreeSet<u32>>> {
    let (Some(path), Some(seg)) = (&s.brightness, s.segment) else {
        return Ok(None);
    };
    let want = match seg {
        Segment::Bright => BrightnessLabel::Bright,
        Segment::Dark => BrightnessLabel::Dark,
    };
    Ok(Some(
        dio::read_brightness(path)?
            .into_iter()
            .filter(|&(_, l)| l == want)
            .map(|(f, _)| f)
            .collect(),
    ))
}

fn restrict(records: Vec<TrackRecord>, frames: &Option<BTreeSet<u32>>) -> Vec<TrackRecord> {
    match frames {
        Some(keep) => records.into_iter().filter(|r| keep.contains(&r.frame_id)).collect(),
        None => records,
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Track(a) => {
            let p = a.tracker.params();
            p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let dets = dio::read_detections(&a.dets, a.frames)?;
            dio::write_tracks(&a.out, &run_sequence(&dets, &p))?;
        }
        Cmd::Calibrate(a) => {
            let c = match (&a.correspondences, &a.from_tracks) {
                (Some(p), _) => dio::read_correspondences(p)?,
                (None, Some(v)) => dio::correspondences_from_tracks(&dio::read_tracks(&v[0])?, &dio::read_tracks(&v[1])?),
                (None, None) => unreachable!("clap enforces one source"),
            };
            let h = if a.robust {
                let opts = RobustOptions {
                    iterations: a.iterations,
                    inlier_threshold: a.inlier_threshold,
                    seed: seed.unwrap_or(0),
                };
                estimate_homography_robust(&c, &opts)?
            } else {
                estimate_homography(&c)?
            };
            dio::write_homography(&a.out, &h)?;
            println!("correspondences {}", c.len());
            println!("rmse {:.4}", reprojection_rmse(&h, &c));
        }
        Cmd::PseudoLabel(a) => {
            let teacher = dio::read_tracks(&a.teacher)?;
            let h = dio::read_homography(&a.homography)?;
            let bounds = (a.width.unwrap_or(f64::INFINITY), a.height.unwrap_or(f64::INFINITY));
            let set = export_pseudo_labels(&teacher, &h, bounds, a.min_score);
            dio::write_tracks(&a.out, &set.records)?;
            eprintln!("exported {} records, dropped {}", set.records.len(), set.dropped);
        }
        Cmd::Fuse(a) => {
            let fused = fuse_sequence(&dio::read_tracks(&a.a)?, &dio::read_tracks(&a.b)?);
            dio::write_tracks(&a.out, &fused)?;
        }
        Cmd::Switch(a) => {
            let labels: BTreeMap<u32, BrightnessLabel> = match (&a.brightness, &a.intensity) {
                (Some(p), _) => dio::read_brightness(p)?,
                (None, Some(p)) => classify_sequence(&dio::read_intensity(p)?, &a.classifier.params())
                    .into_iter()
                    .collect(),
                (None, None) => unreachable!("clap enforces one schedule"),
            };
            let out = switch_sequence(&dio::read_tracks(&a.rgb)?, &dio::read_tracks(&a.thermal)?, &labels)?;
            dio::write_tracks(&a.out, &out)?;
        }
        Cmd::Classify(a) => {
            let labels = classify_sequence(&dio::read_intensity(&a.intensity)?, &a.classifier.params());
            dio::write_brightness(&a.out, &labels.into_iter().collect())?;
        }
        Cmd::Ho3(a) => {
            let f = LandmarkFilter {
                margin: a.margin,
                unoccluded_ratio: a.unoccluded_ratio,
            };
            let masks = dio::read_mask_dir(&a.masks)?;
            let map = build_landmark_map(&masks, &dio::read_tracks(&a.tracks)?, &f)?;
            dio::write_landmarks(&a.out, &map)?;
        }
        Cmd::Loopclose(a) => {
            let map = dio::read_landmarks(&a.landmarks)?;
            let params = RansacParams {
                iterations: a.iterations,
                inlier_tol: a.inlier_tol,
                min_inliers: a.min_inliers,
                seed: seed.unwrap_or(0),
                max_scale: a.max_scale,
                gate_radius: a.gate_radius,
            };
            let gt = a.gt.as_deref().map(dio::read_loop_gt).transpose()?;
            let queries: Vec<u32> = match &gt {
                Some(g) => g.keys().copied().collect(),
                None => {
                    let first = map.keys().next().copied().unwrap_or(0);
                    map.keys().copied().filter(|&f| f >= first.saturating_add(a.exclusion).max(first + 1)).collect()
                }
            };
            let rankings: Vec<_> = queries
                .par_iter()
                .map(|&q| rank_past_frames(&map, q, a.exclusion, &params))
                .collect();
            let acc = gt.as_ref().map(|g| topk_accuracy(&rankings, g, a.k, a.tol)).transpose()?;
            write_or_print(a.out.as_deref(), &format_ranking_report(&rankings, a.k, acc))?;
        }
        Cmd::Evaluate(a) => {
            let frames = segment_frames(&a.segment)?;
            let gt = restrict(dio::read_tracks(&a.gt)?, &frames);
            let pred = restrict(dio::read_tracks(&a.pred)?, &frames);
            let r = evaluate(&gt, &pred, a.iou)?;
            let name = a.name.unwrap_or_else(|| stem(&a.pred));
            match a.format {
                Format::Table => print!("{}", format_table(&[(name, r)])),
                Format::Lines => print!("{}", r.to_lines()),
            }
        }
        Cmd::Report(a) => {
            let frames = segment_frames(&a.segment)?;
            let gt = restrict(dio::read_tracks(&a.gt)?, &frames);
            let runs: Vec<(String, PathBuf)> = a
                .runs
                .iter()
                .map(|s| match s.split_once('=') {
                    Some((n, p)) => (n.to_string(), PathBuf::from(p)),
                    None => (stem(Path::new(s)), PathBuf::from(s)),
                })
                .collect();
            let rows: Vec<Result<(String, MetricsReport)>> = runs
                .par_iter()
                .map(|(name, path)| {
                    let pred = restrict(dio::read_tracks(path)?, &frames);
                    Ok((name.clone(), evaluate(&gt, &pred, a.iou)?))
                })
                .collect();
            let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
            print!("{}", format_table(&rows));
        }
        Cmd::Simulate(a) => {
            let mut c = match &a.config {
                Some(p) => dio::read_sim_config(p)?,
                None => match a.preset {
                    Preset::Default => SimConfig {
                        n_frames: a.frames,
                        schedule: full_schedule(a.frames, BrightnessLabel::Bright),
                        ..SimConfig::default()
                    },
                    Preset::Lanes => SimConfig::lanes(a.frames, 0),
                    Preset::BrightDark => SimConfig::bright_dark(a.frames, 0),
                    Preset::Loop => SimConfig::loop_scene(a.frames, 0),
                },
            };
            if let Some(s) = seed {
                c.seed = s;
            }
            if a.dark {
                c.schedule = full_schedule(c.n_frames, BrightnessLabel::Dark);
            }
            if a.perfect {
                c.detection = DetectionModels::perfect();
            }
            c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let ds = simulate(&c)?;
            dio::write_dataset(&a.out, &c, &ds)?;
        }
    }
    Ok(())
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("darktrack: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("darktrack: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(m)) => {
            eprintln!("darktrack: {m}");
            ExitCode::from(2)
        }
    }
}
