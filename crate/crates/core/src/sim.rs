//! Deterministic synthetic scenes: walking box-people, static occluders, a
//! brightness schedule and per-modality detection noise.
//!
//! Persons live in world coordinates. The camera sees an `width` x `height`
//! window of the world whose offset can follow a loop trajectory. Depth is
//! the ground-contact row: larger y is closer to the camera.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooperative::{BrightnessLabel, FrameStats};
use crate::error::SimError;
use crate::geometry::{BBox, Detection, Mask};
use crate::tracker::TrackRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occluder {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    /// Ground row of the occluder. Persons whose feet are above it are
    /// hidden behind it; defaults to the bottom edge.
    #[serde(default)]
    pub depth: Option<f64>,
}

impl Occluder {
    pub fn new(left: f64, top: f64, width: f64, height: f64) -> Self {
        Self {
            left,
            top,
            width,
            height,
            depth: None,
        }
    }

    pub fn depth(&self) -> f64 {
        self.depth.unwrap_or(self.top + self.height)
    }

    /// Feet may not enter this band around the ground row.
    fn blocks(&self, x: f64, y: f64) -> bool {
        let d = self.depth();
        x >= self.left && x <= self.left + self.width && (y - d).abs() <= FOOTPRINT_HALF_HEIGHT
    }
}

const FOOTPRINT_HALF_HEIGHT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    /// Foot-point polylines per person, followed cyclically. Persons without
    /// a path get random waypoints.
    Waypoints {
        #[serde(default)]
        paths: Vec<Vec<(f64, f64)>>,
    },
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionModel {
    pub prob: f64,
    pub score_lo: f64,
    pub score_hi: f64,
    /// Standard deviation of the box jitter, per coordinate.
    pub jitter: f64,
}

impl DetectionModel {
    pub const fn new(prob: f64, score_lo: f64, score_hi: f64, jitter: f64) -> Self {
        Self {
            prob,
            score_lo,
            score_hi,
            jitter,
        }
    }

    pub const fn perfect() -> Self {
        Self::new(1.0, 0.9, 0.9, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionModels {
    pub rgb_bright: DetectionModel,
    pub rgb_dark: DetectionModel,
    pub thermal: DetectionModel,
    pub depth: DetectionModel,
    /// Persons hidden beyond this fraction are never detected.
    pub max_occlusion: f64,
}

impl Default for DetectionModels {
    fn default() -> Self {
        Self {
            rgb_bright: DetectionModel::new(0.98, 0.75, 0.99, 1.0),
            rgb_dark: DetectionModel::new(0.02, 0.0, 0.2, 1.0),
            thermal: DetectionModel::new(0.95, 0.5, 0.95, 2.0),
            depth: DetectionModel::new(0.9, 0.4, 0.9, 3.0),
            max_occlusion: 0.7,
        }
    }
}

impl DetectionModels {
    pub fn perfect() -> Self {
        let p = DetectionModel::perfect();
        Self {
            rgb_bright: p,
            rgb_dark: p,
            thermal: p,
            depth: p,
            max_occlusion: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpan {
    pub first: u32,
    pub last: u32,
    pub label: BrightnessLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoopPath {
    /// Camera slides right by `extent` pixels over the first half and returns
    /// over the second.
    OutAndBack { extent: f64 },
    /// Closed polyline of camera offsets traversed once at constant speed.
    Polyline { vertices: Vec<(f64, f64)> },
    /// Explicit offset for every frame.
    Offsets { xy: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub path: LoopPath,
    /// Earlier frames closer than this many frames are not match candidates.
    #[serde(default = "default_exclusion")]
    pub exclusion: u32,
    /// A frame is a revisit query when some candidate viewpoint lies within
    /// this distance.
    #[serde(default = "default_revisit_radius")]
    pub revisit_radius: f64,
}

fn default_exclusion() -> u32 {
    50
}

fn default_revisit_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub width: usize,
    pub height: usize,
    /// World size; defaults to the image size when zero.
    pub world_width: f64,
    pub world_height: f64,
    pub n_persons: usize,
    pub person_width: (f64, f64),
    pub person_height: (f64, f64),
    /// Optional start foot points; missing entries are drawn at random.
    pub starts: Vec<(f64, f64)>,
    pub occluders: Vec<Occluder>,
    pub motion: Motion,
    /// Pixels per frame.
    pub speed: f64,
    pub n_frames: u32,
    pub schedule: Vec<ScheduleSpan>,
    pub detection: DetectionModels,
    pub camera: Option<LoopConfig>,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            world_width: 0.0,
            world_height: 0.0,
            n_persons: 4,
            person_width: (16.0, 24.0),
            person_height: (48.0, 64.0),
            starts: Vec::new(),
            occluders: vec![
                Occluder::new(40.0, 150.0, 70.0, 30.0),
                Occluder::new(200.0, 120.0, 60.0, 40.0),
            ],
            motion: Motion::RandomWalk,
            speed: 1.5,
            n_frames: 300,
            schedule: vec![ScheduleSpan {
                first: 1,
                last: 300,
                label: BrightnessLabel::Bright,
            }],
            detection: DetectionModels::default(),
            camera: None,
            seed: 0,
        }
    }
}

impl SimConfig {
    /// Four persons in separate horizontal lanes, no occluders, all bright.
    pub fn lanes(n_frames: u32, seed: u64) -> Self {
        let paths = (0..4)
            .map(|k| {
                let y = 80.0 + 45.0 * k as f64;
                let (a, b) = if k % 2 == 0 { (30.0, 290.0) } else { (290.0, 30.0) };
                vec![(a, y), (b, y)]
            })
            .collect();
        Self {
            occluders: Vec::new(),
            motion: Motion::Waypoints { paths },
            starts: (0..4)
                .map(|k| (if k % 2 == 0 { 30.0 + 40.0 * k as f64 } else { 290.0 - 40.0 * k as f64 }, 80.0 + 45.0 * k as f64))
                .collect(),
            n_frames,
            schedule: full_schedule(n_frames, BrightnessLabel::Bright),
            seed,
            ..Self::default()
        }
    }

    /// Bright first half, dark second half, default noise models.
    pub fn bright_dark(n_frames: u32, seed: u64) -> Self {
        let half = n_frames / 2;
        Self {
            n_frames,
            schedule: vec![
                ScheduleSpan {
                    first: 1,
                    last: half,
                    label: BrightnessLabel::Bright,
                },
                ScheduleSpan {
                    first: half + 1,
                    last: n_frames,
                    label: BrightnessLabel::Dark,
                },
            ],
            seed,
            ..Self::lanes(n_frames, seed)
        }
    }

    /// Wide static world, four near-static persons, three occluders, and a
    /// camera that slides out and back.
    pub fn loop_scene(n_frames: u32, seed: u64) -> Self {
        let extent = 160.0;
        Self {
            width: 160,
            height: 120,
            world_width: 160.0 + extent,
            world_height: 120.0,
            n_persons: 4,
            person_width: (14.0, 18.0),
            person_height: (40.0, 50.0),
            starts: vec![(45.0, 95.0), (125.0, 80.0), (205.0, 100.0), (270.0, 110.0)],
            occluders: vec![
                Occluder::new(25.0, 78.0, 45.0, 40.0),
                Occluder::new(112.0, 66.0, 36.0, 22.0),
                Occluder::new(185.0, 84.0, 40.0, 30.0),
            ],
            motion: Motion::RandomWalk,
            speed: 0.05,
            n_frames,
            schedule: full_schedule(n_frames, BrightnessLabel::Dark),
            detection: DetectionModels::default(),
            camera: Some(LoopConfig {
                path: LoopPath::OutAndBack { extent },
                exclusion: 50,
                revisit_radius: 1.0,
            }),
            seed,
        }
    }

    fn world(&self) -> (f64, f64) {
        let w = if self.world_width > 0.0 { self.world_width } else { self.width as f64 };
        let h = if self.world_height > 0.0 { self.world_height } else { self.height as f64 };
        (w, h)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::ConfigInvalid(m.to_string()));
        if self.n_persons < 1 {
            return bad("n_persons must be at least 1");
        }
        if self.n_frames < 1 {
            return bad("n_frames must be at least 1");
        }
        if self.width == 0 || self.height == 0 {
            return bad("image size must be positive");
        }
        let (ww, wh) = self.world();
        if ww < self.width as f64 || wh < self.height as f64 {
            return bad("world must be at least as large as the image");
        }
        for (lo, hi) in [self.person_width, self.person_height] {
            if !(lo >= 1.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
                return bad("person size range must satisfy 1 <= lo <= hi");
            }
        }
        if self.person_width.1 >= ww || self.person_height.1 >= wh {
            return bad("persons must fit in the world");
        }
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return bad("speed must be non-negative");
        }
        for o in &self.occluders {
            if !(o.width > 0.0 && o.height > 0.0) {
                return bad("occluders need positive size");
            }
        }
        let d = &self.detection;
        for m in [d.rgb_bright, d.rgb_dark, d.thermal, d.depth] {
            if !(0.0..=1.0).contains(&m.prob)
                || !(0.0..=1.0).contains(&m.score_lo)
                || !(m.score_lo..=1.0).contains(&m.score_hi)
                || !(m.jitter >= 0.0)
            {
                return bad("detection model out of range");
            }
        }
        self.labels()?;
        if let Some(l) = &self.camera {
            match &l.path {
                LoopPath::Offsets { xy } if xy.len() != self.n_frames as usize => {
                    return bad("one camera offset per frame is required")
                }
                LoopPath::Polyline { vertices } if vertices.len() < 2 => {
                    return bad("polyline needs at least two vertices")
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The brightness schedule expanded per frame.
    pub fn labels(&self) -> Result<BTreeMap<u32, BrightnessLabel>, SimError> {
        let mut out = BTreeMap::new();
        for s in &self.schedule {
            for f in s.first..=s.last {
                if f < 1 || f > self.n_frames {
                    return Err(SimError::ConfigInvalid(format!("schedule frame {f} out of range")));
                }
                if out.insert(f, s.label).is_some() {
                    return Err(SimError::ConfigInvalid(format!("frame {f} scheduled twice")));
                }
            }
        }
        if out.len() != self.n_frames as usize {
            return Err(SimError::ConfigInvalid("schedule does not cover every frame".into()));
        }
        Ok(out)
    }

    /// Camera offset for frames `1..=n_frames`, or zeros without a loop.
    pub fn camera_positions(&self) -> Vec<(f64, f64)> {
        let n = self.n_frames as usize;
        let Some(l) = &self.camera else {
            return vec![(0.0, 0.0); n];
        };
        match &l.path {
            LoopPath::OutAndBack { extent } => {
                let half = (n / 2).max(1) as f64;
                (1..=n)
                    .map(|i| (extent * (half - (half - i as f64).abs()).max(0.0) / half, 0.0))
                    .collect()
            }
            LoopPath::Offsets { xy } => xy.clone(),
            LoopPath::Polyline { vertices } => {
                let mut closed = vertices.clone();
                closed.push(vertices[0]);
                let seg: Vec<f64> = closed
                    .windows(2)
                    .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
                    .collect();
                let total: f64 = seg.iter().sum();
                (0..n)
                    .map(|i| {
                        let mut s = total * i as f64 / n as f64;
                        for (k, &len) in seg.iter().enumerate() {
                            if s <= len || k + 1 == seg.len() {
                                let t = if len > 0.0 { (s / len).min(1.0) } else { 0.0 };
                                let (a, b) = (closed[k], closed[k + 1]);
                                return (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                            }
                            s -= len;
                        }
                        unreachable!()
                    })
                    .collect()
            }
        }
    }
}

pub fn full_schedule(n_frames: u32, label: BrightnessLabel) -> Vec<ScheduleSpan> {
    vec![ScheduleSpan {
        first: 1,
        last: n_frames,
        label,
    }]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Rgb,
    Thermal,
    Depth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDataset {
    pub width: usize,
    pub height: usize,
    pub n_frames: u32,
    pub gt: Vec<TrackRecord>,
    /// Union of visible person pixels per frame.
    pub masks: BTreeMap<u32, Mask>,
    /// Indexed by frame - 1.
    pub dets_rgb: Vec<Vec<Detection>>,
    pub dets_t: Vec<Vec<Detection>>,
    pub dets_d: Vec<Vec<Detection>>,
    pub brightness: Vec<FrameStats>,
    pub labels: BTreeMap<u32, BrightnessLabel>,
    pub gt_loop: BTreeMap<u32, u32>,
}

impl SimDataset {
    pub fn detections(&self, m: Modality) -> &[Vec<Detection>] {
        match m {
            Modality::Rgb => &self.dets_rgb,
            Modality::Thermal => &self.dets_t,
            Modality::Depth => &self.dets_d,
        }
    }
}

/// Independent PRNG stream for `(seed, a, b)`.
pub fn substream(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut z = seed;
    for v in [a, b] {
        z ^= v.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(z << 6).wrapping_add(z >> 2);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    ChaCha8Rng::seed_from_u64(z)
}

const STREAM_PERSON: u64 = 1;
const STREAM_FRAME: u64 = 2;

#[derive(Debug, Clone, Copy)]
struct Person {
    w: f64,
    h: f64,
}

impl Person {
    /// Amodal box for a foot point.
    fn bbox(&self, foot: (f64, f64)) -> BBox {
        BBox {
            left: foot.0 - self.w / 2.0,
            top: foot.1 - self.h,
            width: self.w,
            height: self.h,
        }
    }
}

/// Whether pixel center `(px, py)` lies on the silhouette drawn in `b`: a
/// body rectangle under a semicircular head of radius `w / 4`.
fn silhouette_contains(b: &BBox, px: f64, py: f64) -> bool {
    if px < b.left || px >= b.right() || py < b.top || py >= b.bottom() {
        return false;
    }
    let r = b.width / 4.0;
    if py >= b.top + r {
        return true;
    }
    let (cx, cy) = (b.left + b.width / 2.0, b.top + r);
    (px - cx).powi(2) + (py - cy).powi(2) <= r * r
}

fn free_foot(c: &SimConfig, p: &Person, x: f64, y: f64) -> bool {
    let (ww, wh) = c.world();
    x >= p.w / 2.0
        && x <= ww - p.w / 2.0
        && y >= p.h
        && y <= wh
        && !c.occluders.iter().any(|o| o.blocks(x, y))
}

fn random_free_point(c: &SimConfig, p: &Person, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (ww, wh) = c.world();
    for _ in 0..10_000 {
        let x = rng.random_range(p.w / 2.0..=ww - p.w / 2.0);
        let y = rng.random_range(p.h..=wh);
        if free_foot(c, p, x, y) {
            return (x, y);
        }
    }
    (ww / 2.0, wh)
}

/// Foot points for every person and frame, `[person][frame - 1]`.
fn trajectories(c: &SimConfig, persons: &[Person]) -> Vec<Vec<(f64, f64)>> {
    let normal = Normal::new(0.0, 0.25).expect("valid sigma");
    persons
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut rng = substream(c.seed, STREAM_PERSON, k as u64 + 1_000);
            let mut pos = match c.starts.get(k) {
                Some(&s) => s,
                None => random_free_point(c, p, &mut rng),
            };
            let mut heading: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let path: Vec<(f64, f64)> = match &c.motion {
                Motion::Waypoints { paths } => match paths.get(k) {
                    Some(v) if !v.is_empty() => v.clone(),
                    _ => (0..4).map(|_| random_free_point(c, p, &mut rng)).collect(),
                },
                Motion::RandomWalk => Vec::new(),
            };
            let mut target = 0usize;
            let mut out = Vec::with_capacity(c.n_frames as usize);
            for _ in 0..c.n_frames {
                out.push(pos);
                match &c.motion {
                    Motion::Waypoints { .. } => {
                        let mut budget = c.speed;
                        for _ in 0..path.len() {
                            let goal = path[target];
                            let (dx, dy) = (goal.0 - pos.0, goal.1 - pos.1);
                            let d = (dx * dx + dy * dy).sqrt();
                            if d > budget {
                                pos = (pos.0 + budget * dx / d, pos.1 + budget * dy / d);
                                break;
                            }
                            pos = goal;
                            budget -= d;
                            target = (target + 1) % path.len();
                        }
                    }
                    Motion::RandomWalk => {
                        heading += normal.sample(&mut rng);
                        let next = (pos.0 + c.speed * heading.cos(), pos.1 + c.speed * heading.sin());
                        if free_foot(c, p, next.0, next.1) {
                            pos = next;
                        } else {
                            heading += std::f64::consts::PI;
                        }
                    }
                }
            }
            out
        })
        .collect()
}

struct FrameOut {
    gt: Vec<TrackRecord>,
    mask: Mask,
    dets: [Vec<Detection>; 3],
    stats: FrameStats,
}

fn draw_detections(
    rng: &mut ChaCha8Rng,
    m: &DetectionModel,
    visible: &[(u32, BBox, f64)],
    max_occlusion: f64,
    bounds: (f64, f64),
) -> Vec<Detection> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut out = Vec::new();
    for &(_, b, occluded) in visible {
        // Fixed draw count per person keeps the stream aligned.
        let u: f64 = rng.random();
        let score = if m.score_hi > m.score_lo {
            rng.random_range(m.score_lo..m.score_hi)
        } else {
            m.score_lo
        };
        let n: [f64; 4] = std::array::from_fn(|_| normal.sample(rng));
        if occluded > max_occlusion || u >= m.prob {
            continue;
        }
        let j = m.jitter;
        let jittered = BBox {
            left: b.left + j * n[0],
            top: b.top + j * n[1],
            width: (b.width + j * n[2]).max(1.0),
            height: (b.height + j * n[3]).max(1.0),
        };
        if let Some(bbox) = jittered.clamp_to(bounds.0, bounds.1).filter(|b| b.area() >= 1.0) {
            out.push(Detection { bbox, score });
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn render_frame(
    c: &SimConfig,
    persons: &[Person],
    feet: &[Vec<(f64, f64)>],
    cam: (f64, f64),
    frame: u32,
    label: BrightnessLabel,
) -> FrameOut {
    let (w, h) = (c.width, c.height);
    let idx = frame as usize - 1;
    // Larger depth wins each pixel; occluders are index n_persons + k.
    let mut owner: Vec<Option<(f64, usize)>> = vec![None; w * h];
    let boxes: Vec<BBox> = persons
        .iter()
        .enumerate()
        .map(|(k, p)| p.bbox(feet[k][idx]).translated(-cam.0, -cam.1))
        .collect();
    let mut amodal = vec![0usize; persons.len()];
    let mut paint = |depth: f64, id: usize, b: &BBox, person: bool, amodal: &mut Vec<usize>| {
        let Some(span) = b.pixel_span(w, h) else {
            return;
        };
        for y in span.y0..span.y1 {
            for x in span.x0..span.x1 {
                if person && !silhouette_contains(b, x as f64 + 0.5, y as f64 + 0.5) {
                    continue;
                }
                if person {
                    amodal[id] += 1;
                }
                let cell = &mut owner[y * w + x];
                if cell.is_none_or(|(d, _)| depth > d) {
                    *cell = Some((depth, id));
                }
            }
        }
    };
    for (k, b) in boxes.iter().enumerate() {
        paint(b.bottom(), k, b, true, &mut amodal);
    }
    for (k, o) in c.occluders.iter().enumerate() {
        let b = BBox {
            left: o.left - cam.0,
            top: o.top - cam.1,
            width: o.width,
            height: o.height,
        };
        paint(o.depth() - cam.1, persons.len() + k, &b, false, &mut amodal);
    }

    let mut mask = Mask::new(w, h);
    let mut visible_px = vec![0usize; persons.len()];
    for (i, cell) in owner.iter().enumerate() {
        if let Some((_, id)) = cell {
            if *id < persons.len() {
                visible_px[*id] += 1;
                mask.set(i % w, i / w, true);
            }
        }
    }

    let bounds = (w as f64, h as f64);
    let mut gt = Vec::new();
    let mut visible = Vec::new();
    for (k, b) in boxes.iter().enumerate() {
        if visible_px[k] == 0 {
            continue;
        }
        let Some(clamped) = b.clamp_to(bounds.0, bounds.1).filter(|b| b.area() >= 1.0) else {
            continue;
        };
        let id = k as u32 + 1;
        gt.push(TrackRecord {
            frame_id: frame,
            person_id: id,
            bbox: clamped,
            score: 1.0,
        });
        let occluded = 1.0 - visible_px[k] as f64 / amodal[k].max(1) as f64;
        visible.push((id, clamped, occluded));
    }

    let d = &c.detection;
    let rgb_model = match label {
        BrightnessLabel::Bright => &d.rgb_bright,
        BrightnessLabel::Dark => &d.rgb_dark,
    };
    let dets = [(0u64, rgb_model), (1, &d.thermal), (2, &d.depth)].map(|(tag, m)| {
        let mut rng = substream(c.seed, STREAM_FRAME + 10 * tag, frame as u64);
        draw_detections(&mut rng, m, &visible, d.max_occlusion, bounds)
    });

    let mut rng = substream(c.seed, STREAM_FRAME + 100, frame as u64);
    let (mu, sigma) = match label {
        BrightnessLabel::Bright => (140.0, 8.0),
        BrightnessLabel::Dark => (15.0, 4.0),
    };
    let noise: f64 = Normal::new(0.0, sigma).expect("positive sigma").sample(&mut rng);
    FrameOut {
        gt,
        mask,
        dets,
        stats: FrameStats {
            frame_id: frame,
            mean_intensity: (mu + noise).clamp(0.0, 255.0),
        },
    }
}

pub fn simulate(c: &SimConfig) -> Result<SimDataset, SimError> {
    c.validate()?;
    let labels = c.labels()?;
    let mut rng = substream(c.seed, STREAM_PERSON, 0);
    let persons: Vec<Person> = (0..c.n_persons)
        .map(|_| Person {
            w: rng.random_range(c.person_width.0..=c.person_width.1),
            h: rng.random_range(c.person_height.0..=c.person_height.1),
        })
        .collect();
    let feet = trajectories(c, &persons);
    let cams = c.camera_positions();

    let frames: Vec<FrameOut> = (1..=c.n_frames)
        .into_par_iter()
        .map(|f| render_frame(c, &persons, &feet, cams[f as usize - 1], f, labels[&f]))
        .collect();

    let gt_loop = match c.camera {
        Some(_) => loop_ground_truth(c)?,
        None => BTreeMap::new(),
    };
    let mut out = SimDataset {
        width: c.width,
        height: c.height,
        n_frames: c.n_frames,
        gt: Vec::new(),
        masks: BTreeMap::new(),
        dets_rgb: Vec::new(),
        dets_t: Vec::new(),
        dets_d: Vec::new(),
        brightness: Vec::new(),
        labels,
        gt_loop,
    };
    for (k, fo) in frames.into_iter().enumerate() {
        let [r, t, d] = fo.dets;
        out.gt.extend(fo.gt);
        out.masks.insert(k as u32 + 1, fo.mask);
        out.dets_rgb.push(r);
        out.dets_t.push(t);
        out.dets_d.push(d);
        out.brightness.push(fo.stats);
    }
    Ok(out)
}

/// For every revisit query frame, the earlier candidate frame with the
/// closest camera position (first minimum on ties).
pub fn loop_ground_truth(c: &SimConfig) -> Result<BTreeMap<u32, u32>, SimError> {
    let l = c.camera.as_ref().ok_or(SimError::NoLoopConfigured)?;
    let pos = c.camera_positions();
    let mut out = BTreeMap::new();
    for q in 1..=pos.len() as u32 {
        let Some(last) = q.checked_sub(l.exclusion.max(1)) else {
            continue;
        };
        let pq = pos[q as usize - 1];
        let mut best: Option<(f64, u32)> = None;
        for g in 1..=last {
            let pg = pos[g as usize - 1];
            let d = ((pq.0 - pg.0).powi(2) + (pq.1 - pg.1).powi(2)).sqrt();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, g));
            }
        }
        if let Some((d, g)) = best {
            if d <= l.revisit_radius {
                out.insert(q, g);
            }
        }
    }
    Ok(out)
}
