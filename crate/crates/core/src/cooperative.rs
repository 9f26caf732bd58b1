//! Cooperation between two trackers observing the same scene: teacher to
//! student pseudo-label export, score-max fusion, brightness classification
//! and brightness-driven tracker switching.
//!
//! The two trackers run with independent id spaces. Both fusion and
//! switching pair their per-frame outputs by IoU and keep a persistent
//! [`IdPairTable`] so that the emitted ids stay stable when the selected
//! source changes.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::assignment::assign_iou;
use crate::calibration::{warp_bbox, Homography};
use crate::error::ScheduleError;
use crate::geometry::{iou_matrix, BBox};
use crate::tracker::{records_by_frame, TrackRecord};

/// IoU gate for pairing the two trackers' boxes within a frame.
pub const PAIR_IOU_GATE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BrightnessLabel {
    Bright,
    Dark,
}

impl BrightnessLabel {
    pub fn code(self) -> char {
        match self {
            BrightnessLabel::Bright => 'B',
            BrightnessLabel::Dark => 'D',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStats {
    pub frame_id: u32,
    pub mean_intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightnessParams {
    pub threshold: f64,
    pub hysteresis: f64,
}

impl Default for BrightnessParams {
    fn default() -> Self {
        Self {
            threshold: 60.0,
            hysteresis: 5.0,
        }
    }
}

/// Binary brightness decision with a hysteresis band around `threshold`.
pub fn classify_brightness(
    s: &FrameStats,
    threshold: f64,
    hysteresis: f64,
    prev: BrightnessLabel,
) -> BrightnessLabel {
    let up = threshold + if prev == BrightnessLabel::Dark { hysteresis } else { 0.0 };
    let down = threshold - if prev == BrightnessLabel::Bright { hysteresis } else { 0.0 };
    if s.mean_intensity > up {
        BrightnessLabel::Bright
    } else if s.mean_intensity < down {
        BrightnessLabel::Dark
    } else {
        prev
    }
}

/// Labels a whole sequence. The first frame is labelled without hysteresis.
pub fn classify_sequence(stats: &[FrameStats], p: &BrightnessParams) -> Vec<(u32, BrightnessLabel)> {
    let mut out = Vec::with_capacity(stats.len());
    let mut prev = None;
    for s in stats {
        let label = match prev {
            None if s.mean_intensity > p.threshold => BrightnessLabel::Bright,
            None => BrightnessLabel::Dark,
            Some(prev) => classify_brightness(s, p.threshold, p.hysteresis, prev),
        };
        out.push((s.frame_id, label));
        prev = Some(label);
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PseudoLabelSet {
    pub records: Vec<TrackRecord>,
    pub dropped: usize,
}

/// Transfers teacher tracks into the student camera's image plane.
///
/// Boxes are warped, clamped to `student_bounds` (width, height; infinite
/// bounds are allowed), and dropped when the clamped area falls below one
/// square pixel or a corner maps to infinity.
pub fn export_pseudo_labels(
    teacher: &[TrackRecord],
    h: &Homography,
    student_bounds: (f64, f64),
    min_score: f64,
) -> PseudoLabelSet {
    let mut out = PseudoLabelSet::default();
    for r in teacher.iter().filter(|r| r.score >= min_score) {
        let clamped = warp_bbox(h, &r.bbox)
            .ok()
            .and_then(|b| b.clamp_to(student_bounds.0, student_bounds.1))
            .filter(|b| b.area() >= 1.0);
        match clamped {
            Some(bbox) => out.records.push(TrackRecord { bbox, ..*r }),
            None => out.dropped += 1,
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Persistent mapping from each source tracker's ids to a shared output id
/// space.
#[derive(Debug, Clone, Default)]
pub struct IdPairTable {
    a: HashMap<u32, u32>,
    b: HashMap<u32, u32>,
    next: u32,
}

impl IdPairTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn map(&self, side: Side) -> &HashMap<u32, u32> {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    fn map_mut(&mut self, side: Side) -> &mut HashMap<u32, u32> {
        match side {
            Side::A => &mut self.a,
            Side::B => &mut self.b,
        }
    }

    pub fn lookup(&self, side: Side, id: u32) -> Option<u32> {
        self.map(side).get(&id).copied()
    }

    fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next
    }

    /// Output id for a record emitted from `side` with no partner this frame.
    fn resolve_single(&mut self, side: Side, id: u32, used: &mut HashSet<u32>) -> u32 {
        let fused = match self.lookup(side, id) {
            Some(f) if !used.contains(&f) => f,
            _ => {
                let f = self.fresh();
                self.map_mut(side).insert(id, f);
                f
            }
        };
        used.insert(fused);
        fused
    }

    /// Output id for a matched pair whose emitted record comes from
    /// `emitted`. The emitted side keeps its binding when it has one; the
    /// partner is rebound to the same output id.
    fn resolve_pair(
        &mut self,
        emitted: Side,
        emitted_id: u32,
        other_id: u32,
        used: &mut HashSet<u32>,
    ) -> u32 {
        let other = match emitted {
            Side::A => Side::B,
            Side::B => Side::A,
        };
        let fused = [self.lookup(emitted, emitted_id), self.lookup(other, other_id)]
            .into_iter()
            .flatten()
            .find(|f| !used.contains(f))
            .unwrap_or_else(|| self.fresh());
        self.map_mut(emitted).insert(emitted_id, fused);
        self.map_mut(other).insert(other_id, fused);
        used.insert(fused);
        fused
    }
}

fn pair_frame(a: &[TrackRecord], b: &[TrackRecord]) -> (Vec<(usize, usize)>, Vec<usize>, Vec<usize>) {
    let ab: Vec<BBox> = a.iter().map(|r| r.bbox).collect();
    let bb: Vec<BBox> = b.iter().map(|r| r.bbox).collect();
    if a.is_empty() || b.is_empty() {
        return (Vec::new(), (0..a.len()).collect(), (0..b.len()).collect());
    }
    let m = assign_iou(&iou_matrix(&ab, &bb), PAIR_IOU_GATE);
    (m.matches, m.unmatched_rows, m.unmatched_cols)
}

/// Score-max fusion of two trackers' records for one frame.
///
/// For each IoU-paired `(a, b)`, `a` is emitted only if its score is strictly
/// higher; ties go to `b`. Unpaired records pass through.
pub fn fuse_frame(a: &[TrackRecord], b: &[TrackRecord], table: &mut IdPairTable) -> Vec<TrackRecord> {
    let (pairs, rest_a, rest_b) = pair_frame(a, b);
    let mut used = HashSet::new();
    let mut out = Vec::with_capacity(pairs.len() + rest_a.len() + rest_b.len());
    for (i, j) in pairs {
        let (ra, rb) = (&a[i], &b[j]);
        let (side, winner, loser_id) = if ra.score > rb.score {
            (Side::A, ra, rb.person_id)
        } else {
            (Side::B, rb, ra.person_id)
        };
        let id = table.resolve_pair(side, winner.person_id, loser_id, &mut used);
        out.push(TrackRecord { person_id: id, ..*winner });
    }
    for i in rest_a {
        let id = table.resolve_single(Side::A, a[i].person_id, &mut used);
        out.push(TrackRecord { person_id: id, ..a[i] });
    }
    for j in rest_b {
        let id = table.resolve_single(Side::B, b[j].person_id, &mut used);
        out.push(TrackRecord { person_id: id, ..b[j] });
    }
    out.sort_by_key(|r| r.person_id);
    out
}

/// Emits the RGB records on Bright frames and the thermal records on Dark
/// frames. Pairings between the two are learned on every frame so ids carry
/// across a switch.
pub fn switch_frame(
    rgb: &[TrackRecord],
    t: &[TrackRecord],
    label: BrightnessLabel,
    table: &mut IdPairTable,
) -> Vec<TrackRecord> {
    let (pairs, rest_rgb, rest_t) = pair_frame(rgb, t);
    let mut used = HashSet::new();
    let mut out = Vec::new();
    match label {
        BrightnessLabel::Bright => {
            for (i, j) in pairs {
                let id = table.resolve_pair(Side::A, rgb[i].person_id, t[j].person_id, &mut used);
                out.push(TrackRecord { person_id: id, ..rgb[i] });
            }
            for i in rest_rgb {
                let id = table.resolve_single(Side::A, rgb[i].person_id, &mut used);
                out.push(TrackRecord { person_id: id, ..rgb[i] });
            }
        }
        BrightnessLabel::Dark => {
            for (i, j) in pairs {
                let id = table.resolve_pair(Side::B, t[j].person_id, rgb[i].person_id, &mut used);
                out.push(TrackRecord { person_id: id, ..t[j] });
            }
            for j in rest_t {
                let id = table.resolve_single(Side::B, t[j].person_id, &mut used);
                out.push(TrackRecord { person_id: id, ..t[j] });
            }
        }
    }
    out.sort_by_key(|r| r.person_id);
    out
}

fn frames_of(a: &BTreeMap<u32, Vec<TrackRecord>>, b: &BTreeMap<u32, Vec<TrackRecord>>) -> BTreeSet<u32> {
    a.keys().chain(b.keys()).copied().collect()
}

/// [`fuse_frame`] over whole sequences.
pub fn fuse_sequence(a: &[TrackRecord], b: &[TrackRecord]) -> Vec<TrackRecord> {
    let ga = records_by_frame(a);
    let gb = records_by_frame(b);
    let mut table = IdPairTable::new();
    frames_of(&ga, &gb)
        .into_iter()
        .flat_map(|f| {
            fuse_frame(
                ga.get(&f).map_or(&[][..], Vec::as_slice),
                gb.get(&f).map_or(&[][..], Vec::as_slice),
                &mut table,
            )
        })
        .collect()
}

/// [`switch_frame`] over whole sequences. Every frame carrying records must
/// have a label.
pub fn switch_sequence(
    rgb: &[TrackRecord],
    t: &[TrackRecord],
    labels: &BTreeMap<u32, BrightnessLabel>,
) -> Result<Vec<TrackRecord>, ScheduleError> {
    let gr = records_by_frame(rgb);
    let gt = records_by_frame(t);
    let mut table = IdPairTable::new();
    let mut out = Vec::new();
    for f in frames_of(&gr, &gt) {
        let label = *labels.get(&f).ok_or(ScheduleError::MissingLabel(f))?;
        out.extend(switch_frame(
            gr.get(&f).map_or(&[][..], Vec::as_slice),
            gt.get(&f).map_or(&[][..], Vec::as_slice),
            label,
            &mut table,
        ));
    }
    Ok(out)
}
