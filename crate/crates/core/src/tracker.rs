//! BYTE tracking-by-detection: Kalman prediction, a high-score association
//! stage, a low-score recovery stage, and track lifecycle management.

use std::collections::BTreeMap;

use crate::assignment::assign_iou;
use crate::error::GeometryError;
use crate::geometry::{iou_matrix, BBox, Detection};
use crate::kalman::{KalmanFilter, KalmanState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackStatus {
    Tentative,
    Active,
    Lost,
    Removed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u32,
    pub state: KalmanState,
    pub status: TrackStatus,
    pub frames_since_update: u32,
    pub hits: u32,
    pub last_score: f64,
}

/// One `(frame, person id, box, score)` output row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRecord {
    pub frame_id: u32,
    pub person_id: u32,
    pub bbox: BBox,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerParams {
    pub high_score_thresh: f64,
    pub low_score_thresh: f64,
    pub iou_match_thresh_stage1: f64,
    pub iou_match_thresh_stage2: f64,
    pub new_track_score_thresh: f64,
    pub max_lost_frames: u32,
    pub min_hits_to_activate: u32,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            high_score_thresh: 0.6,
            low_score_thresh: 0.1,
            iou_match_thresh_stage1: 0.2,
            iou_match_thresh_stage2: 0.5,
            new_track_score_thresh: 0.7,
            max_lost_frames: 30,
            min_hits_to_activate: 1,
        }
    }
}

impl TrackerParams {
    /// Checks threshold ranges. `low == high` is accepted and disables the
    /// low-score stage.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let unit = [
            ("high_score_thresh", self.high_score_thresh),
            ("low_score_thresh", self.low_score_thresh),
            ("iou_match_thresh_stage1", self.iou_match_thresh_stage1),
            ("iou_match_thresh_stage2", self.iou_match_thresh_stage2),
            ("new_track_score_thresh", self.new_track_score_thresh),
        ];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(GeometryError::InvalidValue(format!("{name} = {v} not in [0, 1]")));
            }
        }
        if self.low_score_thresh > self.high_score_thresh {
            return Err(GeometryError::InvalidValue(
                "low_score_thresh must not exceed high_score_thresh".into(),
            ));
        }
        Ok(())
    }
}

/// Stateful tracker for a single sequence.
#[derive(Debug, Clone)]
pub struct ByteTracker {
    params: TrackerParams,
    kf: KalmanFilter,
    tracks: Vec<Track>,
    next_id: u32,
    last_frame: Option<u32>,
}

impl ByteTracker {
    pub fn new(params: TrackerParams) -> Result<Self, GeometryError> {
        params.validate()?;
        Ok(Self {
            params,
            kf: KalmanFilter::default(),
            tracks: Vec::new(),
            next_id: 1,
            last_frame: None,
        })
    }

    pub fn params(&self) -> &TrackerParams {
        &self.params
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Processes one frame. Frame ids must be strictly increasing; a gap of
    /// `k` frames advances the motion model `k` steps.
    pub fn step(&mut self, frame_id: u32, dets: &[Detection]) -> Vec<TrackRecord> {
        let steps = match self.last_frame {
            Some(prev) => {
                assert!(frame_id > prev, "frame ids must increase: {prev} then {frame_id}");
                frame_id - prev
            }
            None => 1,
        };
        self.last_frame = Some(frame_id);
        let tracks = std::mem::take(&mut self.tracks);
        let (records, tracks) = byte_step_with(
            tracks,
            dets,
            &self.params,
            &self.kf,
            frame_id,
            steps,
            &mut self.next_id,
        );
        self.tracks = tracks;
        records
    }
}

/// Functional form of one tracker step. `next_id` is the id source shared
/// across calls so ids are never reused.
pub fn byte_step(
    tracks: Vec<Track>,
    dets: &[Detection],
    p: &TrackerParams,
    frame_id: u32,
    next_id: &mut u32,
) -> (Vec<TrackRecord>, Vec<Track>) {
    byte_step_with(tracks, dets, p, &KalmanFilter::default(), frame_id, 1, next_id)
}

fn byte_step_with(
    tracks: Vec<Track>,
    dets: &[Detection],
    p: &TrackerParams,
    kf: &KalmanFilter,
    frame_id: u32,
    predict_steps: u32,
    next_id: &mut u32,
) -> (Vec<TrackRecord>, Vec<Track>) {
    let mut tracks: Vec<Track> = tracks
        .into_iter()
        .filter(|t| t.status != TrackStatus::Removed)
        .collect();

    let high: Vec<usize> = (0..dets.len())
        .filter(|&i| dets[i].score >= p.high_score_thresh)
        .collect();
    let low: Vec<usize> = (0..dets.len())
        .filter(|&i| dets[i].score >= p.low_score_thresh && dets[i].score < p.high_score_thresh)
        .collect();

    for t in tracks.iter_mut() {
        for _ in 0..predict_steps {
            t.state = kf.predict(&t.state);
        }
    }

    let mut matched = vec![false; tracks.len()];
    let mut high_used = vec![false; high.len()];

    // Stage 1: active and lost tracks against high-score detections.
    let pool: Vec<usize> = (0..tracks.len())
        .filter(|&i| matches!(tracks[i].status, TrackStatus::Active | TrackStatus::Lost))
        .collect();
    for (ti, di) in associate(&tracks, &pool, dets, &high, p.iou_match_thresh_stage1) {
        apply_match(&mut tracks[pool[ti]], &dets[high[di]], kf, p);
        matched[pool[ti]] = true;
        high_used[di] = true;
    }

    // Stage 2: still-unmatched active tracks against low-score detections.
    let pool: Vec<usize> = (0..tracks.len())
        .filter(|&i| !matched[i] && tracks[i].status == TrackStatus::Active)
        .collect();
    for (ti, di) in associate(&tracks, &pool, dets, &low, p.iou_match_thresh_stage2) {
        apply_match(&mut tracks[pool[ti]], &dets[low[di]], kf, p);
        matched[pool[ti]] = true;
    }

    // Tentative tracks confirm against the leftover high-score detections.
    let pool: Vec<usize> = (0..tracks.len())
        .filter(|&i| tracks[i].status == TrackStatus::Tentative)
        .collect();
    let remaining_high: Vec<usize> = (0..high.len()).filter(|&k| !high_used[k]).collect();
    let remaining_dets: Vec<usize> = remaining_high.iter().map(|&k| high[k]).collect();
    for (ti, di) in associate(&tracks, &pool, dets, &remaining_dets, p.iou_match_thresh_stage1) {
        apply_match(&mut tracks[pool[ti]], &dets[remaining_dets[di]], kf, p);
        matched[pool[ti]] = true;
        high_used[remaining_high[di]] = true;
    }

    for (t, &was_matched) in tracks.iter_mut().zip(&matched) {
        if was_matched {
            continue;
        }
        t.frames_since_update += 1;
        match t.status {
            TrackStatus::Tentative => t.status = TrackStatus::Removed,
            TrackStatus::Active | TrackStatus::Lost => {
                t.status = if t.frames_since_update > p.max_lost_frames {
                    TrackStatus::Removed
                } else {
                    TrackStatus::Lost
                };
            }
            TrackStatus::Removed => {}
        }
    }

    for (k, &di) in high.iter().enumerate() {
        let d = &dets[di];
        if high_used[k] || d.score < p.new_track_score_thresh {
            continue;
        }
        let status = if p.min_hits_to_activate <= 1 {
            TrackStatus::Active
        } else {
            TrackStatus::Tentative
        };
        tracks.push(Track {
            id: *next_id,
            state: kf.initiate(&d.bbox),
            status,
            frames_since_update: 0,
            hits: 1,
            last_score: d.score,
        });
        *next_id += 1;
    }

    let mut records: Vec<TrackRecord> = tracks
        .iter()
        .filter(|t| t.status == TrackStatus::Active && t.frames_since_update == 0)
        .map(|t| TrackRecord {
            frame_id,
            person_id: t.id,
            bbox: t.state.bbox(),
            score: t.last_score,
        })
        .collect();
    records.sort_by_key(|r| r.person_id);
    (records, tracks)
}

fn associate(
    tracks: &[Track],
    pool: &[usize],
    dets: &[Detection],
    det_idx: &[usize],
    gate: f64,
) -> Vec<(usize, usize)> {
    if pool.is_empty() || det_idx.is_empty() {
        return Vec::new();
    }
    let tb: Vec<BBox> = pool.iter().map(|&i| tracks[i].state.bbox()).collect();
    let db: Vec<BBox> = det_idx.iter().map(|&i| dets[i].bbox).collect();
    assign_iou(&iou_matrix(&tb, &db), gate).matches
}

fn apply_match(t: &mut Track, d: &Detection, kf: &KalmanFilter, p: &TrackerParams) {
    t.state = kf
        .update(&t.state, &d.bbox)
        .unwrap_or_else(|_| kf.initiate(&d.bbox));
    t.frames_since_update = 0;
    t.hits += 1;
    t.last_score = d.score;
    t.status = match t.status {
        TrackStatus::Tentative if t.hits < p.min_hits_to_activate => TrackStatus::Tentative,
        _ => TrackStatus::Active,
    };
}

/// Groups records by frame id, preserving input order within a frame.
pub fn records_by_frame(records: &[TrackRecord]) -> BTreeMap<u32, Vec<TrackRecord>> {
    let mut out: BTreeMap<u32, Vec<TrackRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.frame_id).or_default().push(*r);
    }
    out
}

/// Runs a fresh tracker over a whole sequence; frame `k` of the input gets
/// frame id `k + 1`.
pub fn run_sequence(dets_per_frame: &[Vec<Detection>], p: &TrackerParams) -> Vec<TrackRecord> {
    let mut tracker = ByteTracker::new(*p).expect("invalid tracker parameters");
    dets_per_frame
        .iter()
        .enumerate()
        .flat_map(|(k, dets)| tracker.step(k as u32 + 1, dets))
        .collect()
}
