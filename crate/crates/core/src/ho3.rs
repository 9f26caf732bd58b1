//! Human-object occlusion-ordering (HO3) landmarks: the lowest visible
//! human pixel in every column of a tracked person's box.

use std::collections::BTreeMap;

use crate::error::LandmarkError;
use crate::geometry::{mask_and_bbox, BBox, Mask, Point2};
use crate::tracker::TrackRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ho3Landmark {
    pub frame_id: u32,
    pub person_id: u32,
    pub point: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandmarkFilter {
    /// Points within this many pixels of the box bottom are treated as feet.
    pub margin: f64,
    /// If more than this fraction of a person's points are feet, the person
    /// is considered unoccluded and contributes nothing.
    pub unoccluded_ratio: f64,
}

impl Default for LandmarkFilter {
    fn default() -> Self {
        Self {
            margin: 2.0,
            unoccluded_ratio: 0.8,
        }
    }
}

/// Frame id -> landmarks, in increasing frame order.
pub type LandmarkMap = BTreeMap<u32, Vec<Ho3Landmark>>;

/// For every column of the clamped box, the set pixel with the largest y.
pub fn extract_lower_endpoints(region: &Mask, b: &BBox) -> Vec<Point2> {
    let Some(span) = b.pixel_span(region.width(), region.height()) else {
        return Vec::new();
    };
    (span.x0..span.x1)
        .filter_map(|x| {
            (span.y0..span.y1)
                .rev()
                .find(|&y| region.get(x, y))
                .map(|y| Point2::new(x as f64, y as f64))
        })
        .collect()
}

/// Drops foot points near the box bottom; drops everything when most points
/// are feet.
pub fn filter_landmarks(points: &[Point2], b: &BBox, f: &LandmarkFilter) -> Vec<Point2> {
    if points.is_empty() {
        return Vec::new();
    }
    // Last pixel row whose center lies inside the box.
    let bottom_row = (b.bottom() - 0.5).ceil() - 1.0;
    let keep: Vec<Point2> = points
        .iter()
        .filter(|p| p.y < bottom_row - f.margin)
        .copied()
        .collect();
    let removed = points.len() - keep.len();
    if removed as f64 > f.unoccluded_ratio * points.len() as f64 {
        Vec::new()
    } else {
        keep
    }
}

/// Landmarks for one person in one frame.
pub fn person_landmarks(mask: &Mask, r: &TrackRecord, f: &LandmarkFilter) -> Vec<Ho3Landmark> {
    let Ok(region) = mask_and_bbox(mask, &r.bbox) else {
        return Vec::new();
    };
    let pts = extract_lower_endpoints(&region, &r.bbox);
    filter_landmarks(&pts, &r.bbox, f)
        .into_iter()
        .map(|point| Ho3Landmark {
            frame_id: r.frame_id,
            person_id: r.person_id,
            point,
        })
        .collect()
}

/// Builds the map for every frame that has a mask. Frames without tracks
/// get empty lists; a tracked frame without a mask is an error.
pub fn build_landmark_map(
    masks: &BTreeMap<u32, Mask>,
    tracks: &[TrackRecord],
    f: &LandmarkFilter,
) -> Result<LandmarkMap, LandmarkError> {
    let mut map: LandmarkMap = masks.keys().map(|&k| (k, Vec::new())).collect();
    let mut sorted: Vec<&TrackRecord> = tracks.iter().collect();
    sorted.sort_by_key(|r| (r.frame_id, r.person_id));
    for r in sorted {
        let mask = masks
            .get(&r.frame_id)
            .ok_or(LandmarkError::MissingMask(r.frame_id))?;
        map.entry(r.frame_id)
            .or_default()
            .extend(person_landmarks(mask, r, f));
    }
    Ok(map)
}
