//! CLEAR-MOT (MOTA, TP/FP/FN, IDSW), IDF1 and HOTA.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::assignment::{assign_iou, min_cost_matching};
use crate::error::MetricsError;
use crate::geometry::{iou, iou_matrix, BBox};
use crate::tracker::{records_by_frame, TrackRecord};

pub const DEFAULT_IOU_THRESH: f64 = 0.5;

/// Per-frame outcome of CLEAR-MOT matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrameMatch {
    /// `(gt_id, pred_id)` pairs.
    pub matches: Vec<(u32, u32)>,
    pub fp: usize,
    pub fn_: usize,
    pub idsw: usize,
}

/// CLEAR-MOT matching for one frame. `last_match` maps each GT id to the
/// prediction id it was most recently matched to and is updated in place.
pub fn clear_match(
    gt_t: &[TrackRecord],
    pred_t: &[TrackRecord],
    last_match: &mut HashMap<u32, u32>,
    iou_thresh: f64,
) -> FrameMatch {
    let mut gt_used = vec![false; gt_t.len()];
    let mut pred_used = vec![false; pred_t.len()];
    let mut matches = Vec::new();

    // Carry over correspondences that still overlap.
    for (gi, g) in gt_t.iter().enumerate() {
        let Some(&pid) = last_match.get(&g.person_id) else {
            continue;
        };
        if let Some(pi) = pred_t
            .iter()
            .position(|p| p.person_id == pid)
            .filter(|&pi| !pred_used[pi] && iou(&g.bbox, &pred_t[pi].bbox) >= iou_thresh)
        {
            gt_used[gi] = true;
            pred_used[pi] = true;
            matches.push((g.person_id, pid));
        }
    }

    let free_gt: Vec<usize> = (0..gt_t.len()).filter(|&i| !gt_used[i]).collect();
    let free_pred: Vec<usize> = (0..pred_t.len()).filter(|&i| !pred_used[i]).collect();
    let gb: Vec<BBox> = free_gt.iter().map(|&i| gt_t[i].bbox).collect();
    let pb: Vec<BBox> = free_pred.iter().map(|&i| pred_t[i].bbox).collect();
    let mut idsw = 0;
    for (a, b) in assign_iou(&iou_matrix(&gb, &pb), iou_thresh).matches {
        let (g, p) = (&gt_t[free_gt[a]], &pred_t[free_pred[b]]);
        if last_match.get(&g.person_id).is_some_and(|&prev| prev != p.person_id) {
            idsw += 1;
        }
        gt_used[free_gt[a]] = true;
        pred_used[free_pred[b]] = true;
        matches.push((g.person_id, p.person_id));
    }
    for &(g, p) in &matches {
        last_match.insert(g, p);
    }
    matches.sort_unstable();
    FrameMatch {
        fp: pred_used.iter().filter(|u| !**u).count(),
        fn_: gt_used.iter().filter(|u| !**u).count(),
        matches,
        idsw,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearMetrics {
    pub mota: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub idsw: usize,
    pub num_gt: usize,
}

fn frame_union<'a>(
    gt: &'a BTreeMap<u32, Vec<TrackRecord>>,
    pred: &'a BTreeMap<u32, Vec<TrackRecord>>,
) -> BTreeSet<u32> {
    gt.keys().chain(pred.keys()).copied().collect()
}

pub fn compute_mota(
    gt: &[TrackRecord],
    pred: &[TrackRecord],
    iou_thresh: f64,
) -> Result<ClearMetrics, MetricsError> {
    if gt.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    let g = records_by_frame(gt);
    let p = records_by_frame(pred);
    let mut last = HashMap::new();
    let (mut tp, mut fp, mut fn_, mut idsw) = (0, 0, 0, 0);
    for f in frame_union(&g, &p) {
        let m = clear_match(
            g.get(&f).map_or(&[][..], Vec::as_slice),
            p.get(&f).map_or(&[][..], Vec::as_slice),
            &mut last,
            iou_thresh,
        );
        tp += m.matches.len();
        fp += m.fp;
        fn_ += m.fn_;
        idsw += m.idsw;
    }
    let num_gt = gt.len();
    Ok(ClearMetrics {
        mota: 100.0 * (1.0 - (fn_ + fp + idsw) as f64 / num_gt as f64),
        tp,
        fp,
        fn_,
        idsw,
        num_gt,
    })
}

fn id_index(records: &[TrackRecord]) -> BTreeMap<u32, usize> {
    let ids: BTreeSet<u32> = records.iter().map(|r| r.person_id).collect();
    ids.into_iter().enumerate().map(|(k, id)| (id, k)).collect()
}

/// Frame-overlap counts between every GT identity and every predicted
/// identity (IoU at or above the threshold), used for IDF1.
pub fn identity_overlaps(gt: &[TrackRecord], pred: &[TrackRecord], iou_thresh: f64) -> Vec<Vec<f64>> {
    let gi = id_index(gt);
    let pi = id_index(pred);
    let mut counts = vec![vec![0.0; pi.len()]; gi.len()];
    let p = records_by_frame(pred);
    for (f, gs) in records_by_frame(gt) {
        let Some(ps) = p.get(&f) else { continue };
        for g in &gs {
            for q in ps {
                if iou(&g.bbox, &q.bbox) >= iou_thresh {
                    counts[gi[&g.person_id]][pi[&q.person_id]] += 1.0;
                }
            }
        }
    }
    counts
}

/// Sequence-level identity F1 in percent.
pub fn compute_idf1(gt: &[TrackRecord], pred: &[TrackRecord], iou_thresh: f64) -> Result<f64, MetricsError> {
    if gt.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let overlaps = identity_overlaps(gt, pred, iou_thresh);
    let cost: Vec<Vec<f64>> = overlaps
        .iter()
        .map(|r| r.iter().map(|v| -v).collect())
        .collect();
    let idtp: f64 = min_cost_matching(&cost)
        .iter()
        .map(|&(i, j)| overlaps[i][j])
        .sum();
    Ok(100.0 * 2.0 * idtp / (gt.len() + pred.len()) as f64)
}

/// Localisation thresholds used by HOTA: 0.05, 0.10, ..., 0.95.
pub fn hota_alphas() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

/// Inputs to HOTA's per-frame matching: IoU matrices and the global
/// alignment score between identities.
#[derive(Debug, Clone)]
pub struct HotaPrep {
    /// Per frame: `(gt indices, pred indices, IoU matrix)`.
    pub frames: Vec<(Vec<usize>, Vec<usize>, Vec<Vec<f64>>)>,
    pub global_alignment: Vec<Vec<f64>>,
    pub gt_id_count: Vec<f64>,
    pub pred_id_count: Vec<f64>,
}

pub fn hota_prepare(gt: &[TrackRecord], pred: &[TrackRecord]) -> HotaPrep {
    let gi = id_index(gt);
    let pi = id_index(pred);
    let g = records_by_frame(gt);
    let p = records_by_frame(pred);
    let mut potential = vec![vec![0.0; pi.len()]; gi.len()];
    let mut gt_id_count = vec![0.0; gi.len()];
    let mut pred_id_count = vec![0.0; pi.len()];
    let mut frames = Vec::new();
    for f in frame_union(&g, &p) {
        let gs = g.get(&f).map_or(&[][..], Vec::as_slice);
        let ps = p.get(&f).map_or(&[][..], Vec::as_slice);
        let gidx: Vec<usize> = gs.iter().map(|r| gi[&r.person_id]).collect();
        let pidx: Vec<usize> = ps.iter().map(|r| pi[&r.person_id]).collect();
        let gb: Vec<BBox> = gs.iter().map(|r| r.bbox).collect();
        let pb: Vec<BBox> = ps.iter().map(|r| r.bbox).collect();
        let sim = iou_matrix(&gb, &pb);
        let row_sum: Vec<f64> = sim.iter().map(|r| r.iter().sum()).collect();
        let col_sum: Vec<f64> = (0..pb.len()).map(|j| sim.iter().map(|r| r[j]).sum()).collect();
        for (a, &gk) in gidx.iter().enumerate() {
            for (b, &pk) in pidx.iter().enumerate() {
                let denom = row_sum[a] + col_sum[b] - sim[a][b];
                if denom > f64::EPSILON {
                    potential[gk][pk] += sim[a][b] / denom;
                }
            }
        }
        for &gk in &gidx {
            gt_id_count[gk] += 1.0;
        }
        for &pk in &pidx {
            pred_id_count[pk] += 1.0;
        }
        frames.push((gidx, pidx, sim));
    }
    let global_alignment = potential
        .iter()
        .enumerate()
        .map(|(a, row)| {
            row.iter()
                .enumerate()
                .map(|(b, &v)| v / (gt_id_count[a] + pred_id_count[b] - v))
                .collect()
        })
        .collect();
    HotaPrep {
        frames,
        global_alignment,
        gt_id_count,
        pred_id_count,
    }
}

/// HOTA from an explicit per-frame matching (`(row, col)` pairs into each
/// frame's IoU matrix). Exposed so alternative matchers can be compared.
pub fn hota_from_matchings(prep: &HotaPrep, matchings: &[Vec<(usize, usize)>]) -> f64 {
    let alphas = hota_alphas();
    let ng = prep.gt_id_count.len();
    let np = prep.pred_id_count.len();
    let mut total = 0.0;
    for &alpha in &alphas {
        let (mut tp, mut fn_, mut fp) = (0.0, 0.0, 0.0);
        let mut counts = vec![vec![0.0; np]; ng];
        for ((gidx, pidx, sim), matching) in prep.frames.iter().zip(matchings) {
            let mut hit = 0usize;
            for &(a, b) in matching {
                if sim[a][b] >= alpha - f64::EPSILON {
                    hit += 1;
                    counts[gidx[a]][pidx[b]] += 1.0;
                }
            }
            tp += hit as f64;
            fn_ += (gidx.len() - hit) as f64;
            fp += (pidx.len() - hit) as f64;
        }
        let mut ass_sum = 0.0;
        for a in 0..ng {
            for b in 0..np {
                let c = counts[a][b];
                if c > 0.0 {
                    ass_sum += c * c / (prep.gt_id_count[a] + prep.pred_id_count[b] - c);
                }
            }
        }
        let ass_a = ass_sum / tp.max(1.0);
        let det_a = tp / (tp + fn_ + fp).max(1.0);
        total += (det_a * ass_a).sqrt();
    }
    100.0 * total / alphas.len() as f64
}

/// Per-frame matching that maximises `global_alignment * IoU`.
pub fn hota_matchings(prep: &HotaPrep) -> Vec<Vec<(usize, usize)>> {
    prep.frames
        .iter()
        .map(|(gidx, pidx, sim)| {
            let cost: Vec<Vec<f64>> = gidx
                .iter()
                .enumerate()
                .map(|(a, &gk)| {
                    pidx.iter()
                        .enumerate()
                        .map(|(b, &pk)| -(prep.global_alignment[gk][pk] * sim[a][b]))
                        .collect()
                })
                .collect();
            min_cost_matching(&cost)
        })
        .collect()
}

pub fn compute_hota(gt: &[TrackRecord], pred: &[TrackRecord]) -> Result<f64, MetricsError> {
    if gt.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let prep = hota_prepare(gt, pred);
    let matchings = hota_matchings(&prep);
    Ok(hota_from_matchings(&prep, &matchings))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mota: f64,
    pub idf1: f64,
    pub hota: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub idsw: usize,
}

pub fn evaluate(gt: &[TrackRecord], pred: &[TrackRecord], iou_thresh: f64) -> Result<MetricsReport, MetricsError> {
    let clear = compute_mota(gt, pred, iou_thresh)?;
    Ok(MetricsReport {
        mota: clear.mota,
        idf1: compute_idf1(gt, pred, iou_thresh)?,
        hota: compute_hota(gt, pred)?,
        tp: clear.tp,
        fp: clear.fp,
        fn_: clear.fn_,
        idsw: clear.idsw,
    })
}

impl MetricsReport {
    /// `metric value` lines.
    pub fn to_lines(&self) -> String {
        format!(
            "MOTA {:.1}\nIDF1 {:.1}\nHOTA {:.1}\nTP {}\nFP {}\nFN {}\nIDSW {}\n",
            self.mota, self.idf1, self.hota, self.tp, self.fp, self.fn_, self.idsw
        )
    }
}

/// Aligned text table, one row per named run.
pub fn format_table(rows: &[(String, MetricsReport)]) -> String {
    let name_w = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max("Tracker".len());
    let mut out = format!(
        "{:<name_w$} {:>6} {:>6} {:>6} {:>6} {:>7} {:>7} {:>5}\n",
        "Tracker", "MOTA", "IDF1", "HOTA", "FP", "TP", "FN", "IDSW"
    );
    for (name, r) in rows {
        out.push_str(&format!(
            "{:<name_w$} {:>6.1} {:>6.1} {:>6.1} {:>6} {:>7} {:>7} {:>5}\n",
            name, r.mota, r.idf1, r.hota, r.fp, r.tp, r.fn_, r.idsw
        ));
    }
    out
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_table(&[("sequence".to_string(), *self)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(frame: u32, id: u32, l: f64, t: f64) -> TrackRecord {
        TrackRecord {
            frame_id: frame,
            person_id: id,
            bbox: BBox::new(l, t, 10.0, 20.0).unwrap(),
            score: 1.0,
        }
    }

    fn idsw_scenario() -> (Vec<TrackRecord>, Vec<TrackRecord>) {
        let gt = vec![rec(1, 7, 0.0, 0.0), rec(2, 7, 0.0, 0.0), rec(3, 7, 0.0, 0.0)];
        let pred = vec![rec(1, 1, 0.0, 0.0), rec(2, 1, 0.0, 0.0), rec(3, 2, 0.0, 0.0)];
        (gt, pred)
    }

    #[test]
    fn perfect_prediction() {
        let gt: Vec<_> = (1..=5)
            .flat_map(|f| [rec(f, 1, f as f64, 0.0), rec(f, 2, 50.0, f as f64)])
            .collect();
        let r = evaluate(&gt, &gt, 0.5).unwrap();
        assert_eq!(r.mota, 100.0);
        assert_eq!((r.tp, r.fp, r.fn_, r.idsw), (10, 0, 0, 0));
        assert_eq!(r.idf1, 100.0);
        assert!((r.hota - 100.0).abs() < 1e-9);
    }

    #[test]
    fn empty_prediction() {
        let gt = vec![rec(1, 1, 0.0, 0.0), rec(1, 2, 40.0, 0.0)];
        let r = evaluate(&gt, &[], 0.5).unwrap();
        assert_eq!(r.fn_, 2);
        assert_eq!(r.idf1, 0.0);
        assert_eq!(r.hota, 0.0);
    }

    #[test]
    fn empty_ground_truth_is_an_error() {
        let p = vec![rec(1, 1, 0.0, 0.0)];
        assert_eq!(compute_mota(&[], &p, 0.5), Err(MetricsError::EmptyGroundTruth));
        assert_eq!(compute_idf1(&[], &p, 0.5), Err(MetricsError::EmptyGroundTruth));
        assert_eq!(compute_hota(&[], &p), Err(MetricsError::EmptyGroundTruth));
    }

    #[test]
    fn three_frame_identity_switch() {
        let (gt, pred) = idsw_scenario();
        let m = compute_mota(&gt, &pred, 0.5).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.idsw), (3, 0, 0, 1));
        assert!((m.mota - 100.0 * (1.0 - 1.0 / 3.0)).abs() < 1e-9);
        let idf1 = compute_idf1(&gt, &pred, 0.5).unwrap();
        assert!((idf1 - 400.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn hand_counted_mota_seventy() {
        // 10 GT boxes over 5 frames; one missed, one spurious, one switch.
        let mut gt = Vec::new();
        let mut pred = Vec::new();
        for f in 1..=5 {
            gt.push(rec(f, 1, 0.0, 0.0));
            gt.push(rec(f, 2, 100.0, 0.0));
            pred.push(rec(f, 10, 0.0, 0.0));
            if f != 3 {
                pred.push(rec(f, if f < 4 { 20 } else { 21 }, 100.0, 0.0));
            }
        }
        pred.push(rec(2, 30, 300.0, 300.0));
        let m = compute_mota(&gt, &pred, 0.5).unwrap();
        assert_eq!((m.fn_, m.fp, m.idsw), (1, 1, 1));
        assert!((m.mota - 70.0).abs() < 1e-9);
    }

    #[test]
    fn carry_over_keeps_previous_pairing() {
        // Two overlapping predictions; the previous partner is kept even when
        // the other prediction overlaps more.
        let mut last = HashMap::from([(1, 5)]);
        let gt = [rec(1, 1, 0.0, 0.0)];
        let pred = [rec(1, 5, 3.0, 0.0), rec(1, 6, 0.0, 0.0)];
        let m = clear_match(&gt, &pred, &mut last, 0.5);
        assert_eq!(m.matches, vec![(1, 5)]);
        assert_eq!((m.idsw, m.fp), (0, 1));
    }

    #[test]
    fn table_formats_one_decimal() {
        let r = MetricsReport {
            mota: 99.84,
            idf1: 100.0,
            hota: 99.91,
            tp: 8273,
            fp: 5,
            fn_: 3,
            idsw: 0,
        };
        let t = format_table(&[("BRIGHT".into(), r)]);
        assert!(t.contains("99.8") && t.contains("100.0") && t.contains("8273"));
        assert!(r.to_lines().starts_with("MOTA 99.8\n"));
    }

    #[test]
    fn published_count_sanity() {
        // FP 5, FN 3, TP 8273 -> 8276 GT boxes. With no switches MOTA is
        // 99.9; the reported 99.8 implies between 5 and 12 switches.
        let gt_boxes = 8273.0 + 3.0;
        assert_eq!(format!("{:.1}", 100.0 * (1.0 - 8.0 / gt_boxes)), "99.9");
        for idsw in 5..=12 {
            let mota = 100.0 * (1.0 - (3.0 + 5.0 + idsw as f64) / gt_boxes);
            assert_eq!(format!("{mota:.1}"), "99.8");
        }
    }
}
