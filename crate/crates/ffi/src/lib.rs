//! C ABI over the `darktrack` core.
//!
//! Every entry point returns a [`DtStatus`]. Outputs go through caller
//! pointers; a tracker is an opaque heap handle owned by the caller until
//! `dt_tracker_free`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use darktrack::calibration::{
    estimate_homography, estimate_homography_robust, warp_point, Correspondence, Homography, RobustOptions,
};
use darktrack::error::GeometryError;
use darktrack::metrics;
use darktrack::tracker::{ByteTracker, TrackRecord, TrackerParams};
use darktrack::{BBox, Detection, Point2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientPoints = 3,
    Degenerate = 4,
    PointAtInfinity = 5,
    BufferTooSmall = 6,
    EmptyGroundTruth = 7,
    FrameOrder = 8,
    Panic = 99,
}

/// Box as `(left, top, width, height)` in pixels.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtBox {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtDetection {
    pub bbox: DtBox,
    pub score: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtTrackRecord {
    pub frame_id: u32,
    pub person_id: u32,
    pub bbox: DtBox,
    pub score: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtTrackerParams {
    pub high_score_thresh: f64,
    pub low_score_thresh: f64,
    pub iou_match_thresh_stage1: f64,
    pub iou_match_thresh_stage2: f64,
    pub new_track_score_thresh: f64,
    pub max_lost_frames: u32,
    pub min_hits_to_activate: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtCorrespondence {
    pub sx: f64,
    pub sy: f64,
    pub tx: f64,
    pub ty: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtMetrics {
    pub mota: f64,
    pub idf1: f64,
    pub hota: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub idsw: usize,
}

/// Opaque tracker handle.
pub struct DtTracker {
    inner: ByteTracker,
    last_frame: Option<u32>,
    records: Vec<TrackRecord>,
}

impl From<DtTrackerParams> for TrackerParams {
    fn from(p: DtTrackerParams) -> Self {
        TrackerParams {
            high_score_thresh: p.high_score_thresh,
            low_score_thresh: p.low_score_thresh,
            iou_match_thresh_stage1: p.iou_match_thresh_stage1,
            iou_match_thresh_stage2: p.iou_match_thresh_stage2,
            new_track_score_thresh: p.new_track_score_thresh,
            max_lost_frames: p.max_lost_frames,
            min_hits_to_activate: p.min_hits_to_activate,
        }
    }
}

impl From<&TrackRecord> for DtTrackRecord {
    fn from(r: &TrackRecord) -> Self {
        DtTrackRecord {
            frame_id: r.frame_id,
            person_id: r.person_id,
            bbox: DtBox {
                left: r.bbox.left,
                top: r.bbox.top,
                width: r.bbox.width,
                height: r.bbox.height,
            },
            score: r.score,
        }
    }
}

impl From<GeometryError> for DtStatus {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::InsufficientPoints { .. } => DtStatus::InsufficientPoints,
            GeometryError::DegenerateConfiguration
            | GeometryError::DegenerateSample
            | GeometryError::DegenerateRegion
            | GeometryError::NumericalFailure => DtStatus::Degenerate,
            GeometryError::PointAtInfinity => DtStatus::PointAtInfinity,
            GeometryError::InvalidValue(_) => DtStatus::InvalidArgument,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), DtStatus>) -> DtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => DtStatus::Panic,
    }
}

/// Empty slices may come with a null pointer.
unsafe fn input<'a, T>(ptr: *const T, n: usize) -> Result<&'a [T], DtStatus> {
    if n == 0 {
        Ok(&[])
    } else if ptr.is_null() {
        Err(DtStatus::NullPointer)
    } else {
        Ok(slice::from_raw_parts(ptr, n))
    }
}

unsafe fn output<'a, T>(ptr: *mut T) -> Result<&'a mut T, DtStatus> {
    ptr.as_mut().ok_or(DtStatus::NullPointer)
}

fn to_bbox(b: &DtBox) -> Result<BBox, DtStatus> {
    BBox::new(b.left, b.top, b.width, b.height).map_err(DtStatus::from)
}

fn to_records(rows: &[DtTrackRecord]) -> Result<Vec<TrackRecord>, DtStatus> {
    rows.iter()
        .map(|r| {
            Ok(TrackRecord {
                frame_id: r.frame_id,
                person_id: r.person_id,
                bbox: to_bbox(&r.bbox)?,
                score: r.score,
            })
        })
        .collect()
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn dt_status_message(status: DtStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        DtStatus::Ok => b"ok\0",
        DtStatus::NullPointer => b"null pointer\0",
        DtStatus::InvalidArgument => b"invalid argument\0",
        DtStatus::InsufficientPoints => b"not enough correspondences\0",
        DtStatus::Degenerate => b"degenerate configuration\0",
        DtStatus::PointAtInfinity => b"point maps to infinity\0",
        DtStatus::BufferTooSmall => b"output buffer too small\0",
        DtStatus::EmptyGroundTruth => b"ground truth contains no boxes\0",
        DtStatus::FrameOrder => b"frame ids must increase\0",
        DtStatus::Panic => b"internal error\0",
    };
    s.as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn dt_tracker_params_default() -> DtTrackerParams {
    let p = TrackerParams::default();
    DtTrackerParams {
        high_score_thresh: p.high_score_thresh,
        low_score_thresh: p.low_score_thresh,
        iou_match_thresh_stage1: p.iou_match_thresh_stage1,
        iou_match_thresh_stage2: p.iou_match_thresh_stage2,
        new_track_score_thresh: p.new_track_score_thresh,
        max_lost_frames: p.max_lost_frames,
        min_hits_to_activate: p.min_hits_to_activate,
    }
}

/// Creates a tracker. `params` may be null for the defaults.
///
/// # Safety
/// `params` is null or valid; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dt_tracker_new(params: *const DtTrackerParams, out: *mut *mut DtTracker) -> DtStatus {
    guard(|| {
        let out = output(out)?;
        *out = std::ptr::null_mut();
        let p = params.as_ref().copied().unwrap_or_else(|| dt_tracker_params_default());
        let inner = ByteTracker::new(p.into())?;
        *out = Box::into_raw(Box::new(DtTracker {
            inner,
            last_frame: None,
            records: Vec::new(),
        }));
        Ok(())
    })
}

/// # Safety
/// `tracker` is null or came from `dt_tracker_new` and was not freed.
#[no_mangle]
pub unsafe extern "C" fn dt_tracker_free(tracker: *mut DtTracker) {
    if !tracker.is_null() {
        drop(Box::from_raw(tracker));
    }
}

/// Feeds one frame and stores its output rows in the handle.
/// `n_out` receives the number of rows, read back with `dt_tracker_records`.
///
/// # Safety
/// `tracker` is live, `dets` points to `n_dets` detections, `n_out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dt_tracker_step(
    tracker: *mut DtTracker,
    frame_id: u32,
    dets: *const DtDetection,
    n_dets: usize,
    n_out: *mut usize,
) -> DtStatus {
    guard(|| {
        let t = output(tracker)?;
        let n_out = output(n_out)?;
        *n_out = 0;
        if frame_id == 0 || t.last_frame.is_some_and(|prev| frame_id <= prev) {
            return Err(DtStatus::FrameOrder);
        }
        let dets = input(dets, n_dets)?
            .iter()
            .map(|d| Detection::new(to_bbox(&d.bbox)?, d.score).map_err(DtStatus::from))
            .collect::<Result<Vec<_>, _>>()?;
        t.records = t.inner.step(frame_id, &dets);
        t.last_frame = Some(frame_id);
        *n_out = t.records.len();
        Ok(())
    })
}

/// Copies the rows of the last step into `out`. `written` always receives the
/// row count; a short buffer yields `BufferTooSmall` and no copy.
///
/// # Safety
/// `tracker` is live, `out` has room for `capacity` rows, `written` is writable.
#[no_mangle]
pub unsafe extern "C" fn dt_tracker_records(
    tracker: *const DtTracker,
    out: *mut DtTrackRecord,
    capacity: usize,
    written: *mut usize,
) -> DtStatus {
    guard(|| {
        let t = tracker.as_ref().ok_or(DtStatus::NullPointer)?;
        let written = output(written)?;
        *written = t.records.len();
        if capacity < t.records.len() {
            return Err(DtStatus::BufferTooSmall);
        }
        if t.records.is_empty() {
            return Ok(());
        }
        if out.is_null() {
            return Err(DtStatus::NullPointer);
        }
        let dst = slice::from_raw_parts_mut(out, t.records.len());
        for (d, r) in dst.iter_mut().zip(&t.records) {
            *d = r.into();
        }
        Ok(())
    })
}

/// # Safety
/// `a`, `b` and `out` are valid.
#[no_mangle]
pub unsafe extern "C" fn dt_iou(a: *const DtBox, b: *const DtBox, out: *mut f64) -> DtStatus {
    guard(|| {
        let a = to_bbox(a.as_ref().ok_or(DtStatus::NullPointer)?)?;
        let b = to_bbox(b.as_ref().ok_or(DtStatus::NullPointer)?)?;
        *output(out)? = darktrack::iou(&a, &b);
        Ok(())
    })
}

/// Fits a source-to-target homography, written row-major into `out[9]`.
/// With `robust` set, RANSAC runs `iterations` rounds at `threshold` pixels.
///
/// # Safety
/// `pairs` points to `n` entries; `out` has room for 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn dt_estimate_homography(
    pairs: *const DtCorrespondence,
    n: usize,
    robust: bool,
    iterations: usize,
    threshold: f64,
    seed: u64,
    out: *mut f64,
) -> DtStatus {
    guard(|| {
        let c: Vec<Correspondence> = input(pairs, n)?
            .iter()
            .map(|p| Correspondence::new(Point2::new(p.sx, p.sy), Point2::new(p.tx, p.ty)))
            .collect();
        if out.is_null() {
            return Err(DtStatus::NullPointer);
        }
        let h = if robust {
            let opts = RobustOptions {
                iterations,
                inlier_threshold: threshold,
                seed,
            };
            estimate_homography_robust(&c, &opts)?
        } else {
            estimate_homography(&c)?
        };
        slice::from_raw_parts_mut(out, 9).copy_from_slice(&h.to_row_major());
        Ok(())
    })
}

/// # Safety
/// `h` points to 9 doubles; `x_out` and `y_out` are writable.
#[no_mangle]
pub unsafe extern "C" fn dt_warp_point(h: *const f64, x: f64, y: f64, x_out: *mut f64, y_out: *mut f64) -> DtStatus {
    guard(|| {
        let m: [f64; 9] = input(h, 9)?.try_into().map_err(|_| DtStatus::InvalidArgument)?;
        let h = Homography::from_row_major(m)?;
        let p = warp_point(&h, &Point2::new(x, y))?;
        *output(x_out)? = p.x;
        *output(y_out)? = p.y;
        Ok(())
    })
}

/// MOTA, IDF1 and HOTA of `pred` against `gt`.
///
/// # Safety
/// `gt` and `pred` point to `n_gt` and `n_pred` rows; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dt_evaluate(
    gt: *const DtTrackRecord,
    n_gt: usize,
    pred: *const DtTrackRecord,
    n_pred: usize,
    iou_thresh: f64,
    out: *mut DtMetrics,
) -> DtStatus {
    guard(|| {
        let gt = to_records(input(gt, n_gt)?)?;
        let pred = to_records(input(pred, n_pred)?)?;
        let out = output(out)?;
        if !(0.0..=1.0).contains(&iou_thresh) {
            return Err(DtStatus::InvalidArgument);
        }
        let r = metrics::evaluate(&gt, &pred, iou_thresh).map_err(|_| DtStatus::EmptyGroundTruth)?;
        *out = DtMetrics {
            mota: r.mota,
            idf1: r.idf1,
            hota: r.hota,
            tp: r.tp,
            fp: r.fp,
            fn_: r.fn_,
            idsw: r.idsw,
        };
        Ok(())
    })
}
