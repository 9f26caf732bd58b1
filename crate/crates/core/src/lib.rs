//! RGB-thermal cooperative multi-person tracking and HO3 loop closure.
//!
//! The crate is detection-agnostic: detections arrive as boxes with scores
//! (from files, another process, or the built-in scene simulator) and flow
//! through the BYTE tracker, the cross-camera calibration and cooperation
//! strategies, the HO3 landmark extractor and the loop-closure ranker.

pub mod assignment;
pub mod calibration;
pub mod cooperative;
pub mod error;
pub mod geometry;
pub mod ho3;
pub mod io;
pub mod kalman;
pub mod loop_closure;
pub mod metrics;
pub mod sim;
pub mod tracker;

pub use error::{
    GeometryError, IoError, LandmarkError, LoopError, MetricsError, ScheduleError, SimError,
};
pub use geometry::{iou, BBox, Detection, Mask, Point2};
pub use tracker::{ByteTracker, Track, TrackRecord, TrackStatus, TrackerParams};
