#ifndef DARKTRACK_H
#define DARKTRACK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DtStatus {
  DT_STATUS_OK = 0,
  DT_STATUS_NULL_POINTER = 1,
  DT_STATUS_INVALID_ARGUMENT = 2,
  DT_STATUS_INSUFFICIENT_POINTS = 3,
  DT_STATUS_DEGENERATE = 4,
  DT_STATUS_POINT_AT_INFINITY = 5,
  DT_STATUS_BUFFER_TOO_SMALL = 6,
  DT_STATUS_EMPTY_GROUND_TRUTH = 7,
  DT_STATUS_FRAME_ORDER = 8,
  DT_STATUS_PANIC = 99,
} DtStatus;

/**
 * Opaque tracker handle.
 */
typedef struct DtTracker DtTracker;

typedef struct DtTrackerParams {
  double high_score_thresh;
  double low_score_thresh;
  double iou_match_thresh_stage1;
  double iou_match_thresh_stage2;
  double new_track_score_thresh;
  uint32_t max_lost_frames;
  uint32_t min_hits_to_activate;
} DtTrackerParams;

/**
 * Box as `(left, top, width, height)` in pixels.
 */
typedef struct DtBox {
  double left;
  double top;
  double width;
  double height;
} DtBox;

typedef struct DtDetection {
  struct DtBox bbox;
  double score;
} DtDetection;

typedef struct DtTrackRecord {
  uint32_t frame_id;
  uint32_t person_id;
  struct DtBox bbox;
  double score;
} DtTrackRecord;

typedef struct DtCorrespondence {
  double sx;
  double sy;
  double tx;
  double ty;
} DtCorrespondence;

typedef struct DtMetrics {
  double mota;
  double idf1;
  double hota;
  size_t tp;
  size_t fp;
  size_t fn_;
  size_t idsw;
} DtMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of a status code.
 */
const char *dt_status_message(enum DtStatus status);

struct DtTrackerParams dt_tracker_params_default(void);

/**
 * Creates a tracker. `params` may be null for the defaults.
 *
 * # Safety
 * `params` is null or valid; `out` is writable.
 */
enum DtStatus dt_tracker_new(const struct DtTrackerParams *params, struct DtTracker **out);

/**
 * # Safety
 * `tracker` is null or came from `dt_tracker_new` and was not freed.
 */
void dt_tracker_free(struct DtTracker *tracker);

/**
 * Feeds one frame and stores its output rows in the handle.
 * `n_out` receives the number of rows, read back with `dt_tracker_records`.
 *
 * # Safety
 * `tracker` is live, `dets` points to `n_dets` detections, `n_out` is writable.
 */
enum DtStatus dt_tracker_step(struct DtTracker *tracker,
                              uint32_t frame_id,
                              const struct DtDetection *dets,
                              size_t n_dets,
                              size_t *n_out);

/**
 * Copies the rows of the last step into `out`. `written` always receives the
 * row count; a short buffer yields `BufferTooSmall` and no copy.
 *
 * # Safety
 * `tracker` is live, `out` has room for `capacity` rows, `written` is writable.
 */
enum DtStatus dt_tracker_records(const struct DtTracker *tracker,
                                 struct DtTrackRecord *out,
                                 size_t capacity,
                                 size_t *written);

/**
 * # Safety
 * `a`, `b` and `out` are valid.
 */
enum DtStatus dt_iou(const struct DtBox *a, const struct DtBox *b, double *out);

/**
 * Fits a source-to-target homography, written row-major into `out[9]`.
 * With `robust` set, RANSAC runs `iterations` rounds at `threshold` pixels.
 *
 * # Safety
 * `pairs` points to `n` entries; `out` has room for 9 doubles.
 */
enum DtStatus dt_estimate_homography(const struct DtCorrespondence *pairs,
                                     size_t n,
                                     bool robust,
                                     size_t iterations,
                                     double threshold,
                                     uint64_t seed,
                                     double *out);

/**
 * # Safety
 * `h` points to 9 doubles; `x_out` and `y_out` are writable.
 */
enum DtStatus dt_warp_point(const double *h, double x, double y, double *x_out, double *y_out);

/**
 * MOTA, IDF1 and HOTA of `pred` against `gt`.
 *
 * # Safety
 * `gt` and `pred` point to `n_gt` and `n_pred` rows; `out` is writable.
 */
enum DtStatus dt_evaluate(const struct DtTrackRecord *gt,
                          size_t n_gt,
                          const struct DtTrackRecord *pred,
                          size_t n_pred,
                          double iou_thresh,
                          struct DtMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DARKTRACK_H */
