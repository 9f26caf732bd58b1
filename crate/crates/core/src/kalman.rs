//! Constant-velocity Kalman filter over `(cx, cy, aspect, height)` and their
//! per-frame velocities.

use nalgebra::{SMatrix, SVector};

use crate::error::GeometryError;
use crate::geometry::{bbox_to_state_vec, state_vec_to_bbox, BBox};

pub type StateVec = SVector<f64, 8>;
pub type StateCov = SMatrix<f64, 8, 8>;
type MeasVec = SVector<f64, 4>;
type MeasCov = SMatrix<f64, 4, 4>;
type Observation = SMatrix<f64, 4, 8>;

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    pub mean: StateVec,
    pub covariance: StateCov,
}

impl KalmanState {
    pub fn bbox(&self) -> BBox {
        state_vec_to_bbox(&[self.mean[0], self.mean[1], self.mean[2], self.mean[3]])
    }

    /// Symmetric within `tol` with a non-negative diagonal.
    pub fn is_well_formed(&self, tol: f64) -> bool {
        let p = &self.covariance;
        (0..8).all(|i| p[(i, i)] >= 0.0)
            && (0..8).all(|i| (0..8).all(|j| (p[(i, j)] - p[(j, i)]).abs() <= tol))
    }
}

/// Noise model with standard deviations proportional to box height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanFilter {
    pub std_weight_position: f64,
    pub std_weight_velocity: f64,
}

impl Default for KalmanFilter {
    fn default() -> Self {
        Self {
            std_weight_position: 1.0 / 20.0,
            std_weight_velocity: 1.0 / 160.0,
        }
    }
}

fn transition() -> StateCov {
    let mut f = StateCov::identity();
    for i in 0..4 {
        f[(i, i + 4)] = 1.0;
    }
    f
}

fn observation() -> Observation {
    let mut h = Observation::zeros();
    for i in 0..4 {
        h[(i, i)] = 1.0;
    }
    h
}

fn symmetrize(p: &StateCov) -> StateCov {
    (p + p.transpose()) * 0.5
}

impl KalmanFilter {
    /// Track birth from an unassociated measurement, zero velocity.
    pub fn initiate(&self, z: &BBox) -> KalmanState {
        let m = bbox_to_state_vec(z);
        let h = m[3];
        let wp = self.std_weight_position;
        let wv = self.std_weight_velocity;
        let std = [
            2.0 * wp * h,
            2.0 * wp * h,
            1e-2,
            2.0 * wp * h,
            10.0 * wv * h,
            10.0 * wv * h,
            1e-5,
            10.0 * wv * h,
        ];
        let mut mean = StateVec::zeros();
        mean.fixed_rows_mut::<4>(0).copy_from_slice(&m);
        KalmanState {
            mean,
            covariance: StateCov::from_diagonal(&StateVec::from_iterator(std.iter().map(|s| s * s))),
        }
    }

    pub fn process_noise(&self, s: &KalmanState) -> StateCov {
        let h = s.mean[3];
        let wp = self.std_weight_position;
        let wv = self.std_weight_velocity;
        let std = [wp * h, wp * h, 1e-2, wp * h, wv * h, wv * h, 1e-5, wv * h];
        StateCov::from_diagonal(&StateVec::from_iterator(std.iter().map(|s| s * s)))
    }

    pub fn measurement_noise(&self, s: &KalmanState) -> [f64; 4] {
        let h = s.mean[3];
        let wp = self.std_weight_position;
        [(wp * h).powi(2), (wp * h).powi(2), 1e-1f64.powi(2), (wp * h).powi(2)]
    }

    /// One constant-velocity step: `x' = F x`, `P' = F P F^T + Q`.
    pub fn predict(&self, s: &KalmanState) -> KalmanState {
        let f = transition();
        let q = self.process_noise(s);
        KalmanState {
            mean: f * s.mean,
            covariance: symmetrize(&(f * s.covariance * f.transpose() + q)),
        }
    }

    pub fn update(&self, s: &KalmanState, z: &BBox) -> Result<KalmanState, GeometryError> {
        update_with_noise(s, z, &self.measurement_noise(s))
    }
}

/// Kalman correction with an explicit diagonal measurement noise.
pub fn update_with_noise(
    s: &KalmanState,
    z: &BBox,
    r_diag: &[f64; 4],
) -> Result<KalmanState, GeometryError> {
    let h = observation();
    let r = MeasCov::from_diagonal(&MeasVec::from_column_slice(r_diag));
    let innovation_cov = h * s.covariance * h.transpose() + r;
    let chol = innovation_cov
        .cholesky()
        .ok_or(GeometryError::NumericalFailure)?;
    // K = P H^T S^-1, solved as S K^T = H P.
    let pht = s.covariance * h.transpose();
    let gain = chol.solve(&pht.transpose()).transpose();
    let innovation = MeasVec::from(bbox_to_state_vec(z)) - h * s.mean;
    let mean = s.mean + gain * innovation;
    let covariance = s.covariance - gain * innovation_cov * gain.transpose();
    let out = KalmanState {
        mean,
        covariance: symmetrize(&covariance),
    };
    if !out.mean.iter().all(|v| v.is_finite()) {
        return Err(GeometryError::NumericalFailure);
    }
    Ok(out)
}
