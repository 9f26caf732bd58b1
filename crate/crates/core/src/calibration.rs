//! Plane-to-plane homography between co-located cameras.

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GeometryError;
use crate::geometry::{BBox, Point2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub source: Point2,
    pub target: Point2,
}

impl Correspondence {
    pub const fn new(source: Point2, target: Point2) -> Self {
        Self { source, target }
    }
}

/// 3x3 projective map, normalised so `h[2][2] == 1` when that entry is
/// non-zero (Frobenius norm 1 otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    h: Matrix3<f64>,
}

const AT_INFINITY: f64 = 1e-12;

impl Homography {
    pub fn identity() -> Self {
        Self {
            h: Matrix3::identity(),
        }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self {
            h: Matrix3::new(1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0),
        }
    }

    pub fn scaling(s: f64) -> Self {
        Self {
            h: Matrix3::new(s, 0.0, 0.0, 0.0, s, 0.0, 0.0, 0.0, 1.0),
        }
    }

    /// Normalises and validates an arbitrary 3x3 matrix.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::DegenerateConfiguration);
        }
        let norm = m.norm();
        if norm == 0.0 {
            return Err(GeometryError::DegenerateConfiguration);
        }
        let m = if m[(2, 2)].abs() > 1e-12 * norm {
            m / m[(2, 2)]
        } else {
            m / norm
        };
        let scale = m.norm();
        if (m.determinant() / scale.powi(3)).abs() <= 1e-12 {
            return Err(GeometryError::DegenerateConfiguration);
        }
        Ok(Self { h: m })
    }

    pub fn from_row_major(v: [f64; 9]) -> Result<Self, GeometryError> {
        Self::from_matrix(Matrix3::from_row_slice(&v))
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                out[r * 3 + c] = self.h[(r, c)];
            }
        }
        out
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.h
    }

    pub fn inverse(&self) -> Result<Self, GeometryError> {
        let inv = self
            .h
            .try_inverse()
            .ok_or(GeometryError::DegenerateConfiguration)?;
        Self::from_matrix(inv)
    }

    /// `self` applied after `other`.
    pub fn compose(&self, other: &Homography) -> Result<Self, GeometryError> {
        Self::from_matrix(self.h * other.h)
    }
}

pub fn warp_point(h: &Homography, p: &Point2) -> Result<Point2, GeometryError> {
    let v = h.h * Vector3::new(p.x, p.y, 1.0);
    if v.z.abs() <= AT_INFINITY {
        return Err(GeometryError::PointAtInfinity);
    }
    Ok(Point2::new(v.x / v.z, v.y / v.z))
}

/// Axis-aligned hull of the four warped corners.
pub fn warp_bbox(h: &Homography, b: &BBox) -> Result<BBox, GeometryError> {
    let mut x0 = f64::INFINITY;
    let mut y0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for c in b.corners() {
        let p = warp_point(h, &c)?;
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    BBox::from_corners(x0, y0, x1, y1).map_err(|_| GeometryError::DegenerateConfiguration)
}

/// RMS distance between warped sources and their targets. Points that map
/// to infinity count as infinitely far.
pub fn reprojection_rmse(h: &Homography, c: &[Correspondence]) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let sum: f64 = c
        .iter()
        .map(|k| match warp_point(h, &k.source) {
            Ok(p) => {
                let d = p.distance(&k.target);
                d * d
            }
            Err(_) => f64::INFINITY,
        })
        .sum();
    (sum / c.len() as f64).sqrt()
}

/// Similarity taking the centroid to the origin and the mean distance to
/// sqrt(2).
fn normalizing_transform(points: &[Point2]) -> Result<Matrix3<f64>, GeometryError> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = points
        .iter()
        .map(|p| (p.x - cx).hypot(p.y - cy))
        .sum::<f64>()
        / n;
    if !(mean_dist > 0.0) || !mean_dist.is_finite() {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    Ok(Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0))
}

fn apply(m: &Matrix3<f64>, p: &Point2) -> Point2 {
    let v = m * Vector3::new(p.x, p.y, 1.0);
    Point2::new(v.x / v.z, v.y / v.z)
}

/// Normalised DLT over all correspondences.
pub fn estimate_homography(c: &[Correspondence]) -> Result<Homography, GeometryError> {
    if c.len() < 4 {
        return Err(GeometryError::InsufficientPoints {
            needed: 4,
            got: c.len(),
        });
    }
    if !c.iter().all(|k| k.source.is_finite() && k.target.is_finite()) {
        return Err(GeometryError::InvalidValue("non-finite correspondence".into()));
    }
    let src: Vec<Point2> = c.iter().map(|k| k.source).collect();
    let dst: Vec<Point2> = c.iter().map(|k| k.target).collect();
    let ts = normalizing_transform(&src)?;
    let td = normalizing_transform(&dst)?;

    // Pad to at least 9 rows so the full right singular basis is available.
    let rows = (2 * c.len()).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (s, d)) in src.iter().zip(&dst).enumerate() {
        let s = apply(&ts, s);
        let d = apply(&td, d);
        let r = 2 * i;
        a.row_mut(r)
            .copy_from_slice(&[0.0, 0.0, 0.0, -s.x, -s.y, -1.0, d.y * s.x, d.y * s.y, d.y]);
        a.row_mut(r + 1)
            .copy_from_slice(&[s.x, s.y, 1.0, 0.0, 0.0, 0.0, -d.x * s.x, -d.x * s.y, -d.x]);
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or(GeometryError::DegenerateConfiguration)?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    let (smallest, second) = (order[0], order[1]);
    let largest = sv[order[sv.len() - 1]];
    if sv[second] <= 1e-10 * largest {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let hv = v_t.row(smallest);
    let hn = Matrix3::new(hv[0], hv[1], hv[2], hv[3], hv[4], hv[5], hv[6], hv[7], hv[8]);
    let td_inv = td.try_inverse().ok_or(GeometryError::DegenerateConfiguration)?;
    Homography::from_matrix(td_inv * hn * ts)
}

/// RANSAC over 4-point samples followed by a DLT refit on the inliers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustOptions {
    pub iterations: usize,
    pub inlier_threshold: f64,
    pub seed: u64,
}

impl Default for RobustOptions {
    fn default() -> Self {
        Self {
            iterations: 1000,
            inlier_threshold: 3.0,
            seed: 0,
        }
    }
}

pub fn estimate_homography_robust(
    c: &[Correspondence],
    opts: &RobustOptions,
) -> Result<Homography, GeometryError> {
    if c.len() < 4 {
        return Err(GeometryError::InsufficientPoints {
            needed: 4,
            got: c.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let inliers_of = |h: &Homography| -> Vec<Correspondence> {
        c.iter()
            .filter(|k| {
                warp_point(h, &k.source)
                    .map(|p| p.distance(&k.target) <= opts.inlier_threshold)
                    .unwrap_or(false)
            })
            .copied()
            .collect()
    };
    let mut best: Option<Vec<Correspondence>> = None;
    for _ in 0..opts.iterations {
        let idx = sample(&mut rng, c.len(), 4);
        let minimal: Vec<Correspondence> = idx.iter().map(|i| c[i]).collect();
        let Ok(h) = estimate_homography(&minimal) else {
            continue;
        };
        let inl = inliers_of(&h);
        if best.as_ref().is_none_or(|b| inl.len() > b.len()) {
            best = Some(inl);
        }
    }
    match best {
        Some(inl) if inl.len() >= 4 => estimate_homography(&inl),
        _ => Err(GeometryError::DegenerateConfiguration),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn grid() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(100.0, 0.0),
            Point2::new(100.0, 80.0),
            Point2::new(0.0, 80.0),
            Point2::new(40.0, 30.0),
        ]
    }

    fn random_homography(rng: &mut impl Rng) -> Homography {
        let m = Matrix3::new(
            1.0 + rng.random_range(-0.2..0.2),
            rng.random_range(-0.2..0.2),
            rng.random_range(-20.0..20.0),
            rng.random_range(-0.2..0.2),
            1.0 + rng.random_range(-0.2..0.2),
            rng.random_range(-20.0..20.0),
            rng.random_range(-5e-4..5e-4),
            rng.random_range(-5e-4..5e-4),
            1.0,
        );
        Homography::from_matrix(m).unwrap()
    }

    fn rel_frobenius(a: &Homography, b: &Homography) -> f64 {
        (a.matrix() - b.matrix()).norm() / b.matrix().norm()
    }

    #[test]
    fn identity_from_identical_points() {
        let c: Vec<_> = grid()[..4].iter().map(|&p| Correspondence::new(p, p)).collect();
        let h = estimate_homography(&c).unwrap();
        assert!((h.matrix() - Matrix3::identity()).norm() < 1e-9);
    }

    #[test]
    fn plant_and_recover() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let planted = random_homography(&mut rng);
            let c: Vec<_> = (0..12)
                .map(|_| {
                    let s = Point2::new(rng.random_range(0.0..320.0), rng.random_range(0.0..240.0));
                    Correspondence::new(s, warp_point(&planted, &s).unwrap())
                })
                .collect();
            let h = estimate_homography(&c).unwrap();
            assert!(rel_frobenius(&h, &planted) < 1e-6);
            assert!(reprojection_rmse(&h, &c) < 1e-6);
        }
    }

    #[test]
    fn too_few_points() {
        let c: Vec<_> = grid()[..3].iter().map(|&p| Correspondence::new(p, p)).collect();
        assert_eq!(
            estimate_homography(&c),
            Err(GeometryError::InsufficientPoints { needed: 4, got: 3 })
        );
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let c: Vec<_> = (0..6)
            .map(|i| {
                let p = Point2::new(i as f64 * 10.0, i as f64 * 5.0);
                Correspondence::new(p, p)
            })
            .collect();
        assert_eq!(estimate_homography(&c), Err(GeometryError::DegenerateConfiguration));
    }

    #[test]
    fn warp_point_examples() {
        let p = Point2::new(12.5, -3.0);
        assert_eq!(warp_point(&Homography::identity(), &p).unwrap(), p);
        let t = Homography::translation(5.0, -3.0);
        assert_eq!(warp_point(&t, &Point2::new(0.0, 0.0)).unwrap(), Point2::new(5.0, -3.0));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let h = random_homography(&mut rng);
            let inv = h.inverse().unwrap();
            let p = Point2::new(rng.random_range(0.0..300.0), rng.random_range(0.0..200.0));
            let back = warp_point(&inv, &warp_point(&h, &p).unwrap()).unwrap();
            assert!(back.distance(&p) < 1e-9);
        }
    }

    #[test]
    fn point_at_infinity() {
        let h = Homography::from_row_major([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            warp_point(&h, &Point2::new(-1.0, 4.0)),
            Err(GeometryError::PointAtInfinity)
        );
    }

    #[test]
    fn warp_bbox_examples() {
        let b = BBox::new(10.0, 10.0, 20.0, 20.0).unwrap();
        assert_eq!(warp_bbox(&Homography::identity(), &b).unwrap(), b);
        let t = warp_bbox(&Homography::translation(3.5, -7.25), &b).unwrap();
        assert!((t.left - 13.5).abs() < 1e-9 && (t.top - 2.75).abs() < 1e-9);
        assert!((t.width - 20.0).abs() < 1e-9 && (t.height - 20.0).abs() < 1e-9);
        let s = warp_bbox(&Homography::scaling(2.0), &b).unwrap();
        assert_eq!(s, BBox::new(20.0, 20.0, 40.0, 40.0).unwrap());
    }

    #[test]
    fn rmse_examples() {
        let h = Homography::identity();
        let exact: Vec<_> = grid().iter().map(|&p| Correspondence::new(p, p)).collect();
        assert!(reprojection_rmse(&h, &exact) < 1e-9);
        let off: Vec<_> = grid()
            .iter()
            .map(|&p| Correspondence::new(p, Point2::new(p.x + 3.0, p.y + 4.0)))
            .collect();
        assert!((reprojection_rmse(&h, &off) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_rmse_near_sigma() {
        // Per-axis sigma 1/sqrt(2) gives unit RMS Euclidean noise.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let noise = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        for _ in 0..10 {
            let planted = random_homography(&mut rng);
            let c: Vec<_> = (0..100)
                .map(|_| {
                    let s = Point2::new(rng.random_range(0.0..320.0), rng.random_range(0.0..240.0));
                    let t = warp_point(&planted, &s).unwrap();
                    Correspondence::new(
                        s,
                        Point2::new(t.x + noise.sample(&mut rng), t.y + noise.sample(&mut rng)),
                    )
                })
                .collect();
            let rmse = reprojection_rmse(&estimate_homography(&c).unwrap(), &c);
            assert!((0.8..=1.2).contains(&rmse), "{rmse}");
        }
    }

    #[test]
    fn scale_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let planted = random_homography(&mut rng);
        let pts: Vec<Point2> = (0..8)
            .map(|_| Point2::new(rng.random_range(0.0..320.0), rng.random_range(0.0..240.0)))
            .collect();
        let c: Vec<_> = pts
            .iter()
            .map(|&s| Correspondence::new(s, warp_point(&planted, &s).unwrap()))
            .collect();
        let s = 2.5;
        let scaled: Vec<_> = c
            .iter()
            .map(|k| {
                Correspondence::new(
                    Point2::new(k.source.x * s, k.source.y * s),
                    Point2::new(k.target.x * s, k.target.y * s),
                )
            })
            .collect();
        let h = estimate_homography(&c).unwrap();
        let hs = estimate_homography(&scaled).unwrap();
        let conj = Homography::scaling(s)
            .compose(&h)
            .unwrap()
            .compose(&Homography::scaling(1.0 / s))
            .unwrap();
        assert!(rel_frobenius(&hs, &conj) < 1e-9);
        let p = Point2::new(33.0, 44.0);
        let a = warp_point(&h, &p).unwrap();
        let b = warp_point(&hs, &Point2::new(p.x * s, p.y * s)).unwrap();
        assert!((b.x - a.x * s).abs() < 1e-6 && (b.y - a.y * s).abs() < 1e-6);
    }

    #[test]
    fn robust_mode_rejects_outliers() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let planted = random_homography(&mut rng);
        let mut c: Vec<_> = (0..40)
            .map(|_| {
                let s = Point2::new(rng.random_range(0.0..320.0), rng.random_range(0.0..240.0));
                Correspondence::new(s, warp_point(&planted, &s).unwrap())
            })
            .collect();
        for k in c.iter_mut().take(10) {
            k.target = Point2::new(rng.random_range(0.0..320.0), rng.random_range(0.0..240.0));
        }
        let h = estimate_homography_robust(&c, &RobustOptions::default()).unwrap();
        assert!(rel_frobenius(&h, &planted) < 1e-6);
    }
}
