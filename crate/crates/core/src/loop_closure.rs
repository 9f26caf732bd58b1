//! Loop-closure detection by affine RANSAC between HO3 landmark sets.
//!
//! Landmarks carry no descriptors, so hypotheses come from sampled triples of
//! candidate point pairs. A candidate pair is any (query, past) point pair
//! within the gate radius; the score of a past frame is the inlier count of
//! its best affine hypothesis.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GeometryError, LoopError};
use crate::geometry::Point2;
use crate::ho3::{Ho3Landmark, LandmarkMap};

/// `[a b tx; c d ty]`, mapping `(x, y)` to `(a x + b y + tx, c x + d y + ty)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2D {
    pub m: [[f64; 3]; 2],
}

impl Affine2D {
    pub fn identity() -> Self {
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        }
    }

    pub fn apply(&self, p: &Point2) -> Point2 {
        let m = &self.m;
        Point2::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2],
            m[1][0] * p.x + m[1][1] * p.y + m[1][2],
        )
    }

    pub fn linear(&self) -> Matrix2<f64> {
        Matrix2::new(self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }

    pub fn translation(&self) -> (f64, f64) {
        (self.m[0][2], self.m[1][2])
    }

    /// Singular values of the linear part, largest first.
    pub fn singular_values(&self) -> (f64, f64) {
        let sv = self.linear().singular_values();
        (sv[0].max(sv[1]), sv[0].min(sv[1]))
    }
}

fn triangle_area2(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Exact affine map taking three non-collinear sources to three targets.
pub fn solve_affine(src: &[Point2; 3], dst: &[Point2; 3]) -> Result<Affine2D, GeometryError> {
    if (triangle_area2(&src[0], &src[1], &src[2]) / 2.0).abs() <= 1e-9 {
        return Err(GeometryError::DegenerateSample);
    }
    let a = Matrix3::new(
        src[0].x, src[0].y, 1.0, src[1].x, src[1].y, 1.0, src[2].x, src[2].y, 1.0,
    );
    let lu = a.lu();
    let rx = lu
        .solve(&Vector3::new(dst[0].x, dst[1].x, dst[2].x))
        .ok_or(GeometryError::DegenerateSample)?;
    let ry = lu
        .solve(&Vector3::new(dst[0].y, dst[1].y, dst[2].y))
        .ok_or(GeometryError::DegenerateSample)?;
    Ok(Affine2D {
        m: [[rx[0], rx[1], rx[2]], [ry[0], ry[1], ry[2]]],
    })
}

/// Least-squares affine over `(source, target)` pairs (at least 3,
/// non-collinear).
pub fn fit_affine(pairs: &[(Point2, Point2)]) -> Result<Affine2D, GeometryError> {
    if pairs.len() < 3 {
        return Err(GeometryError::InsufficientPoints {
            needed: 3,
            got: pairs.len(),
        });
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut atx = Vector3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    // Center for conditioning.
    let n = pairs.len() as f64;
    let cx = pairs.iter().map(|(s, _)| s.x).sum::<f64>() / n;
    let cy = pairs.iter().map(|(s, _)| s.y).sum::<f64>() / n;
    for (s, t) in pairs {
        let r = Vector3::new(s.x - cx, s.y - cy, 1.0);
        ata += r * r.transpose();
        atx += r * t.x;
        aty += r * t.y;
    }
    let chol = ata.cholesky().ok_or(GeometryError::DegenerateSample)?;
    let rx = chol.solve(&atx);
    let ry = chol.solve(&aty);
    if (ata.determinant() / n.powi(3)).abs() < 1e-12 {
        return Err(GeometryError::DegenerateSample);
    }
    Ok(Affine2D {
        m: [
            [rx[0], rx[1], rx[2] - rx[0] * cx - rx[1] * cy],
            [ry[0], ry[1], ry[2] - ry[0] * cx - ry[1] * cy],
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacParams {
    pub iterations: usize,
    pub inlier_tol: f64,
    pub min_inliers: usize,
    pub seed: u64,
    /// Singular values of a hypothesis' linear part must lie in
    /// `[1/max_scale, max_scale]`.
    pub max_scale: f64,
    /// Maximum distance between the two points of a candidate pair; `None`
    /// pairs every query point with every past point.
    pub gate_radius: Option<f64>,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self {
            iterations: 500,
            inlier_tol: 3.0,
            min_inliers: 4,
            seed: 0,
            max_scale: 3.0,
            gate_radius: None,
        }
    }
}

/// All `(query index, past index)` pairs within `gate_radius`.
pub fn candidate_pairs(query: &[Point2], past: &[Point2], gate_radius: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, q) in query.iter().enumerate() {
        for (j, p) in past.iter().enumerate() {
            if q.distance(p) <= gate_radius {
                out.push((i, j));
            }
        }
    }
    out
}

/// Uniform grid over past points for radius queries.
struct PointGrid<'a> {
    points: &'a [Point2],
    cell: f64,
    cells: std::collections::HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> PointGrid<'a> {
    fn new(points: &'a [Point2], cell: f64) -> Self {
        let mut cells: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
        for (j, p) in points.iter().enumerate() {
            cells
                .entry(((p.x / cell).floor() as i64, (p.y / cell).floor() as i64))
                .or_default()
                .push(j);
        }
        Self { points, cell, cells }
    }

    fn within(&self, q: &Point2, r: f64, out: &mut Vec<(f64, usize)>) {
        let (x0, x1) = (((q.x - r) / self.cell).floor() as i64, ((q.x + r) / self.cell).floor() as i64);
        let (y0, y1) = (((q.y - r) / self.cell).floor() as i64, ((q.y + r) / self.cell).floor() as i64);
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                if let Some(v) = self.cells.get(&(cx, cy)) {
                    for &j in v {
                        let d = q.distance(&self.points[j]);
                        if d <= r {
                            out.push((d, j));
                        }
                    }
                }
            }
        }
    }
}

/// One-to-one inlier matching: candidate `(query, past)` pairs within `tol`
/// after mapping are accepted greedily in order of increasing distance.
fn greedy_inliers(
    a: &Affine2D,
    query: &[Point2],
    grid: &PointGrid<'_>,
    tol: f64,
    scratch: &mut Vec<(f64, usize, usize)>,
) -> Vec<(usize, usize)> {
    scratch.clear();
    let mut near = Vec::new();
    for (i, q) in query.iter().enumerate() {
        let t = a.apply(q);
        if !t.is_finite() {
            continue;
        }
        near.clear();
        grid.within(&t, tol, &mut near);
        scratch.extend(near.iter().map(|&(d, j)| (d, i, j)));
    }
    scratch.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut q_used = vec![false; query.len()];
    let mut p_used = vec![false; grid.points.len()];
    let mut out = Vec::new();
    for &(_, i, j) in scratch.iter() {
        if !q_used[i] && !p_used[j] {
            q_used[i] = true;
            p_used[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// Inlier count of `a` from `query` onto `past` under one-to-one matching.
pub fn count_inliers(a: &Affine2D, query: &[Point2], past: &[Point2], tol: f64) -> usize {
    let grid = PointGrid::new(past, tol.max(1e-6));
    greedy_inliers(a, query, &grid, tol, &mut Vec::new()).len()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacResult {
    pub model: Option<Affine2D>,
    pub inliers: usize,
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Best affine hypothesis from `query` onto `past` points.
pub fn ransac_match_points(query: &[Point2], past: &[Point2], p: &RansacParams) -> RansacResult {
    let none = RansacResult {
        model: None,
        inliers: 0,
    };
    if query.len() < 3 || past.len() < 3 {
        return none;
    }
    let gate = p.gate_radius.unwrap_or(f64::INFINITY);
    let pairs = match p.gate_radius {
        Some(r) => candidate_pairs(query, past, r),
        None => Vec::new(),
    };
    if p.gate_radius.is_some() && pairs.len() < 3 {
        return none;
    }
    let upper = query.len().min(past.len());
    let grid = PointGrid::new(past, p.inlier_tol.max(1e-6));
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut scratch = Vec::new();
    let mut best: Option<(Affine2D, Vec<(usize, usize)>)> = None;
    let lo = 1.0 / p.max_scale;

    for _ in 0..p.iterations {
        let Some((qi, pj)) = sample_triple(&mut rng, query.len(), past.len(), &pairs, p.gate_radius.is_some())
        else {
            continue;
        };
        let src = [query[qi[0]], query[qi[1]], query[qi[2]]];
        for perm in PERMUTATIONS {
            let tgt_idx = [pj[perm[0]], pj[perm[1]], pj[perm[2]]];
            if p.gate_radius.is_some()
                && (0..3).any(|k| src[k].distance(&past[tgt_idx[k]]) > gate)
            {
                continue;
            }
            let dst = [past[tgt_idx[0]], past[tgt_idx[1]], past[tgt_idx[2]]];
            let Ok(a) = solve_affine(&src, &dst) else {
                break;
            };
            let (s_max, s_min) = a.singular_values();
            if s_max > p.max_scale || s_min < lo {
                continue;
            }
            let inl = greedy_inliers(&a, query, &grid, p.inlier_tol, &mut scratch);
            if best.as_ref().is_none_or(|(_, b)| inl.len() > b.len()) {
                best = Some((a, inl));
            }
        }
        if best.as_ref().is_some_and(|(_, b)| b.len() == upper) {
            break;
        }
    }

    let Some((mut model, mut inl)) = best else {
        return none;
    };
    // Least-squares refinement on the inlier set.
    if inl.len() >= 3 {
        let pts: Vec<(Point2, Point2)> = inl.iter().map(|&(i, j)| (query[i], past[j])).collect();
        if let Ok(refined) = fit_affine(&pts) {
            let (s_max, s_min) = refined.singular_values();
            if s_max <= p.max_scale && s_min >= lo {
                let again = greedy_inliers(&refined, query, &grid, p.inlier_tol, &mut scratch);
                if again.len() >= inl.len() {
                    model = refined;
                    inl = again;
                }
            }
        }
    }
    RansacResult {
        model: (inl.len() >= p.min_inliers).then_some(model),
        inliers: inl.len(),
    }
}

/// Draws three query indices and three past indices, all distinct per side.
/// With a gate, the three pairs are drawn from the candidate list.
fn sample_triple(
    rng: &mut ChaCha8Rng,
    nq: usize,
    np: usize,
    pairs: &[(usize, usize)],
    gated: bool,
) -> Option<([usize; 3], [usize; 3])> {
    if !gated {
        let q = rand::seq::index::sample(rng, nq, 3);
        let p = rand::seq::index::sample(rng, np, 3);
        return Some(([q.index(0), q.index(1), q.index(2)], [p.index(0), p.index(1), p.index(2)]));
    }
    let mut qi = [0usize; 3];
    let mut pj = [0usize; 3];
    let mut k = 0;
    for _ in 0..30 {
        let (a, b) = pairs[rng.random_range(0..pairs.len())];
        if qi[..k].contains(&a) || pj[..k].contains(&b) {
            continue;
        }
        qi[k] = a;
        pj[k] = b;
        k += 1;
        if k == 3 {
            return Some((qi, pj));
        }
    }
    None
}

pub fn ransac_match(query: &[Ho3Landmark], past: &[Ho3Landmark], p: &RansacParams) -> RansacResult {
    let q: Vec<Point2> = query.iter().map(|l| l.point).collect();
    let r: Vec<Point2> = past.iter().map(|l| l.point).collect();
    ransac_match_points(&q, &r, p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub query_frame: u32,
    /// `(frame id, inlier count)`, best first.
    pub candidates: Vec<(u32, usize)>,
}

/// Per-candidate RANSAC seed so that serial and parallel evaluation agree.
pub fn candidate_seed(base: u64, frame_id: u32) -> u64 {
    // splitmix64 finaliser over the combined key
    let mut z = base ^ (u64::from(frame_id)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Scores every past frame at least `exclusion` frames older than the query
/// and sorts them by inlier count (desc), then frame gap, then frame id.
pub fn rank_past_frames(map: &LandmarkMap, query_frame: u32, exclusion: u32, p: &RansacParams) -> Ranking {
    let empty = Vec::new();
    let query = map.get(&query_frame).unwrap_or(&empty);
    let eligible: Vec<(&u32, &Vec<Ho3Landmark>)> = map
        .range(..=query_frame.saturating_sub(exclusion))
        .filter(|(&f, _)| f < query_frame)
        .collect();
    let mut candidates: Vec<(u32, usize)> = eligible
        .par_iter()
        .map(|(&f, past)| {
            let params = RansacParams {
                seed: candidate_seed(p.seed, f),
                ..*p
            };
            let r = ransac_match(query, past, &params);
            (f, if r.model.is_some() { r.inliers } else { 0 })
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then((query_frame - a.0).cmp(&(query_frame - b.0)))
            .then(a.0.cmp(&b.0))
    });
    Ranking {
        query_frame,
        candidates,
    }
}

/// Fraction of rankings whose top `k` contains a frame within `tol` of the
/// ground-truth match.
pub fn topk_accuracy(
    rankings: &[Ranking],
    gt: &BTreeMap<u32, u32>,
    k: usize,
    tol: u32,
) -> Result<f64, LoopError> {
    if rankings.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    for r in rankings {
        let g = *gt
            .get(&r.query_frame)
            .ok_or(LoopError::MissingGroundTruth(r.query_frame))?;
        if r.candidates.iter().take(k).any(|&(f, _)| f.abs_diff(g) <= tol) {
            hits += 1;
        }
    }
    Ok(hits as f64 / rankings.len() as f64)
}

/// Report lines `query rank candidate inliers` followed by the summary line.
pub fn format_ranking_report(rankings: &[Ranking], k: usize, accuracy: Option<f64>) -> String {
    let mut out = String::new();
    for r in rankings {
        for (rank, (f, n)) in r.candidates.iter().take(k).enumerate() {
            out.push_str(&format!("{} {} {} {}\n", r.query_frame, rank + 1, f, n));
        }
    }
    if let Some(acc) = accuracy {
        out.push_str(&format!("top{k}_accuracy {acc:.6}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_affine(rng: &mut impl Rng) -> Affine2D {
        let th: f64 = rng.random_range(-0.3..0.3);
        let s: f64 = rng.random_range(0.8..1.25);
        let sh: f64 = rng.random_range(-0.1..0.1);
        Affine2D {
            m: [
                [s * th.cos(), -s * th.sin() + sh, rng.random_range(-20.0..20.0)],
                [s * th.sin(), s * th.cos(), rng.random_range(-20.0..20.0)],
            ],
        }
    }

    fn lm(frame: u32, p: Point2) -> Ho3Landmark {
        Ho3Landmark {
            frame_id: frame,
            person_id: 1,
            point: p,
        }
    }

    #[test]
    fn solve_affine_examples() {
        let src = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let a = solve_affine(&src, &src).unwrap();
        for r in 0..2 {
            for c in 0..3 {
                assert!((a.m[r][c] - Affine2D::identity().m[r][c]).abs() < 1e-12);
            }
        }
        let dst = src.map(|p| Point2::new(p.x + 5.0, p.y + 2.0));
        let a = solve_affine(&src, &dst).unwrap();
        assert!((a.linear() - Matrix2::identity()).norm() < 1e-12);
        assert_eq!(a.translation(), (5.0, 2.0));

        let collinear = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)];
        assert_eq!(solve_affine(&collinear, &src), Err(GeometryError::DegenerateSample));
    }

    #[test]
    fn solve_affine_recovers_planted() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let planted = random_affine(&mut rng);
            let src: [Point2; 3] =
                std::array::from_fn(|_| Point2::new(rng.random_range(0.0..160.0), rng.random_range(0.0..120.0)));
            if (triangle_area2(&src[0], &src[1], &src[2]) / 2.0).abs() < 50.0 {
                continue;
            }
            let a = solve_affine(&src, &src.map(|p| planted.apply(&p))).unwrap();
            for r in 0..2 {
                for c in 0..3 {
                    assert!((a.m[r][c] - planted.m[r][c]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn candidate_pair_examples() {
        let q = vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(0.0, 10.0)];
        let p = vec![
            Point2::new(1.0, 1.0),
            Point2::new(50.0, 50.0),
            Point2::new(11.0, 0.0),
            Point2::new(3.0, 4.0),
        ];
        assert_eq!(candidate_pairs(&q, &p, f64::INFINITY).len(), 12);
        assert_eq!(candidate_pairs(&q, &p, 0.0).len(), 0);
        // Within 5: q0-p0 (1.41), q0-p3 (5.0), q1-p2 (1.0), q1-p3 (8.06 no),
        // q2-p0 (9.06 no), q2-p3 (6.7 no) -> 3; plus none else.
        let brute = q
            .iter()
            .flat_map(|a| p.iter().map(move |b| a.distance(b)))
            .filter(|&d| d <= 5.0)
            .count();
        assert_eq!(candidate_pairs(&q, &p, 5.0).len(), brute);
        assert_eq!(brute, 3);
    }

    #[test]
    fn planted_affine_without_outliers() {
        let mut successes = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let planted = random_affine(&mut rng);
            let q: Vec<Point2> = (0..8)
                .map(|_| Point2::new(rng.random_range(0.0..160.0), rng.random_range(0.0..120.0)))
                .collect();
            let past: Vec<Point2> = q.iter().map(|p| planted.apply(p)).collect();
            let r = ransac_match_points(&q, &past, &RansacParams { seed, ..Default::default() });
            if r.inliers == q.len() {
                let a = r.model.unwrap();
                if q.iter().all(|p| a.apply(p).distance(&planted.apply(p)) <= 3.0) {
                    successes += 1;
                }
            }
        }
        assert!(successes >= 99, "{successes}");
    }

    fn null_clear_count(gate_radius: Option<f64>) -> usize {
        let mut cleared = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
            let q: Vec<Point2> = (0..10)
                .map(|_| Point2::new(rng.random_range(0.0..160.0), rng.random_range(0.0..120.0)))
                .collect();
            let past: Vec<Point2> = (0..10)
                .map(|_| Point2::new(rng.random_range(0.0..160.0), rng.random_range(0.0..120.0)))
                .collect();
            let p = RansacParams { seed, gate_radius, ..Default::default() };
            if ransac_match_points(&q, &past, &p).inliers >= p.min_inliers {
                cleared += 1;
            }
        }
        cleared
    }

    #[test]
    fn gated_random_points_rarely_match() {
        let cleared = null_clear_count(Some(8.0));
        assert!(cleared <= 5, "{cleared}");
    }

    #[test]
    fn ungated_random_points_find_a_fourth_point() {
        // Three sampled pairs are exact by construction; with 3000 hypotheses
        // a single chance coincidence within 3 px is almost certain.
        let cleared = null_clear_count(None);
        assert!(cleared >= 90, "{cleared}");
    }

    #[test]
    fn too_few_points() {
        let q = vec![lm(1, Point2::new(0.0, 0.0)), lm(1, Point2::new(1.0, 0.0))];
        let r = ransac_match(&q, &q, &RansacParams::default());
        assert_eq!(r, RansacResult { model: None, inliers: 0 });
    }

    #[test]
    fn inliers_one_to_one() {
        let q = vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.0)];
        let past = vec![Point2::new(0.0, 0.0)];
        assert_eq!(count_inliers(&Affine2D::identity(), &q, &past, 3.0), 1);
    }

    #[test]
    fn ranking_examples() {
        let pts: Vec<Point2> = (0..6)
            .map(|k| Point2::new(10.0 + 13.0 * k as f64, 40.0 + ((k * 7) % 5) as f64 * 6.0))
            .collect();
        let frame = |f: u32| pts.iter().map(|&p| lm(f, p)).collect::<Vec<_>>();
        let map: LandmarkMap = BTreeMap::from([(1, frame(1)), (100, frame(100))]);
        let r = rank_past_frames(&map, 100, 50, &RansacParams::default());
        assert_eq!(r.candidates, vec![(1, 6)]);
        let r = rank_past_frames(&map, 100, 200, &RansacParams::default());
        assert!(r.candidates.is_empty());
    }

    #[test]
    fn topk_definition() {
        let r = Ranking {
            query_frame: 300,
            candidates: vec![(10, 9), (20, 8), (42, 7), (50, 6), (60, 5), (70, 4)],
        };
        let gt = BTreeMap::from([(300, 42)]);
        assert_eq!(topk_accuracy(&[r.clone()], &gt, 5, 0).unwrap(), 1.0);
        let gt = BTreeMap::from([(300, 70)]);
        assert_eq!(topk_accuracy(&[r.clone()], &gt, 5, 0).unwrap(), 0.0);
        assert_eq!(topk_accuracy(&[r.clone()], &gt, 5, 10).unwrap(), 1.0);
        assert_eq!(
            topk_accuracy(&[r], &BTreeMap::new(), 5, 0),
            Err(LoopError::MissingGroundTruth(300))
        );
    }

    #[test]
    fn random_rankings_match_analytic_baseline() {
        let n = 300u32;
        let (k, tol) = (5usize, 2u32);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let trials = 4000;
        let mut rankings = Vec::new();
        let mut gt = BTreeMap::new();
        for q in 0..trials {
            let mut frames: Vec<u32> = (1..=n).collect();
            for i in (1..frames.len()).rev() {
                frames.swap(i, rng.random_range(0..=i));
            }
            let g = rng.random_range(1 + tol..=n - tol);
            gt.insert(q, g);
            rankings.push(Ranking {
                query_frame: q,
                candidates: frames.into_iter().map(|f| (f, 0)).collect(),
            });
        }
        let acc = topk_accuracy(&rankings, &gt, k, tol).unwrap();
        // P(hit) = 1 - C(n - w, k) / C(n, k) with w = 2 tol + 1 frames in the window.
        let w = (2 * tol + 1) as f64;
        let mut miss = 1.0;
        for i in 0..k {
            miss *= (n as f64 - w - i as f64) / (n as f64 - i as f64);
        }
        let expect = 1.0 - miss;
        let approx = k as f64 * w / n as f64;
        assert!((expect - approx).abs() < 0.01);
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((acc - expect).abs() <= 3.0 * sigma, "{acc} vs {expect}");
    }

    #[test]
    fn deterministic_and_monotone_in_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let planted = random_affine(&mut rng);
        let q: Vec<Point2> = (0..15)
            .map(|_| Point2::new(rng.random_range(0.0..160.0), rng.random_range(0.0..120.0)))
            .collect();
        let past: Vec<Point2> = q
            .iter()
            .map(|p| {
                let t = planted.apply(p);
                Point2::new(t.x + rng.random_range(-2.0..2.0), t.y + rng.random_range(-2.0..2.0))
            })
            .collect();
        let base = RansacParams { iterations: 200, ..Default::default() };
        assert_eq!(ransac_match_points(&q, &past, &base), ransac_match_points(&q, &past, &base));
        let mut last = 0;
        for tol in [0.5, 1.0, 2.0, 3.0, 5.0] {
            let r = ransac_match_points(&q, &past, &RansacParams { inlier_tol: tol, ..base });
            assert!(r.inliers >= last);
            assert!(r.inliers <= q.len().min(past.len()));
            last = r.inliers;
        }
    }
}
