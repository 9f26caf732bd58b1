//! Minimum-cost bipartite assignment (Kuhn-Munkres with row potentials).

/// Result of a gated assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    /// `(row, col)` pairs, ordered by row.
    pub matches: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

/// Optimal matching of size `min(rows, cols)` minimising total cost.
///
/// Costs must be finite. Ties are resolved deterministically: the
/// augmenting-path search scans columns in index order and keeps the first
/// minimum it sees.
pub fn min_cost_matching(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|r| r.len() == cols));
    if rows <= cols {
        hungarian(rows, cols, |i, j| cost[i][j])
    } else {
        let mut pairs: Vec<(usize, usize)> = hungarian(cols, rows, |i, j| cost[j][i])
            .into_iter()
            .map(|(c, r)| (r, c))
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

// Shortest augmenting path formulation; requires n <= m. Indices in the
// working arrays are 1-based with slot 0 as the virtual source.
fn hungarian(n: usize, m: usize, a: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter(|&j| p[j] != 0)
        .map(|j| (p[j] - 1, j - 1))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Solves the assignment on `cost`, then dissolves every match whose cost
/// exceeds `max_cost`.
pub fn assign(cost: &[Vec<f64>], max_cost: f64) -> Assignment {
    assign_with(cost, |i, j| cost[i][j] <= max_cost)
}

/// IoU association: cost is `1 - IoU`, and matches with `IoU < gate` are
/// dissolved. The gate is tested on the IoU values themselves.
pub fn assign_iou(iou: &[Vec<f64>], gate: f64) -> Assignment {
    let cost: Vec<Vec<f64>> = iou
        .iter()
        .map(|r| r.iter().map(|v| 1.0 - v).collect())
        .collect();
    assign_with(&cost, |i, j| iou[i][j] >= gate)
}

fn assign_with(cost: &[Vec<f64>], keep: impl Fn(usize, usize) -> bool) -> Assignment {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let matches: Vec<(usize, usize)> = min_cost_matching(cost)
        .into_iter()
        .filter(|&(i, j)| keep(i, j))
        .collect();
    for &(i, j) in &matches {
        row_used[i] = true;
        col_used[j] = true;
    }
    Assignment {
        matches,
        unmatched_rows: (0..rows).filter(|&i| !row_used[i]).collect(),
        unmatched_cols: (0..cols).filter(|&j| !col_used[j]).collect(),
    }
}

/// Sum of `cost[i][j]` over `pairs`, accumulated in the given order.
pub fn total_cost(cost: &[Vec<f64>], pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(i, j)| cost[i][j]).sum()
}
