//! Minimum-cost perfect matching on a dense square cost matrix.

/// Solves the linear assignment problem by successive shortest augmenting
/// paths with dual potentials, in `O(n³)`.
///
/// `cost` is row-major `n×n`. Returns `assignment[row] = column` and the
/// total cost.
pub fn solve(cost: &[f64], n: usize) -> (Vec<usize>, f64) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n×n");
    if n == 0 {
        return (vec![], 0.0);
    }
    // 1-based arrays with column 0 as the virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_to = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];
    for row in 1..=n {
        matched_row[0] = row;
        let mut col0 = 0;
        min_to.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[col0] = true;
            let r = matched_row[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            let row_cost = &cost[(r - 1) * n..r * n];
            for j in 1..=n {
                if !used[j] {
                    let reduced = row_cost[j - 1] - u[r] - v[j];
                    if reduced < min_to[j] {
                        min_to[j] = reduced;
                        way[j] = col0;
                    }
                    if min_to[j] < delta {
                        delta = min_to[j];
                        col1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            col0 = col1;
            if matched_row[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            matched_row[col0] = matched_row[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[matched_row[j] - 1] = j - 1;
    }
    let total = assignment.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    (assignment, total)
}
