use serde::Serialize;

/// Result of a 1D exhaustive search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMaximum {
    pub value: f64,
    /// Near-tie maximizers, one representative per cluster, ascending.
    pub maximizers: Vec<f64>,
}

/// Evenly spaced grid from `lo` to `hi` inclusive with spacing at most `step`.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let n = ((hi - lo) / step - 1e-9).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    (0..=n).map(|i| if i == n { hi } else { lo + h * i as f64 }).collect()
}

/// Maximize `f` over a uniform grid on `[lo, hi]`.
///
/// Every grid point within `near_tie_tol` of the maximum is a candidate; runs of
/// adjacent candidates merge into one cluster represented by its best point.
pub fn grid_search_1d<F>(mut f: F, lo: f64, hi: f64, step: f64, near_tie_tol: f64) -> GridMaximum
where
    F: FnMut(f64) -> f64,
{
    let grid = uniform_grid(lo, hi, step);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (value, reps) = near_tie_clusters(&values, near_tie_tol);
    GridMaximum { value, maximizers: reps.into_iter().map(|i| grid[i]).collect() }
}

/// Maximum of `values` and the indices representing each near-tie cluster.
/// Clusters are runs of consecutive indices whose values are all within `tol`
/// of the maximum.
pub fn near_tie_clusters(values: &[f64], tol: f64) -> (f64, Vec<usize>) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut reps = Vec::new();
    let mut current: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v >= max - tol {
            current = match current {
                Some(best) if values[best] >= v => Some(best),
                _ => Some(i),
            };
        } else if let Some(best) = current.take() {
            reps.push(best);
        }
    }
    if let Some(best) = current {
        reps.push(best);
    }
    (max, reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_one_cluster() {
        let r = grid_search_1d(|_| 2.0, 0.0, 1.0, 0.01, 1e-6);
        assert_eq!(r.maximizers.len(), 1);
        assert_eq!(r.value, 2.0);
    }

    #[test]
    fn symmetric_bumps() {
        let bump = |x: f64| (-(x - 0.25).powi(2) * 100.0).exp() + (-(x - 0.75).powi(2) * 100.0).exp();
        let r = grid_search_1d(bump, 0.0, 1.0, 0.01, 1e-6);
        assert_eq!(r.maximizers.len(), 2);
        assert!((r.maximizers[0] - 0.25).abs() < 0.011);
        assert!((r.maximizers[1] - 0.75).abs() < 0.011);
    }

    #[test]
    fn degenerate_interval() {
        let r = grid_search_1d(|x| x, 3.0, 3.0, 0.1, 1e-6);
        assert_eq!(r.maximizers, vec![3.0]);
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(0.0, 1.0, 0.25);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
