//! Impurity criteria and exhaustive threshold search.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Binary gini impurity `2p(1-p)`, `p` the class-1 fraction.
pub fn gini(labels: &[u8]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::UndefinedInput("gini of an empty label set"));
    }
    let ones = labels.iter().filter(|&&l| l == 1).count();
    let p = ones as f64 / labels.len() as f64;
    Ok(2.0 * p * (1.0 - p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Binary gini on 0/1 targets (classification trees).
    Gini,
    /// Within-node variance (regression trees on boosting residuals).
    Variance,
}

impl Criterion {
    /// Both criteria reduce to a multiple of the between-children sum of
    /// squares: for 0/1 targets gini is exactly twice the variance.
    fn scale(self) -> f64 {
        match self {
            Criterion::Gini => 2.0,
            Criterion::Variance => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Node impurity minus the count-weighted child impurities.
    pub impurity_decrease: f64,
    pub left_count: usize,
    pub right_count: usize,
}

/// Best split of `rows` over `features` (assumed ascending).
///
/// Thresholds are midpoints between consecutive distinct values; ties go to
/// the lowest feature index, then the lowest threshold. `None` when no
/// admissible split strictly decreases impurity.
pub fn best_split(
    data: &Dataset,
    targets: &[f64],
    rows: &[usize],
    features: &[usize],
    criterion: Criterion,
    min_samples_leaf: usize,
) -> Option<SplitCandidate> {
    let n = rows.len();
    let min_leaf = min_samples_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let total: f64 = rows.iter().map(|&r| targets[r]).sum();
    let total_sq: f64 = rows.iter().map(|&r| targets[r] * targets[r]).sum();
    let nf = n as f64;
    let parent_term = total * total / nf;
    // Rounding noise in the sum-of-squares identity scales with Σt²/n.
    let tolerance = 1e-12 * total_sq / nf;

    let mut best: Option<SplitCandidate> = None;
    let mut column: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &feature in features {
        column.clear();
        column.extend(rows.iter().map(|&r| (data.value(r, feature), targets[r])));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_sum = 0.0;
        for i in 0..n - 1 {
            left_sum += column[i].1;
            let (lo, hi) = (column[i].0, column[i + 1].0);
            let left_count = i + 1;
            let right_count = n - left_count;
            if lo == hi || left_count < min_leaf {
                continue;
            }
            if right_count < min_leaf {
                break;
            }
            let right_sum = total - left_sum;
            let between = left_sum * left_sum / left_count as f64
                + right_sum * right_sum / right_count as f64
                - parent_term;
            let decrease = criterion.scale() * between / nf;
            if decrease <= tolerance {
                continue;
            }
            if best.is_none_or(|b| decrease > b.impurity_decrease) {
                best = Some(SplitCandidate {
                    feature,
                    threshold: midpoint(lo, hi),
                    impurity_decrease: decrease,
                    left_count,
                    right_count,
                });
            }
        }
    }
    best
}

/// Midpoint that still separates `lo` (left) from `hi` (right) under
/// strict less-than routing, even for adjacent floats.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(columns: &[&[f64]], y: &[u8]) -> Dataset {
        let d = columns.len();
        let rows = (0..y.len())
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Dataset::new(
            "t",
            (0..d).map(|i| format!("f{i}")).collect(),
            rows,
            y.to_vec(),
        )
        .unwrap()
    }

    fn targets(ds: &Dataset) -> Vec<f64> {
        ds.labels().iter().map(|&v| f64::from(v)).collect()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[0, 0, 0]).unwrap(), 0.0);
        assert_eq!(gini(&[0, 1]).unwrap(), 0.5);
        let mut labels = vec![1u8; 44];
        labels.extend(vec![0u8; 56]);
        assert!((gini(&labels).unwrap() - 0.4928).abs() < 1e-15);
        assert!(gini(&[]).is_err());
    }

    /// 60 rows below 0.5 with 12 positives, 40 above with 32 positives.
    pub(crate) fn t1_training_data() -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..60 {
            x.push(0.1 + 0.3 * i as f64 / 60.0);
            y.push(u8::from(i < 12));
        }
        for i in 0..40 {
            x.push(0.6 + 0.3 * i as f64 / 40.0);
            y.push(u8::from(i < 32));
        }
        dataset(&[&x], &y)
    }

    #[test]
    fn t1_split_decrease() {
        let ds = t1_training_data();
        let rows: Vec<usize> = (0..ds.n_rows()).collect();
        let s = best_split(&ds, &targets(&ds), &rows, &[0], Criterion::Gini, 1).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!((s.left_count, s.right_count), (60, 40));
        assert!(s.threshold > 0.4 && s.threshold < 0.6);
        // gini(root) - (0.6 gini(0.2) + 0.4 gini(0.8)) = 0.4928 - 0.32
        assert!(
            (s.impurity_decrease - 0.1728).abs() < 1e-12,
            "{}",
            s.impurity_decrease
        );
    }

    #[test]
    fn constant_column_has_no_split() {
        let ds = dataset(&[&[1.0, 1.0, 1.0, 1.0]], &[0, 1, 0, 1]);
        let rows: Vec<usize> = (0..4).collect();
        assert!(best_split(&ds, &targets(&ds), &rows, &[0], Criterion::Gini, 1).is_none());
    }

    #[test]
    fn equal_decreases_prefer_lower_feature() {
        let col = [0.0, 1.0, 2.0, 3.0];
        let ds = dataset(&[&col, &col], &[0, 0, 1, 1]);
        let rows: Vec<usize> = (0..4).collect();
        let s = best_split(&ds, &targets(&ds), &rows, &[0, 1], Criterion::Gini, 1).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 1.5);
    }

    #[test]
    fn equal_decreases_prefer_lower_threshold() {
        // Splitting at 0.5 or 2.5 isolates one minority row either way.
        let ds = dataset(&[&[0.0, 1.0, 2.0, 3.0]], &[1, 0, 0, 1]);
        let rows: Vec<usize> = (0..4).collect();
        let s = best_split(&ds, &targets(&ds), &rows, &[0], Criterion::Gini, 1).unwrap();
        assert_eq!(s.threshold, 0.5);
    }

    #[test]
    fn min_samples_leaf_is_respected() {
        let ds = dataset(&[&[0.0, 1.0, 2.0, 3.0, 4.0]], &[1, 0, 0, 0, 0]);
        let rows: Vec<usize> = (0..5).collect();
        let s = best_split(&ds, &targets(&ds), &rows, &[0], Criterion::Gini, 2).unwrap();
        assert!(s.left_count >= 2 && s.right_count >= 2);
        assert!(best_split(&ds, &targets(&ds), &rows, &[0], Criterion::Gini, 3).is_none());
    }

    #[test]
    fn adjacent_floats_still_separate() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let t = midpoint(lo, hi);
        assert!(lo < t && hi >= t);
    }

    #[test]
    fn variance_criterion_is_half_gini_on_binary_targets() {
        let ds = t1_training_data();
        let rows: Vec<usize> = (0..ds.n_rows()).collect();
        let g = best_split(&ds, &targets(&ds), &rows, &[0], Criterion::Gini, 1).unwrap();
        let v = best_split(&ds, &targets(&ds), &rows, &[0], Criterion::Variance, 1).unwrap();
        assert_eq!(g.threshold, v.threshold);
        assert!((g.impurity_decrease - 2.0 * v.impurity_decrease).abs() < 1e-15);
    }
}
