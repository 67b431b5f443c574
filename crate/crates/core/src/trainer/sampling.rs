use rand::seq::SliceRandom;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, SPLIT_STREAM};

/// Stratified train/test partition.
///
/// The test split holds `round(n * test_fraction)` rows, allotted to the two
/// classes by largest remainder (class 0 first on ties). Both splits keep the
/// original row order.
pub fn train_test_split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!(
            "test fraction must lie strictly between 0 and 1, got {test_fraction}"
        )));
    }
    let n = ds.n_rows();
    let n_test = (n as f64 * test_fraction).round() as usize;
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &y) in ds.labels().iter().enumerate() {
        by_class[y as usize].push(i);
    }

    let quotas: Vec<f64> = by_class
        .iter()
        .map(|rows| rows.len() as f64 * n_test as f64 / n as f64)
        .collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut remaining = n_test - take.iter().sum::<usize>();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let (fa, fb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for c in order {
        if remaining == 0 {
            break;
        }
        take[c] += 1;
        remaining -= 1;
    }

    for c in 0..2 {
        if take[c] == 0 || take[c] >= by_class[c].len() {
            return Err(Error::Split(format!(
                "class {c} has {} rows; test fraction {test_fraction} leaves one side of it empty",
                by_class[c].len()
            )));
        }
    }

    let mut rng = stream_rng(seed, SPLIT_STREAM);
    let mut train = Vec::with_capacity(n - n_test);
    let mut test = Vec::with_capacity(n_test);
    for c in 0..2 {
        let mut rows = by_class[c].clone();
        rows.shuffle(&mut rng);
        test.extend_from_slice(&rows[..take[c]]);
        train.extend_from_slice(&rows[take[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}
