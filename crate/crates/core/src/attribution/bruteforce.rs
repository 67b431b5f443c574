use crate::attribution::conditional::expvalue_with;
use crate::error::{Error, Result};
use crate::tree::Tree;

/// Largest number of distinct split features the exhaustive oracle accepts.
pub const ORACLE_MAX_FEATURES: usize = 12;

/// Exact Shapley values by enumerating every coalition of the tree's own
/// split features:
///
/// `phi_i = Σ_{S ⊆ F∖{i}} |S|! (M-1-|S|)! / M! · (v(S ∪ {i}) - v(S))`
///
/// with `v` the path-dependent conditional expectation and `M = |F|`.
/// Features the tree never splits on get 0. Exponential; meant as a test
/// oracle for [`crate::attribution::shap_tree`].
pub fn shap_bruteforce(tree: &Tree, x: &[f64]) -> Result<Vec<f64>> {
    let players = tree.features_used();
    let m = players.len();
    if m > ORACLE_MAX_FEATURES {
        return Err(Error::OracleTooLarge {
            features: m,
            limit: ORACLE_MAX_FEATURES,
        });
    }
    if let Some(&f) = players.last() {
        if f >= x.len() {
            return Err(Error::InputShape(format!(
                "tree splits on feature {f} but the instance has {} values",
                x.len()
            )));
        }
    }

    // v(S) for every coalition, indexed by bitmask over `players`.
    let mut value = vec![0.0; 1 << m];
    for (mask, v) in value.iter_mut().enumerate() {
        let known = |f: usize| {
            players
                .iter()
                .position(|&p| p == f)
                .is_some_and(|k| mask & (1 << k) != 0)
        };
        *v = expvalue_with(tree, x, &known)?;
    }

    let factorial: Vec<f64> = (0..=m)
        .scan(1.0, |acc, k| {
            if k > 0 {
                *acc *= k as f64;
            }
            Some(*acc)
        })
        .collect();
    let mut phi = vec![0.0; x.len()];
    for (k, &feature) in players.iter().enumerate() {
        let bit = 1 << k;
        let mut total = 0.0;
        for mask in 0..(1usize << m) {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            let weight = factorial[s] * factorial[m - 1 - s] / factorial[m];
            total += weight * (value[mask | bit] - value[mask]);
        }
        phi[feature] = total;
    }
    Ok(phi)
}
