//! Looks for consistency violations on pairs of trees over two binary
//! features. Model B is at least as reliant on feature i as model A at `x`
//! when, for every coalition S without i, the marginal gain
//! v_B(S ∪ i) - v_B(S) is at least v_A(S ∪ i) - v_A(S). A consistent
//! method then never gives i less credit under B than under A.
//!
//! Violations are printed. Shapley values must never violate; CFC is allowed
//! to and usually does.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeattrib_core::{cfc_tree, expvalue_conditional, shap_tree, FeatureSubset, Tree, TreeNode};

const TOL: f64 = 1e-12;

/// Depth-2 tree over binary features: `first` at the root, the other below,
/// equal covers. Leaves are ordered by (root value, other value): 00, 01,
/// 10, 11.
fn and_tree(first: usize, leaves: [f64; 4]) -> Tree {
    let other = 1 - first;
    let mean = |a: f64, b: f64| (a + b) / 2.0;
    Tree::new(
        vec![
            TreeNode::split(first, 0.5, 1, 2, 4, leaves.iter().sum::<f64>() / 4.0),
            TreeNode::split(other, 0.5, 3, 4, 2, mean(leaves[0], leaves[1])),
            TreeNode::split(other, 0.5, 5, 6, 2, mean(leaves[2], leaves[3])),
            TreeNode::leaf(leaves[0], 1),
            TreeNode::leaf(leaves[1], 1),
            TreeNode::leaf(leaves[2], 1),
            TreeNode::leaf(leaves[3], 1),
        ],
        0,
    )
    .unwrap()
}

fn gains(tree: &Tree, x: &[f64], feature: usize) -> [f64; 2] {
    let v = |s: &[usize]| {
        expvalue_conditional(tree, x, &FeatureSubset::from_indices(2, s.iter().copied())).unwrap()
    };
    let other = 1 - feature;
    [v(&[feature]) - v(&[]), v(&[0, 1]) - v(&[other])]
}

fn dominates(b: &Tree, a: &Tree, x: &[f64], feature: usize) -> bool {
    let (gb, ga) = (gains(b, x, feature), gains(a, x, feature));
    gb.iter().zip(&ga).all(|(b, a)| b >= &(a - TOL))
}

#[derive(Default)]
struct Tally {
    dominated_pairs: usize,
    cfc_violations: usize,
    shap_violations: usize,
}

fn check(a: &Tree, b: &Tree, x: &[f64], tally: &mut Tally, verbose: bool) {
    for feature in 0..2 {
        if !dominates(b, a, x, feature) {
            continue;
        }
        tally.dominated_pairs += 1;
        let cfc_a = cfc_tree(a, x).unwrap().1[feature];
        let cfc_b = cfc_tree(b, x).unwrap().1[feature];
        let shap_a = shap_tree(a, x).unwrap()[feature];
        let shap_b = shap_tree(b, x).unwrap()[feature];
        if cfc_b < cfc_a - TOL {
            tally.cfc_violations += 1;
            if verbose {
                println!("cfc violation on f{feature} at {x:?}: {cfc_a} -> {cfc_b}");
            }
        }
        if shap_b < shap_a - TOL {
            tally.shap_violations += 1;
            println!("shap violation on f{feature} at {x:?}: {shap_a} -> {shap_b}");
        }
    }
}

#[test]
fn fever_cough_pair() {
    // A: output 80 only when both symptoms are present, fever split first.
    // B: adds 10 whenever cough is present and splits on cough first.
    let a = and_tree(0, [0.0, 0.0, 0.0, 80.0]);
    let b = and_tree(1, [0.0, 0.0, 10.0, 90.0]);
    let x = [1.0, 1.0];
    let mut tally = Tally::default();
    check(&a, &b, &x, &mut tally, true);
    println!(
        "fever/cough: {} dominated cases, {} CFC violations, {} SHAP violations",
        tally.dominated_pairs, tally.cfc_violations, tally.shap_violations
    );
    assert!(dominates(&b, &a, &x, 1));
    assert_eq!(tally.shap_violations, 0);
}

#[test]
fn random_pair_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let pool: Vec<Tree> = (0..120)
        .map(|_| {
            let leaves = [(); 4].map(|_| rng.gen_range(0..4) as f64);
            and_tree(rng.gen_range(0..2), leaves)
        })
        .collect();
    let points = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
    let mut tally = Tally::default();
    for a in &pool {
        for b in &pool {
            for x in &points {
                check(a, b, x, &mut tally, false);
            }
        }
    }
    println!(
        "random search: {} dominated cases, {} CFC violations, {} SHAP violations",
        tally.dominated_pairs, tally.cfc_violations, tally.shap_violations
    );
    assert!(tally.dominated_pairs > 0);
    assert_eq!(tally.shap_violations, 0);
}
