use crate::error::{Error, Result};
use crate::tree::{Ensemble, TreeNode};

/// Mean decrease in impurity per feature.
///
/// Each split contributes `cover / root_cover * impurity_decrease` to its
/// feature; per-tree totals are averaged over the ensemble.
pub fn mdi_importance(ens: &Ensemble) -> Result<Vec<f64>> {
    if !ens.has_training_metadata() {
        return Err(Error::UnsupportedModel(
            "MDI needs split impurity decreases, which this model does not record".into(),
        ));
    }
    let mut importance = vec![0.0; ens.n_features()];
    for tree in ens.trees() {
        let root_cover = tree.root_node().cover() as f64;
        for node in tree.nodes() {
            if let TreeNode::Internal {
                feature,
                cover,
                impurity_decrease: Some(dec),
                ..
            } = *node
            {
                importance[feature] += cover as f64 / root_cover * dec;
            }
        }
    }
    let n = ens.trees().len() as f64;
    for v in &mut importance {
        *v /= n;
    }
    Ok(importance)
}
