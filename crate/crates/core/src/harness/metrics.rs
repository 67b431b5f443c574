use crate::error::{Error, Result};

/// Probability clipping applied before taking logarithms.
pub const LOG_LOSS_EPS: f64 = 1e-15;

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

/// Sample Pearson correlation.
///
/// `Ok(None)` when fewer than two points are given or either vector is
/// constant; such correlations are undefined and reported as flagged NaNs.
pub fn pearson_r(u: &[f64], v: &[f64]) -> Result<Option<f64>> {
    check_len(u.len(), v.len())?;
    if u.len() < 2 || is_constant(u) || is_constant(v) {
        return Ok(None);
    }
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (da, db) = (a - mu, b - mv);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    // sqrt of the product keeps r(u, u) at exactly 1.
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Coefficient of determination of the least-squares line of `v` on `u`,
/// which for simple regression is the squared Pearson correlation.
pub fn r_squared(r: Option<f64>) -> Option<f64> {
    r.map(|r| r * r)
}

/// Mean binary cross-entropy with probabilities clipped to `[eps, 1-eps]`.
pub fn log_loss(y_true: &[u8], p_pred: &[f64]) -> Result<f64> {
    check_len(y_true.len(), p_pred.len())?;
    if y_true.is_empty() {
        return Err(Error::UndefinedInput("log loss of no predictions"));
    }
    let total: f64 = y_true
        .iter()
        .zip(p_pred)
        .map(|(&y, &p)| {
            let p = p.clamp(LOG_LOSS_EPS, 1.0 - LOG_LOSS_EPS);
            if y == 1 {
                p.ln()
            } else {
                (1.0 - p).ln()
            }
        })
        .sum();
    Ok(-total / y_true.len() as f64)
}

/// Hard label for a class-1 probability; exactly 0.5 maps to class 0.
pub fn threshold(p: f64) -> u8 {
    u8::from(p > 0.5)
}

/// `2TP / (2TP + FP + FN)`, zero when there are no positives at all.
pub fn f1_score(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    check_len(y_true.len(), y_pred.len())?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => tp += 1,
            (0, 1) => fp += 1,
            (1, 0) => fn_ += 1,
            _ => {}
        }
    }
    let denom = 2 * tp + fp + fn_;
    Ok(if denom == 0 {
        0.0
    } else {
        (2 * tp) as f64 / denom as f64
    })
}
