//! Losses over row-major batches. Scalars are accumulated in f64 and averaged over rows;
//! gradients are already divided by the batch size.

use super::layer::Real;
use super::NetError;

/// Probability floor used before taking logs.
pub const PROB_FLOOR: f64 = 1e-7;

/// Cross-entropy `-Σ t·ln p` per row, averaged over `batch` rows, with `p` clipped to
/// `[PROB_FLOOR, 1 - PROB_FLOOR]`. Returns the loss and dL/dp.
pub fn cross_entropy<T: Real>(pred: &[T], target: &[T], batch: usize) -> Result<(f64, Vec<T>), NetError> {
    if pred.len() != target.len() {
        return Err(NetError::DimensionMismatch {
            expected: target.len(),
            found: pred.len(),
        });
    }
    if batch == 0 || !pred.len().is_multiple_of(batch) {
        return Err(NetError::ShapeMismatch(format!(
            "{} values cannot form {batch} rows",
            pred.len()
        )));
    }
    let scale = 1.0 / batch as f64;
    let mut loss = 0.0;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let p = p.f64().clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
            let t = t.f64();
            loss -= t * p.ln();
            T::of(-t / p * scale)
        })
        .collect();
    Ok((loss * scale, grad))
}

/// Mean squared error over all elements, with gradient `2(x̂ - x)/N`.
pub fn mse<T: Real>(x_hat: &[T], x: &[T]) -> Result<(f64, Vec<T>), NetError> {
    if x_hat.len() != x.len() {
        return Err(NetError::DimensionMismatch {
            expected: x.len(),
            found: x_hat.len(),
        });
    }
    if x.is_empty() {
        return Ok((0.0, Vec::new()));
    }
    let n = x.len() as f64;
    let mut sum = 0.0;
    let grad = x_hat
        .iter()
        .zip(x)
        .map(|(&a, &b)| {
            let d = a.f64() - b.f64();
            sum += d * d;
            T::of(2.0 * d / n)
        })
        .collect();
    Ok((sum / n, grad))
}

/// Per-row mean squared error, without gradients.
pub fn row_mse(x_hat: &[f32], x: &[f32]) -> f64 {
    let n = x.len().max(1) as f64;
    x_hat
        .iter()
        .zip(x)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_prediction_has_near_zero_loss() {
        let (l, _) = cross_entropy(&[1.0f64, 0.0], &[1.0, 0.0], 1).unwrap();
        assert!((0.0..1e-6).contains(&l));
    }

    #[test]
    fn half_half_is_ln2() {
        let (l, g) = cross_entropy(&[0.5f64, 0.5], &[1.0, 0.0], 1).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(g, vec![-2.0, 0.0]);
    }

    #[test]
    fn clipped_loss_is_bounded() {
        let (l, g) = cross_entropy(&[0.0f32, 1.0], &[1.0, 0.0], 1).unwrap();
        assert!(l.is_finite());
        assert!(l <= -(PROB_FLOOR.ln()) + 1e-12);
        assert!(g.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn cross_entropy_averages_rows() {
        let (l, g) = cross_entropy(&[0.5f64, 0.5, 0.5, 0.5], &[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(g, vec![-1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn mse_cases() {
        let x = [0.1f64, 0.2, 0.3];
        assert_eq!(mse(&x, &x).unwrap().0, 0.0);
        let shifted: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
        let (l, g) = mse(&shifted, &x).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert!(g.iter().all(|&v| (v - 2.0 / 3.0).abs() < 1e-12));
        assert!(mse(&x[..2], &x).is_err());
    }

    #[test]
    fn mse_matches_direct_sum() {
        let a = [0.9f64, -0.3, 0.25, 1.5, 0.0];
        let b = [0.1f64, 0.2, 0.25, -0.5, 0.7];
        let mut direct = 0.0;
        for i in 0..5 {
            direct += (a[i] - b[i]) * (a[i] - b[i]);
        }
        direct /= 5.0;
        assert!((mse(&a, &b).unwrap().0 - direct).abs() < 1e-15);
    }
}
