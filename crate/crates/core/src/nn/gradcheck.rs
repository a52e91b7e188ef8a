//! Central finite-difference check of `DenseNet::backward`.
//!
//! The numeric side only ever calls `forward_batch`, so it is independent of the
//! backpropagation code it checks.

use super::net::DenseNet;
use super::NetError;

/// Gradients smaller than this are compared in absolute rather than relative terms.
pub const REL_ERROR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamBlock {
    Weights,
    Biases,
    Input,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// `(layer, block, index)` of the worst entry.
    pub worst: (usize, ParamBlock, usize),
    pub checked: usize,
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_ERROR_FLOOR)
}

fn param_mut(net: &mut DenseNet<f64>, layer: usize, block: ParamBlock, i: usize) -> &mut f64 {
    let l = &mut net.layers_mut()[layer];
    match block {
        ParamBlock::Weights => &mut l.weights_mut()[i],
        _ => &mut l.biases_mut()[i],
    }
}

/// Compares backprop against `(L(θ+h) - L(θ-h)) / 2h` for every parameter and input entry.
///
/// `loss` maps the network output for the whole batch to `(L, dL/d output)`.
pub fn check_gradients<F>(
    net: &DenseNet<f64>,
    inputs: &[f64],
    batch: usize,
    loss: F,
    step: f64,
) -> Result<GradCheckReport, NetError>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>), NetError>,
{
    let acts = net.forward_batch(inputs, batch)?;
    let (_, out_grad) = loss(acts.output())?;
    let analytic = net.backward(inputs, &acts, &out_grad, true)?;

    let eval = |n: &DenseNet<f64>, x: &[f64]| -> Result<f64, NetError> {
        let a = n.forward_batch(x, batch)?;
        Ok(loss(a.output())?.0)
    };

    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: (0, ParamBlock::Weights, 0),
        checked: 0,
    };
    let mut record = |err: f64, at: (usize, ParamBlock, usize)| {
        report.checked += 1;
        if err > report.max_rel_error || err.is_nan() {
            report.max_rel_error = err;
            report.worst = at;
        }
    };

    let mut probe = net.clone();
    for li in 0..net.layers().len() {
        for block in [ParamBlock::Weights, ParamBlock::Biases] {
            let len = match block {
                ParamBlock::Weights => net.layers()[li].weights().len(),
                _ => net.layers()[li].biases().len(),
            };
            for i in 0..len {
                let orig = *param_mut(&mut probe, li, block, i);
                *param_mut(&mut probe, li, block, i) = orig + step;
                let plus = eval(&probe, inputs)?;
                *param_mut(&mut probe, li, block, i) = orig - step;
                let minus = eval(&probe, inputs)?;
                *param_mut(&mut probe, li, block, i) = orig;
                let numeric = (plus - minus) / (2.0 * step);
                let a = match block {
                    ParamBlock::Weights => analytic.layers[li].weights[i],
                    _ => analytic.layers[li].biases[i],
                };
                record(relative_error(a, numeric), (li, block, i));
            }
        }
    }

    let input_grad = analytic.input.as_deref().unwrap_or(&[]);
    let mut x = inputs.to_vec();
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + step;
        let plus = eval(net, &x)?;
        x[i] = orig - step;
        let minus = eval(net, &x)?;
        x[i] = orig;
        let numeric = (plus - minus) / (2.0 * step);
        record(relative_error(input_grad[i], numeric), (0, ParamBlock::Input, i));
    }
    Ok(report)
}
