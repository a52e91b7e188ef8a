use super::layer::Real;
use super::net::{DenseNet, Gradients, LayerGrads};
use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam moment estimates for one net.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    config: AdamConfig,
    m: Vec<LayerGrads<T>>,
    v: Vec<LayerGrads<T>>,
    t: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(net: &DenseNet<T>, config: AdamConfig) -> Result<Self, NetError> {
        if !(config.lr >= 0.0 && config.lr.is_finite()) {
            return Err(NetError::InvalidHyperparameter(format!("lr = {}", config.lr)));
        }
        if !(0.0..1.0).contains(&config.beta1) || !(0.0..1.0).contains(&config.beta2) {
            return Err(NetError::InvalidHyperparameter("betas must lie in [0, 1)".into()));
        }
        if config.epsilon.is_nan() || config.epsilon <= 0.0 {
            return Err(NetError::InvalidHyperparameter(format!("epsilon = {}", config.epsilon)));
        }
        let zeros = Gradients::zeros_like(net).layers;
        Ok(AdamState {
            config,
            m: zeros.clone(),
            v: zeros,
            t: 0,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    /// One bias-corrected Adam update. Non-finite gradients are rejected before any
    /// parameter changes.
    pub fn step(&mut self, net: &mut DenseNet<T>, grads: &Gradients<T>) -> Result<(), NetError> {
        if grads.layers.len() != net.layers().len() {
            return Err(NetError::ShapeMismatch("gradient layer count".into()));
        }
        for (i, (g, l)) in grads.layers.iter().zip(net.layers()).enumerate() {
            if g.weights.len() != l.weights().len() || g.biases.len() != l.biases().len() {
                return Err(NetError::ShapeMismatch(format!("layer {i} gradient shape")));
            }
            if !g.weights.iter().all(|v| v.is_finite()) {
                return Err(NetError::NonFiniteGradient { layer: i, block: "weights" });
            }
            if !g.biases.iter().all(|v| v.is_finite()) {
                return Err(NetError::NonFiniteGradient { layer: i, block: "biases" });
            }
        }

        self.t += 1;
        let c = self.config;
        let t = self.t as i32;
        let b1 = T::of(c.beta1);
        let b2 = T::of(c.beta2);
        let one_b1 = T::of(1.0 - c.beta1);
        let one_b2 = T::of(1.0 - c.beta2);
        let bc1 = T::of(1.0 / (1.0 - c.beta1.powi(t)));
        let bc2 = T::of(1.0 / (1.0 - c.beta2.powi(t)));
        let lr = T::of(c.lr);
        let eps = T::of(c.epsilon);

        let update = |p: &mut [T], g: &[T], m: &mut [T], v: &mut [T]| {
            for (((p, &g), m), v) in p.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                *m = b1 * *m + one_b1 * g;
                *v = b2 * *v + one_b2 * g * g;
                let m_hat = *m * bc1;
                let v_hat = *v * bc2;
                *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
            }
        };
        for (((layer, g), m), v) in net
            .layers_mut()
            .iter_mut()
            .zip(&grads.layers)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            update(layer.weights_mut(), &g.weights, &mut m.weights, &mut v.weights);
            update(layer.biases_mut(), &g.biases, &mut m.biases, &mut v.biases);
        }
        Ok(())
    }
}
