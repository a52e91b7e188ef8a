use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layer::{axpy, Activation, DenseLayer, Real};
use super::NetError;

/// An ordered chain of dense layers.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet<T> {
    layers: Vec<DenseLayer<T>>,
    seed: u64,
}

/// Outputs of every layer for a batch of `batch` rows, each layer stored row-major.
#[derive(Debug, Clone)]
pub struct Activations<T> {
    pub batch: usize,
    pub layers: Vec<Vec<T>>,
}

impl<T: Real> Activations<T> {
    /// The network output (last layer), `batch × out`.
    pub fn output(&self) -> &[T] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Parameter gradients for one layer, shaped like the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads<T> {
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

/// Gradients for every parameter of a net, summed over the batch,
/// plus the gradient with respect to the input when requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub layers: Vec<LayerGrads<T>>,
    pub input: Option<Vec<T>>,
}

impl<T: Real> Gradients<T> {
    pub fn zeros_like(net: &DenseNet<T>) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrads {
                    weights: vec![T::zero(); l.weights.len()],
                    biases: vec![T::zero(); l.biases.len()],
                })
                .collect(),
            input: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|g| g.weights.iter().chain(&g.biases).all(|v| v.is_finite()))
    }
}

impl<T: Real> DenseNet<T> {
    /// Glorot-uniform weights in ±√(6/(fan_in+fan_out)), zero biases, reproducible per seed.
    pub fn init(dims: &[usize], activations: &[Activation], seed: u64) -> Result<Self, NetError> {
        if dims.len() < 2 {
            return Err(NetError::InvalidDims("need at least one layer".into()));
        }
        if dims.contains(&0) {
            return Err(NetError::InvalidDims(format!("zero-width layer in {dims:?}")));
        }
        if activations.len() != dims.len() - 1 {
            return Err(NetError::InvalidDims(format!(
                "{} layers but {} activations",
                dims.len() - 1,
                activations.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .zip(activations)
            .map(|(w, &act)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let tb = T::of(bound);
                let weights = (0..fan_in * fan_out)
                    .map(|_| T::of(rng.random_range(-bound..=bound)).max(-tb).min(tb))
                    .collect();
                DenseLayer::from_parts(fan_in, fan_out, weights, vec![T::zero(); fan_out], act)
            })
            .collect();
        DenseNet::from_layers(layers, seed)
    }

    pub fn from_layers(layers: Vec<DenseLayer<T>>, seed: u64) -> Result<Self, NetError> {
        if layers.is_empty() {
            return Err(NetError::InvalidDims("need at least one layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].outputs != pair[1].inputs {
                return Err(NetError::InvalidDims(format!(
                    "layer {i} outputs {} but layer {} takes {}",
                    pair[0].outputs,
                    i + 1,
                    pair[1].inputs
                )));
            }
        }
        let last = layers.len() - 1;
        if let Some(i) = layers[..last]
            .iter()
            .position(|l| l.activation == Activation::Softmax)
        {
            return Err(NetError::InvalidDims(format!(
                "softmax is only allowed on the final layer (found on layer {i})"
            )));
        }
        Ok(DenseNet { layers, seed })
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    /// `[input, hidden..., output]`
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(|l| l.outputs))
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(DenseLayer::is_finite)
    }

    fn check_batch(&self, inputs: &[T], batch: usize) -> Result<(), NetError> {
        let expected = batch * self.input_dim();
        if inputs.len() != expected {
            return Err(NetError::DimensionMismatch {
                expected,
                found: inputs.len(),
            });
        }
        Ok(())
    }

    /// Runs `batch` row-major input rows through every layer, keeping all layer outputs.
    pub fn forward_batch(&self, inputs: &[T], batch: usize) -> Result<Activations<T>, NetError> {
        self.check_batch(inputs, batch)?;
        let mut outs: Vec<Vec<T>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let prev: &[T] = outs.last().map(Vec::as_slice).unwrap_or(inputs);
            let mut out = vec![T::zero(); batch * layer.outputs];
            for (x, y) in prev
                .chunks_exact(layer.inputs)
                .zip(out.chunks_exact_mut(layer.outputs))
            {
                layer.affine_into(x, y);
                layer.activation.apply(y);
            }
            outs.push(out);
        }
        Ok(Activations { batch, layers: outs })
    }

    pub fn forward(&self, x: &[T]) -> Result<Activations<T>, NetError> {
        self.forward_batch(x, 1)
    }

    /// Final-layer output for a single input.
    pub fn predict(&self, x: &[T]) -> Result<Vec<T>, NetError> {
        Ok(self.forward(x)?.layers.pop().unwrap_or_default())
    }

    /// Final-layer pre-activations for a single input.
    pub fn logits(&self, x: &[T]) -> Result<Vec<T>, NetError> {
        self.check_batch(x, 1)?;
        let mut cur = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut next = vec![T::zero(); layer.outputs];
            layer.affine_into(&cur, &mut next);
            if i != last {
                layer.activation.apply(&mut next);
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Backpropagates `loss_grad` (dL/d output, `batch × out`) through the activations of a
    /// matching `forward_batch` call. Parameter gradients are summed over the batch.
    pub fn backward(
        &self,
        inputs: &[T],
        acts: &Activations<T>,
        loss_grad: &[T],
        want_input_grad: bool,
    ) -> Result<Gradients<T>, NetError> {
        let batch = acts.batch;
        self.check_batch(inputs, batch)?;
        if acts.layers.len() != self.layers.len()
            || acts
                .layers
                .iter()
                .zip(&self.layers)
                .any(|(a, l)| a.len() != batch * l.outputs)
        {
            return Err(NetError::ShapeMismatch("activations do not match this net".into()));
        }
        if loss_grad.len() != batch * self.output_dim() {
            return Err(NetError::DimensionMismatch {
                expected: batch * self.output_dim(),
                found: loss_grad.len(),
            });
        }

        let mut grads = Gradients::zeros_like(self);
        let mut delta = loss_grad.to_vec();
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let (n_in, n_out) = (layer.inputs, layer.outputs);
            let outputs = &acts.layers[li];
            let layer_in: &[T] = if li == 0 { inputs } else { &acts.layers[li - 1] };

            for (d, y) in delta.chunks_exact_mut(n_out).zip(outputs.chunks_exact(n_out)) {
                layer.activation.backprop(y, d);
            }

            let g = &mut grads.layers[li];
            for (d, x) in delta.chunks_exact(n_out).zip(layer_in.chunks_exact(n_in)) {
                for (o, &dz) in d.iter().enumerate() {
                    g.biases[o] = g.biases[o] + dz;
                    axpy(dz, x, &mut g.weights[o * n_in..(o + 1) * n_in]);
                }
            }

            if li > 0 || want_input_grad {
                let mut prev = vec![T::zero(); batch * n_in];
                for (d, p) in delta.chunks_exact(n_out).zip(prev.chunks_exact_mut(n_in)) {
                    for (o, &dz) in d.iter().enumerate() {
                        axpy(dz, &layer.weights[o * n_in..(o + 1) * n_in], p);
                    }
                }
                delta = prev;
            }
        }
        if want_input_grad {
            grads.input = Some(delta);
        }
        if !grads.is_finite() {
            return Err(NetError::NonFinite("backward produced a non-finite gradient".into()));
        }
        Ok(grads)
    }

    /// Same architecture, parameters converted to another scalar type.
    pub fn cast<U: Real>(&self) -> DenseNet<U> {
        DenseNet {
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer {
                    inputs: l.inputs,
                    outputs: l.outputs,
                    weights: l.weights.iter().map(|v| U::of(v.f64())).collect(),
                    biases: l.biases.iter().map(|v| U::of(v.f64())).collect(),
                    activation: l.activation,
                })
                .collect(),
            seed: self.seed,
        }
    }
}
