use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::Float;

/// Scalar type the network is generic over. Production nets are `f32`;
/// `f64` nets exist for finite-difference checking.
pub trait Real: Float + Debug + Display + Default + Send + Sync + 'static {
    fn of(v: f64) -> Self;
    fn f64(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn of(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn of(v: f64) -> Self {
        v
    }
    #[inline]
    fn f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Sigmoid,
    Relu,
    Softmax,
    Identity,
}

impl Activation {
    pub fn tag(self) -> u8 {
        match self {
            Activation::Sigmoid => 0,
            Activation::Relu => 1,
            Activation::Softmax => 2,
            Activation::Identity => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => Activation::Sigmoid,
            1 => Activation::Relu,
            2 => Activation::Softmax,
            3 => Activation::Identity,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
            Activation::Softmax => "softmax",
            Activation::Identity => "identity",
        }
    }

    /// Applies the activation in place to one row of pre-activations.
    pub fn apply<T: Real>(self, row: &mut [T]) {
        match self {
            Activation::Sigmoid => {
                for v in row.iter_mut() {
                    *v = sigmoid(*v);
                }
            }
            Activation::Relu => {
                for v in row.iter_mut() {
                    if *v < T::zero() {
                        *v = T::zero();
                    }
                }
            }
            Activation::Identity => {}
            Activation::Softmax => softmax_in_place(row),
        }
    }

    /// Maps `dL/dy` to `dL/dz` in place, given the activated outputs `y` of one row.
    pub fn backprop<T: Real>(self, y: &[T], grad: &mut [T]) {
        match self {
            Activation::Sigmoid => {
                for (g, &y) in grad.iter_mut().zip(y) {
                    *g = *g * y * (T::one() - y);
                }
            }
            Activation::Relu => {
                for (g, &y) in grad.iter_mut().zip(y) {
                    if y <= T::zero() {
                        *g = T::zero();
                    }
                }
            }
            Activation::Identity => {}
            Activation::Softmax => {
                let dot = grad.iter().zip(y).fold(T::zero(), |acc, (&g, &s)| acc + g * s);
                for (g, &s) in grad.iter_mut().zip(y) {
                    *g = s * (*g - dot);
                }
            }
        }
    }
}

impl FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "relu" => Ok(Activation::Relu),
            "softmax" => Ok(Activation::Softmax),
            "identity" => Ok(Activation::Identity),
            other => Err(format!("unknown activation {other:?}")),
        }
    }
}

#[inline]
pub fn sigmoid<T: Real>(z: T) -> T {
    // split by sign so exp never overflows
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Max-shifted softmax, accumulated in f64.
pub fn softmax_f64<T: Real>(logits: &[T]) -> Vec<f64> {
    let max = logits.iter().map(|v| v.f64()).fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v.f64() - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn softmax_in_place<T: Real>(row: &mut [T]) {
    let probs = softmax_f64(row);
    for (v, p) in row.iter_mut().zip(probs) {
        *v = T::of(p);
    }
}

/// One fully connected layer: `y = act(W x + b)` with `W` stored row-major as out×in.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    pub(crate) inputs: usize,
    pub(crate) outputs: usize,
    pub(crate) weights: Vec<T>,
    pub(crate) biases: Vec<T>,
    pub(crate) activation: Activation,
}

impl<T: Real> DenseLayer<T> {
    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        DenseLayer {
            inputs,
            outputs,
            weights: vec![T::zero(); inputs * outputs],
            biases: vec![T::zero(); outputs],
            activation,
        }
    }

    /// Panics if the buffer lengths disagree with `inputs`/`outputs`.
    pub fn from_parts(
        inputs: usize,
        outputs: usize,
        weights: Vec<T>,
        biases: Vec<T>,
        activation: Activation,
    ) -> Self {
        assert_eq!(weights.len(), inputs * outputs, "weight buffer shape");
        assert_eq!(biases.len(), outputs, "bias buffer shape");
        DenseLayer { inputs, outputs, weights, biases, activation }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [T] {
        &mut self.weights
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    pub fn biases_mut(&mut self) -> &mut [T] {
        &mut self.biases
    }

    pub fn weight(&self, out: usize, input: usize) -> T {
        self.weights[out * self.inputs + input]
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.biases).all(|v| v.is_finite())
    }

    /// Pre-activation for one input row.
    pub(crate) fn affine_into(&self, x: &[T], z: &mut [T]) {
        for ((zo, w_row), &b) in z
            .iter_mut()
            .zip(self.weights.chunks_exact(self.inputs))
            .zip(&self.biases)
        {
            *zo = dot(w_row, x) + b;
        }
    }
}

/// Dot product with eight independent partial sums, combined in a fixed order.
#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] = acc[k] + x[k] * y[k];
        }
    }
    let mut tail = T::zero();
    for (&x, &y) in ra.iter().zip(rb) {
        tail = tail + x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}
