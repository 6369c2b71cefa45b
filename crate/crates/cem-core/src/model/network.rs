//! Dense feed-forward classifier with analytic input gradients.
//!
//! A [`DenseNetwork`] is an ordered stack of affine layers with element-wise
//! activations. The final layer is always `identity`, so [`DenseNetwork::predict`]
//! returns unnormalized prediction scores ("logits"), one per class. The
//! solver never needs probabilities: it consumes raw scores and their input
//! gradients.

use serde::{Deserialize, Serialize};

use super::Activation;
use crate::error::{Error, Result};

/// One affine layer: `y = activation(W x + b)` with `W` row-major `[out × in]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    /// Row-major, `out_dim * in_dim` entries; row `o` holds the weights
    /// feeding output unit `o`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidModel("layer dimensions must be > 0".into()));
        }
        if weights.len() != in_dim * out_dim {
            return Err(Error::dim("layer weights", in_dim * out_dim, weights.len()));
        }
        if bias.len() != out_dim {
            return Err(Error::dim("layer bias", out_dim, bias.len()));
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel(
                "layer contains non-finite parameters".into(),
            ));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weights,
            bias,
            activation,
        })
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    #[inline]
    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub(crate) fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    /// Pre-activations `W x + b`.
    pub(crate) fn affine(&self, input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.in_dim);
        let mut out = self.bias.clone();
        for (o, acc) in out.iter_mut().enumerate() {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut sum = 0.0;
            for (w, x) in row.iter().zip(input) {
                sum += w * x;
            }
            *acc += sum;
        }
        out
    }

    /// `x ← activation(x)` in place.
    pub(crate) fn activate(&self, pre: &mut [f64]) {
        if self.activation == Activation::Identity {
            return;
        }
        for v in pre.iter_mut() {
            *v = self.activation.apply(*v);
        }
    }

    /// Given `d_out = dL/d(post-activation)` and the stored pre-activations,
    /// returns `dL/d(input)`.
    pub(crate) fn backprop_input(&self, pre: &[f64], d_out: &[f64]) -> Vec<f64> {
        debug_assert_eq!(pre.len(), self.out_dim);
        debug_assert_eq!(d_out.len(), self.out_dim);
        let mut d_in = vec![0.0; self.in_dim];
        for o in 0..self.out_dim {
            let dz = d_out[o] * self.activation.derivative(pre[o]);
            if dz == 0.0 {
                continue;
            }
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            for (di, w) in d_in.iter_mut().zip(row) {
                *di += w * dz;
            }
        }
        d_in
    }
}

/// Forward pass through a layer stack; returns the final post-activation.
pub(crate) fn stack_forward(layers: &[DenseLayer], x: &[f64]) -> Vec<f64> {
    let mut cur = x.to_vec();
    for layer in layers {
        let mut pre = layer.affine(&cur);
        layer.activate(&mut pre);
        cur = pre;
    }
    cur
}

/// Forward pass that keeps every layer's pre-activations (needed for
/// backprop through relu masks).
pub(crate) fn stack_forward_trace(layers: &[DenseLayer], x: &[f64]) -> Vec<Vec<f64>> {
    let mut pres = Vec::with_capacity(layers.len());
    let mut cur = x.to_vec();
    for layer in layers {
        let pre = layer.affine(&cur);
        cur = pre.clone();
        layer.activate(&mut cur);
        pres.push(pre);
    }
    pres
}

/// Backpropagates `d_out` (gradient w.r.t. the stack output) to the stack
/// input, given the pre-activations from [`stack_forward_trace`].
pub(crate) fn stack_backprop_input(
    layers: &[DenseLayer],
    pres: &[Vec<f64>],
    d_out: Vec<f64>,
) -> Vec<f64> {
    let mut upstream = d_out;
    for (layer, pre) in layers.iter().zip(pres).rev() {
        upstream = layer.backprop_input(pre, &upstream);
    }
    upstream
}

/// Smallest |pre-activation| across all relu units of the stack at `x`
/// (`f64::INFINITY` when the stack has no relu units).
pub(crate) fn stack_kink_margin(layers: &[DenseLayer], x: &[f64]) -> f64 {
    let mut margin = f64::INFINITY;
    let mut cur = x.to_vec();
    for layer in layers {
        let mut pre = layer.affine(&cur);
        if layer.activation == Activation::Relu {
            for z in &pre {
                margin = margin.min(z.abs());
            }
        }
        layer.activate(&mut pre);
        cur = pre;
    }
    margin
}

/// A dense classifier. Output scores are logits: the last layer uses the
/// `identity` activation by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNetwork {
    layers: Vec<DenseLayer>,
}

impl DenseNetwork {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidModel("network has no layers".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::InvalidModel(format!(
                    "layer {} output dim {} does not chain into layer {} input dim {}",
                    k,
                    pair[0].out_dim(),
                    k + 1,
                    pair[1].in_dim()
                )));
            }
        }
        let last = layers.last().expect("non-empty");
        if last.activation() != Activation::Identity {
            return Err(Error::InvalidModel(
                "final layer must use the identity activation (scores are logits)".into(),
            ));
        }
        Ok(Self { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    /// Number of classes, i.e. the output dimension.
    pub fn num_classes(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim()
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::dim("network input", self.input_dim(), x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("network input is non-finite".into()));
        }
        Ok(())
    }

    /// Prediction scores for all classes. Pure: equal inputs give bitwise
    /// equal outputs.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(stack_forward(&self.layers, x))
    }

    /// Gradient of `⟨class_weights, predict(x)⟩` with respect to `x`,
    /// computed by reverse-mode accumulation.
    pub fn input_gradient(&self, x: &[f64], class_weights: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        if class_weights.len() != self.num_classes() {
            return Err(Error::dim(
                "class weights",
                self.num_classes(),
                class_weights.len(),
            ));
        }
        let pres = stack_forward_trace(&self.layers, x);
        Ok(stack_backprop_input(
            &self.layers,
            &pres,
            class_weights.to_vec(),
        ))
    }

    /// Distance of the closest relu pre-activation to its kink at `x`.
    ///
    /// Finite-difference gradient checks are only meaningful at points where
    /// this margin exceeds the probe step; returns `f64::INFINITY` for
    /// relu-free networks.
    pub fn kink_margin(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(stack_kink_margin(&self.layers, x))
    }
}
