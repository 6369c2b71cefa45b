//! Dense autoencoder used as a data-manifold penalty.

use serde::{Deserialize, Serialize};

use super::network::{
    stack_backprop_input, stack_forward, stack_forward_trace, stack_kink_margin, DenseLayer,
};
use crate::error::{Error, Result};

/// Encoder/decoder pair of dense stacks with `input_dim == output_dim`.
///
/// An optional output clamp maps reconstructions into the feature range of
/// the configured feasible space. The clamp is use-time configuration, not
/// part of the persisted weights; its subgradient at a saturated output is 0
/// (same convention as relu at its kink).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseAutoencoder {
    encoder: Vec<DenseLayer>,
    decoder: Vec<DenseLayer>,
    output_clamp: Option<(f64, f64)>,
}

impl DenseAutoencoder {
    pub fn new(
        encoder: Vec<DenseLayer>,
        decoder: Vec<DenseLayer>,
        output_clamp: Option<(f64, f64)>,
    ) -> Result<Self> {
        if encoder.is_empty() || decoder.is_empty() {
            return Err(Error::InvalidModel(
                "autoencoder needs at least one encoder and one decoder layer".into(),
            ));
        }
        let chained = encoder.iter().chain(decoder.iter());
        for (k, pair) in chained
            .collect::<Vec<_>>()
            .windows(2)
            .enumerate()
        {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::InvalidModel(format!(
                    "autoencoder layer {} output dim {} does not chain into layer {} input dim {}",
                    k,
                    pair[0].out_dim(),
                    k + 1,
                    pair[1].in_dim()
                )));
            }
        }
        let in_dim = encoder[0].in_dim();
        let out_dim = decoder.last().expect("non-empty").out_dim();
        if in_dim != out_dim {
            return Err(Error::InvalidModel(format!(
                "autoencoder output dim {out_dim} must equal input dim {in_dim}"
            )));
        }
        if let Some((lo, hi)) = output_clamp {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidModel(format!(
                    "invalid output clamp [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            encoder,
            decoder,
            output_clamp,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.encoder[0].in_dim()
    }

    pub fn encoder(&self) -> &[DenseLayer] {
        &self.encoder
    }

    pub fn decoder(&self) -> &[DenseLayer] {
        &self.decoder
    }

    pub fn output_clamp(&self) -> Option<(f64, f64)> {
        self.output_clamp
    }

    pub fn set_output_clamp(&mut self, clamp: Option<(f64, f64)>) {
        self.output_clamp = clamp;
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::dim("autoencoder input", self.input_dim(), x.len()));
        }
        Ok(())
    }

    /// `decoder(encoder(x))`, clamped into the configured output range.
    pub fn reconstruct(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let latent = stack_forward(&self.encoder, x);
        let mut out = stack_forward(&self.decoder, &latent);
        if let Some((lo, hi)) = self.output_clamp {
            for v in out.iter_mut() {
                *v = v.clamp(lo, hi);
            }
        }
        Ok(out)
    }

    /// Squared reconstruction error `‖x − AE(x)‖₂²`.
    pub fn reconstruction_error(&self, x: &[f64]) -> Result<f64> {
        let rec = self.reconstruct(x)?;
        Ok(x.iter().zip(&rec).map(|(a, b)| (a - b) * (a - b)).sum())
    }

    /// Gradient of `‖x − AE(x)‖₂²` with respect to `x`, backpropagated
    /// through both the residual and the reconstruction:
    /// `2 r − 2 Jᵀ r` with `r = x − AE(x)` and `J = ∂AE/∂x`.
    pub fn reconstruction_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let enc_pres = stack_forward_trace(&self.encoder, x);
        let latent = {
            let mut last = enc_pres.last().expect("non-empty").clone();
            self.encoder.last().expect("non-empty").activate(&mut last);
            last
        };
        let dec_pres = stack_forward_trace(&self.decoder, &latent);
        let raw = {
            let mut last = dec_pres.last().expect("non-empty").clone();
            self.decoder.last().expect("non-empty").activate(&mut last);
            last
        };

        let mut upstream = Vec::with_capacity(raw.len());
        let mut grad = Vec::with_capacity(raw.len());
        for (xi, ri) in x.iter().zip(&raw) {
            let rec = match self.output_clamp {
                Some((lo, hi)) => ri.clamp(lo, hi),
                None => *ri,
            };
            let r2 = 2.0 * (xi - rec);
            grad.push(r2);
            // Clamped outputs pass no gradient back through the decoder.
            let pass = match self.output_clamp {
                Some((lo, hi)) => *ri > lo && *ri < hi,
                None => true,
            };
            upstream.push(if pass { r2 } else { 0.0 });
        }
        let d_latent = stack_backprop_input(&self.decoder, &dec_pres, upstream);
        let d_input = stack_backprop_input(&self.encoder, &enc_pres, d_latent);
        for (g, j) in grad.iter_mut().zip(&d_input) {
            *g -= j;
        }
        Ok(grad)
    }

    /// Smallest distance to a non-differentiable point at `x`: relu kinks in
    /// either stack and clamp saturation boundaries at the output.
    pub fn kink_margin(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let latent = stack_forward(&self.encoder, x);
        let raw = stack_forward(&self.decoder, &latent);
        let mut margin = stack_kink_margin(&self.encoder, x)
            .min(stack_kink_margin(&self.decoder, &latent));
        if let Some((lo, hi)) = self.output_clamp {
            for v in &raw {
                margin = margin.min((v - lo).abs()).min((v - hi).abs());
            }
        }
        Ok(margin)
    }
}
