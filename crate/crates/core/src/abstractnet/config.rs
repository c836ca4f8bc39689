use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(self, q: f64) -> f64 {
        match self {
            Activation::Relu => q.max(0.0),
        }
    }

    /// Derivative from the pre-activation; the ReLU subgradient at 0 is 0.
    #[inline]
    pub fn derivative(self, q: f64) -> f64 {
        match self {
            Activation::Relu => {
                if q > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Inverted dropout after the activation of hidden layer `layer` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DropoutSpec {
    pub layer: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetConfig {
    pub hidden_sizes: Vec<usize>,
    pub output_dim: usize,
    pub learning_rate: f64,
    pub activation: Activation,
    pub dropout: Vec<DropoutSpec>,
    pub loss_lambda: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            hidden_sizes: vec![64, 64, 64, 64, 16],
            output_dim: 3,
            learning_rate: 0.005,
            activation: Activation::Relu,
            dropout: vec![DropoutSpec { layer: 2, p: 0.1 }, DropoutSpec { layer: 4, p: 0.05 }],
            loss_lambda: 1.0,
            epochs: 500,
            batch_size: 32,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

pub const HIDDEN_LAYERS: usize = 5;
pub const LATENT_WIDTH: usize = 16;

impl NetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_sizes.len() != HIDDEN_LAYERS {
            return Err(Error::Config(format!(
                "network needs {HIDDEN_LAYERS} hidden layers, got {}",
                self.hidden_sizes.len()
            )));
        }
        if self.hidden_sizes.last() != Some(&LATENT_WIDTH) {
            return Err(Error::Config(format!("last hidden layer must have {LATENT_WIDTH} units")));
        }
        if self.hidden_sizes.contains(&0) || self.output_dim == 0 {
            return Err(Error::Config("layer sizes must be positive".into()));
        }
        for d in &self.dropout {
            if !(0.0..1.0).contains(&d.p) {
                return Err(Error::Config(format!("dropout probability {} not in [0, 1)", d.p)));
            }
            if d.layer == 0 || d.layer > self.hidden_sizes.len() {
                return Err(Error::Config(format!("dropout layer {} out of range", d.layer)));
            }
        }
        if !(self.loss_lambda > 0.0) {
            return Err(Error::Config("loss_lambda must be positive".into()));
        }
        if !(self.learning_rate > 0.0) || self.batch_size == 0 {
            return Err(Error::Config("learning_rate and batch_size must be positive".into()));
        }
        Ok(())
    }
}
