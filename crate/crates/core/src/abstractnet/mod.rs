//! Deep regression network whose last hidden layer supplies abstract
//! meta-features.
//!
//! The default [`NetConfig`] is five fully connected ReLU layers
//! (64, 64, 64, 64, 16) and a linear 3-unit output, trained on the smooth L1
//! loss with Adam. Inverted dropout follows hidden layers 2 (p = 0.1) and
//! 4 (p = 0.05). Abstract features are the post-ReLU activations of the
//! 16-unit layer, read in eval mode.

mod adam;
mod checkpoint;
mod config;
mod loss;
mod mlp;
mod train;

pub use adam::{adam_update, Adam};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use config::{Activation, DropoutSpec, NetConfig};
pub use loss::{smooth_l1, smooth_l1_grad, smooth_l1_point, smooth_l1_point_deriv};
pub use mlp::{Dense, ForwardPass, Gradients, Mlp, Mode};
pub use train::{train, train_with_validation, TrainReport};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Builds an untrained network for `input_dim` features from `cfg`.
pub fn init(cfg: &NetConfig, input_dim: usize) -> Result<Mlp> {
    cfg.validate()?;
    if input_dim == 0 {
        return Err(Error::invalid("input_dim must be at least 1"));
    }
    let mut dims = vec![input_dim];
    dims.extend(&cfg.hidden_sizes);
    dims.push(cfg.output_dim);
    Mlp::from_dims(&dims, cfg.activation, cfg.dropout.clone(), cfg.seed)
}

/// `n x latent_width` post-activation outputs of the last hidden layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentMatrix(pub Array2<f64>);

impl LatentMatrix {
    pub fn width(&self) -> usize {
        self.0.ncols()
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    /// Column names `z1..zK`.
    pub fn column_names(&self) -> Vec<String> {
        (1..=self.width()).map(|i| format!("z{i}")).collect()
    }
}

/// Eval-mode forward pass returning the last hidden layer.
pub fn extract_latent(mlp: &Mlp, x: ArrayView2<f64>) -> Result<LatentMatrix> {
    if x.ncols() != mlp.input_dim() {
        return Err(Error::Shape(format!(
            "latent extraction expects {} columns, got {}",
            mlp.input_dim(),
            x.ncols()
        )));
    }
    let pass = mlp.forward_eval(x)?;
    let last = pass
        .activations
        .last()
        .ok_or_else(|| Error::invalid("network has no hidden layer"))?;
    Ok(LatentMatrix(last.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_architecture_shapes() {
        let mlp = init(&NetConfig::default(), 154).unwrap();
        let shapes: Vec<(usize, usize)> = mlp.layers.iter().map(|l| l.weights.dim()).collect();
        assert_eq!(
            shapes,
            vec![(154, 64), (64, 64), (64, 64), (64, 64), (64, 16), (16, 3)]
        );
    }

    #[test]
    fn same_seed_same_parameters() {
        let a = init(&NetConfig::default(), 20).unwrap();
        let b = init(&NetConfig::default(), 20).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn he_variance_of_first_layer() {
        let mlp = init(&NetConfig::default(), 154).unwrap();
        let w = &mlp.layers[0].weights;
        let n = w.len() as f64;
        let mean = w.sum() / n;
        let var = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let target = 2.0 / 154.0;
        assert!((var - target).abs() / target < 0.10, "variance {var}");
    }

    #[test]
    fn latent_is_sixteen_wide_nonnegative_and_repeatable() {
        let mlp = init(&NetConfig::default(), 7).unwrap();
        let x = Array2::from_shape_fn((52, 7), |(i, j)| ((i * 7 + j) as f64).sin());
        let z = extract_latent(&mlp, x.view()).unwrap();
        assert_eq!((z.rows(), z.width()), (52, 16));
        assert!(z.0.iter().all(|v| *v >= 0.0));
        assert_eq!(z, extract_latent(&mlp, x.view()).unwrap());
        assert!(extract_latent(&mlp, Array2::zeros((2, 6)).view()).is_err());
    }
}
