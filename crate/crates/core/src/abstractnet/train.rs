use ndarray::{ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::config::NetConfig;
use super::loss::{smooth_l1, smooth_l1_grad};
use super::mlp::{Mlp, Mode};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Sample-weighted mean training loss per epoch (train mode, with dropout).
    pub epoch_losses: Vec<f64>,
    pub validation_loss: Option<f64>,
}

/// Mini-batch Adam on the smooth L1 loss. Leaves the network in eval mode.
pub fn train(mlp: &mut Mlp, x: ArrayView2<f64>, y: ArrayView2<f64>, cfg: &NetConfig) -> Result<TrainReport> {
    train_with_validation(mlp, x, y, None, cfg)
}

pub fn train_with_validation(
    mlp: &mut Mlp,
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    validation: Option<(ArrayView2<f64>, ArrayView2<f64>)>,
    cfg: &NetConfig,
) -> Result<TrainReport> {
    let n = x.nrows();
    if n == 0 || y.nrows() != n {
        return Err(Error::Shape(format!("{} inputs vs {} targets", n, y.nrows())));
    }
    if y.ncols() != mlp.output_dim() {
        return Err(Error::Shape(format!(
            "targets have {} columns, network outputs {}",
            y.ncols(),
            mlp.output_dim()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training targets".into()));
    }
    let mut rng = rng_from_seed(derive_seed(cfg.seed, &[0x0074_7261_696e]));
    let mut adam = Adam::new(mlp, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    let batch = cfg.batch_size.max(1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    mlp.mode = Mode::Train;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (b, rows) in order.chunks(batch).enumerate() {
            let xb = x.select(Axis(0), rows);
            let yb = y.select(Axis(0), rows);
            let pass = mlp.forward(xb.view(), &mut rng)?;
            let loss = smooth_l1(pass.output.view(), yb.view(), cfg.loss_lambda);
            if !loss.is_finite() {
                mlp.mode = Mode::Eval;
                return Err(Error::NonFinite(format!(
                    "training loss {loss} at epoch {epoch}, batch {b} (lr {}, lambda {})",
                    cfg.learning_rate, cfg.loss_lambda
                )));
            }
            let grad = smooth_l1_grad(pass.output.view(), yb.view(), cfg.loss_lambda);
            let grads = mlp.backward(&pass, grad.view());
            adam.step(mlp, &grads, cfg.learning_rate);
            total += loss * rows.len() as f64;
        }
        epoch_losses.push(total / n as f64);
    }
    mlp.mode = Mode::Eval;
    let validation_loss = match validation {
        Some((xv, yv)) => {
            let pred = mlp.predict(xv)?;
            Some(smooth_l1(pred.view(), yv, cfg.loss_lambda))
        }
        None => None,
    };
    Ok(TrainReport {
        epoch_losses,
        validation_loss,
    })
}
