use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::config::{Activation, DropoutSpec};
use crate::rng::{rng_from_seed, Rng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Train,
    Eval,
}

/// Affine layer `q = x W + b`, with `W` stored `fan_in x fan_out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
    pub activation: Activation,
    pub dropout: Vec<DropoutSpec>,
    pub mode: Mode,
}

/// Everything backpropagation needs from one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Input to each affine layer (the batch, then each hidden output).
    pub inputs: Vec<Array2<f64>>,
    /// Pre-activations of each hidden layer.
    pub pre: Vec<Array2<f64>>,
    /// Hidden-layer outputs after activation and dropout.
    pub activations: Vec<Array2<f64>>,
    /// Scaled dropout masks (`0` or `1 / (1 - p)`) per hidden layer.
    pub masks: Vec<Option<Array2<f64>>>,
    pub output: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub bias: Vec<Array1<f64>>,
}

impl Mlp {
    /// He-normal weights (variance `2 / fan_in`) and zero biases.
    pub fn from_dims(
        dims: &[usize],
        activation: Activation,
        dropout: Vec<DropoutSpec>,
        seed: u64,
    ) -> Result<Mlp> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::invalid(format!("invalid layer dimensions {dims:?}")));
        }
        let mut rng = rng_from_seed(seed);
        let layers = dims
            .windows(2)
            .map(|w| {
                let normal = Normal::new(0.0, (2.0 / w[0] as f64).sqrt()).expect("positive sd");
                Dense {
                    weights: Array2::from_shape_simple_fn((w[0], w[1]), || normal.sample(&mut rng)),
                    bias: Array1::zeros(w[1]),
                }
            })
            .collect();
        Ok(Mlp {
            layers,
            activation,
            dropout,
            mode: Mode::Eval,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().weights.ncols()
    }

    pub fn n_hidden(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn hidden_sizes(&self) -> Vec<usize> {
        self.layers[..self.n_hidden()].iter().map(|l| l.weights.ncols()).collect()
    }

    fn dropout_for(&self, hidden_layer: usize) -> Option<f64> {
        self.dropout
            .iter()
            .find(|d| d.layer == hidden_layer)
            .map(|d| d.p)
            .filter(|p| *p > 0.0)
    }

    /// Forward pass honoring `self.mode`; `rng` draws dropout masks in train mode.
    pub fn forward(&self, x: ArrayView2<f64>, rng: &mut Rng) -> Result<ForwardPass> {
        self.forward_impl(x, (self.mode == Mode::Train).then_some(rng))
    }

    /// Forward pass without dropout regardless of mode.
    pub fn forward_eval(&self, x: ArrayView2<f64>) -> Result<ForwardPass> {
        self.forward_impl(x, None)
    }

    fn forward_impl(&self, x: ArrayView2<f64>, mut rng: Option<&mut Rng>) -> Result<ForwardPass> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                x.ncols()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("network input".into()));
        }
        let n_hidden = self.n_hidden();
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(n_hidden);
        let mut activations = Vec::with_capacity(n_hidden);
        let mut masks = Vec::with_capacity(n_hidden);
        let mut current = x.to_owned();
        for (l, layer) in self.layers.iter().enumerate() {
            let q = current.dot(&layer.weights) + &layer.bias;
            inputs.push(current);
            if l == n_hidden {
                return Ok(ForwardPass {
                    inputs,
                    pre,
                    activations,
                    masks,
                    output: q,
                });
            }
            let mut a = q.mapv(|v| self.activation.apply(v));
            let mask = match (self.dropout_for(l + 1), rng.as_deref_mut()) {
                (Some(p), Some(rng)) => {
                    let keep = 1.0 / (1.0 - p);
                    let m = Array2::from_shape_simple_fn(a.dim(), || {
                        if rng.random::<f64>() < p {
                            0.0
                        } else {
                            keep
                        }
                    });
                    a *= &m;
                    Some(m)
                }
                _ => None,
            };
            pre.push(q);
            masks.push(mask);
            activations.push(a.clone());
            current = a;
        }
        unreachable!("output layer returns from the loop")
    }

    /// Eval-mode prediction.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        Ok(self.forward_eval(x)?.output)
    }

    /// Backpropagates `grad_output = dJ/d(output)` through the cached pass,
    /// reusing its dropout masks.
    pub fn backward(&self, pass: &ForwardPass, grad_output: ArrayView2<f64>) -> Gradients {
        let n_layers = self.layers.len();
        let mut gw = vec![Array2::zeros((0, 0)); n_layers];
        let mut gb = vec![Array1::zeros(0); n_layers];
        let mut delta = grad_output.to_owned();
        for l in (0..n_layers).rev() {
            gw[l] = pass.inputs[l].t().dot(&delta);
            gb[l] = delta.sum_axis(Axis(0));
            if l == 0 {
                break;
            }
            let mut da = delta.dot(&self.layers[l].weights.t());
            if let Some(mask) = &pass.masks[l - 1] {
                da *= mask;
            }
            let act = self.activation;
            Zip::from(&mut da)
                .and(&pass.pre[l - 1])
                .for_each(|d, &q| *d *= act.derivative(q));
            delta = da;
        }
        Gradients { weights: gw, bias: gb }
    }

    /// Flattened parameters in layer order (weights row-major, then bias).
    pub fn flat_params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        let mut it = params.iter();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *w = *it.next().expect("parameter vector too short");
            }
        }
        assert!(it.next().is_none(), "parameter vector too long");
    }
}

impl Gradients {
    pub fn flat(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstractnet::{smooth_l1, smooth_l1_grad};
    use ndarray::array;

    fn small() -> Mlp {
        Mlp::from_dims(&[4, 5, 3, 2], Activation::Relu, vec![], 3).unwrap()
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let mut m = small();
        let zeros = vec![0.0; m.flat_params().len()];
        m.set_flat_params(&zeros);
        let out = m.predict(array![[1.0, -2.0, 3.0, 0.5]].view()).unwrap();
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn exact_fit_has_zero_gradient() {
        let m = small();
        let x = array![[0.3, -0.2, 0.9, 1.1], [0.1, 0.4, -0.7, 0.2]];
        let pass = m.forward_eval(x.view()).unwrap();
        let y = pass.output.clone();
        let g = m.backward(&pass, smooth_l1_grad(pass.output.view(), y.view(), 1.0).view());
        assert!(g.flat().iter().all(|v| *v == 0.0));
        assert_eq!(smooth_l1(pass.output.view(), y.view(), 1.0), 0.0);
    }

    #[test]
    fn duplicated_batch_same_gradient() {
        let m = small();
        let x = array![[0.3, -0.2, 0.9, 1.1], [0.1, 0.4, -0.7, 0.2]];
        let y = array![[1.0, 0.0], [0.5, 2.0]];
        let grad_of = |x: &Array2<f64>, y: &Array2<f64>| {
            let pass = m.forward_eval(x.view()).unwrap();
            m.backward(&pass, smooth_l1_grad(pass.output.view(), y.view(), 1.0).view())
                .flat()
        };
        let g1 = grad_of(&x, &y);
        let x2 = ndarray::concatenate![Axis(0), x, x];
        let y2 = ndarray::concatenate![Axis(0), y, y];
        let g2 = grad_of(&x2, &y2);
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        let m = small();
        assert!(matches!(
            m.forward_eval(array![[f64::NAN, 0.0, 0.0, 0.0]].view()),
            Err(Error::NonFinite(_))
        ));
    }
}
