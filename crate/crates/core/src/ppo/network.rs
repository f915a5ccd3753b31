//! Shared-trunk actor-critic MLP with hand-written backpropagation.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::PpoError;

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub obs_dim: usize,
    pub hidden_units: usize,
    pub hidden_layers: usize,
    pub action_dim: usize,
}

impl Architecture {
    pub fn new(obs_dim: usize, hidden_units: usize, hidden_layers: usize, action_dim: usize) -> Self {
        Self {
            obs_dim,
            hidden_units,
            hidden_layers,
            action_dim,
        }
    }
}

/// Fully connected layer, `y = x W + b` with `W` shaped `(in, out)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weight: Array2::zeros((inputs, outputs)),
            bias: Array1::zeros(outputs),
        }
    }

    fn apply(&self, x: &ArrayView2<f64>) -> Array2<f64> {
        let mut y = x.dot(&self.weight);
        y += &self.bias;
        y
    }

    pub fn inputs(&self) -> usize {
        self.weight.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.weight.ncols()
    }
}

/// Policy and value networks sharing a tanh trunk. The policy head emits a
/// tanh-squashed Gaussian mean; the log standard deviation is a free,
/// state-independent parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub hidden: Vec<Dense>,
    pub policy_head: Dense,
    pub value_head: Dense,
    pub log_std: Array1<f64>,
}

/// Intermediate values of a batched forward pass, kept for backprop.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Input followed by each hidden activation.
    pub activations: Vec<Array2<f64>>,
    pub mean: Array2<f64>,
    pub value: Array1<f64>,
    /// Log-std after clamping.
    pub log_std: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutput {
    pub mean: Vec<f64>,
    pub log_std: Vec<f64>,
    pub value: f64,
}

impl NetworkParams {
    pub fn zeros(arch: Architecture) -> Self {
        let mut hidden = Vec::with_capacity(arch.hidden_layers);
        let mut inputs = arch.obs_dim;
        for _ in 0..arch.hidden_layers {
            hidden.push(Dense::zeros(inputs, arch.hidden_units));
            inputs = arch.hidden_units;
        }
        Self {
            hidden,
            policy_head: Dense::zeros(inputs, arch.action_dim),
            value_head: Dense::zeros(inputs, 1),
            log_std: Array1::zeros(arch.action_dim),
        }
    }

    /// Orthogonal trunk weights, zero biases and zero output layers: the
    /// initial policy has mean 0 and the initial value estimate is 0.
    pub fn init<R: Rng + ?Sized>(arch: Architecture, rng: &mut R, init_log_std: f64) -> Self {
        let mut params = Self::zeros(arch);
        for layer in &mut params.hidden {
            layer.weight = orthogonal(layer.inputs(), layer.outputs(), 1.0, rng);
        }
        params.log_std.fill(init_log_std.clamp(LOG_STD_MIN, LOG_STD_MAX));
        params
    }

    /// Random everything, including output layers. Used by gradient checks.
    pub fn random<R: Rng + ?Sized>(arch: Architecture, rng: &mut R, scale: f64) -> Self {
        let mut params = Self::zeros(arch);
        let mut fill = |a: &mut dyn Iterator<Item = &mut f64>| {
            for v in a {
                *v = scale * rng.sample::<f64, _>(StandardNormal);
            }
        };
        for layer in params.layers_mut() {
            fill(&mut layer.weight.iter_mut());
            fill(&mut layer.bias.iter_mut());
        }
        params
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            obs_dim: self.hidden.first().map_or(self.policy_head.inputs(), Dense::inputs),
            hidden_units: self.hidden.first().map_or(0, Dense::outputs),
            hidden_layers: self.hidden.len(),
            action_dim: self.policy_head.outputs(),
        }
    }

    pub fn layers(&self) -> impl Iterator<Item = &Dense> {
        self.hidden
            .iter()
            .chain(std::iter::once(&self.policy_head))
            .chain(std::iter::once(&self.value_head))
    }

    pub fn layers_mut(&mut self) -> impl Iterator<Item = &mut Dense> {
        self.hidden
            .iter_mut()
            .chain(std::iter::once(&mut self.policy_head))
            .chain(std::iter::once(&mut self.value_head))
    }

    pub fn num_params(&self) -> usize {
        self.layers()
            .map(|l| l.weight.len() + l.bias.len())
            .sum::<usize>()
            + self.log_std.len()
    }

    /// Parameters in a fixed order: each layer's weights (row-major) then
    /// bias, trunk first, then policy head, value head, log-std.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for layer in self.layers() {
            out.extend(layer.weight.iter());
            out.extend(layer.bias.iter());
        }
        out.extend(self.log_std.iter());
        out
    }

    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<(), PpoError> {
        if flat.len() != self.num_params() {
            return Err(PpoError::Dimension(format!(
                "expected {} parameters, got {}",
                self.num_params(),
                flat.len()
            )));
        }
        let mut rest = flat;
        let mut take = |dst: &mut dyn Iterator<Item = &mut f64>| {
            for d in dst {
                *d = rest[0];
                rest = &rest[1..];
            }
        };
        for layer in self.layers_mut() {
            take(&mut layer.weight.iter_mut());
            take(&mut layer.bias.iter_mut());
        }
        take(&mut self.log_std.iter_mut());
        Ok(())
    }

    pub fn check_finite(&self) -> Result<(), PpoError> {
        let finite = self
            .layers()
            .all(|l| l.weight.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
            && self.log_std.iter().all(|v| v.is_finite());
        if finite {
            Ok(())
        } else {
            Err(PpoError::NonFinite("network parameter".into()))
        }
    }

    pub fn clamped_log_std(&self) -> Array1<f64> {
        self.log_std.mapv(|v| v.clamp(LOG_STD_MIN, LOG_STD_MAX))
    }

    pub fn forward_batch(&self, obs: ArrayView2<f64>) -> ForwardPass {
        let mut activations = Vec::with_capacity(self.hidden.len() + 1);
        activations.push(obs.to_owned());
        for layer in &self.hidden {
            let mut z = layer.apply(&activations.last().expect("input").view());
            z.mapv_inplace(f64::tanh);
            activations.push(z);
        }
        let top = activations.last().expect("input").view();
        let mut mean = self.policy_head.apply(&top);
        mean.mapv_inplace(f64::tanh);
        let value = self.value_head.apply(&top).column(0).to_owned();
        ForwardPass {
            activations,
            mean,
            value,
            log_std: self.clamped_log_std(),
        }
    }

    /// Single-observation forward pass. Fails on non-finite parameters or
    /// outputs.
    pub fn forward(&self, obs: &[f64]) -> Result<PolicyOutput, PpoError> {
        let arch = self.architecture();
        if obs.len() != arch.obs_dim {
            return Err(PpoError::Dimension(format!(
                "observation has {} components, network expects {}",
                obs.len(),
                arch.obs_dim
            )));
        }
        self.check_finite()?;
        self.infer(obs)
    }

    /// [`Self::forward`] without the parameter scan, for callers that
    /// validated the parameters once up front. Outputs are still checked.
    pub(crate) fn infer(&self, obs: &[f64]) -> Result<PolicyOutput, PpoError> {
        if obs.len() != self.architecture().obs_dim {
            return Err(PpoError::Dimension(format!(
                "observation has {} components, network expects {}",
                obs.len(),
                self.architecture().obs_dim
            )));
        }
        let x = ArrayView2::from_shape((1, obs.len()), obs).expect("shape");
        let pass = self.forward_batch(x);
        let out = PolicyOutput {
            mean: pass.mean.row(0).to_vec(),
            log_std: pass.log_std.to_vec(),
            value: pass.value[0],
        };
        if out.mean.iter().chain(std::iter::once(&out.value)).all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(PpoError::NonFinite("network output".into()))
        }
    }

    /// Gradient of a scalar objective given its partial derivatives with
    /// respect to the post-tanh means `(n, action_dim)`, the values `(n)` and
    /// the clamped log-std `(action_dim)`.
    pub fn backward(
        &self,
        pass: &ForwardPass,
        d_mean: &Array2<f64>,
        d_value: &Array1<f64>,
        d_log_std: &Array1<f64>,
    ) -> NetworkParams {
        let mut grad = NetworkParams::zeros(self.architecture());
        let top = pass.activations.last().expect("input");

        let d_pre_mean = d_mean * &pass.mean.mapv(|m| 1.0 - m * m);
        grad.policy_head.weight = top.t().dot(&d_pre_mean);
        grad.policy_head.bias = d_pre_mean.sum_axis(Axis(0));

        let d_value_col = d_value.view().insert_axis(Axis(1));
        grad.value_head.weight = top.t().dot(&d_value_col);
        grad.value_head.bias = d_value_col.sum_axis(Axis(0));

        let mut d_hidden =
            d_pre_mean.dot(&self.policy_head.weight.t()) + d_value_col.dot(&self.value_head.weight.t());
        for l in (0..self.hidden.len()).rev() {
            let out = &pass.activations[l + 1];
            let d_pre = &d_hidden * &out.mapv(|h| 1.0 - h * h);
            let input = &pass.activations[l];
            grad.hidden[l].weight = input.t().dot(&d_pre);
            grad.hidden[l].bias = d_pre.sum_axis(Axis(0));
            if l > 0 {
                d_hidden = d_pre.dot(&self.hidden[l].weight.t());
            }
        }

        for (g, (&d, &raw)) in grad
            .log_std
            .iter_mut()
            .zip(d_log_std.iter().zip(self.log_std.iter()))
        {
            // The clamp passes gradient only strictly inside its range.
            *g = if raw > LOG_STD_MIN && raw < LOG_STD_MAX { d } else { 0.0 };
        }
        grad
    }
}

/// `(rows, cols)` matrix with orthonormal rows or columns (whichever is
/// shorter), scaled by `gain`.
fn orthogonal<R: Rng + ?Sized>(rows: usize, cols: usize, gain: f64, rng: &mut R) -> Array2<f64> {
    let (long, short) = (rows.max(cols), rows.min(cols));
    let mut q = Array2::<f64>::zeros((long, short));
    q.mapv_inplace(|_| rng.sample::<f64, _>(StandardNormal));
    // Modified Gram-Schmidt on the columns.
    for j in 0..short {
        for k in 0..j {
            let proj = q.column(j).dot(&q.column(k));
            let prev = q.column(k).to_owned();
            q.column_mut(j).scaled_add(-proj, &prev);
        }
        let norm = q.column(j).dot(&q.column(j)).sqrt();
        q.column_mut(j).mapv_inplace(|v| v / norm);
    }
    let q = if rows >= cols { q } else { q.t().as_standard_layout().into_owned() };
    q.mapv(|v| v * gain)
}
