//! Feed-forward networks with closed-form backpropagation, Adam and global-norm
//! gradient clipping.
//!
//! Hidden layers use `tanh`, the output layer is affine. Batches are row-major
//! `(batch, features)` matrices so minibatch passes run as matrix products.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Anything exposing its parameters as a fixed, ordered list of flat slices.
pub trait Parameters {
    fn param_slices(&self) -> Vec<&[f64]>;
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]>;

    fn param_count(&self) -> usize {
        self.param_slices().iter().map(|s| s.len()).sum()
    }
}

/// One affine layer. `weights` is `(fan_in, fan_out)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            weights: Array2::zeros((fan_in, fan_out)),
            bias: Array1::zeros(fan_out),
        }
    }
}

/// Multilayer perceptron parameters. Gradients use the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Activations kept by a forward pass for the matching backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    sizes: Vec<usize>,
    /// `activations[0]` is the input, `activations[i]` the tanh output of hidden layer `i`.
    activations: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn batch_size(&self) -> usize {
        self.activations[0].nrows()
    }
}

impl Mlp {
    /// Uniform `±1/sqrt(fan_in)` weights, zero biases; the last layer's weights
    /// are multiplied by `output_scale`.
    pub fn new(sizes: &[usize], output_scale: f64, rng: &mut SimRng) -> Result<Self> {
        Self::check_sizes(sizes)?;
        let n = sizes.len() - 1;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                let scale = if i + 1 == n { output_scale } else { 1.0 };
                let weights = Array2::from_shape_simple_fn((w[0], w[1]), || scale * rng.random_range(-bound..bound));
                Dense {
                    weights,
                    bias: Array1::zeros(w[1]),
                }
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        Self::check_sizes(sizes)?;
        Ok(Self {
            layers: sizes.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(),
        })
    }

    fn check_sizes(sizes: &[usize]) -> Result<()> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Shape(format!("invalid layer sizes {sizes:?}")));
        }
        Ok(())
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Dense::zeros(l.weights.nrows(), l.weights.ncols()))
                .collect(),
        }
    }

    /// `[input, hidden..., output]`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].weights.nrows()];
        s.extend(self.layers.iter().map(|l| l.weights.ncols()));
        s
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().map(|l| l.weights.ncols()).unwrap_or(0)
    }

    /// Single-sample forward pass.
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        let x = ArrayView2::from_shape((1, input.len()), input).map_err(|e| Error::Shape(e.to_string()))?;
        let (y, cache) = self.forward_batch(x)?;
        Ok((y.row(0).to_vec(), cache))
    }

    /// Single-sample inference without keeping a cache.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        let x = ArrayView2::from_shape((1, input.len()), input).map_err(|e| Error::Shape(e.to_string()))?;
        Ok(self.run(x, None)?.row(0).to_vec())
    }

    pub fn forward_batch(&self, input: ArrayView2<f64>) -> Result<(Array2<f64>, ForwardCache)> {
        let mut activations = Vec::with_capacity(self.layers.len());
        let y = self.run(input, Some(&mut activations))?;
        Ok((
            y,
            ForwardCache {
                sizes: self.sizes(),
                activations,
            },
        ))
    }

    pub fn predict_batch(&self, input: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.run(input, None)
    }

    fn run(&self, input: ArrayView2<f64>, mut keep: Option<&mut Vec<Array2<f64>>>) -> Result<Array2<f64>> {
        if input.ncols() != self.input_size() {
            return Err(Error::Shape(format!(
                "network expects {} inputs, got {}",
                self.input_size(),
                input.ncols()
            )));
        }
        let last = self.layers.len() - 1;
        let mut x = input.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = x.dot(&layer.weights);
            z += &layer.bias;
            if i < last {
                z.mapv_inplace(f64::tanh);
            }
            let prev = std::mem::replace(&mut x, z);
            if let Some(k) = keep.as_deref_mut() {
                k.push(prev);
            }
        }
        Ok(x)
    }

    /// Parameter gradients of a scalar loss whose gradient w.r.t. the network
    /// output is `grad_output` (`(batch, output)`), summed over the batch.
    pub fn backward(&self, cache: &ForwardCache, grad_output: ArrayView2<f64>) -> Result<Mlp> {
        if cache.sizes != self.sizes() || cache.activations.len() != self.layers.len() {
            return Err(Error::Shape(format!(
                "forward cache for layers {:?} used with network {:?}",
                cache.sizes,
                self.sizes()
            )));
        }
        if grad_output.nrows() != cache.batch_size() || grad_output.ncols() != self.output_size() {
            return Err(Error::Shape(format!(
                "output gradient {:?} does not match batch {} x {}",
                grad_output.shape(),
                cache.batch_size(),
                self.output_size()
            )));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = grad_output.to_owned();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let a_prev = &cache.activations[i];
            let weights = a_prev.t().dot(&delta).as_standard_layout().into_owned();
            let bias = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut back = delta.dot(&layer.weights.t());
                // tanh'(z) = 1 - tanh(z)^2, with tanh(z) cached as the activation.
                back.zip_mut_with(a_prev, |d, &a| *d *= 1.0 - a * a);
                delta = back;
            }
            grads.push(Dense { weights, bias });
        }
        grads.reverse();
        Ok(Mlp { layers: grads })
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Mlp, scale: f64) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights.scaled_add(scale, &b.weights);
            a.bias.scaled_add(scale, &b.bias);
        }
    }
}

impl Parameters for Mlp {
    fn param_slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| {
                [
                    l.weights.as_slice().expect("standard layout"),
                    l.bias.as_slice().expect("standard layout"),
                ]
            })
            .collect()
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                [
                    l.weights.as_slice_mut().expect("standard layout"),
                    l.bias.as_slice_mut().expect("standard layout"),
                ]
            })
            .collect()
    }
}

/// Adam optimiser state for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new<P: Parameters + ?Sized>(params: &P, learning_rate: f64) -> Self {
        let shapes: Vec<usize> = params.param_slices().iter().map(|s| s.len()).collect();
        Self {
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            t: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// Bias-corrected Adam update of `params` with `grads`.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "adam state tracks {} tensors, got {} params / {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        for ((p, g), m) in params.iter().zip(grads).zip(&self.m) {
            if p.len() != m.len() || g.len() != m.len() {
                return Err(Error::Shape("adam tensor length mismatch".into()));
            }
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        let step = self.learning_rate / bc1;
        for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                p[i] -= step * m[i] / ((v[i] / bc2).sqrt() + self.epsilon);
            }
        }
        Ok(())
    }

    /// Convenience wrapper for a [`Parameters`] implementor and a same-shaped gradient.
    pub fn update<P: Parameters + ?Sized>(&mut self, params: &mut P, grads: &P) -> Result<()> {
        let g = grads.param_slices();
        let mut p = params.param_slices_mut();
        self.step(&mut p, &g)
    }
}

pub fn global_norm(grads: &[&[f64]]) -> f64 {
    grads.iter().flat_map(|g| g.iter()).map(|x| x * x).sum::<f64>().sqrt()
}

/// Scale all gradients by `max_norm / norm` when their joint L2 norm exceeds
/// `max_norm`. Returns the norm before clipping.
pub fn clip_global_norm(grads: &mut [&mut [f64]], max_norm: f64) -> f64 {
    let norm = grads.iter().flat_map(|g| g.iter()).map(|x| x * x).sum::<f64>().sqrt();
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        for g in grads.iter_mut() {
            g.iter_mut().for_each(|x| *x *= scale);
        }
    }
    norm
}
