//! Small tanh MLPs for the actor and critic, with hand-rolled forward,
//! backward, and Adam. Everything is f64 so gradients can be checked
//! against central differences.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemInstance;

/// Fully connected net: tanh on hidden layers, linear output. Parameters
/// live in one flat vector, laid out per layer as row-major weights
/// (out x in) followed by biases.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    pub dims: Vec<usize>,
    pub params: Vec<f64>,
}

impl Mlp {
    pub fn param_count(dims: &[usize]) -> usize {
        dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Orthogonal-style init: Gram-Schmidt on a Gaussian matrix, scaled by
    /// `hidden_gain` for hidden layers and `out_gain` for the last layer.
    /// Biases start at zero.
    pub fn orthogonal(dims: &[usize], hidden_gain: f64, out_gain: f64, rng: &mut impl Rng) -> Self {
        let mut params = Vec::with_capacity(Self::param_count(dims));
        let n_layers = dims.len() - 1;
        for (l, w) in dims.windows(2).enumerate() {
            let (in_dim, out_dim) = (w[0], w[1]);
            let gain = if l + 1 == n_layers { out_gain } else { hidden_gain };
            let m = orthogonal_matrix(out_dim, in_dim, rng);
            params.extend(m.into_iter().map(|v| v * gain));
            params.extend(std::iter::repeat(0.0).take(out_dim));
        }
        Mlp { dims: dims.to_vec(), params }
    }

    fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let mut off = 0;
        for w in self.dims.windows(2).take(l) {
            off += w[0] * w[1] + w[1];
        }
        let (in_dim, out_dim) = (self.dims[l], self.dims[l + 1]);
        let wts = &self.params[off..off + in_dim * out_dim];
        let bias = &self.params[off + in_dim * out_dim..off + in_dim * out_dim + out_dim];
        (wts, bias)
    }

    /// Forward pass; returns the output and the post-activation of every
    /// layer (input first) for use by `backward`.
    pub fn forward(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        assert_eq!(x.len(), self.dims[0]);
        let n_layers = self.dims.len() - 1;
        let mut acts = Vec::with_capacity(n_layers + 1);
        acts.push(x.to_vec());
        let mut a = x.to_vec();
        for l in 0..n_layers {
            let (wts, bias) = self.layer(l);
            let (in_dim, out_dim) = (self.dims[l], self.dims[l + 1]);
            let mut z = bias.to_vec();
            for o in 0..out_dim {
                let row = &wts[o * in_dim..(o + 1) * in_dim];
                z[o] += row.iter().zip(&a).map(|(w, x)| w * x).sum::<f64>();
            }
            if l + 1 < n_layers {
                for v in &mut z {
                    *v = v.tanh();
                }
            }
            acts.push(z.clone());
            a = z;
        }
        (a, acts)
    }

    pub fn output(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).0
    }

    /// Backprop of `d_out` (gradient of the loss w.r.t. the linear output)
    /// through the cached activations; accumulates into `grad`, which must
    /// have `params.len()` entries.
    pub fn backward(&self, acts: &[Vec<f64>], d_out: &[f64], grad: &mut [f64]) {
        assert_eq!(grad.len(), self.params.len());
        let n_layers = self.dims.len() - 1;
        let mut delta = d_out.to_vec();
        let mut layer_offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for w in self.dims.windows(2) {
            layer_offsets.push(off);
            off += w[0] * w[1] + w[1];
        }
        for l in (0..n_layers).rev() {
            let (in_dim, out_dim) = (self.dims[l], self.dims[l + 1]);
            let off = layer_offsets[l];
            let input = &acts[l];
            for o in 0..out_dim {
                let g = delta[o];
                let wrow = off + o * in_dim;
                for i in 0..in_dim {
                    grad[wrow + i] += g * input[i];
                }
                grad[off + in_dim * out_dim + o] += g;
            }
            if l > 0 {
                let (wts, _) = self.layer(l);
                let mut prev = vec![0.0; in_dim];
                for o in 0..out_dim {
                    let g = delta[o];
                    let row = &wts[o * in_dim..(o + 1) * in_dim];
                    for i in 0..in_dim {
                        prev[i] += g * row[i];
                    }
                }
                // input to this layer is tanh(z) of the previous one
                for (p, a) in prev.iter_mut().zip(input) {
                    *p *= 1.0 - a * a;
                }
                delta = prev;
            }
        }
    }
}

fn orthogonal_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<f64> {
    // Gram-Schmidt over the shorter side; the longer side keeps raw
    // Gaussian directions normalized.
    let gauss = |rng: &mut dyn rand::RngCore| -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut vectors: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| gauss(rng)).collect())
        .collect();
    for i in 0..rows {
        for j in 0..i.min(cols) {
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            let vj = vectors[j].clone();
            for (vi, vj) in vectors[i].iter_mut().zip(&vj) {
                *vi -= dot * vj;
            }
        }
        let norm: f64 = vectors[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for v in &mut vectors[i] {
                *v /= norm;
            }
        }
    }
    vectors.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyNet {
    pub actor: Mlp,
    pub critic: Mlp,
    /// Number of free blocks this net was built for.
    pub n_free: usize,
}

impl PolicyNet {
    pub fn new(n_free: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = 3 * n_free;
        let actor = Mlp::orthogonal(&[input, hidden, hidden, n_free], 1.0, 0.01, &mut rng);
        let critic = Mlp::orthogonal(&[input, hidden, hidden, 1], 1.0, 1.0, &mut rng);
        PolicyNet { actor, critic, n_free }
    }

    pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
        let max = logits.iter().cloned().fold(f64::MIN, f64::max);
        let log_sum = logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln() + max;
        logits.iter().map(|l| l - log_sum).collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.critic.output(x)[0]
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Stable fingerprint of the blocks a net was trained against.
pub fn instance_fingerprint(instance: &ProblemInstance) -> u64 {
    let mut s = String::new();
    for b in &instance.blocks {
        s.push_str(&format!("{}:{}:{}:{};", b.name, b.width, b.height, b.is_fixed()));
    }
    fnv1a64(s.as_bytes())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SavedNet {
    pub net: PolicyNet,
    pub config: serde_json::Value,
    pub n_free: usize,
    pub fingerprint: u64,
    pub epochs_trained: usize,
}

impl SavedNet {
    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn check_compatible(&self, instance: &ProblemInstance) -> Result<()> {
        if self.n_free != instance.num_free() {
            return Err(Error::Config(format!(
                "network was trained for {} free blocks, instance has {}",
                self.n_free,
                instance.num_free()
            )));
        }
        if self.fingerprint != instance_fingerprint(instance) {
            return Err(Error::Config("network/instance fingerprint mismatch".into()));
        }
        Ok(())
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(lr: f64, n_params: usize) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
