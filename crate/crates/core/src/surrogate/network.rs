use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::distr::{Distribution, Uniform};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SurrogateError;

/// Fully connected ReLU network with a single linear output.
///
/// `weights[l]` has shape `(layer_sizes[l + 1], layer_sizes[l])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Gradients with the same layout as the network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Mlp {
    fn check_sizes(layer_sizes: &[usize]) -> Result<(), SurrogateError> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) || layer_sizes[layer_sizes.len() - 1] != 1 {
            return Err(SurrogateError::InvalidConfig(format!(
                "layer sizes must be positive, at least two layers, ending in 1; got {layer_sizes:?}"
            )));
        }
        Ok(())
    }

    pub fn zeros(layer_sizes: &[usize]) -> Result<Mlp, SurrogateError> {
        Self::check_sizes(layer_sizes)?;
        Ok(Mlp {
            layer_sizes: layer_sizes.to_vec(),
            weights: layer_sizes
                .windows(2)
                .map(|w| Array2::zeros((w[1], w[0])))
                .collect(),
            biases: layer_sizes[1..].iter().map(|&n| Array1::zeros(n)).collect(),
        })
    }

    /// He-uniform weights, `U(-sqrt(6 / fan_in), sqrt(6 / fan_in))`, zero biases.
    pub fn he_uniform<R: Rng>(layer_sizes: &[usize], rng: &mut R) -> Result<Mlp, SurrogateError> {
        let mut net = Self::zeros(layer_sizes)?;
        for w in &mut net.weights {
            let limit = (6.0 / w.ncols() as f64).sqrt();
            let dist = Uniform::new(-limit, limit).expect("finite positive limit");
            w.iter_mut().for_each(|x| *x = dist.sample(rng));
        }
        Ok(net)
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>() + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Flat parameter index: layer by layer, weights row-major then biases.
    fn locate(&self, mut idx: usize) -> (usize, Option<(usize, usize)>, usize) {
        for l in 0..self.weights.len() {
            let (rows, cols) = self.weights[l].dim();
            if idx < rows * cols {
                return (l, Some((idx / cols, idx % cols)), 0);
            }
            idx -= rows * cols;
            if idx < rows {
                return (l, None, idx);
            }
            idx -= rows;
        }
        panic!("parameter index out of range");
    }

    pub fn param(&self, idx: usize) -> f64 {
        match self.locate(idx) {
            (l, Some(rc), _) => self.weights[l][rc],
            (l, None, i) => self.biases[l][i],
        }
    }

    pub fn set_param(&mut self, idx: usize, value: f64) {
        match self.locate(idx) {
            (l, Some(rc), _) => self.weights[l][rc] = value,
            (l, None, i) => self.biases[l][i] = value,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|x| x.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|x| x.is_finite()))
    }

    fn check_input(&self, cols: usize) -> Result<(), SurrogateError> {
        if cols != self.n_inputs() {
            return Err(SurrogateError::ShapeMismatch {
                expected: self.n_inputs(),
                got: cols,
            });
        }
        Ok(())
    }

    /// Outputs for a batch of rows, shape `(batch,)`.
    pub fn forward(&self, x: ArrayView2<f64>) -> Result<Array1<f64>, SurrogateError> {
        self.check_input(x.ncols())?;
        let last = self.weights.len() - 1;
        let mut a = x.to_owned();
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            a = a.dot(&w.t()) + b;
            if l < last {
                a.mapv_inplace(relu);
            }
        }
        Ok(a.remove_axis(Axis(1)))
    }

    pub fn forward_one(&self, x: &[f64]) -> Result<f64, SurrogateError> {
        let row = ArrayView2::from_shape((1, x.len()), x).expect("contiguous row");
        Ok(self.forward(row)?[0])
    }

    /// Batch-mean squared error.
    pub fn loss(&self, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<f64, SurrogateError> {
        let out = self.forward(x)?;
        Ok(mse(out.view(), y))
    }

    /// Loss and its exact gradient with respect to every parameter.
    pub fn backward(&self, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<(f64, Gradients), SurrogateError> {
        self.check_input(x.ncols())?;
        if x.nrows() == 0 || x.nrows() != y.len() {
            return Err(SurrogateError::ShapeMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        let last = self.weights.len() - 1;
        // Pre-activations z_l; the input plays the role of the first activation.
        let mut acts = Vec::with_capacity(self.weights.len() + 1);
        acts.push(x.to_owned());
        let mut pre = Vec::with_capacity(self.weights.len());
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = acts[l].dot(&w.t()) + b;
            let a = if l < last { z.mapv(relu) } else { z.clone() };
            pre.push(z);
            acts.push(a);
        }
        let n = x.nrows() as f64;
        let out = acts[last + 1].column(0);
        let loss = mse(out, y);

        let mut delta = Array2::zeros((x.nrows(), 1));
        Zip::from(delta.column_mut(0))
            .and(out)
            .and(y)
            .for_each(|d, &o, &t| *d = 2.0 * (o - t) / n);
        let mut gw = vec![Array2::zeros((0, 0)); self.weights.len()];
        let mut gb = vec![Array1::zeros(0); self.weights.len()];
        for l in (0..=last).rev() {
            gw[l] = delta.t().dot(&acts[l]);
            gb[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&self.weights[l]);
                Zip::from(&mut back)
                    .and(&pre[l - 1])
                    .for_each(|d, &z| {
                        if z <= 0.0 {
                            *d = 0.0;
                        }
                    });
                delta = back;
            }
        }
        Ok((
            loss,
            Gradients {
                weights: gw,
                biases: gb,
            },
        ))
    }
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Gradients {
        Gradients {
            weights: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            biases: net.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    /// Component at a flat parameter index (see [`Mlp::param`]).
    pub fn get(&self, net: &Mlp, idx: usize) -> f64 {
        match net.locate(idx) {
            (l, Some(rc), _) => self.weights[l][rc],
            (l, None, i) => self.biases[l][i],
        }
    }
}

#[inline]
fn relu(z: f64) -> f64 {
    z.max(0.0)
}

fn mse(out: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    let n = y.len() as f64;
    Zip::from(out).and(y).fold(0.0, |acc, &o, &t| acc + (o - t) * (o - t)) / n
}

/// Adam optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Gradients,
    pub v: Gradients,
    pub t: u64,
}

impl AdamState {
    pub fn new(net: &Mlp) -> AdamState {
        AdamState {
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
            t: 0,
        }
    }
}

/// One bias-corrected Adam update.
pub fn adam_step(net: &mut Mlp, grads: &Gradients, state: &mut AdamState, cfg: &AdamConfig) {
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    let (b1, b2, lr, eps) = (cfg.beta1, cfg.beta2, cfg.learning_rate, cfg.epsilon);
    let update = |p: &mut f64, g: &f64, m: &mut f64, v: &mut f64| {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
    };
    for l in 0..net.weights.len() {
        Zip::from(&mut net.weights[l])
            .and(&grads.weights[l])
            .and(&mut state.m.weights[l])
            .and(&mut state.v.weights[l])
            .for_each(update);
        Zip::from(&mut net.biases[l])
            .and(&grads.biases[l])
            .and(&mut state.m.biases[l])
            .and(&mut state.v.biases[l])
            .for_each(update);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_network_outputs_zero() {
        let net = Mlp::zeros(&[3, 4, 1]).unwrap();
        assert_eq!(net.forward_one(&[1.0, -2.0, 5.0]).unwrap(), 0.0);
        assert_eq!(net.n_params(), 3 * 4 + 4 + 4 + 1);
    }

    #[test]
    fn hand_set_single_unit() {
        // h = relu(2 x0 - x1 + 0.5), y = 3 h - 1
        let mut net = Mlp::zeros(&[2, 1, 1]).unwrap();
        net.weights[0] = array![[2.0, -1.0]];
        net.biases[0] = array![0.5];
        net.weights[1] = array![[3.0]];
        net.biases[1] = array![-1.0];
        assert_eq!(net.forward_one(&[1.0, 0.5]).unwrap(), 5.0);
        assert_eq!(net.forward_one(&[-1.0, 0.5]).unwrap(), -1.0);
        assert!(matches!(
            net.forward_one(&[1.0]),
            Err(SurrogateError::ShapeMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn flat_parameter_indexing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut net = Mlp::he_uniform(&[3, 2, 1], &mut rng).unwrap();
        assert_eq!(net.param(0), net.weights[0][(0, 0)]);
        assert_eq!(net.param(5), net.weights[0][(1, 2)]);
        net.set_param(6, 4.5);
        assert_eq!(net.biases[0][0], 4.5);
        net.set_param(10, -1.5);
        assert_eq!(net.biases[1][0], -1.5);
    }

    #[test]
    fn zero_error_gives_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = Mlp::he_uniform(&[4, 6, 3, 1], &mut rng).unwrap();
        let x = array![[0.1, 0.2, 0.3, 0.4], [0.5, -0.1, 0.9, 0.0]];
        let y = net.forward(x.view()).unwrap();
        let (loss, g) = net.backward(x.view(), y.view()).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.weights.iter().all(|w| w.iter().all(|&v| v == 0.0)));
        assert!(g.biases.iter().all(|b| b.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn duplicated_batch_has_same_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::he_uniform(&[2, 5, 1], &mut rng).unwrap();
        let x = array![[0.3, -0.7], [1.1, 0.2]];
        let y = array![0.5, -0.25];
        let xx = ndarray::concatenate![Axis(0), x, x];
        let yy = ndarray::concatenate![Axis(0), y, y];
        let (l1, g1) = net.backward(x.view(), y.view()).unwrap();
        let (l2, g2) = net.backward(xx.view(), yy.view()).unwrap();
        assert!((l1 - l2).abs() < 1e-15);
        for i in 0..net.n_params() {
            assert!((g1.get(&net, i) - g2.get(&net, i)).abs() < 1e-15);
        }
    }

    #[test]
    fn adam_first_step_is_learning_rate_sized() {
        let mut net = Mlp::zeros(&[2, 2, 1]).unwrap();
        let mut g = Gradients::zeros_like(&net);
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(&net);
        adam_step(&mut net, &g, &mut state, &cfg);
        assert_eq!(net, Mlp::zeros(&[2, 2, 1]).unwrap());

        g.weights.iter_mut().for_each(|w| w.fill(0.3));
        g.biases.iter_mut().for_each(|b| b.fill(-2.0));
        let mut state = AdamState::new(&net);
        adam_step(&mut net, &g, &mut state, &cfg);
        for i in 0..net.n_params() {
            let step = net.param(i);
            let expected = -cfg.learning_rate * g.get(&net, i).signum();
            assert!((step - expected).abs() <= cfg.learning_rate * 1e-3, "{step}");
        }
        let before: Vec<f64> = (0..net.n_params()).map(|i| net.param(i)).collect();
        adam_step(&mut net, &g, &mut state, &cfg);
        for (i, b) in before.iter().enumerate() {
            let second = (net.param(i) - b).abs();
            assert!(second <= b.abs() + 1e-18, "{second} vs {}", b.abs());
        }
    }
}
