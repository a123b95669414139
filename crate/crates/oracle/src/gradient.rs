use rayon::prelude::*;
use wez_core::surrogate::Mlp;

/// Mean squared error of `net` on `(x, y)`, evaluated with plain loops.
pub fn naive_loss(net: &Mlp, x: &[Vec<f64>], y: &[f64]) -> f64 {
    let layers = net.weights.len();
    let mut total = 0.0;
    for (row, &target) in x.iter().zip(y) {
        let mut a = row.clone();
        for l in 0..layers {
            let w = &net.weights[l];
            let b = &net.biases[l];
            let mut z = vec![0.0; b.len()];
            for (j, zj) in z.iter_mut().enumerate() {
                let mut s = b[j];
                for (k, ak) in a.iter().enumerate() {
                    s += w[[j, k]] * ak;
                }
                *zj = if l + 1 < layers { s.max(0.0) } else { s };
            }
            a = z;
        }
        let e = a[0] - target;
        total += e * e;
    }
    total / x.len() as f64
}

/// Central difference of [`naive_loss`] with respect to flat parameter `idx`
/// (the ordering of `Mlp::param`).
pub fn fd_partial(net: &Mlp, x: &[Vec<f64>], y: &[f64], idx: usize, h: f64) -> f64 {
    let mut probe = net.clone();
    let p = net.param(idx);
    probe.set_param(idx, p + h);
    let up = naive_loss(&probe, x, y);
    probe.set_param(idx, p - h);
    let down = naive_loss(&probe, x, y);
    (up - down) / (2.0 * h)
}

/// [`fd_partial`] for every parameter.
pub fn fd_gradient(net: &Mlp, x: &[Vec<f64>], y: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    (0..net.n_params())
        .into_par_iter()
        .map(|i| fd_partial(net, x, y, i, h))
        .collect()
}
