use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wez_core::surrogate::Mlp;
use wez_oracle::{fd_gradient, fd_partial, naive_loss, OracleReport, Tolerance};

fn batch(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let y = (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect();
    (x, y)
}

fn to_arrays(x: &[Vec<f64>], y: &[f64]) -> (Array2<f64>, Array1<f64>) {
    let cols = x[0].len();
    let flat: Vec<f64> = x.concat();
    (Array2::from_shape_vec((x.len(), cols), flat).unwrap(), Array1::from(y.to_vec()))
}

#[test]
fn single_linear_unit_matches_calculus() {
    // loss = mean((w x + b - y)^2): dL/dw = 2 mean(e x), dL/db = 2 mean(e).
    let mut net = Mlp::zeros(&[1, 1]).unwrap();
    net.set_param(0, 0.7);
    net.set_param(1, -0.2);
    let x = vec![vec![1.5], vec![-0.5], vec![2.0]];
    let y = vec![0.3, 0.1, -1.0];
    let e: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| 0.7 * xi[0] - 0.2 - yi).collect();
    let dw = 2.0 * e.iter().zip(&x).map(|(ei, xi)| ei * xi[0]).sum::<f64>() / 3.0;
    let db = 2.0 * e.iter().sum::<f64>() / 3.0;
    let g = fd_gradient(&net, &x, &y, 1e-4);
    // The loss is quadratic in each parameter, so central differences are exact up to rounding.
    assert!((g[0] - dw).abs() < 1e-9, "{} vs {dw}", g[0]);
    assert!((g[1] - db).abs() < 1e-9, "{} vs {db}", g[1]);
}

#[test]
fn naive_loss_matches_network_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = Mlp::he_uniform(&[5, 8, 6, 1], &mut rng).unwrap();
    let (x, y) = batch(&mut rng, 12, 5);
    let (xa, ya) = to_arrays(&x, &y);
    let a = naive_loss(&net, &x, &y);
    let b = net.loss(xa.view(), ya.view()).unwrap();
    assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
}

#[test]
fn backward_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for sizes in [vec![3, 4, 1], vec![6, 10, 7, 1], vec![9, 16, 12, 8, 1]] {
        let net = Mlp::he_uniform(&sizes, &mut rng).unwrap();
        let (x, y) = batch(&mut rng, 16, sizes[0]);
        let (xa, ya) = to_arrays(&x, &y);
        let (_, grads) = net.backward(xa.view(), ya.view()).unwrap();
        let fd = fd_gradient(&net, &x, &y, 1e-5);
        for (i, &o) in fd.iter().enumerate() {
            let r = OracleReport::new(
                format!("{sizes:?} param {i}"),
                grads.get(&net, i),
                o,
                Tolerance::Relative { tol: 1e-4, floor: 1e-7 },
            );
            assert!(r.pass, "{r:?}");
        }
    }
}

#[test]
fn step_size_sweep_plateaus() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let net = Mlp::he_uniform(&[4, 8, 8, 1], &mut rng).unwrap();
    let (x, y) = batch(&mut rng, 10, 4);
    let (xa, ya) = to_arrays(&x, &y);
    let (_, grads) = net.backward(xa.view(), ya.view()).unwrap();
    for i in (0..net.n_params()).step_by(7) {
        let exact = grads.get(&net, i);
        let est: Vec<f64> = [1e-4, 1e-5, 1e-6].iter().map(|&h| fd_partial(&net, &x, &y, i, h)).collect();
        let scale = exact.abs().max(1e-6);
        for e in &est {
            assert!((e - exact).abs() / scale < 1e-4, "param {i}: {est:?} vs {exact}");
        }
    }
}
