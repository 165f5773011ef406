use synth_data::rank::{effective_rank, singular_energies, sym_eigenvalues};
use tensor_core::{Rng, Tensor};

fn outer_sum(rows: usize, cols: usize, terms: usize, seed: u64) -> Tensor<f32> {
    let mut rng = Rng::new(seed);
    let mut x = Tensor::zeros(&[rows, cols]);
    for _ in 0..terms {
        let u: Vec<f64> = (0..rows).map(|_| rng.normal()).collect();
        let v: Vec<f64> = (0..cols).map(|_| rng.normal()).collect();
        for i in 0..rows {
            for j in 0..cols {
                x.data[i * cols + j] += (u[i] * v[j]) as f32;
            }
        }
    }
    x
}

#[test]
fn rank_three_matrix_measures_three() {
    let x = outer_sum(40, 60, 3, 1);
    let e = singular_energies(&x);
    assert_eq!(effective_rank(&e, 0.95), 3);
    let tail: f64 = e[3..].iter().sum();
    let total: f64 = e.iter().sum();
    assert!(tail / total < 1e-9, "tail fraction {}", tail / total);
}

#[test]
fn energies_sum_to_squared_frobenius_norm() {
    let x = outer_sum(30, 50, 12, 2);
    let e = singular_energies(&x);
    let fro: f64 = x.data.iter().map(|&v| v as f64 * v as f64).sum();
    let sum: f64 = e.iter().sum();
    assert!((sum - fro).abs() < 1e-6 * fro, "{sum} vs {fro}");
}

#[test]
fn rotation_on_the_right_preserves_energies() {
    let x = outer_sum(20, 30, 5, 3);
    let mut y = x.clone();
    // a few Givens rotations across columns
    let pairs = [(0usize, 7usize, 0.3f64), (3, 19, 1.1), (12, 25, 2.0)];
    for &(a, b, th) in &pairs {
        let (c, s) = (th.cos(), th.sin());
        for i in 0..20 {
            let va = y.data[i * 30 + a] as f64;
            let vb = y.data[i * 30 + b] as f64;
            y.data[i * 30 + a] = (c * va - s * vb) as f32;
            y.data[i * 30 + b] = (s * va + c * vb) as f32;
        }
    }
    let ex = singular_energies(&x);
    let ey = singular_energies(&y);
    for (a, b) in ex.iter().zip(ey.iter()) {
        assert!((a - b).abs() < 1e-4 * ex[0].max(1.0), "{a} vs {b}");
    }
}

#[test]
fn tall_and_wide_orientations_agree() {
    let x = outer_sum(25, 40, 6, 4);
    let mut xt = Tensor::zeros(&[40, 25]);
    for i in 0..25 {
        for j in 0..40 {
            xt.data[j * 25 + i] = x.data[i * 40 + j];
        }
    }
    let a = singular_energies(&x);
    let b = singular_energies(&xt);
    for (u, v) in a.iter().zip(b.iter()) {
        assert!((u - v).abs() < 1e-6 * a[0].max(1.0));
    }
}

#[test]
fn zero_matrix_has_rank_zero() {
    let x = Tensor::zeros(&[10, 10]);
    assert_eq!(effective_rank(&singular_energies(&x), 0.95), 0);
}

#[test]
fn jacobi_matches_a_hand_computed_two_by_two() {
    // eigenvalues of [[2,1],[1,2]] are 3 and 1
    let mut a = vec![2.0, 1.0, 1.0, 2.0];
    let e = sym_eigenvalues(&mut a, 2);
    assert!((e[0] - 3.0).abs() < 1e-12);
    assert!((e[1] - 1.0).abs() < 1e-12);
}
