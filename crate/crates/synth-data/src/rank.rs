use audio_dsp::Waveform;
use tensor_core::Tensor;

/// Frame length for the rank analysis: one row per latent step of the spoof
/// decoder, so low-dimensional structure lines up with rows.
pub const RANK_FRAME: usize = 320;

/// Splits a clip into non-overlapping 320-sample rows, dropping the tail.
pub fn frame_matrix(w: &Waveform) -> Tensor<f32> {
    let rows = w.samples.len() / RANK_FRAME;
    let mut m = Tensor::zeros(&[rows, RANK_FRAME]);
    m.data
        .copy_from_slice(&w.samples[..rows * RANK_FRAME]);
    m
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix stored row-major.
/// Returns eigenvalues in descending order.
pub fn sym_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-12 * norm.max(1e-300);
    for _sweep in 0..50 {
        let mut off = 0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol / n as f64 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p * n + i];
                    let aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    eig
}

/// Squared singular values of a row-major matrix, descending. Computed from
/// the Gram matrix of the smaller side.
pub fn singular_energies(x: &Tensor<f32>) -> Vec<f64> {
    let (rows, cols) = (x.shape[0], x.shape[1]);
    let (n, outer) = if rows <= cols { (rows, true) } else { (cols, false) };
    let mut g = vec![0f64; n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = 0f64;
            if outer {
                for t in 0..cols {
                    acc += x.data[i * cols + t] as f64 * x.data[j * cols + t] as f64;
                }
            } else {
                for t in 0..rows {
                    acc += x.data[t * cols + i] as f64 * x.data[t * cols + j] as f64;
                }
            }
            g[i * n + j] = acc;
            g[j * n + i] = acc;
        }
    }
    sym_eigenvalues(&mut g, n)
        .into_iter()
        .map(|e| e.max(0.0))
        .collect()
}

/// Smallest r such that the top r squared singular values hold at least
/// `frac` of the total energy.
pub fn effective_rank(energies: &[f64], frac: f64) -> usize {
    let total: f64 = energies.iter().sum();
    if total <= 0.0 {
        return 0;
    }
    let mut acc = 0f64;
    for (i, e) in energies.iter().enumerate() {
        acc += e;
        if acc >= frac * total {
            return i + 1;
        }
    }
    energies.len()
}
