//! 2D FFT backend: rustfft plans cached per grid size, row/column passes
//! via transposes.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(n: usize, buf: &mut [Complex64]) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

fn pass_rows(fft: &Arc<dyn Fft<f64>>, n: usize, buf: &mut [Complex64]) {
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
}

/// Forward 2D transform, normalised so coefficients are Fourier-series
/// coefficients: `f(x) = sum_k c_k exp(i xi_k . x)`.
pub fn forward(n: usize, buf: &mut [Complex64]) {
    debug_assert_eq!(buf.len(), n * n);
    let p = plans(n);
    pass_rows(&p.fwd, n, buf);
    transpose(n, buf);
    pass_rows(&p.fwd, n, buf);
    transpose(n, buf);
    let scale = 1.0 / (n * n) as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
}

/// Inverse 2D transform matching [`forward`]'s normalisation.
pub fn inverse(n: usize, buf: &mut [Complex64]) {
    debug_assert_eq!(buf.len(), n * n);
    let p = plans(n);
    pass_rows(&p.inv, n, buf);
    transpose(n, buf);
    pass_rows(&p.inv, n, buf);
    transpose(n, buf);
}
