//! Type-I discrete sine transform, realized through a complex FFT of the odd
//! extension. `raw` computes the unnormalized sums
//! `S_k = sum_{j=1..n} x_j sin(pi j k / m)` with `m = n + 1`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct SineTransform {
    n: usize,
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform size must be at least 1");
        let m = n + 1;
        let fft = FftPlanner::new().plan_fft_forward(2 * m);
        Self { n, m, fft }
    }

    /// Unnormalized DST-I of a length-n slice.
    pub fn raw(&self, input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.n);
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.m];
        for (j, &x) in input.iter().enumerate() {
            buf[j + 1].re = x;
            buf[2 * self.m - 1 - j].re = -x;
        }
        self.fft.process(&mut buf);
        // Odd real input makes the spectrum purely imaginary: Y_k = -2i S_k.
        (1..=self.n).map(|k| -0.5 * buf[k].im).collect()
    }

    /// In-place variant operating on rows of a flat buffer (2D fields).
    pub fn raw_rows(&self, data: &mut [f64], rows: usize) {
        debug_assert_eq!(data.len(), rows * self.n);
        for r in 0..rows {
            let row = &data[r * self.n..(r + 1) * self.n];
            let out = self.raw(row);
            data[r * self.n..(r + 1) * self.n].copy_from_slice(&out);
        }
    }

    /// Transform along the leading (strided) axis of an `rows x n` buffer.
    pub fn raw_cols(&self, data: &mut [f64], cols: usize) {
        debug_assert_eq!(data.len(), self.n * cols);
        let mut scratch = vec![0.0; self.n];
        for c in 0..cols {
            for i in 0..self.n {
                scratch[i] = data[i * cols + c];
            }
            let out = self.raw(&scratch);
            for i in 0..self.n {
                data[i * cols + c] = out[i];
            }
        }
    }
}

impl fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineTransform").field("n", &self.n).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(input: &[f64]) -> Vec<f64> {
        let n = input.len();
        let m = (n + 1) as f64;
        (1..=n)
            .map(|k| {
                (1..=n)
                    .map(|j| input[j - 1] * (PI * j as f64 * k as f64 / m).sin())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn fft_path_matches_naive_sum() {
        for &n in &[1usize, 2, 7, 16, 31] {
            let st = SineTransform::new(n);
            let input: Vec<f64> = (0..n).map(|j| ((j * 7 + 3) % 11) as f64 - 5.0).collect();
            let fast = st.raw(&input);
            let slow = naive(&input);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()), "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn involution_up_to_scale() {
        let n = 15;
        let st = SineTransform::new(n);
        let input: Vec<f64> = (0..n).map(|j| (j as f64 * 0.37).sin()).collect();
        let twice = st.raw(&st.raw(&input));
        let scale = (n + 1) as f64 / 2.0;
        for (a, b) in twice.iter().zip(&input) {
            assert!((a / scale - b).abs() < 1e-12);
        }
    }
}
