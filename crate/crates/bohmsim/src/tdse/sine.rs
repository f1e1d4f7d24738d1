//! Type-I discrete sine transform on complex data, built on a complex FFT
//! of twice the extended length via the odd-extension identity.
//!
//! For interior samples `x_0 .. x_{n-1}` of a function vanishing at both
//! ends, the transform pair is
//!
//! ```text
//! S_k = sum_j x_j sin(pi (j+1)(k+1) / (n+1))        (forward, unnormalized)
//! x_j = 2/(n+1) * sum_k S_k sin(pi (j+1)(k+1) / (n+1))
//! ```
//!
//! so the same kernel inverts itself up to the factor `2/(n+1)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned 1D DST-I of length `n` acting on complex samples.
pub struct SineDst {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

/// Scratch buffers for one transform; reusable across calls and owned per
/// thread so row batches can run in parallel.
pub struct SineScratch {
    ext: Vec<Complex64>,
    fft_scratch: Vec<Complex64>,
}

impl SineDst {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "sine transform needs at least 2 samples");
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        SineDst { n, fft }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Normalization factor turning forward-forward into the identity.
    pub fn inverse_scale(&self) -> f64 {
        2.0 / (self.n as f64 + 1.0)
    }

    pub fn make_scratch(&self) -> SineScratch {
        SineScratch {
            ext: vec![Complex64::default(); 2 * (self.n + 1)],
            fft_scratch: vec![Complex64::default(); self.fft.get_inplace_scratch_len()],
        }
    }

    /// Unnormalized forward DST-I of `row` in place.
    ///
    /// Odd extension: `[0, x_0..x_{n-1}, 0, -x_{n-1}..-x_0]`, FFT, then
    /// `S_k = i/2 * Y_{k+1}`.
    pub fn forward(&self, row: &mut [Complex64], scratch: &mut SineScratch) {
        let n = self.n;
        debug_assert_eq!(row.len(), n);
        let ext = &mut scratch.ext;
        ext[0] = Complex64::default();
        ext[n + 1] = Complex64::default();
        for j in 0..n {
            ext[j + 1] = row[j];
            ext[n + 2 + j] = -row[n - 1 - j];
        }
        self.fft.process_with_scratch(ext, &mut scratch.fft_scratch);
        for k in 0..n {
            let y = ext[k + 1];
            // i * y / 2
            row[k] = Complex64::new(-y.im * 0.5, y.re * 0.5);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn direct_dst(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        x[j] * ((j + 1) as f64 * (k + 1) as f64 * std::f64::consts::PI
                            / (n as f64 + 1.0))
                            .sin()
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_transform() {
        for n in [4usize, 7, 16, 31] {
            let dst = SineDst::new(n);
            let mut scratch = dst.make_scratch();
            let mut x: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new((j as f64 * 0.7).sin(), (j as f64 * 1.3).cos()))
                .collect();
            let expect = direct_dst(&x);
            dst.forward(&mut x, &mut scratch);
            for (got, want) in x.iter().zip(&expect) {
                assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-12);
                assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn forward_twice_is_scaled_identity() {
        let n = 24;
        let dst = SineDst::new(n);
        let mut scratch = dst.make_scratch();
        let orig: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 / (j as f64 + 1.0), (j as f64).sqrt()))
            .collect();
        let mut x = orig.clone();
        dst.forward(&mut x, &mut scratch);
        dst.forward(&mut x, &mut scratch);
        let s = dst.inverse_scale();
        for (got, want) in x.iter().zip(&orig) {
            assert_abs_diff_eq!(got.re * s, want.re, epsilon = 1e-12);
            assert_abs_diff_eq!(got.im * s, want.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_mode_maps_to_single_coefficient() {
        let n = 15;
        let dst = SineDst::new(n);
        let mut scratch = dst.make_scratch();
        let mode = 3usize; // coefficient index 2
        let mut x: Vec<Complex64> = (0..n)
            .map(|j| {
                Complex64::new(
                    ((j + 1) as f64 * mode as f64 * std::f64::consts::PI / (n as f64 + 1.0)).sin(),
                    0.0,
                )
            })
            .collect();
        dst.forward(&mut x, &mut scratch);
        for (k, v) in x.iter().enumerate() {
            let expect = if k + 1 == mode { (n as f64 + 1.0) / 2.0 } else { 0.0 };
            assert_abs_diff_eq!(v.re, expect, epsilon = 1e-10);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-10);
        }
    }
}
