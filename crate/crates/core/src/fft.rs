//! FFT plumbing on top of `rustfft`.
//!
//! `fft2`/`ifft2` follow the numpy convention: forward unnormalized, inverse
//! scaled by 1/(nx·ny), so a forward+inverse pair is the identity.
//!
//! [`ScaledDft`] evaluates `y[n] = Σ_m u[m]·exp(-iβ·(m - m0)·(n - n0))` for an
//! arbitrary real β with the chirp-z (Bluestein) factorisation
//! `m'n' = (m'² + n'² - (n' - m')²)/2`, which turns the sum into a linear
//! convolution computed with three FFTs.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

fn transpose(a: &Array2<Complex64>) -> Array2<Complex64> {
    let (rows, cols) = a.dim();
    let mut t = Array2::zeros((cols, rows));
    for (r, row) in a.outer_iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            t[(c, r)] = *v;
        }
    }
    t
}

fn process_rows(data: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for mut row in data.rows_mut() {
        let slice = row
            .as_slice_mut()
            .expect("standard-layout array rows are contiguous");
        fft.process_with_scratch(slice, &mut scratch);
    }
}

fn fft2_dir(data: &mut Array2<Complex64>, inverse: bool) {
    let (ny, nx) = data.dim();
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny))
    } else {
        (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny))
    };
    process_rows(data, &row_fft);
    let mut t = transpose(data);
    process_rows(&mut t, &col_fft);
    *data = transpose(&t);
}

/// In-place forward 2-D FFT (unnormalized).
pub fn fft2(data: &mut Array2<Complex64>) {
    fft2_dir(data, false);
}

/// In-place inverse 2-D FFT, scaled by 1/(nx·ny).
pub fn ifft2(data: &mut Array2<Complex64>) {
    fft2_dir(data, true);
    let scale = 1.0 / data.len() as f64;
    data.mapv_inplace(|v| v * scale);
}

/// Signed frequency index of FFT bin `q` for a transform of length `n`.
#[inline]
pub fn signed_bin(q: usize, n: usize) -> f64 {
    if q < n.div_ceil(2) {
        q as f64
    } else {
        q as f64 - n as f64
    }
}

/// `exp(i·phase)`.
#[inline]
pub fn cis(phase: f64) -> Complex64 {
    let (s, c) = phase.sin_cos();
    Complex64::new(c, s)
}

/// Chirp-z evaluation of a DFT with arbitrary frequency spacing.
///
/// Input index offsets are `m' = m - n_in/2`, output offsets
/// `n' = n - n_out/2`. Optional per-sample pre/post factors are folded into
/// the chirps so callers can attach quadratic or linear phases for free.
pub struct ScaledDft {
    n_in: usize,
    n_out: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel_spectrum: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl ScaledDft {
    pub fn new(
        n_in: usize,
        n_out: usize,
        beta: f64,
        pre_factor: impl Fn(f64) -> Complex64,
        post_factor: impl Fn(f64) -> Complex64,
    ) -> Self {
        let m0 = (n_in / 2) as i64;
        let n0 = (n_out / 2) as i64;
        let len = (n_in + n_out - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(len);
        let ifft = planner.plan_fft_inverse(len);

        let half_beta = 0.5 * beta;
        let pre = (0..n_in)
            .map(|m| {
                let mp = m as i64 - m0;
                cis(-half_beta * (mp * mp) as f64) * pre_factor(mp as f64)
            })
            .collect();
        let post = (0..n_out)
            .map(|n| {
                let np = n as i64 - n0;
                cis(-half_beta * (np * np) as f64) * post_factor(np as f64)
            })
            .collect();

        // v[t] = exp(iβ j²/2), j = t - (n_in - 1) + (m0 - n0)
        let mut kernel = vec![Complex64::default(); len];
        for (t, slot) in kernel.iter_mut().take(n_in + n_out - 1).enumerate() {
            let j = t as i64 - (n_in as i64 - 1) + (m0 - n0);
            *slot = cis(half_beta * (j * j) as f64);
        }
        fft.process(&mut kernel);
        let scale = 1.0 / len as f64;
        kernel.iter_mut().for_each(|v| *v *= scale);

        Self {
            n_in,
            n_out,
            pre,
            post,
            kernel_spectrum: kernel,
            fft,
            ifft,
        }
    }

    pub fn buffer(&self) -> Vec<Complex64> {
        vec![Complex64::default(); self.kernel_spectrum.len()]
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        let n = self
            .fft
            .get_inplace_scratch_len()
            .max(self.ifft.get_inplace_scratch_len());
        vec![Complex64::default(); n]
    }

    pub fn process(
        &self,
        input: &[Complex64],
        output: &mut [Complex64],
        buf: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        debug_assert_eq!(input.len(), self.n_in);
        debug_assert_eq!(output.len(), self.n_out);
        if input.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            output.fill(Complex64::default());
            return;
        }
        buf.fill(Complex64::default());
        for ((b, u), p) in buf.iter_mut().zip(input).zip(&self.pre) {
            *b = u * p;
        }
        self.fft.process_with_scratch(buf, scratch);
        for (b, k) in buf.iter_mut().zip(&self.kernel_spectrum) {
            *b *= k;
        }
        self.ifft.process_with_scratch(buf, scratch);
        let offset = self.n_in - 1;
        for (n, out) in output.iter_mut().enumerate() {
            *out = buf[n + offset] * self.post[n];
        }
    }

    /// Applies the transform to every row of `data`, returning `(rows, n_out)`.
    pub fn apply_rows(&self, data: &Array2<Complex64>) -> Array2<Complex64> {
        let rows = data.nrows();
        let mut out = Array2::zeros((rows, self.n_out));
        let mut buf = self.buffer();
        let mut scratch = self.scratch();
        let mut row_in = vec![Complex64::default(); self.n_in];
        for (r, row) in data.outer_iter().enumerate() {
            row_in.iter_mut().zip(row.iter()).for_each(|(d, s)| *d = *s);
            let mut out_row = out.row_mut(r);
            let slice = out_row
                .as_slice_mut()
                .expect("standard-layout array rows are contiguous");
            self.process(&row_in, slice, &mut buf, &mut scratch);
        }
        out
    }
}

/// Separable 2-D scaled transform: `x_plan` acts along rows (x), `y_plan`
/// along columns (y).
pub fn scaled_dft_2d(
    data: &Array2<Complex64>,
    x_plan: &ScaledDft,
    y_plan: &ScaledDft,
) -> Array2<Complex64> {
    let along_x = x_plan.apply_rows(data);
    let t = transpose(&along_x);
    let along_y = y_plan.apply_rows(&t);
    transpose(&along_y)
}
