//! Fourier coefficients of sampled periodic functions.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Complex Fourier coefficients of a real periodic function from `n`
/// equispaced samples over one period: `c[m] = (1/n) sum_k f_k e^{-2pi i mk/n}`
/// for `m = 0..n-1` (so `c[n - m]` is the coefficient of frequency `-m`).
pub fn fourier_coefficients(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Coefficient of signed frequency `m` from the output of
/// [`fourier_coefficients`].
pub fn coeff(coeffs: &[Complex64], m: i64) -> Complex64 {
    let n = coeffs.len() as i64;
    let idx = m.rem_euclid(n) as usize;
    coeffs[idx]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_harmonic() {
        let n = 64;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let x = 2.0 * PI * k as f64 / n as f64;
                1.5 + 2.0 * x.cos() + 0.5 * (3.0 * x).sin()
            })
            .collect();
        let c = fourier_coefficients(&samples);
        assert!((coeff(&c, 0).re - 1.5).abs() < 1e-13);
        // cos m x -> c_m = c_{-m} = amp/2; sin m x -> c_m = amp/(2i)
        assert!((coeff(&c, 1).re - 1.0).abs() < 1e-13);
        assert!(coeff(&c, 1).im.abs() < 1e-13);
        assert!((coeff(&c, 3).im + 0.25).abs() < 1e-13);
        assert!((coeff(&c, -3).im - 0.25).abs() < 1e-13);
    }
}
