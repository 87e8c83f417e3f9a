//! Dominant-frequency estimate of a uniformly sampled real signal.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

fn hann(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![1.0; n];
    }
    (0..n)
        .map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos())
        .collect()
}

/// `|sum_k w_k x_k exp(-i omega t_k)|` of the windowed, mean-removed signal.
fn dft_magnitude(x: &[f64], dt: f64, omega: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (k, v) in x.iter().enumerate() {
        let (s, c) = (omega * k as f64 * dt).sin_cos();
        re += v * c;
        im -= v * s;
    }
    re.hypot(im)
}

/// Angular frequency of the strongest spectral peak. The FFT locates the
/// peak bin; a golden-section search on the windowed DFT magnitude then
/// refines it between the neighbouring bins.
pub fn dominant_angular_frequency(signal: &[f64], dt: f64) -> Option<f64> {
    let n = signal.len();
    if n < 8 || !(dt > 0.0) {
        return None;
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let w = hann(n);
    let x: Vec<f64> = signal.iter().zip(&w).map(|(v, w)| (v - mean) * w).collect();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let peak = (1..n / 2).max_by(|a, b| buf[*a].norm().total_cmp(&buf[*b].norm()))?;
    let bin = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let (mut a, mut b) = ((peak as f64 - 1.0) * bin, (peak as f64 + 1.0) * bin);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (dft_magnitude(&x, dt, c), dft_magnitude(&x, dt, d));
    for _ in 0..200 {
        if (b - a) <= 1e-13 * b.abs() {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = dft_magnitude(&x, dt, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = dft_magnitude(&x, dt, d);
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_an_off_bin_sinusoid() {
        let dt = 0.1;
        let w0 = 0.4899;
        let x: Vec<f64> = (0..10_000).map(|k| 1e-3 * (w0 * k as f64 * dt + 0.3).cos() + 0.2).collect();
        let w = dominant_angular_frequency(&x, dt).unwrap();
        assert!((w - w0).abs() / w0 < 1e-7, "{w}");
    }

    #[test]
    fn short_signal_is_rejected() {
        assert!(dominant_angular_frequency(&[1.0, 2.0], 0.1).is_none());
    }
}
