use rustfft::{num_complex::Complex, FftPlanner};

/// The `n` strongest spectral peaks of a uniformly sampled signal, as
/// angular frequencies in units of the inverse sampling variable, strongest
/// first, paired with their relative amplitude (strongest = 1).
///
/// A least-squares line is removed first (so secular growth does not leak
/// into the spectrum), then a Hann window is applied and the FFT is
/// zero-padded eightfold. Peaks are refined by parabolic interpolation.
pub fn dominant_frequencies(samples: &[f64], dt: f64, n: usize) -> Vec<(f64, f64)> {
    let len = samples.len();
    if len < 4 || n == 0 {
        return Vec::new();
    }
    let xs: Vec<f64> = (0..len).map(|k| k as f64).collect();
    let mx = xs.iter().sum::<f64>() / len as f64;
    let my = samples.iter().sum::<f64>() / len as f64;
    let sxy: f64 = xs.iter().zip(samples).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;

    let padded = (len * 8).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); padded];
    for (k, (x, y)) in xs.iter().zip(samples).enumerate() {
        let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (len - 1) as f64).cos();
        buf[k] = Complex::new((y - my - slope * (x - mx)) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let mag: Vec<f64> = buf[..padded / 2].iter().map(|c| c.norm()).collect();

    let mut peaks: Vec<(f64, f64)> = (1..mag.len() - 1)
        .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
        .map(|k| {
            let (a, b, c) = (mag[k - 1], mag[k], mag[k + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let bin = k as f64 + shift;
            (2.0 * std::f64::consts::PI * bin / (padded as f64 * dt), b)
        })
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks.truncate(n);
    let top = peaks.first().map_or(1.0, |p| p.1);
    peaks.into_iter().map(|(w, a)| (w, a / top)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_two_tones() {
        let dt = 0.01;
        let s: Vec<f64> = (0..6000).map(|k| (1.0 * k as f64 * dt).cos() - (7.5 * k as f64 * dt).cos()).collect();
        let peaks = dominant_frequencies(&s, dt, 3);
        let mut f: Vec<f64> = peaks.iter().take(2).map(|p| p.0).collect();
        f.sort_by(f64::total_cmp);
        assert!((f[0] - 1.0).abs() < 0.02, "{peaks:?}");
        assert!((f[1] - 7.5).abs() < 0.02, "{peaks:?}");
        assert!(peaks[2].1 < 0.1);
    }

    #[test]
    fn trend_is_removed() {
        let dt = 0.01;
        let s: Vec<f64> = (0..6000).map(|k| 3.0 * k as f64 * dt - (2.0 * k as f64 * dt).sin()).collect();
        let peaks = dominant_frequencies(&s, dt, 2);
        assert!((peaks[0].0 - 2.0).abs() < 0.02, "{peaks:?}");
        assert!(peaks[1].1 < 0.1, "{peaks:?}");
    }
}
