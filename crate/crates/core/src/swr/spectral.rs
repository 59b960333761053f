//! Per-frequency contraction measured from interface error traces.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::C64;

/// Window applied to both traces before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Taper {
    /// Plain DFT of the traces.
    Rectangular,
    /// `w_n = sin^2(pi (n + 1) / (N + 1))`, nonzero at both ends.
    #[default]
    Hann,
}

impl Taper {
    pub fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Taper::Rectangular => vec![1.0; n],
            Taper::Hann => (0..n)
                .map(|i| (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).sin().powi(2))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalXi {
    /// `2 pi m / T`
    pub omega: f64,
    pub bin: usize,
    pub ratio: f64,
}

/// `|E^k(omega_m)| / |E^{k-1}(omega_m)|` for `m = 1..=n/2`, where `E` is the
/// DFT (kernel `exp(-2 pi i m n / N)`) of the error trace. Bin `m` holds the
/// `exp(+i omega_m t)` component. Bins whose denominator falls below
/// `1e-14` times the largest bin are skipped. The same `taper` multiplies
/// both traces, so a trace that is a scalar multiple of the other still gives
/// a constant ratio.
pub fn empirical_xi(previous: &[C64], current: &[C64], dt: f64, taper: Taper) -> Result<Vec<EmpiricalXi>> {
    if previous.len() != current.len() {
        return Err(Error::LengthMismatch {
            expected: previous.len(),
            found: current.len(),
        });
    }
    let n = previous.len();
    if n < 2 {
        return Err(Error::Empty("error trace"));
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let w = taper.weights(n);
    let mut prev: Vec<C64> = previous.iter().zip(&w).map(|(v, w)| v * w).collect();
    let mut curr: Vec<C64> = current.iter().zip(&w).map(|(v, w)| v * w).collect();
    fft.process(&mut prev);
    fft.process(&mut curr);

    let largest = prev.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let window = n as f64 * dt;
    Ok((1..=n / 2)
        .filter(|&m| prev[m].norm() >= 1e-14 * largest && prev[m].norm() > 0.0)
        .map(|m| EmpiricalXi {
            omega: 2.0 * std::f64::consts::PI * m as f64 / window,
            bin: m,
            ratio: curr[m].norm() / prev[m].norm(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct O(n^2) DFT, independent of the FFT path.
    fn dft_bin(x: &[C64], m: usize) -> C64 {
        let n = x.len() as f64;
        x.iter()
            .enumerate()
            .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (m * k) as f64 / n))
            .sum()
    }

    #[test]
    fn scalar_multiple_gives_constant_ratio() {
        let prev: Vec<C64> = (0..64).map(|i| C64::new((i as f64 * i as f64 * 0.37).sin(), (i as f64 * 1.7).cos() * 0.2)).collect();
        let c = C64::new(-0.3, 0.4);
        let curr: Vec<C64> = prev.iter().map(|v| c * v).collect();
        for taper in [Taper::Rectangular, Taper::Hann] {
            let out = empirical_xi(&prev, &curr, 60.0, taper).unwrap();
            assert!(!out.is_empty());
            for row in out {
                assert!((row.ratio - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_matches_physical_contraction() {
        let dt = 60.0;
        let n = 96;
        let w1 = 2.0 * std::f64::consts::PI / (n as f64 * dt);
        let prev: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, w1 * k as f64 * dt)).collect();
        let c = C64::from_polar(0.0183, 1.1);
        let curr: Vec<C64> = prev.iter().map(|v| c * v).collect();
        let out = empirical_xi(&prev, &curr, dt, Taper::Rectangular).unwrap();
        // only bin 1 carries energy
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].bin, 1);
        assert!((out[0].omega - w1).abs() < 1e-18);
        let physical = curr[5].norm() / prev[5].norm();
        assert!((out[0].ratio - physical).abs() < 1e-10);
        assert!((dft_bin(&curr, 1).norm() / dft_bin(&prev, 1).norm() - out[0].ratio).abs() < 1e-10);

        let hann = empirical_xi(&prev, &curr, dt, Taper::Hann).unwrap();
        let bin1 = hann.iter().find(|r| r.bin == 1).unwrap();
        assert!((bin1.ratio - physical).abs() < 1e-10);
    }

    #[test]
    fn hann_weights_are_symmetric() {
        let w = Taper::Hann.weights(7);
        assert!((w[3] - 1.0).abs() < 1e-15);
        for i in 0..7 {
            assert!((w[i] - w[6 - i]).abs() < 1e-15);
            assert!(w[i] > 0.0);
        }
    }

    #[test]
    fn mismatched_lengths() {
        let a = vec![C64::new(1.0, 0.0); 4];
        let b = vec![C64::new(1.0, 0.0); 5];
        assert!(matches!(empirical_xi(&a, &b, 1.0, Taper::Hann), Err(Error::LengthMismatch { .. })));
    }
}
