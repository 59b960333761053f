//! Reproducible white noise for the first-guess interface traces.
//!
//! Generator: PCG-XSH-RR 64/32 (`rand_pcg::Pcg32`) built with
//! `Pcg32::new(seed, stream)`; stream 0 feeds the atmosphere trace, stream 1
//! the ocean trace. Each complex sample draws two `next_u64` values in order
//! (real part, then imaginary part), each mapped to `[-a, a)` by
//! `a * (2 * (x >> 11) * 2^-53 - 1)`.

use rand_core::Rng;
use rand_pcg::Pcg32;

use crate::model::C64;

pub const ATMOSPHERE_STREAM: u64 = 0;
pub const OCEAN_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct WhiteNoise {
    rng: Pcg32,
    amplitude: f64,
}

impl WhiteNoise {
    pub fn new(seed: u64, stream: u64, amplitude: f64) -> Self {
        WhiteNoise {
            rng: Pcg32::new(seed, stream),
            amplitude,
        }
    }

    fn uniform(&mut self) -> f64 {
        let unit = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        self.amplitude * (2.0 * unit - 1.0)
    }

    pub fn sample(&mut self) -> C64 {
        let re = self.uniform();
        let im = self.uniform();
        C64::new(re, im)
    }
}
