//! Seeded random streams.
//!
//! All stochastic choices in the crate (weight init, triangle sampling,
//! wavenumber sampling, Monte-Carlo oracles) flow through [`SeedStream`] so a
//! run is a pure function of its seed. Sampling is built directly on
//! `RngCore::next_u64` to keep the produced streams independent of upstream
//! distribution-crate versions.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SeedStream {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Child stream with an independent state, for labelled sub-tasks.
    pub fn fork(&mut self, label: u64) -> SeedStream {
        let s = self.rng.next_u64();
        SeedStream::new(s ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in [0, n).
    pub fn index(&mut self, n: usize) -> usize {
        // Rejection-free modulo bias is negligible for the small n used here,
        // but widening multiply avoids it outright.
        ((self.rng.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard normal via Marsaglia's polar method.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }
}
