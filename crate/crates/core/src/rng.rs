//! Counter-based random streams.
//!
//! A stream is keyed by a master seed and a trial index. Within a trial,
//! [`StreamRng::substream`] jumps to a disjoint region of the keystream for a
//! given step counter, so draws never depend on how many words an earlier
//! step consumed.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Words reserved for each step before the next step's region begins.
const STEP_STRIDE: u128 = 1 << 40;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_from(seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    key
}

#[derive(Clone, Debug)]
pub struct StreamRng {
    seed: u64,
    trial: u64,
    inner: ChaCha12Rng,
}

impl StreamRng {
    pub fn new(seed: u64, trial: u64) -> Self {
        let mut inner = ChaCha12Rng::from_seed(key_from(seed));
        inner.set_stream(trial);
        Self { seed, trial, inner }
    }

    /// Stream for `(seed, trial, step)`.
    pub fn at_step(seed: u64, trial: u64, step: u64) -> Self {
        let mut r = Self::new(seed, trial);
        r.inner.set_word_pos(step as u128 * STEP_STRIDE);
        r
    }

    pub fn substream(&self, step: u64) -> Self {
        Self::at_step(self.seed, self.trial, step)
    }

    /// Independent stream for a labelled sub-computation, keyed off this one.
    pub fn fork(&mut self, label: u64) -> Self {
        let salt = self.inner.next_u64();
        Self::new(splitmix64(self.seed ^ splitmix64(label ^ salt)), self.trial)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    /// Draws an index from unnormalised non-negative weights.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.uniform() * total;
        let mut last = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
        last
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        crate::math::sqrt(-2.0 * crate::math::ln(u1)) * crate::math::cos(core::f64::consts::TAU * u2)
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> core::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_stream() {
        let mut a = StreamRng::new(7, 3);
        let mut b = StreamRng::new(7, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn trials_and_steps_are_distinct() {
        let a = StreamRng::new(7, 3).next_u64();
        let b = StreamRng::new(7, 4).next_u64();
        let c = StreamRng::at_step(7, 3, 1).next_u64();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn substream_ignores_prior_consumption() {
        let mut a = StreamRng::new(1, 0);
        for _ in 0..50 {
            a.next_u32();
        }
        let b = StreamRng::new(1, 0);
        assert_eq!(a.substream(5).next_u64(), b.substream(5).next_u64());
    }

    #[test]
    fn categorical_skips_zero_weights() {
        let mut r = StreamRng::new(2, 0);
        for _ in 0..200 {
            let i = r.categorical(&[0.0, 1.0, 0.0, 3.0]);
            assert!(i == 1 || i == 3);
        }
    }
}
