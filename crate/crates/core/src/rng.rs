//! Counter-based standard-normal streams.
//!
//! Every chain owns a ChaCha20 stream selected by `(seed, chain)`. Each step
//! of a chain reads a fixed-size slot of the keystream at a position computed
//! from the step index, so a step's draws can be regenerated without
//! replaying the chain and different chains never share keystream.
//!
//! Normals come from Box–Muller on pairs of 53-bit uniforms. A slot holding
//! `n` normals consumes `4·⌈n/2⌉` 32-bit words; when `n` is odd the second
//! normal of the last pair is discarded.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Normal draws for one chain, addressed by slot.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    per_slot: usize,
    draws: u64,
}

impl NormalStream {
    /// Stream of chain `chain` under `seed`, delivering `per_slot` normals per slot.
    pub fn new(seed: u64, chain: u64, per_slot: usize) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(chain);
        Self { rng, per_slot, draws: 0 }
    }

    pub fn per_slot(&self) -> usize {
        self.per_slot
    }

    fn words_per_slot(&self) -> u128 {
        4 * self.per_slot.div_ceil(2) as u128
    }

    /// Fills `out[..per_slot]` with the normals of `slot`.
    pub fn fill_slot(&mut self, slot: u64, out: &mut [f64]) {
        let pos = slot as u128 * self.words_per_slot();
        // consecutive slots are contiguous, so seeking is only needed on jumps
        if self.rng.get_word_pos() != pos {
            self.rng.set_word_pos(pos);
        }
        let n = self.per_slot;
        assert!(out.len() >= n, "slot buffer too small");
        let mut i = 0;
        while i < n {
            let (z0, z1) = self.pair();
            out[i] = z0;
            if i + 1 < n {
                out[i + 1] = z1;
            }
            i += 2;
        }
        self.draws += n as u64;
    }

    /// Number of normals delivered so far.
    pub fn draw_count(&self) -> u64 {
        self.draws
    }

    fn pair(&mut self) -> (f64, f64) {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        // u1 ∈ (0, 1] keeps the logarithm finite; u2 ∈ [0, 1)
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (self.rng.next_u64() >> 11) as f64 * SCALE;
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (radius * c, radius * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_are_random_access() {
        let mut a = NormalStream::new(7, 3, 5);
        let mut b = NormalStream::new(7, 3, 5);
        let mut sequential = Vec::new();
        for slot in 0..10 {
            let mut buf = [0.0; 5];
            a.fill_slot(slot, &mut buf);
            sequential.push(buf);
        }
        for slot in [9u64, 2, 5, 0] {
            let mut buf = [0.0; 5];
            b.fill_slot(slot, &mut buf);
            assert_eq!(buf, sequential[slot as usize]);
        }
        assert_eq!(a.draw_count(), 50);
    }

    #[test]
    fn chains_and_seeds_differ() {
        let draw = |seed, chain| {
            let mut s = NormalStream::new(seed, chain, 4);
            let mut buf = [0.0; 4];
            s.fill_slot(1, &mut buf);
            buf
        };
        assert_ne!(draw(1, 0), draw(1, 1));
        assert_ne!(draw(1, 0), draw(2, 0));
        assert_eq!(draw(1, 0), draw(1, 0));
    }

    #[test]
    fn moments_are_standard() {
        let mut s = NormalStream::new(42, 0, 1000);
        let mut buf = vec![0.0; 1000];
        let (mut m1, mut m2, mut m4) = (0.0, 0.0, 0.0);
        let slots = 400;
        for slot in 0..slots {
            s.fill_slot(slot, &mut buf);
            for &z in &buf {
                m1 += z;
                m2 += z * z;
                m4 += z.powi(4);
            }
        }
        let n = (slots * 1000) as f64;
        assert!((m1 / n).abs() < 5.0 / n.sqrt());
        assert!((m2 / n - 1.0).abs() < 5.0 * 2f64.sqrt() / n.sqrt());
        assert!((m4 / n - 3.0).abs() < 5.0 * 96f64.sqrt() / n.sqrt());
    }
}
