//! Counter-based randomness for sampled grids.
//!
//! Every draw is a pure function of `(seed, grid coordinates, counter)`:
//! each grid point owns an independent stream, so sampling is reproducible
//! under any parallel schedule and there is no global RNG state.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

/// Deterministic per-grid-point stream.
#[derive(Debug, Clone)]
pub struct PointRng {
    state: u64,
}

impl PointRng {
    pub fn new(seed: u64, coords: &[u64]) -> Self {
        let mut state = mix(seed ^ GOLDEN);
        for &c in coords {
            state = mix(state.wrapping_add(GOLDEN) ^ mix(c));
        }
        PointRng { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform draw in `[0, n)` by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let threshold = n.wrapping_neg() % n;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % n;
            }
        }
    }

    /// Uniform draw among the units of `q` (returns 0 for `q = 1`).
    pub fn unit_below(&mut self, q: u64) -> u64 {
        assert!(q > 0);
        if q == 1 {
            return 0;
        }
        loop {
            let v = 1 + self.below(q - 1);
            if crate::arith::gcd(v, q) == 1 {
                return v;
            }
        }
    }
}
