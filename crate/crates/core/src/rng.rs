//! Deterministic pseudo-random number generation.
//!
//! A self-contained xoshiro256++ generator seeded through SplitMix64. Keeping
//! the generator in-crate pins every seeded result bit-for-bit across
//! platforms and dependency upgrades, which the reproducibility contracts of
//! the samplers and the layout engine rely on.

use crate::mathx;

/// xoshiro256++ with SplitMix64 seeding.
#[derive(Clone, Debug)]
pub struct Rng {
    state: [u64; 4],
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        // SplitMix64 expansion of the seed into the full state.
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        let state = [next(), next(), next(), next()];
        Rng { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1)`; safe as a `ln` argument.
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform integer in `[0, n)` via widening multiply.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard normal draw (Marsaglia polar method).
    pub fn normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * mathx::sqrt(-2.0 * mathx::ln(s) / s);
            }
        }
    }

    /// Gamma draw with the given shape and rate, Marsaglia-Tsang squeeze
    /// with the boost transform for shape < 1.
    pub fn gamma(&mut self, shape: f64, rate: f64) -> f64 {
        assert!(
            shape > 0.0 && rate > 0.0,
            "gamma parameters must be positive"
        );
        if shape < 1.0 {
            // G(a) = G(a+1) * U^(1/a)
            let g = self.gamma(shape + 1.0, 1.0);
            let u = self.uniform_open();
            return g * mathx::powf(u, 1.0 / shape) / rate;
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / mathx::sqrt(9.0 * d);
        loop {
            let x = self.normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v3 = v * v * v;
            let u = self.uniform_open();
            if mathx::ln(u) < 0.5 * x * x + d - d * v3 + d * mathx::ln(v3) {
                return d * v3 / rate;
            }
        }
    }

    /// Standard Student-t draw with `nu` degrees of freedom.
    pub fn student_t(&mut self, nu: f64) -> f64 {
        let z = self.normal();
        let chi2 = self.gamma(nu / 2.0, 0.5);
        z / mathx::sqrt(chi2 / nu)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }
}
