//! Counter-based deterministic random numbers.
//!
//! Every draw is a pure function of `(seed, stream, index, attempt)`, so a
//! sampled cell never depends on the order in which other cells were drawn.
//! The mixing function is frozen; changing it invalidates every stored
//! fixture.
//!
//! ```text
//! mix64(z):   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//!             z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//!             z ^ (z >> 31)                  (wrapping u64 arithmetic)
//!
//! word(seed, stream, index, attempt):
//!             h = mix64(seed)
//!             for v in [stream, index, attempt]:
//!                 h = mix64(h ^ mix64(v + 0x9e3779b97f4a7c15))
//!             return h
//! ```
//!
//! Uniform integers below a bound `d` use rejection: a 64-bit word `w` is
//! accepted when `w <= u64::MAX - (2^64 mod d)` and mapped to `w mod d`;
//! rejected words advance `attempt`. A bound `d` wider than 64 bits takes
//! `w = ceil(bits(d) / 64)` words per try, at attempts `t·w .. t·w + w - 1`
//! for try `t`, concatenates them least significant first, shifts right by
//! `64·w - bits(d)` and rejects values `>= d`.

use num_bigint::BigUint;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Stream ids reserved by the library. Axis `a` of a sampled matrix or
/// tensor uses stream `a`.
pub mod streams {
    pub const COLLISION_SEARCH: u64 = 0x1000;
    pub const CORPUS: u64 = 0x2000;
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stateless generator keyed by a 64-bit seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, key: mix64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn word(&self, stream: u64, index: u64, attempt: u64) -> u64 {
        let mut h = self.key;
        for v in [stream, index, attempt] {
            h = mix64(h ^ mix64(v.wrapping_add(GOLDEN)));
        }
        h
    }

    /// Uniform integer in `[0, bound)` for draw `index` of `stream`.
    pub fn below(&self, stream: u64, index: u64, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        let mut attempt = 0;
        loop {
            let w = self.word(stream, index, attempt);
            if w <= zone {
                return w % bound;
            }
            attempt += 1;
        }
    }

    /// Uniform integer in `[0, bound)` for arbitrarily wide bounds.
    pub fn below_big(&self, stream: u64, index: u64, bound: &BigUint) -> BigUint {
        assert!(bound.bits() > 0, "bound must be positive");
        if let Ok(small) = u64::try_from(bound) {
            return BigUint::from(self.below(stream, index, small));
        }
        let bits = bound.bits();
        let words = bits.div_ceil(64);
        let mut attempt = 0;
        loop {
            let digits: Vec<u64> = (0..words)
                .map(|i| self.word(stream, index, attempt * words + i))
                .collect();
            let mut candidate = BigUint::from_slice(
                &digits
                    .iter()
                    .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            let excess = words * 64 - bits;
            candidate >>= excess;
            if &candidate < bound {
                return candidate;
            }
            attempt += 1;
        }
    }

    /// Sequential view on one stream.
    pub fn sequence(&self, stream: u64) -> DetRng {
        DetRng {
            rng: *self,
            stream,
            next: 0,
        }
    }
}

/// Sequential generator over a single counter stream.
#[derive(Debug, Clone)]
pub struct DetRng {
    rng: CounterRng,
    stream: u64,
    next: u64,
}

impl DetRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng::new(seed).sequence(stream)
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.rng.word(self.stream, self.next, 0);
        self.next += 1;
        w
    }

    /// Uniform index in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        let v = self.rng.below(self.stream, self.next, bound as u64);
        self.next += 1;
        v as usize
    }

    /// Uniform integer in `[low, high]`.
    pub fn range_inclusive(&mut self, low: usize, high: usize) -> usize {
        low + self.below(high - low + 1)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
