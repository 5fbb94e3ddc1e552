//! Arithmetic over GF(q) for prime q and for GF(256).
//!
//! Elements are canonical integers in `0..q`. Prime fields use modular
//! arithmetic; GF(256) uses log/antilog tables over the polynomial
//! x^8 + x^4 + x^3 + x + 1 (0x11B) with generator 3. All sampling goes
//! through an explicit seedable RNG state so every run is reproducible.

use std::sync::OnceLock;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seedable RNG state threaded through every sampling operation.
pub type RngState = ChaCha8Rng;

/// Root RNG for a run.
pub fn rng_from_seed(seed: u64) -> RngState {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child RNG on an independent stream. Row-wise generators derive one child
/// per row so output is seed-deterministic regardless of evaluation order.
pub fn stream_rng(base_seed: u64, stream: u64) -> RngState {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(stream);
    rng
}

/// Draw a fresh base seed for deriving child streams.
pub fn fork_base(rng: &mut RngState) -> u64 {
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Prime,
    /// GF(2^8) in polynomial-basis byte encoding.
    Binary8,
}

/// An element of GF(q), stored as its canonical representative in `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The alphabet GF(q) together with its arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    q: u32,
    kind: FieldKind,
}

struct Gf256Tables {
    exp: [u8; 510],
    log: [u8; 256],
}

fn gf256_tables() -> &'static Gf256Tables {
    static TABLES: OnceLock<Gf256Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exp = [0u8; 510];
        let mut log = [0u8; 256];
        let mut x: u32 = 1;
        for i in 0..255 {
            exp[i] = x as u8;
            log[x as usize] = i as u8;
            // multiply by the generator 3 = x + 1, reducing by 0x11B
            x = (x << 1) ^ x;
            if x & 0x100 != 0 {
                x ^= 0x11B;
            }
        }
        for i in 255..510 {
            exp[i] = exp[i - 255];
        }
        Gf256Tables { exp, log }
    })
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3u64;
    let q = q as u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    /// GF(q) for prime q, or GF(256).
    pub fn new(q: u32) -> Result<Self> {
        if q == 256 {
            Ok(FieldSpec {
                q,
                kind: FieldKind::Binary8,
            })
        } else if is_prime(q) {
            Ok(FieldSpec {
                q,
                kind: FieldKind::Prime,
            })
        } else {
            Err(Error::UnsupportedField(q as u64))
        }
    }

    pub fn gf256() -> Self {
        FieldSpec {
            q: 256,
            kind: FieldKind::Binary8,
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Canonical element from an integer, rejecting values outside `0..q`.
    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value < self.q {
            Ok(FieldElement(value))
        } else {
            Err(Error::ElementOutOfRange {
                value: value as u64,
                q: self.q,
            })
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match self.kind {
            FieldKind::Prime => {
                let s = a.0 as u64 + b.0 as u64;
                FieldElement((s % self.q as u64) as u32)
            }
            FieldKind::Binary8 => FieldElement(a.0 ^ b.0),
        }
    }

    /// Additive inverse: `add(a, neg(a)) == 0`.
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match self.kind {
            FieldKind::Prime => {
                if a.0 == 0 {
                    a
                } else {
                    FieldElement(self.q - a.0)
                }
            }
            FieldKind::Binary8 => a,
        }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match self.kind {
            FieldKind::Prime => {
                let p = a.0 as u64 * b.0 as u64;
                FieldElement((p % self.q as u64) as u32)
            }
            FieldKind::Binary8 => {
                if a.0 == 0 || b.0 == 0 {
                    return FieldElement(0);
                }
                let t = gf256_tables();
                let idx = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
                FieldElement(t.exp[idx] as u32)
            }
        }
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::invalid("zero has no multiplicative inverse"));
        }
        match self.kind {
            FieldKind::Prime => {
                // Fermat: a^(q-2)
                let mut acc = FieldElement(1);
                let mut base = a;
                let mut e = self.q - 2;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(acc, base);
                    }
                    base = self.mul(base, base);
                    e >>= 1;
                }
                Ok(acc)
            }
            FieldKind::Binary8 => {
                let t = gf256_tables();
                let idx = 255 - t.log[a.0 as usize] as usize;
                Ok(FieldElement(t.exp[idx] as u32))
            }
        }
    }

    /// Uniform draw over GF(q), or over the nonzero elements when
    /// `exclude_zero` is set.
    pub fn sample_uniform(&self, exclude_zero: bool, rng: &mut RngState) -> FieldElement {
        let lo = if exclude_zero { 1 } else { 0 };
        FieldElement(rng.gen_range(lo..self.q))
    }

    /// Uniform draw over the q-1 elements other than `excluded`, by index
    /// arithmetic rather than rejection.
    pub fn sample_excluding(&self, excluded: FieldElement, rng: &mut RngState) -> FieldElement {
        let t = rng.gen_range(0..self.q - 1);
        FieldElement(if t >= excluded.0 { t + 1 } else { t })
    }

    /// Table/arithmetic self-consistency: a * a^-1 == 1 for every a != 0.
    pub fn self_check(&self) -> bool {
        (1..self.q).all(|v| {
            let a = FieldElement(v);
            match self.inv(a) {
                Ok(ai) => self.mul(a, ai) == FieldElement(1),
                Err(_) => false,
            }
        })
    }
}
