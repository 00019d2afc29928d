//! The two automatic devices every protocol is built from: the XOR
//! [`Accumulator`] and the injectable randomness source [`RandSource`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{SchemeParams, ShareVector};

/// Encapsulated `l`-bit register. The only way to touch it is
/// [`reset`](Accumulator::reset), [`read`](Accumulator::read) and
/// [`store`](Accumulator::store).
pub struct Accumulator {
    register: ShareVector,
}

impl Accumulator {
    /// A fresh accumulator for binary `params`, already reset.
    pub fn new(params: SchemeParams) -> Result<Self> {
        params.ensure_binary()?;
        Ok(Accumulator {
            register: ShareVector::zero(params),
        })
    }

    pub fn params(&self) -> SchemeParams {
        self.register.params()
    }

    pub fn reset(&mut self) {
        self.register = ShareVector::zero(self.register.params());
    }

    pub fn read(&self) -> ShareVector {
        self.register.clone()
    }

    /// XORs `x` into the register.
    pub fn store(&mut self, x: &ShareVector) -> Result<()> {
        if x.params() != self.register.params() {
            return Err(Error::ParamMismatch {
                expected: self.register.params(),
                actual: x.params(),
            });
        }
        self.register = self.register.add(x)?;
        Ok(())
    }
}

/// SplitMix64. Frozen: changing it changes every seeded transcript.
#[derive(Debug, Clone)]
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, bound)` by rejection.
    fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let accept_max = u64::MAX - ((u64::MAX % bound) + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= accept_max {
                return x % bound;
            }
        }
    }
}

/// Mixes a run seed with a party discriminant so each party gets an
/// independent stream from one `--seed`.
pub fn derive_seed(seed: u64, party: u64) -> u64 {
    SplitMix64::new(seed ^ party.wrapping_mul(0xD6E8_FEB8_6659_FD93)).next_u64()
}

#[derive(Debug, Clone)]
enum Mode {
    Seeded { seed: u64, gen: SplitMix64 },
    Fixture { values: Vec<ShareVector>, cursor: usize },
}

/// How a [`RandSource`] was configured; echoed into transcripts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandDescriptor {
    Seeded { seed: u64 },
    Fixture { values: usize },
}

impl Default for RandDescriptor {
    fn default() -> Self {
        RandDescriptor::Seeded { seed: 0 }
    }
}

/// Randomness source owned by one party.
///
/// Seeded mode runs SplitMix64. Binary vectors take their bits from
/// successive 64-bit outputs, most significant bit first, one fresh output
/// per 64 components. Other moduli draw each component by rejection
/// sampling. Fixture mode replays the given vectors and fails once they run
/// out.
#[derive(Debug, Clone)]
pub struct RandSource {
    mode: Mode,
}

impl RandSource {
    pub fn seeded(seed: u64) -> Self {
        RandSource {
            mode: Mode::Seeded {
                seed,
                gen: SplitMix64::new(seed),
            },
        }
    }

    pub fn fixture(values: Vec<ShareVector>) -> Self {
        RandSource {
            mode: Mode::Fixture { values, cursor: 0 },
        }
    }

    pub fn descriptor(&self) -> RandDescriptor {
        match &self.mode {
            Mode::Seeded { seed, .. } => RandDescriptor::Seeded { seed: *seed },
            Mode::Fixture { values, .. } => RandDescriptor::Fixture {
                values: values.len(),
            },
        }
    }

    /// Number of fixture values not yet consumed; `None` for seeded sources.
    pub fn remaining(&self) -> Option<usize> {
        match &self.mode {
            Mode::Seeded { .. } => None,
            Mode::Fixture { values, cursor } => Some(values.len() - cursor),
        }
    }

    pub fn next_vector(&mut self, params: SchemeParams) -> Result<ShareVector> {
        match &mut self.mode {
            Mode::Seeded { gen, .. } => {
                let components = if params.is_binary() {
                    let mut out = Vec::with_capacity(params.dimension());
                    let mut word = 0u64;
                    for i in 0..params.dimension() {
                        if i % 64 == 0 {
                            word = gen.next_u64();
                        }
                        out.push((word >> (63 - i % 64)) & 1);
                    }
                    out
                } else {
                    (0..params.dimension())
                        .map(|_| gen.below(params.modulus()))
                        .collect()
                };
                ShareVector::new(params, components)
            }
            Mode::Fixture { values, cursor } => {
                let v = values
                    .get(*cursor)
                    .ok_or(Error::FixtureExhausted { consumed: *cursor })?;
                if v.params() != params {
                    return Err(Error::ParamMismatch {
                        expected: params,
                        actual: v.params(),
                    });
                }
                *cursor += 1;
                Ok(v.clone())
            }
        }
    }

    /// Uniform index in `[0, bound)`. A fixture source spends one vector per
    /// draw and reduces its integer value modulo `bound`.
    pub fn next_index(&mut self, bound: usize) -> Result<usize> {
        if bound == 0 {
            return Err(Error::ZeroCount);
        }
        match &mut self.mode {
            Mode::Seeded { gen, .. } => Ok(gen.below(bound as u64) as usize),
            Mode::Fixture { values, cursor } => {
                let v = values
                    .get(*cursor)
                    .ok_or(Error::FixtureExhausted { consumed: *cursor })?;
                *cursor += 1;
                let k = v.params().modulus();
                let value = v
                    .components()
                    .iter()
                    .fold(0u64, |acc, &c| acc.wrapping_mul(k).wrapping_add(c));
                Ok((value % bound as u64) as usize)
            }
        }
    }
}
