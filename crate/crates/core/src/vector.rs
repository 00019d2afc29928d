//! Share vectors over `Z_k^η`.
//!
//! Every secret, share, mask and key in the system is a [`ShareVector`]. The
//! group operation is component-wise addition modulo `k`; for `k = 2` this is
//! bitwise XOR and the vector is treated as an `l`-bit string whose first
//! component is the most significant bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modulus and dimension of the share space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeParams {
    modulus: u64,
    dimension: usize,
}

impl SchemeParams {
    /// Vector width used by the binary protocols when nothing else is given.
    pub const DEFAULT_BITS: usize = 128;

    pub fn new(modulus: u64, dimension: usize) -> Result<Self> {
        if modulus < 2 || dimension < 1 {
            return Err(Error::InvalidParams { modulus, dimension });
        }
        Ok(SchemeParams { modulus, dimension })
    }

    /// Binary parameters with `bits` components.
    pub fn binary(bits: usize) -> Result<Self> {
        Self::new(2, bits)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_binary(&self) -> bool {
        self.modulus == 2
    }

    /// Bit width `l` for binary params.
    pub fn bits(&self) -> Result<usize> {
        if self.is_binary() {
            Ok(self.dimension)
        } else {
            Err(Error::NotBinary(*self))
        }
    }

    /// Number of bytes needed to hold one binary vector.
    pub fn byte_len(&self) -> usize {
        self.dimension.div_ceil(8)
    }

    pub(crate) fn ensure_binary(&self) -> Result<()> {
        self.bits().map(|_| ())
    }
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            modulus: 2,
            dimension: Self::DEFAULT_BITS,
        }
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}^{}", self.modulus, self.dimension)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ShareVector {
    params: SchemeParams,
    components: Vec<u64>,
}

impl ShareVector {
    pub fn new(params: SchemeParams, components: Vec<u64>) -> Result<Self> {
        if components.len() != params.dimension {
            return Err(Error::DimensionMismatch {
                expected: params.dimension,
                actual: components.len(),
            });
        }
        if let Some(&value) = components.iter().find(|&&c| c >= params.modulus) {
            return Err(Error::ComponentOutOfRange {
                value,
                modulus: params.modulus,
            });
        }
        Ok(ShareVector { params, components })
    }

    pub fn zero(params: SchemeParams) -> Self {
        ShareVector {
            params,
            components: vec![0; params.dimension],
        }
    }

    /// Builds a binary vector from big-endian bytes. The first component is
    /// the most significant bit of the first byte; trailing padding bits of
    /// the last byte must be zero.
    pub fn from_bytes(params: SchemeParams, bytes: &[u8]) -> Result<Self> {
        let bits = params.bits()?;
        if bytes.len() != params.byte_len() {
            return Err(Error::LengthMismatch {
                bits,
                expected: params.byte_len() * 2,
                actual: bytes.len() * 2,
            });
        }
        let padding = params.byte_len() * 8 - bits;
        if padding > 0 && bytes[bytes.len() - 1] & ((1u8 << padding) - 1) != 0 {
            return Err(Error::BadHex("non-zero padding bits".into()));
        }
        let components = (0..bits)
            .map(|i| u64::from((bytes[i / 8] >> (7 - i % 8)) & 1))
            .collect();
        Ok(ShareVector { params, components })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.params.ensure_binary()?;
        let mut out = vec![0u8; self.params.byte_len()];
        for (i, &c) in self.components.iter().enumerate() {
            if c == 1 {
                out[i / 8] |= 1 << (7 - i % 8);
            }
        }
        Ok(out)
    }

    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &ShareVector) -> Result<()> {
        if self.params != other.params {
            return Err(Error::MixedParams {
                left: self.params,
                right: other.params,
            });
        }
        Ok(())
    }

    /// Component-wise sum modulo `k` (XOR when binary).
    pub fn add(&self, other: &ShareVector) -> Result<ShareVector> {
        self.check_same(other)?;
        let k = u128::from(self.params.modulus);
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(&a, &b)| ((u128::from(a) + u128::from(b)) % k) as u64)
            .collect();
        Ok(ShareVector {
            params: self.params,
            components,
        })
    }

    /// Component-wise difference modulo `k`. Identical to [`add`](Self::add)
    /// in characteristic 2.
    pub fn sub(&self, other: &ShareVector) -> Result<ShareVector> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ShareVector {
        let k = self.params.modulus;
        let components = self
            .components
            .iter()
            .map(|&c| if c == 0 { 0 } else { k - c })
            .collect();
        ShareVector {
            params: self.params,
            components,
        }
    }

    /// Flips one bit of a binary vector. Bit 0 is the least significant bit,
    /// i.e. the last component.
    pub fn flip_bit(&self, bit: usize) -> Result<ShareVector> {
        let bits = self.params.bits()?;
        if bit >= bits {
            return Err(Error::IndexOutOfRange {
                index: bit,
                len: bits,
            });
        }
        let mut out = self.clone();
        out.components[bits - 1 - bit] ^= 1;
        Ok(out)
    }
}

impl fmt::Debug for ShareVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_bytes() {
            Ok(bytes) => {
                write!(f, "0x")?;
                for b in bytes {
                    write!(f, "{b:02x}")?;
                }
                write!(f, "/{}", self.params.dimension)
            }
            Err(_) => write!(f, "{:?} mod {}", self.components, self.params.modulus),
        }
    }
}

/// Combiner `C(U)`: the group sum of all shares. The empty sum is the zero
/// vector of `params`.
pub fn combine<'a, I>(params: SchemeParams, shares: I) -> Result<ShareVector>
where
    I: IntoIterator<Item = &'a ShareVector>,
{
    let mut acc = ShareVector::zero(params);
    for s in shares {
        if s.params != params {
            return Err(Error::MixedParams {
                left: params,
                right: s.params,
            });
        }
        acc = acc.add(s)?;
    }
    Ok(acc)
}
