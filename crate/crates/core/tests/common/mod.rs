//! Straight-line reference computations on raw bytes (8-bit vectors), plus
//! helpers for feeding the same randomness to the engine.

#![allow(dead_code)]

use asgs_core::devices::RandSource;
use asgs_core::{AuthorizedShareSet, RoleTag, SchemeParams, ShareVector};

pub fn p8() -> SchemeParams {
    SchemeParams::binary(8).unwrap()
}

pub fn v8(x: u8) -> ShareVector {
    ShareVector::from_bytes(p8(), &[x]).unwrap()
}

pub fn byte(v: &ShareVector) -> u8 {
    v.to_bytes().unwrap()[0]
}

pub fn bytes(vs: &[ShareVector]) -> Vec<u8> {
    vs.iter().map(byte).collect()
}

pub fn fixture(xs: &[u8]) -> RandSource {
    RandSource::fixture(xs.iter().map(|&x| v8(x)).collect())
}

pub fn set8(tag: RoleTag, xs: &[u8]) -> AuthorizedShareSet {
    AuthorizedShareSet::new(tag, xs.iter().map(|&x| v8(x)).collect()).unwrap()
}

/// XOR of byte strings of equal length.
pub fn xor_wide(vs: &[Vec<u8>]) -> Vec<u8> {
    let len = vs.first().map_or(0, Vec::len);
    let mut out = vec![0u8; len];
    for v in vs {
        for (o, b) in out.iter_mut().zip(v) {
            *o ^= b;
        }
    }
    out
}

pub fn xor(xs: &[u8]) -> u8 {
    xs.iter().fold(0, |a, b| a ^ b)
}

/// A replayable randomness stream.
pub struct Stream {
    values: Vec<u8>,
    pos: usize,
}

impl Stream {
    pub fn new(values: &[u8]) -> Self {
        Stream {
            values: values.to_vec(),
            pos: 0,
        }
    }

    pub fn next(&mut self) -> u8 {
        let v = self.values[self.pos];
        self.pos += 1;
        v
    }

    pub fn used(&self) -> usize {
        self.pos
    }
}

pub fn generate_m(acc: &mut Stream, n: usize) -> Vec<u8> {
    let mut m: Vec<u8> = (0..n - 1).map(|_| acc.next()).collect();
    m.push(xor(&m));
    m
}

pub fn set_generate(acc: &mut Stream, d: usize, n: usize) -> (Vec<u8>, Vec<u8>) {
    let m = generate_m(acc, d + n);
    (m[..d].to_vec(), m[d..].to_vec())
}

pub fn set_replicate(u: &[u8], m: &[u8]) -> Vec<u8> {
    let n = u.len();
    (0..n).map(|i| u[i] ^ m[i] ^ m[i + n]).collect()
}

pub fn equal(u: &[u8], acc: &mut Stream) -> Vec<u8> {
    let m = generate_m(acc, 2 * u.len());
    set_replicate(u, &m)
}

pub fn bigger(u: &[u8], d: usize, acc: &mut Stream) -> Vec<u8> {
    let n = u.len();
    let m = generate_m(acc, n + d);
    let mut out = set_replicate(u, &m[..2 * n]);
    for i in n + 1..=d {
        out.push(m[i + n - 1]);
    }
    out
}

pub fn smaller(u: &[u8], d: usize, acc: &mut Stream) -> Vec<u8> {
    let n = u.len();
    let m = generate_m(acc, n + d - 1);
    let mut out: Vec<u8> = (0..d - 1).map(|i| u[i] ^ m[i] ^ m[i + n]).collect();
    out.push((d - 1..n).fold(0, |a, i| a ^ u[i] ^ m[i]));
    out
}

pub fn fast_share(s: u8, n: usize, owner: &mut Stream) -> Vec<u8> {
    let mut r: Vec<u8> = (0..n - 1).map(|_| owner.next()).collect();
    r.push(s ^ xor(&r));
    r
}

pub enum Assign {
    Identity,
    Fixed(Vec<usize>),
    Shuffle,
}

#[derive(Debug, PartialEq, Eq)]
pub struct SafeOracle {
    pub masks: Vec<u8>,
    pub keys: Vec<u8>,
    pub owner_shares: Vec<u8>,
    /// `held[j - 1]`: protected share stored by participant `j`.
    pub held: Vec<u8>,
    pub assignment: Vec<usize>,
    pub regenerations: usize,
}

/// `None` when the key guard gives up.
pub fn safe_shares(
    s: u8,
    n: usize,
    acc: &mut Stream,
    dealer: &mut Stream,
    owner: &mut Stream,
    assign: &Assign,
) -> Option<SafeOracle> {
    let masks = generate_m(acc, n);
    let owner_shares = fast_share(s, n, owner);
    let mut keys = Vec::new();
    let mut regenerations = 0;
    let mut held = vec![0u8; n];
    let mut assignment = Vec::new();
    let mut urn: Vec<usize> = (1..=n).collect();
    for i in 1..=n {
        let k = loop {
            let k = dealer.next();
            if i == n && xor(&keys) ^ k == 0 {
                if regenerations == 64 {
                    return None;
                }
                regenerations += 1;
                continue;
            }
            break k;
        };
        keys.push(k);
        let protected = masks[i - 1] ^ k ^ owner_shares[i - 1];
        let j = match assign {
            Assign::Identity => i,
            Assign::Fixed(p) => p[i - 1],
            Assign::Shuffle => {
                let pick = if urn.len() == 1 {
                    0
                } else {
                    owner.next() as usize % urn.len()
                };
                urn.remove(pick)
            }
        };
        assignment.push(j);
        held[j - 1] = protected;
    }
    Some(SafeOracle {
        masks,
        keys,
        owner_shares,
        held,
        assignment,
        regenerations,
    })
}

/// Participant `i` removes `k_i` from the share it holds.
pub fn activate(held: &[u8], keys: &[u8]) -> Vec<u8> {
    held.iter().zip(keys).map(|(h, k)| h ^ k).collect()
}

pub struct PvssOracle {
    pub c1: Vec<u8>,
    pub c2: Vec<u8>,
    pub k1: Vec<u8>,
    pub k2: Vec<u8>,
}

pub fn distribute(u1: &[u8], u2: &[u8], dealer: &mut Stream) -> PvssOracle {
    let k1: Vec<u8> = u1.iter().map(|_| dealer.next()).collect();
    let k2: Vec<u8> = u2.iter().map(|_| dealer.next()).collect();
    PvssOracle {
        c1: u1.iter().zip(&k1).map(|(s, k)| s ^ k).collect(),
        c2: u2.iter().zip(&k2).map(|(s, k)| s ^ k).collect(),
        k1,
        k2,
    }
}

/// `(xor of bulletin, xor of keys, verdict)`.
pub fn verify(c1: &[u8], c2: &[u8], k1: &[u8], k2: &[u8]) -> (u8, u8, bool) {
    let c = xor(c1) ^ xor(c2);
    let k = xor(k1) ^ xor(k2);
    (c, k, c == k)
}
