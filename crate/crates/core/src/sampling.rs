//! Index samplers: with replacement, a fresh permutation per epoch, or cyclic.
//!
//! Randomness contract: every random stream is a `ChaCha8Rng` seeded through
//! `SeedableRng::seed_from_u64`. Seeds for sub-streams are derived with
//! [`mix_seed`], a SplitMix64 fold over `(base_seed, stream ids...)`. Both are
//! platform independent, so a `(kind, m, seed)` triple always yields the same
//! index sequence.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a path of stream ids.
pub fn mix_seed(base: u64, stream: &[u64]) -> u64 {
    stream
        .iter()
        .fold(splitmix64(base), |h, &s| splitmix64(h ^ splitmix64(s)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Uniform with replacement.
    Iid,
    /// Fresh uniformly random permutation every epoch.
    Perm,
    /// `0, 1, ..., m-1, 0, 1, ...`
    Cyclic,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::Iid => "iid",
            SamplerKind::Perm => "perm",
            SamplerKind::Cyclic => "cyclic",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iid" => Ok(SamplerKind::Iid),
            "perm" | "permutation" => Ok(SamplerKind::Perm),
            "cyclic" => Ok(SamplerKind::Cyclic),
            other => Err(Error::InvalidParameter(format!(
                "unknown sampler '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sampler {
    kind: SamplerKind,
    m: usize,
    position: usize,
    order: Vec<usize>,
    rng: ChaCha8Rng,
    epoch: u64,
    draws: u64,
}

impl Sampler {
    pub fn new(kind: SamplerKind, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("sampler needs m >= 1".into()));
        }
        let mut rng = rng_from_seed(seed);
        let order = if kind == SamplerKind::Perm {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(&mut rng);
            order
        } else {
            Vec::new()
        };
        Ok(Self {
            kind,
            m,
            position: 0,
            order,
            rng,
            epoch: 0,
            draws: 0,
        })
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of completed blocks of `m` draws.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Total indices drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// The permutation in use for the current epoch (`Perm` only).
    pub fn current_order(&self) -> Option<&[usize]> {
        (self.kind == SamplerKind::Perm).then_some(self.order.as_slice())
    }

    pub fn next_index(&mut self) -> usize {
        let idx = match self.kind {
            SamplerKind::Iid => self.rng.random_range(0..self.m),
            SamplerKind::Perm => self.order[self.position],
            SamplerKind::Cyclic => self.position,
        };
        self.draws += 1;
        self.position += 1;
        if self.position == self.m {
            self.position = 0;
            self.epoch += 1;
            if self.kind == SamplerKind::Perm {
                self.order.shuffle(&mut self.rng);
            }
        }
        idx
    }
}

impl Iterator for Sampler {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        Some(self.next_index())
    }
}
