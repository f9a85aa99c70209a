use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Universe `{0, ..., k-1}` with a family of subsets and an optional cover.
///
/// Elements and set indices are 0-based here; the text format is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    k: usize,
    sets: Vec<BTreeSet<usize>>,
    cover: Option<BTreeSet<usize>>,
}

impl SetCoverInstance {
    pub fn new(k: usize, sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInstance(format!("set {} is empty", i + 1)));
            }
            if let Some(&e) = s.iter().find(|&&e| e >= k) {
                return Err(Error::InvalidInstance(format!(
                    "set {} contains element {} outside the universe of size {k}",
                    i + 1,
                    e + 1
                )));
            }
        }
        Ok(SetCoverInstance { k, sets, cover: None })
    }

    /// Attaches a candidate cover; it must cover the universe.
    pub fn with_cover(mut self, cover: BTreeSet<usize>) -> Result<Self> {
        if let Some(&i) = cover.iter().find(|&&i| i >= self.sets.len()) {
            return Err(Error::InvalidInstance(format!("cover names unknown set {}", i + 1)));
        }
        if !self.is_cover(&cover) {
            return Err(Error::InvalidInstance("candidate cover does not cover the universe".into()));
        }
        self.cover = Some(cover);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    pub fn cover(&self) -> Option<&BTreeSet<usize>> {
        self.cover.as_ref()
    }

    pub fn is_cover(&self, chosen: &BTreeSet<usize>) -> bool {
        let mut hit = vec![false; self.k];
        for &i in chosen {
            for &e in &self.sets[i] {
                hit[e] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// Whether the whole family covers the universe.
    pub fn is_coverable(&self) -> bool {
        self.is_cover(&(0..self.m()).collect())
    }

    /// A minimum cover found by enumerating all `2^m` subfamilies; among
    /// minimum covers, the one with the smallest bitmask.
    pub fn minimum_cover(&self) -> Option<BTreeSet<usize>> {
        let m = self.m();
        assert!(m < 32 && self.k <= 64, "exhaustive cover search limited to m < 32, k <= 64");
        let masks: Vec<u64> = self
            .sets
            .iter()
            .map(|s| s.iter().fold(0u64, |acc, &e| acc | (1 << e)))
            .collect();
        let full = if self.k == 64 { u64::MAX } else { (1u64 << self.k) - 1 };
        (0u32..1 << m)
            .filter(|sub| {
                (0..m)
                    .filter(|i| sub >> i & 1 == 1)
                    .fold(0u64, |acc, i| acc | masks[i])
                    == full
            })
            .min_by_key(|sub| (sub.count_ones(), *sub))
            .map(|sub| (0..m).filter(|i| sub >> i & 1 == 1).collect())
    }

    pub fn minimum_cover_size(&self) -> Option<usize> {
        self.minimum_cover().map(|c| c.len())
    }

    /// Random coverable instance: every set non-empty, every element in some set.
    pub fn random(k: usize, m: usize, seed: u64) -> Result<Self> {
        if k == 0 || m == 0 || k > 64 {
            return Err(Error::InvalidParameter(format!("need 1 <= k <= 64 and m >= 1, got k={k}, m={m}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sets: Vec<BTreeSet<usize>> = (0..m)
            .map(|_| (0..k).filter(|_| rng.random_bool(0.35)).collect())
            .collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(&mut rng);
        for (i, s) in sets.iter_mut().enumerate() {
            if s.is_empty() {
                s.insert(order[i % k]);
            }
        }
        for e in 0..k {
            if !sets.iter().any(|s| s.contains(&e)) {
                let i = rng.random_range(0..m);
                sets[i].insert(e);
            }
        }
        Self::new(k, sets)
    }
}
