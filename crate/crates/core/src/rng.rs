//! Keyed random substreams.
//!
//! Every random draw in a simulation comes from a stream identified by a
//! short key path (master seed, time step, agent index, channel). Streams
//! are derived by hashing the key path, so a draw never depends on how many
//! other draws happened before it or on which thread evaluated it.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

/// Domain tags keep unrelated uses of the same master seed apart.
const TAG_STEP: u64 = 0x5354_4550; // "STEP"
const TAG_INIT: u64 = 0x494e_4954; // "INIT"
const TAG_REPLICATE: u64 = 0x5245_504c; // "REPL"
const TAG_PROBE: u64 = 0x5052_4f42; // "PROB"

fn mix(state: u64, word: u64) -> u64 {
    SplitMix64::seed_from_u64(state ^ word.rotate_left(17)).next_u64()
}

fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(master, 0x9e37_79b9_7f4a_7c15), |h, &w| mix(h, w))
}

/// A seedable pseudo-random stream. Cheap to construct.
#[derive(Debug, Clone)]
pub struct RandomStream(Xoshiro256PlusPlus);

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream(Xoshiro256PlusPlus::seed_from_u64(seed))
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Root of the key hierarchy for one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        SeedTree { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Seed tree of replicate `r` in an ensemble keyed by this tree's seed.
    pub fn replicate(&self, r: u64) -> SeedTree {
        SeedTree::new(derive(self.master, &[TAG_REPLICATE, r]))
    }

    /// Randomness owned by agent `index` while evaluating step `t -> t+1`.
    pub fn agent(&self, t: u64, index: u64) -> AgentRandomness {
        AgentRandomness {
            key: derive(self.master, &[TAG_STEP, t, index]),
        }
    }

    /// Stream used to build the initial population.
    pub fn init_stream(&self) -> RandomStream {
        RandomStream::from_seed(derive(self.master, &[TAG_INIT]))
    }

    /// Randomness for probe `index` of state `state` when estimating regions at time `t`.
    pub fn probe(&self, t: u64, state: u64, index: u64) -> AgentRandomness {
        AgentRandomness {
            key: derive(self.master, &[TAG_PROBE, t, state, index]),
        }
    }

    /// A free-standing stream for an arbitrary labelled purpose.
    pub fn stream(&self, path: &[u64]) -> RandomStream {
        RandomStream::from_seed(derive(self.master, path))
    }
}

/// Per-agent randomness for one rule evaluation. The transition and the
/// production rule of a model receive the same handle, so a model can make
/// them agree on shared decisions by reading the same channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentRandomness {
    key: u64,
}

impl AgentRandomness {
    pub fn from_key(key: u64) -> Self {
        AgentRandomness { key }
    }

    pub fn channel(&self, channel: u64) -> RandomStream {
        RandomStream::from_seed(mix(self.key, channel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_key_same_stream() {
        let tree = SeedTree::new(7);
        let mut a = tree.agent(3, 11).channel(1);
        let mut b = tree.agent(3, 11).channel(1);
        for _ in 0..4 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn keys_are_distinct() {
        let tree = SeedTree::new(7);
        let draws: Vec<u64> = [
            tree.agent(0, 0).channel(0),
            tree.agent(0, 1).channel(0),
            tree.agent(1, 0).channel(0),
            tree.agent(0, 0).channel(1),
            tree.probe(0, 0, 0).channel(0),
            tree.replicate(0).agent(0, 0).channel(0),
            tree.init_stream(),
        ]
        .into_iter()
        .map(|mut s| s.next_u64())
        .collect();
        for i in 0..draws.len() {
            for j in i + 1..draws.len() {
                assert_ne!(draws[i], draws[j], "streams {i} and {j} collide");
            }
        }
    }
}
