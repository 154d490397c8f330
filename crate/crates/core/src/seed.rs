//! Seed derivation and the benchmark PRNG.
//!
//! Every graph is generated from its own 64-bit seed, derived from the master
//! seed by hashing `(domain, master_seed, task, bucket, index)` with SHA-256.
//! The seed keys a ChaCha8 stream (`rand_chacha`), and all sampling goes
//! through the helpers on [`BenchRng`], which only consume `next_u64`. That
//! keeps regenerated datasets byte-identical regardless of how the `rand`
//! distribution code evolves.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::task::{Bucket, Task};

const INSTANCE_DOMAIN: &[u8] = b"graphbench/instance/v1";
const EXEMPLAR_DOMAIN: &[u8] = b"graphbench/exemplar/v1";
const STREAM_DOMAIN: &[u8] = b"graphbench/stream/v1";

fn hash_seed(domain: &[u8], master_seed: u64, task: Task, bucket: Bucket, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(domain);
    h.update([0]);
    h.update(master_seed.to_le_bytes());
    h.update(task.name().as_bytes());
    h.update([0]);
    h.update(bucket.name().as_bytes());
    h.update([0]);
    h.update(index.to_le_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest is 32 bytes"))
}

/// Child seed for graph `index` of one `(task, bucket)` cell.
pub fn derive_instance_seed(master_seed: u64, task: Task, bucket: Bucket, index: u64) -> u64 {
    hash_seed(INSTANCE_DOMAIN, master_seed, task, bucket, index)
}

/// Child seed for the `index`-th few-shot exemplar. Uses a separate hash
/// domain, so exemplar seeds never coincide with evaluation seeds.
pub fn derive_exemplar_seed(exemplar_seed: u64, task: Task, bucket: Bucket, index: u64) -> u64 {
    hash_seed(EXEMPLAR_DOMAIN, exemplar_seed, task, bucket, index)
}

/// Deterministic random stream keyed by a 64-bit seed.
#[derive(Debug, Clone)]
pub struct BenchRng(ChaCha8Rng);

impl BenchRng {
    pub fn from_seed(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(STREAM_DOMAIN);
        h.update(seed.to_le_bytes());
        BenchRng(ChaCha8Rng::from_seed(h.finalize().into()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`, unbiased (rejection on the top of the range).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn inclusive(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        lo + self.below((hi - lo) as u64 + 1) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `k` distinct items drawn without replacement, in draw order.
    pub fn sample<T: Clone>(&mut self, items: &[T], k: usize) -> Vec<T> {
        assert!(k <= items.len());
        let mut pool = items.to_vec();
        for i in 0..k {
            let j = i + self.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
