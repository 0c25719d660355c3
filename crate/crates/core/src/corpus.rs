//! Seeded random corpora: sample, encode, decode and account for many trees.
//!
//! Trial `i` uses seed `base_seed + i` (wrapping), so results do not depend
//! on how trials are scheduled, and come back ordered by trial index.

use serde::Serialize;

use crate::codec::{self, Accounting};
use crate::error::Result;
use crate::par::{self, Execution};
use crate::tree::{compute_stats, Sampler, TreeClass, TreeStats};

/// Per-node rate the encoding is expected to stay under.
pub fn rate_ceiling(class: TreeClass) -> f64 {
    match class {
        TreeClass::Avl => 0.99933,
        TreeClass::Llavl => 0.5912,
    }
}

/// Total size budget in bits for one tree: the per-node ceiling plus
/// `12 log2 n + 64` bits for the header, smoothing and coder flush.
pub fn size_budget(class: TreeClass, n: u64) -> f64 {
    rate_ceiling(class) * n as f64 + 12.0 * (n as f64).log2() + 64.0
}

#[derive(Clone, Debug, Serialize)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub stats: TreeStats,
    pub accounting: Accounting,
    /// Whether decoding the encoded bytes gave back the sampled tree.
    pub round_trip: bool,
}

impl Trial {
    pub fn within_budget(&self, class: TreeClass) -> bool {
        (self.accounting.total_bits() as f64) <= size_budget(class, self.stats.n)
    }
}

pub fn run_trial(sampler: &Sampler, n: usize, index: usize, base_seed: u64) -> Result<Trial> {
    let seed = base_seed.wrapping_add(index as u64);
    let tree = sampler.sample(n, seed)?;
    let enc = codec::encode(&tree)?;
    let round_trip = codec::decode_bytes(&enc.to_bytes()).is_ok_and(|t| t == tree);
    Ok(Trial { index, seed, stats: compute_stats(&tree), accounting: enc.accounting, round_trip })
}

pub fn run_corpus(sampler: &Sampler, n: usize, trials: usize, base_seed: u64, exec: Execution) -> Result<Vec<Trial>> {
    par::try_map_range(0..trials, exec, |i| run_trial(sampler, n, i, base_seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub min_bits_per_node: f64,
    pub mean_bits_per_node: f64,
    pub max_bits_per_node: f64,
    pub mean_alpha: f64,
    pub all_round_trip: bool,
}

pub fn summarize(trials: &[Trial]) -> Option<Summary> {
    if trials.is_empty() {
        return None;
    }
    let bpn = trials.iter().map(|t| t.accounting.bits_per_node);
    let k = trials.len() as f64;
    Some(Summary {
        trials: trials.len(),
        min_bits_per_node: bpn.clone().fold(f64::INFINITY, f64::min),
        mean_bits_per_node: bpn.clone().sum::<f64>() / k,
        max_bits_per_node: bpn.fold(f64::NEG_INFINITY, f64::max),
        mean_alpha: trials.iter().map(|t| t.stats.a as f64 / t.stats.n as f64).sum::<f64>() / k,
        all_round_trip: trials.iter().all(|t| t.round_trip),
    })
}
