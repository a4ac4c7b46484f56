//! Desk-scale herding on a truncated iterative hash: birthday collisions on
//! the compression function, chained multicollisions, diamond structures and
//! prefix herding to a committed final hash.
//!
//! The compression function is the first `u` bits of the base hash applied
//! to the fixed-width big-endian encoding of (chaining value, block). At
//! 8..=32 bits everything the analysis predicts — collisions in about
//! 2^(u/2) tries, linking in about 2^u/w — is directly observable, which is
//! exactly why full-width diamonds stay out of reach. Every compression call
//! goes through an instrumented counter so reported costs are exact.
//!
//! Searches are single-threaded: identical seeds give identical structures.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{CryptoRng, Rng, RngCore};
use thiserror::Error;

use crate::hss::HashSpec;

/// Message block width in bits; blocks are `u64` values.
pub const BLOCK_BITS: u32 = 64;

const BLOCK_BYTES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HerdingError {
    #[error("chaining width must be even and within 8..=32 bits, got {0}")]
    InvalidWidth(u32),
    #[error("base hash for the demo chain must not itself be truncated")]
    TruncatedBase,
    #[error("initial value {iv:#x} does not fit in {u} bits")]
    InvalidIv { iv: u32, u: u32 },
    #[error("multicollision length must lie in 1..=20, got {0}")]
    BlockCountOutOfRange(u32),
    #[error("diamond width must be a power of two at most 64, got {0}")]
    InvalidDiamondWidth(usize),
    #[error("chaining width {u} exceeds {max} bits, the most the default budgets support")]
    WidthTooLargeForBudget { u: u32, max: u32 },
    #[error("search budget of {budget} compression calls exceeded")]
    BudgetExceeded { budget: u64 },
}

/// An iterative hash whose chaining values and output are truncated to `u`
/// bits. Compression calls are counted exactly.
#[derive(Debug)]
pub struct TruncatedIterativeHash {
    base: HashSpec,
    u: u32,
    iv: u32,
    calls: AtomicU64,
}

impl TruncatedIterativeHash {
    pub fn new(base: HashSpec, u: u32, iv: u32) -> Result<Self, HerdingError> {
        if !(8..=32).contains(&u) || !u.is_multiple_of(2) {
            return Err(HerdingError::InvalidWidth(u));
        }
        if base.truncation_bits().is_some() {
            return Err(HerdingError::TruncatedBase);
        }
        let hash = TruncatedIterativeHash {
            base,
            u,
            iv: 0,
            calls: AtomicU64::new(0),
        };
        if u64::from(iv) > u64::from(hash.max_value()) {
            return Err(HerdingError::InvalidIv { iv, u });
        }
        Ok(TruncatedIterativeHash { iv, ..hash })
    }

    /// Default demo instance: SHA-256 underneath, all-zero IV.
    pub fn demo(u: u32) -> Result<Self, HerdingError> {
        TruncatedIterativeHash::new(HashSpec::sha256(), u, 0)
    }

    pub fn width_bits(&self) -> u32 {
        self.u
    }

    pub fn iv(&self) -> u32 {
        self.iv
    }

    pub fn max_value(&self) -> u32 {
        (((1u64) << self.u) - 1) as u32
    }

    /// One compression step: the first `u` bits of the base hash over the
    /// 12-byte big-endian encoding of (chaining value, block).
    pub fn compress(&self, chaining: u32, block: u64) -> u32 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut input = [0u8; 4 + BLOCK_BYTES];
        input[..4].copy_from_slice(&chaining.to_be_bytes());
        input[4..].copy_from_slice(&block.to_be_bytes());
        let digest = self.base.digest(&input);
        let word = u32::from_be_bytes([digest[0], digest[1], digest[2], digest[3]]);
        word >> (32 - self.u)
    }

    /// Iterates the compression function over `blocks` starting from
    /// `chaining`.
    pub fn iterate(&self, chaining: u32, blocks: &[u64]) -> u32 {
        blocks.iter().fold(chaining, |h, m| self.compress(h, *m))
    }

    /// Full message hash: iteration from the IV.
    pub fn hash_blocks(&self, blocks: &[u64]) -> u32 {
        self.iterate(self.iv, blocks)
    }

    pub fn compression_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

/// Splits a byte prefix into 64-bit blocks, zero-filling the final partial
/// block. The demo chain has no length strengthening, so this is the whole
/// story.
pub fn prefix_blocks(prefix: &[u8]) -> Vec<u64> {
    prefix
        .chunks(BLOCK_BYTES)
        .map(|chunk| {
            let mut buf = [0u8; BLOCK_BYTES];
            buf[..chunk.len()].copy_from_slice(chunk);
            u64::from_be_bytes(buf)
        })
        .collect()
}

/// Two distinct blocks that compress to the same value from a common
/// chaining value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionPair {
    pub chaining_in: u32,
    pub block_a: u64,
    pub block_b: u64,
    pub chaining_out: u32,
}

impl CollisionPair {
    /// Re-checks the defining equalities by direct evaluation.
    pub fn verify(&self, hash: &TruncatedIterativeHash) -> bool {
        self.block_a != self.block_b
            && hash.compress(self.chaining_in, self.block_a) == self.chaining_out
            && hash.compress(self.chaining_in, self.block_b) == self.chaining_out
    }
}

fn collision_budget(u: u32) -> u64 {
    64u64 << (u / 2)
}

fn linking_budget(u: u32, w: usize) -> u64 {
    (64u64 << u) / w as u64
}

/// Birthday search for a same-chaining-value collision. Returns the pair and
/// the number of compression calls spent. Memory grows to roughly 2^(u/2)
/// table entries, matching the classic analysis.
pub fn find_collision<R: RngCore + CryptoRng>(
    chaining_in: u32,
    hash: &TruncatedIterativeHash,
    rng: &mut R,
) -> Result<(CollisionPair, u64), HerdingError> {
    find_collision_budgeted(chaining_in, hash, rng, collision_budget(hash.width_bits()))
}

fn find_collision_budgeted<R: RngCore + CryptoRng>(
    chaining_in: u32,
    hash: &TruncatedIterativeHash,
    rng: &mut R,
    budget: u64,
) -> Result<(CollisionPair, u64), HerdingError> {
    let mut seen: HashMap<u32, u64> = HashMap::new();
    let mut calls = 0u64;
    while calls < budget {
        let block: u64 = rng.random();
        let out = hash.compress(chaining_in, block);
        calls += 1;
        match seen.get(&out) {
            Some(&other) if other != block => {
                return Ok((
                    CollisionPair {
                        chaining_in,
                        block_a: other,
                        block_b: block,
                        chaining_out: out,
                    },
                    calls,
                ));
            }
            Some(_) => {}
            None => {
                seen.insert(out, block);
            }
        }
    }
    Err(HerdingError::BudgetExceeded { budget })
}

/// `b` chained collision pairs encoding 2^b equal-hash messages.
#[derive(Debug, Clone)]
pub struct Multicollision {
    start: u32,
    pairs: Vec<CollisionPair>,
    compression_calls: u64,
}

impl Multicollision {
    pub fn pairs(&self) -> &[CollisionPair] {
        &self.pairs
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    /// The common truncated hash of every enumerated message.
    pub fn final_hash(&self) -> u32 {
        self.pairs.last().expect("at least one pair").chaining_out
    }

    pub fn message_count(&self) -> u64 {
        1u64 << self.pairs.len()
    }

    pub fn compression_calls(&self) -> u64 {
        self.compression_calls
    }

    /// Message number `index`: bit `i` of `index` picks which block of pair
    /// `i` to use.
    pub fn message(&self, index: u64) -> Vec<u64> {
        debug_assert!(index < self.message_count());
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, pair)| {
                if index >> i & 1 == 0 {
                    pair.block_a
                } else {
                    pair.block_b
                }
            })
            .collect()
    }

    /// Lazily enumerates all 2^b messages.
    pub fn enumerate(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.message_count()).map(|i| self.message(i))
    }
}

/// Builds a 2^b multicollision from `b` chained birthday collisions,
/// starting at the hash's IV.
pub fn build_multicollision<R: RngCore + CryptoRng>(
    b: u32,
    hash: &TruncatedIterativeHash,
    rng: &mut R,
) -> Result<Multicollision, HerdingError> {
    if !(1..=20).contains(&b) {
        return Err(HerdingError::BlockCountOutOfRange(b));
    }
    let start = hash.iv();
    let mut chaining = start;
    let mut pairs = Vec::with_capacity(b as usize);
    let mut total_calls = 0u64;
    for _ in 0..b {
        let (pair, calls) = find_collision(chaining, hash, rng)?;
        chaining = pair.chaining_out;
        total_calls += calls;
        pairs.push(pair);
    }
    Ok(Multicollision {
        start,
        pairs,
        compression_calls: total_calls,
    })
}

/// A committed funnel: level 0 holds `w` leaf chaining values, every level
/// halves by linking adjacent nodes to a common parent, and all leaves reach
/// the single final hash.
#[derive(Debug, Clone)]
pub struct DiamondStructure {
    levels: Vec<Vec<u32>>,
    // blocks[l][j] maps levels[l][j] to levels[l+1][j/2]
    blocks: Vec<Vec<u64>>,
    compression_calls: u64,
}

impl DiamondStructure {
    pub fn width(&self) -> usize {
        self.levels[0].len()
    }

    /// log2(width) + 1 levels, the last holding only the final hash.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<u32>] {
        &self.levels
    }

    pub fn linking_blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    /// The committed value everything herds to.
    pub fn final_hash(&self) -> u32 {
        self.levels.last().expect("at least one level")[0]
    }

    pub fn compression_calls(&self) -> u64 {
        self.compression_calls
    }

    pub fn leaf_index(&self, chaining: u32) -> Option<usize> {
        self.levels[0].iter().position(|h| *h == chaining)
    }

    /// The suffix blocks that walk a leaf up to the final hash.
    pub fn path_blocks(&self, leaf: usize) -> Vec<u64> {
        let mut node = leaf;
        let mut path = Vec::with_capacity(self.blocks.len());
        for level in &self.blocks {
            path.push(level[node]);
            node /= 2;
        }
        path
    }

    /// Replays every leaf-to-root path through the compression function;
    /// no trust in construction bookkeeping.
    pub fn verify(&self, hash: &TruncatedIterativeHash) -> bool {
        if self.levels.len() != self.width().trailing_zeros() as usize + 1
            || !self.width().is_power_of_two()
        {
            return false;
        }
        let final_hash = self.final_hash();
        (0..self.width()).all(|leaf| {
            hash.iterate(self.levels[0][leaf], &self.path_blocks(leaf)) == final_hash
        })
    }
}

/// Builds a `w`-wide diamond over random distinct leaves. Each merge is a
/// two-table birthday search for blocks taking both neighbors to a common
/// value. Default budgets cap `u` at 24 bits.
pub fn build_diamond<R: RngCore + CryptoRng>(
    w: usize,
    hash: &TruncatedIterativeHash,
    rng: &mut R,
) -> Result<DiamondStructure, HerdingError> {
    if !w.is_power_of_two() || w == 0 || w > 64 {
        return Err(HerdingError::InvalidDiamondWidth(w));
    }
    let u = hash.width_bits();
    if u > 24 {
        return Err(HerdingError::WidthTooLargeForBudget { u, max: 24 });
    }

    let mut leaves = Vec::with_capacity(w);
    while leaves.len() < w {
        let candidate = rng.random_range(0..=hash.max_value());
        if !leaves.contains(&candidate) {
            leaves.push(candidate);
        }
    }

    let mut levels = vec![leaves];
    let mut blocks = Vec::new();
    let mut total_calls = 0u64;
    while levels.last().expect("non-empty").len() > 1 {
        let current = levels.last().expect("non-empty").clone();
        let mut next = Vec::with_capacity(current.len() / 2);
        let mut level_blocks = vec![0u64; current.len()];
        for (pair_index, pair) in current.chunks(2).enumerate() {
            let (block_a, block_b, parent, calls) =
                merge_pair(pair[0], pair[1], hash, rng, collision_budget(u))?;
            level_blocks[2 * pair_index] = block_a;
            level_blocks[2 * pair_index + 1] = block_b;
            next.push(parent);
            total_calls += calls;
        }
        blocks.push(level_blocks);
        levels.push(next);
    }

    Ok(DiamondStructure {
        levels,
        blocks,
        compression_calls: total_calls,
    })
}

/// Finds blocks `(m_a, m_b)` with `C(h_a, m_a) = C(h_b, m_b)` by sampling
/// both sides alternately and checking for cross hits.
fn merge_pair<R: RngCore + CryptoRng>(
    h_a: u32,
    h_b: u32,
    hash: &TruncatedIterativeHash,
    rng: &mut R,
    budget: u64,
) -> Result<(u64, u64, u32, u64), HerdingError> {
    let mut from_a: HashMap<u32, u64> = HashMap::new();
    let mut from_b: HashMap<u32, u64> = HashMap::new();
    let mut calls = 0u64;
    while calls < budget {
        let block: u64 = rng.random();
        let out_a = hash.compress(h_a, block);
        calls += 1;
        if let Some(&other) = from_b.get(&out_a) {
            return Ok((block, other, out_a, calls));
        }
        from_a.entry(out_a).or_insert(block);

        let block: u64 = rng.random();
        let out_b = hash.compress(h_b, block);
        calls += 1;
        if let Some(&other) = from_a.get(&out_b) {
            return Ok((other, block, out_b, calls));
        }
        from_b.entry(out_b).or_insert(block);
    }
    Err(HerdingError::BudgetExceeded { budget })
}

/// A message `prefix || linking block || suffix` whose truncated hash equals
/// a diamond's committed final hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerdedMessage {
    pub prefix: Vec<u8>,
    pub linking_block: u64,
    pub suffix: Vec<u64>,
}

impl HerdedMessage {
    /// The full block sequence of the message.
    pub fn block_sequence(&self) -> Vec<u64> {
        let mut blocks = prefix_blocks(&self.prefix);
        blocks.push(self.linking_block);
        blocks.extend_from_slice(&self.suffix);
        blocks
    }

    /// Independent replay: hash the whole block sequence from the IV and
    /// compare with the committed value.
    pub fn verify(&self, hash: &TruncatedIterativeHash, committed: u32) -> bool {
        hash.hash_blocks(&self.block_sequence()) == committed
    }
}

/// Herds an arbitrary prefix into the diamond: searches for a linking block
/// taking the prefix's chaining value to some leaf, then appends that leaf's
/// stored path. Expected cost is about 2^u / w trials; the budget allows
/// 64 times that. Returns the message and the linking trials spent.
pub fn herd_prefix<R: RngCore + CryptoRng>(
    prefix: &[u8],
    diamond: &DiamondStructure,
    hash: &TruncatedIterativeHash,
    rng: &mut R,
) -> Result<(HerdedMessage, u64), HerdingError> {
    let budget = linking_budget(hash.width_bits(), diamond.width());
    herd_prefix_budgeted(prefix, diamond, hash, rng, budget)
}

fn herd_prefix_budgeted<R: RngCore + CryptoRng>(
    prefix: &[u8],
    diamond: &DiamondStructure,
    hash: &TruncatedIterativeHash,
    rng: &mut R,
    budget: u64,
) -> Result<(HerdedMessage, u64), HerdingError> {
    let chaining = hash.hash_blocks(&prefix_blocks(prefix));
    let leaf_of: HashMap<u32, usize> = diamond.levels()[0]
        .iter()
        .enumerate()
        .map(|(i, h)| (*h, i))
        .collect();
    let mut calls = 0u64;
    while calls < budget {
        let block: u64 = rng.random();
        let out = hash.compress(chaining, block);
        calls += 1;
        if let Some(&leaf) = leaf_of.get(&out) {
            let message = HerdedMessage {
                prefix: prefix.to_vec(),
                linking_block: block,
                suffix: diamond.path_blocks(leaf),
            };
            return Ok((message, calls));
        }
    }
    Err(HerdingError::BudgetExceeded { budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn demo16() -> TruncatedIterativeHash {
        TruncatedIterativeHash::demo(16).unwrap()
    }

    #[test]
    fn construction_validates_width_and_iv() {
        assert!(TruncatedIterativeHash::demo(16).is_ok());
        assert!(TruncatedIterativeHash::demo(10).is_ok());
        assert!(matches!(
            TruncatedIterativeHash::demo(7).unwrap_err(),
            HerdingError::InvalidWidth(7)
        ));
        assert!(TruncatedIterativeHash::demo(34).is_err());
        assert!(TruncatedIterativeHash::new(HashSpec::sha256(), 8, 0x100).is_err());
        let truncated_base =
            HashSpec::truncated(crate::hss::HashAlgorithm::Sha256, 16).unwrap();
        assert_eq!(
            TruncatedIterativeHash::new(truncated_base, 16, 0).unwrap_err(),
            HerdingError::TruncatedBase
        );
    }

    #[test]
    fn compression_is_deterministic_and_counted() {
        let hash = demo16();
        let a = hash.compress(0x1234, 99);
        let b = hash.compress(0x1234, 99);
        assert_eq!(a, b);
        assert!(a <= hash.max_value());
        assert_eq!(hash.compression_calls(), 2);
        hash.reset_calls();
        assert_eq!(hash.compression_calls(), 0);
    }

    #[test]
    fn iterate_chains_blocks() {
        let hash = demo16();
        let h1 = hash.compress(hash.iv(), 1);
        let h2 = hash.compress(h1, 2);
        assert_eq!(hash.hash_blocks(&[1, 2]), h2);
    }

    #[test]
    fn prefix_blocks_pad_the_tail() {
        assert_eq!(prefix_blocks(b""), Vec::<u64>::new());
        assert_eq!(prefix_blocks(&[1]), vec![0x0100_0000_0000_0000]);
        assert_eq!(
            prefix_blocks(&[0, 0, 0, 0, 0, 0, 0, 2, 3]),
            vec![2, 0x0300_0000_0000_0000]
        );
    }

    #[test]
    fn collision_pair_verifies_and_stays_within_budget() {
        let hash = demo16();
        let (pair, calls) = find_collision(hash.iv(), &hash, &mut rng(1)).unwrap();
        assert!(pair.verify(&hash));
        assert!(calls < 64 << 8, "calls = {calls}");
    }

    #[test]
    fn collision_search_is_seed_deterministic() {
        let hash = demo16();
        let (a, _) = find_collision(7, &hash, &mut rng(5)).unwrap();
        let (b, _) = find_collision(7, &hash, &mut rng(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn collision_search_reports_budget_exhaustion() {
        let hash = demo16();
        assert_eq!(
            find_collision_budgeted(0, &hash, &mut rng(0), 1).unwrap_err(),
            HerdingError::BudgetExceeded { budget: 1 }
        );
    }

    #[test]
    fn multicollision_b3_yields_eight_distinct_messages() {
        let hash = demo16();
        let multi = build_multicollision(3, &hash, &mut rng(2)).unwrap();
        let messages: Vec<Vec<u64>> = multi.enumerate().collect();
        assert_eq!(messages.len(), 8);
        for (i, a) in messages.iter().enumerate() {
            for b in &messages[i + 1..] {
                assert_ne!(a, b);
            }
        }
        let final_hash = multi.final_hash();
        for message in &messages {
            assert_eq!(hash.hash_blocks(message), final_hash);
        }
    }

    #[test]
    fn multicollision_base_case_is_the_pair() {
        let hash = demo16();
        let multi = build_multicollision(1, &hash, &mut rng(3)).unwrap();
        let messages: Vec<Vec<u64>> = multi.enumerate().collect();
        let pair = multi.pairs()[0];
        assert_eq!(messages, vec![vec![pair.block_a], vec![pair.block_b]]);
    }

    #[test]
    fn multicollision_b4_all_verified_independently() {
        let hash = demo16();
        let multi = build_multicollision(4, &hash, &mut rng(4)).unwrap();
        assert_eq!(multi.message_count(), 16);
        let final_hash = multi.final_hash();
        for message in multi.enumerate() {
            // independent iteration, not the bookkeeping
            let mut h = hash.iv();
            for block in &message {
                h = hash.compress(h, *block);
            }
            assert_eq!(h, final_hash);
        }
    }

    #[test]
    fn multicollision_validates_b() {
        let hash = demo16();
        assert!(build_multicollision(0, &hash, &mut rng(0)).is_err());
        assert!(build_multicollision(21, &hash, &mut rng(0)).is_err());
    }

    #[test]
    fn diamond_w4_has_three_levels_and_verifies() {
        let hash = demo16();
        let diamond = build_diamond(4, &hash, &mut rng(6)).unwrap();
        assert_eq!(diamond.width(), 4);
        assert_eq!(diamond.level_count(), 3);
        assert!(diamond.verify(&hash));
    }

    #[test]
    fn diamond_w1_is_a_degenerate_chain() {
        let hash = demo16();
        let diamond = build_diamond(1, &hash, &mut rng(7)).unwrap();
        assert_eq!(diamond.level_count(), 1);
        assert_eq!(diamond.final_hash(), diamond.levels()[0][0]);
        assert!(diamond.verify(&hash));
    }

    #[test]
    fn diamond_w8_paths_replay_independently() {
        let hash = demo16();
        let diamond = build_diamond(8, &hash, &mut rng(8)).unwrap();
        for leaf in 0..8 {
            let mut h = diamond.levels()[0][leaf];
            for block in diamond.path_blocks(leaf) {
                h = hash.compress(h, block);
            }
            assert_eq!(h, diamond.final_hash());
        }
    }

    #[test]
    fn diamond_validates_width() {
        let hash = demo16();
        assert!(build_diamond(3, &hash, &mut rng(0)).is_err());
        assert!(build_diamond(128, &hash, &mut rng(0)).is_err());
        let wide = TruncatedIterativeHash::demo(26).unwrap();
        assert_eq!(
            build_diamond(4, &wide, &mut rng(0)).unwrap_err(),
            HerdingError::WidthTooLargeForBudget { u: 26, max: 24 }
        );
    }

    #[test]
    fn herded_prefixes_reach_the_committed_hash() {
        let hash = demo16();
        let diamond = build_diamond(4, &hash, &mut rng(9)).unwrap();
        let committed = diamond.final_hash();
        let (first, _) = herd_prefix(b"the claimed outcome", &diamond, &hash, &mut rng(10)).unwrap();
        assert!(first.verify(&hash, committed));
        let (second, _) =
            herd_prefix(b"a different outcome entirely", &diamond, &hash, &mut rng(11)).unwrap();
        assert!(second.verify(&hash, committed));
        assert_ne!(first.prefix, second.prefix);
        // empty prefix also herds (linking block straight from the IV)
        let (empty, _) = herd_prefix(b"", &diamond, &hash, &mut rng(12)).unwrap();
        assert!(empty.verify(&hash, committed));
    }

    #[test]
    fn herding_reports_budget_exhaustion() {
        let hash = demo16();
        let diamond = build_diamond(4, &hash, &mut rng(13)).unwrap();
        assert_eq!(
            herd_prefix_budgeted(b"prefix", &diamond, &hash, &mut rng(14), 1).unwrap_err(),
            HerdingError::BudgetExceeded { budget: 1 }
        );
        // default budgets
        assert_eq!(linking_budget(16, 4), (64 << 16) / 4);
        assert_eq!(collision_budget(16), 64 << 8);
    }

    #[test]
    fn reported_costs_match_the_instrumented_counter() {
        let hash = demo16();
        hash.reset_calls();
        let multi = build_multicollision(3, &hash, &mut rng(30)).unwrap();
        assert_eq!(hash.compression_calls(), multi.compression_calls());

        hash.reset_calls();
        let diamond = build_diamond(4, &hash, &mut rng(31)).unwrap();
        assert_eq!(hash.compression_calls(), diamond.compression_calls());

        hash.reset_calls();
        let (_, linking_calls) = herd_prefix(b"abc", &diamond, &hash, &mut rng(32)).unwrap();
        // herding also absorbs the prefix (one block here) before searching
        assert_eq!(hash.compression_calls(), linking_calls + 1);
    }

    #[test]
    fn seed_determinism_end_to_end() {
        let hash_a = demo16();
        let da = build_diamond(4, &hash_a, &mut rng(20)).unwrap();
        let (ma, ca) = herd_prefix(b"same seed", &da, &hash_a, &mut rng(21)).unwrap();
        let hash_b = demo16();
        let db = build_diamond(4, &hash_b, &mut rng(20)).unwrap();
        let (mb, cb) = herd_prefix(b"same seed", &db, &hash_b, &mut rng(21)).unwrap();
        assert_eq!(da.levels(), db.levels());
        assert_eq!(da.linking_blocks(), db.linking_blocks());
        assert_eq!(ma, mb);
        assert_eq!(ca, cb);
    }
}
