//! Shingling, MinHash sketches, and locality-sensitive hashing.
//!
//! Token sequences are shingled into sets of 64-bit window digests, sketched
//! into MinHash signatures, and indexed by banding the signatures so that
//! similar sketches collide in at least one bucket. Everything is seeded and
//! deterministic: the same params and input always produce the same
//! signatures, buckets, and estimates, on every platform.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

/// Marks a signature slot that no shingle has touched: the sketch of the
/// empty set holds this in every position. Real hash outputs are clamped
/// strictly below it.
pub const SENTINEL: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum LshError {
    #[error("signature widths differ: {left} vs {right}")]
    BadShape { left: usize, right: usize },
    #[error("bands ({bands}) x rows ({rows}) must equal the signature width ({num_hashes})")]
    BadBanding { bands: usize, rows: usize, num_hashes: usize },
    #[error("{what} must be at least 1")]
    ZeroParam { what: &'static str },
}

/// Sketching and banding parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinHashParams {
    /// Signature width (number of hash functions).
    pub num_hashes: usize,
    /// Shingle window length in tokens.
    pub shingle_k: usize,
    /// Number of LSH bands.
    pub bands: usize,
    /// Rows (signature positions) per band.
    pub rows: usize,
    /// Seed for the hash family.
    pub seed: u64,
}

impl Default for MinHashParams {
    fn default() -> Self {
        MinHashParams { num_hashes: 256, shingle_k: 5, bands: 32, rows: 8, seed: 1 }
    }
}

impl MinHashParams {
    pub fn validate(&self) -> Result<(), LshError> {
        for (value, what) in [
            (self.num_hashes, "signature width"),
            (self.shingle_k, "shingle window"),
            (self.bands, "band count"),
            (self.rows, "rows per band"),
        ] {
            if value == 0 {
                return Err(LshError::ZeroParam { what });
            }
        }
        if self.bands * self.rows != self.num_hashes {
            return Err(LshError::BadBanding {
                bands: self.bands,
                rows: self.rows,
                num_hashes: self.num_hashes,
            });
        }
        Ok(())
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    mix64(*state)
}

/// Stateless 64-bit finalizer with full avalanche.
fn mix64(x: u64) -> u64 {
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const ROLL_BASE: u64 = 0x0000_0100_0000_01b3;

/// The set of 64-bit digests of every `k`-token window of `tokens`,
/// computed with a polynomial rolling hash (O(1) per slide) and a final
/// mixing step. Sequences shorter than `k` — the empty sequence included —
/// contribute the single digest of the whole sequence.
pub fn shingles(tokens: &[u32], k: usize) -> HashSet<u64> {
    assert!(k >= 1, "shingle window must be at least 1");
    let mut out = HashSet::new();
    if tokens.len() < k {
        let mut h = 0u64;
        for &t in tokens {
            h = h.wrapping_mul(ROLL_BASE).wrapping_add(u64::from(t));
        }
        out.insert(mix64(h));
        return out;
    }
    // top = ROLL_BASE^(k-1), the weight of the outgoing token.
    let mut top = 1u64;
    for _ in 1..k {
        top = top.wrapping_mul(ROLL_BASE);
    }
    let mut h = 0u64;
    for &t in &tokens[..k] {
        h = h.wrapping_mul(ROLL_BASE).wrapping_add(u64::from(t));
    }
    out.insert(mix64(h));
    for i in k..tokens.len() {
        let outgoing = u64::from(tokens[i - k]).wrapping_mul(top);
        h = h.wrapping_sub(outgoing).wrapping_mul(ROLL_BASE).wrapping_add(u64::from(tokens[i]));
        out.insert(mix64(h));
    }
    out
}

/// A MinHash sketch. Position `i` holds the minimum of hash function `i`
/// over the represented set, or [`SENTINEL`] when the set is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashSignature {
    components: Vec<u64>,
}

impl MinHashSignature {
    /// The sketch of the empty set: all positions at [`SENTINEL`].
    pub fn empty(width: usize) -> Self {
        MinHashSignature { components: vec![SENTINEL; width] }
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn width(&self) -> usize {
        self.components.len()
    }
}

/// The seeded hash family: strongly universal multiply-shift over 64-bit
/// inputs, using 128-bit multipliers and keeping the high output word.
struct HashFamily {
    mults: Vec<u128>,
    adds: Vec<u128>,
}

impl HashFamily {
    fn new(num_hashes: usize, seed: u64) -> Self {
        let mut state = seed;
        let mut draw128 = || {
            let hi = u128::from(splitmix64(&mut state));
            let lo = u128::from(splitmix64(&mut state));
            (hi << 64) | lo
        };
        let mut mults = Vec::with_capacity(num_hashes);
        let mut adds = Vec::with_capacity(num_hashes);
        for _ in 0..num_hashes {
            mults.push(draw128() | 1);
            adds.push(draw128());
        }
        HashFamily { mults, adds }
    }

    #[inline]
    fn apply(&self, i: usize, x: u64) -> u64 {
        let product = self.mults[i].wrapping_mul(u128::from(x)).wrapping_add(self.adds[i]);
        let h = (product >> 64) as u64;
        // Keep real outputs below the empty-slot marker.
        if h == SENTINEL {
            SENTINEL - 1
        } else {
            h
        }
    }
}

/// Sketches a shingle set under the family selected by `params.seed`.
pub fn minhash_signature(set: &HashSet<u64>, params: &MinHashParams) -> Result<MinHashSignature, LshError> {
    params.validate()?;
    let family = HashFamily::new(params.num_hashes, params.seed);
    let mut components = vec![SENTINEL; params.num_hashes];
    for &shingle in set {
        for (i, slot) in components.iter_mut().enumerate() {
            let h = family.apply(i, shingle);
            if h < *slot {
                *slot = h;
            }
        }
    }
    Ok(MinHashSignature { components })
}

/// Componentwise minimum: exactly the sketch the union of the underlying
/// sets would have produced.
pub fn update_signature(
    cumulative: &MinHashSignature,
    signature: &MinHashSignature,
) -> Result<MinHashSignature, LshError> {
    if cumulative.width() != signature.width() {
        return Err(LshError::BadShape { left: cumulative.width(), right: signature.width() });
    }
    let components = cumulative
        .components
        .iter()
        .zip(&signature.components)
        .map(|(&a, &b)| a.min(b))
        .collect();
    Ok(MinHashSignature { components })
}

/// Estimated Jaccard *distance*: one minus the fraction of positions where
/// the sketches agree on a real (non-sentinel) value.
pub fn jaccard_distance_est(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64, LshError> {
    if a.width() != b.width() {
        return Err(LshError::BadShape { left: a.width(), right: b.width() });
    }
    let equal = a
        .components
        .iter()
        .zip(&b.components)
        .filter(|(&x, &y)| x == y && x != SENTINEL)
        .count();
    Ok(1.0 - equal as f64 / a.width() as f64)
}

/// Banded index over a list of signatures. Entries are positions into the
/// indexed list; bucket membership keeps insertion order so iteration is
/// reproducible.
#[derive(Debug)]
pub struct LshIndex {
    bands: usize,
    rows: usize,
    width: usize,
    tables: Vec<HashMap<u64, Vec<usize>>>,
}

fn band_digest(components: &[u64]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &c in components {
        h = (h ^ c).wrapping_mul(ROLL_BASE);
    }
    mix64(h)
}

/// Groups signatures into per-band buckets keyed by the digest of the
/// band's rows.
pub fn lsh_buckets(signatures: &[MinHashSignature], params: &MinHashParams) -> Result<LshIndex, LshError> {
    params.validate()?;
    for s in signatures {
        if s.width() != params.num_hashes {
            return Err(LshError::BadShape { left: params.num_hashes, right: s.width() });
        }
    }
    let mut tables: Vec<HashMap<u64, Vec<usize>>> = vec![HashMap::new(); params.bands];
    for (position, signature) in signatures.iter().enumerate() {
        for (band, table) in tables.iter_mut().enumerate() {
            let start = band * params.rows;
            let digest = band_digest(&signature.components[start..start + params.rows]);
            table.entry(digest).or_default().push(position);
        }
    }
    Ok(LshIndex { bands: params.bands, rows: params.rows, width: params.num_hashes, tables })
}

/// Every indexed position sharing at least one band bucket with `query`.
/// The query itself is not excluded; callers filter as needed.
pub fn lsh_candidates(index: &LshIndex, query: &MinHashSignature) -> Result<HashSet<usize>, LshError> {
    if query.width() != index.width {
        return Err(LshError::BadShape { left: index.width, right: query.width() });
    }
    let mut out = HashSet::new();
    for band in 0..index.bands {
        let start = band * index.rows;
        let digest = band_digest(&query.components[start..start + index.rows]);
        if let Some(bucket) = index.tables[band].get(&digest) {
            out.extend(bucket.iter().copied());
        }
    }
    Ok(out)
}
