//! Test-ordering strategies.
//!
//! Two diversity-driven orderings — farthest-first selection over a
//! precomputed distance matrix, and an LSH-accelerated variant working on
//! MinHash sketches — plus coverage-greedy baselines (total and additional
//! with a stacking reset) and a seeded random shuffle. All strategies are
//! deterministic: ties always go to the lowest current index / input order.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::EncodedArtifact;
use crate::distance::SimilarityMatrix;
use crate::lsh::{
    jaccard_distance_est, lsh_buckets, lsh_candidates, minhash_signature, shingles,
    update_signature, LshError, MinHashParams, MinHashSignature,
};

#[derive(Debug, Error)]
pub enum PrioritizeError {
    #[error("cannot prioritise an empty similarity matrix")]
    EmptyMatrix,
    #[error("cannot prioritise an empty corpus")]
    EmptyCorpus,
    #[error("cannot prioritise an empty input")]
    EmptyInput,
    #[error("duplicate test identifier {id}")]
    DuplicateId { id: String },
    #[error(transparent)]
    Lsh(#[from] LshError),
    #[error("{path}:{line}: malformed coverage row: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Which strategy produced an ordering; the label appears in order files'
/// sidecar reports and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    LedruTcp,
    FastPw,
    GreedyTotal,
    GreedyAdditional,
    Random,
}

impl Approach {
    pub fn label(self) -> &'static str {
        match self {
            Approach::LedruTcp => "ledru",
            Approach::FastPw => "fast-pw",
            Approach::GreedyTotal => "greedy-total",
            Approach::GreedyAdditional => "greedy-additional",
            Approach::Random => "random",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A permutation of the corpus identifiers together with how long it took
/// to produce. `preparation_seconds` covers input construction (distance
/// matrix, signatures and buckets); `prioritisation_seconds` covers the
/// selection loop only. Strategies that receive prebuilt inputs report
/// preparation 0; callers that did the building may overwrite it.
#[derive(Debug, Clone, PartialEq)]
pub struct PrioritizedOrder {
    pub approach: Approach,
    pub ids: Vec<String>,
    pub preparation_seconds: f64,
    pub prioritisation_seconds: f64,
}

/// Farthest-first ordering over a distance matrix.
///
/// The first pick maximises the minimum distance to every *other* test
/// (self-distances are ignored — the diagonal is zero and would swallow
/// every minimum); each later pick maximises the minimum distance to the
/// already-selected set. Ties go to the lowest index.
pub fn ledru_prioritize(matrix: &SimilarityMatrix) -> Result<PrioritizedOrder, PrioritizeError> {
    let n = matrix.n();
    if n == 0 {
        return Err(PrioritizeError::EmptyMatrix);
    }
    let started = Instant::now();
    let mut order = Vec::with_capacity(n);
    let mut selected = vec![false; n];

    let mut first = 0usize;
    let mut first_min = u32::MAX; // n = 1: no other tests, index 0 wins vacuously
    for i in 0..n {
        let mut min_other = u32::MAX;
        for j in 0..n {
            if j != i {
                min_other = min_other.min(matrix.get(i, j));
            }
        }
        if i == 0 || min_other > first_min {
            first = i;
            first_min = min_other;
        }
    }
    selected[first] = true;
    order.push(first);

    // min_to_selected[j] only ever shrinks, so one compare per new pick
    // keeps it current.
    let mut min_to_selected: Vec<u32> = (0..n).map(|j| matrix.get(j, first)).collect();
    while order.len() < n {
        let mut pick = None;
        let mut pick_min = 0u32;
        for (j, &min_d) in min_to_selected.iter().enumerate() {
            if selected[j] {
                continue;
            }
            if pick.is_none() || min_d > pick_min {
                pick = Some(j);
                pick_min = min_d;
            }
        }
        let s = pick.expect("unselected test must remain");
        selected[s] = true;
        order.push(s);
        for (j, slot) in min_to_selected.iter_mut().enumerate() {
            if !selected[j] {
                *slot = (*slot).min(matrix.get(j, s));
            }
        }
    }

    Ok(PrioritizedOrder {
        approach: Approach::LedruTcp,
        ids: order.into_iter().map(|i| matrix.ids()[i].clone()).collect(),
        preparation_seconds: 0.0,
        prioritisation_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Sketch-based farthest-first ordering.
///
/// Preparation shingles every artefact, sketches the shingle sets, and
/// builds the banded index. The selection loop keeps a cumulative sketch of
/// everything picked so far; each step asks the index for tests similar to
/// it, prefers the complement of that candidate set, and takes the test
/// with the greatest estimated Jaccard distance from the cumulative sketch.
/// When the index returns no candidates the cumulative sketch is reset to
/// empty and the lookup retried once; when the complement is empty the
/// whole unpicked set is used instead. Both fallbacks keep the loop moving.
pub fn fast_pw(
    artifacts: &[EncodedArtifact],
    params: &MinHashParams,
) -> Result<PrioritizedOrder, PrioritizeError> {
    params.validate()?;
    if artifacts.is_empty() {
        return Err(PrioritizeError::EmptyCorpus);
    }
    let mut seen = HashSet::new();
    for artifact in artifacts {
        if !seen.insert(artifact.id.as_str()) {
            return Err(PrioritizeError::DuplicateId { id: artifact.id.clone() });
        }
    }

    let prep_started = Instant::now();
    let signatures = artifacts
        .iter()
        .map(|a| minhash_signature(&shingles(a.tokens(), params.shingle_k), params))
        .collect::<Result<Vec<_>, _>>()?;
    let index = lsh_buckets(&signatures, params)?;
    let preparation_seconds = prep_started.elapsed().as_secs_f64();

    let started = Instant::now();
    let n = artifacts.len();
    let mut selected = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cumulative = MinHashSignature::empty(params.num_hashes);
    while order.len() < n {
        let mut similar = lsh_candidates(&index, &cumulative)?;
        if similar.is_empty() {
            cumulative = MinHashSignature::empty(params.num_hashes);
            similar = lsh_candidates(&index, &cumulative)?;
        }
        let mut pool: Vec<usize> =
            (0..n).filter(|&i| !selected[i] && !similar.contains(&i)).collect();
        if pool.is_empty() {
            pool = (0..n).filter(|&i| !selected[i]).collect();
        }
        let mut pick = pool[0];
        let mut pick_d = jaccard_distance_est(&signatures[pick], &cumulative)?;
        for &c in &pool[1..] {
            let d = jaccard_distance_est(&signatures[c], &cumulative)?;
            if d > pick_d {
                pick = c;
                pick_d = d;
            }
        }
        selected[pick] = true;
        order.push(pick);
        cumulative = update_signature(&cumulative, &signatures[pick])?;
    }

    Ok(PrioritizedOrder {
        approach: Approach::FastPw,
        ids: order.into_iter().map(|i| artifacts[i].id.clone()).collect(),
        preparation_seconds,
        prioritisation_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Per-test sets of covered entity tokens (statements, branches — opaque
/// strings, interned to indices internally).
#[derive(Debug, Clone)]
pub struct CoverageMatrix {
    ids: Vec<String>,
    sets: Vec<HashSet<usize>>,
    entity_count: usize,
}

impl CoverageMatrix {
    /// Builds a matrix from `(test id, covered entities)` rows. Entity
    /// tokens are shared across rows; duplicate tokens within a row
    /// collapse.
    pub fn new(rows: Vec<(String, Vec<String>)>) -> Result<Self, PrioritizeError> {
        let mut ids = Vec::with_capacity(rows.len());
        let mut sets = Vec::with_capacity(rows.len());
        let mut seen = HashSet::new();
        let mut interned: HashMap<String, usize> = HashMap::new();
        for (id, entities) in rows {
            if !seen.insert(id.clone()) {
                return Err(PrioritizeError::DuplicateId { id });
            }
            let mut set = HashSet::new();
            for entity in entities {
                let next = interned.len();
                let index = *interned.entry(entity).or_insert(next);
                set.insert(index);
            }
            ids.push(id);
            sets.push(set);
        }
        let entity_count = interned.len();
        Ok(CoverageMatrix { ids, sets, entity_count })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Covered entities of test `i`, as interned indices in `0..entity_count`.
    pub fn set(&self, i: usize) -> &HashSet<usize> {
        &self.sets[i]
    }

    pub fn entity_count(&self) -> usize {
        self.entity_count
    }
}

/// Reads coverage rows of the form `test_id,entity1;entity2;...` (one row
/// per test, no header; an empty entity field means the test covers
/// nothing). Blank lines are skipped.
pub fn read_coverage_csv(path: &Path) -> Result<CoverageMatrix, PrioritizeError> {
    let raw = fs::read_to_string(path)
        .map_err(|source| PrioritizeError::Io { path: path.to_path_buf(), source })?;
    let mut rows = Vec::new();
    for (number, line) in raw.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let malformed = |reason: &str| PrioritizeError::Malformed {
            path: path.to_path_buf(),
            line: number + 1,
            reason: reason.to_string(),
        };
        let (id, entities) = line.split_once(',').ok_or_else(|| malformed("missing ','"))?;
        if id.is_empty() {
            return Err(malformed("empty test identifier"));
        }
        let tokens: Vec<String> =
            entities.split(';').filter(|t| !t.is_empty()).map(str::to_string).collect();
        rows.push((id.to_string(), tokens));
    }
    CoverageMatrix::new(rows)
}

/// Orders tests by covered-set size, largest first; equal sizes keep their
/// input order.
pub fn greedy_total(cov: &CoverageMatrix) -> Result<PrioritizedOrder, PrioritizeError> {
    if cov.n() == 0 {
        return Err(PrioritizeError::EmptyInput);
    }
    let started = Instant::now();
    let mut indices: Vec<usize> = (0..cov.n()).collect();
    indices.sort_by(|&a, &b| cov.sets[b].len().cmp(&cov.sets[a].len()));
    Ok(PrioritizedOrder {
        approach: Approach::GreedyTotal,
        ids: indices.into_iter().map(|i| cov.ids[i].clone()).collect(),
        preparation_seconds: 0.0,
        prioritisation_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Repeatedly picks the test covering the most not-yet-covered entities
/// (ties to input order). When nothing remaining adds coverage, the covered
/// set is cleared and selection continues — the stacking reset — so fully
/// redundant tests are themselves ordered by how much they would re-cover.
pub fn greedy_additional(cov: &CoverageMatrix) -> Result<PrioritizedOrder, PrioritizeError> {
    if cov.n() == 0 {
        return Err(PrioritizeError::EmptyInput);
    }
    let started = Instant::now();
    let mut covered: HashSet<usize> = HashSet::new();
    let mut remaining: Vec<usize> = (0..cov.n()).collect();
    let mut order = Vec::with_capacity(cov.n());
    while !remaining.is_empty() {
        let mut best_pos = 0;
        let mut best_gain = 0usize;
        for (pos, &t) in remaining.iter().enumerate() {
            let gain = cov.sets[t].iter().filter(|e| !covered.contains(e)).count();
            if pos == 0 || gain > best_gain {
                best_pos = pos;
                best_gain = gain;
            }
        }
        if best_gain == 0 && !covered.is_empty() {
            covered.clear();
            continue; // re-score everything against the reset covered set
        }
        let t = remaining.remove(best_pos);
        covered.extend(cov.sets[t].iter().copied());
        order.push(t);
    }
    Ok(PrioritizedOrder {
        approach: Approach::GreedyAdditional,
        ids: order.into_iter().map(|i| cov.ids[i].clone()).collect(),
        preparation_seconds: 0.0,
        prioritisation_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Seeded uniform shuffle — the baseline every informed strategy should
/// beat.
pub fn random_order(ids: &[String], seed: u64) -> Result<PrioritizedOrder, PrioritizeError> {
    if ids.is_empty() {
        return Err(PrioritizeError::EmptyInput);
    }
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(PrioritizeError::DuplicateId { id: id.clone() });
        }
    }
    let started = Instant::now();
    let mut shuffled: Vec<String> = ids.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    Ok(PrioritizedOrder {
        approach: Approach::Random,
        ids: shuffled,
        preparation_seconds: 0.0,
        prioritisation_seconds: started.elapsed().as_secs_f64(),
    })
}
