//! Levenshtein distances and the pairwise similarity matrix.
//!
//! Artefact dissimilarity is plain edit distance over token sequences.
//! Small inputs go through a two-row dynamic program; longer ones use a
//! bit-parallel formulation (Myers' algorithm in Hyyrö's block layout,
//! 64 DP cells per machine word) that computes identical values. The block
//! code mirrors the published recurrences; the two paths cross-check each
//! other in the tests.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::EncodedArtifact;

#[derive(Debug, Error)]
pub enum DistanceError {
    #[error("duplicate artefact identifier {id}")]
    DuplicateId { id: String },
    #[error("cannot build a similarity matrix from an empty corpus")]
    EmptyCorpus,
    #[error("{path}:{line}: malformed similarity matrix: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("invalid similarity matrix: {reason}")]
    Invalid { reason: String },
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Exact Levenshtein distance between two token sequences (unit costs for
/// insertion, deletion, and substitution).
pub fn levenshtein(a: &[u32], b: &[u32]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }
    // Below this length the bit-parallel set-up costs more than it saves.
    if short.len() <= 24 {
        levenshtein_two_row(short, long)
    } else {
        PatternBits::new(short).distance(long)
    }
}

/// Two-row dynamic program, O(|short|) memory.
fn levenshtein_two_row(short: &[u32], long: &[u32]) -> usize {
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, lc) in long.iter().enumerate() {
        let mut prev_diag = row[0];
        row[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let above = row[j + 1];
            let sub = if lc == sc { prev_diag } else { prev_diag + 1 };
            row[j + 1] = sub.min(above + 1).min(row[j] + 1);
            prev_diag = above;
        }
    }
    row[short.len()]
}

/// A pattern preprocessed for bit-parallel distance queries: per-token
/// match masks, 64 pattern positions per block. Reused across the whole
/// matrix row so the per-pair cost is just the column scan.
struct PatternBits {
    len: usize,
    blocks: usize,
    /// Match masks for byte-sized tokens, laid out `token * blocks + block`.
    dense: Vec<u64>,
    /// Match masks for the rare tokens above 0xFF.
    sparse: HashMap<u32, Vec<u64>>,
}

impl PatternBits {
    fn new(pattern: &[u32]) -> Self {
        assert!(!pattern.is_empty(), "pattern must be non-empty");
        let blocks = pattern.len().div_ceil(64);
        let mut dense = vec![0u64; 256 * blocks];
        let mut sparse: HashMap<u32, Vec<u64>> = HashMap::new();
        for (i, &token) in pattern.iter().enumerate() {
            let bit = 1u64 << (i % 64);
            if token <= 0xff {
                dense[token as usize * blocks + i / 64] |= bit;
            } else {
                sparse.entry(token).or_insert_with(|| vec![0u64; blocks])[i / 64] |= bit;
            }
        }
        PatternBits { len: pattern.len(), blocks, dense, sparse }
    }

    fn distance(&self, text: &[u32]) -> usize {
        if self.blocks == 1 {
            return self.distance_one_block(text);
        }
        let mut pv = vec![!0u64; self.blocks];
        let mut mv = vec![0u64; self.blocks];
        let mut score = self.len as isize;
        let last = self.blocks - 1;
        let last_probe = 1u64 << ((self.len - 1) % 64);
        let empty = vec![0u64; self.blocks];
        for &token in text {
            let eq_row: &[u64] = if token <= 0xff {
                &self.dense[token as usize * self.blocks..(token as usize + 1) * self.blocks]
            } else {
                self.sparse.get(&token).unwrap_or(&empty)
            };
            // The horizontal input of the bottom block is +1 every column:
            // the first DP row counts insertions.
            let mut hin = 1i32;
            for b in 0..self.blocks {
                let probe = if b == last { last_probe } else { 1u64 << 63 };
                hin = advance_block(&mut pv[b], &mut mv[b], eq_row[b], hin, probe);
            }
            score += hin as isize;
        }
        score as usize
    }

    /// Allocation-free column scan for patterns of at most 64 tokens.
    fn distance_one_block(&self, text: &[u32]) -> usize {
        let mut pv = !0u64;
        let mut mv = 0u64;
        let mut score = self.len as isize;
        let probe = 1u64 << (self.len - 1);
        for &token in text {
            let eq = if token <= 0xff {
                self.dense[token as usize]
            } else {
                self.sparse.get(&token).map_or(0, |row| row[0])
            };
            score += advance_block(&mut pv, &mut mv, eq, 1, probe) as isize;
        }
        score as usize
    }
}

/// Advances one 64-row block by one text column. `hin`/the return value are
/// the horizontal DP deltas entering and leaving the block, read at the row
/// selected by `probe`. Bits at and above the pattern length in the top
/// block never influence lower bits, so they may hold garbage.
#[inline]
fn advance_block(pv: &mut u64, mv: &mut u64, eq: u64, hin: i32, probe: u64) -> i32 {
    let hin_neg = u64::from(hin < 0);
    let xv = eq | *mv;
    let eq_in = eq | hin_neg;
    let xh = ((eq_in & *pv).wrapping_add(*pv) ^ *pv) | eq_in;
    let mut ph = *mv | !(xh | *pv);
    let mut mh = *pv & xh;
    let mut hout = 0i32;
    if ph & probe != 0 {
        hout += 1;
    }
    if mh & probe != 0 {
        hout -= 1;
    }
    ph <<= 1;
    mh <<= 1;
    mh |= hin_neg;
    ph |= u64::from(hin > 0);
    *pv = mh | !(xv | ph);
    *mv = ph & xv;
    hout
}

/// Symmetric pairwise distance matrix with a zero diagonal, keyed by
/// artefact identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityMatrix {
    ids: Vec<String>,
    values: Vec<u32>,
}

impl SimilarityMatrix {
    /// Builds a matrix from a row-major value vector of length `n * n`.
    /// Values must be symmetric with a zero diagonal; identifiers must be
    /// unique and non-empty.
    pub fn from_values(ids: Vec<String>, values: Vec<u32>) -> Result<Self, DistanceError> {
        let n = ids.len();
        if n == 0 {
            return Err(DistanceError::EmptyCorpus);
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if id.is_empty() {
                return Err(DistanceError::Invalid { reason: "empty identifier".into() });
            }
            if !seen.insert(id.as_str()) {
                return Err(DistanceError::DuplicateId { id: id.clone() });
            }
        }
        if values.len() != n * n {
            return Err(DistanceError::Invalid {
                reason: format!("expected {} values for {n} ids, got {}", n * n, values.len()),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0 {
                return Err(DistanceError::Invalid { reason: format!("nonzero diagonal at {i}") });
            }
            for j in i + 1..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(DistanceError::Invalid {
                        reason: format!("asymmetry at ({i},{j})"),
                    });
                }
            }
        }
        Ok(SimilarityMatrix { ids, values })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.values[i * self.ids.len() + j]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

/// Builds the full pairwise Levenshtein matrix over `artifacts`.
///
/// Only the upper triangle is computed; the lower mirrors it. Rows are
/// distributed over worker threads, but each cell's value depends only on
/// its two artefacts, so the result is identical for every thread count.
pub fn build_matrix(artifacts: &[EncodedArtifact]) -> Result<SimilarityMatrix, DistanceError> {
    if artifacts.is_empty() {
        return Err(DistanceError::EmptyCorpus);
    }
    let mut seen = std::collections::HashSet::new();
    for artifact in artifacts {
        if !seen.insert(artifact.id.as_str()) {
            return Err(DistanceError::DuplicateId { id: artifact.id.clone() });
        }
    }

    let n = artifacts.len();
    let triangle: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let tokens = artifacts[i].tokens();
            // One pattern per row: the per-pair cost is the column scan of
            // the other artefact, so matrix time tracks artefact length.
            let row: Vec<u32> = if tokens.is_empty() {
                (i + 1..n).map(|j| artifacts[j].len() as u32).collect()
            } else {
                let pattern = PatternBits::new(tokens);
                (i + 1..n)
                    .map(|j| pattern.distance(artifacts[j].tokens()) as u32)
                    .collect()
            };
            row
        })
        .collect();

    let mut values = vec![0u32; n * n];
    for (i, row) in triangle.into_iter().enumerate() {
        for (offset, value) in row.into_iter().enumerate() {
            let j = i + 1 + offset;
            values[i * n + j] = value;
            values[j * n + i] = value;
        }
    }
    Ok(SimilarityMatrix { ids: artifacts.iter().map(|a| a.id.clone()).collect(), values })
}

/// Renders the matrix as CSV: a `test_id` header listing all identifiers,
/// then one row per test in the same order, values as plain integers, lines
/// ending in `\n`.
pub fn matrix_to_csv(matrix: &SimilarityMatrix) -> Result<String, DistanceError> {
    for id in &matrix.ids {
        if id.contains(',') || id.contains('\n') || id.contains('\r') {
            return Err(DistanceError::Invalid {
                reason: format!("identifier {id:?} contains a reserved character"),
            });
        }
    }
    let mut out = String::from("test_id");
    for id in &matrix.ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for (i, id) in matrix.ids.iter().enumerate() {
        out.push_str(id);
        for j in 0..matrix.n() {
            out.push(',');
            out.push_str(&matrix.get(i, j).to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes [`matrix_to_csv`] output to `path`.
pub fn write_matrix_csv(matrix: &SimilarityMatrix, path: &Path) -> Result<(), DistanceError> {
    let csv = matrix_to_csv(matrix)?;
    fs::write(path, csv).map_err(|source| DistanceError::Io { path: path.to_path_buf(), source })
}

/// Reads a matrix written by [`write_matrix_csv`], rejecting anything that
/// is not square, symmetric, zero-diagonal, integer-valued, or consistently
/// labelled.
pub fn read_matrix_csv(path: &Path) -> Result<SimilarityMatrix, DistanceError> {
    let raw = fs::read_to_string(path)
        .map_err(|source| DistanceError::Io { path: path.to_path_buf(), source })?;
    let malformed = |line: usize, reason: String| DistanceError::Malformed {
        path: path.to_path_buf(),
        line,
        reason,
    };

    let mut lines = raw.lines();
    let header = lines.next().ok_or_else(|| malformed(1, "missing header".into()))?;
    let mut header_fields = header.split(',');
    match header_fields.next() {
        Some("test_id") => {}
        _ => return Err(malformed(1, "header must start with `test_id`".into())),
    }
    let ids: Vec<String> = header_fields.map(str::to_string).collect();
    let n = ids.len();

    let mut values = vec![0u32; n * n];
    let mut row_count = 0usize;
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let i = row_count;
        if i >= n {
            return Err(malformed(lineno + 2, format!("more than {n} data rows")));
        }
        let mut fields = line.split(',');
        let label = fields.next().unwrap_or("");
        if label != ids[i] {
            return Err(malformed(
                lineno + 2,
                format!("row label {label:?} does not match header id {:?}", ids[i]),
            ));
        }
        let mut col = 0usize;
        for field in fields {
            if col >= n {
                return Err(malformed(lineno + 2, format!("more than {n} columns")));
            }
            let value: u32 = field.parse().map_err(|_| {
                malformed(lineno + 2, format!("cell {field:?} is not a non-negative integer"))
            })?;
            values[i * n + col] = value;
            col += 1;
        }
        if col != n {
            return Err(malformed(lineno + 2, format!("expected {n} columns, found {col}")));
        }
        row_count += 1;
    }
    if row_count != n {
        return Err(malformed(row_count + 1, format!("expected {n} data rows, found {row_count}")));
    }
    for i in 0..n {
        if values[i * n + i] != 0 {
            return Err(malformed(i + 2, format!("nonzero diagonal at {:?}", ids[i])));
        }
        for j in i + 1..n {
            if values[i * n + j] != values[j * n + i] {
                return Err(malformed(
                    i + 2,
                    format!("asymmetric cells for ({:?}, {:?})", ids[i], ids[j]),
                ));
            }
        }
    }
    Ok(SimilarityMatrix { ids, values })
}
