//! Randomised invariant checks across the library.

use std::collections::HashSet;

use proptest::prelude::*;
use tcpdiv_core::classfile::{Instruction, InstructionSequence};
use tcpdiv_core::corpus::{
    filter_instructions, read_encoded_corpus, write_encoded_corpus, ArtifactKind, EncodedArtifact,
    FilterSet,
};
use tcpdiv_core::distance::{build_matrix, levenshtein, SimilarityMatrix};
use tcpdiv_core::lsh::{minhash_signature, shingles, update_signature, MinHashParams};
use tcpdiv_core::prioritize::{fast_pw, greedy_additional, greedy_total, ledru_prioritize, CoverageMatrix};

fn opcode_sequence(max_len: usize) -> impl Strategy<Value = InstructionSequence> {
    prop::collection::vec(0u8..=0xc9, 0..max_len).prop_map(|opcodes| {
        let items = opcodes
            .into_iter()
            .enumerate()
            .map(|(i, opcode)| Instruction {
                offset: u32::try_from(i).unwrap(),
                opcode,
                immediates: Vec::new(),
                cp_operands: Vec::new(),
            })
            .collect();
        InstructionSequence::new("t", items)
    })
}

fn token_vec(max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..8, 0..max_len)
}

fn artifacts(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<EncodedArtifact>> {
    prop::collection::vec(prop::collection::vec(0u32..6, 0..20), n).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, tokens)| EncodedArtifact::new(format!("t{i}"), ArtifactKind::Text, tokens))
            .collect()
    })
}

fn coverage_rows(
    tests: std::ops::Range<usize>,
    entities: u32,
) -> impl Strategy<Value = Vec<(String, Vec<String>)>> {
    prop::collection::vec(prop::collection::vec(0..entities, 0..8), tests).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, names)| {
                (format!("t{i}"), names.into_iter().map(|e| format!("e{e}")).collect())
            })
            .collect()
    })
}

fn symmetric_matrix(max_n: usize) -> impl Strategy<Value = SimilarityMatrix> {
    (1..=max_n)
        .prop_flat_map(|n| {
            prop::collection::vec(0u32..50, n * n).prop_map(move |mut values| {
                for i in 0..n {
                    values[i * n + i] = 0;
                    for j in 0..i {
                        values[i * n + j] = values[j * n + i];
                    }
                }
                let ids = (0..n).map(|i| format!("t{i}")).collect();
                SimilarityMatrix::from_values(ids, values).unwrap()
            })
        })
        .no_shrink()
}

fn coverage_point(order: &[String], matrix: &CoverageMatrix) -> usize {
    // Number of leading tests needed to cover everything any test covers.
    let full: HashSet<usize> =
        (0..matrix.n()).flat_map(|i| matrix.set(i).iter().copied()).collect();
    let mut covered = HashSet::new();
    for (k, id) in order.iter().enumerate() {
        let idx = matrix.ids().iter().position(|x| x == id).unwrap();
        covered.extend(matrix.set(idx).iter().copied());
        if covered == full {
            return k + 1;
        }
    }
    order.len()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn filtering_is_idempotent(sequence in opcode_sequence(60)) {
        for set in [FilterSet::Semantic, FilterSet::Figure3] {
            let once = filter_instructions(&sequence, &set);
            let twice = filter_instructions(&once, &set);
            prop_assert_eq!(&once.items, &twice.items);
            prop_assert!(once.items.iter().all(|i| set.keeps(i)));
        }
    }

    #[test]
    fn encoded_corpus_round_trips(rows in prop::collection::vec(
        prop::collection::vec(0u32..=0xff, 0..30), 1..6)
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.tsv");
        let artifacts: Vec<EncodedArtifact> = rows
            .into_iter()
            .enumerate()
            .map(|(i, tokens)| EncodedArtifact::new(format!("t{i}"), ArtifactKind::Bytecode, tokens))
            .collect();
        write_encoded_corpus(&artifacts, &path).unwrap();
        let back = read_encoded_corpus(&path).unwrap();
        prop_assert_eq!(back.len(), artifacts.len());
        for (a, b) in artifacts.iter().zip(&back) {
            prop_assert_eq!(&a.id, &b.id);
            prop_assert_eq!(a.tokens(), b.tokens());
            prop_assert_eq!(b.kind, ArtifactKind::Bytecode);
        }
    }

    #[test]
    fn edit_distance_is_a_metric(a in token_vec(60), b in token_vec(60), c in token_vec(60)) {
        let ab = levenshtein(&a, &b);
        let ba = levenshtein(&b, &a);
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(levenshtein(&a, &a), 0);
        // d(a,b) == 0 only for equal sequences.
        prop_assert_eq!(ab == 0, a == b);
        // Length difference is a lower bound, longer length an upper bound.
        prop_assert!(ab >= a.len().abs_diff(b.len()));
        prop_assert!(ab <= a.len().max(b.len()));
        let ac = levenshtein(&a, &c);
        let cb = levenshtein(&c, &b);
        prop_assert!(ab <= ac + cb, "triangle violated: {} > {} + {}", ab, ac, cb);
    }

    #[test]
    fn matrix_entries_follow_artifact_permutation(
        artifacts in artifacts(2..6),
        seed in 0u64..1000,
    ) {
        let matrix = build_matrix(&artifacts).unwrap();
        let mut shuffled = artifacts.clone();
        // Deterministic Fisher-Yates driven by the seed.
        let mut state = seed.wrapping_mul(2) + 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let permuted = build_matrix(&shuffled).unwrap();
        for (i, a) in shuffled.iter().enumerate() {
            for (j, b) in shuffled.iter().enumerate() {
                let oi = matrix.index_of(&a.id).unwrap();
                let oj = matrix.index_of(&b.id).unwrap();
                prop_assert_eq!(permuted.get(i, j), matrix.get(oi, oj));
            }
        }
    }

    #[test]
    fn union_signature_is_componentwise_minimum(
        a in prop::collection::vec(0u32..16, 0..40),
        b in prop::collection::vec(0u32..16, 0..40),
    ) {
        let params = MinHashParams { num_hashes: 64, bands: 8, rows: 8, ..MinHashParams::default() };
        let sa = shingles(&a, params.shingle_k);
        let sb = shingles(&b, params.shingle_k);
        let union: HashSet<u64> = sa.union(&sb).copied().collect();
        let sig_a = minhash_signature(&sa, &params).unwrap();
        let sig_b = minhash_signature(&sb, &params).unwrap();
        let sig_union = minhash_signature(&union, &params).unwrap();
        let merged = update_signature(&sig_a, &sig_b).unwrap();
        prop_assert_eq!(sig_union.components(), merged.components());
    }

    #[test]
    fn ledru_order_survives_monotone_rescaling(matrix in symmetric_matrix(8)) {
        let base = ledru_prioritize(&matrix).unwrap();
        let scaled_values: Vec<u32> = (0..matrix.n())
            .flat_map(|i| (0..matrix.n()).map(move |j| (i, j)))
            .map(|(i, j)| if i == j { 0 } else { 3 * matrix.get(i, j) + 7 })
            .collect();
        let scaled = SimilarityMatrix::from_values(matrix.ids().to_vec(), scaled_values).unwrap();
        let rescaled = ledru_prioritize(&scaled).unwrap();
        prop_assert_eq!(base.ids, rescaled.ids);
    }

    #[test]
    fn fast_pw_emits_each_test_exactly_once(artifacts in artifacts(1..8)) {
        let params = MinHashParams { num_hashes: 32, bands: 8, rows: 4, ..MinHashParams::default() };
        let order = fast_pw(&artifacts, &params).unwrap();
        prop_assert_eq!(order.ids.len(), artifacts.len());
        let mut sorted = order.ids.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), artifacts.len());
    }

    #[test]
    fn additional_coverage_completes_no_later_than_total(rows in coverage_rows(1..8, 10)) {
        let matrix = CoverageMatrix::new(rows).unwrap();
        let total = greedy_total(&matrix).unwrap();
        let additional = greedy_additional(&matrix).unwrap();
        prop_assert_eq!(total.ids.len(), matrix.n());
        prop_assert_eq!(additional.ids.len(), matrix.n());
        prop_assert!(
            coverage_point(&additional.ids, &matrix) <= coverage_point(&total.ids, &matrix)
        );
    }
}
