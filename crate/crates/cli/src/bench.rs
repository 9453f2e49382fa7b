//! Seeded synthetic corpus for the `bench` command: identifier-rich text of
//! a fixed length per test, plus opcode streams pushed through the real
//! encoding pipeline so the filtered variant reflects the production filter.

use anyhow::Result;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use tcpdiv_core::classfile::{Instruction, InstructionSequence};
use tcpdiv_core::corpus::{
    encode_bytecode, ArtifactKind, EncodedArtifact, EncodingConfig, EncodingMode, FilterSet,
    TestCaseRecord,
};

const WORDS: &[&str] = &[
    "assert", "Equals", "format", "parse", "proper", "improper", "Format", "BigFraction",
    "value", "double", "expected", "actual", "result", "math", "Decimal", "round", "toString",
    "builder", "stream", "index",
];
const GLUE: &[&str] = &[".", "(", ")", ";", " = ", ", ", "\"", " ", "new ", "return "];

pub struct SyntheticCorpus {
    pub texts: Vec<EncodedArtifact>,
    pub bytecode: Vec<EncodedArtifact>,
    pub filtered: Vec<EncodedArtifact>,
}

/// Opcodes the `figure3` filter keeps, and the rest of the valid range.
fn opcode_pools() -> (Vec<u8>, Vec<u8>) {
    let keeps = |op: u8| matches!(op, 0x01..=0x11 | 0xb2..=0xba | 0x59 | 0xb1);
    let kept = (0u8..=0xc9).filter(|&op| keeps(op)).collect();
    let dropped = (0u8..=0xc9).filter(|&op| !keeps(op)).collect();
    (kept, dropped)
}

/// Builds `count` synthetic tests deterministically from `seed`. Texts are
/// exactly `text_len` characters; opcode streams are exactly `byte_len`
/// instructions, of which a ~0.4 fraction survives the `figure3` filter.
pub fn generate(
    count: usize,
    text_len: usize,
    byte_len: usize,
    seed: u64,
) -> Result<SyntheticCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (kept, dropped) = opcode_pools();

    let mut texts = Vec::with_capacity(count);
    let mut bytecode = Vec::with_capacity(count);
    let mut filtered = Vec::with_capacity(count);
    for i in 0..count {
        let id = format!("bench.Synthetic#test{i:04}");

        let mut text = String::with_capacity(text_len + 16);
        text.push_str("public void ");
        while text.len() < text_len {
            let part = if rng.gen_bool(0.7) {
                WORDS[rng.gen_range(0..WORDS.len())]
            } else {
                GLUE[rng.gen_range(0..GLUE.len())]
            };
            text.push_str(part);
        }
        text.truncate(text_len);
        let tokens = text.chars().map(u32::from).collect();
        texts.push(EncodedArtifact::new(id.clone(), ArtifactKind::Text, tokens));

        let items: Vec<Instruction> = (0..byte_len)
            .map(|offset| {
                let opcode = if rng.gen_bool(0.4) {
                    kept[rng.gen_range(0..kept.len())]
                } else {
                    dropped[rng.gen_range(0..dropped.len())]
                };
                Instruction {
                    offset: u32::try_from(offset).expect("offset fits"),
                    opcode,
                    immediates: Vec::new(),
                    cp_operands: Vec::new(),
                }
            })
            .collect();
        let record = TestCaseRecord {
            id: id.clone(),
            text: None,
            instructions: Some(InstructionSequence::new(id, items)),
        };
        let full = EncodingConfig { mode: EncodingMode::OpcodeOnly, filter: None };
        bytecode.push(encode_bytecode(&record, &full)?);
        let narrowed =
            EncodingConfig { mode: EncodingMode::OpcodeOnly, filter: Some(FilterSet::Figure3) };
        filtered.push(encode_bytecode(&record, &narrowed)?);
    }
    Ok(SyntheticCorpus { texts, bytecode, filtered })
}
