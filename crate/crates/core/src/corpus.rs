//! Test-case corpora and their encoded artefacts.
//!
//! A [`TestCaseRecord`] couples a test identifier with up to two
//! representations: the method's source text and its decoded bytecode.
//! Encoding turns either into a flat token sequence — characters for text,
//! bytes for bytecode — which is what the distance and sketching layers
//! consume. Bytecode can first be narrowed to instruction families that
//! carry behavioural signal.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use crate::classfile::{
    self, ClassFileError, Instruction, InstructionSequence, OpcodeCategory, TestDetectionConfig,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("record {id} has no text to encode")]
    MissingText { id: String },
    #[error("record {id} has no bytecode to encode")]
    MissingBytecode { id: String },
    #[error("duplicate test identifier {id}")]
    DuplicateId { id: String },
    #[error("no corpus source given (need a class directory, a text corpus, or both)")]
    NoSource,
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("failed to parse class file {path}: {source}")]
    ClassFile {
        path: PathBuf,
        #[source]
        source: ClassFileError,
    },
    #[error("{path}:{line}: {reason}")]
    MalformedLine { path: PathBuf, line: usize, reason: &'static str },
}

/// One test case, identified as `binary.ClassName#methodName`. Either side
/// may be absent when the corpus only has one representation of the test.
#[derive(Debug, Clone)]
pub struct TestCaseRecord {
    pub id: String,
    pub text: Option<String>,
    pub instructions: Option<InstructionSequence>,
}

/// What part of each instruction reaches the encoded artefact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingMode {
    /// Opcode bytes only: operand changes are invisible.
    OpcodeOnly,
    /// Opcode bytes plus immediate operand bytes (literals, local slots,
    /// branch offsets). Constant-pool indices are dropped either way, since
    /// pool layout varies between otherwise identical compilations.
    OpcodeImm,
}

/// Which instructions survive filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterSet {
    /// Instructions that describe what a test exercises: constant pushes
    /// (inline and from the pool), field access, and invocations.
    Semantic,
    /// The preset used by the `figure3` command-line option: inline constant
    /// pushes, field access, invocations, plus `dup` and `return`.
    /// Constant-pool loads (`ldc` family) are excluded.
    Figure3,
    /// Keep exactly the listed instruction families.
    Custom(Vec<OpcodeCategory>),
}

impl FilterSet {
    pub fn keeps(&self, instruction: &Instruction) -> bool {
        match self {
            FilterSet::Semantic => matches!(instruction.opcode, 0x01..=0x14 | 0xb2..=0xba),
            FilterSet::Figure3 => {
                matches!(instruction.opcode, 0x01..=0x11 | 0xb2..=0xba | 0x59 | 0xb1)
            }
            FilterSet::Custom(categories) => categories.contains(&instruction.category()),
        }
    }
}

/// Keeps the instructions selected by `set`, preserving order and owner.
pub fn filter_instructions(sequence: &InstructionSequence, set: &FilterSet) -> InstructionSequence {
    InstructionSequence {
        owner: sequence.owner.clone(),
        items: sequence.items.iter().filter(|i| set.keeps(i)).cloned().collect(),
    }
}

#[derive(Debug, Clone)]
pub struct EncodingConfig {
    pub mode: EncodingMode,
    pub filter: Option<FilterSet>,
}

impl Default for EncodingConfig {
    fn default() -> Self {
        EncodingConfig { mode: EncodingMode::OpcodeImm, filter: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    Text,
    Bytecode,
}

/// A test case reduced to a comparable token sequence: character scalar
/// values for text, byte values (0..=255) for bytecode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedArtifact {
    pub id: String,
    pub kind: ArtifactKind,
    tokens: Vec<u32>,
}

impl EncodedArtifact {
    pub fn new(id: impl Into<String>, kind: ArtifactKind, tokens: Vec<u32>) -> Self {
        debug_assert!(
            kind != ArtifactKind::Bytecode || tokens.iter().all(|&t| t <= 0xff),
            "bytecode tokens must be byte values"
        );
        EncodedArtifact { id: id.into(), kind, tokens }
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Uppercase, space-separated two-digit hex of the byte tokens;
    /// `None` for text artefacts.
    pub fn hex(&self) -> Option<String> {
        if self.kind != ArtifactKind::Bytecode {
            return None;
        }
        let mut out = String::with_capacity(self.tokens.len() * 3);
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{t:02X}").expect("writing to a String cannot fail");
        }
        Some(out)
    }

    /// The artefact as corpus-file payload text: the character string for
    /// text artefacts, the hex rendering for bytecode.
    pub fn payload(&self) -> String {
        match self.kind {
            ArtifactKind::Text => {
                self.tokens.iter().map(|&t| char::from_u32(t).unwrap_or('\u{fffd}')).collect()
            }
            ArtifactKind::Bytecode => self.hex().expect("bytecode artefact renders to hex"),
        }
    }
}

/// Encodes the source text of a test: one token per character, with line
/// breaks flattened to single spaces. No other normalisation.
pub fn encode_text(record: &TestCaseRecord) -> Result<EncodedArtifact, CorpusError> {
    let text = record.text.as_deref().ok_or_else(|| CorpusError::MissingText {
        id: record.id.clone(),
    })?;
    let tokens = text.chars().map(|c| if c == '\n' { ' ' as u32 } else { c as u32 }).collect();
    Ok(EncodedArtifact::new(record.id.clone(), ArtifactKind::Text, tokens))
}

/// Encodes the decoded bytecode of a test after optional filtering. Token
/// content follows [`EncodingMode`]; constant-pool operand bytes never
/// appear.
pub fn encode_bytecode(
    record: &TestCaseRecord,
    config: &EncodingConfig,
) -> Result<EncodedArtifact, CorpusError> {
    let sequence = record.instructions.as_ref().ok_or_else(|| CorpusError::MissingBytecode {
        id: record.id.clone(),
    })?;
    let filtered;
    let items: &[Instruction] = match &config.filter {
        Some(set) => {
            filtered = filter_instructions(sequence, set);
            &filtered.items
        }
        None => &sequence.items,
    };
    let mut tokens = Vec::new();
    for instruction in items {
        tokens.push(u32::from(instruction.opcode));
        if config.mode == EncodingMode::OpcodeImm {
            tokens.extend(instruction.immediates.iter().map(|&b| u32::from(b)));
        }
    }
    Ok(EncodedArtifact::new(record.id.clone(), ArtifactKind::Bytecode, tokens))
}

/// Everything a corpus load produced: the records in stable order plus
/// non-fatal warnings (unmatched sides, parser notes).
#[derive(Debug)]
pub struct CorpusLoad {
    pub records: Vec<TestCaseRecord>,
    pub warnings: Vec<String>,
}

/// Loads records from a directory of `.class` files, a text corpus file, or
/// both. Class files are visited in sorted path order; within a class,
/// methods keep declaration order. Text-only records follow, in file order.
/// With both sources present, ids missing from one side produce warnings,
/// not errors.
pub fn load_corpus(
    class_root: Option<&Path>,
    text_corpus: Option<&Path>,
    detection: &TestDetectionConfig,
) -> Result<CorpusLoad, CorpusError> {
    if class_root.is_none() && text_corpus.is_none() {
        return Err(CorpusError::NoSource);
    }

    let mut records: Vec<TestCaseRecord> = Vec::new();
    let mut warnings = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    if let Some(root) = class_root {
        let mut class_files: Vec<PathBuf> = Vec::new();
        for entry in WalkDir::new(root) {
            let entry = entry.map_err(|e| {
                let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf());
                match e.into_io_error() {
                    Some(source) => CorpusError::Io { path, source },
                    None => CorpusError::Io {
                        path: root.to_path_buf(),
                        source: io::Error::other("walk failed"),
                    },
                }
            })?;
            let path = entry.path();
            if entry.file_type().is_file()
                && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("class"))
            {
                class_files.push(path.to_path_buf());
            }
        }
        class_files.sort();

        for path in class_files {
            let bytes = fs::read(&path)
                .map_err(|source| CorpusError::Io { path: path.clone(), source })?;
            let class = classfile::parse_class(&bytes)
                .map_err(|source| CorpusError::ClassFile { path: path.clone(), source })?;
            for w in &class.warnings {
                warnings.push(format!("{}: {w}", path.display()));
            }
            let sequences = classfile::list_test_cases(&class, detection)
                .map_err(|source| CorpusError::ClassFile { path: path.clone(), source })?;
            for sequence in sequences {
                if !seen.insert(sequence.owner.clone()) {
                    return Err(CorpusError::DuplicateId { id: sequence.owner });
                }
                records.push(TestCaseRecord {
                    id: sequence.owner.clone(),
                    text: None,
                    instructions: Some(sequence),
                });
            }
        }
    }

    if let Some(path) = text_corpus {
        let texts = read_text_corpus(path)?;
        let mut text_seen: BTreeSet<&str> = BTreeSet::new();
        for (id, _) in &texts {
            if !text_seen.insert(id.as_str()) {
                return Err(CorpusError::DuplicateId { id: id.clone() });
            }
        }
        let both_sources = class_root.is_some();
        for (id, text) in texts {
            if let Some(record) = records.iter_mut().find(|r| r.id == id) {
                record.text = Some(text);
            } else {
                if both_sources {
                    warnings.push(format!("test {id} has text but no bytecode"));
                }
                records.push(TestCaseRecord { id, text: Some(text), instructions: None });
            }
        }
        if both_sources {
            for record in &records {
                if record.text.is_none() {
                    warnings.push(format!("test {} has bytecode but no text", record.id));
                }
            }
        }
    }

    Ok(CorpusLoad { records, warnings })
}

fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape_text(escaped: &str) -> Option<String> {
    let mut out = String::with_capacity(escaped.len());
    let mut chars = escaped.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            'n' => out.push('\n'),
            't' => out.push('\t'),
            '\\' => out.push('\\'),
            _ => return None,
        }
    }
    Some(out)
}

/// Reads a text corpus: one `id<TAB>escaped-text` record per line, with
/// `\n`, `\t`, and `\\` escapes in the text.
pub fn read_text_corpus(path: &Path) -> Result<Vec<(String, String)>, CorpusError> {
    let raw = fs::read_to_string(path)
        .map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    let mut out = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (id, escaped) = line.split_once('\t').ok_or(CorpusError::MalformedLine {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason: "expected `id<TAB>text`",
        })?;
        if id.is_empty() {
            return Err(CorpusError::MalformedLine {
                path: path.to_path_buf(),
                line: lineno + 1,
                reason: "empty test identifier",
            });
        }
        let text = unescape_text(escaped).ok_or(CorpusError::MalformedLine {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason: "bad escape sequence in text",
        })?;
        out.push((id.to_string(), text));
    }
    Ok(out)
}

/// Writes a text corpus in the format accepted by [`read_text_corpus`].
pub fn write_text_corpus(records: &[(String, String)], path: &Path) -> Result<(), CorpusError> {
    let mut out = String::new();
    for (id, text) in records {
        out.push_str(id);
        out.push('\t');
        out.push_str(&escape_text(text));
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })
}

/// Writes encoded artefacts as `id<TAB>payload` lines. All artefacts in one
/// file share a kind; text payloads contain no line breaks by construction,
/// so the format needs no escaping.
pub fn write_encoded_corpus(artifacts: &[EncodedArtifact], path: &Path) -> Result<(), CorpusError> {
    let mut out = String::new();
    for artifact in artifacts {
        out.push_str(&artifact.id);
        out.push('\t');
        out.push_str(&artifact.payload());
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })
}

/// Reads an encoded corpus back. The artefact kind is detected from the
/// payloads: if every payload is space-separated two-digit hex the file is
/// treated as bytecode, otherwise as text.
pub fn read_encoded_corpus(path: &Path) -> Result<Vec<EncodedArtifact>, CorpusError> {
    let raw = fs::read_to_string(path)
        .map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (lineno, line) in raw.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (id, payload) = line.split_once('\t').ok_or(CorpusError::MalformedLine {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason: "expected `id<TAB>payload`",
        })?;
        if id.is_empty() {
            return Err(CorpusError::MalformedLine {
                path: path.to_path_buf(),
                line: lineno + 1,
                reason: "empty test identifier",
            });
        }
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId { id: id.to_string() });
        }
        rows.push((id.to_string(), payload.to_string()));
    }

    let all_hex: Option<Vec<Vec<u32>>> = rows.iter().map(|(_, p)| try_parse_hex(p)).collect();
    Ok(match all_hex {
        Some(token_rows) => rows
            .into_iter()
            .zip(token_rows)
            .map(|((id, _), tokens)| EncodedArtifact::new(id, ArtifactKind::Bytecode, tokens))
            .collect(),
        None => rows
            .into_iter()
            .map(|(id, payload)| {
                let tokens = payload.chars().map(|c| c as u32).collect();
                EncodedArtifact::new(id, ArtifactKind::Text, tokens)
            })
            .collect(),
    })
}

fn try_parse_hex(payload: &str) -> Option<Vec<u32>> {
    if payload.is_empty() {
        return Some(Vec::new());
    }
    payload
        .split(' ')
        .map(|tok| {
            if tok.len() == 2 && tok.chars().all(|c| c.is_ascii_hexdigit()) {
                u32::from_str_radix(tok, 16).ok()
            } else {
                None
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(opcode: u8, immediates: &[u8], cp: &[u16]) -> Instruction {
        Instruction { offset: 0, opcode, immediates: immediates.to_vec(), cp_operands: cp.to_vec() }
    }

    fn bytecode_record(id: &str, items: Vec<Instruction>) -> TestCaseRecord {
        TestCaseRecord {
            id: id.to_string(),
            text: None,
            instructions: Some(InstructionSequence::new(id, items)),
        }
    }

    #[test]
    fn encode_text_flattens_line_breaks() {
        let record = TestCaseRecord {
            id: "T#a".into(),
            text: Some("a\nb".into()),
            instructions: None,
        };
        let artifact = encode_text(&record).unwrap();
        assert_eq!(artifact.payload(), "a b");
        assert_eq!(artifact.len(), 3);
    }

    #[test]
    fn encode_text_of_empty_text_is_empty() {
        let record = TestCaseRecord { id: "T#a".into(), text: Some(String::new()), instructions: None };
        assert!(encode_text(&record).unwrap().is_empty());
    }

    #[test]
    fn encode_text_without_text_fails() {
        let record = bytecode_record("T#a", vec![]);
        assert!(matches!(encode_text(&record), Err(CorpusError::MissingText { .. })));
    }

    #[test]
    fn encode_single_return_renders_b1() {
        let record = bytecode_record("T#a", vec![ins(0xb1, &[], &[])]);
        let artifact = encode_bytecode(&record, &EncodingConfig::default()).unwrap();
        assert_eq!(artifact.hex().as_deref(), Some("B1"));
    }

    #[test]
    fn pool_operands_never_reach_the_artifact() {
        // new #8; dup
        let record = bytecode_record("T#a", vec![ins(0xbb, &[], &[8]), ins(0x59, &[], &[])]);
        let artifact = encode_bytecode(&record, &EncodingConfig::default()).unwrap();
        assert_eq!(artifact.hex().as_deref(), Some("BB 59"));
    }

    #[test]
    fn opcode_only_drops_immediates() {
        let record = bytecode_record("T#a", vec![ins(0x10, &[0x63], &[]), ins(0xb1, &[], &[])]);
        let opcode_only = EncodingConfig { mode: EncodingMode::OpcodeOnly, filter: None };
        let artifact = encode_bytecode(&record, &opcode_only).unwrap();
        assert_eq!(artifact.hex().as_deref(), Some("10 B1"));
        let with_imm = encode_bytecode(&record, &EncodingConfig::default()).unwrap();
        assert_eq!(with_imm.hex().as_deref(), Some("10 63 B1"));
    }

    #[test]
    fn empty_instruction_sequence_encodes_to_empty_artifact() {
        let record = bytecode_record("T#a", vec![]);
        let artifact = encode_bytecode(&record, &EncodingConfig::default()).unwrap();
        assert!(artifact.is_empty());
        assert_eq!(artifact.hex().as_deref(), Some(""));
    }

    #[test]
    fn semantic_filter_keeps_pool_loads_figure3_does_not() {
        let ldc = ins(0x12, &[], &[14]);
        assert!(FilterSet::Semantic.keeps(&ldc));
        assert!(!FilterSet::Figure3.keeps(&ldc));
        // Both keep invocations and field access.
        for op in [0xb2, 0xb5, 0xb6, 0xba] {
            assert!(FilterSet::Semantic.keeps(&ins(op, &[], &[1])));
            assert!(FilterSet::Figure3.keeps(&ins(op, &[], &[1])));
        }
        // Only figure3 keeps dup and return.
        for op in [0x59, 0xb1] {
            assert!(!FilterSet::Semantic.keeps(&ins(op, &[], &[])));
            assert!(FilterSet::Figure3.keeps(&ins(op, &[], &[])));
        }
        // Neither keeps loads, stores, or allocation.
        for op in [0x2a, 0x4c, 0xbb] {
            assert!(!FilterSet::Semantic.keeps(&ins(op, &[], &[])));
            assert!(!FilterSet::Figure3.keeps(&ins(op, &[], &[])));
        }
    }

    #[test]
    fn custom_filter_over_all_categories_is_identity() {
        let sequence = InstructionSequence::new(
            "T#a",
            vec![
                ins(0x00, &[], &[]),
                ins(0x04, &[], &[]),
                ins(0x84, &[1, 1], &[]),
                ins(0xb6, &[], &[9]),
                ins(0xb1, &[], &[]),
            ],
        );
        let everything = FilterSet::Custom(OpcodeCategory::all());
        assert_eq!(filter_instructions(&sequence, &everything), sequence);
    }

    #[test]
    fn filtering_is_idempotent() {
        let sequence = InstructionSequence::new(
            "T#a",
            vec![ins(0x04, &[], &[]), ins(0x2a, &[], &[]), ins(0xb6, &[], &[9])],
        );
        for set in [FilterSet::Semantic, FilterSet::Figure3] {
            let once = filter_instructions(&sequence, &set);
            let twice = filter_instructions(&once, &set);
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn filtering_empty_sequence_is_empty() {
        let sequence = InstructionSequence::new("T#a", vec![]);
        assert!(filter_instructions(&sequence, &FilterSet::Semantic).items.is_empty());
    }

    #[test]
    fn text_corpus_round_trips_escapes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("texts.tsv");
        let records = vec![
            ("A#t1".to_string(), "line one\nline\ttwo \\ backslash".to_string()),
            ("A#t2".to_string(), String::new()),
        ];
        write_text_corpus(&records, &path).unwrap();
        assert_eq!(read_text_corpus(&path).unwrap(), records);
    }

    #[test]
    fn text_corpus_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("texts.tsv");
        fs::write(&path, "no-tab-here\n").unwrap();
        assert!(matches!(
            read_text_corpus(&path),
            Err(CorpusError::MalformedLine { reason: "expected `id<TAB>text`", .. })
        ));
        fs::write(&path, "id\tbad \\x escape\n").unwrap();
        assert!(matches!(
            read_text_corpus(&path),
            Err(CorpusError::MalformedLine { reason: "bad escape sequence in text", .. })
        ));
    }

    #[test]
    fn encoded_corpus_round_trips_both_kinds() {
        let dir = tempfile::tempdir().unwrap();

        let bytecode = vec![
            EncodedArtifact::new("A#t1", ArtifactKind::Bytecode, vec![0xbb, 0x59]),
            EncodedArtifact::new("A#t2", ArtifactKind::Bytecode, vec![]),
        ];
        let path = dir.path().join("bytecode.corpus");
        write_encoded_corpus(&bytecode, &path).unwrap();
        assert_eq!(read_encoded_corpus(&path).unwrap(), bytecode);

        let text = vec![
            EncodedArtifact::new("A#t1", ArtifactKind::Text, "assertEquals(1, f(x));".chars().map(|c| c as u32).collect()),
            EncodedArtifact::new("A#t2", ArtifactKind::Text, "return;".chars().map(|c| c as u32).collect()),
        ];
        let path = dir.path().join("text.corpus");
        write_encoded_corpus(&text, &path).unwrap();
        assert_eq!(read_encoded_corpus(&path).unwrap(), text);
    }

    #[test]
    fn encoded_corpus_rejects_duplicate_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.corpus");
        fs::write(&path, "A#t1\tB1\nA#t1\tB1\n").unwrap();
        assert!(matches!(read_encoded_corpus(&path), Err(CorpusError::DuplicateId { .. })));
    }

    #[test]
    fn hex_length_tracks_token_count() {
        let artifact = EncodedArtifact::new("A#t", ArtifactKind::Bytecode, vec![1, 2, 3, 255]);
        assert_eq!(artifact.hex().unwrap().len(), 3 * 4 - 1);
        assert_eq!(artifact.hex().as_deref(), Some("01 02 03 FF"));
    }
}
