//! Tests against the committed class and text fixtures (regenerate with
//! `python3 tools/make_fixtures.py`).

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use tcpdiv_core::classfile::{
    decode_code, is_test_method, list_test_cases, parse_class, ClassFile, ClassFileError,
    TestDetectionConfig,
};
use tcpdiv_core::corpus::{
    encode_bytecode, encode_text, load_corpus, read_text_corpus, EncodingConfig, EncodingMode,
    FilterSet, TestCaseRecord,
};
use tcpdiv_core::distance::levenshtein;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

fn parse_fixture(rel: &str) -> ClassFile {
    let bytes = fs::read(fixture(rel)).expect("fixture file exists");
    parse_class(&bytes).expect("fixture parses")
}

fn record_for(class: &ClassFile, id: &str) -> TestCaseRecord {
    let sequences = list_test_cases(class, &TestDetectionConfig::default()).unwrap();
    let sequence = sequences
        .into_iter()
        .find(|s| s.owner == id)
        .unwrap_or_else(|| panic!("{id} not found"));
    TestCaseRecord { id: id.to_string(), text: None, instructions: Some(sequence) }
}

#[test]
fn golden_method_listing_matches() {
    let class = parse_fixture("classes/bigfraction/BigFractionFormatTest.class");
    assert_eq!(class.this_class_name, "org/example/BigFractionFormatTest");
    assert_eq!(class.super_class_name.as_deref(), Some("java/lang/Object"));
    assert!(class.warnings.is_empty(), "unexpected warnings: {:?}", class.warnings);

    let config = TestDetectionConfig::default();
    let listing: String = class
        .methods
        .iter()
        .map(|m| {
            let mark = if is_test_method(m, &config) { "test" } else { "-" };
            format!("{}\t{}\t{}\n", m.name, m.descriptor, mark)
        })
        .collect();
    let golden = fs::read_to_string(fixture("golden/BigFractionFormatTest.methods.txt")).unwrap();
    assert_eq!(listing, golden);
}

#[test]
fn format_tests_export_expected_filtered_hex() {
    let class = parse_fixture("classes/bigfraction/BigFractionFormatTest.class");
    let config =
        EncodingConfig { mode: EncodingMode::OpcodeImm, filter: Some(FilterSet::Figure3) };

    let zero = record_for(&class, "org.example.BigFractionFormatTest#testFormatZero");
    let encoded = encode_bytecode(&zero, &config).unwrap();
    assert_eq!(encoded.hex().as_deref(), Some("59 03 04 B7 B4 B6 B8 B4 B6 B8 B1"));

    let negative = record_for(&class, "org.example.BigFractionFormatTest#testFormatNegative");
    let encoded = encode_bytecode(&negative, &config).unwrap();
    assert_eq!(encoded.hex().as_deref(), Some("59 02 05 B7 B4 B6 B8 B4 B6 B8 B1"));
}

#[test]
fn variant_classes_share_opcodes_but_differ_in_text() {
    let original = parse_fixture("classes/variants/FormatZeroOriginal.class");
    let variation = parse_fixture("classes/variants/FormatZeroVariation.class");

    let rec_a = record_for(&original, "org.example.FormatZeroOriginal#testFormatZero");
    let rec_b = record_for(&variation, "org.example.FormatZeroVariation#testFormatZero");

    // Renaming locals and adding comments only moves constant-pool and
    // debug-info bytes around, so every encoding that drops pool indices
    // sees the two methods as identical.
    for mode in [EncodingMode::OpcodeOnly, EncodingMode::OpcodeImm] {
        let config = EncodingConfig { mode, filter: None };
        let a = encode_bytecode(&rec_a, &config).unwrap();
        let b = encode_bytecode(&rec_b, &config).unwrap();
        assert_eq!(a.tokens(), b.tokens(), "bytecode differs under {mode:?}");
        assert_eq!(levenshtein(a.tokens(), b.tokens()), 0);
    }

    // The source texts do differ.
    let texts: HashMap<String, String> =
        read_text_corpus(&fixture("texts/fig_sources.tsv")).unwrap().into_iter().collect();
    let text_record = |id: &str| TestCaseRecord {
        id: id.to_string(),
        text: Some(texts[id].clone()),
        instructions: None,
    };
    let a = encode_text(&text_record("org.example.FormatZeroOriginal#testFormatZero")).unwrap();
    let b = encode_text(&text_record("org.example.FormatZeroVariation#testFormatZero")).unwrap();
    assert!(levenshtein(a.tokens(), b.tokens()) > 0);
}

#[test]
fn fixture_texts_have_expected_sizes() {
    let texts: HashMap<String, String> =
        read_text_corpus(&fixture("texts/fig_sources.tsv")).unwrap().into_iter().collect();
    let expected = [
        ("org.example.BigFractionFormatTest#testParseBig", 705),
        ("org.example.BigFractionFormatTest#testFormatNegative", 258),
        ("org.example.BigFractionFormatTest#testFormatZero", 252),
        ("org.example.FormatZeroOriginal#testFormatZero", 252),
        ("org.example.FormatZeroVariation#testFormatZero", 320),
    ];
    assert_eq!(texts.len(), expected.len());
    for (id, size) in expected {
        assert_eq!(texts[id].len(), size, "size of {id}");
    }
}

#[test]
fn synthetic_opcodes_decode_completely() {
    let class = parse_fixture("classes/synthetic/SyntheticOpcodes.class");
    assert_eq!(class.major_version, 55);
    assert!(class.warnings.is_empty());

    let golden = fs::read_to_string(fixture("golden/SyntheticOpcodes.counts.txt")).unwrap();
    let mut expected: HashMap<&str, (usize, usize)> = HashMap::new();
    for line in golden.lines() {
        let mut parts = line.split('\t');
        let name = parts.next().unwrap();
        let code_len: usize = parts.next().unwrap().parse().unwrap();
        let count: usize = parts.next().unwrap().parse().unwrap();
        expected.insert(name, (code_len, count));
    }

    assert_eq!(class.methods.len(), expected.len());
    for method in &class.methods {
        let body = method.code.as_ref().unwrap_or_else(|| panic!("{} has code", method.name));
        let items = decode_code(&body.bytes).unwrap();
        let (code_len, count) = expected[method.name.as_str()];
        assert_eq!(body.bytes.len(), code_len, "code length of {}", method.name);
        assert_eq!(items.len(), count, "instruction count of {}", method.name);

        // The decoded stream tiles the code array exactly.
        let mut pos = 0u32;
        for ins in &items {
            assert_eq!(ins.offset, pos, "offset drift in {}", method.name);
            pos += u32::try_from(ins.encoded_len()).unwrap();
        }
        assert_eq!(pos as usize, body.bytes.len(), "trailing bytes in {}", method.name);

        for ins in &items {
            for &operand in &ins.cp_operands {
                class.constant_pool.get(operand).expect("pool operand resolves");
            }
        }
    }

    let find = |name: &str, opcode: u8| {
        let body = class.methods.iter().find(|m| m.name == name).unwrap().code.as_ref().unwrap();
        decode_code(&body.bytes).unwrap().into_iter().find(|i| i.opcode == opcode)
    };

    // tableswitch at offset 1: two pad bytes, then default/low/high and
    // three jump offsets; padding is neither immediate nor counted twice.
    let table = find("selector", 0xaa).expect("tableswitch present");
    assert_eq!(table.offset, 1);
    assert_eq!(table.immediates.len(), 24);
    assert_eq!(table.encoded_len(), 27);

    // lookupswitch at offset 2: one pad byte, default/npairs plus two pairs.
    let lookup = find("lookup", 0xab).expect("lookupswitch present");
    assert_eq!(lookup.offset, 2);
    assert_eq!(lookup.immediates.len(), 24);
    assert_eq!(lookup.encoded_len(), 26);

    // wide iinc: embedded opcode plus four operand bytes.
    let wide = find("wideForms", 0xc4).expect("wide present");
    assert_eq!(wide.immediates, vec![0x84, 0x01, 0x00, 0x00, 0x10]);
    assert_eq!(wide.encoded_len(), 6);

    // invokeinterface and invokedynamic carry a pool index plus two
    // trailing bytes; ldc of a dynamic constant uses a one-byte index.
    let iface = find("constantsAndCalls", 0xb9).expect("invokeinterface present");
    assert_eq!((iface.cp_operands.len(), iface.immediates.as_slice()), (1, &[0x01, 0x00][..]));
    let indy = find("constantsAndCalls", 0xba).expect("invokedynamic present");
    assert_eq!((indy.cp_operands.len(), indy.immediates.as_slice()), (1, &[0x00, 0x00][..]));
    let condy_ldc = find("constantsAndCalls", 0x12).expect("ldc present");
    assert_eq!((condy_ldc.cp_operands.len(), condy_ldc.encoded_len()), (1, 2));

    for (method, opcode) in
        [("legacy", 0xa8), ("legacy", 0xa9), ("wideForms", 0xc8), ("guarded", 0xc2)]
    {
        assert!(find(method, opcode).is_some(), "{method} should contain {opcode:#04x}");
    }

    // Nothing in here is named or annotated like a test.
    assert!(list_test_cases(&class, &TestDetectionConfig::default()).unwrap().is_empty());
}

#[test]
fn future_class_version_parses_with_warning() {
    let class = parse_fixture("classes/edgecases/FutureVersion.class");
    assert_eq!(class.major_version, 66);
    assert!(
        class.warnings.iter().any(|w| w.contains("66")),
        "expected a version warning, got {:?}",
        class.warnings
    );
    let tests = list_test_cases(&class, &TestDetectionConfig::default()).unwrap();
    assert_eq!(tests.len(), 1);
    assert_eq!(tests[0].owner, "org.example.FutureVersion#testFuture");
}

#[test]
fn abstract_annotated_method_is_detected_but_not_listed() {
    let class = parse_fixture("classes/edgecases/AbstractTests.class");
    let config = TestDetectionConfig::default();
    let abstract_method = class.methods.iter().find(|m| m.name == "testSomething").unwrap();
    assert!(abstract_method.code.is_none());
    assert!(is_test_method(abstract_method, &config));
    assert!(list_test_cases(&class, &config).unwrap().is_empty());
}

#[test]
fn overloads_get_descriptor_suffixed_ids() {
    let class = parse_fixture("classes/edgecases/Overloaded.class");
    let tests = list_test_cases(&class, &TestDetectionConfig::default()).unwrap();
    let ids: Vec<&str> = tests.iter().map(|t| t.owner.as_str()).collect();
    assert_eq!(
        ids,
        ["org.example.Overloaded#testX()V", "org.example.Overloaded#testX(I)V"]
    );
}

#[test]
fn duplicate_name_and_descriptor_is_rejected() {
    let class = parse_fixture("classes/illegal/IllegalDuplicate.class");
    let err = list_test_cases(&class, &TestDetectionConfig::default()).unwrap_err();
    match err {
        ClassFileError::DuplicateIdentifier { id, descriptor } => {
            assert_eq!(id, "org.example.IllegalDuplicate#testDup");
            assert_eq!(descriptor, "()V");
        }
        other => panic!("expected DuplicateIdentifier, got {other:?}"),
    }
}

#[test]
fn class_without_tests_lists_nothing() {
    let class = parse_fixture("classes/edgecases/NoTests.class");
    assert!(list_test_cases(&class, &TestDetectionConfig::default()).unwrap().is_empty());
}

#[test]
fn corrupted_fixture_bytes_are_rejected() {
    let good = fs::read(fixture("classes/bigfraction/BigFractionFormatTest.class")).unwrap();

    let mut bad_magic = good.clone();
    bad_magic[0] = 0xde;
    assert!(matches!(
        parse_class(&bad_magic).unwrap_err(),
        ClassFileError::MagicMismatch { .. }
    ));

    let truncated = &good[..good.len() / 2];
    assert!(matches!(parse_class(truncated).unwrap_err(), ClassFileError::Truncated { .. }));

    // Byte 10 is the first constant-pool tag.
    let mut bad_tag = good.clone();
    bad_tag[10] = 0xff;
    assert!(matches!(
        parse_class(&bad_tag).unwrap_err(),
        ClassFileError::BadConstantTag { tag: 0xff, .. }
    ));
}

#[test]
fn corpus_load_pairs_classes_with_texts_and_warns_on_gaps() {
    let load = load_corpus(
        Some(&fixture("classes/bigfraction")),
        Some(&fixture("texts/fig_sources.tsv")),
        &TestDetectionConfig::default(),
    )
    .unwrap();

    let ids: Vec<&str> = load.records.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(
        ids,
        [
            "org.example.BigFractionFormatTest#testParseBig",
            "org.example.BigFractionFormatTest#testFormatNegative",
            "org.example.BigFractionFormatTest#testFormatZero",
            "org.example.FormatZeroOriginal#testFormatZero",
            "org.example.FormatZeroVariation#testFormatZero",
        ]
    );
    for record in &load.records[..3] {
        assert!(record.text.is_some() && record.instructions.is_some(), "{}", record.id);
    }
    for record in &load.records[3..] {
        assert!(record.text.is_some() && record.instructions.is_none(), "{}", record.id);
    }
    // The two text-only records are matched by the text-without-bytecode
    // warnings; nothing else should be flagged.
    assert_eq!(load.warnings.len(), 2, "warnings: {:?}", load.warnings);
    assert!(load.warnings.iter().all(|w| w.contains("has text but no bytecode")));
}

#[test]
fn class_only_load_produces_bytecode_records() {
    let load = load_corpus(
        Some(&fixture("classes/bigfraction")),
        None,
        &TestDetectionConfig::default(),
    )
    .unwrap();
    assert_eq!(load.records.len(), 3);
    assert!(load.warnings.is_empty());
    assert!(load.records.iter().all(|r| r.instructions.is_some() && r.text.is_none()));
}
