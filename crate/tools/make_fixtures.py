#!/usr/bin/env python3
"""Regenerates the binary and text fixtures under crates/core/tests/fixtures.

The .class files are assembled directly (big-endian, 1-based constant pool,
two-slot long/double entries) from the instruction listings in this script;
the golden expectation files are written from the same listings, so the
fixtures and their expectations cannot drift apart. Everything is
deterministic: running the script twice produces identical bytes.

Usage: python3 tools/make_fixtures.py
"""
from __future__ import annotations

import os
import struct

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.normpath(
    os.path.join(HERE, "..", "crates", "core", "tests", "fixtures")
)


def u1(v: int) -> bytes:
    return struct.pack(">B", v)


def u2(v: int) -> bytes:
    return struct.pack(">H", v)


def u4(v: int) -> bytes:
    return struct.pack(">I", v)


def s4(v: int) -> bytes:
    return struct.pack(">i", v)


class Pool:
    """Interning constant pool. Indices are 1-based; long/double entries
    occupy two slots (the second is a placeholder)."""

    def __init__(self) -> None:
        self.entries: list[bytes | None] = []
        self.index: dict[tuple, int] = {}

    def _add(self, key: tuple, data: bytes, slots: int = 1) -> int:
        if key in self.index:
            return self.index[key]
        self.entries.append(data)
        idx = len(self.entries)
        if slots == 2:
            self.entries.append(None)
        self.index[key] = idx
        return idx

    def utf8(self, s: str) -> int:
        b = s.encode("utf-8")  # all fixture strings are ASCII
        return self._add(("utf8", s), b"\x01" + u2(len(b)) + b)

    def integer(self, v: int) -> int:
        return self._add(("int", v), b"\x03" + struct.pack(">i", v))

    def long(self, v: int) -> int:
        return self._add(("long", v), b"\x05" + struct.pack(">q", v), slots=2)

    def double(self, v: float) -> int:
        return self._add(("double", v), b"\x06" + struct.pack(">d", v), slots=2)

    def cls(self, name: str) -> int:
        n = self.utf8(name)
        return self._add(("class", name), b"\x07" + u2(n))

    def string(self, s: str) -> int:
        n = self.utf8(s)
        return self._add(("string", s), b"\x08" + u2(n))

    def name_and_type(self, name: str, desc: str) -> int:
        n, d = self.utf8(name), self.utf8(desc)
        return self._add(("nat", name, desc), b"\x0c" + u2(n) + u2(d))

    def _member(self, tag: bytes, kind: str, owner: str, name: str, desc: str) -> int:
        c = self.cls(owner)
        nat = self.name_and_type(name, desc)
        return self._add((kind, owner, name, desc), tag + u2(c) + u2(nat))

    def fieldref(self, owner: str, name: str, desc: str) -> int:
        return self._member(b"\x09", "fieldref", owner, name, desc)

    def methodref(self, owner: str, name: str, desc: str) -> int:
        return self._member(b"\x0a", "methodref", owner, name, desc)

    def interface_methodref(self, owner: str, name: str, desc: str) -> int:
        return self._member(b"\x0b", "imethodref", owner, name, desc)

    def method_handle(self, kind: int, ref: int) -> int:
        return self._add(("mh", kind, ref), b"\x0f" + u1(kind) + u2(ref))

    def method_type(self, desc: str) -> int:
        d = self.utf8(desc)
        return self._add(("mt", desc), b"\x10" + u2(d))

    def dynamic(self, bsm: int, name: str, desc: str) -> int:
        nat = self.name_and_type(name, desc)
        return self._add(("condy", bsm, name, desc), b"\x11" + u2(bsm) + u2(nat))

    def invoke_dynamic(self, bsm: int, name: str, desc: str) -> int:
        nat = self.name_and_type(name, desc)
        return self._add(("indy", bsm, name, desc), b"\x12" + u2(bsm) + u2(nat))

    def build(self) -> bytes:
        out = u2(len(self.entries) + 1)
        for entry in self.entries:
            if entry is not None:
                out += entry
        return out


def annotation(pool: Pool, type_desc: str, pairs=()) -> bytes:
    out = u2(pool.utf8(type_desc)) + u2(len(pairs))
    for name, value in pairs:
        out += u2(pool.utf8(name)) + value
    return out


def visible_annotations(*annotations_bytes: bytes) -> bytes:
    return u2(len(annotations_bytes)) + b"".join(annotations_bytes)


def ev_const(tag: str, idx: int) -> bytes:
    return tag.encode() + u2(idx)


def ev_enum(pool: Pool, type_desc: str, const_name: str) -> bytes:
    return b"e" + u2(pool.utf8(type_desc)) + u2(pool.utf8(const_name))


def ev_array(*values: bytes) -> bytes:
    return b"[" + u2(len(values)) + b"".join(values)


def ev_annotation(anno: bytes) -> bytes:
    return b"@" + anno


class ClassBuilder:
    def __init__(
        self,
        name: str,
        super_name: str = "java/lang/Object",
        access: int = 0x0021,
        major: int = 52,
        minor: int = 0,
    ) -> None:
        self.pool = Pool()
        self.access = access
        self.major = major
        self.minor = minor
        self.this_idx = self.pool.cls(name)
        self.super_idx = self.pool.cls(super_name)
        self.fields: list[bytes] = []
        self.methods: list[bytes] = []
        self.class_attrs: list[bytes] = []

    def field(self, access: int, name: str, desc: str) -> None:
        p = self.pool
        self.fields.append(u2(access) + u2(p.utf8(name)) + u2(p.utf8(desc)) + u2(0))

    def method(
        self,
        access: int,
        name: str,
        desc: str,
        code: bytes | None = None,
        max_stack: int = 0,
        max_locals: int = 0,
        annotations_bytes: bytes | None = None,
        code_attrs=(),  # (attr_name, body_bytes) inside the Code attribute
        exception_table=(),  # (start_pc, end_pc, handler_pc, catch_type_idx)
    ) -> None:
        p = self.pool
        attrs = []
        if code is not None:
            body = u2(max_stack) + u2(max_locals) + u4(len(code)) + code
            body += u2(len(exception_table))
            for start, end, handler, catch in exception_table:
                body += u2(start) + u2(end) + u2(handler) + u2(catch)
            body += u2(len(code_attrs))
            for attr_name, attr_body in code_attrs:
                body += u2(p.utf8(attr_name)) + u4(len(attr_body)) + attr_body
            attrs.append(u2(p.utf8("Code")) + u4(len(body)) + body)
        if annotations_bytes is not None:
            attrs.append(
                u2(p.utf8("RuntimeVisibleAnnotations"))
                + u4(len(annotations_bytes))
                + annotations_bytes
            )
        self.methods.append(
            u2(access) + u2(p.utf8(name)) + u2(p.utf8(desc)) + u2(len(attrs)) + b"".join(attrs)
        )

    def class_attr(self, name: str, body: bytes) -> None:
        self.class_attrs.append(u2(self.pool.utf8(name)) + u4(len(body)) + body)

    def source_file(self, file_name: str) -> None:
        body = u2(self.pool.utf8(file_name))
        self.class_attr("SourceFile", body)

    def build(self) -> bytes:
        out = u4(0xCAFEBABE) + u2(self.minor) + u2(self.major)
        out += self.pool.build()
        out += u2(self.access) + u2(self.this_idx) + u2(self.super_idx)
        out += u2(0)  # interfaces
        out += u2(len(self.fields)) + b"".join(self.fields)
        out += u2(len(self.methods)) + b"".join(self.methods)
        out += u2(len(self.class_attrs)) + b"".join(self.class_attrs)
        return out


# --------------------------------------------------------------------------
# Instruction listings. Each method body is a list of per-instruction byte
# chunks so the golden files can state instruction counts exactly.

PKG = "org/example"
FRACTION = f"{PKG}/BigFraction"
FORMAT = f"{PKG}/BigFractionFormat"
TEST_ANNO = "Lorg/junit/Test;"
BEFORE_ANNO = "Lorg/junit/Before;"


def ldc(idx: int) -> bytes:
    assert idx <= 0xFF, f"ldc operand {idx} does not fit one byte"
    return b"\x12" + u1(idx)


def init_code(pool: Pool, super_name: str = "java/lang/Object") -> list[bytes]:
    ref = pool.methodref(super_name, "<init>", "()V")
    return [b"\x2a", b"\xb7" + u2(ref), b"\xb1"]


def setup_code(pool: Pool, owner: str) -> list[bytes]:
    fmt_cls = pool.cls(FORMAT)
    fmt_init = pool.methodref(FORMAT, "<init>", "()V")
    proper = pool.fieldref(owner, "properFormat", f"L{FORMAT};")
    improper = pool.fieldref(owner, "improperFormat", f"L{FORMAT};")
    return [
        b"\x2a",
        b"\xbb" + u2(fmt_cls),
        b"\x59",
        b"\xb7" + u2(fmt_init),
        b"\xb5" + u2(proper),
        b"\x2a",
        b"\xbb" + u2(fmt_cls),
        b"\x59",
        b"\xb7" + u2(fmt_init),
        b"\xb5" + u2(improper),
        b"\xb1",
    ]


def format_test_code(pool: Pool, owner: str, const_a: int, const_b: int, literal: str) -> list[bytes]:
    """new BigFraction(a, b); format with both formats; assert both results."""
    fraction = pool.cls(FRACTION)
    frac_init = pool.methodref(FRACTION, "<init>", "(II)V")
    expected = pool.string(literal)
    proper = pool.fieldref(owner, "properFormat", f"L{FORMAT};")
    improper = pool.fieldref(owner, "improperFormat", f"L{FORMAT};")
    fmt = pool.methodref(FORMAT, "format", f"(L{FRACTION};)Ljava/lang/String;")
    assert_oo = pool.methodref(
        "org/junit/Assert", "assertEquals", "(Ljava/lang/Object;Ljava/lang/Object;)V"
    )
    return [
        b"\xbb" + u2(fraction),
        b"\x59",
        u1(const_a),
        u1(const_b),
        b"\xb7" + u2(frac_init),
        b"\x4c",
        ldc(expected),
        b"\x4d",
        b"\x2a",
        b"\xb4" + u2(proper),
        b"\x2b",
        b"\xb6" + u2(fmt),
        b"\x4e",
        b"\x2c",
        b"\x2d",
        b"\xb8" + u2(assert_oo),
        b"\x2a",
        b"\xb4" + u2(improper),
        b"\x2b",
        b"\xb6" + u2(fmt),
        b"\x4e",
        b"\x2c",
        b"\x2d",
        b"\xb8" + u2(assert_oo),
        b"\xb1",
    ]


def parse_big_code(pool: Pool, owner: str) -> list[bytes]:
    """Parse two long fractions, compare both to pi, then to each other,
    then check a 99-digit decimal expansion."""
    improper = pool.fieldref(owner, "improperFormat", f"L{FORMAT};")
    proper = pool.fieldref(owner, "properFormat", f"L{FORMAT};")
    parse = pool.methodref(FORMAT, "parse", f"(Ljava/lang/String;)L{FRACTION};")
    improper_literal = pool.string("167213075789791382630962062639/53225575123090058458126718")
    proper_literal = pool.string("3 7536350420521207255895245742/53225575123090058458126718")
    pi = pool.double(3.141592653589793)
    double_value = pool.methodref(FRACTION, "doubleValue", "()D")
    assert_ddd = pool.methodref("org/junit/Assert", "assertEquals", "(DDD)V")
    assert_oo = pool.methodref(
        "org/junit/Assert", "assertEquals", "(Ljava/lang/Object;Ljava/lang/Object;)V"
    )
    decimal = pool.cls("java/math/BigDecimal")
    decimal_init = pool.methodref("java/math/BigDecimal", "<init>", "(Ljava/lang/String;)V")
    pi_literal = pool.string("3.141592653589793238462643383279")
    big_decimal_value = pool.methodref(FRACTION, "bigDecimalValue", "(II)Ljava/math/BigDecimal;")
    return [
        b"\x2a",
        b"\xb4" + u2(improper),
        ldc(improper_literal),
        b"\xb6" + u2(parse),
        b"\x4c",
        b"\x14" + u2(pi),
        b"\x2b",
        b"\xb6" + u2(double_value),
        b"\x0e",
        b"\xb8" + u2(assert_ddd),
        b"\x2a",
        b"\xb4" + u2(proper),
        ldc(proper_literal),
        b"\xb6" + u2(parse),
        b"\x4d",
        b"\x14" + u2(pi),
        b"\x2c",
        b"\xb6" + u2(double_value),
        b"\x0e",
        b"\xb8" + u2(assert_ddd),
        b"\x2b",
        b"\x2c",
        b"\xb8" + u2(assert_oo),
        b"\xbb" + u2(decimal),
        b"\x59",
        ldc(pi_literal),
        b"\xb7" + u2(decimal_init),
        b"\x4e",
        b"\x2d",
        b"\x2b",
        b"\x10\x63",
        b"\x10\x06",
        b"\xb6" + u2(big_decimal_value),
        b"\xb8" + u2(assert_oo),
        b"\xb1",
    ]


def local_variable_table(pool: Pool, owner: str, code_len: int, names: dict) -> bytes:
    """names: local slot -> (name, descriptor, start_pc)."""
    entries = sorted(names.items())
    body = u2(len(entries))
    for slot, (name, desc, start) in entries:
        body += (
            u2(start)
            + u2(code_len - start)
            + u2(pool.utf8(name))
            + u2(pool.utf8(desc))
            + u2(slot)
        )
    return body


# Expected byte streams after keeping only "semantic shape" opcodes
# (constant pushes below ldc, field access, invokes, dup, return): the
# committed decoder/encoder must reproduce these exactly.
SHAPE_KEEP = set(range(0x01, 0x12)) | set(range(0xB2, 0xBB)) | {0x59, 0xB1}
EXPECTED_SHAPE = {
    "testFormatZero": "59 03 04 B7 B4 B6 B8 B4 B6 B8 B1",
    "testFormatNegative": "59 02 05 B7 B4 B6 B8 B4 B6 B8 B1",
}


def shape_hex(chunks: list[bytes]) -> str:
    kept = [c[0] for c in chunks if c[0] in SHAPE_KEEP]
    return " ".join(f"{op:02X}" for op in kept)


def build_big_fraction_format_test() -> tuple[bytes, list[tuple[str, str, bool]]]:
    name = f"{PKG}/BigFractionFormatTest"
    cb = ClassBuilder(name)
    pool = cb.pool

    init_chunks = init_code(pool)
    setup_chunks = setup_code(pool, name)
    parse_chunks = parse_big_code(pool, name)
    negative_chunks = format_test_code(pool, name, 0x02, 0x05, "-1 / 2")
    zero_chunks = format_test_code(pool, name, 0x03, 0x04, "0 / 1")
    assert shape_hex(zero_chunks) == EXPECTED_SHAPE["testFormatZero"]
    assert shape_hex(negative_chunks) == EXPECTED_SHAPE["testFormatNegative"]

    test_anno = visible_annotations(annotation(pool, TEST_ANNO))
    # One annotation with an element: a millisecond timeout (long entry,
    # exercising the two-slot pool layout and 'J' element skipping).
    timed_anno = visible_annotations(
        annotation(pool, TEST_ANNO, [("timeout", ev_const("J", pool.long(10_000)))])
    )
    before_anno = visible_annotations(annotation(pool, BEFORE_ANNO))

    cb.field(0x0002, "properFormat", f"L{FORMAT};")
    cb.field(0x0002, "improperFormat", f"L{FORMAT};")

    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    cb.method(0x0001, "setUp", "()V", b"".join(setup_chunks), 3, 1, before_anno)
    cb.method(0x0001, "testParseBig", "()V", b"".join(parse_chunks), 6, 4, timed_anno)
    cb.method(0x0001, "testFormatNegative", "()V", b"".join(negative_chunks), 4, 4, test_anno)
    cb.method(0x0001, "testFormatZero", "()V", b"".join(zero_chunks), 4, 4, test_anno)
    cb.source_file("BigFractionFormatTest.java")

    methods = [
        ("<init>", "()V", False),
        ("setUp", "()V", False),
        ("testParseBig", "()V", True),
        ("testFormatNegative", "()V", True),
        ("testFormatZero", "()V", True),
    ]
    return cb.build(), methods


def build_format_zero_variant(class_name: str, locals_names: dict) -> tuple[bytes, bytes]:
    """A class holding only testFormatZero. The two variants run exactly the
    same build sequence, so every code-referenced pool index matches and the
    code arrays come out byte-identical; only the local-variable names (and
    the class name) differ."""
    name = f"{PKG}/{class_name}"
    cb = ClassBuilder(name)
    pool = cb.pool

    init_chunks = init_code(pool)
    zero_chunks = format_test_code(pool, name, 0x03, 0x04, "0 / 1")
    assert shape_hex(zero_chunks) == EXPECTED_SHAPE["testFormatZero"]
    code = b"".join(zero_chunks)

    lvt = local_variable_table(pool, name, len(code), locals_names)
    test_anno = visible_annotations(annotation(pool, TEST_ANNO))

    cb.field(0x0002, "properFormat", f"L{FORMAT};")
    cb.field(0x0002, "improperFormat", f"L{FORMAT};")
    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    cb.method(
        0x0001,
        "testFormatZero",
        "()V",
        code,
        4,
        4,
        test_anno,
        code_attrs=[("LocalVariableTable", lvt)],
    )
    cb.source_file(f"{class_name}.java")
    return cb.build(), code


def build_synthetic_opcodes() -> tuple[bytes, list[tuple[str, int, int]]]:
    """One method per awkward encoding: switch padding at two alignments,
    wide-prefixed forms, interface/dynamic invocation, multi-dimensional
    allocation, monitors, and the retired jsr/ret pair."""
    name = f"{PKG}/SyntheticOpcodes"
    cb = ClassBuilder(name, major=55)
    pool = cb.pool

    # selector: tableswitch at offset 1 (two pad bytes), cases 0..2.
    selector = [
        b"\x1b",
        b"\xaa" + b"\x00" * 2 + s4(33) + s4(0) + s4(2) + s4(27) + s4(29) + s4(31),
        b"\x03", b"\xac",
        b"\x04", b"\xac",
        b"\x05", b"\xac",
        b"\x02", b"\xac",
    ]

    # lookup: a nop shifts the lookupswitch to offset 2 (one pad byte).
    lookup = [
        b"\x00",
        b"\x1b",
        b"\xab" + b"\x00" * 1 + s4(30) + s4(2) + s4(5) + s4(26) + s4(100) + s4(28),
        b"\x03", b"\xac",
        b"\x04", b"\xac",
        b"\x02", b"\xac",
    ]

    # wideForms: wide-prefixed iinc/load/store beside their short forms,
    # plus both goto widths.
    wide_forms = [
        b"\xc4\x84" + u2(256) + u2(16),
        b"\x11" + u2(256),
        b"\xc4\x36" + u2(256),
        b"\xc4\x15" + u2(256),
        b"\x99" + u2(7),
        b"\x84\x01\x01",
        b"\x00",
        b"\xa7" + u2(4),
        b"\x00",
        b"\xc8" + s4(5),
        b"\xb1",
    ]

    sys_out = pool.fieldref("java/lang/System", "out", "Ljava/io/PrintStream;")
    wide_str = pool.string("a constant reached through the wide form")
    big_long = pool.long(123_456_789_000)
    condy = pool.dynamic(0, "constantValue", "Ljava/lang/String;")
    list_size = pool.interface_methodref("java/util/List", "size", "()I")
    indy = pool.invoke_dynamic(0, "run", "()Ljava/lang/Runnable;")
    str_matrix = pool.cls("[[Ljava/lang/String;")
    obj_array = pool.cls("[Ljava/lang/Object;")
    serializable = pool.cls("java/io/Serializable")
    constants_and_calls = [
        b"\xb2" + u2(sys_out),
        b"\x57",
        b"\x13" + u2(wide_str),
        b"\x57",
        b"\x14" + u2(big_long),
        b"\x58",
        ldc(condy),
        b"\x57",
        b"\x2b",
        b"\xb9" + u2(list_size) + b"\x01\x00",
        b"\x3d",
        b"\xba" + u2(indy) + b"\x00\x00",
        b"\x57",
        b"\x10\x02",
        b"\x10\x03",
        b"\xc5" + u2(str_matrix) + b"\x02",
        b"\xc0" + u2(obj_array),
        b"\xc1" + u2(serializable),
        b"\x57",
        b"\x01",
        b"\xb0",
    ]

    runtime_ex = pool.cls("java/lang/RuntimeException")
    runtime_ex_init = pool.methodref("java/lang/RuntimeException", "<init>", "()V")
    guarded = [
        b"\x2b",
        b"\xc2",
        b"\x2b",
        b"\xc3",
        b"\xbb" + u2(runtime_ex),
        b"\x59",
        b"\xb7" + u2(runtime_ex_init),
        b"\xbf",
    ]

    legacy = [
        b"\xa8" + u2(4),
        b"\xb1",
        b"\x3a\x04",
        b"\xa9\x04",
    ]

    init_chunks = init_code(pool)

    # A nested annotation exercising every element-value shape the reader
    # must skip: array, string, enum, nested annotation, int, class literal.
    meta = visible_annotations(
        annotation(
            pool,
            f"L{PKG}/Meta;",
            [
                (
                    "names",
                    ev_array(
                        ev_const("s", pool.utf8("first")), ev_const("s", pool.utf8("second"))
                    ),
                ),
                ("mode", ev_enum(pool, f"L{PKG}/Mode;", "ON")),
                (
                    "inner",
                    ev_annotation(
                        annotation(
                            pool, f"L{PKG}/Inner;", [("x", ev_const("I", pool.integer(1)))]
                        )
                    ),
                ),
                ("cls", ev_const("c", pool.utf8("Ljava/lang/String;"))),
            ],
        )
    )

    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    cb.method(0x0001, "selector", "(I)I", b"".join(selector), 1, 2)
    cb.method(0x0001, "lookup", "(I)I", b"".join(lookup), 1, 2)
    cb.method(0x0001, "wideForms", "(I)V", b"".join(wide_forms), 1, 257)
    cb.method(
        0x0001,
        "constantsAndCalls",
        "(Ljava/util/List;)Ljava/lang/Object;",
        b"".join(constants_and_calls),
        3,
        3,
        annotations_bytes=meta,
    )
    cb.method(
        0x0001,
        "guarded",
        "(Ljava/lang/Object;)V",
        b"".join(guarded),
        2,
        2,
        exception_table=[(2, 4, 4, 0)],
    )
    cb.method(0x0001, "legacy", "()V", b"".join(legacy), 1, 5)

    # Bootstrap section backing the dynamic pool entries.
    bootstrap_ref = pool.method_handle(
        6,
        pool.methodref(
            "java/lang/invoke/LambdaMetafactory",
            "metafactory",
            "(Ljava/lang/invoke/MethodHandles$Lookup;Ljava/lang/String;"
            "Ljava/lang/invoke/MethodType;)Ljava/lang/invoke/CallSite;",
        ),
    )
    bsm = u2(1) + u2(bootstrap_ref) + u2(1) + u2(pool.method_type("()V"))
    cb.class_attr("BootstrapMethods", bsm)
    cb.source_file("SyntheticOpcodes.java")

    bodies = {
        "<init>": init_chunks,
        "selector": selector,
        "lookup": lookup,
        "wideForms": wide_forms,
        "constantsAndCalls": constants_and_calls,
        "guarded": guarded,
        "legacy": legacy,
    }
    listing = [
        (method, sum(len(c) for c in chunks), len(chunks))
        for method, chunks in bodies.items()
    ]
    return cb.build(), listing


def build_no_tests() -> bytes:
    cb = ClassBuilder(f"{PKG}/NoTests")
    pool = cb.pool
    init_chunks = init_code(pool)
    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    cb.method(0x0001, "helper", "()I", b"\x10\x2a\xac", 1, 1)
    cb.method(0x0001, "compute", "(I)I", b"\x1b\x04\x60\xac", 2, 2)
    cb.source_file("NoTests.java")
    return cb.build()


def build_abstract_tests() -> bytes:
    cb = ClassBuilder(f"{PKG}/AbstractTests", access=0x0421)
    pool = cb.pool
    init_chunks = init_code(pool)
    test_anno = visible_annotations(annotation(pool, TEST_ANNO))
    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    # Annotated but abstract: flagged as a test, yet exports no body.
    cb.method(0x0401, "testSomething", "()V", annotations_bytes=test_anno)
    cb.source_file("AbstractTests.java")
    return cb.build()


def build_overloaded() -> bytes:
    cb = ClassBuilder(f"{PKG}/Overloaded")
    pool = cb.pool
    init_chunks = init_code(pool)
    test_anno = visible_annotations(annotation(pool, TEST_ANNO))
    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    cb.method(0x0001, "testX", "()V", b"\xb1", 0, 1, test_anno)
    cb.method(0x0001, "testX", "(I)V", b"\x1b\x57\xb1", 1, 2, test_anno)
    cb.source_file("Overloaded.java")
    return cb.build()


def build_illegal_duplicate() -> bytes:
    cb = ClassBuilder(f"{PKG}/IllegalDuplicate")
    pool = cb.pool
    init_chunks = init_code(pool)
    test_anno = visible_annotations(annotation(pool, TEST_ANNO))
    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    cb.method(0x0001, "testDup", "()V", b"\xb1", 0, 1, test_anno)
    cb.method(0x0001, "testDup", "()V", b"\x00\xb1", 0, 1, test_anno)
    cb.source_file("IllegalDuplicate.java")
    return cb.build()


def build_future_version() -> bytes:
    cb = ClassBuilder(f"{PKG}/FutureVersion", major=66)
    pool = cb.pool
    init_chunks = init_code(pool)
    test_anno = visible_annotations(annotation(pool, TEST_ANNO))
    cb.method(0x0001, "<init>", "()V", b"".join(init_chunks), 1, 1)
    cb.method(0x0001, "testFuture", "()V", b"\xb1", 0, 1, test_anno)
    cb.source_file("FutureVersion.java")
    return cb.build()


# --------------------------------------------------------------------------
# Text fixtures: the test sources as single corpus records with exact byte
# counts (ASCII throughout, so characters equal bytes).


def assert_len(text: str, expected: int, label: str) -> str:
    actual = len(text.encode("utf-8"))
    assert actual == expected, f"{label}: {actual} bytes, expected {expected}"
    return text


TEXT_FORMAT_NEGATIVE = assert_len(
    """public void testFormatNegative() {
BigFraction c = new BigFraction(-1, 2);
String expected = "-1 / 2";

String actual = properFormat.format(c);
Assert.assertEquals(expected, actual);
actual = improperFormat.format(c);
Assert.assertEquals(expected, actual);
}""",
    258,
    "testFormatNegative",
)

TEXT_FORMAT_ZERO = assert_len(
    """public void testFormatZero() {
BigFraction c = new BigFraction(0, 1);
String expected = "0 / 1";

String actual = properFormat.format(c);
Assert.assertEquals(expected, actual);
actual = improperFormat.format(c);
Assert.assertEquals(expected, actual);
}""",
    252,
    "testFormatZero",
)

TEXT_FORMAT_ZERO_VARIATION = assert_len(
    """public void testFormatZero() {
BigFraction bigFraction = new BigFraction(0, 1);
// The expected output
String output = "0 / 1";

// The actual output
String actual = properFormat.format(bigFraction);
Assert.assertEquals(output, actual);
actual = improperFormat.format(bigFraction);
Assert.assertEquals(output, actual);
}""",
    320,
    "testFormatZero variation",
)


def text_parse_big(target: int = 705) -> str:
    """Composes the long-fraction parsing test, stretching the shared
    denominator literal so the rendered source hits `target` bytes."""
    digits = (
        "53225575123090058458126718248444563466137046489291514"
        "39081994243212845659892848021345665243702709726781388"
    )
    num1 = "16721307578979138188796660105675871662732107794229967232113"
    num2 = "7536350420521207255895245742552351253353317406530968741"
    pi = "3.14159265358979323846264338327950288419716939937510582097"

    def render(den: str, pi_digits: str) -> str:
        return (
            'public void testParseBig() {\n'
            f'BigFraction f1 = improperFormat.parse("{num1}" +\n'
            f'" / " + "{den}");\n'
            'Assert.assertEquals(FastMath.PI, f1.doubleValue(), 0.0);\n'
            f'BigFraction f2 = properFormat.parse("3 " +\n'
            f'"{num2}" + " / " + "{den}");\n'
            'Assert.assertEquals(FastMath.PI, f2.doubleValue(), 0.0);\n'
            'Assert.assertEquals(f1, f2);\n'
            f'BigDecimal pi = new BigDecimal("{pi_digits}");\n'
            'Assert.assertEquals(pi, f1.bigDecimalValue(99, BigDecimal.ROUND_HALF_EVEN));\n'
            '}'
        )

    base = len(render("", pi))
    need = target - base  # absorbed by the two denominator copies
    assert 2 <= need <= 2 * len(digits), f"cannot stretch to {target} (need {need})"
    if need % 2:
        pi += "5"
        need -= 1
    den = digits[: need // 2]
    return assert_len(render(den, pi), target, "testParseBig")


def escape_record(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def write(path: str, data: bytes) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)
    print(f"{os.path.relpath(path, FIXTURES):60} {len(data):6} bytes")


def main() -> None:
    big_test, methods = build_big_fraction_format_test()
    write(os.path.join(FIXTURES, "classes", "bigfraction", "BigFractionFormatTest.class"), big_test)

    original, code_a = build_format_zero_variant(
        "FormatZeroOriginal",
        {
            0: ("this", f"L{PKG}/FormatZeroOriginal;", 0),
            1: ("c", f"L{FRACTION};", 10),
            2: ("expected", "Ljava/lang/String;", 13),
            3: ("actual", "Ljava/lang/String;", 22),
        },
    )
    variation, code_b = build_format_zero_variant(
        "FormatZeroVariation",
        {
            0: ("this", f"L{PKG}/FormatZeroVariation;", 0),
            1: ("bigFraction", f"L{FRACTION};", 10),
            2: ("output", "Ljava/lang/String;", 13),
            3: ("actual", "Ljava/lang/String;", 22),
        },
    )
    assert code_a == code_b, "variant method bodies must be byte-identical"
    assert original != variation
    write(os.path.join(FIXTURES, "classes", "variants", "FormatZeroOriginal.class"), original)
    write(os.path.join(FIXTURES, "classes", "variants", "FormatZeroVariation.class"), variation)

    synthetic, listing = build_synthetic_opcodes()
    write(os.path.join(FIXTURES, "classes", "synthetic", "SyntheticOpcodes.class"), synthetic)

    write(os.path.join(FIXTURES, "classes", "edgecases", "NoTests.class"), build_no_tests())
    write(os.path.join(FIXTURES, "classes", "edgecases", "AbstractTests.class"), build_abstract_tests())
    write(os.path.join(FIXTURES, "classes", "edgecases", "Overloaded.class"), build_overloaded())
    write(os.path.join(FIXTURES, "classes", "edgecases", "FutureVersion.class"), build_future_version())
    write(
        os.path.join(FIXTURES, "classes", "illegal", "IllegalDuplicate.class"),
        build_illegal_duplicate(),
    )

    golden_methods = "".join(
        f"{name}\t{desc}\t{'test' if is_test else '-'}\n" for name, desc, is_test in methods
    )
    write(
        os.path.join(FIXTURES, "golden", "BigFractionFormatTest.methods.txt"),
        golden_methods.encode(),
    )
    golden_listing = "".join(
        f"{method}\t{code_len}\t{count}\n" for method, code_len, count in listing
    )
    write(
        os.path.join(FIXTURES, "golden", "SyntheticOpcodes.counts.txt"),
        golden_listing.encode(),
    )

    prefix = f"{PKG.replace('/', '.')}"
    records = [
        (f"{prefix}.BigFractionFormatTest#testParseBig", text_parse_big()),
        (f"{prefix}.BigFractionFormatTest#testFormatNegative", TEXT_FORMAT_NEGATIVE),
        (f"{prefix}.BigFractionFormatTest#testFormatZero", TEXT_FORMAT_ZERO),
        (f"{prefix}.FormatZeroOriginal#testFormatZero", TEXT_FORMAT_ZERO),
        (f"{prefix}.FormatZeroVariation#testFormatZero", TEXT_FORMAT_ZERO_VARIATION),
    ]
    corpus = "".join(f"{rid}\t{escape_record(text)}\n" for rid, text in records)
    write(os.path.join(FIXTURES, "texts", "fig_sources.tsv"), corpus.encode())


if __name__ == "__main__":
    main()
