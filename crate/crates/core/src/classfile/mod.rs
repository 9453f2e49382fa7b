//! A self-contained reader for JVM `.class` files.
//!
//! Parses the container format (constant pool, fields, methods, attributes),
//! decodes method bodies into instruction streams, and flags which methods
//! are test cases. Only what test extraction needs is interpreted: `Code` and
//! `RuntimeVisibleAnnotations` attributes are parsed, everything else is
//! skipped by its declared length. Nothing is verified or executed.

mod code;
mod opcode;

pub use code::{decode_code, Instruction, InstructionSequence};
pub use opcode::OpcodeCategory;

use std::collections::{HashMap, HashSet};
use thiserror::Error;

/// Highest class-file major version this parser has been exercised against
/// (Java 17). Newer files are parsed best-effort with a warning.
pub const MAX_KNOWN_MAJOR_VERSION: u16 = 61;

#[derive(Debug, Error)]
pub enum ClassFileError {
    #[error("bad magic number {found:#010x} (expected 0xCAFEBABE)")]
    MagicMismatch { found: u32 },
    #[error("truncated class file while reading {context} at byte {offset}")]
    Truncated { context: &'static str, offset: usize },
    #[error("unknown constant-pool tag {tag} at index {index}")]
    BadConstantTag { tag: u8, index: u16 },
    #[error("constant-pool index {index} cannot be resolved: {context}")]
    BadIndex { index: u16, context: &'static str },
    #[error("constant-pool entry {index} is not valid modified UTF-8")]
    BadUtf8 { index: u16 },
    #[error("unknown or misplaced opcode {opcode:#04x} at code offset {offset}")]
    UnknownOpcode { opcode: u8, offset: usize },
    #[error("operands of opcode {opcode:#04x} at code offset {offset} run past the end of the code array")]
    TruncatedInstruction { opcode: u8, offset: usize },
    #[error("duplicate test identifier {id} (descriptor {descriptor})")]
    DuplicateIdentifier { id: String, descriptor: String },
    #[error("malformed class file: {context} at byte {offset}")]
    Malformed { context: &'static str, offset: usize },
}

/// One constant-pool slot. Slot 0 and the upper halves of `Long`/`Double`
/// entries are [`CpEntry::Unused`].
#[derive(Debug, Clone, PartialEq)]
pub enum CpEntry {
    Unused,
    Utf8(String),
    Integer(i32),
    Float(f32),
    Long(i64),
    Double(f64),
    Class { name_index: u16 },
    Str { string_index: u16 },
    FieldRef { class_index: u16, name_and_type_index: u16 },
    MethodRef { class_index: u16, name_and_type_index: u16 },
    InterfaceMethodRef { class_index: u16, name_and_type_index: u16 },
    NameAndType { name_index: u16, descriptor_index: u16 },
    MethodHandle { reference_kind: u8, reference_index: u16 },
    MethodType { descriptor_index: u16 },
    Dynamic { bootstrap_method_attr_index: u16, name_and_type_index: u16 },
    InvokeDynamic { bootstrap_method_attr_index: u16, name_and_type_index: u16 },
    Module { name_index: u16 },
    Package { name_index: u16 },
}

/// 1-based constant pool. `get` rejects index 0, out-of-range indices, and
/// unusable upper-half slots.
#[derive(Debug, Clone)]
pub struct ConstantPool {
    entries: Vec<CpEntry>,
}

impl ConstantPool {
    /// Declared pool size (number of slots including slot 0).
    pub fn slot_count(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: u16) -> Result<&CpEntry, ClassFileError> {
        match self.entries.get(index as usize) {
            None => Err(ClassFileError::BadIndex { index, context: "index out of range" }),
            Some(CpEntry::Unused) => {
                Err(ClassFileError::BadIndex { index, context: "slot is unusable" })
            }
            Some(entry) => Ok(entry),
        }
    }

    pub fn utf8(&self, index: u16) -> Result<&str, ClassFileError> {
        match self.get(index)? {
            CpEntry::Utf8(s) => Ok(s),
            _ => Err(ClassFileError::BadIndex { index, context: "expected a Utf8 entry" }),
        }
    }

    pub fn class_name(&self, index: u16) -> Result<&str, ClassFileError> {
        match self.get(index)? {
            CpEntry::Class { name_index } => self.utf8(*name_index),
            _ => Err(ClassFileError::BadIndex { index, context: "expected a Class entry" }),
        }
    }

    /// Checks that every index stored inside a pool entry resolves to an
    /// occupied slot of the expected kind.
    fn validate(&self) -> Result<(), ClassFileError> {
        for (i, entry) in self.entries.iter().enumerate() {
            let at = |index: u16| self.get(index);
            let expect_utf8 = |index: u16| self.utf8(index).map(|_| ());
            match *entry {
                CpEntry::Class { name_index }
                | CpEntry::Module { name_index }
                | CpEntry::Package { name_index } => expect_utf8(name_index)?,
                CpEntry::Str { string_index } => expect_utf8(string_index)?,
                CpEntry::FieldRef { class_index, name_and_type_index }
                | CpEntry::MethodRef { class_index, name_and_type_index }
                | CpEntry::InterfaceMethodRef { class_index, name_and_type_index } => {
                    match at(class_index)? {
                        CpEntry::Class { .. } => {}
                        _ => {
                            return Err(ClassFileError::BadIndex {
                                index: class_index,
                                context: "member reference expects a Class entry",
                            })
                        }
                    }
                    match at(name_and_type_index)? {
                        CpEntry::NameAndType { .. } => {}
                        _ => {
                            return Err(ClassFileError::BadIndex {
                                index: name_and_type_index,
                                context: "member reference expects a NameAndType entry",
                            })
                        }
                    }
                }
                CpEntry::NameAndType { name_index, descriptor_index } => {
                    expect_utf8(name_index)?;
                    expect_utf8(descriptor_index)?;
                }
                CpEntry::MethodHandle { reference_kind, reference_index } => {
                    if !(1..=9).contains(&reference_kind) {
                        return Err(ClassFileError::Malformed {
                            context: "method handle kind out of range",
                            offset: i,
                        });
                    }
                    match at(reference_index)? {
                        CpEntry::FieldRef { .. }
                        | CpEntry::MethodRef { .. }
                        | CpEntry::InterfaceMethodRef { .. } => {}
                        _ => {
                            return Err(ClassFileError::BadIndex {
                                index: reference_index,
                                context: "method handle expects a member reference",
                            })
                        }
                    }
                }
                CpEntry::MethodType { descriptor_index } => expect_utf8(descriptor_index)?,
                CpEntry::Dynamic { name_and_type_index, .. }
                | CpEntry::InvokeDynamic { name_and_type_index, .. } => {
                    match at(name_and_type_index)? {
                        CpEntry::NameAndType { .. } => {}
                        _ => {
                            return Err(ClassFileError::BadIndex {
                                index: name_and_type_index,
                                context: "dynamic constant expects a NameAndType entry",
                            })
                        }
                    }
                }
                CpEntry::Unused
                | CpEntry::Utf8(_)
                | CpEntry::Integer(_)
                | CpEntry::Float(_)
                | CpEntry::Long(_)
                | CpEntry::Double(_) => {}
            }
        }
        Ok(())
    }
}

/// The body of a `Code` attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBody {
    pub max_stack: u16,
    pub max_locals: u16,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct MethodInfo {
    pub access_flags: u16,
    pub name: String,
    pub descriptor: String,
    /// Type descriptors of runtime-visible annotations, in declaration order.
    pub annotations: Vec<String>,
    /// Absent for abstract and native methods.
    pub code: Option<CodeBody>,
}

#[derive(Debug, Clone)]
pub struct ClassFile {
    pub minor_version: u16,
    pub major_version: u16,
    pub constant_pool: ConstantPool,
    pub access_flags: u16,
    /// Internal (slash-separated) binary name of this class.
    pub this_class_name: String,
    pub super_class_name: Option<String>,
    pub methods: Vec<MethodInfo>,
    /// Non-fatal oddities found while parsing (unknown future version,
    /// trailing bytes, ...).
    pub warnings: Vec<String>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn truncated(&self, context: &'static str) -> ClassFileError {
        ClassFileError::Truncated { context, offset: self.pos }
    }

    fn take(&mut self, n: usize, context: &'static str) -> Result<&'a [u8], ClassFileError> {
        let end = self.pos.checked_add(n).ok_or_else(|| self.truncated(context))?;
        if end > self.bytes.len() {
            return Err(self.truncated(context));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn skip(&mut self, n: usize, context: &'static str) -> Result<(), ClassFileError> {
        self.take(n, context).map(|_| ())
    }

    fn u1(&mut self, context: &'static str) -> Result<u8, ClassFileError> {
        Ok(self.take(1, context)?[0])
    }

    fn u2(&mut self, context: &'static str) -> Result<u16, ClassFileError> {
        let b = self.take(2, context)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u4(&mut self, context: &'static str) -> Result<u32, ClassFileError> {
        let b = self.take(4, context)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn is_empty(&self) -> bool {
        self.pos >= self.bytes.len()
    }
}

/// JVM "modified UTF-8": NUL as `C0 80`, supplementary characters as CESU-8
/// surrogate pairs, no 4-byte forms.
fn decode_modified_utf8(bytes: &[u8], index: u16) -> Result<String, ClassFileError> {
    let bad = || ClassFileError::BadUtf8 { index };
    let mut out = String::with_capacity(bytes.len());
    let mut i = 0usize;
    while i < bytes.len() {
        let b0 = bytes[i];
        if b0 & 0x80 == 0 {
            // A raw zero byte is technically invalid (NUL must be C0 80) but
            // harmless to accept.
            out.push(b0 as char);
            i += 1;
        } else if b0 & 0xe0 == 0xc0 {
            let b1 = *bytes.get(i + 1).ok_or_else(bad)?;
            if b1 & 0xc0 != 0x80 {
                return Err(bad());
            }
            let cp = (u32::from(b0 & 0x1f) << 6) | u32::from(b1 & 0x3f);
            out.push(char::from_u32(cp).ok_or_else(bad)?);
            i += 2;
        } else if b0 & 0xf0 == 0xe0 {
            let decode3 = |at: usize| -> Result<u32, ClassFileError> {
                let c0 = *bytes.get(at).ok_or_else(bad)?;
                let c1 = *bytes.get(at + 1).ok_or_else(bad)?;
                let c2 = *bytes.get(at + 2).ok_or_else(bad)?;
                if c0 & 0xf0 != 0xe0 || c1 & 0xc0 != 0x80 || c2 & 0xc0 != 0x80 {
                    return Err(bad());
                }
                Ok((u32::from(c0 & 0x0f) << 12) | (u32::from(c1 & 0x3f) << 6) | u32::from(c2 & 0x3f))
            };
            let cp = decode3(i)?;
            if (0xd800..=0xdbff).contains(&cp) {
                let low = decode3(i + 3)?;
                if !(0xdc00..=0xdfff).contains(&low) {
                    return Err(bad());
                }
                let combined = 0x10000 + ((cp - 0xd800) << 10) + (low - 0xdc00);
                out.push(char::from_u32(combined).ok_or_else(bad)?);
                i += 6;
            } else {
                out.push(char::from_u32(cp).ok_or_else(bad)?);
                i += 3;
            }
        } else {
            return Err(bad());
        }
    }
    Ok(out)
}

fn parse_constant_pool(r: &mut Reader) -> Result<ConstantPool, ClassFileError> {
    let declared = r.u2("constant pool count")? as usize;
    let mut entries = vec![CpEntry::Unused];
    while entries.len() < declared {
        let index = entries.len() as u16;
        let tag = r.u1("constant tag")?;
        let entry = match tag {
            1 => {
                let len = r.u2("Utf8 length")? as usize;
                let raw = r.take(len, "Utf8 bytes")?;
                CpEntry::Utf8(decode_modified_utf8(raw, index)?)
            }
            3 => CpEntry::Integer(r.u4("Integer value")? as i32),
            4 => CpEntry::Float(f32::from_bits(r.u4("Float value")?)),
            5 => {
                let hi = u64::from(r.u4("Long high word")?);
                let lo = u64::from(r.u4("Long low word")?);
                CpEntry::Long(((hi << 32) | lo) as i64)
            }
            6 => {
                let hi = u64::from(r.u4("Double high word")?);
                let lo = u64::from(r.u4("Double low word")?);
                CpEntry::Double(f64::from_bits((hi << 32) | lo))
            }
            7 => CpEntry::Class { name_index: r.u2("Class name index")? },
            8 => CpEntry::Str { string_index: r.u2("String index")? },
            9 => CpEntry::FieldRef {
                class_index: r.u2("Fieldref class")?,
                name_and_type_index: r.u2("Fieldref descriptor")?,
            },
            10 => CpEntry::MethodRef {
                class_index: r.u2("Methodref class")?,
                name_and_type_index: r.u2("Methodref descriptor")?,
            },
            11 => CpEntry::InterfaceMethodRef {
                class_index: r.u2("InterfaceMethodref class")?,
                name_and_type_index: r.u2("InterfaceMethodref descriptor")?,
            },
            12 => CpEntry::NameAndType {
                name_index: r.u2("NameAndType name")?,
                descriptor_index: r.u2("NameAndType descriptor")?,
            },
            15 => CpEntry::MethodHandle {
                reference_kind: r.u1("MethodHandle kind")?,
                reference_index: r.u2("MethodHandle reference")?,
            },
            16 => CpEntry::MethodType { descriptor_index: r.u2("MethodType descriptor")? },
            17 => CpEntry::Dynamic {
                bootstrap_method_attr_index: r.u2("Dynamic bootstrap index")?,
                name_and_type_index: r.u2("Dynamic descriptor")?,
            },
            18 => CpEntry::InvokeDynamic {
                bootstrap_method_attr_index: r.u2("InvokeDynamic bootstrap index")?,
                name_and_type_index: r.u2("InvokeDynamic descriptor")?,
            },
            19 => CpEntry::Module { name_index: r.u2("Module name")? },
            20 => CpEntry::Package { name_index: r.u2("Package name")? },
            _ => return Err(ClassFileError::BadConstantTag { tag, index }),
        };
        let two_slots = matches!(entry, CpEntry::Long(_) | CpEntry::Double(_));
        entries.push(entry);
        if two_slots {
            if entries.len() >= declared {
                return Err(ClassFileError::Malformed {
                    context: "eight-byte constant overruns the declared pool size",
                    offset: r.pos,
                });
            }
            entries.push(CpEntry::Unused);
        }
    }
    let pool = ConstantPool { entries };
    pool.validate()?;
    Ok(pool)
}

/// Skips one `element_value` of an annotation, recursing into nested
/// annotations and arrays.
fn skip_element_value(r: &mut Reader) -> Result<(), ClassFileError> {
    let tag = r.u1("annotation element tag")?;
    match tag {
        b'B' | b'C' | b'D' | b'F' | b'I' | b'J' | b'S' | b'Z' | b's' | b'c' => {
            r.skip(2, "annotation element value")?;
        }
        b'e' => r.skip(4, "annotation enum value")?,
        b'@' => skip_annotation_body(r)?,
        b'[' => {
            let n = r.u2("annotation array length")?;
            for _ in 0..n {
                skip_element_value(r)?;
            }
        }
        _ => {
            return Err(ClassFileError::Malformed {
                context: "unknown annotation element tag",
                offset: r.pos,
            })
        }
    }
    Ok(())
}

fn skip_annotation_body(r: &mut Reader) -> Result<(), ClassFileError> {
    let _type_index = r.u2("annotation type")?;
    let pairs = r.u2("annotation pair count")?;
    for _ in 0..pairs {
        let _name = r.u2("annotation element name")?;
        skip_element_value(r)?;
    }
    Ok(())
}

fn parse_annotations(raw: &[u8], pool: &ConstantPool) -> Result<Vec<String>, ClassFileError> {
    let mut r = Reader::new(raw);
    let count = r.u2("annotation count")?;
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let type_index = r.u2("annotation type")?;
        out.push(pool.utf8(type_index)?.to_string());
        let pairs = r.u2("annotation pair count")?;
        for _ in 0..pairs {
            let _name = r.u2("annotation element name")?;
            skip_element_value(&mut r)?;
        }
    }
    if !r.is_empty() {
        return Err(ClassFileError::Malformed {
            context: "trailing bytes in annotation attribute",
            offset: r.pos,
        });
    }
    Ok(out)
}

fn parse_code_attribute(raw: &[u8]) -> Result<CodeBody, ClassFileError> {
    let mut r = Reader::new(raw);
    let max_stack = r.u2("Code max_stack")?;
    let max_locals = r.u2("Code max_locals")?;
    let code_len = r.u4("Code length")? as usize;
    let bytes = r.take(code_len, "Code bytes")?.to_vec();
    let exception_entries = r.u2("exception table length")?;
    r.skip(exception_entries as usize * 8, "exception table")?;
    let attr_count = r.u2("Code attribute count")?;
    for _ in 0..attr_count {
        let _name = r.u2("Code attribute name")?;
        let len = r.u4("Code attribute length")? as usize;
        r.skip(len, "Code attribute body")?;
    }
    if !r.is_empty() {
        return Err(ClassFileError::Malformed {
            context: "trailing bytes in Code attribute",
            offset: r.pos,
        });
    }
    Ok(CodeBody { max_stack, max_locals, bytes })
}

/// Parses one field_info or method_info structure. For fields the caller
/// discards the result; the wire shape is identical.
fn parse_member(
    r: &mut Reader,
    pool: &ConstantPool,
    keep_body: bool,
) -> Result<MethodInfo, ClassFileError> {
    let access_flags = r.u2("member access flags")?;
    let name = pool.utf8(r.u2("member name")?)?.to_string();
    let descriptor = pool.utf8(r.u2("member descriptor")?)?.to_string();
    let mut annotations = Vec::new();
    let mut code = None;
    let attr_count = r.u2("member attribute count")?;
    for _ in 0..attr_count {
        let name_index = r.u2("attribute name")?;
        let len = r.u4("attribute length")? as usize;
        let attr_name = pool.utf8(name_index)?;
        let body = r.take(len, "attribute body")?;
        if !keep_body {
            continue;
        }
        match attr_name {
            // At most one Code attribute is legal; tolerate extras by
            // keeping the first.
            "Code" if code.is_none() => code = Some(parse_code_attribute(body)?),
            "RuntimeVisibleAnnotations" => {
                annotations.extend(parse_annotations(body, pool)?);
            }
            _ => {}
        }
    }
    Ok(MethodInfo { access_flags, name, descriptor, annotations, code })
}

/// Parses a `.class` file image.
///
/// Accepts any major version; versions newer than
/// [`MAX_KNOWN_MAJOR_VERSION`] add a warning and are parsed best-effort.
pub fn parse_class(bytes: &[u8]) -> Result<ClassFile, ClassFileError> {
    let mut r = Reader::new(bytes);
    let magic = r.u4("magic number")?;
    if magic != 0xCAFE_BABE {
        return Err(ClassFileError::MagicMismatch { found: magic });
    }
    let minor_version = r.u2("minor version")?;
    let major_version = r.u2("major version")?;
    let mut warnings = Vec::new();
    if major_version > MAX_KNOWN_MAJOR_VERSION {
        warnings.push(format!(
            "class file version {major_version}.{minor_version} is newer than \
             the supported {MAX_KNOWN_MAJOR_VERSION}; parsing best-effort"
        ));
    }

    let constant_pool = parse_constant_pool(&mut r)?;
    let access_flags = r.u2("class access flags")?;

    let this_class = r.u2("this_class index")?;
    let this_class_name = constant_pool.class_name(this_class)?.to_string();
    if this_class_name.is_empty() {
        return Err(ClassFileError::Malformed { context: "empty class name", offset: r.pos });
    }
    let super_class = r.u2("super_class index")?;
    let super_class_name = if super_class == 0 {
        None
    } else {
        Some(constant_pool.class_name(super_class)?.to_string())
    };

    let interface_count = r.u2("interface count")?;
    for _ in 0..interface_count {
        let idx = r.u2("interface index")?;
        constant_pool.class_name(idx)?;
    }

    let field_count = r.u2("field count")?;
    for _ in 0..field_count {
        parse_member(&mut r, &constant_pool, false)?;
    }

    let method_count = r.u2("method count")?;
    let mut methods = Vec::with_capacity(method_count as usize);
    for _ in 0..method_count {
        methods.push(parse_member(&mut r, &constant_pool, true)?);
    }

    let attr_count = r.u2("class attribute count")?;
    for _ in 0..attr_count {
        let name_index = r.u2("class attribute name")?;
        let len = r.u4("class attribute length")? as usize;
        constant_pool.utf8(name_index)?;
        r.skip(len, "class attribute body")?;
    }
    if !r.is_empty() {
        warnings.push(format!("{} trailing bytes after class structure", bytes.len() - r.pos));
    }

    Ok(ClassFile {
        minor_version,
        major_version,
        constant_pool,
        access_flags,
        this_class_name,
        super_class_name,
        methods,
        warnings,
    })
}

/// How test methods are recognised.
#[derive(Debug, Clone)]
pub struct TestDetectionConfig {
    /// Annotation type descriptors that mark a test method.
    pub annotation_descriptors: Vec<String>,
    /// When set, a method whose name starts with this prefix and that has a
    /// body also counts as a test (JUnit 3 style).
    pub name_prefix: Option<String>,
}

impl Default for TestDetectionConfig {
    fn default() -> Self {
        TestDetectionConfig {
            annotation_descriptors: vec![
                "Lorg/junit/Test;".to_string(),
                "Lorg/junit/jupiter/api/Test;".to_string(),
            ],
            name_prefix: Some("test".to_string()),
        }
    }
}

/// Whether `method` is a test case under `config`. Constructors and class
/// initialisers never are. Annotated methods qualify even without a body
/// (the body requirement applies to name-based detection only); callers that
/// need instructions must still check for code.
pub fn is_test_method(method: &MethodInfo, config: &TestDetectionConfig) -> bool {
    if method.name.starts_with('<') {
        return false;
    }
    if method.annotations.iter().any(|a| config.annotation_descriptors.contains(a)) {
        return true;
    }
    match &config.name_prefix {
        Some(prefix) => method.name.starts_with(prefix.as_str()) && method.code.is_some(),
        None => false,
    }
}

/// Extracts the decoded body of every test method that has one, in
/// declaration order.
///
/// Identifiers are `binary.ClassName#methodName`; when several test methods
/// share a name, each identifier gets the method descriptor appended so the
/// overloads stay distinct. Two test methods with the same name *and*
/// descriptor make the class ill-formed.
pub fn list_test_cases(
    class: &ClassFile,
    config: &TestDetectionConfig,
) -> Result<Vec<InstructionSequence>, ClassFileError> {
    let binary_name = class.this_class_name.replace('/', ".");
    let picked: Vec<&MethodInfo> = class
        .methods
        .iter()
        .filter(|m| is_test_method(m, config) && m.code.is_some())
        .collect();

    let mut name_counts: HashMap<&str, usize> = HashMap::new();
    for m in &picked {
        *name_counts.entry(m.name.as_str()).or_insert(0) += 1;
    }
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    for m in &picked {
        if !seen.insert((m.name.as_str(), m.descriptor.as_str())) {
            return Err(ClassFileError::DuplicateIdentifier {
                id: format!("{binary_name}#{}", m.name),
                descriptor: m.descriptor.clone(),
            });
        }
    }

    let mut out = Vec::with_capacity(picked.len());
    for m in picked {
        let id = if name_counts[m.name.as_str()] > 1 {
            format!("{binary_name}#{}{}", m.name, m.descriptor)
        } else {
            format!("{binary_name}#{}", m.name)
        };
        let body = m.code.as_ref().expect("filtered on code presence");
        let items = decode_code(&body.bytes)?;
        for ins in &items {
            for &operand in &ins.cp_operands {
                class.constant_pool.get(operand)?;
            }
        }
        out.push(InstructionSequence::new(id, items));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn method(name: &str, annotations: &[&str], has_code: bool) -> MethodInfo {
        MethodInfo {
            access_flags: 0x0001,
            name: name.to_string(),
            descriptor: "()V".to_string(),
            annotations: annotations.iter().map(|s| s.to_string()).collect(),
            code: has_code.then(|| CodeBody { max_stack: 0, max_locals: 1, bytes: vec![0xb1] }),
        }
    }

    #[test]
    fn magic_mismatch_is_reported_with_the_found_value() {
        let err = parse_class(&[0xde, 0xad, 0xbe, 0xef, 0, 0]).unwrap_err();
        assert!(matches!(err, ClassFileError::MagicMismatch { found: 0xdeadbeef }));
    }

    #[test]
    fn truncated_header_is_rejected() {
        let err = parse_class(&[0xca, 0xfe]).unwrap_err();
        assert!(matches!(err, ClassFileError::Truncated { .. }));
    }

    #[test]
    fn annotated_method_is_a_test_under_default_config() {
        let cfg = TestDetectionConfig::default();
        assert!(is_test_method(&method("whenEmptyReturnsZero", &["Lorg/junit/Test;"], true), &cfg));
        assert!(is_test_method(&method("check", &["Lorg/junit/jupiter/api/Test;"], true), &cfg));
    }

    #[test]
    fn constructor_is_never_a_test() {
        let cfg = TestDetectionConfig::default();
        assert!(!is_test_method(&method("<init>", &["Lorg/junit/Test;"], true), &cfg));
        assert!(!is_test_method(&method("<clinit>", &[], true), &cfg));
    }

    #[test]
    fn name_prefix_requires_a_body() {
        let cfg = TestDetectionConfig::default();
        assert!(is_test_method(&method("testParse", &[], true), &cfg));
        assert!(!is_test_method(&method("testParse", &[], false), &cfg));
        // An annotated method qualifies even without a body.
        assert!(is_test_method(&method("testParse", &["Lorg/junit/Test;"], false), &cfg));
    }

    #[test]
    fn name_prefix_detection_can_be_disabled() {
        let cfg = TestDetectionConfig {
            annotation_descriptors: vec!["Lorg/junit/Test;".to_string()],
            name_prefix: None,
        };
        assert!(!is_test_method(&method("testParse", &[], true), &cfg));
    }

    #[test]
    fn modified_utf8_handles_nul_and_supplementary_chars() {
        // NUL encoded as C0 80.
        assert_eq!(decode_modified_utf8(&[0x41, 0xc0, 0x80, 0x42], 1).unwrap(), "A\0B");
        // U+1F600 as a CESU-8 surrogate pair: D83D DE00.
        let bytes = [0xed, 0xa0, 0xbd, 0xed, 0xb8, 0x80];
        assert_eq!(decode_modified_utf8(&bytes, 1).unwrap(), "\u{1f600}");
        // Truncated sequence.
        assert!(decode_modified_utf8(&[0xc3], 1).is_err());
        // 4-byte standard UTF-8 is not legal in class files.
        assert!(decode_modified_utf8(&[0xf0, 0x9f, 0x98, 0x80], 1).is_err());
    }
}
