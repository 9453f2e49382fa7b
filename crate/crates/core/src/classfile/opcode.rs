//! Operand layouts and coarse categories for the JVM instruction set
//! (opcodes `0x00`..=`0xC9`).

/// How the bytes following an opcode are structured.
///
/// "Immediate" operands are inline values (local-variable slots, literal
/// constants, branch offsets); constant-pool operands are indices into the
/// class's constant pool and are tracked separately so encoders can drop them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Operands {
    /// No operand bytes.
    None,
    /// `n` immediate bytes.
    Imm(u8),
    /// One 1-byte constant-pool index (`ldc` only).
    Cp1,
    /// One 2-byte constant-pool index.
    Cp2,
    /// A 2-byte constant-pool index followed by `n` immediate bytes
    /// (`invokeinterface`, `invokedynamic`, `multianewarray`).
    Cp2Imm(u8),
    /// `wide` prefix: a second opcode byte plus widened operands.
    Wide,
    /// `tableswitch`: alignment padding, then a variable-length jump table.
    TableSwitch,
    /// `lookupswitch`: alignment padding, then a variable-length pair table.
    LookupSwitch,
}

/// Operand layout for `op`, or `None` if the byte is not a defined opcode.
pub(crate) fn operands(op: u8) -> Option<Operands> {
    use Operands::*;
    Some(match op {
        0x00..=0x0f => None,          // nop, constant pushes
        0x10 => Imm(1),               // bipush
        0x11 => Imm(2),               // sipush
        0x12 => Cp1,                  // ldc
        0x13 | 0x14 => Cp2,           // ldc_w, ldc2_w
        0x15..=0x19 => Imm(1),        // iload..aload
        0x1a..=0x35 => None,          // *load_<n>, array loads
        0x36..=0x3a => Imm(1),        // istore..astore
        0x3b..=0x83 => None,          // *store_<n>, array stores, stack, arithmetic
        0x84 => Imm(2),               // iinc
        0x85..=0x98 => None,          // conversions, comparisons
        0x99..=0xa8 => Imm(2),        // ifeq..jsr
        0xa9 => Imm(1),               // ret
        0xaa => TableSwitch,
        0xab => LookupSwitch,
        0xac..=0xb1 => None,          // ireturn..return
        0xb2..=0xb8 => Cp2,           // getstatic..invokestatic
        0xb9 | 0xba => Cp2Imm(2),     // invokeinterface, invokedynamic
        0xbb => Cp2,                  // new
        0xbc => Imm(1),               // newarray
        0xbd => Cp2,                  // anewarray
        0xbe | 0xbf => None,          // arraylength, athrow
        0xc0 | 0xc1 => Cp2,           // checkcast, instanceof
        0xc2 | 0xc3 => None,          // monitorenter, monitorexit
        0xc4 => Wide,
        0xc5 => Cp2Imm(1),            // multianewarray
        0xc6 | 0xc7 => Imm(2),        // ifnull, ifnonnull
        0xc8 | 0xc9 => Imm(4),        // goto_w, jsr_w
        _ => return Option::None,
    })
}

/// Opcodes that may follow a `wide` prefix with a widened 2-byte index.
/// `iinc` additionally takes a widened 2-byte increment.
pub(crate) fn widenable(op: u8) -> bool {
    matches!(op, 0x15..=0x19 | 0x36..=0x3a | 0x84 | 0xa9)
}

/// Coarse instruction families. Every defined opcode belongs to exactly one
/// category, so a filter over all categories keeps every instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpcodeCategory {
    /// Inline constant pushes: `aconst_null`, `iconst_*`, `lconst_*`,
    /// `fconst_*`, `dconst_*`, `bipush`, `sipush`.
    ConstPush,
    /// Constant-pool loads: `ldc`, `ldc_w`, `ldc2_w`.
    ConstLoad,
    /// Local-variable and array loads.
    Load,
    /// Local-variable and array stores.
    Store,
    /// Operand-stack shuffling: `pop`, `dup*`, `swap`.
    Stack,
    /// Arithmetic, logic, and `iinc`.
    Arithmetic,
    /// Primitive conversions.
    Conversion,
    /// `lcmp`, `fcmp*`, `dcmp*`.
    Comparison,
    /// Conditional and unconditional jumps, switches, `jsr`/`ret`.
    Branch,
    /// All `*return` forms.
    Return,
    /// `getfield`, `putfield`, `getstatic`, `putstatic`.
    FieldAccess,
    /// All invocation opcodes.
    Invoke,
    /// `new`, `newarray`, `anewarray`, `multianewarray`.
    Allocation,
    /// `checkcast`, `instanceof`, `arraylength`.
    TypeOp,
    /// `athrow`.
    Throw,
    /// `monitorenter`, `monitorexit`.
    Monitor,
    /// `nop` and anything without a better home.
    Misc,
}

impl OpcodeCategory {
    /// Every category, i.e. the identity filter.
    pub fn all() -> Vec<OpcodeCategory> {
        use OpcodeCategory::*;
        vec![
            ConstPush, ConstLoad, Load, Store, Stack, Arithmetic, Conversion,
            Comparison, Branch, Return, FieldAccess, Invoke, Allocation,
            TypeOp, Throw, Monitor, Misc,
        ]
    }
}

/// Category of a raw opcode byte. The `wide` prefix is classified by its
/// embedded opcode elsewhere; here it falls back to `Misc`.
pub(crate) fn category_of(op: u8) -> OpcodeCategory {
    use OpcodeCategory::*;
    match op {
        0x01..=0x11 => ConstPush,
        0x12..=0x14 => ConstLoad,
        0x15..=0x35 => Load,
        0x36..=0x56 => Store,
        0x57..=0x5f => Stack,
        0x60..=0x84 => Arithmetic,
        0x85..=0x93 => Conversion,
        0x94..=0x98 => Comparison,
        0x99..=0xab | 0xc6..=0xc9 => Branch,
        0xac..=0xb1 => Return,
        0xb2..=0xb5 => FieldAccess,
        0xb6..=0xba => Invoke,
        0xbb..=0xbd | 0xc5 => Allocation,
        0xbe | 0xc0 | 0xc1 => TypeOp,
        0xbf => Throw,
        0xc2 | 0xc3 => Monitor,
        _ => Misc, // nop, wide
    }
}
