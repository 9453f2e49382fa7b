//! Decoding of `Code` attribute byte arrays into instruction streams.

use super::opcode::{self, OpcodeCategory, Operands};
use super::ClassFileError;

/// One decoded JVM instruction.
///
/// `immediates` holds inline operand bytes (local slots, literal values,
/// branch offsets, switch tables); `cp_operands` holds constant-pool indices.
/// Alignment padding of switch instructions belongs to neither.
///
/// A `wide`-prefixed instruction keeps `opcode = 0xC4` with the embedded
/// opcode as the first immediate byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    /// Byte offset from the start of the code array.
    pub offset: u32,
    pub opcode: u8,
    pub immediates: Vec<u8>,
    pub cp_operands: Vec<u16>,
}

impl Instruction {
    /// Number of code-array bytes this instruction occupied, padding included.
    pub fn encoded_len(&self) -> usize {
        let cp_bytes = match self.opcode {
            0x12 => self.cp_operands.len(), // ldc: 1-byte pool index
            _ => 2 * self.cp_operands.len(),
        };
        let pad = match self.opcode {
            0xaa | 0xab => switch_pad(self.offset),
            _ => 0,
        };
        1 + pad + self.immediates.len() + cp_bytes
    }

    /// Instruction family; `wide` is classified by its embedded opcode.
    pub fn category(&self) -> OpcodeCategory {
        if self.opcode == 0xc4 {
            match self.immediates.first() {
                Some(&embedded) => opcode::category_of(embedded),
                None => OpcodeCategory::Misc,
            }
        } else {
            opcode::category_of(self.opcode)
        }
    }
}

/// The decoded body of one method, tagged with the test identifier it
/// belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructionSequence {
    pub owner: String,
    pub items: Vec<Instruction>,
}

impl InstructionSequence {
    pub fn new(owner: impl Into<String>, items: Vec<Instruction>) -> Self {
        InstructionSequence { owner: owner.into(), items }
    }
}

/// Padding bytes between a switch opcode at `offset` and its 4-byte-aligned
/// operands.
fn switch_pad(offset: u32) -> usize {
    let operand_start = offset as usize + 1;
    (4 - operand_start % 4) % 4
}

/// Decodes a `Code` attribute byte array into instructions.
///
/// Offsets strictly increase and every operand byte is accounted for, so the
/// decoded stream re-serialises to exactly `code.len()` bytes. Fails on
/// reserved opcodes (`> 0xC9`), a non-widenable opcode after `wide`, or
/// operands running past the end of the array.
pub fn decode_code(code: &[u8]) -> Result<Vec<Instruction>, ClassFileError> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    while pos < code.len() {
        let offset = pos as u32;
        let op = code[pos];
        pos += 1;
        let layout = opcode::operands(op)
            .ok_or(ClassFileError::UnknownOpcode { opcode: op, offset: offset as usize })?;
        let truncated = || ClassFileError::TruncatedInstruction { opcode: op, offset: offset as usize };

        let mut immediates = Vec::new();
        let mut cp_operands = Vec::new();
        match layout {
            Operands::None => {}
            Operands::Imm(n) => {
                immediates = take(code, &mut pos, n as usize).ok_or_else(truncated)?;
            }
            Operands::Cp1 => {
                let b = take(code, &mut pos, 1).ok_or_else(truncated)?;
                cp_operands.push(b[0] as u16);
            }
            Operands::Cp2 => {
                let b = take(code, &mut pos, 2).ok_or_else(truncated)?;
                cp_operands.push(u16::from_be_bytes([b[0], b[1]]));
            }
            Operands::Cp2Imm(n) => {
                let b = take(code, &mut pos, 2).ok_or_else(truncated)?;
                cp_operands.push(u16::from_be_bytes([b[0], b[1]]));
                immediates = take(code, &mut pos, n as usize).ok_or_else(truncated)?;
            }
            Operands::Wide => {
                let embedded = *code.get(pos).ok_or_else(truncated)?;
                if !opcode::widenable(embedded) {
                    return Err(ClassFileError::UnknownOpcode { opcode: embedded, offset: pos });
                }
                pos += 1;
                let operand_len = if embedded == 0x84 { 4 } else { 2 }; // iinc: index + const
                let b = take(code, &mut pos, operand_len).ok_or_else(truncated)?;
                immediates.push(embedded);
                immediates.extend_from_slice(&b);
            }
            Operands::TableSwitch => {
                pos += switch_pad(offset);
                let header = take(code, &mut pos, 12).ok_or_else(truncated)?;
                let low = i32::from_be_bytes([header[4], header[5], header[6], header[7]]);
                let high = i32::from_be_bytes([header[8], header[9], header[10], header[11]]);
                let entries = i64::from(high) - i64::from(low) + 1;
                if entries < 0 {
                    return Err(truncated());
                }
                let table_len = usize::try_from(entries).map_err(|_| truncated())? * 4;
                let table = take(code, &mut pos, table_len).ok_or_else(truncated)?;
                immediates = header;
                immediates.extend_from_slice(&table);
            }
            Operands::LookupSwitch => {
                pos += switch_pad(offset);
                let header = take(code, &mut pos, 8).ok_or_else(truncated)?;
                let npairs = i32::from_be_bytes([header[4], header[5], header[6], header[7]]);
                if npairs < 0 {
                    return Err(truncated());
                }
                let table_len = npairs as usize * 8;
                let table = take(code, &mut pos, table_len).ok_or_else(truncated)?;
                immediates = header;
                immediates.extend_from_slice(&table);
            }
        }
        out.push(Instruction { offset, opcode: op, immediates, cp_operands });
    }
    Ok(out)
}

fn take(code: &[u8], pos: &mut usize, n: usize) -> Option<Vec<u8>> {
    if *pos + n > code.len() {
        // Leave pos untouched; the caller reports the instruction offset.
        return None;
    }
    let out = code[*pos..*pos + n].to_vec();
    *pos += n;
    Some(out)
}
