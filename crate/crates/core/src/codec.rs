//! Payload bit streams: segment headers, character coding, terminator and fill.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::DATA_BITS;

const ALPHANUMERIC: &str = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:";
const PAD_BYTES: [u8; 2] = [0b1110_1100, 0b0001_0001];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("character {ch:?} is not encodable in {mode} mode")]
    InvalidCharacter { ch: char, mode: Mode },
    #[error("{count} characters exceed the {bits}-bit count field")]
    TooManyCharacters { count: usize, bits: usize },
    #[error("payload of {0} bits exceeds the {DATA_BITS}-bit capacity")]
    Overflow(usize),
    #[error("unsupported mode indicator {0:04b}")]
    UnsupportedMode(u8),
    #[error("declared length {declared} needs {needed} bits but only {available} are present")]
    Truncated {
        declared: usize,
        needed: usize,
        available: usize,
    },
    #[error("bit string too short for a segment header ({0} bits)")]
    MissingHeader(usize),
    #[error("invalid bit string literal: {0}")]
    BadLiteral(String),
}

/// An ordered sequence of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    /// Append the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u32, width: usize) {
        debug_assert!(width <= 32 && (width == 32 || value >> width == 0));
        for i in (0..width).rev() {
            self.0.push((value >> i) & 1 == 1);
        }
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    /// Read `width` bits at `pos` as an unsigned integer.
    pub fn read(&self, pos: usize, width: usize) -> Option<u32> {
        let slice = self.0.get(pos..pos + width)?;
        Some(slice.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32))
    }

    /// Pack MSB first; a trailing partial byte is zero-filled.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut out = BitString::new();
        for &b in bytes {
            out.push_bits(b as u32, 8);
        }
        out
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl FromStr for BitString {
    type Err = CodecError;

    /// Parses `0`/`1` characters; ASCII whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_ascii_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CodecError::BadLiteral(format!("unexpected {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Numeric,
    Alphanumeric,
    Byte,
}

impl Mode {
    pub fn indicator(self) -> u8 {
        match self {
            Mode::Numeric => 0b0001,
            Mode::Alphanumeric => 0b0010,
            Mode::Byte => 0b0100,
        }
    }

    pub fn from_indicator(bits: u8) -> Result<Self, CodecError> {
        match bits {
            0b0001 => Ok(Mode::Numeric),
            0b0010 => Ok(Mode::Alphanumeric),
            0b0100 => Ok(Mode::Byte),
            other => Err(CodecError::UnsupportedMode(other)),
        }
    }

    /// Width of the character count field at Version 1.
    pub fn count_bits(self) -> usize {
        match self {
            Mode::Numeric => 10,
            Mode::Alphanumeric => 9,
            Mode::Byte => 8,
        }
    }

    /// Most compact mode able to carry `text`.
    pub fn best_for(text: &str) -> Mode {
        if text.chars().all(|c| c.is_ascii_digit()) {
            Mode::Numeric
        } else if text.chars().all(|c| ALPHANUMERIC.contains(c)) {
            Mode::Alphanumeric
        } else {
            Mode::Byte
        }
    }

    /// Bits needed for `chars` characters of this mode, header included.
    pub fn encoded_len(self, chars: usize) -> usize {
        4 + self.count_bits()
            + match self {
                Mode::Numeric => 10 * (chars / 3) + [0, 4, 7][chars % 3],
                Mode::Alphanumeric => 11 * (chars / 2) + 6 * (chars % 2),
                Mode::Byte => 8 * chars,
            }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Numeric => "numeric",
            Mode::Alphanumeric => "alphanumeric",
            Mode::Byte => "byte",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "numeric" => Ok(Mode::Numeric),
            "alnum" | "alphanumeric" => Ok(Mode::Alphanumeric),
            "byte" => Ok(Mode::Byte),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub mode: Mode,
    pub text: String,
}

impl Segment {
    pub fn new(mode: Mode, text: impl Into<String>) -> Self {
        Segment {
            mode,
            text: text.into(),
        }
    }

    pub fn auto(text: impl Into<String>) -> Self {
        let text = text.into();
        Segment {
            mode: Mode::best_for(&text),
            text,
        }
    }

    /// Character count as stored in the count field.
    pub fn char_count(&self) -> usize {
        match self.mode {
            Mode::Byte => self.text.len(),
            _ => self.text.chars().count(),
        }
    }
}

fn alphanumeric_value(ch: char) -> Option<u32> {
    ALPHANUMERIC.find(ch).map(|i| i as u32)
}

/// Mode indicator, count field and character data for one segment.
pub fn encode_segment(s: &Segment) -> Result<BitString, CodecError> {
    let count = s.char_count();
    let width = s.mode.count_bits();
    if count >= 1 << width {
        return Err(CodecError::TooManyCharacters { count, bits: width });
    }
    let mut out = BitString::new();
    out.push_bits(s.mode.indicator() as u32, 4);
    out.push_bits(count as u32, width);
    match s.mode {
        Mode::Numeric => {
            let digits: Vec<u32> = s
                .text
                .chars()
                .map(|ch| {
                    ch.to_digit(10).ok_or(CodecError::InvalidCharacter {
                        ch,
                        mode: Mode::Numeric,
                    })
                })
                .collect::<Result<_, _>>()?;
            for chunk in digits.chunks(3) {
                let value = chunk.iter().fold(0, |acc, &d| acc * 10 + d);
                out.push_bits(value, chunk.len() * 3 + 1);
            }
        }
        Mode::Alphanumeric => {
            let values: Vec<u32> = s
                .text
                .chars()
                .map(|ch| {
                    alphanumeric_value(ch).ok_or(CodecError::InvalidCharacter {
                        ch,
                        mode: Mode::Alphanumeric,
                    })
                })
                .collect::<Result<_, _>>()?;
            for chunk in values.chunks(2) {
                let value = chunk.iter().fold(0, |acc, &v| acc * 45 + v);
                out.push_bits(value, chunk.len() * 5 + 1);
            }
        }
        Mode::Byte => {
            for &b in s.text.as_bytes() {
                out.push_bits(b as u32, 8);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Payload {
    pub bits: BitString,
    pub declared_length: usize,
    pub padded: bool,
}

/// Concatenate segments and, when `pad` is set, append terminator, byte
/// alignment and the alternating fill bytes up to the full 152 bits.
pub fn assemble_payload(segments: &[Segment], pad: bool) -> Result<Payload, CodecError> {
    let mut bits = BitString::new();
    let mut declared_length = 0;
    for s in segments {
        bits.extend(&encode_segment(s)?);
        declared_length += s.char_count();
    }
    if bits.len() > DATA_BITS {
        return Err(CodecError::Overflow(bits.len()));
    }
    if pad {
        let terminator = (DATA_BITS - bits.len()).min(4);
        bits.push_bits(0, terminator);
        while !bits.len().is_multiple_of(8) {
            bits.push(false);
        }
        for &b in PAD_BYTES.iter().cycle().take((DATA_BITS - bits.len()) / 8) {
            bits.push_bits(b as u32, 8);
        }
        debug_assert_eq!(bits.len(), DATA_BITS);
    }
    Ok(Payload {
        bits,
        declared_length,
        padded: pad,
    })
}

/// Extend `bits` with terminator, alignment and fill exactly as
/// [`assemble_payload`] would for a payload of this length.
pub fn pad_to_capacity(bits: &BitString) -> BitString {
    let mut out = bits.clone();
    let terminator = DATA_BITS.saturating_sub(out.len()).min(4);
    out.push_bits(0, terminator);
    while !out.len().is_multiple_of(8) && out.len() < DATA_BITS {
        out.push(false);
    }
    for &b in PAD_BYTES
        .iter()
        .cycle()
        .take(DATA_BITS.saturating_sub(out.len()) / 8)
    {
        out.push_bits(b as u32, 8);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedPayload {
    pub text: String,
    pub mode: Mode,
    pub declared_length: usize,
    /// Bits consumed by the segment, header included.
    pub bits_used: usize,
}

/// Decode the first segment. Anything after the declared characters is
/// ignored: terminator and fill are not checked.
pub fn parse_payload(bits: &BitString) -> Result<ParsedPayload, CodecError> {
    let indicator = bits
        .read(0, 4)
        .ok_or(CodecError::MissingHeader(bits.len()))? as u8;
    let mode = Mode::from_indicator(indicator)?;
    let width = mode.count_bits();
    let declared = bits
        .read(4, width)
        .ok_or(CodecError::MissingHeader(bits.len()))? as usize;
    let needed = mode.encoded_len(declared);
    if needed > bits.len() {
        return Err(CodecError::Truncated {
            declared,
            needed,
            available: bits.len(),
        });
    }
    let mut pos = 4 + width;
    let mut text = String::with_capacity(declared);
    match mode {
        Mode::Numeric => {
            let mut left = declared;
            while left > 0 {
                let n = left.min(3);
                let w = n * 3 + 1;
                let value = bits.read(pos, w).unwrap();
                if value >= 10u32.pow(n as u32) {
                    return Err(CodecError::InvalidCharacter {
                        ch: char::REPLACEMENT_CHARACTER,
                        mode,
                    });
                }
                text.push_str(&format!("{value:0width$}", width = n));
                pos += w;
                left -= n;
            }
        }
        Mode::Alphanumeric => {
            let table: Vec<char> = ALPHANUMERIC.chars().collect();
            let mut left = declared;
            while left > 0 {
                let n = left.min(2);
                let w = n * 5 + 1;
                let value = bits.read(pos, w).unwrap() as usize;
                let chars = if n == 2 {
                    [value / 45, value % 45].to_vec()
                } else {
                    vec![value]
                };
                for v in chars {
                    let ch = *table.get(v).ok_or(CodecError::InvalidCharacter {
                        ch: char::REPLACEMENT_CHARACTER,
                        mode,
                    })?;
                    text.push(ch);
                }
                pos += w;
                left -= n;
            }
        }
        Mode::Byte => {
            let bytes: Vec<u8> = (0..declared)
                .map(|i| bits.read(pos + 8 * i, 8).unwrap() as u8)
                .collect();
            pos += 8 * declared;
            text = match String::from_utf8(bytes) {
                Ok(s) => s,
                Err(e) => e.into_bytes().iter().map(|&b| b as char).collect(),
            };
        }
    }
    Ok(ParsedPayload {
        text,
        mode,
        declared_length: declared,
        bits_used: pos,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn hello_alphanumeric() {
        let got = encode_segment(&Segment::new(Mode::Alphanumeric, "HELLO")).unwrap();
        assert_eq!(got, bits("0010 000000101 01100001011 01111000110 011000"));
        assert_eq!(got.len(), 41);
    }

    #[test]
    fn empty_alphanumeric() {
        let got = encode_segment(&Segment::new(Mode::Alphanumeric, "")).unwrap();
        assert_eq!(got, bits("0010 000000000"));
    }

    #[test]
    fn alphanumeric_pair_value() {
        let got = encode_segment(&Segment::new(Mode::Alphanumeric, "AB")).unwrap();
        assert_eq!(got.read(13, 11), Some(10 * 45 + 11));
        assert_eq!(got.len(), 24);
    }

    #[test]
    fn numeric_and_byte_groups() {
        let got = encode_segment(&Segment::new(Mode::Numeric, "01234567")).unwrap();
        assert_eq!(got, bits("0001 0000001000 0000001100 0101011001 1000011"));
        let got = encode_segment(&Segment::new(Mode::Byte, "a")).unwrap();
        assert_eq!(got, bits("0100 00000001 01100001"));
    }

    #[test]
    fn invalid_character_rejected() {
        let err = encode_segment(&Segment::new(Mode::Alphanumeric, "hello")).unwrap_err();
        assert_eq!(
            err,
            CodecError::InvalidCharacter {
                ch: 'h',
                mode: Mode::Alphanumeric
            }
        );
        assert!(encode_segment(&Segment::new(Mode::Numeric, "12a")).is_err());
    }

    #[test]
    fn padded_hello_fills_with_alternating_bytes() {
        let p = assemble_payload(&[Segment::new(Mode::Alphanumeric, "HELLO")], true).unwrap();
        assert_eq!(p.bits.len(), 152);
        let bytes = p.bits.to_bytes();
        // 41 bits + 4 terminator + 3 alignment = 48 bits = 6 bytes.
        assert_eq!(
            &bytes[6..],
            &[0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11, 0xEC][..]
        );
        assert_eq!(p.declared_length, 5);
    }

    #[test]
    fn padded_empty_message() {
        let p = assemble_payload(&[Segment::new(Mode::Alphanumeric, "")], true).unwrap();
        assert_eq!(p.bits.len(), 152);
        assert_eq!(p.bits.read(0, 13), Some(0b0010_000000000));
        // 13 header bits + 4 terminator bits align to 3 bytes.
        assert_eq!(p.bits.read(13, 11), Some(0));
        assert_eq!(p.bits.to_bytes()[3], 0xEC);
    }

    #[test]
    fn unpadded_is_raw_segment() {
        let p = assemble_payload(&[Segment::new(Mode::Alphanumeric, "HELLO")], false).unwrap();
        assert_eq!(
            p.bits,
            bits("0010 000000101 01100001011 01111000110 011000")
        );
    }

    #[test]
    fn overflow_rejected() {
        let long = "A".repeat(26);
        assert!(matches!(
            assemble_payload(&[Segment::new(Mode::Alphanumeric, long)], true),
            Err(CodecError::Overflow(_))
        ));
    }

    #[test]
    fn terminator_truncated_near_capacity() {
        // 17 bytes: 4 + 8 + 136 = 148 bits, room for the full terminator.
        let p = assemble_payload(&[Segment::new(Mode::Byte, "x".repeat(17))], true).unwrap();
        assert_eq!(p.bits.len(), 152);
        // 25 alnum chars: 4 + 9 + 132 + 6 = 151 bits, one terminator bit fits.
        let p =
            assemble_payload(&[Segment::new(Mode::Alphanumeric, "A".repeat(25))], true).unwrap();
        assert_eq!(p.bits.len(), 152);
    }

    #[test]
    fn parse_ignores_trailing_bits() {
        let mut b = bits("0010 000000101 01100001011 01111000110 011000");
        b.extend(&bits("1011011101"));
        let parsed = parse_payload(&b).unwrap();
        assert_eq!(parsed.text, "HELLO");
        assert_eq!(parsed.mode, Mode::Alphanumeric);
        assert_eq!(parsed.declared_length, 5);
        assert_eq!(parsed.bits_used, 41);
    }

    #[test]
    fn parse_empty_and_errors() {
        assert_eq!(
            parse_payload(&bits("0010 000000000 0000")).unwrap().text,
            ""
        );
        assert_eq!(
            parse_payload(&bits("0111 00000000 0000")).unwrap_err(),
            CodecError::UnsupportedMode(0b0111)
        );
        assert!(matches!(
            parse_payload(&bits("0010 000000101 0110")),
            Err(CodecError::Truncated { declared: 5, .. })
        ));
        assert!(matches!(
            parse_payload(&bits("001")),
            Err(CodecError::MissingHeader(3))
        ));
    }

    #[test]
    fn encoded_len_formula() {
        for n in 0..20 {
            let text: String = "ABCDEFGHIJKLMNOPQRST".chars().take(n).collect();
            let got = encode_segment(&Segment::new(Mode::Alphanumeric, text)).unwrap();
            assert_eq!(got.len(), 4 + 9 + 11 * (n / 2) + 6 * (n % 2));
            assert_eq!(got.len(), Mode::Alphanumeric.encoded_len(n));
        }
    }
}
