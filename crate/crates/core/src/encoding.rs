//! Plaintext encodings.
//!
//! * MSB-first bit decomposition for bitwise DGHV vectors.
//! * The ASCII table used for decimal numerals together with base-256
//!   packing into a single integer (`pack_base256`) and its inverse.
//! * A fixed-point decimal codec, which unlike the byte packing commutes with
//!   addition.
//!
//! The ASCII table maps the decimal point to byte 250, not to the standard
//! code 46. Digits keep their usual codes 48..=57.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("entry {value} at position {position} is not a bit")]
    InvalidBit { position: usize, value: u8 },
    #[error("character {character:?} at position {position} is not in the ASCII table")]
    UnsupportedCharacter { position: usize, character: char },
    #[error("byte {byte} at position {position} does not decode to a table character")]
    UnsupportedByte { position: usize, byte: u8 },
    #[error("byte string has a leading zero byte")]
    LeadingZero,
    #[error("empty input")]
    Empty,
    #[error("{text:?} has more than {scale} fractional digits")]
    PrecisionLoss { text: String, scale: u32 },
    #[error("{0:?} is not a nonnegative decimal numeral")]
    InvalidDecimal(String),
}

/// MSB-first bits with no leading zero (zero itself is `[0]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

pub fn bits_of(n: &BigUint) -> BitVector {
    if n.is_zero() {
        return BitVector(vec![0]);
    }
    let len = n.bits();
    BitVector((0..len).rev().map(|i| u8::from(n.bit(i))).collect())
}

/// Value of an MSB-first bit string. Leading zeros are accepted.
pub fn uint_of_bits(bits: &[u8]) -> Result<BigUint, EncodingError> {
    let mut acc = BigUint::zero();
    for (position, &value) in bits.iter().enumerate() {
        if value > 1 {
            return Err(EncodingError::InvalidBit { position, value });
        }
        acc <<= 1u32;
        if value == 1 {
            acc += 1u32;
        }
    }
    Ok(acc)
}

/// Byte assigned to the decimal point.
pub const POINT_BYTE: u8 = 250;

fn table_byte(c: char) -> Option<u8> {
    match c {
        '0'..='9' => Some(c as u8),
        '.' => Some(POINT_BYTE),
        _ => None,
    }
}

fn table_char(b: u8) -> Option<char> {
    match b {
        b'0'..=b'9' => Some(b as char),
        POINT_BYTE => Some('.'),
        _ => None,
    }
}

/// MSB-first bytes, nonempty, with a nonzero leading byte unless exactly `[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPlaintext(Vec<u8>);

impl EncodedPlaintext {
    pub fn new(bytes: Vec<u8>) -> Result<Self, EncodingError> {
        match bytes.as_slice() {
            [] => Err(EncodingError::Empty),
            [0, _, ..] => Err(EncodingError::LeadingZero),
            _ => Ok(Self(bytes)),
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for EncodedPlaintext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn ascii_encode(s: &str) -> Result<EncodedPlaintext, EncodingError> {
    if s.is_empty() {
        return Err(EncodingError::Empty);
    }
    let bytes = s
        .chars()
        .enumerate()
        .map(|(position, character)| {
            table_byte(character).ok_or(EncodingError::UnsupportedCharacter { position, character })
        })
        .collect::<Result<Vec<_>, _>>()?;
    // every table byte is nonzero
    Ok(EncodedPlaintext(bytes))
}

pub fn ascii_decode(bytes: &[u8]) -> Result<String, EncodingError> {
    bytes
        .iter()
        .enumerate()
        .map(|(position, &byte)| table_char(byte).ok_or(EncodingError::UnsupportedByte { position, byte }))
        .collect()
}

/// Big-endian base-256 value of the bytes.
pub fn pack_base256(bytes: &[u8]) -> Result<BigUint, EncodingError> {
    let validated = EncodedPlaintext::new(bytes.to_vec())?;
    Ok(BigUint::from_bytes_be(validated.as_bytes()))
}

/// Minimal big-endian base-256 digits; zero unpacks to `[0]`.
pub fn unpack_base256(n: &BigUint) -> EncodedPlaintext {
    EncodedPlaintext(n.to_bytes_be())
}

/// Integer value of the decimal numeral `s` scaled by `10^scale`.
///
/// Unlike the byte packing this commutes with addition: at equal scale `encode(a) + encode(b) = encode(a + b)`.
pub fn fixed_point_encode(s: &str, scale: u32) -> Result<BigUint, EncodingError> {
    let invalid = || EncodingError::InvalidDecimal(s.to_string());
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) if !f.is_empty() => (i, f),
        Some(_) => return Err(invalid()),
        None => (s, ""),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid());
    }
    if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid());
    }
    if frac_part.len() > scale as usize {
        return Err(EncodingError::PrecisionLoss {
            text: s.to_string(),
            scale,
        });
    }
    let padding = "0".repeat(scale as usize - frac_part.len());
    let digits = format!("{int_part}{frac_part}{padding}");
    Ok(digits.parse::<BigUint>().expect("validated decimal digits"))
}

/// Inverse of [`fixed_point_encode`]: renders `n / 10^scale` with exactly
/// `scale` fractional digits.
pub fn fixed_point_decode(n: &BigUint, scale: u32) -> String {
    let digits = n.to_str_radix(10);
    let scale = scale as usize;
    if scale == 0 {
        return digits;
    }
    let digits = if digits.len() <= scale {
        format!("{}{digits}", "0".repeat(scale + 1 - digits.len()))
    } else {
        digits
    };
    let (int_part, frac_part) = digits.split_at(digits.len() - scale);
    format!("{int_part}.{frac_part}")
}
