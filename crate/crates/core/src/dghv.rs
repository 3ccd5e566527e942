//! Symmetric DGHV scheme over the message space `{0, 1}`.
//!
//! A bit `m` is hidden as `c = p*q + 2r + m` for a secret odd modulus `p`.
//! Decryption is `(c mod p) mod 2`, which is correct while the noise
//! `c mod p` stays below the modulus. Homomorphic operations are plain
//! integer addition and multiplication; ciphertexts grow and nothing is ever
//! reduced on the evaluating side.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{mod_reduce, pow2, random_odd_in, Rng};
use crate::encoding::{uint_of_bits, BitVector, EncodingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DghvError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("message must be a bit, got {0}")]
    InvalidMessage(u8),
    #[error("noise 2r + m = {noise} is not below p/2")]
    NoiseTooLarge { noise: BigUint },
}

/// Secret odd modulus `p` with `2^(lambda-1) <= p < 2^lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DghvSecretKey {
    p: BigUint,
    lambda: u64,
}

impl DghvSecretKey {
    pub fn new(p: BigUint, lambda: u64) -> Result<Self, DghvError> {
        if lambda < 3 {
            return Err(DghvError::InvalidParameter(format!(
                "lambda must be at least 3, got {lambda}"
            )));
        }
        if p.is_even() {
            return Err(DghvError::InvalidParameter(format!("p = {p} is even")));
        }
        if p.bits() != lambda {
            return Err(DghvError::InvalidParameter(format!(
                "p = {p} is not in [2^{}, 2^{lambda})",
                lambda - 1
            )));
        }
        Ok(Self { p, lambda })
    }

    /// Key for a known modulus; `lambda` is its bit length.
    pub fn from_modulus(p: BigUint) -> Result<Self, DghvError> {
        let lambda = p.bits();
        Self::new(p, lambda)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    /// `2 * noise < p`, the admissibility test for fresh noise.
    fn below_half(&self, noise: &BigUint) -> bool {
        (noise << 1u32) < self.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DghvCiphertext {
    value: BigUint,
    noise_bound: Option<BigUint>,
}

impl DghvCiphertext {
    /// Wraps a foreign integer; its noise is unknown.
    pub fn from_value(value: BigUint) -> Self {
        Self {
            value,
            noise_bound: None,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn noise_bound(&self) -> Option<&BigUint> {
        self.noise_bound.as_ref()
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }
}

impl fmt::Display for DghvCiphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

pub fn keygen(lambda: u64, rng: &mut Rng) -> Result<DghvSecretKey, DghvError> {
    if lambda < 3 {
        return Err(DghvError::InvalidParameter(format!(
            "lambda must be at least 3, got {lambda}"
        )));
    }
    let p = random_odd_in(lambda - 1, lambda, rng);
    Ok(DghvSecretKey { p, lambda })
}

/// Encrypts a bit with `q` uniform in `[1, 2^(2 lambda))` and `r` uniform in
/// `[0, 2^(lambda-3))`, so that fresh noise stays below `2^(lambda-2) <= p/2`.
pub fn encrypt_bit(key: &DghvSecretKey, m: u8, rng: &mut Rng) -> Result<DghvCiphertext, DghvError> {
    check_bit(m)?;
    let q = rng.in_range(&BigUint::one(), &pow2(2 * key.lambda));
    let r = rng.below(&pow2(key.lambda - 3));
    encrypt_bit_with(key, m, &q, &r)
}

/// `p*q + 2r + m` for caller-chosen `q` and `r`.
pub fn encrypt_bit_with(
    key: &DghvSecretKey,
    m: u8,
    q: &BigUint,
    r: &BigUint,
) -> Result<DghvCiphertext, DghvError> {
    check_bit(m)?;
    let noise = (r << 1u32) + m;
    if !key.below_half(&noise) {
        return Err(DghvError::NoiseTooLarge { noise });
    }
    Ok(DghvCiphertext {
        value: &key.p * q + &noise,
        noise_bound: Some(noise),
    })
}

pub fn decrypt_bit(key: &DghvSecretKey, c: &DghvCiphertext) -> u8 {
    let two = BigUint::from(2u32);
    let bit = mod_reduce(&noise(key, c), &two).expect("2 is nonzero");
    u8::from(!bit.is_zero())
}

pub fn hom_add(c1: &DghvCiphertext, c2: &DghvCiphertext) -> DghvCiphertext {
    DghvCiphertext {
        value: &c1.value + &c2.value,
        noise_bound: match (&c1.noise_bound, &c2.noise_bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        },
    }
}

pub fn hom_mul(c1: &DghvCiphertext, c2: &DghvCiphertext) -> DghvCiphertext {
    DghvCiphertext {
        value: &c1.value * &c2.value,
        noise_bound: match (&c1.noise_bound, &c2.noise_bound) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        },
    }
}

/// The residue `c mod p` that decryption reads the bit from.
pub fn noise(key: &DghvSecretKey, c: &DghvCiphertext) -> BigUint {
    mod_reduce(&c.value, &key.p).expect("key modulus is nonzero")
}

/// Largest `t` with `t * fresh_noise_max < p/2`: how many fresh ciphertexts
/// can be summed before the noise leaves the safe half of the modulus.
pub fn additions_budget(key: &DghvSecretKey, fresh_noise_max: &BigUint) -> Result<BigUint, DghvError> {
    if fresh_noise_max.is_zero() {
        return Err(DghvError::InvalidParameter(
            "fresh noise bound must be at least 1".into(),
        ));
    }
    // t * f < p/2  <=>  2 t f <= p - 1
    Ok((&key.p - 1u32) / (fresh_noise_max << 1u32))
}

fn check_bit(m: u8) -> Result<(), DghvError> {
    if m > 1 {
        return Err(DghvError::InvalidMessage(m));
    }
    Ok(())
}

/// Bitwise encryption of a nonnegative integer, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiphertextVector(pub Vec<DghvCiphertext>);

impl CiphertextVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = &BigUint> {
        self.0.iter().map(DghvCiphertext::value)
    }
}

pub fn encrypt_bits(
    key: &DghvSecretKey,
    bits: &BitVector,
    rng: &mut Rng,
) -> Result<CiphertextVector, DghvError> {
    bits.iter()
        .map(|b| encrypt_bit(key, b, rng))
        .collect::<Result<Vec<_>, _>>()
        .map(CiphertextVector)
}

/// Decrypts every position and reads the bits back as an MSB-first integer.
pub fn decrypt_bits(key: &DghvSecretKey, v: &CiphertextVector) -> Result<(Vec<u8>, BigUint), EncodingError> {
    let bits: Vec<u8> = v.0.iter().map(|c| decrypt_bit(key, c)).collect();
    let value = uint_of_bits(&bits)?;
    Ok((bits, value))
}
