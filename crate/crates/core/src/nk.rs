//! Symmetric Nuida-Kurosawa scheme over `Z_Q` for a public prime `Q`.
//!
//! `c = p*q + Q*r + m`, decrypted as `(c mod p) mod Q`. Same shape as DGHV
//! with the message modulus 2 replaced by `Q`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::arith::{is_prime, mod_reduce, pow2, random_odd_in, Rng};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NkError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Q = {0} is not prime")]
    NotPrime(BigUint),
    #[error("Q = {q_pub} is too large for lambda = {lambda}")]
    ParameterMismatch { q_pub: BigUint, lambda: u64 },
    #[error("message {m} is not below Q = {q_pub}")]
    MessageOutOfRange { m: BigUint, q_pub: BigUint },
    #[error("noise Q*r + m = {noise} is not below p/2")]
    NoiseTooLarge { noise: BigUint },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NkSecretKey {
    p: BigUint,
    q_pub: BigUint,
    lambda: u64,
}

impl NkSecretKey {
    /// Key from known parts; `lambda` is the bit length of `p`.
    ///
    /// Requires `p` odd, `Q` prime and `4Q < p`.
    pub fn from_parts(p: BigUint, q_pub: BigUint) -> Result<Self, NkError> {
        let lambda = p.bits();
        if lambda < 3 {
            return Err(NkError::InvalidParameter(format!("p = {p} is too small")));
        }
        if p.is_even() {
            return Err(NkError::InvalidParameter(format!("p = {p} is even")));
        }
        if !is_prime(&q_pub) {
            return Err(NkError::NotPrime(q_pub));
        }
        if (&q_pub << 2u32) >= p {
            return Err(NkError::ParameterMismatch { q_pub, lambda });
        }
        Ok(Self { p, q_pub, lambda })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn q_pub(&self) -> &BigUint {
        &self.q_pub
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    fn below_half(&self, noise: &BigUint) -> bool {
        (noise << 1u32) < self.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NkCiphertext {
    value: BigUint,
    noise_bound: Option<BigUint>,
}

impl NkCiphertext {
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

impl fmt::Display for NkCiphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

pub fn keygen(lambda: u64, q_pub: &BigUint, rng: &mut Rng) -> Result<NkSecretKey, NkError> {
    if lambda < 3 {
        return Err(NkError::InvalidParameter(format!(
            "lambda must be at least 3, got {lambda}"
        )));
    }
    if !is_prime(q_pub) {
        return Err(NkError::NotPrime(q_pub.clone()));
    }
    // keeps Q below p/4 for every p in range
    if *q_pub >= pow2(lambda - 3) {
        return Err(NkError::ParameterMismatch {
            q_pub: q_pub.clone(),
            lambda,
        });
    }
    Ok(NkSecretKey {
        p: random_odd_in(lambda - 1, lambda, rng),
        q_pub: q_pub.clone(),
        lambda,
    })
}

/// Exclusive upper end of the fresh `r` interval, `floor(p / 4Q)`.
pub fn fresh_r_limit(key: &NkSecretKey) -> BigUint {
    &key.p / (&key.q_pub << 2u32)
}

/// Encrypts with `q` uniform in `[1, 2^(2 lambda))` and `r` uniform in
/// `[0, floor(p / 4Q))`.
pub fn encrypt(key: &NkSecretKey, m: &BigUint, rng: &mut Rng) -> Result<NkCiphertext, NkError> {
    check_message(key, m)?;
    let q = rng.in_range(&BigUint::one(), &pow2(2 * key.lambda));
    let r = rng.below(&fresh_r_limit(key));
    encrypt_with(key, m, &q, &r)
}

pub fn encrypt_with(
    key: &NkSecretKey,
    m: &BigUint,
    q: &BigUint,
    r: &BigUint,
) -> Result<NkCiphertext, NkError> {
    check_message(key, m)?;
    let noise = &key.q_pub * r + m;
    if !key.below_half(&noise) {
        return Err(NkError::NoiseTooLarge { noise });
    }
    Ok(NkCiphertext {
        value: &key.p * q + &noise,
        noise_bound: Some(noise),
    })
}

pub fn decrypt(key: &NkSecretKey, c: &NkCiphertext) -> BigUint {
    mod_reduce(&noise(key, c), &key.q_pub).expect("Q is prime, hence nonzero")
}

pub fn hom_add(c1: &NkCiphertext, c2: &NkCiphertext) -> NkCiphertext {
    NkCiphertext {
        value: &c1.value + &c2.value,
        noise_bound: match (&c1.noise_bound, &c2.noise_bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        },
    }
}

pub fn hom_mul(c1: &NkCiphertext, c2: &NkCiphertext) -> NkCiphertext {
    NkCiphertext {
        value: &c1.value * &c2.value,
        noise_bound: match (&c1.noise_bound, &c2.noise_bound) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        },
    }
}

pub fn noise(key: &NkSecretKey, c: &NkCiphertext) -> BigUint {
    mod_reduce(&c.value, &key.p).expect("key modulus is nonzero")
}

fn check_message(key: &NkSecretKey, m: &BigUint) -> Result<(), NkError> {
    if *m >= key.q_pub {
        return Err(NkError::MessageOutOfRange {
            m: m.clone(),
            q_pub: key.q_pub.clone(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rng;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn example_key() -> NkSecretKey {
        NkSecretKey::from_parts(big(22801763489), big(15485863)).unwrap()
    }

    fn enc(key: &NkSecretKey, m: u64, q: u64, r: u64) -> NkCiphertext {
        encrypt_with(key, &big(m), &big(q), &big(r)).unwrap()
    }

    #[test]
    fn example_key_shape() {
        let key = example_key();
        assert_eq!(key.lambda(), 35);
        assert!(big(15485863) < pow2(32));
        assert_eq!(fresh_r_limit(&key), big(368));
    }

    #[test]
    fn keygen_checks() {
        let mut rng = Rng::from_seed(4);
        let key = keygen(35, &big(15485863), &mut rng).unwrap();
        assert_eq!(key.modulus().bits(), 35);
        assert!(key.modulus().is_odd());
        assert_eq!(
            keygen(35, &big(15485865), &mut rng),
            Err(NkError::NotPrime(big(15485865)))
        );
        assert!(keygen(10, &big(2), &mut rng).is_ok());
        assert!(matches!(
            keygen(10, &big(131), &mut rng),
            Err(NkError::ParameterMismatch { .. })
        ));
        assert!(keygen(2, &big(2), &mut rng).is_err());
    }

    #[test]
    fn from_parts_validation() {
        assert!(NkSecretKey::from_parts(big(22801763488), big(15485863)).is_err());
        assert!(matches!(
            NkSecretKey::from_parts(big(101), big(29)),
            Err(NkError::ParameterMismatch { .. })
        ));
        assert!(NkSecretKey::from_parts(big(101), big(5)).is_ok());
    }

    #[test]
    fn example_encryption_chain() {
        let key = example_key();
        let a = enc(&key, 3209777, 3215964, 13);
        let b = enc(&key, 3340851, 6490231, 9);
        assert_eq!(a.value, big(73329650721664392));
        assert_eq!(b.value, big(147988712393689577));
        assert_eq!(enc(&key, 0, 0, 0).value, big(0));
        assert_eq!(noise(&key, &a), big(15485863 * 13 + 3209777));
        assert_eq!(noise(&key, &a), big(204525996));
        assert_eq!(decrypt(&key, &a), big(3209777));
        assert_eq!(decrypt(&key, &b), big(3340851));

        let c = hom_add(&a, &b);
        assert_eq!(c.value, big(221318363115353969));
        assert_eq!(decrypt(&key, &c), big(6550628));
        assert_eq!(noise(&key, &c), big(347239614));
        assert_eq!(c.noise_bound, Some(big(15485863 * 22 + 6550628)));
        assert_eq!(noise(&key, &NkCiphertext::from_value(big(0))), big(0));
        assert!(decrypt(&key, &NkCiphertext::from_value(big(0))).is_zero());
    }

    #[test]
    fn encrypt_errors() {
        let key = example_key();
        let mut rng = Rng::from_seed(2);
        assert!(matches!(
            encrypt(&key, &big(15485863), &mut rng),
            Err(NkError::MessageOutOfRange { .. })
        ));
        // Q * 737 > p/2
        assert!(matches!(
            encrypt_with(&key, &big(1), &big(1), &big(737)),
            Err(NkError::NoiseTooLarge { .. })
        ));
    }

    #[test]
    fn wraparound_on_addition() {
        let key = example_key();
        let mut rng = Rng::from_seed(8);
        let q = key.q_pub().clone();
        let c1 = encrypt(&key, &big(1), &mut rng).unwrap();
        let c2 = encrypt(&key, &(&q - 1u32), &mut rng).unwrap();
        assert!(decrypt(&key, &hom_add(&c1, &c2)).is_zero());
        let c = enc(&key, 42, 7, 3);
        assert_eq!(hom_add(&c, &enc(&key, 0, 0, 0)).value, c.value);
    }

    #[test]
    fn multiplication_small_key() {
        let key = keygen(20, &big(101), &mut Rng::from_seed(20)).unwrap();
        let a = enc(&key, 5, 1234, 1);
        let b = enc(&key, 7, 99, 2);
        // noise product 106 * 209 = 22154 < 2^18 <= p/2
        assert_eq!(decrypt(&key, &hom_mul(&a, &b)), big(35));
        let one = enc(&key, 1, 0, 0);
        let zero = enc(&key, 0, 0, 0);
        assert_eq!(decrypt(&key, &hom_mul(&a, &one)), big(5));
        assert!(hom_mul(&a, &zero).value.is_zero());
        assert!(decrypt(&key, &hom_mul(&b, &zero)).is_zero());
    }

    #[test]
    fn exhaustive_tiny_key() {
        let key = NkSecretKey::from_parts(big(101), big(5)).unwrap();
        let mut fresh = Vec::new();
        for m in 0..5u64 {
            for q in 0..=5u64 {
                for r in 0..=2u64 {
                    fresh.push((m, 5 * r + m, enc(&key, m, q, r)));
                }
            }
        }
        for (m1, n1, c1) in &fresh {
            assert_eq!(decrypt(&key, c1), big(*m1));
            for (m2, n2, c2) in &fresh {
                if 2 * (n1 + n2) < 101 {
                    assert_eq!(decrypt(&key, &hom_add(c1, c2)), big((m1 + m2) % 5));
                }
                if 2 * n1 * n2 < 101 {
                    assert_eq!(decrypt(&key, &hom_mul(c1, c2)), big(m1 * m2 % 5));
                }
            }
        }
    }

    const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 101, 257, 8191, 65521];

    proptest! {
        #[test]
        fn round_trip(lambda in 16u64..=40, qi in 0usize..SMALL_PRIMES.len(), m_raw in any::<u64>(), seed in any::<u64>()) {
            let q = big(SMALL_PRIMES[qi]);
            prop_assume!(q < pow2(lambda - 3));
            let mut rng = Rng::from_seed(seed);
            let key = keygen(lambda, &q, &mut rng).unwrap();
            let m = big(m_raw) % &q;
            let c = encrypt(&key, &m, &mut rng).unwrap();
            prop_assert_eq!(decrypt(&key, &c), m);
            prop_assert!(key.below_half(&noise(&key, &c)));
        }

        #[test]
        fn homomorphisms_under_budget(lambda in 16u64..=40, qi in 0usize..SMALL_PRIMES.len(), a in any::<u64>(), b in any::<u64>(), seed in any::<u64>()) {
            let q = big(SMALL_PRIMES[qi]);
            prop_assume!(q < pow2(lambda - 3));
            let mut rng = Rng::from_seed(seed);
            let key = keygen(lambda, &q, &mut rng).unwrap();
            let (a, b) = (big(a) % &q, big(b) % &q);
            let c1 = encrypt(&key, &a, &mut rng).unwrap();
            let c2 = encrypt(&key, &b, &mut rng).unwrap();
            let (n1, n2) = (noise(&key, &c1), noise(&key, &c2));
            // fresh noise is below p/4 + Q, so one addition always fits under p
            prop_assert_eq!(decrypt(&key, &hom_add(&c1, &c2)), (&a + &b) % &q);
            if key.below_half(&(&n1 * &n2)) {
                prop_assert_eq!(decrypt(&key, &hom_mul(&c1, &c2)), (&a * &b) % &q);
            }
        }
    }
}
