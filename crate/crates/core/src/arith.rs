//! Integer utilities shared by both schemes: modular reduction, a seedable
//! random source and primality testing.
//!
//! All scheme arithmetic is carried out on [`BigUint`]; nothing in this crate
//! touches floating point.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
}

/// Non-negative remainder of `c` modulo `n`, always in `[0, n)`.
pub fn mod_reduce(c: &BigUint, n: &BigUint) -> Result<BigUint, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroModulus);
    }
    Ok(c % n)
}

/// Deterministic random source.
///
/// Two instances built from the same seed yield identical streams. This is a
/// laboratory generator: reproducibility matters here, not secrecy.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives an independent generator for a parallel worker; advances `self`.
    pub fn child(&mut self) -> Rng {
        Rng::from_seed(self.inner.next_u64())
    }

    /// Uniform draw from `[0, bound)`. Panics if `bound` is zero.
    pub fn below(&mut self, bound: &BigUint) -> BigUint {
        self.inner.gen_biguint_below(bound)
    }

    /// Uniform draw from `[lo, hi)`. Panics if the interval is empty.
    pub fn in_range(&mut self, lo: &BigUint, hi: &BigUint) -> BigUint {
        self.inner.gen_biguint_range(lo, hi)
    }

    pub fn bit(&mut self) -> u8 {
        (self.inner.next_u32() & 1) as u8
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// `2^exp` as a big integer.
pub fn pow2(exp: u64) -> BigUint {
    BigUint::one() << exp
}

/// Uniform odd integer in `[2^lo_exp, 2^hi_exp)`.
///
/// The odd values in that interval are exactly `2k + 1` for
/// `k in [2^lo_exp / 2, 2^(hi_exp - 1))`, so `k` is drawn uniformly.
///
/// # Panics
/// If `lo_exp >= hi_exp`.
pub fn random_odd_in(lo_exp: u64, hi_exp: u64, rng: &mut Rng) -> BigUint {
    assert!(lo_exp < hi_exp, "random_odd_in: empty interval");
    let k_lo = pow2(lo_exp) >> 1u32;
    let k_hi = pow2(hi_exp - 1);
    let k = rng.in_range(&k_lo, &k_hi);
    (k << 1u32) + 1u32
}

/// Largest `s` with `s * s <= n`.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

// Witness set that is deterministic for every n < 3.3 * 10^24, which covers u64.
const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const RANDOM_ROUNDS: usize = 64;

/// Miller-Rabin primality test.
///
/// Exact below `2^64` (fixed base set); above that, 64 rounds with bases drawn
/// from a generator seeded by `n` itself, for an error below `2^-128`.
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &small in &DETERMINISTIC_BASES {
        let small = BigUint::from(small);
        if *n == small {
            return true;
        }
        if (n % &small).is_zero() {
            return false;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n - 1 is nonzero");
    let d = &n_minus_1 >> s;

    let witness_fails = |base: &BigUint| -> bool {
        let mut x = base.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                return false;
            }
        }
        true
    };

    if n.bits() <= 64 {
        return !DETERMINISTIC_BASES
            .iter()
            .any(|&b| witness_fails(&BigUint::from(b)));
    }

    let low = n.iter_u64_digits().next().unwrap_or(0);
    let mut rng = Rng::from_seed(low ^ n.bits());
    let hi = n - 1u32;
    (0..RANDOM_ROUNDS).all(|_| !witness_fails(&rng.in_range(&two, &hi)))
}
