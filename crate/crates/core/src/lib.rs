//! Symmetric somewhat-homomorphic encryption over the integers.
//!
//! Two schemes share one shape, a ciphertext `c = p*q + t*r + m` for a
//! secret odd modulus `p`:
//!
//! * [`dghv`] encrypts single bits (`t = 2`),
//! * [`nk`] encrypts elements of `Z_Q` for a public prime `Q` (`t = Q`).
//!
//! Sums and products of ciphertexts decrypt to sums and products of the
//! messages *modulo* 2 or `Q`, as long as the noise `c mod p` stays below
//! `p`. [`protocol`] runs both schemes through a client and a keyless server,
//! and shows what goes wrong when the modular result is read as ordinary
//! arithmetic: carries between encrypted bits are lost, and byte-packed
//! decimals do not add. [`properties`] checks the identities and builds the
//! counterexamples.
//!
//! ```
//! use intfhe::arith::Rng;
//! use intfhe::nk;
//! use num_bigint::BigUint;
//!
//! let mut rng = Rng::from_seed(7);
//! let key = nk::keygen(35, &BigUint::from(15485863u32), &mut rng).unwrap();
//! let a = nk::encrypt(&key, &BigUint::from(15485862u32), &mut rng).unwrap();
//! let b = nk::encrypt(&key, &BigUint::from(2u32), &mut rng).unwrap();
//! // (Q - 1) + 2 wraps around to 1
//! assert_eq!(nk::decrypt(&key, &nk::hom_add(&a, &b)), BigUint::from(1u32));
//! ```

pub mod arith;
pub mod cli;
pub mod dghv;
pub mod encoding;
pub mod nk;
pub mod properties;
pub mod protocol;
