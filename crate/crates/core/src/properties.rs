//! Executable checks of the modular-arithmetic identities both schemes
//! satisfy, and constructors for the witnesses showing where they stop
//! meaning ordinary arithmetic.
//!
//! The identities hold after decryption, inside the message ring, and only
//! while the noise stays in budget. Multiplying two ciphertexts multiplies
//! their noises, so the multiplicative checks encrypt with noise drawn from a
//! one-multiplication budget (`noise^2 < p/2`) instead of the wider interval
//! [`crate::nk::encrypt`] uses. Messages themselves are part of the noise:
//! when `Q - 1` alone exceeds that budget no noise choice can rescue the
//! product, and the failures are reported as they occur.
//!
//! Inequality claims are existential. The searches here construct a
//! counterexample; [`PropertyError::SearchExhausted`] means none turned up,
//! not that order is preserved.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{isqrt, pow2, Rng};
use crate::dghv::{self, DghvCiphertext, DghvSecretKey};
use crate::nk::{self, NkCiphertext, NkSecretKey};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("no witness found in {0} trials")]
    SearchExhausted(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    Int(BigUint),
    Bool(bool),
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Int(n) => n.fmt(f),
            Observation::Bool(b) => b.fmt(f),
        }
    }
}

impl From<BigUint> for Observation {
    fn from(n: BigUint) -> Self {
        Observation::Int(n)
    }
}

impl From<bool> for Observation {
    fn from(b: bool) -> Self {
        Observation::Bool(b)
    }
}

/// What relation a witness claims between `observed` and `expected_contrast`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// An identity check: the two sides should agree.
    Identity,
    /// A non-implication: the two sides differ.
    NonImplication,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub description: String,
    pub inputs: Vec<(String, BigUint)>,
    pub observed: Observation,
    pub expected_contrast: Observation,
}

impl Witness {
    /// Whether the witness satisfies the relation its kind claims.
    pub fn holds(&self) -> bool {
        match self.kind {
            WitnessKind::Identity => self.observed == self.expected_contrast,
            WitnessKind::NonImplication => self.observed != self.expected_contrast,
        }
    }

    pub fn input(&self, name: &str) -> Option<&BigUint> {
        self.inputs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.description)?;
        for (name, value) in &self.inputs {
            write!(f, " {name}={value}")?;
        }
        write!(
            f,
            " observed={} contrast={}",
            self.observed, self.expected_contrast
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub passed: u64,
    pub failed: Vec<Witness>,
}

impl IdentityReport {
    pub fn is_clean(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.passed + self.failed.len() as u64
    }

    /// Reports from parallel batches combine associatively.
    pub fn merge(mut self, other: IdentityReport) -> IdentityReport {
        self.passed += other.passed;
        self.failed.extend(other.failed);
        self
    }

    fn record(&mut self, witness: Witness) {
        if witness.holds() {
            self.passed += 1;
        } else {
            self.failed.push(witness);
        }
    }
}

fn identity(
    description: &str,
    inputs: Vec<(&str, BigUint)>,
    observed: BigUint,
    expected: BigUint,
) -> Witness {
    Witness {
        kind: WitnessKind::Identity,
        description: description.to_string(),
        inputs: inputs.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
        observed: observed.into(),
        expected_contrast: expected.into(),
    }
}

/// Exclusive bound on `r` such that every fresh noise `Q*r + m` satisfies
/// `noise^2 < p/2`. Falls back to 1 (only `r = 0`) when even that is too
/// wide, in which case the budget cannot be met for every message.
pub fn product_r_limit(p: &BigUint, message_modulus: &BigUint) -> BigUint {
    // largest noise n with n^2 <= (p - 1) / 2, i.e. 2 n^2 < p
    let max_noise = isqrt(&((p - 1u32) >> 1u32));
    // Q*(R-1) + (Q-1) <= max_noise  <=>  R <= (max_noise + 1) / Q
    let limit = (max_noise + 1u32) / message_modulus;
    if limit.is_zero() {
        BigUint::one()
    } else {
        limit
    }
}

fn wide_q(lambda: u64, rng: &mut Rng) -> BigUint {
    rng.in_range(&BigUint::one(), &pow2(2 * lambda))
}

/// Checks one multiplicative and one additive identity after decryption for
/// an explicit pair of encryptions.
pub fn check_nk_pair(
    key: &NkSecretKey,
    a: &BigUint,
    b: &BigUint,
    ea: &NkCiphertext,
    eb: &NkCiphertext,
    report: &mut IdentityReport,
) {
    let q = key.q_pub();
    let inputs = || {
        vec![
            ("a", a.clone()),
            ("b", b.clone()),
            ("E(a)", ea.value().clone()),
            ("E(b)", eb.value().clone()),
        ]
    };
    report.record(identity(
        "D(E(a)+E(b)) = a+b mod Q",
        inputs(),
        nk::decrypt(key, &nk::hom_add(ea, eb)),
        (a + b) % q,
    ));
    report.record(identity(
        "D(E(a)*E(b)) = a*b mod Q",
        inputs(),
        nk::decrypt(key, &nk::hom_mul(ea, eb)),
        (a * b) % q,
    ));
}

/// Randomized check of the additive and multiplicative identities over
/// `Z_Q`: two checks per trial.
///
/// Addition uses ordinary fresh encryptions; multiplication uses fresh
/// encryptions with `r` below [`product_r_limit`].
pub fn check_identities(
    key: &NkSecretKey,
    trials: u64,
    rng: &mut Rng,
) -> Result<IdentityReport, PropertyError> {
    if trials == 0 {
        return Err(PropertyError::InvalidParameter(
            "trials must be at least 1".into(),
        ));
    }
    let q = key.q_pub().clone();
    let r_limit = product_r_limit(key.modulus(), &q);
    let mut report = IdentityReport::default();
    for _ in 0..trials {
        let a = rng.below(&q);
        let b = rng.below(&q);
        let ea = nk::encrypt(key, &a, rng).expect("a < Q");
        let eb = nk::encrypt(key, &b, rng).expect("b < Q");
        report.record(identity(
            "D(E(a)+E(b)) = a+b mod Q",
            vec![
                ("a", a.clone()),
                ("b", b.clone()),
                ("E(a)", ea.value().clone()),
                ("E(b)", eb.value().clone()),
            ],
            nk::decrypt(key, &nk::hom_add(&ea, &eb)),
            (&a + &b) % &q,
        ));

        let mut product_operand = |m: &BigUint| {
            let r = rng.below(&r_limit);
            nk::encrypt_with(key, m, &wide_q(key.lambda(), rng), &r).expect("r below the product limit")
        };
        let ma = product_operand(&a);
        let mb = product_operand(&b);
        report.record(identity(
            "D(E(a)*E(b)) = a*b mod Q",
            vec![
                ("a", a.clone()),
                ("b", b.clone()),
                ("E(a)", ma.value().clone()),
                ("E(b)", mb.value().clone()),
            ],
            nk::decrypt(key, &nk::hom_mul(&ma, &mb)),
            (&a * &b) % &q,
        ));
    }
    Ok(report)
}

/// The same two identities for DGHV over `Z_2`.
pub fn check_identities_dghv(
    key: &DghvSecretKey,
    trials: u64,
    rng: &mut Rng,
) -> Result<IdentityReport, PropertyError> {
    if trials == 0 {
        return Err(PropertyError::InvalidParameter(
            "trials must be at least 1".into(),
        ));
    }
    let two = BigUint::from(2u32);
    let r_limit = product_r_limit(key.modulus(), &two);
    let mut report = IdentityReport::default();
    for _ in 0..trials {
        let (a, b) = (rng.bit(), rng.bit());
        let ea = dghv::encrypt_bit(key, a, rng).expect("valid bit");
        let eb = dghv::encrypt_bit(key, b, rng).expect("valid bit");
        let inputs = |ea: &DghvCiphertext, eb: &DghvCiphertext| {
            vec![
                ("a", BigUint::from(a)),
                ("b", BigUint::from(b)),
                ("E(a)", ea.value().clone()),
                ("E(b)", eb.value().clone()),
            ]
        };
        report.record(identity(
            "D(E(a)+E(b)) = a+b mod 2",
            inputs(&ea, &eb),
            dghv::decrypt_bit(key, &dghv::hom_add(&ea, &eb)).into(),
            BigUint::from((a + b) % 2),
        ));

        let mut product_operand = |m: u8| {
            let r = rng.below(&r_limit);
            dghv::encrypt_bit_with(key, m, &wide_q(key.lambda(), rng), &r).expect("r below the product limit")
        };
        let ma = product_operand(a);
        let mb = product_operand(b);
        report.record(identity(
            "D(E(a)*E(b)) = a*b mod 2",
            inputs(&ma, &mb),
            dghv::decrypt_bit(key, &dghv::hom_mul(&ma, &mb)).into(),
            BigUint::from(a * b),
        ));
    }
    Ok(report)
}

/// Commutativity, associativity and distributivity at the ciphertext level:
/// both groupings of each law must decrypt to the same message.
pub fn check_algebraic_laws(
    key: &NkSecretKey,
    trials: u64,
    rng: &mut Rng,
) -> Result<IdentityReport, PropertyError> {
    if trials == 0 {
        return Err(PropertyError::InvalidParameter(
            "trials must be at least 1".into(),
        ));
    }
    let q = key.q_pub().clone();
    let mut report = IdentityReport::default();
    let d = |c: &NkCiphertext| nk::decrypt(key, c);
    for _ in 0..trials {
        let msgs: Vec<BigUint> = (0..3).map(|_| rng.below(&q)).collect();
        let cts: Vec<NkCiphertext> = msgs
            .iter()
            .map(|m| nk::encrypt(key, m, rng).expect("m < Q"))
            .collect();
        let (x, y, z) = (&cts[0], &cts[1], &cts[2]);
        let inputs = || {
            vec![
                ("a", msgs[0].clone()),
                ("b", msgs[1].clone()),
                ("c", msgs[2].clone()),
            ]
        };
        let laws = [
            (
                "E(a)+E(b) ~ E(b)+E(a)",
                d(&nk::hom_add(x, y)),
                d(&nk::hom_add(y, x)),
            ),
            (
                "E(a)*E(b) ~ E(b)*E(a)",
                d(&nk::hom_mul(x, y)),
                d(&nk::hom_mul(y, x)),
            ),
            (
                "(E(a)+E(b))+E(c) ~ E(a)+(E(b)+E(c))",
                d(&nk::hom_add(&nk::hom_add(x, y), z)),
                d(&nk::hom_add(x, &nk::hom_add(y, z))),
            ),
            (
                "(E(a)*E(b))*E(c) ~ E(a)*(E(b)*E(c))",
                d(&nk::hom_mul(&nk::hom_mul(x, y), z)),
                d(&nk::hom_mul(x, &nk::hom_mul(y, z))),
            ),
            (
                "E(a)*(E(b)+E(c)) ~ E(a)*E(b)+E(a)*E(c)",
                d(&nk::hom_mul(x, &nk::hom_add(y, z))),
                d(&nk::hom_add(&nk::hom_mul(x, y), &nk::hom_mul(x, z))),
            ),
        ];
        for (description, lhs, rhs) in laws {
            report.record(identity(description, inputs(), lhs, rhs));
        }
    }
    Ok(report)
}

/// Builds the wraparound witness for a specific pair: the decrypted sum is
/// `(a + b) mod Q`, contrasted with the integer `a + b`.
pub fn wraparound_witness_for(
    key: &NkSecretKey,
    a: &BigUint,
    b: &BigUint,
    rng: &mut Rng,
) -> Result<Witness, PropertyError> {
    let invalid = |what: &str| PropertyError::InvalidParameter(what.to_string());
    let ea = nk::encrypt(key, a, rng).map_err(|e| invalid(&e.to_string()))?;
    let eb = nk::encrypt(key, b, rng).map_err(|e| invalid(&e.to_string()))?;
    let observed = nk::decrypt(key, &nk::hom_add(&ea, &eb));
    Ok(Witness {
        kind: WitnessKind::NonImplication,
        description: "a+b != D(E(a)+E(b))".into(),
        inputs: vec![("a".into(), a.clone()), ("b".into(), b.clone())],
        observed: observed.into(),
        expected_contrast: (a + b).into(),
    })
}

/// Random `a, b < Q` with `a + b >= Q`, so the decrypted sum wraps.
pub fn find_wraparound_witness(key: &NkSecretKey, rng: &mut Rng) -> Result<Witness, PropertyError> {
    let q = key.q_pub();
    if *q < BigUint::from(3u32) {
        return Err(PropertyError::InvalidParameter("Q must be at least 3".into()));
    }
    let a = rng.in_range(&BigUint::one(), q);
    let b = rng.in_range(&(q - &a), q);
    wraparound_witness_for(key, &a, &b, rng)
}

/// Checks a pair of encrypted bits for an order violation in either
/// direction. Ties are never witnesses.
pub fn order_witness(a: u8, ea: &DghvCiphertext, b: u8, eb: &DghvCiphertext) -> Option<Witness> {
    if a == b {
        return None;
    }
    let plain_less = a < b;
    let cipher_less = ea.value() < eb.value();
    if plain_less == cipher_less {
        return None;
    }
    let description = if plain_less {
        "a < b but E(a) > E(b)"
    } else {
        "a > b but E(a) < E(b)"
    };
    Some(Witness {
        kind: WitnessKind::NonImplication,
        description: description.into(),
        inputs: vec![
            ("a".into(), BigUint::from(a)),
            ("b".into(), BigUint::from(b)),
            ("E(a)".into(), ea.value().clone()),
            ("E(b)".into(), eb.value().clone()),
        ],
        observed: cipher_less.into(),
        expected_contrast: plain_less.into(),
    })
}

/// Encrypts distinct bits until ciphertext order disagrees with plaintext
/// order. Even trials look for `a < b` with `E(a) > E(b)`, odd trials for the
/// converse.
pub fn find_order_counterexample(
    key: &DghvSecretKey,
    max_trials: u64,
    rng: &mut Rng,
) -> Result<Witness, PropertyError> {
    for trial in 0..max_trials {
        let (a, b) = if trial % 2 == 0 { (0, 1) } else { (1, 0) };
        let ea = dghv::encrypt_bit(key, a, rng).expect("valid bit");
        let eb = dghv::encrypt_bit(key, b, rng).expect("valid bit");
        if let Some(w) = order_witness(a, &ea, b, &eb) {
            return Ok(w);
        }
    }
    Err(PropertyError::SearchExhausted(max_trials))
}
