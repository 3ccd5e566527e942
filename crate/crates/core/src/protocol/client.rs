use num_bigint::BigUint;

use super::{
    CiphertextPayload, EvalRequest, EvalResponse, Function, ProtocolError, Session, Status, Transport,
};
use crate::arith::Rng;
use crate::dghv::{self, CiphertextVector, DghvCiphertext, DghvSecretKey};
use crate::encoding::{
    ascii_decode, ascii_encode, bits_of, fixed_point_decode, fixed_point_encode, pack_base256,
    unpack_base256, EncodedPlaintext,
};
use crate::nk::{self, NkCiphertext, NkError, NkSecretKey};

/// Bit-decomposes `a` and `b` and encrypts each bit with fresh randomness.
pub fn client_prepare_dghv(
    key: &DghvSecretKey,
    a: &BigUint,
    b: &BigUint,
    function: Function,
    rng: &mut Rng,
) -> EvalRequest {
    let mut enc =
        |n: &BigUint| dghv::encrypt_bits(key, &bits_of(n), rng).expect("decomposed bits are valid messages");
    let x = enc(a);
    let y = enc(b);
    dghv_request(function, x, y)
}

/// Like [`client_prepare_dghv`] with every `(q, r)` pair supplied by the
/// caller, MSB first, one pair per bit.
pub fn client_prepare_dghv_with(
    key: &DghvSecretKey,
    a: &BigUint,
    b: &BigUint,
    function: Function,
    x_noise: &[(BigUint, BigUint)],
    y_noise: &[(BigUint, BigUint)],
) -> Result<EvalRequest, ProtocolError> {
    let enc = |n: &BigUint, noise: &[(BigUint, BigUint)], name: &str| {
        let bits = bits_of(n);
        if bits.len() != noise.len() {
            return Err(ProtocolError::InvalidInput(format!(
                "{name} has {} bits but {} (q, r) pairs were given",
                bits.len(),
                noise.len()
            )));
        }
        bits.iter()
            .zip(noise)
            .map(|(m, (q, r))| dghv::encrypt_bit_with(key, m, q, r).map_err(ProtocolError::from))
            .collect::<Result<Vec<_>, _>>()
            .map(CiphertextVector)
    };
    Ok(dghv_request(
        function,
        enc(a, x_noise, "a")?,
        enc(b, y_noise, "b")?,
    ))
}

fn dghv_request(function: Function, x: CiphertextVector, y: CiphertextVector) -> EvalRequest {
    EvalRequest::DghvBits {
        function,
        x: x.0.into_iter().map(DghvCiphertext::into_value).collect(),
        y: y.0.into_iter().map(DghvCiphertext::into_value).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DghvOutcome {
    pub bits: Vec<u8>,
    pub value: BigUint,
}

/// Decrypts every returned position and reads the bits MSB first.
pub fn client_finish_dghv(key: &DghvSecretKey, resp: &EvalResponse) -> Result<DghvOutcome, ProtocolError> {
    let values = match checked_result(resp)? {
        CiphertextPayload::Bits(v) if !v.is_empty() => v,
        other => {
            return Err(ProtocolError::UnexpectedResponse(format!(
                "expected a nonempty ciphertext list, got {other:?}"
            )))
        }
    };
    let vector = CiphertextVector(values.iter().cloned().map(DghvCiphertext::from_value).collect());
    let (bits, value) = dghv::decrypt_bits(key, &vector)?;
    Ok(DghvOutcome { bits, value })
}

fn checked_result(resp: &EvalResponse) -> Result<&CiphertextPayload, ProtocolError> {
    match (resp.status, &resp.result) {
        (Status::Error, _) => Err(ProtocolError::Remote(
            resp.error_detail.clone().unwrap_or_default(),
        )),
        (Status::Ok, Some(result)) => Ok(result),
        (Status::Ok, None) => Err(ProtocolError::UnexpectedResponse("missing result".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NkOutcome {
    Decoded(String),
    /// The decrypted integer unpacks to bytes outside the ASCII table.
    DecodeFailure(EncodedPlaintext),
}

/// Every intermediate value of one NK round trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NkRoundtrip {
    pub a_bar: BigUint,
    pub b_bar: BigUint,
    pub a_hat: BigUint,
    pub b_hat: BigUint,
    pub c_hat: BigUint,
    pub c_bar: BigUint,
    pub outcome: NkOutcome,
}

fn ascii_pack(text: &str) -> Result<BigUint, ProtocolError> {
    Ok(pack_base256(ascii_encode(text)?.as_bytes())?)
}

fn ascii_unpack(n: &BigUint) -> NkOutcome {
    let bytes = unpack_base256(n);
    match ascii_decode(bytes.as_bytes()) {
        Ok(text) => NkOutcome::Decoded(text),
        Err(_) => NkOutcome::DecodeFailure(bytes),
    }
}

fn check_range(key: &NkSecretKey, m: &BigUint) -> Result<(), ProtocolError> {
    if m >= key.q_pub() {
        return Err(NkError::MessageOutOfRange {
            m: m.clone(),
            q_pub: key.q_pub().clone(),
        }
        .into());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn nk_pipeline<T: Transport>(
    session: &mut Session<T>,
    key: &NkSecretKey,
    function: Function,
    a_bar: BigUint,
    b_bar: BigUint,
    mut encrypt: impl FnMut(&BigUint, usize) -> Result<NkCiphertext, NkError>,
    decode: impl Fn(&BigUint) -> NkOutcome,
) -> Result<NkRoundtrip, ProtocolError> {
    check_range(key, &a_bar)?;
    check_range(key, &b_bar)?;
    let a_hat = encrypt(&a_bar, 0)?.into_value();
    let b_hat = encrypt(&b_bar, 1)?.into_value();
    let req = EvalRequest::Nk {
        function,
        x: a_hat.clone(),
        y: b_hat.clone(),
        q_pub: key.q_pub().clone(),
    };
    let resp = session.exchange(&req)?;
    let c_hat = match checked_result(&resp)? {
        CiphertextPayload::Single(c) => c.clone(),
        other => {
            return Err(ProtocolError::UnexpectedResponse(format!(
                "expected a single ciphertext, got {other:?}"
            )))
        }
    };
    let c_bar = nk::decrypt(key, &NkCiphertext::from_value(c_hat.clone()));
    let outcome = decode(&c_bar);
    Ok(NkRoundtrip {
        a_bar,
        b_bar,
        a_hat,
        b_hat,
        c_hat,
        c_bar,
        outcome,
    })
}

/// ASCII-encode, pack, encrypt, evaluate remotely, decrypt, unpack, decode.
pub fn client_roundtrip_nk<T: Transport>(
    session: &mut Session<T>,
    key: &NkSecretKey,
    function: Function,
    a_text: &str,
    b_text: &str,
    rng: &mut Rng,
) -> Result<NkRoundtrip, ProtocolError> {
    let (a_bar, b_bar) = (ascii_pack(a_text)?, ascii_pack(b_text)?);
    nk_pipeline(
        session,
        key,
        function,
        a_bar,
        b_bar,
        |m, _| nk::encrypt(key, m, rng),
        ascii_unpack,
    )
}

/// [`client_roundtrip_nk`] with the `(q, r)` pairs for both operands fixed.
pub fn client_roundtrip_nk_with<T: Transport>(
    session: &mut Session<T>,
    key: &NkSecretKey,
    function: Function,
    a_text: &str,
    b_text: &str,
    noise: [(BigUint, BigUint); 2],
) -> Result<NkRoundtrip, ProtocolError> {
    let (a_bar, b_bar) = (ascii_pack(a_text)?, ascii_pack(b_text)?);
    nk_pipeline(
        session,
        key,
        function,
        a_bar,
        b_bar,
        |m, i| nk::encrypt_with(key, m, &noise[i].0, &noise[i].1),
        ascii_unpack,
    )
}

/// Same pipeline with the fixed-point decimal codec in place of the ASCII
/// table. Sums of equal-scale decimals come back right.
pub fn client_roundtrip_fixed<T: Transport>(
    session: &mut Session<T>,
    key: &NkSecretKey,
    function: Function,
    a_text: &str,
    b_text: &str,
    scale: u32,
    rng: &mut Rng,
) -> Result<NkRoundtrip, ProtocolError> {
    let a_bar = fixed_point_encode(a_text, scale)?;
    let b_bar = fixed_point_encode(b_text, scale)?;
    // a product carries twice the fractional digits
    let out_scale = match function {
        Function::Add => scale,
        Function::Mul => 2 * scale,
    };
    nk_pipeline(
        session,
        key,
        function,
        a_bar,
        b_bar,
        |m, _| nk::encrypt(key, m, rng),
        |c| NkOutcome::Decoded(fixed_point_decode(c, out_scale)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Loopback;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn pairs(v: &[(u64, u64)]) -> Vec<(BigUint, BigUint)> {
        v.iter().map(|&(q, r)| (big(q), big(r))).collect()
    }

    fn dghv_example_key() -> DghvSecretKey {
        DghvSecretKey::from_modulus(big(7919)).unwrap()
    }

    fn nk_example_key() -> NkSecretKey {
        NkSecretKey::from_parts(big(22801763489), big(15485863)).unwrap()
    }

    #[test]
    fn prepare_with_table_one_noise() {
        let req = client_prepare_dghv_with(
            &dghv_example_key(),
            &big(5),
            &big(3),
            Function::Add,
            &pairs(&[(1325, 57), (3168, 49), (5247, 63)]),
            &pairs(&[(5538, 85), (6214, 74)]),
        )
        .unwrap();
        assert_eq!(
            req,
            EvalRequest::DghvBits {
                function: Function::Add,
                x: vec![big(10492790), big(25087490), big(41551120)],
                y: vec![big(43855593), big(49208815)],
            }
        );
    }

    #[test]
    fn prepare_with_wrong_noise_count() {
        let err = client_prepare_dghv_with(
            &dghv_example_key(),
            &big(5),
            &big(3),
            Function::Add,
            &pairs(&[(1, 1)]),
            &pairs(&[(1, 1), (1, 1)]),
        );
        assert!(matches!(err, Err(ProtocolError::InvalidInput(_))));
    }

    #[test]
    fn prepare_zero_operands() {
        let key = dghv_example_key();
        let mut rng = Rng::from_seed(0);
        let req = client_prepare_dghv(&key, &big(0), &big(0), Function::Add, &mut rng);
        let EvalRequest::DghvBits { x, y, .. } = &req else {
            panic!()
        };
        assert_eq!((x.len(), y.len()), (1, 1));
        let mut session = Session::new(Loopback);
        let resp = session.exchange(&req).unwrap();
        assert_eq!(client_finish_dghv(&key, &resp).unwrap().value, big(0));
    }

    #[test]
    fn prepare_lengths_follow_bit_lengths() {
        let mut rng = Rng::from_seed(11);
        let key = dghv::keygen(16, &mut rng).unwrap();
        for (a, b) in [(1u64, 1000u64), (77, 2), (65535, 3)] {
            let req = client_prepare_dghv(&key, &big(a), &big(b), Function::Add, &mut rng);
            let EvalRequest::DghvBits { x, y, .. } = req else {
                panic!()
            };
            assert_eq!(x.len(), bits_of(&big(a)).len());
            assert_eq!(y.len(), bits_of(&big(b)).len());
        }
    }

    #[test]
    fn adding_zero_vector_keeps_single_bit() {
        let key = dghv_example_key();
        let mut rng = Rng::from_seed(5);
        for bit in [0u64, 1] {
            let req = client_prepare_dghv(&key, &big(bit), &big(0), Function::Add, &mut rng);
            let resp = Session::new(Loopback).exchange(&req).unwrap();
            assert_eq!(client_finish_dghv(&key, &resp).unwrap().value, big(bit));
        }
    }

    #[test]
    fn finish_rejects_error_status() {
        let resp = EvalResponse::error("parse");
        assert!(matches!(
            client_finish_dghv(&dghv_example_key(), &resp),
            Err(ProtocolError::Remote(d)) if d == "parse"
        ));
        let resp = EvalResponse::ok(CiphertextPayload::Single(big(1)));
        assert!(matches!(
            client_finish_dghv(&dghv_example_key(), &resp),
            Err(ProtocolError::UnexpectedResponse(_))
        ));
    }

    #[test]
    fn nk_example_fails_to_decode() {
        let mut session = Session::new(Loopback);
        let run = client_roundtrip_nk_with(
            &mut session,
            &nk_example_key(),
            Function::Add,
            "0.1",
            "2.3",
            [(big(3215964), big(13)), (big(6490231), big(9))],
        )
        .unwrap();
        assert_eq!(run.a_bar, big(3209777));
        assert_eq!(run.b_bar, big(3340851));
        assert_eq!(run.a_hat, big(73329650721664392));
        assert_eq!(run.b_hat, big(147988712393689577));
        assert_eq!(run.c_hat, big(221318363115353969));
        assert_eq!(run.c_bar, big(6550628));
        assert_eq!(
            run.outcome,
            NkOutcome::DecodeFailure(EncodedPlaintext::new(vec![99, 244, 100]).unwrap())
        );
        assert!(session.transcript().is_alternating());
    }

    #[test]
    fn single_digit_sums_leave_the_table() {
        // oracle: byte sums 49 + 50 = 99 and 48 + 49 = 97 are both outside 48..=57
        let key = nk_example_key();
        let mut rng = Rng::from_seed(3);
        for (a, b, byte) in [("1", "2", 99u8), ("0", "1", 97)] {
            let run = client_roundtrip_nk(&mut Session::new(Loopback), &key, Function::Add, a, b, &mut rng)
                .unwrap();
            assert_eq!(
                run.outcome,
                NkOutcome::DecodeFailure(EncodedPlaintext::new(vec![byte]).unwrap())
            );
        }
        // 0 + '0' style sums can never land on a digit: the smallest is 96
        for a in b'0'..=b'9' {
            for b in b'0'..=b'9' {
                assert!(!(48..=57).contains(&(a as u32 + b as u32)));
            }
        }
    }

    #[test]
    fn fixed_point_sum_decodes() {
        let key = nk_example_key();
        let mut rng = Rng::from_seed(1);
        let run = client_roundtrip_fixed(
            &mut Session::new(Loopback),
            &key,
            Function::Add,
            "0.1",
            "2.3",
            1,
            &mut rng,
        )
        .unwrap();
        assert_eq!(run.c_bar, big(24));
        assert_eq!(run.outcome, NkOutcome::Decoded("2.4".into()));
    }

    #[test]
    fn out_of_range_message() {
        let key = NkSecretKey::from_parts(big(101), big(5)).unwrap();
        let mut rng = Rng::from_seed(1);
        let err = client_roundtrip_nk(
            &mut Session::new(Loopback),
            &key,
            Function::Add,
            "1",
            "2",
            &mut rng,
        );
        assert!(matches!(
            err,
            Err(ProtocolError::Nk(NkError::MessageOutOfRange { .. }))
        ));
    }

    #[test]
    fn pipeline_matches_modular_sum() {
        let mut rng = Rng::from_seed(99);
        let key = nk::keygen(40, &big(15485863), &mut rng).unwrap();
        let q = key.q_pub().clone();
        for (a, b) in [("9", "9"), ("1.5", "4"), ("57", "0.9"), ("3.", ".4")] {
            let run = client_roundtrip_nk(&mut Session::new(Loopback), &key, Function::Add, a, b, &mut rng)
                .unwrap();
            let want = (ascii_pack(a).unwrap() + ascii_pack(b).unwrap()) % &q;
            assert_eq!(run.c_bar, want, "{a} + {b}");
        }
    }
}
