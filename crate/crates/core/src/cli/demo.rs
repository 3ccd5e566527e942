//! Self-checking reproductions of the worked examples.
//!
//! Every demo uses fixed moduli and fixed `(q, r)` values, so its output is
//! the same on every run. Each step is compared with an embedded expected
//! value; any difference flips the verdict to `mismatch`.

use std::fmt;

use num_bigint::BigUint;

use crate::arith::Rng;
use crate::dghv::{self, DghvSecretKey};
use crate::encoding::{ascii_decode, ascii_encode, bits_of, unpack_base256};
use crate::nk::{self, NkCiphertext, NkSecretKey};
use crate::properties::order_witness;
use crate::protocol::{
    client_finish_dghv, client_prepare_dghv_with, CiphertextPayload, Function, Loopback, NkOutcome, Session,
    Transcript,
};
use crate::protocol::{client_roundtrip_fixed, client_roundtrip_nk_with};

pub const DGHV_MODULUS: u64 = 7919;
pub const NK_MODULUS: u64 = 22801763489;
pub const NK_PRIME: u64 = 15485863;

/// `(q, r)` pairs for the bits of 5 (MSB first).
pub const TABLE1_A_NOISE: [(u64, u64); 3] = [(1325, 57), (3168, 49), (5247, 63)];
/// `(q, r)` pairs for the bits of 3.
pub const TABLE1_B_NOISE: [(u64, u64); 2] = [(5538, 85), (6214, 74)];
/// `(q, r)` for the encodings of "0.1" and "2.3".
pub const NK_NOISE: [(u64, u64); 2] = [(3215964, 13), (6490231, 9)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Reproduced,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoReport {
    pub name: String,
    pub steps: Vec<(String, String)>,
    pub expected: Vec<String>,
    pub verdict: Verdict,
}

impl DemoReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            steps: Vec::new(),
            expected: Vec::new(),
            verdict: Verdict::Reproduced,
        }
    }

    fn step(&mut self, label: impl Into<String>, value: impl ToString, expected: impl Into<String>) {
        let value = value.to_string();
        let expected = expected.into();
        if value != expected {
            self.verdict = Verdict::Mismatch;
        }
        self.steps.push((label.into(), value));
        self.expected.push(expected);
    }

    pub fn reproduced(&self) -> bool {
        self.verdict == Verdict::Reproduced
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "demo: {}", self.name)?;
        for ((label, value), expected) in self.steps.iter().zip(&self.expected) {
            writeln!(f, "{label}: {value}")?;
            if value != expected {
                writeln!(f, "  expected: {expected}")?;
            }
        }
        let verdict = match self.verdict {
            Verdict::Reproduced => "reproduced",
            Verdict::Mismatch => "mismatch",
        };
        writeln!(f, "verdict: {verdict}")
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn pairs(v: &[(u64, u64)]) -> Vec<(BigUint, BigUint)> {
    v.iter().map(|&(q, r)| (big(q), big(r))).collect()
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn dghv_example_key() -> DghvSecretKey {
    DghvSecretKey::from_modulus(big(DGHV_MODULUS)).expect("7919 is an odd 13-bit modulus")
}

pub fn nk_example_key() -> NkSecretKey {
    NkSecretKey::from_parts(big(NK_MODULUS), big(NK_PRIME)).expect("valid example key")
}

pub fn table1() -> DemoReport {
    let key = dghv_example_key();
    let mut report = DemoReport::new("table1");
    report.step("p", key.modulus(), "7919");
    report.step("a", 5, "5");
    report.step("a bits", bits_of(&big(5)), "101");
    let expected = ["10492790", "25087490", "41551120", "43855593", "49208815"];
    let a_bits = bits_of(&big(5));
    let b_bits = bits_of(&big(3));
    let rows = a_bits
        .iter()
        .zip(TABLE1_A_NOISE)
        .map(|row| ("a", row))
        .chain(b_bits.iter().zip(TABLE1_B_NOISE).map(|row| ("b", row)));
    for (i, (name, (m, (q, r)))) in rows.enumerate() {
        if i == 3 {
            report.step("b", 3, "3");
            report.step("b bits", &b_bits, "11");
        }
        let c = dghv::encrypt_bit_with(&key, m, &big(q), &big(r))
            .map(|c| c.to_string())
            .unwrap_or_else(|e| format!("error: {e}"));
        report.step(format!("E({name}) 7919*{q}+2*{r}+{m}"), c, expected[i]);
    }
    report
}

/// Runs the full bitwise protocol for 5 + 3 over the loopback transport and
/// returns the report together with the session transcript.
pub fn table2_session() -> (DemoReport, Transcript) {
    let key = dghv_example_key();
    let mut report = DemoReport::new("table2");
    let mut session = Session::new(Loopback);
    let run = (|| {
        let req = client_prepare_dghv_with(
            &key,
            &big(5),
            &big(3),
            Function::Add,
            &pairs(&TABLE1_A_NOISE),
            &pairs(&TABLE1_B_NOISE),
        )?;
        let resp = session.exchange(&req)?;
        let finished = client_finish_dghv(&key, &resp)?;
        Ok::<_, crate::protocol::ProtocolError>((req, resp, finished))
    })();
    match run {
        Ok((req, resp, finished)) => {
            if let crate::protocol::EvalRequest::DghvBits { x, y, .. } = &req {
                report.step("x", join(x), "10492790,25087490,41551120");
                report.step("y", join(y), "43855593,49208815");
            }
            let returned = match &resp.result {
                Some(CiphertextPayload::Bits(v)) => join(v),
                other => format!("{other:?}"),
            };
            report.step("server f(x,y)=x+y", returned, "10492790,68943083,90759935");
            report.step("decrypted bits", join(&finished.bits), "1,1,0");
            report.step("client value", &finished.value, "6");
            report.step("true sum", 5 + 3, "8");
            let contrast = if finished.value == big(8) {
                "equal".to_string()
            } else {
                format!("{} ≠ 8", finished.value)
            };
            report.step("contrast", contrast, "6 ≠ 8");
        }
        Err(e) => report.step("protocol", format!("error: {e}"), "ok"),
    }
    (report, session.into_transcript())
}

pub fn table2() -> DemoReport {
    table2_session().0
}

pub fn nk_example_session() -> (DemoReport, Transcript) {
    let key = nk_example_key();
    let mut report = DemoReport::new("nk-example");
    let mut session = Session::new(Loopback);
    report.step("p", key.modulus(), "22801763489");
    report.step("Q", key.q_pub(), "15485863");
    let noise = [
        (big(NK_NOISE[0].0), big(NK_NOISE[0].1)),
        (big(NK_NOISE[1].0), big(NK_NOISE[1].1)),
    ];
    for (text, bytes) in [("0.1", "48,250,49"), ("2.3", "50,250,51")] {
        let encoded = ascii_encode(text).map(|e| e.to_string()).unwrap_or_default();
        report.step(format!("ASCII {text}"), encoded, bytes);
    }
    match client_roundtrip_nk_with(&mut session, &key, Function::Add, "0.1", "2.3", noise) {
        Ok(run) => {
            report.step("T(0.1)", &run.a_bar, "3209777");
            report.step("T(2.3)", &run.b_bar, "3340851");
            report.step("E(3209777) q=3215964 r=13", &run.a_hat, "73329650721664392");
            report.step("E(3340851) q=6490231 r=9", &run.b_hat, "147988712393689577");
            for (label, hat, want) in [("a", &run.a_hat, "0.1"), ("b", &run.b_hat, "2.3")] {
                let back = nk::decrypt(&key, &NkCiphertext::from_value(hat.clone()));
                let text = ascii_decode(unpack_base256(&back).as_bytes()).unwrap_or_else(|e| e.to_string());
                report.step(format!("D({label}) then T^-1"), text, want);
            }
            report.step("server c = a + b", &run.c_hat, "221318363115353969");
            report.step("(c mod p) mod Q", &run.c_bar, "6550628");
            report.step("T^-1", unpack_base256(&run.c_bar), "99,244,100");
            let decoded = match &run.outcome {
                NkOutcome::Decoded(s) => s.clone(),
                NkOutcome::DecodeFailure(bytes) => {
                    format!("decode failure, bytes {bytes} are not ASCII-table codes")
                }
            };
            report.step(
                "ASCII",
                decoded,
                "decode failure, bytes 99,244,100 are not ASCII-table codes",
            );
            report.step("wanted", "2.4", "2.4");
        }
        Err(e) => report.step("protocol", format!("error: {e}"), "ok"),
    }
    (report, session.into_transcript())
}

pub fn nk_example() -> DemoReport {
    nk_example_session().0
}

/// Same key and operands as `nk-example`, fixed-point codec at scale 1.
pub fn fixed_point_contrast() -> DemoReport {
    let key = nk_example_key();
    let mut report = DemoReport::new("fixed-point-contrast");
    let mut session = Session::new(Loopback);
    // fixed seed: the decoded sum does not depend on the noise drawn
    let mut rng = Rng::from_seed(0);
    match client_roundtrip_fixed(&mut session, &key, Function::Add, "0.1", "2.3", 1, &mut rng) {
        Ok(run) => {
            report.step("fixed(0.1, scale 1)", &run.a_bar, "1");
            report.step("fixed(2.3, scale 1)", &run.b_bar, "23");
            report.step("(c mod p) mod Q", &run.c_bar, "24");
            let text = match run.outcome {
                NkOutcome::Decoded(s) => s,
                NkOutcome::DecodeFailure(b) => format!("decode failure {b}"),
            };
            report.step("decoded", text, "2.4");
        }
        Err(e) => report.step("protocol", format!("error: {e}"), "ok"),
    }
    report
}

pub fn order_counterexample() -> DemoReport {
    let key = dghv_example_key();
    let mut report = DemoReport::new("order-counterexample");
    let e0 = dghv::encrypt_bit_with(&key, 0, &big(5), &big(0)).expect("admissible");
    let e1 = dghv::encrypt_bit_with(&key, 1, &big(0), &big(0)).expect("admissible");
    report.step("E(0) q=5 r=0", &e0, "39595");
    report.step("E(1) q=0 r=0", &e1, "1");
    report.step("0 < 1", true, "true");
    report.step("E(0) < E(1)", e0.value() < e1.value(), "false");
    let valid = order_witness(0, &e0, 1, &e1).is_some_and(|w| w.holds());
    report.step("witness valid", valid, "true");
    report
}

pub const NAMES: [&str; 5] = [
    "table1",
    "table2",
    "nk-example",
    "fixed-point-contrast",
    "order-counterexample",
];

pub fn run(name: &str) -> Option<DemoReport> {
    Some(match name {
        "table1" => table1(),
        "table2" => table2(),
        "nk-example" => nk_example(),
        "fixed-point-contrast" => fixed_point_contrast(),
        "order-counterexample" => order_counterexample(),
        _ => return None,
    })
}
