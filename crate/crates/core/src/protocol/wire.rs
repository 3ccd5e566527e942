//! Line-delimited JSON wire format.
//!
//! Request:
//!
//! ```text
//! {"type":"eval","scheme":"dghv-bits","fn":"add","x":["10492790",...],"y":[...]}
//! {"type":"eval","scheme":"nk","fn":"add","x":"733...","y":"147...","Q":"15485863"}
//! ```
//!
//! Response:
//!
//! ```text
//! {"type":"result","status":"ok","result":["10492790","68943083","90759935"]}
//! {"type":"result","status":"error","detail":"parse"}
//! ```
//!
//! Integers always travel as canonical decimal strings (digits only, no
//! leading zeros). Field order is fixed as shown and unknown fields are
//! rejected.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{CiphertextPayload, EvalRequest, EvalResponse, Function, ProtocolError, Scheme, Status};

#[derive(Serialize, Deserialize)]
enum RequestKind {
    #[serde(rename = "eval")]
    Eval,
}

#[derive(Serialize, Deserialize)]
enum ResponseKind {
    #[serde(rename = "result")]
    Result,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WireStatus {
    Ok,
    Error,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WirePayload {
    List(Vec<String>),
    Scalar(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequestMessage {
    #[serde(rename = "type")]
    kind: RequestKind,
    scheme: String,
    #[serde(rename = "fn")]
    function: String,
    x: WirePayload,
    y: WirePayload,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    q_pub: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResponseMessage {
    #[serde(rename = "type")]
    kind: ResponseKind,
    status: WireStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    result: Option<WirePayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

fn parse_decimal(s: &str) -> Result<BigUint, String> {
    let canonical =
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(format!("{s:?} is not a canonical decimal integer"));
    }
    Ok(s.parse().expect("validated digits"))
}

fn to_wire(payload: &CiphertextPayload) -> WirePayload {
    match payload {
        CiphertextPayload::Bits(v) => WirePayload::List(v.iter().map(BigUint::to_string).collect()),
        CiphertextPayload::Single(n) => WirePayload::Scalar(n.to_string()),
    }
}

fn from_wire(payload: WirePayload) -> Result<CiphertextPayload, String> {
    match payload {
        WirePayload::List(v) => v
            .iter()
            .map(|s| parse_decimal(s))
            .collect::<Result<Vec<_>, _>>()
            .map(CiphertextPayload::Bits),
        WirePayload::Scalar(s) => parse_decimal(&s).map(CiphertextPayload::Single),
    }
}

pub fn encode_request(req: &EvalRequest) -> String {
    let msg = match req {
        EvalRequest::DghvBits { function, x, y } => RequestMessage {
            kind: RequestKind::Eval,
            scheme: Scheme::DghvBits.wire_name().into(),
            function: function.wire_name().into(),
            x: to_wire(&CiphertextPayload::Bits(x.clone())),
            y: to_wire(&CiphertextPayload::Bits(y.clone())),
            q_pub: None,
        },
        EvalRequest::Nk {
            function,
            x,
            y,
            q_pub,
        } => RequestMessage {
            kind: RequestKind::Eval,
            scheme: Scheme::Nk.wire_name().into(),
            function: function.wire_name().into(),
            x: WirePayload::Scalar(x.to_string()),
            y: WirePayload::Scalar(y.to_string()),
            q_pub: Some(q_pub.to_string()),
        },
    };
    serde_json::to_string(&msg).expect("request serializes")
}

pub fn decode_request(line: &str) -> Result<EvalRequest, ProtocolError> {
    let msg: RequestMessage = serde_json::from_str(line).map_err(|e| ProtocolError::Parse(e.to_string()))?;
    let function = Function::from_wire(&msg.function)?;
    let malformed = ProtocolError::MalformedRequest;
    let x = from_wire(msg.x).map_err(malformed)?;
    let y = from_wire(msg.y).map_err(malformed)?;
    match (msg.scheme.as_str(), x, y, msg.q_pub) {
        ("dghv-bits", CiphertextPayload::Bits(x), CiphertextPayload::Bits(y), None) => {
            Ok(EvalRequest::DghvBits { function, x, y })
        }
        ("dghv-bits", _, _, None) => Err(malformed("dghv-bits operands must be lists".into())),
        ("dghv-bits", _, _, Some(_)) => Err(malformed("dghv-bits takes no Q".into())),
        ("nk", CiphertextPayload::Single(x), CiphertextPayload::Single(y), Some(q)) => Ok(EvalRequest::Nk {
            function,
            x,
            y,
            q_pub: parse_decimal(&q).map_err(malformed)?,
        }),
        ("nk", _, _, None) => Err(malformed("nk requires Q".into())),
        ("nk", _, _, Some(_)) => Err(malformed("nk operands must be single integers".into())),
        (other, ..) => Err(malformed(format!("unknown scheme {other:?}"))),
    }
}

pub fn encode_response(resp: &EvalResponse) -> String {
    let msg = ResponseMessage {
        kind: ResponseKind::Result,
        status: match resp.status {
            Status::Ok => WireStatus::Ok,
            Status::Error => WireStatus::Error,
        },
        result: resp.result.as_ref().map(to_wire),
        detail: resp.error_detail.clone(),
    };
    serde_json::to_string(&msg).expect("response serializes")
}

pub fn decode_response(line: &str) -> Result<EvalResponse, ProtocolError> {
    let msg: ResponseMessage = serde_json::from_str(line).map_err(|e| ProtocolError::Parse(e.to_string()))?;
    let result = msg
        .result
        .map(from_wire)
        .transpose()
        .map_err(ProtocolError::UnexpectedResponse)?;
    let status = match msg.status {
        WireStatus::Ok => Status::Ok,
        WireStatus::Error => Status::Error,
    };
    if status == Status::Ok && result.is_none() {
        return Err(ProtocolError::UnexpectedResponse(
            "ok response without result".into(),
        ));
    }
    Ok(EvalResponse {
        status,
        result,
        error_detail: msg.detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn table2_request() -> EvalRequest {
        EvalRequest::DghvBits {
            function: Function::Add,
            x: vec![big(10492790), big(25087490), big(41551120)],
            y: vec![big(43855593), big(49208815)],
        }
    }

    #[test]
    fn request_bytes() {
        assert_eq!(
            encode_request(&table2_request()),
            r#"{"type":"eval","scheme":"dghv-bits","fn":"add","x":["10492790","25087490","41551120"],"y":["43855593","49208815"]}"#
        );
        let nk = EvalRequest::Nk {
            function: Function::Add,
            x: big(73329650721664392),
            y: big(147988712393689577),
            q_pub: big(15485863),
        };
        assert_eq!(
            encode_request(&nk),
            r#"{"type":"eval","scheme":"nk","fn":"add","x":"73329650721664392","y":"147988712393689577","Q":"15485863"}"#
        );
    }

    #[test]
    fn response_bytes() {
        let ok = EvalResponse::ok(CiphertextPayload::Single(big(221318363115353969)));
        assert_eq!(
            encode_response(&ok),
            r#"{"type":"result","status":"ok","result":"221318363115353969"}"#
        );
        assert_eq!(
            encode_response(&EvalResponse::error("parse")),
            r#"{"type":"result","status":"error","detail":"parse"}"#
        );
    }

    #[test]
    fn rejects_unknown_fields() {
        let line = r#"{"type":"eval","scheme":"nk","fn":"add","x":"1","y":"2","Q":"5","extra":1}"#;
        assert!(matches!(decode_request(line), Err(ProtocolError::Parse(_))));
        let line = r#"{"type":"result","status":"ok","result":"1","who":"me"}"#;
        assert!(matches!(decode_response(line), Err(ProtocolError::Parse(_))));
    }

    #[test]
    fn rejects_wrong_type_tag() {
        let line = r#"{"type":"result","scheme":"nk","fn":"add","x":"1","y":"2","Q":"5"}"#;
        assert!(matches!(decode_request(line), Err(ProtocolError::Parse(_))));
    }

    #[test]
    fn shape_errors() {
        let cases = [
            r#"{"type":"eval","scheme":"dghv-bits","fn":"add","x":"1","y":["2"]}"#,
            r#"{"type":"eval","scheme":"dghv-bits","fn":"add","x":["1"],"y":["2"],"Q":"5"}"#,
            r#"{"type":"eval","scheme":"nk","fn":"add","x":"1","y":"2"}"#,
            r#"{"type":"eval","scheme":"nk","fn":"add","x":["1"],"y":"2","Q":"5"}"#,
            r#"{"type":"eval","scheme":"bgv","fn":"add","x":"1","y":"2"}"#,
            r#"{"type":"eval","scheme":"nk","fn":"add","x":"-1","y":"2","Q":"5"}"#,
            r#"{"type":"eval","scheme":"nk","fn":"add","x":"01","y":"2","Q":"5"}"#,
            r#"{"type":"eval","scheme":"nk","fn":"add","x":"1_0","y":"2","Q":"5"}"#,
        ];
        for line in cases {
            assert!(
                matches!(decode_request(line), Err(ProtocolError::MalformedRequest(_))),
                "{line}"
            );
        }
    }

    #[test]
    fn unsupported_function() {
        let line = r#"{"type":"eval","scheme":"nk","fn":"lt","x":"1","y":"2","Q":"5"}"#;
        assert!(matches!(
            decode_request(line),
            Err(ProtocolError::UnsupportedFunction(f)) if f == "lt"
        ));
    }

    #[test]
    fn ok_requires_result() {
        assert!(matches!(
            decode_response(r#"{"type":"result","status":"ok"}"#),
            Err(ProtocolError::UnexpectedResponse(_))
        ));
    }

    proptest! {
        #[test]
        fn request_round_trip(x in prop::collection::vec(any::<u128>(), 0..8), y in prop::collection::vec(any::<u128>(), 0..8), mul in any::<bool>()) {
            let function = if mul { Function::Mul } else { Function::Add };
            let req = EvalRequest::DghvBits {
                function,
                x: x.into_iter().map(BigUint::from).collect(),
                y: y.into_iter().map(BigUint::from).collect(),
            };
            let line = encode_request(&req);
            prop_assert!(!line.contains('\n'));
            prop_assert_eq!(decode_request(&line).unwrap(), req);
        }

        #[test]
        fn garbage_never_panics(line in ".{0,80}") {
            let _ = decode_request(&line);
            let _ = decode_response(&line);
        }
    }
}
