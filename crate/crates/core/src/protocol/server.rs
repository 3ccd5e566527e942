use std::convert::Infallible;
use std::io::{BufRead, BufReader, Write};
use std::iter;
use std::net::{TcpListener, TcpStream};

use num_bigint::BigUint;
use num_traits::Zero;

use super::wire::{decode_request, encode_response};
use super::{CiphertextPayload, EvalRequest, EvalResponse, ProtocolError};

/// Applies the requested function to the raw ciphertext integers.
///
/// Bit vectors are right-aligned at the least significant end, the shorter
/// one padded with literal zeros, and combined position by position. There
/// is no carry logic: a keyless evaluator has no way to know the carries.
pub fn evaluate(req: &EvalRequest) -> Result<CiphertextPayload, ProtocolError> {
    match req {
        EvalRequest::DghvBits { function, x, y } => {
            if x.is_empty() || y.is_empty() {
                return Err(ProtocolError::MalformedRequest("empty operand list".into()));
            }
            let width = x.len().max(y.len());
            let zero = BigUint::zero();
            let out = padded(x, width, &zero)
                .zip(padded(y, width, &zero))
                .map(|(a, b)| function.apply(a, b))
                .collect();
            Ok(CiphertextPayload::Bits(out))
        }
        EvalRequest::Nk { function, x, y, .. } => Ok(CiphertextPayload::Single(function.apply(x, y))),
    }
}

fn padded<'a>(v: &'a [BigUint], width: usize, zero: &'a BigUint) -> impl Iterator<Item = &'a BigUint> {
    iter::repeat_n(zero, width - v.len()).chain(v.iter())
}

pub fn server_evaluate(req: &EvalRequest) -> EvalResponse {
    match evaluate(req) {
        Ok(result) => EvalResponse::ok(result),
        Err(e) => EvalResponse::error(e.to_string()),
    }
}

/// One request line in, one response line out (without the newline).
pub fn handle_line(line: &str) -> String {
    let response = match decode_request(line.trim_end_matches(['\r', '\n'])) {
        Ok(req) => server_evaluate(&req),
        Err(e) => EvalResponse::error(e.to_string()),
    };
    encode_response(&response)
}

/// Answers every line on `stream` until the peer closes it.
pub fn serve_connection(stream: TcpStream) -> std::io::Result<()> {
    let mut writer = stream.try_clone()?;
    let reader = BufReader::new(stream);
    for line in reader.lines() {
        let line = match line {
            Ok(l) => l,
            // not UTF-8: still a parse error for this line
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => String::new(),
            Err(e) => return Err(e),
        };
        let mut out = handle_line(&line);
        out.push('\n');
        writer.write_all(out.as_bytes())?;
        writer.flush()?;
    }
    Ok(())
}

/// Serves connections one at a time, forever.
pub fn serve_listener(listener: TcpListener) -> Result<Infallible, ProtocolError> {
    loop {
        let (stream, _) = listener.accept()?;
        // a broken client connection does not stop the server
        let _ = serve_connection(stream);
    }
}

pub fn serve(listen_address: &str) -> Result<Infallible, ProtocolError> {
    let listener = TcpListener::bind(listen_address).map_err(|source| ProtocolError::Bind {
        addr: listen_address.to_string(),
        source,
    })?;
    serve_listener(listener)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::wire::decode_response;
    use crate::protocol::{Function, Status};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn table_two_sum_has_no_carries() {
        let req = EvalRequest::DghvBits {
            function: Function::Add,
            x: vec![big(10492790), big(25087490), big(41551120)],
            y: vec![big(43855593), big(49208815)],
        };
        assert_eq!(
            evaluate(&req).unwrap(),
            CiphertextPayload::Bits(vec![big(10492790), big(68943083), big(90759935)])
        );
    }

    #[test]
    fn positionwise_product_pads_with_zero() {
        let req = EvalRequest::DghvBits {
            function: Function::Mul,
            x: vec![big(2), big(3), big(4)],
            y: vec![big(5), big(6)],
        };
        assert_eq!(
            evaluate(&req).unwrap(),
            CiphertextPayload::Bits(vec![big(0), big(15), big(24)])
        );
    }

    #[test]
    fn nk_sum_and_product() {
        let mut req = EvalRequest::Nk {
            function: Function::Add,
            x: big(73329650721664392),
            y: big(147988712393689577),
            q_pub: big(15485863),
        };
        assert_eq!(
            evaluate(&req).unwrap(),
            CiphertextPayload::Single(big(221318363115353969))
        );
        if let EvalRequest::Nk { function, .. } = &mut req {
            *function = Function::Mul;
        }
        let want = big(73329650721664392) * big(147988712393689577);
        assert_eq!(evaluate(&req).unwrap(), CiphertextPayload::Single(want));
    }

    #[test]
    fn empty_operands_are_malformed() {
        let req = EvalRequest::DghvBits {
            function: Function::Add,
            x: vec![],
            y: vec![big(1)],
        };
        assert!(matches!(evaluate(&req), Err(ProtocolError::MalformedRequest(_))));
        let resp = server_evaluate(&req);
        assert_eq!(resp.status, Status::Error);
        assert!(resp.result.is_none());
    }

    #[test]
    fn garbage_line_answers_parse() {
        assert_eq!(
            handle_line("hello"),
            r#"{"type":"result","status":"error","detail":"parse"}"#
        );
        let resp = decode_response(&handle_line(
            r#"{"type":"eval","scheme":"nk","fn":"sub","x":"1","y":"2","Q":"5"}"#,
        ))
        .unwrap();
        assert_eq!(resp.error_detail.as_deref(), Some("unsupported function: sub"));
    }
}
