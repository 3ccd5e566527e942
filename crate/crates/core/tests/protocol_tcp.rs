use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use intfhe::arith::Rng;
use intfhe::cli::demo;
use intfhe::protocol::wire::decode_response;
use intfhe::protocol::{
    client_finish_dghv, client_prepare_dghv, client_roundtrip_nk, serve_listener, Function, Loopback,
    NkOutcome, ProtocolError, Session, Status, TcpClient,
};
use num_bigint::BigUint;

fn spawn_server() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    thread::spawn(move || serve_listener(listener));
    addr
}

#[test]
fn two_requests_share_one_connection() {
    let addr = spawn_server();
    let key = demo::dghv_example_key();
    let mut rng = Rng::from_seed(11);
    let mut session = Session::new(TcpClient::connect(&addr).unwrap());
    for (a, b, want) in [(5u32, 3u32, 6u32), (4, 3, 7)] {
        let req = client_prepare_dghv(&key, &a.into(), &b.into(), Function::Add, &mut rng);
        let resp = session.exchange(&req).unwrap();
        assert_eq!(
            client_finish_dghv(&key, &resp).unwrap().value,
            BigUint::from(want)
        );
    }
    let transcript = session.into_transcript();
    assert_eq!(transcript.entries().len(), 4);
    assert!(transcript.is_alternating());
}

#[test]
fn tcp_and_loopback_transcripts_agree_for_the_same_seed() {
    let addr = spawn_server();
    let key = demo::nk_example_key();
    let mut tcp = Session::new(TcpClient::connect(&addr).unwrap());
    let mut local = Session::new(Loopback);
    let a = client_roundtrip_nk(
        &mut tcp,
        &key,
        Function::Add,
        "0.1",
        "2.3",
        &mut Rng::from_seed(3),
    )
    .unwrap();
    let b = client_roundtrip_nk(
        &mut local,
        &key,
        Function::Add,
        "0.1",
        "2.3",
        &mut Rng::from_seed(3),
    )
    .unwrap();
    assert_eq!(a, b);
    assert_eq!(a.c_bar, BigUint::from(6550628u32));
    assert!(matches!(a.outcome, NkOutcome::DecodeFailure(_)));
    assert_eq!(tcp.transcript().render(), local.transcript().render());
}

#[test]
fn garbage_gets_a_parse_error_and_the_connection_survives() {
    let addr = spawn_server();
    let mut stream = TcpStream::connect(&addr).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut line = String::new();

    stream.write_all(b"not json\n").unwrap();
    reader.read_line(&mut line).unwrap();
    assert_eq!(
        line,
        "{\"type\":\"result\",\"status\":\"error\",\"detail\":\"parse\"}\n"
    );

    stream.write_all(&[0xff, 0xfe, b'\n']).unwrap();
    line.clear();
    reader.read_line(&mut line).unwrap();
    assert_eq!(
        decode_response(line.trim_end()).unwrap().error_detail.as_deref(),
        Some("parse")
    );

    line.clear();
    stream
        .write_all(
            b"{\"type\":\"eval\",\"scheme\":\"nk\",\"fn\":\"add\",\"x\":\"2\",\"y\":\"3\",\"Q\":\"7\"}\n",
        )
        .unwrap();
    reader.read_line(&mut line).unwrap();
    assert_eq!(line, "{\"type\":\"result\",\"status\":\"ok\",\"result\":\"5\"}\n");
}

#[test]
fn unknown_fields_are_rejected() {
    let addr = spawn_server();
    let mut stream = TcpStream::connect(&addr).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    stream
        .write_all(b"{\"type\":\"eval\",\"scheme\":\"nk\",\"fn\":\"add\",\"x\":\"2\",\"y\":\"3\",\"Q\":\"7\",\"p\":\"11\"}\n")
        .unwrap();
    let mut line = String::new();
    reader.read_line(&mut line).unwrap();
    let resp = decode_response(line.trim_end()).unwrap();
    assert_eq!(resp.status, Status::Error);
}

#[test]
fn server_restarts_cleanly_after_client_disconnect() {
    let addr = spawn_server();
    drop(TcpStream::connect(&addr).unwrap());
    let key = demo::dghv_example_key();
    let mut session = Session::new(TcpClient::connect(&addr).unwrap());
    let req = client_prepare_dghv(
        &key,
        &2u32.into(),
        &1u32.into(),
        Function::Add,
        &mut Rng::from_seed(1),
    );
    let resp = session.exchange(&req).unwrap();
    assert_eq!(
        client_finish_dghv(&key, &resp).unwrap().value,
        BigUint::from(3u32)
    );
}

#[test]
fn dead_address_is_a_network_error() {
    let addr = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().to_string()
    };
    let err = TcpClient::connect(&addr).unwrap_err();
    assert!(matches!(err, ProtocolError::Connect { .. }));
    assert!(err.is_network());
}
