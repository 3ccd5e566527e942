//! Simulated outsourced evaluation.
//!
//! A client encodes and encrypts two operands, ships them to a server that
//! holds no key material, and decrypts whatever comes back. The server
//! applies one function (`add` or `mul`) to the raw ciphertext integers and
//! never reduces modulo anything.
//!
//! Messages are single JSON lines; see [`wire`] for the exact format. The
//! same message contract runs over an in-process [`Loopback`] and over TCP.

mod client;
mod server;
mod transcript;
mod transport;
pub mod wire;

use std::fmt;
use std::io;

use num_bigint::BigUint;
use thiserror::Error;

use crate::dghv::DghvError;
use crate::encoding::EncodingError;
use crate::nk::NkError;

pub use client::{
    client_finish_dghv, client_prepare_dghv, client_prepare_dghv_with, client_roundtrip_fixed,
    client_roundtrip_nk, client_roundtrip_nk_with, DghvOutcome, NkOutcome, NkRoundtrip,
};
pub use server::{evaluate, handle_line, serve, serve_connection, serve_listener, server_evaluate};
pub use transcript::{Direction, Transcript, TranscriptEntry};
pub use transport::{Loopback, Session, TcpClient, Transport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    DghvBits,
    Nk,
}

impl Scheme {
    pub fn wire_name(self) -> &'static str {
        match self {
            Scheme::DghvBits => "dghv-bits",
            Scheme::Nk => "nk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Add,
    Mul,
}

impl Function {
    pub fn wire_name(self) -> &'static str {
        match self {
            Function::Add => "add",
            Function::Mul => "mul",
        }
    }

    pub fn from_wire(name: &str) -> Result<Self, ProtocolError> {
        match name {
            "add" => Ok(Function::Add),
            "mul" => Ok(Function::Mul),
            other => Err(ProtocolError::UnsupportedFunction(other.to_string())),
        }
    }

    fn apply(self, x: &BigUint, y: &BigUint) -> BigUint {
        match self {
            Function::Add => x + y,
            Function::Mul => x * y,
        }
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.wire_name())
    }
}

/// One evaluation job as the server sees it: ciphertext integers only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalRequest {
    /// Two MSB-first vectors of bit ciphertexts.
    DghvBits {
        function: Function,
        x: Vec<BigUint>,
        y: Vec<BigUint>,
    },
    /// Two single ciphertexts plus the public prime.
    Nk {
        function: Function,
        x: BigUint,
        y: BigUint,
        q_pub: BigUint,
    },
}

impl EvalRequest {
    pub fn scheme(&self) -> Scheme {
        match self {
            EvalRequest::DghvBits { .. } => Scheme::DghvBits,
            EvalRequest::Nk { .. } => Scheme::Nk,
        }
    }

    pub fn function(&self) -> Function {
        match self {
            EvalRequest::DghvBits { function, .. } | EvalRequest::Nk { function, .. } => *function,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CiphertextPayload {
    Bits(Vec<BigUint>),
    Single(BigUint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResponse {
    pub status: Status,
    pub result: Option<CiphertextPayload>,
    pub error_detail: Option<String>,
}

impl EvalResponse {
    pub fn ok(result: CiphertextPayload) -> Self {
        Self {
            status: Status::Ok,
            result: Some(result),
            error_detail: None,
        }
    }

    pub fn error(detail: impl Into<String>) -> Self {
        Self {
            status: Status::Error,
            result: None,
            error_detail: Some(detail.into()),
        }
    }
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("parse")]
    Parse(String),
    #[error("malformed request: {0}")]
    MalformedRequest(String),
    #[error("unsupported function: {0}")]
    UnsupportedFunction(String),
    #[error("server reported an error: {0}")]
    Remote(String),
    #[error("unexpected response: {0}")]
    UnexpectedResponse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("transcript out of order: {0}")]
    TranscriptOrder(String),
    #[error("cannot connect to {addr}: {source}")]
    Connect { addr: String, source: io::Error },
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("connection closed by peer")]
    Disconnected,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Dghv(#[from] DghvError),
    #[error(transparent)]
    Nk(#[from] NkError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

impl ProtocolError {
    /// Transport-level failures, as opposed to protocol or input errors.
    pub fn is_network(&self) -> bool {
        matches!(
            self,
            ProtocolError::Connect { .. }
                | ProtocolError::Bind { .. }
                | ProtocolError::Disconnected
                | ProtocolError::Io(_)
        )
    }
}
