use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};

use super::server::handle_line;
use super::wire::{decode_response, encode_request};
use super::{Direction, EvalRequest, EvalResponse, ProtocolError, Transcript};

/// Carries one request line to a server and brings back its response line.
pub trait Transport {
    fn round_trip(&mut self, request_line: &str) -> Result<String, ProtocolError>;
}

/// In-process server: same message contract, no socket.
#[derive(Debug, Default, Clone, Copy)]
pub struct Loopback;

impl Transport for Loopback {
    fn round_trip(&mut self, request_line: &str) -> Result<String, ProtocolError> {
        Ok(handle_line(request_line))
    }
}

#[derive(Debug)]
pub struct TcpClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl TcpClient {
    pub fn connect(addr: &str) -> Result<Self, ProtocolError> {
        let connect_err = |source| ProtocolError::Connect {
            addr: addr.to_string(),
            source,
        };
        let addrs: Vec<_> = addr.to_socket_addrs().map_err(connect_err)?.collect();
        let stream = TcpStream::connect(&addrs[..]).map_err(connect_err)?;
        Ok(Self {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
        })
    }
}

impl Transport for TcpClient {
    fn round_trip(&mut self, request_line: &str) -> Result<String, ProtocolError> {
        self.writer.write_all(request_line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(ProtocolError::Disconnected);
        }
        Ok(line.trim_end_matches(['\r', '\n']).to_string())
    }
}

/// Client side of a session: a transport plus the transcript of every
/// message it carried.
pub struct Session<T> {
    transport: T,
    transcript: Transcript,
}

impl<T: Transport> Session<T> {
    pub fn new(transport: T) -> Self {
        Self {
            transport,
            transcript: Transcript::new(),
        }
    }

    pub fn exchange(&mut self, req: &EvalRequest) -> Result<EvalResponse, ProtocolError> {
        let line = encode_request(req);
        self.transcript.push(Direction::ToServer, line.clone())?;
        let reply = self.transport.round_trip(&line)?;
        self.transcript.push(Direction::ToClient, reply.clone())?;
        decode_response(&reply)
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}
