use std::fmt;

use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToServer,
    ToClient,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::ToServer => "to_server",
            Direction::ToClient => "to_client",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub raw_message: String,
    pub tick: u64,
}

/// Ordered record of one session. Directions alternate, starting with
/// [`Direction::ToServer`]; ticks count entries from zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        direction: Direction,
        raw_message: impl Into<String>,
    ) -> Result<(), ProtocolError> {
        let expected = match self.entries.last() {
            None
            | Some(TranscriptEntry {
                direction: Direction::ToClient,
                ..
            }) => Direction::ToServer,
            Some(_) => Direction::ToClient,
        };
        if direction != expected {
            return Err(ProtocolError::TranscriptOrder(format!(
                "expected {expected}, got {direction}"
            )));
        }
        self.entries.push(TranscriptEntry {
            direction,
            raw_message: raw_message.into(),
            tick: self.entries.len() as u64,
        });
        Ok(())
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn is_alternating(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, e)| {
            let want = if i % 2 == 0 {
                Direction::ToServer
            } else {
                Direction::ToClient
            };
            e.direction == want && e.tick == i as u64
        })
    }

    /// One `tick direction message` line per entry.
    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{} {} {}\n", e.tick, e.direction, e.raw_message))
            .collect()
    }
}
