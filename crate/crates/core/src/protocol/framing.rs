//! Length-prefixed framing and per-connection outbound buffering.

use std::collections::VecDeque;
use std::io::{self, Read, Write};

use thiserror::Error;

use super::Message;

/// Largest accepted frame body.
pub const MAX_FRAME_BYTES: usize = 1 << 20;
/// Outbound messages buffered per connection before frames are shed.
pub const OUTBOUND_CAPACITY: usize = 120;

#[derive(Debug, Error)]
pub enum FramingError {
    #[error("MALFORMED_FRAME: frame of {0} bytes exceeds the 1 MiB limit")]
    TooLarge(usize),
    #[error("I/O: {0}")]
    Io(#[from] io::Error),
}

/// `body` preceded by its length as a big-endian u32.
pub fn encode_frame(body: &[u8]) -> Result<Vec<u8>, FramingError> {
    if body.len() > MAX_FRAME_BYTES {
        return Err(FramingError::TooLarge(body.len()));
    }
    let mut out = Vec::with_capacity(4 + body.len());
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
    Ok(out)
}

pub fn write_frame<W: Write>(w: &mut W, body: &[u8]) -> Result<(), FramingError> {
    w.write_all(&encode_frame(body)?)?;
    Ok(())
}

/// Reads one frame body. `Ok(None)` on a clean end of stream.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Vec<u8>>, FramingError> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let len = u32::from_be_bytes(len) as usize;
    if len > MAX_FRAME_BYTES {
        return Err(FramingError::TooLarge(len));
    }
    let mut body = vec![0; len];
    r.read_exact(&mut body)?;
    Ok(Some(body))
}

/// Incremental splitter for bytes arriving in arbitrary chunks.
#[derive(Debug, Default)]
pub struct FrameDecoder {
    buf: Vec<u8>,
}

impl FrameDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// Next complete frame body, if one is buffered.
    pub fn next_frame(&mut self) -> Result<Option<Vec<u8>>, FramingError> {
        if self.buf.len() < 4 {
            return Ok(None);
        }
        let len = u32::from_be_bytes([self.buf[0], self.buf[1], self.buf[2], self.buf[3]]) as usize;
        if len > MAX_FRAME_BYTES {
            return Err(FramingError::TooLarge(len));
        }
        if self.buf.len() < 4 + len {
            return Ok(None);
        }
        let body = self.buf[4..4 + len].to_vec();
        self.buf.drain(..4 + len);
        Ok(Some(body))
    }

    pub fn buffered(&self) -> usize {
        self.buf.len()
    }
}

/// Bounded FIFO for one connection. When full, the oldest STATE_FRAME is
/// discarded to make room; control messages are never discarded, so the
/// queue may exceed its capacity when it holds nothing but control traffic.
#[derive(Debug, Clone)]
pub struct OutboundQueue {
    items: VecDeque<Message>,
    capacity: usize,
    dropped: u64,
}

impl Default for OutboundQueue {
    fn default() -> Self {
        Self::with_capacity(OUTBOUND_CAPACITY)
    }
}

impl OutboundQueue {
    pub fn with_capacity(capacity: usize) -> Self {
        assert!(capacity > 0, "capacity must be positive");
        Self {
            items: VecDeque::new(),
            capacity,
            dropped: 0,
        }
    }

    pub fn push(&mut self, msg: Message) {
        if self.items.len() >= self.capacity {
            if let Some(i) = self.items.iter().position(Message::is_state_frame) {
                self.items.remove(i);
                self.dropped += 1;
            }
        }
        self.items.push_back(msg);
    }

    pub fn pop(&mut self) -> Option<Message> {
        self.items.pop_front()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Frames discarded so far.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }
}
