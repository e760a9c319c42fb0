//! Performer/audience wire messages.
//!
//! A message on the wire is a single JSON object
//! `{"type", "session_id", "seq", "payload"}` with keys in sorted order,
//! carried in a length-prefixed frame (see [`framing`]).

pub mod framing;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::canonical;
use crate::command::CorpusDoc;
use crate::estimation::SensorSample;
use crate::runtime::StateFrame;

pub use framing::{
    encode_frame, read_frame, write_frame, FrameDecoder, FramingError, OutboundQueue, MAX_FRAME_BYTES,
    OUTBOUND_CAPACITY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Role {
    Performer,
    Audience,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    AwaitingPerformer,
    Live,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hello {
    pub role: Role,
    /// Performer only: overrides the server's seed for this session.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelloAck {
    pub role: Role,
    pub phase: Phase,
    pub tick_rate: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trigger {
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorPayload {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Empty {}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Hello(Hello),
    HelloAck(HelloAck),
    CorpusSync(CorpusDoc),
    Sensor(SensorSample),
    Trigger(Trigger),
    StateFrame(Box<StateFrame>),
    Error(ErrorPayload),
    Ping(Empty),
    Pong(Empty),
}

impl Payload {
    pub const TYPES: [&'static str; 9] = [
        "HELLO",
        "HELLO_ACK",
        "CORPUS_SYNC",
        "SENSOR",
        "TRIGGER",
        "STATE_FRAME",
        "ERROR",
        "PING",
        "PONG",
    ];

    pub fn type_name(&self) -> &'static str {
        match self {
            Payload::Hello(_) => "HELLO",
            Payload::HelloAck(_) => "HELLO_ACK",
            Payload::CorpusSync(_) => "CORPUS_SYNC",
            Payload::Sensor(_) => "SENSOR",
            Payload::Trigger(_) => "TRIGGER",
            Payload::StateFrame(_) => "STATE_FRAME",
            Payload::Error(_) => "ERROR",
            Payload::Ping(_) => "PING",
            Payload::Pong(_) => "PONG",
        }
    }

    pub fn error(code: &str, message: impl Into<String>) -> Self {
        Payload::Error(ErrorPayload {
            code: code.to_owned(),
            message: message.into(),
        })
    }

    fn to_value(&self) -> Value {
        let v = match self {
            Payload::Hello(p) => serde_json::to_value(p),
            Payload::HelloAck(p) => serde_json::to_value(p),
            Payload::CorpusSync(p) => serde_json::to_value(p),
            Payload::Sensor(p) => serde_json::to_value(p),
            Payload::Trigger(p) => serde_json::to_value(p),
            Payload::StateFrame(p) => serde_json::to_value(p),
            Payload::Error(p) => serde_json::to_value(p),
            Payload::Ping(p) | Payload::Pong(p) => serde_json::to_value(p),
        };
        v.expect("payload types serialize infallibly")
    }

    fn from_value(type_name: &str, v: Value) -> Result<Self, ProtocolError> {
        fn de<T: DeserializeOwned>(v: Value) -> Result<T, ProtocolError> {
            serde_json::from_value(v).map_err(|e| ProtocolError::SchemaViolation(e.to_string()))
        }
        Ok(match type_name {
            "HELLO" => Payload::Hello(de(v)?),
            "HELLO_ACK" => Payload::HelloAck(de(v)?),
            "CORPUS_SYNC" => Payload::CorpusSync(de(v)?),
            "SENSOR" => Payload::Sensor(de(v)?),
            "TRIGGER" => Payload::Trigger(de(v)?),
            "STATE_FRAME" => Payload::StateFrame(Box::new(de(v)?)),
            "ERROR" => Payload::Error(de(v)?),
            "PING" => Payload::Ping(de(v)?),
            "PONG" => Payload::Pong(de(v)?),
            other => return Err(ProtocolError::UnknownType(other.to_owned())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub session_id: String,
    /// Strictly increasing per sender.
    pub seq: u64,
    pub payload: Payload,
}

impl Message {
    pub fn new(session_id: impl Into<String>, seq: u64, payload: Payload) -> Self {
        Self {
            session_id: session_id.into(),
            seq,
            payload,
        }
    }

    pub fn type_name(&self) -> &'static str {
        self.payload.type_name()
    }

    pub fn is_state_frame(&self) -> bool {
        matches!(self.payload, Payload::StateFrame(_))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("MALFORMED_FRAME: {0}")]
    MalformedFrame(String),
    #[error("UNKNOWN_TYPE: {0:?}")]
    UnknownType(String),
    #[error("SCHEMA_VIOLATION: {0}")]
    SchemaViolation(String),
}

impl ProtocolError {
    pub fn code(&self) -> &'static str {
        match self {
            ProtocolError::MalformedFrame(_) => "MALFORMED_FRAME",
            ProtocolError::UnknownType(_) => "UNKNOWN_TYPE",
            ProtocolError::SchemaViolation(_) => "SCHEMA_VIOLATION",
        }
    }
}

/// Canonical compact JSON for one message (no length prefix).
pub fn encode_message(msg: &Message) -> Vec<u8> {
    let mut obj = Map::new();
    obj.insert("type".into(), Value::from(msg.type_name()));
    obj.insert("session_id".into(), Value::from(msg.session_id.clone()));
    obj.insert("seq".into(), Value::from(msg.seq));
    obj.insert("payload".into(), msg.payload.to_value());
    canonical::to_bytes(&Value::Object(obj)).expect("plain JSON values serialize")
}

/// Inverse of [`encode_message`]. Never panics.
pub fn decode_message(bytes: &[u8]) -> Result<Message, ProtocolError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ProtocolError::MalformedFrame(e.to_string()))?;
    let value: Value = serde_json::from_str(text).map_err(|e| ProtocolError::MalformedFrame(e.to_string()))?;
    let Value::Object(mut obj) = value else {
        return Err(ProtocolError::SchemaViolation("message must be an object".into()));
    };
    let type_name = match obj.remove("type") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(ProtocolError::SchemaViolation("type must be a string".into())),
        None => return Err(ProtocolError::SchemaViolation("missing type".into())),
    };
    if !Payload::TYPES.contains(&type_name.as_str()) {
        return Err(ProtocolError::UnknownType(type_name));
    }
    let session_id = match obj.remove("session_id") {
        Some(Value::String(s)) => s,
        _ => return Err(ProtocolError::SchemaViolation("session_id must be a string".into())),
    };
    let seq = obj
        .remove("seq")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| ProtocolError::SchemaViolation("seq must be a non-negative integer".into()))?;
    let payload = obj
        .remove("payload")
        .ok_or_else(|| ProtocolError::SchemaViolation("missing payload".into()))?;
    if let Some(extra) = obj.keys().next() {
        return Err(ProtocolError::SchemaViolation(format!("unknown field {extra:?}")));
    }
    if !payload.is_object() {
        return Err(ProtocolError::SchemaViolation("payload must be an object".into()));
    }
    Ok(Message {
        session_id,
        seq,
        payload: Payload::from_value(&type_name, payload)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(p: Payload) {
        let m = Message::new("s1", 7, p);
        let bytes = encode_message(&m);
        assert_eq!(decode_message(&bytes).unwrap(), m);
        assert_eq!(encode_message(&decode_message(&bytes).unwrap()), bytes);
    }

    #[test]
    fn control_messages_roundtrip() {
        roundtrip(Payload::Hello(Hello {
            role: Role::Performer,
            seed: Some(u64::MAX),
        }));
        roundtrip(Payload::Hello(Hello {
            role: Role::Audience,
            seed: None,
        }));
        roundtrip(Payload::HelloAck(HelloAck {
            role: Role::Audience,
            phase: Phase::Live,
            tick_rate: 60,
        }));
        roundtrip(Payload::Trigger(Trigger { key: "é".into() }));
        roundtrip(Payload::error("STALE_SEQ", "seq 3 <= 5"));
        roundtrip(Payload::Ping(Empty {}));
        roundtrip(Payload::Pong(Empty {}));
        roundtrip(Payload::Sensor(SensorSample {
            bpm: Some(72.5),
            ..Default::default()
        }));
    }

    #[test]
    fn wire_shape() {
        let m = Message::new("abc", 1, Payload::Trigger(Trigger { key: "q".into() }));
        assert_eq!(
            encode_message(&m),
            br#"{"payload":{"key":"q"},"seq":1,"session_id":"abc","type":"TRIGGER"}"#
        );
    }

    #[test]
    fn decode_errors() {
        let code = |b: &[u8]| decode_message(b).unwrap_err().code();
        assert_eq!(code(b"{}"), "SCHEMA_VIOLATION");
        assert_eq!(code(b""), "MALFORMED_FRAME");
        assert_eq!(code(b"{\"type\":"), "MALFORMED_FRAME");
        assert_eq!(code(&[0xc3, 0x28]), "MALFORMED_FRAME");
        assert_eq!(code(b"[1]"), "SCHEMA_VIOLATION");
        assert_eq!(
            code(br#"{"type":"NOPE","session_id":"s","seq":1,"payload":{}}"#),
            "UNKNOWN_TYPE"
        );
        assert_eq!(
            code(br#"{"type":"PING","session_id":"s","seq":-1,"payload":{}}"#),
            "SCHEMA_VIOLATION"
        );
        assert_eq!(code(br#"{"type":"PING","session_id":"s","seq":1}"#), "SCHEMA_VIOLATION");
        assert_eq!(
            code(br#"{"type":"PING","session_id":"s","seq":1,"payload":{},"x":0}"#),
            "SCHEMA_VIOLATION"
        );
        assert_eq!(
            code(br#"{"type":"TRIGGER","session_id":"s","seq":1,"payload":{}}"#),
            "SCHEMA_VIOLATION"
        );
        assert_eq!(
            code(br#"{"type":"PING","session_id":"s","seq":1,"payload":[]}"#),
            "SCHEMA_VIOLATION"
        );
        assert_eq!(
            code(br#"{"type":"HELLO","session_id":"s","seq":1,"payload":{"role":"JUDGE"}}"#),
            "SCHEMA_VIOLATION"
        );
    }

    #[test]
    fn key_order_on_input_is_irrelevant() {
        let m = decode_message(br#"{"seq":2,"payload":{},"type":"PING","session_id":"x"}"#).unwrap();
        assert_eq!(m, Message::new("x", 2, Payload::Ping(Empty {})));
    }
}
