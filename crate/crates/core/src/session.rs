//! Session state machine: one performer, any number of audiences, one
//! runtime.
//!
//! [`Session::handle`] validates an inbound message and queues its effect;
//! [`Session::tick`] drains that queue into the runtime and fans the
//! resulting frame out to every connection. Both are synchronous and
//! deterministic, so a recorded event log replays to the same frames.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::command::{CommandCorpus, CorpusDoc};
use crate::estimation::SensorSample;
use crate::protocol::{Hello, HelloAck, Message, Payload, Phase, Role, Trigger};
use crate::runtime::{Runtime, RuntimeConfig, RuntimeError, StateFrame};

pub type ConnId = u64;

/// Inbound traffic in arrival order, interleaved with tick boundaries.
#[derive(Debug, Clone, PartialEq)]
pub enum SessionEvent {
    Message { conn: ConnId, msg: Message },
    Disconnect { conn: ConnId },
    Tick,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outbound {
    pub to: ConnId,
    pub msg: Message,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub ticks: u64,
    pub errors: u64,
}

#[derive(Debug, Clone)]
enum Input {
    Sensor(SensorSample),
    Trigger(String),
    Corpus(CommandCorpus),
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    phase: Phase,
    config: RuntimeConfig,
    runtime: Runtime,
    /// Corpus as of the newest queued input; triggers are checked against it.
    latest_corpus: CommandCorpus,
    performer: Option<ConnId>,
    audiences: BTreeSet<ConnId>,
    last_seq: BTreeMap<ConnId, u64>,
    pending: VecDeque<Input>,
    out_seq: u64,
    stats: SessionStats,
    log: Option<Vec<SessionEvent>>,
}

impl Session {
    pub fn new(id: impl Into<String>, corpus: CommandCorpus, config: RuntimeConfig) -> Result<Self, RuntimeError> {
        Ok(Self {
            id: id.into(),
            phase: Phase::AwaitingPerformer,
            runtime: Runtime::new(corpus.clone(), config.clone())?,
            latest_corpus: corpus,
            config,
            performer: None,
            audiences: BTreeSet::new(),
            last_seq: BTreeMap::new(),
            pending: VecDeque::new(),
            out_seq: 0,
            stats: SessionStats { ticks: 0, errors: 0 },
            log: None,
        })
    }

    /// Keeps every inbound event so the session can be replayed later.
    pub fn with_recording(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn runtime(&self) -> &Runtime {
        &self.runtime
    }

    pub fn performer(&self) -> Option<ConnId> {
        self.performer
    }

    pub fn audiences(&self) -> impl Iterator<Item = ConnId> + '_ {
        self.audiences.iter().copied()
    }

    pub fn connections(&self) -> impl Iterator<Item = ConnId> + '_ {
        self.performer.into_iter().chain(self.audiences.iter().copied())
    }

    pub fn stats(&self) -> &SessionStats {
        &self.stats
    }

    pub fn recorded(&self) -> Option<&[SessionEvent]> {
        self.log.as_deref()
    }

    fn role_of(&self, conn: ConnId) -> Option<Role> {
        if self.performer == Some(conn) {
            Some(Role::Performer)
        } else if self.audiences.contains(&conn) {
            Some(Role::Audience)
        } else {
            None
        }
    }

    fn out(&mut self, to: ConnId, payload: Payload) -> Outbound {
        self.out_seq += 1;
        Outbound {
            to,
            msg: Message::new(self.id.clone(), self.out_seq, payload),
        }
    }

    fn reject(&mut self, to: ConnId, code: &str, message: String) -> Vec<Outbound> {
        debug!("session {}: conn {to}: {code}: {message}", self.id);
        self.stats.errors += 1;
        vec![self.out(to, Payload::error(code, message))]
    }

    /// Applies one inbound message and returns the immediate replies.
    pub fn handle(&mut self, conn: ConnId, msg: Message) -> Vec<Outbound> {
        if let Some(log) = &mut self.log {
            log.push(SessionEvent::Message { conn, msg: msg.clone() });
        }
        if msg.session_id != self.id {
            return self.reject(
                conn,
                "SESSION_MISMATCH",
                format!("message for {:?} sent to {:?}", msg.session_id, self.id),
            );
        }
        if let Some(&last) = self.last_seq.get(&conn) {
            if msg.seq <= last {
                return self.reject(conn, "STALE_SEQ", format!("seq {} not after {last}", msg.seq));
            }
        }
        self.last_seq.insert(conn, msg.seq);

        if self.phase == Phase::Closed {
            return self.reject(conn, "BAD_PHASE", "session is closed".into());
        }
        let role = self.role_of(conn);
        match (msg.payload, role) {
            (Payload::Hello(hello), None) => self.hello(conn, hello),
            (Payload::Hello(_), Some(_)) => self.reject(conn, "BAD_PHASE", "already joined".into()),
            (Payload::Ping(p), _) => vec![self.out(conn, Payload::Pong(p))],
            (_, None) => self.reject(conn, "BAD_PHASE", "HELLO must come first".into()),
            (Payload::Sensor(sample), Some(Role::Performer)) => match sample.validate() {
                Ok(()) => {
                    self.pending.push_back(Input::Sensor(sample));
                    vec![]
                }
                Err(e) => self.reject(conn, "INVALID_SAMPLE", e.to_string()),
            },
            (Payload::Trigger(Trigger { key }), Some(Role::Performer)) => {
                if self.latest_corpus.get(&key).is_none() {
                    return self.reject(conn, "UNKNOWN_KEY", format!("no command bound to {key:?}"));
                }
                self.pending.push_back(Input::Trigger(key));
                vec![]
            }
            (Payload::CorpusSync(doc), Some(Role::Performer)) => self.corpus_sync(conn, doc),
            (p, Some(role)) => {
                let what = p.type_name();
                self.reject(conn, "ROLE_VIOLATION", format!("{role:?} may not send {what}"))
            }
        }
    }

    fn hello(&mut self, conn: ConnId, hello: Hello) -> Vec<Outbound> {
        match hello.role {
            Role::Performer => {
                if self.phase != Phase::AwaitingPerformer {
                    return self.reject(conn, "ROLE_VIOLATION", "session already has a performer".into());
                }
                if let Some(seed) = hello.seed {
                    let cfg = RuntimeConfig {
                        seed,
                        ..self.config.clone()
                    };
                    self.runtime = Runtime::new(self.latest_corpus.clone(), cfg.clone())
                        .expect("tick rate was accepted at construction");
                    self.config = cfg;
                }
                self.performer = Some(conn);
                self.phase = Phase::Live;
                info!("session {}: performer joined, live", self.id);
            }
            Role::Audience => {
                self.audiences.insert(conn);
                info!("session {}: audience {conn} joined", self.id);
            }
        }
        let ack = HelloAck {
            role: hello.role,
            phase: self.phase,
            tick_rate: self.config.tick_rate,
        };
        let mut out = vec![self.out(conn, Payload::HelloAck(ack))];
        if hello.role == Role::Audience {
            let doc = CorpusDoc::from(&self.latest_corpus);
            out.push(self.out(conn, Payload::CorpusSync(doc)));
        }
        out
    }

    fn corpus_sync(&mut self, conn: ConnId, doc: CorpusDoc) -> Vec<Outbound> {
        match doc.clone().into_corpus() {
            Ok(corpus) => {
                info!("session {}: corpus replaced ({} commands)", self.id, corpus.len());
                self.latest_corpus = corpus.clone();
                self.pending.push_back(Input::Corpus(corpus));
                let audiences: Vec<ConnId> = self.audiences.iter().copied().collect();
                audiences
                    .into_iter()
                    .map(|a| self.out(a, Payload::CorpusSync(doc.clone())))
                    .collect()
            }
            Err(e) => self.reject(conn, e.code(), e.to_string()),
        }
    }

    /// Forgets a connection. Losing the performer closes the session.
    pub fn disconnect(&mut self, conn: ConnId) {
        if let Some(log) = &mut self.log {
            log.push(SessionEvent::Disconnect { conn });
        }
        self.last_seq.remove(&conn);
        if self.performer == Some(conn) {
            self.performer = None;
            self.phase = Phase::Closed;
            self.pending.clear();
            info!("session {}: performer left, closed", self.id);
        } else if self.audiences.remove(&conn) {
            info!("session {}: audience {conn} left", self.id);
        }
    }

    /// Runs one step. Produces a frame for every connection while LIVE and
    /// nothing otherwise.
    pub fn tick(&mut self) -> (Option<StateFrame>, Vec<Outbound>) {
        if let Some(log) = &mut self.log {
            log.push(SessionEvent::Tick);
        }
        if self.phase != Phase::Live {
            return (None, vec![]);
        }
        while let Some(input) = self.pending.pop_front() {
            match input {
                Input::Sensor(s) => {
                    let _ = self.runtime.apply_sensor(&s);
                }
                Input::Trigger(key) => {
                    if let Err(e) = self.runtime.trigger(&key) {
                        warn!("session {}: trigger {key:?} failed: {e}", self.id);
                    }
                }
                Input::Corpus(c) => self.runtime.set_corpus(c),
            }
        }
        let frame = self.runtime.tick();
        self.stats.ticks += 1;
        let targets: Vec<ConnId> = self.connections().collect();
        let out = targets
            .into_iter()
            .map(|to| self.out(to, Payload::StateFrame(Box::new(frame.clone()))))
            .collect();
        (Some(frame), out)
    }

    /// Feeds `events` to a fresh session and collects every frame produced.
    pub fn replay(
        id: &str,
        corpus: CommandCorpus,
        config: RuntimeConfig,
        events: &[SessionEvent],
    ) -> Result<Vec<StateFrame>, RuntimeError> {
        let mut s = Session::new(id, corpus, config)?;
        let mut frames = Vec::new();
        for e in events {
            match e {
                SessionEvent::Message { conn, msg } => {
                    s.handle(*conn, msg.clone());
                }
                SessionEvent::Disconnect { conn } => s.disconnect(*conn),
                SessionEvent::Tick => frames.extend(s.tick().0),
            }
        }
        Ok(frames)
    }
}
