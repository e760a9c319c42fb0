//! TCP front end for sessions: one reader and one writer task per
//! connection, one tick task per session.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use log::{debug, info, warn};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::Notify;
use tokio::time::MissedTickBehavior;

use puppetwire_core::command::CommandCorpus;
use puppetwire_core::protocol::{
    decode_message, encode_frame, encode_message, Message, OutboundQueue, Payload, Phase, MAX_FRAME_BYTES,
};
use puppetwire_core::runtime::RuntimeConfig;
use puppetwire_core::session::{ConnId, Outbound, Session};

struct Conn {
    queue: Mutex<OutboundQueue>,
    notify: Notify,
    closed: AtomicBool,
}

impl Conn {
    fn push(&self, msg: Message) {
        self.queue.lock().unwrap().push(msg);
        self.notify.notify_one();
    }

    fn close(&self) {
        self.closed.store(true, Ordering::SeqCst);
        self.notify.notify_one();
    }
}

#[derive(Default)]
struct Hub {
    sessions: HashMap<String, Session>,
    conns: HashMap<ConnId, Arc<Conn>>,
    /// Session each connection joined with its first message.
    bound: HashMap<ConnId, String>,
}

impl Hub {
    fn deliver(&self, out: Vec<Outbound>) {
        for o in out {
            if let Some(c) = self.conns.get(&o.to) {
                c.push(o.msg);
            }
        }
    }

    /// Drops a closed session once nobody is connected to it.
    fn reap(&mut self, id: &str) -> bool {
        let done = self
            .sessions
            .get(id)
            .is_some_and(|s| s.phase() == Phase::Closed && s.connections().next().is_none());
        if done {
            self.sessions.remove(id);
            info!("session {id}: removed");
        }
        done
    }
}

struct Server {
    hub: Mutex<Hub>,
    corpus: CommandCorpus,
    config: RuntimeConfig,
    next_conn: AtomicU64,
}

pub fn run(port: u16, corpus: CommandCorpus, tick_rate: u32, seed: u64) -> Result<(), String> {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| format!("cannot start runtime: {e}"))?;
    rt.block_on(async move {
        let listener = TcpListener::bind(("127.0.0.1", port))
            .await
            .map_err(|e| format!("BIND_FAILED: port {port}: {e}"))?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?;
        println!("listening on {addr}");
        use std::io::Write;
        std::io::stdout().flush().ok();
        info!("serving {} commands at {tick_rate} Hz", corpus.len());

        let server = Arc::new(Server {
            hub: Mutex::new(Hub::default()),
            corpus,
            config: RuntimeConfig {
                tick_rate,
                seed,
                ..RuntimeConfig::default()
            },
            next_conn: AtomicU64::new(1),
        });
        loop {
            tokio::select! {
                accepted = listener.accept() => match accepted {
                    Ok((stream, peer)) => {
                        let id = server.next_conn.fetch_add(1, Ordering::SeqCst);
                        debug!("conn {id}: accepted from {peer}");
                        tokio::spawn(connection(server.clone(), id, stream));
                    }
                    Err(e) => warn!("accept failed: {e}"),
                },
                _ = tokio::signal::ctrl_c() => {
                    info!("interrupted, shutting down");
                    return Ok(());
                }
            }
        }
    })
}

async fn connection(server: Arc<Server>, id: ConnId, stream: TcpStream) {
    let _ = stream.set_nodelay(true);
    let (reader, writer) = stream.into_split();
    let conn = Arc::new(Conn {
        queue: Mutex::new(OutboundQueue::default()),
        notify: Notify::new(),
        closed: AtomicBool::new(false),
    });
    server.hub.lock().unwrap().conns.insert(id, conn.clone());
    let writer_task = tokio::spawn(write_loop(conn.clone(), writer));

    if let Err(e) = read_loop(&server, id, &conn, reader).await {
        debug!("conn {id}: {e}");
    }

    {
        let mut hub = server.hub.lock().unwrap();
        hub.conns.remove(&id);
        if let Some(sid) = hub.bound.remove(&id) {
            if let Some(s) = hub.sessions.get_mut(&sid) {
                s.disconnect(id);
            }
            hub.reap(&sid);
        }
    }
    conn.close();
    let _ = writer_task.await;
    debug!("conn {id}: closed");
}

async fn read_loop(server: &Arc<Server>, id: ConnId, conn: &Conn, mut reader: OwnedReadHalf) -> Result<(), String> {
    loop {
        let len = match reader.read_u32().await {
            Ok(n) => n as usize,
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(()),
            Err(e) => return Err(e.to_string()),
        };
        if len > MAX_FRAME_BYTES {
            conn.push(Message::new(
                "",
                0,
                Payload::error("MALFORMED_FRAME", format!("frame of {len} bytes")),
            ));
            return Err("oversized frame".into());
        }
        let mut body = vec![0; len];
        reader.read_exact(&mut body).await.map_err(|e| e.to_string())?;
        match decode_message(&body) {
            Ok(msg) => dispatch(server, id, msg),
            Err(e) => conn.push(Message::new("", 0, Payload::error(e.code(), e.to_string()))),
        }
    }
}

fn dispatch(server: &Arc<Server>, id: ConnId, msg: Message) {
    let mut hub = server.hub.lock().unwrap();
    let sid = match hub.bound.get(&id) {
        Some(sid) => sid.clone(),
        None => {
            let sid = msg.session_id.clone();
            if !hub.sessions.contains_key(&sid) {
                if !matches!(msg.payload, Payload::Hello(_)) {
                    if let Some(c) = hub.conns.get(&id) {
                        c.push(Message::new(
                            sid.clone(),
                            0,
                            Payload::error("BAD_PHASE", "unknown session; send HELLO first"),
                        ));
                    }
                    return;
                }
                let session = Session::new(sid.clone(), server.corpus.clone(), server.config.clone())
                    .expect("tick rate checked at startup");
                hub.sessions.insert(sid.clone(), session);
                info!("session {sid}: created");
                tokio::spawn(tick_loop(server.clone(), sid.clone()));
            }
            hub.bound.insert(id, sid.clone());
            sid
        }
    };
    let Some(session) = hub.sessions.get_mut(&sid) else {
        return;
    };
    let out = session.handle(id, msg);
    hub.deliver(out);
}

async fn tick_loop(server: Arc<Server>, sid: String) {
    let period = Duration::from_secs_f64(1.0 / server.config.tick_rate as f64);
    let mut interval = tokio::time::interval(period);
    interval.set_missed_tick_behavior(MissedTickBehavior::Delay);
    loop {
        interval.tick().await;
        let mut hub = server.hub.lock().unwrap();
        if hub.reap(&sid) {
            return;
        }
        let Some(session) = hub.sessions.get_mut(&sid) else {
            return;
        };
        let (_, out) = session.tick();
        hub.deliver(out);
        drop(hub);
    }
}

async fn write_loop(conn: Arc<Conn>, mut writer: OwnedWriteHalf) {
    loop {
        let next = conn.queue.lock().unwrap().pop();
        match next {
            Some(msg) => {
                let frame = match encode_frame(&encode_message(&msg)) {
                    Ok(f) => f,
                    Err(e) => {
                        warn!("dropping outbound {}: {e}", msg.type_name());
                        continue;
                    }
                };
                if writer.write_all(&frame).await.is_err() {
                    return;
                }
            }
            None if conn.closed.load(Ordering::SeqCst) => {
                let _ = writer.shutdown().await;
                return;
            }
            None => conn.notify.notified().await,
        }
    }
}
