//! TCP transport: the same manager and agent state machines over real
//! stream sockets, with one length-prefixed frame codec for both.
//!
//! The manager's abstract time is seconds since server start, so the
//! configured timeout and retry counts mean seconds here and ticks in the
//! simulator.

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use super::agent::DeviceAgent;
use super::server::{Outgoing, TestManager};
use super::wire::{decode_frame, Message};

const POLL_INTERVAL: Duration = Duration::from_millis(50);

struct Shared {
    manager: TestManager,
    writers: HashMap<u32, mpsc::Sender<Vec<u8>>>,
}

/// A running socket server. Dropping the handle does not stop it; call
/// [`SocketServer::stop`].
pub struct SocketServer {
    shared: Arc<Mutex<Shared>>,
    stop: Arc<AtomicBool>,
    addr: SocketAddr,
}

impl SocketServer {
    /// Binds and spawns the accept loop plus a ticker thread.
    pub fn spawn<A: ToSocketAddrs>(listen: A, manager: TestManager) -> io::Result<SocketServer> {
        let listener = TcpListener::bind(listen)?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Mutex::new(Shared {
            manager,
            writers: HashMap::new(),
        }));
        let stop = Arc::new(AtomicBool::new(false));
        let start = Instant::now();

        {
            let shared = Arc::clone(&shared);
            let stop = Arc::clone(&stop);
            thread::spawn(move || accept_loop(listener, shared, stop, start));
        }
        {
            let shared = Arc::clone(&shared);
            let stop = Arc::clone(&stop);
            thread::spawn(move || ticker_loop(shared, stop, start));
        }

        Ok(SocketServer { shared, stop, addr })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn stop(&self) {
        self.stop.store(true, Ordering::SeqCst);
    }

    /// Runs a closure against the manager state (log, registry, sessions).
    pub fn with_manager<R>(&self, f: impl FnOnce(&TestManager) -> R) -> R {
        let shared = self.shared.lock().expect("manager lock");
        f(&shared.manager)
    }

    /// Blocks until stopped.
    pub fn join(&self) {
        while !self.stop.load(Ordering::SeqCst) {
            thread::sleep(POLL_INTERVAL);
        }
    }
}

fn accept_loop(
    listener: TcpListener,
    shared: Arc<Mutex<Shared>>,
    stop: Arc<AtomicBool>,
    start: Instant,
) {
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                eprintln!("[serve] connection from {peer}");
                let shared = Arc::clone(&shared);
                let stop = Arc::clone(&stop);
                thread::spawn(move || {
                    if let Err(e) = connection_loop(stream, shared, stop, start) {
                        eprintln!("[serve] connection {peer} closed: {e}");
                    }
                });
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(POLL_INTERVAL),
            Err(e) => {
                eprintln!("[serve] accept failed: {e}");
                thread::sleep(POLL_INTERVAL);
            }
        }
    }
}

fn ticker_loop(shared: Arc<Mutex<Shared>>, stop: Arc<AtomicBool>, start: Instant) {
    while !stop.load(Ordering::SeqCst) {
        thread::sleep(Duration::from_millis(250));
        let now = start.elapsed().as_secs();
        let mut guard = shared.lock().expect("manager lock");
        let out = guard.manager.tick(now);
        route_outgoing(&mut guard, out);
    }
}

fn route_outgoing(shared: &mut Shared, out: Vec<Outgoing>) {
    for Outgoing { device_id, message } in out {
        let frame = message.encode();
        let delivered = shared
            .writers
            .get(&device_id)
            .map(|tx| tx.send(frame).is_ok())
            .unwrap_or(false);
        if !delivered {
            // No live connection; retransmission timers will retry.
            shared.writers.remove(&device_id);
        }
    }
}

fn connection_loop(
    stream: TcpStream,
    shared: Arc<Mutex<Shared>>,
    stop: Arc<AtomicBool>,
    start: Instant,
) -> io::Result<()> {
    stream.set_read_timeout(Some(Duration::from_millis(100)))?;
    let mut reader = stream.try_clone()?;
    let (tx, rx) = mpsc::channel::<Vec<u8>>();

    // Writer thread: serializes all frames destined for this connection.
    let mut writer = stream;
    let writer_stop = Arc::clone(&stop);
    thread::spawn(move || {
        while !writer_stop.load(Ordering::SeqCst) {
            match rx.recv_timeout(Duration::from_millis(200)) {
                Ok(frame) => {
                    if writer.write_all(&frame).is_err() {
                        break;
                    }
                }
                Err(mpsc::RecvTimeoutError::Timeout) => continue,
                Err(mpsc::RecvTimeoutError::Disconnected) => break,
            }
        }
    });

    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let mut conn_device: Option<u32> = None;
    loop {
        if stop.load(Ordering::SeqCst) {
            return Ok(());
        }
        match reader.read(&mut chunk) {
            Ok(0) => return Ok(()),
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
            Err(e)
                if e.kind() == io::ErrorKind::WouldBlock || e.kind() == io::ErrorKind::TimedOut =>
            {
                continue
            }
            Err(e) => return Err(e),
        }
        loop {
            match decode_frame(&buf) {
                Ok(Some((msg, consumed))) => {
                    buf.drain(..consumed);
                    let now = start.elapsed().as_secs();
                    let mut guard = shared.lock().expect("manager lock");
                    if let Message::Hello { device_id, .. } = msg {
                        // Bind this connection to the claimed device id so
                        // replies (including enrollment errors) route back.
                        conn_device = Some(device_id);
                        guard.writers.insert(device_id, tx.clone());
                    }
                    let src = match conn_device {
                        Some(id) => id,
                        None => {
                            eprintln!("[serve] frame before HELLO, dropping");
                            continue;
                        }
                    };
                    let out = guard.manager.handle_message(src, &msg, now);
                    route_outgoing(&mut guard, out);
                }
                Ok(None) => break,
                Err(e) => {
                    return Err(io::Error::new(io::ErrorKind::InvalidData, e.to_string()));
                }
            }
        }
    }
}

/// Runs a device agent against a manager at `connect`, until `stop` is set
/// (or forever).
pub fn run_agent<A: ToSocketAddrs>(
    connect: A,
    mut agent: DeviceAgent,
    trigger: Option<Message>,
    stop: Option<Arc<AtomicBool>>,
) -> io::Result<()> {
    let mut stream = TcpStream::connect(connect)?;
    stream.set_read_timeout(Some(Duration::from_millis(100)))?;
    let start = Instant::now();
    stream.write_all(&agent.hello().encode())?;
    if let Some(msg) = trigger {
        stream.write_all(&msg.encode())?;
    }

    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    loop {
        if stop.as_ref().is_some_and(|s| s.load(Ordering::SeqCst)) {
            return Ok(());
        }
        match stream.read(&mut chunk) {
            Ok(0) => return Ok(()),
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
            Err(e)
                if e.kind() == io::ErrorKind::WouldBlock || e.kind() == io::ErrorKind::TimedOut =>
            {
                continue
            }
            Err(e) => return Err(e),
        }
        loop {
            match decode_frame(&buf) {
                Ok(Some((msg, consumed))) => {
                    buf.drain(..consumed);
                    let now = start.elapsed().as_secs();
                    eprintln!("[agent {}] recv {}", agent.device_id(), msg.summary());
                    for (_at, reply) in agent.handle_message(&msg, now) {
                        eprintln!("[agent {}] send {}", agent.device_id(), reply.summary());
                        stream.write_all(&reply.encode())?;
                    }
                }
                Ok(None) => break,
                Err(e) => {
                    return Err(io::Error::new(io::ErrorKind::InvalidData, e.to_string()));
                }
            }
        }
    }
}
