//! The central test manager: enrolls devices, issues fresh test parameters,
//! evaluates returned signatures or verdicts, retries and times out lost
//! sessions, and queues trigger-driven tests.
//!
//! The manager is transport-agnostic. It consumes decoded messages stamped
//! with an abstract time (simulator ticks, or seconds on sockets) and emits
//! outgoing messages; the simulated network and the socket transport both
//! drive the same state machine.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dut::Nlfsr;
use crate::engine::{derive_seed, golden_signature, ConfigTemplate, EngineError, TestKey};
use crate::registers::BitVec;

use super::wire::{
    Message, Scenario, TriggerReason, ERR_UNKNOWN_MODEL, ERR_UNKNOWN_SESSION, ERR_UNKNOWN_TARGET,
    ERR_WIDTH_MISMATCH,
};

#[derive(Debug, Error)]
pub enum RemoteError {
    #[error("device {0} is not enrolled")]
    UnknownDevice(u32),
    #[error("model {0} is not registered")]
    UnknownModel(u32),
    #[error("device {0} is busy with an open session")]
    DeviceBusy(u32),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("registry file parse error: {0}")]
    RegistryParse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The golden model the manager holds for one device type.
#[derive(Clone, Debug)]
pub struct DeviceModel {
    pub dut: Nlfsr,
    pub template: ConfigTemplate,
}

impl DeviceModel {
    pub fn width(&self) -> usize {
        self.dut.width()
    }

    /// The built-in 4-bit sample model.
    pub fn sample_4bit() -> DeviceModel {
        DeviceModel {
            dut: Nlfsr::sample_4bit(),
            template: ConfigTemplate::sample_4bit(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeviceStatus {
    Idle,
    Testing,
    Unreachable,
}

impl fmt::Display for DeviceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceStatus::Idle => "idle",
            DeviceStatus::Testing => "testing",
            DeviceStatus::Unreachable => "unreachable",
        })
    }
}

/// One enrolled device.
#[derive(Clone, Debug)]
pub struct DeviceRecord {
    pub device_id: u32,
    pub model_id: u32,
    pub width: u8,
    /// Strictly increasing; drives seed freshness.
    pub last_seed_counter: u64,
    pub status: DeviceStatus,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SessionOutcome {
    Pass,
    Fail,
    Timeout,
}

impl fmt::Display for SessionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionOutcome::Pass => "PASS",
            SessionOutcome::Fail => "FAIL",
            SessionOutcome::Timeout => "TIMEOUT",
        })
    }
}

/// One issued test cycle.
#[derive(Clone, Debug)]
pub struct TestSession {
    pub session_id: u64,
    pub device_id: u32,
    pub seed: BitVec,
    pub pattern_count: u32,
    pub scenario: Scenario,
    /// Always computed server-side; transmitted only for local verdicts.
    pub expected_signature: BitVec,
    pub outcome: Option<SessionOutcome>,
    pub trigger_reason: Option<TriggerReason>,
    issued_at: u64,
    deadline: u64,
    retries_left: u32,
}

impl TestSession {
    pub fn issued_at(&self) -> u64 {
        self.issued_at
    }

    fn init_message(&self) -> Message {
        Message::TestInit {
            session_id: self.session_id,
            scenario: self.scenario,
            pattern_count: self.pattern_count,
            seed: self.seed.clone(),
            expected_signature: match self.scenario {
                Scenario::SignatureReport => None,
                Scenario::LocalVerdict => Some(self.expected_signature.clone()),
            },
        }
    }
}

/// Session log entry: one pinned-format line per closed session, plus
/// `#`-prefixed notes for protocol events worth keeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogLine {
    Session {
        timestamp: u64,
        device_id: u32,
        session_id: u64,
        scenario: Scenario,
        seed_hex: String,
        count: u32,
        outcome: SessionOutcome,
    },
    Note {
        timestamp: u64,
        text: String,
    },
}

impl fmt::Display for LogLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogLine::Session {
                timestamp,
                device_id,
                session_id,
                scenario,
                seed_hex,
                count,
                outcome,
            } => write!(
                f,
                "{timestamp} {device_id} {session_id} {scenario} {seed_hex} {count} {outcome}"
            ),
            LogLine::Note { timestamp, text } => write!(f, "# {timestamp} {text}"),
        }
    }
}

/// How the manager obtains expected signatures.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SignatureMode {
    /// Simulate the golden model when the session is issued.
    #[default]
    OnTheFly,
    /// Precompute a seed-to-signature table per model at registration time
    /// (falls back to simulation for widths past the table cap).
    Precomputed,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SchedulePolicy {
    /// Sessions start only via explicit [`TestManager::start_session`] calls
    /// or trigger requests.
    Manual,
    /// Every `interval` ticks, test all enrolled devices that are not
    /// already testing.
    Periodic { interval: u64 },
}

#[derive(Clone, Debug)]
pub struct ManagerConfig {
    /// Ticks to wait for a report before retransmitting the TEST_INIT.
    pub timeout: u64,
    /// Retransmissions after the initial send before giving up.
    pub retries: u32,
    /// Scenario used for scheduled and trigger-driven sessions.
    pub scenario: Scenario,
    pub schedule: SchedulePolicy,
    pub signature_mode: SignatureMode,
    /// Server-side secret mixed into seed derivation.
    pub secret: u64,
    /// Per-device cap on queued trigger requests.
    pub trigger_queue_capacity: usize,
}

impl Default for ManagerConfig {
    fn default() -> Self {
        ManagerConfig {
            timeout: 5,
            retries: 2,
            scenario: Scenario::SignatureReport,
            schedule: SchedulePolicy::Manual,
            signature_mode: SignatureMode::OnTheFly,
            secret: 0x6c62_6973_7400_0001,
            trigger_queue_capacity: 8,
        }
    }
}

/// A message the manager wants delivered to a device.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outgoing {
    pub device_id: u32,
    pub message: Message,
}

/// Widths this manager can derive full-period seed schedules for.
const MAX_SEED_WIDTH: usize = 63;
/// Largest seed space the precomputed table will enumerate.
const PRECOMPUTE_LIMIT: u64 = 1 << 12;

pub struct TestManager {
    config: ManagerConfig,
    models: BTreeMap<u32, DeviceModel>,
    registry: BTreeMap<u32, DeviceRecord>,
    sessions: BTreeMap<u64, TestSession>,
    open_by_device: BTreeMap<u32, u64>,
    pending_triggers: BTreeMap<u32, VecDeque<(u32, TriggerReason)>>,
    precomputed: BTreeMap<(u32, BitVec), BitVec>,
    next_session_id: u64,
    next_periodic: u64,
    log: Vec<LogLine>,
    log_file: Option<PathBuf>,
}

impl TestManager {
    pub fn new(config: ManagerConfig) -> TestManager {
        TestManager {
            config,
            models: BTreeMap::new(),
            registry: BTreeMap::new(),
            sessions: BTreeMap::new(),
            open_by_device: BTreeMap::new(),
            pending_triggers: BTreeMap::new(),
            precomputed: BTreeMap::new(),
            next_session_id: 1,
            next_periodic: 0,
            log: Vec::new(),
            log_file: None,
        }
    }

    /// Mirrors every appended log line into `path`.
    pub fn set_log_file<P: Into<PathBuf>>(&mut self, path: P) {
        self.log_file = Some(path.into());
    }

    pub fn register_model(&mut self, model_id: u32, model: DeviceModel) {
        if self.config.signature_mode == SignatureMode::Precomputed {
            let width = model.width();
            if width <= MAX_SEED_WIDTH && (1u64 << width) <= PRECOMPUTE_LIMIT {
                for value in 1..(1u64 << width) {
                    let seed = BitVec::from_int(value, width).expect("width >= 1");
                    let cfg = model.template.instantiate(seed.clone());
                    let sig =
                        golden_signature(&model.dut, &cfg).expect("registered model must simulate");
                    self.precomputed.insert((model_id, seed), sig);
                }
            }
        }
        self.models.insert(model_id, model);
    }

    pub fn config(&self) -> &ManagerConfig {
        &self.config
    }

    pub fn registry(&self) -> &BTreeMap<u32, DeviceRecord> {
        &self.registry
    }

    pub fn sessions(&self) -> &BTreeMap<u64, TestSession> {
        &self.sessions
    }

    pub fn log(&self) -> &[LogLine] {
        &self.log
    }

    /// Completed-session lines only, rendered.
    pub fn session_lines(&self) -> Vec<String> {
        self.log
            .iter()
            .filter(|l| matches!(l, LogLine::Session { .. }))
            .map(|l| l.to_string())
            .collect()
    }

    fn push_log(&mut self, line: LogLine) {
        if let Some(path) = &self.log_file {
            if let Ok(mut f) = fs::OpenOptions::new().create(true).append(true).open(path) {
                let _ = writeln!(f, "{line}");
            }
        }
        self.log.push(line);
    }

    fn note(&mut self, now: u64, text: String) {
        self.push_log(LogLine::Note {
            timestamp: now,
            text,
        });
    }

    /// Handles one inbound frame from `src` and returns the replies.
    pub fn handle_message(&mut self, src: u32, msg: &Message, now: u64) -> Vec<Outgoing> {
        match msg {
            Message::Hello {
                device_id,
                model_id,
                width,
            } => self.handle_hello(*device_id, *model_id, *width, now),
            Message::SigReport {
                session_id,
                signature,
            } => self.handle_report(src, *session_id, Some(signature), None, now),
            Message::VerdictReport { session_id, pass } => {
                self.handle_report(src, *session_id, None, Some(*pass), now)
            }
            Message::TriggerRequest {
                requester_id,
                target_id,
                reason,
            } => self.handle_trigger(*requester_id, *target_id, *reason, now),
            Message::Error { code, session_id } => {
                self.note(
                    now,
                    format!("device {src} reported error {code:#04x} session={session_id}"),
                );
                // The device cannot run this session; count it against the
                // device rather than leaving it to time out.
                if self
                    .sessions
                    .get(session_id)
                    .is_some_and(|s| s.outcome.is_none())
                {
                    self.close_session(*session_id, SessionOutcome::Fail, now);
                }
                Vec::new()
            }
            other => {
                self.note(
                    now,
                    format!("unexpected frame from {src}: {}", other.summary()),
                );
                Vec::new()
            }
        }
    }

    fn handle_hello(
        &mut self,
        device_id: u32,
        model_id: u32,
        width: u8,
        now: u64,
    ) -> Vec<Outgoing> {
        let Some(model) = self.models.get(&model_id) else {
            self.note(
                now,
                format!("hello from device {device_id}: unknown model {model_id}"),
            );
            return vec![Outgoing {
                device_id,
                message: Message::Error {
                    code: ERR_UNKNOWN_MODEL,
                    session_id: 0,
                },
            }];
        };
        if model.width() != width as usize {
            self.note(
                now,
                format!(
                    "hello from device {device_id}: width {width} does not match model {model_id}"
                ),
            );
            return vec![Outgoing {
                device_id,
                message: Message::Error {
                    code: ERR_WIDTH_MISMATCH,
                    session_id: 0,
                },
            }];
        }
        let status = match self.registry.get_mut(&device_id) {
            Some(record) => {
                // Re-hello refreshes liveness; the seed counter is preserved.
                if record.status == DeviceStatus::Unreachable {
                    record.status = DeviceStatus::Idle;
                }
                1
            }
            None => {
                self.registry.insert(
                    device_id,
                    DeviceRecord {
                        device_id,
                        model_id,
                        width,
                        last_seed_counter: 0,
                        status: DeviceStatus::Idle,
                    },
                );
                0
            }
        };
        let mut out = vec![Outgoing {
            device_id,
            message: Message::HelloAck { status },
        }];
        out.extend(self.drain_triggers_for(device_id, now));
        out
    }

    /// Issues a fresh-seed session to a device. Refused while the device has
    /// an open session.
    pub fn start_session(
        &mut self,
        device_id: u32,
        scenario: Scenario,
        now: u64,
    ) -> Result<Outgoing, RemoteError> {
        self.start_session_inner(device_id, scenario, None, now)
    }

    fn start_session_inner(
        &mut self,
        device_id: u32,
        scenario: Scenario,
        trigger_reason: Option<TriggerReason>,
        now: u64,
    ) -> Result<Outgoing, RemoteError> {
        let record = self
            .registry
            .get(&device_id)
            .ok_or(RemoteError::UnknownDevice(device_id))?;
        if record.status == DeviceStatus::Testing {
            return Err(RemoteError::DeviceBusy(device_id));
        }
        let model_id = record.model_id;
        let model = self
            .models
            .get(&model_id)
            .ok_or(RemoteError::UnknownModel(model_id))?
            .clone();

        let seed = self.fresh_seed(device_id, now)?;
        let expected_signature = match self.config.signature_mode {
            SignatureMode::Precomputed => match self.precomputed.get(&(model_id, seed.clone())) {
                Some(sig) => sig.clone(),
                None => golden_signature(&model.dut, &model.template.instantiate(seed.clone()))?,
            },
            SignatureMode::OnTheFly => {
                golden_signature(&model.dut, &model.template.instantiate(seed.clone()))?
            }
        };

        let session_id = self.next_session_id;
        self.next_session_id += 1;
        let session = TestSession {
            session_id,
            device_id,
            seed,
            pattern_count: model.template.pattern_count,
            scenario,
            expected_signature,
            outcome: None,
            trigger_reason,
            issued_at: now,
            deadline: now + self.config.timeout,
            retries_left: self.config.retries,
        };
        let message = session.init_message();
        self.sessions.insert(session_id, session);
        self.open_by_device.insert(device_id, session_id);
        self.registry
            .get_mut(&device_id)
            .expect("checked above")
            .status = DeviceStatus::Testing;
        Ok(Outgoing { device_id, message })
    }

    /// Next seed for a device: never zero, never repeated until the nonzero
    /// state space of the device width is exhausted, after which the cycle
    /// restarts (and the restart is logged).
    ///
    /// The mixing rule walks the integers `1 ..= 2^w - 1` from a per-device
    /// offset derived from the server secret and the device id, then folds
    /// the value through the same key-to-seed derivation the keyed self-test
    /// uses.
    fn fresh_seed(&mut self, device_id: u32, now: u64) -> Result<BitVec, RemoteError> {
        let record = self
            .registry
            .get_mut(&device_id)
            .ok_or(RemoteError::UnknownDevice(device_id))?;
        let width = record.width as usize;
        assert!((1..=MAX_SEED_WIDTH).contains(&width));
        let period = (1u64 << width) - 1;
        let counter = record.last_seed_counter;
        record.last_seed_counter += 1;
        if counter > 0 && counter % period == 0 {
            self.note(
                now,
                format!("seed cycle restart device={device_id} counter={counter}"),
            );
        }
        let offset =
            mix64(self.config.secret ^ (device_id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let value = (offset.wrapping_add(counter)) % period + 1;
        let key = TestKey::new(BitVec::from_int(value, width).expect("width >= 1"));
        Ok(derive_seed(&key, width)?)
    }

    fn handle_report(
        &mut self,
        src: u32,
        session_id: u64,
        signature: Option<&BitVec>,
        verdict: Option<bool>,
        now: u64,
    ) -> Vec<Outgoing> {
        let Some(session) = self.sessions.get(&session_id) else {
            self.note(
                now,
                format!("report for unknown session {session_id} from device {src}"),
            );
            return vec![Outgoing {
                device_id: src,
                message: Message::Error {
                    code: ERR_UNKNOWN_SESSION,
                    session_id,
                },
            }];
        };
        if session.outcome.is_some() {
            // Duplicate or late report: idempotent, never re-opens or
            // double-closes the session.
            self.note(
                now,
                format!("duplicate report for closed session {session_id} discarded"),
            );
            return Vec::new();
        }
        let outcome = match (signature, verdict) {
            (Some(sig), _) => {
                if *sig == session.expected_signature {
                    SessionOutcome::Pass
                } else {
                    SessionOutcome::Fail
                }
            }
            (None, Some(pass)) => {
                if pass {
                    SessionOutcome::Pass
                } else {
                    SessionOutcome::Fail
                }
            }
            (None, None) => unreachable!("report carries a signature or a verdict"),
        };
        let device_id = session.device_id;
        self.close_session(session_id, outcome, now);
        self.drain_triggers_for(device_id, now)
    }

    fn close_session(&mut self, session_id: u64, outcome: SessionOutcome, now: u64) {
        let session = self.sessions.get_mut(&session_id).expect("caller checked");
        session.outcome = Some(outcome);
        let line = LogLine::Session {
            timestamp: now,
            device_id: session.device_id,
            session_id,
            scenario: session.scenario,
            seed_hex: session.seed.to_hex(),
            count: session.pattern_count,
            outcome,
        };
        let device_id = session.device_id;
        self.push_log(line);
        self.open_by_device.remove(&device_id);
        if let Some(record) = self.registry.get_mut(&device_id) {
            record.status = match outcome {
                SessionOutcome::Timeout => DeviceStatus::Unreachable,
                _ => DeviceStatus::Idle,
            };
        }
    }

    fn handle_trigger(
        &mut self,
        requester_id: u32,
        target_id: u32,
        reason: TriggerReason,
        now: u64,
    ) -> Vec<Outgoing> {
        if !self.registry.contains_key(&requester_id) {
            self.note(
                now,
                format!("trigger from unenrolled device {requester_id} refused"),
            );
            return Vec::new();
        }
        if !self.registry.contains_key(&target_id) {
            self.note(
                now,
                format!("trigger for unknown target {target_id} from device {requester_id}"),
            );
            return vec![Outgoing {
                device_id: requester_id,
                message: Message::Error {
                    code: ERR_UNKNOWN_TARGET,
                    session_id: 0,
                },
            }];
        }
        self.note(
            now,
            format!("trigger device={requester_id} target={target_id} reason={reason}"),
        );
        match self.start_session_inner(target_id, self.config.scenario, Some(reason), now) {
            Ok(out) => vec![out],
            Err(RemoteError::DeviceBusy(_)) => {
                // Busy targets queue rather than refuse.
                let queue = self.pending_triggers.entry(target_id).or_default();
                if queue.len() < self.config.trigger_queue_capacity {
                    queue.push_back((requester_id, reason));
                    self.note(now, format!("trigger queued for busy target {target_id}"));
                } else {
                    self.note(
                        now,
                        format!("trigger queue full for target {target_id}, dropped"),
                    );
                }
                Vec::new()
            }
            Err(e) => {
                self.note(now, format!("trigger for target {target_id} failed: {e}"));
                Vec::new()
            }
        }
    }

    fn drain_triggers_for(&mut self, device_id: u32, now: u64) -> Vec<Outgoing> {
        let mut out = Vec::new();
        while let Some((requester, reason)) = self
            .pending_triggers
            .get_mut(&device_id)
            .and_then(|q| q.pop_front())
        {
            match self.start_session_inner(device_id, self.config.scenario, Some(reason), now) {
                Ok(o) => {
                    out.push(o);
                    break; // device is testing again; the rest stays queued
                }
                Err(RemoteError::DeviceBusy(_)) => {
                    // Raced with another issue; put it back and stop.
                    self.pending_triggers
                        .entry(device_id)
                        .or_default()
                        .push_front((requester, reason));
                    break;
                }
                Err(e) => {
                    self.note(now, format!("queued trigger for {device_id} failed: {e}"));
                }
            }
        }
        out
    }

    /// Advances timers: retransmissions, timeouts, periodic scheduling, and
    /// queued triggers. Call once per tick (or second).
    pub fn tick(&mut self, now: u64) -> Vec<Outgoing> {
        let mut out = Vec::new();

        // Retransmit or expire open sessions, in session order.
        let open: Vec<u64> = self
            .sessions
            .values()
            .filter(|s| s.outcome.is_none() && now >= s.deadline)
            .map(|s| s.session_id)
            .collect();
        for session_id in open {
            let session = self.sessions.get_mut(&session_id).expect("just listed");
            if session.retries_left > 0 {
                session.retries_left -= 1;
                session.deadline = now + self.config.timeout;
                out.push(Outgoing {
                    device_id: session.device_id,
                    message: session.init_message(),
                });
            } else {
                self.close_session(session_id, SessionOutcome::Timeout, now);
            }
        }

        // Periodic schedule.
        if let SchedulePolicy::Periodic { interval } = self.config.schedule {
            if now >= self.next_periodic {
                self.next_periodic = now + interval;
                let idle: Vec<u32> = self
                    .registry
                    .values()
                    .filter(|r| r.status != DeviceStatus::Testing)
                    .map(|r| r.device_id)
                    .collect();
                for device_id in idle {
                    match self.start_session_inner(device_id, self.config.scenario, None, now) {
                        Ok(o) => out.push(o),
                        Err(e) => self.note(now, format!("scheduled test skipped: {e}")),
                    }
                }
            }
        }

        // Queued triggers for devices that have come back to idle.
        let with_queues: Vec<u32> = self.pending_triggers.keys().copied().collect();
        for device_id in with_queues {
            let idle = self
                .registry
                .get(&device_id)
                .is_some_and(|r| r.status != DeviceStatus::Testing);
            if idle {
                out.extend(self.drain_triggers_for(device_id, now));
            }
        }

        out
    }

    /// Writes the registry as a text file, one device per line.
    pub fn save_registry(&self, path: &Path) -> Result<(), RemoteError> {
        let mut text = String::from("# lbist device registry v1\n");
        for r in self.registry.values() {
            let status = match r.status {
                DeviceStatus::Unreachable => DeviceStatus::Unreachable,
                // Open sessions are not persisted, so testing reloads as idle.
                _ => DeviceStatus::Idle,
            };
            text.push_str(&format!(
                "device {} model {} width {} counter {} status {}\n",
                r.device_id, r.model_id, r.width, r.last_seed_counter, status
            ));
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load_registry(&mut self, path: &Path) -> Result<(), RemoteError> {
        let text = fs::read_to_string(path)?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 10
                || fields[0] != "device"
                || fields[2] != "model"
                || fields[4] != "width"
                || fields[6] != "counter"
                || fields[8] != "status"
            {
                return Err(RemoteError::RegistryParse(format!("bad line '{line}'")));
            }
            let parse = |s: &str| -> Result<u64, RemoteError> {
                s.parse()
                    .map_err(|_| RemoteError::RegistryParse(format!("bad number '{s}'")))
            };
            let device_id = parse(fields[1])? as u32;
            let status = match fields[9] {
                "idle" => DeviceStatus::Idle,
                "unreachable" => DeviceStatus::Unreachable,
                other => return Err(RemoteError::RegistryParse(format!("bad status '{other}'"))),
            };
            self.registry.insert(
                device_id,
                DeviceRecord {
                    device_id,
                    model_id: parse(fields[3])? as u32,
                    width: parse(fields[5])? as u8,
                    last_seed_counter: parse(fields[7])?,
                    status,
                },
            );
        }
        Ok(())
    }
}

/// splitmix64 finalizer; stable across platforms.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
