//! Deterministic discrete-event network between the manager and its device
//! agents: seeded drops, duplicates, and bounded delays, with a full event
//! trace.
//!
//! Time is an integer tick counter. Every frame transmission rolls the loss
//! dice from one seeded RNG stream in event order, so a run is a pure
//! function of (agents, manager config, conditions, script): identical
//! inputs give byte-identical traces.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::agent::DeviceAgent;
use super::server::{Outgoing, TestManager};
use super::wire::{decode_frame, Message, Scenario, TriggerReason};

/// Loss model for the simulated network.
#[derive(Clone, Copy, Debug)]
pub struct NetConditions {
    pub drop_probability: f64,
    pub duplicate_probability: f64,
    pub delay_min: u64,
    pub delay_max: u64,
    pub rng_seed: u64,
}

impl Default for NetConditions {
    fn default() -> Self {
        NetConditions {
            drop_probability: 0.0,
            duplicate_probability: 0.0,
            delay_min: 0,
            delay_max: 0,
            rng_seed: 0,
        }
    }
}

impl NetConditions {
    pub fn validate(&self) -> Result<(), String> {
        for (name, p) in [
            ("drop_probability", self.drop_probability),
            ("duplicate_probability", self.duplicate_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must be in [0, 1], got {p}"));
            }
        }
        if self.delay_min > self.delay_max {
            return Err(format!(
                "delay range {}..{} is empty",
                self.delay_min, self.delay_max
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Endpoint {
    Manager,
    Device(u32),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Manager => f.write_str("manager"),
            Endpoint::Device(id) => write!(f, "device {id}"),
        }
    }
}

/// Scripted stimulus applied at a given tick.
#[derive(Clone, Debug)]
pub enum ScriptAction {
    /// Device announces itself to the manager.
    Hello { device: u32 },
    /// Manager starts a session for the device.
    StartTest { device: u32, scenario: Scenario },
    /// Device asks the manager to test another device.
    Trigger {
        requester: u32,
        target: u32,
        reason: TriggerReason,
    },
}

#[derive(Clone, Debug, Default)]
pub struct Script {
    pub steps: Vec<(u64, ScriptAction)>,
    pub run_until: u64,
}

impl Script {
    pub fn new(run_until: u64) -> Script {
        Script {
            steps: Vec::new(),
            run_until,
        }
    }

    pub fn at(mut self, time: u64, action: ScriptAction) -> Script {
        self.steps.push((time, action));
        self
    }
}

#[derive(PartialEq, Eq)]
struct QueuedEvent {
    at: u64,
    seq: u64,
    kind: EventKind,
}

impl Ord for QueuedEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.at, self.seq).cmp(&(other.at, other.seq))
    }
}

impl PartialOrd for QueuedEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(PartialEq, Eq)]
enum EventKind {
    Script(usize),
    Transmit {
        from: Endpoint,
        to: Endpoint,
        msg: Message,
    },
    Deliver {
        from: Endpoint,
        to: Endpoint,
        frame: Vec<u8>,
    },
}

/// The simulation: one manager, any number of agents, a lossy channel.
pub struct Simulation {
    manager: TestManager,
    agents: Vec<DeviceAgent>,
    conditions: NetConditions,
    rng: ChaCha8Rng,
    queue: BinaryHeap<Reverse<QueuedEvent>>,
    seq: u64,
    trace: Vec<String>,
    script_steps: Vec<ScriptAction>,
}

impl Simulation {
    pub fn new(
        manager: TestManager,
        agents: Vec<DeviceAgent>,
        conditions: NetConditions,
    ) -> Simulation {
        conditions.validate().expect("invalid network conditions");
        Simulation {
            manager,
            agents,
            rng: ChaCha8Rng::seed_from_u64(conditions.rng_seed),
            conditions,
            queue: BinaryHeap::new(),
            seq: 0,
            trace: Vec::new(),
            script_steps: Vec::new(),
        }
    }

    pub fn manager(&self) -> &TestManager {
        &self.manager
    }

    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for line in &self.trace {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    fn push_event(&mut self, at: u64, kind: EventKind) {
        let seq = self.seq;
        self.seq += 1;
        self.queue.push(Reverse(QueuedEvent { at, seq, kind }));
    }

    /// Puts a frame on the wire at tick `now`: encodes through the same
    /// codec the socket transport uses, then rolls drop, delay, and
    /// duplication, and records what happened.
    fn transmit(&mut self, from: Endpoint, to: Endpoint, msg: Message, now: u64) {
        let frame = msg.encode();
        let mut copies = 1;
        if self.conditions.duplicate_probability > 0.0
            && self.rng.gen_bool(self.conditions.duplicate_probability)
        {
            copies = 2;
        }
        for copy in 0..copies {
            let dropped = self.conditions.drop_probability > 0.0
                && self.rng.gen_bool(self.conditions.drop_probability);
            let tag = if copy == 0 { "send" } else { "send-dup" };
            if dropped {
                self.trace
                    .push(format!("[t={now}] drop {from} -> {to}: {}", msg.summary()));
                continue;
            }
            let delay = if self.conditions.delay_max > self.conditions.delay_min {
                self.rng
                    .gen_range(self.conditions.delay_min..=self.conditions.delay_max)
            } else {
                self.conditions.delay_min
            };
            let arrive = now + delay;
            self.trace.push(format!(
                "[t={now}] {tag} {from} -> {to}: {} (arrives t={arrive})",
                msg.summary()
            ));
            self.push_event(
                arrive,
                EventKind::Deliver {
                    from,
                    to,
                    frame: frame.clone(),
                },
            );
        }
    }

    fn deliver(&mut self, from: Endpoint, to: Endpoint, frame: &[u8], now: u64) {
        let msg = match decode_frame(frame) {
            Ok(Some((msg, consumed))) if consumed == frame.len() => msg,
            other => {
                self.trace.push(format!(
                    "[t={now}] note: undecodable frame {from} -> {to} dropped ({other:?})"
                ));
                return;
            }
        };
        self.trace
            .push(format!("[t={now}] recv {to} <- {from}: {}", msg.summary()));
        match to {
            Endpoint::Manager => {
                let src = match from {
                    Endpoint::Device(id) => id,
                    Endpoint::Manager => {
                        self.trace
                            .push(format!("[t={now}] note: manager-to-manager frame ignored"));
                        return;
                    }
                };
                let out = self.manager.handle_message(src, &msg, now);
                for Outgoing { device_id, message } in out {
                    self.transmit(Endpoint::Manager, Endpoint::Device(device_id), message, now);
                }
            }
            Endpoint::Device(id) => {
                let Some(agent) = self.agents.iter_mut().find(|a| a.device_id() == id) else {
                    self.trace.push(format!(
                        "[t={now}] note: no agent for device {id}, frame lost"
                    ));
                    return;
                };
                let replies = agent.handle_message(&msg, now);
                for (send_at, reply) in replies {
                    if send_at <= now {
                        self.transmit(Endpoint::Device(id), Endpoint::Manager, reply, now);
                    } else {
                        self.push_event(
                            send_at,
                            EventKind::Transmit {
                                from: Endpoint::Device(id),
                                to: Endpoint::Manager,
                                msg: reply,
                            },
                        );
                    }
                }
            }
        }
    }

    fn run_script_action(&mut self, index: usize, now: u64) {
        let action = self.script_steps[index].clone();
        match action {
            ScriptAction::Hello { device } => {
                self.trace
                    .push(format!("[t={now}] script: hello device {device}"));
                let Some(agent) = self.agents.iter().find(|a| a.device_id() == device) else {
                    self.trace
                        .push(format!("[t={now}] note: no agent for device {device}"));
                    return;
                };
                let hello = agent.hello();
                self.transmit(Endpoint::Device(device), Endpoint::Manager, hello, now);
            }
            ScriptAction::StartTest { device, scenario } => {
                self.trace.push(format!(
                    "[t={now}] script: start test device {device} ({scenario})"
                ));
                match self.manager.start_session(device, scenario, now) {
                    Ok(Outgoing { device_id, message }) => {
                        self.transmit(Endpoint::Manager, Endpoint::Device(device_id), message, now);
                    }
                    Err(e) => {
                        self.trace.push(format!("[t={now}] refused: {e}"));
                    }
                }
            }
            ScriptAction::Trigger {
                requester,
                target,
                reason,
            } => {
                self.trace.push(format!(
                    "[t={now}] script: trigger requester={requester} target={target} reason={reason}"
                ));
                let msg = Message::TriggerRequest {
                    requester_id: requester,
                    target_id: target,
                    reason,
                };
                self.transmit(Endpoint::Device(requester), Endpoint::Manager, msg, now);
            }
        }
    }

    /// Runs the script to completion. The trace and the manager log hold
    /// the observable results.
    pub fn run(&mut self, script: Script) {
        self.script_steps = script.steps.iter().map(|(_, a)| a.clone()).collect();
        for (i, (at, _)) in script.steps.iter().enumerate() {
            self.push_event(*at, EventKind::Script(i));
        }
        for now in 0..=script.run_until {
            let mut ticked = false;
            loop {
                while self.queue.peek().is_some_and(|Reverse(e)| e.at <= now) {
                    let Reverse(event) = self.queue.pop().expect("peeked");
                    match event.kind {
                        EventKind::Script(index) => self.run_script_action(index, now),
                        EventKind::Transmit { from, to, msg } => self.transmit(from, to, msg, now),
                        EventKind::Deliver { from, to, frame } => {
                            self.deliver(from, to, &frame, now)
                        }
                    }
                }
                if !ticked {
                    ticked = true;
                    let out = self.manager.tick(now);
                    for Outgoing { device_id, message } in out {
                        self.transmit(Endpoint::Manager, Endpoint::Device(device_id), message, now);
                    }
                    continue;
                }
                break;
            }
        }
    }
}

/// Convenience wrapper: build, run, and return the trace plus the manager.
pub fn simnet_run(
    manager: TestManager,
    agents: Vec<DeviceAgent>,
    conditions: NetConditions,
    script: Script,
) -> Simulation {
    let mut sim = Simulation::new(manager, agents, conditions);
    sim.run(script);
    sim
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dut::{FaultMode, FaultSet, Nlfsr};
    use crate::engine::ConfigTemplate;
    use crate::remote::server::{DeviceModel, LogLine, ManagerConfig, SessionOutcome};

    fn manager() -> TestManager {
        let mut m = TestManager::new(ManagerConfig::default());
        m.register_model(1, DeviceModel::sample_4bit());
        m
    }

    fn agent(id: u32) -> DeviceAgent {
        DeviceAgent::new(id, 1, Nlfsr::sample_4bit(), ConfigTemplate::sample_4bit())
    }

    fn count_matching(trace: &[String], needle: &str) -> usize {
        trace.iter().filter(|l| l.contains(needle)).count()
    }

    #[test]
    fn lossless_cycle_is_one_init_one_report() {
        let script = Script::new(10).at(0, ScriptAction::Hello { device: 7 }).at(
            1,
            ScriptAction::StartTest {
                device: 7,
                scenario: Scenario::SignatureReport,
            },
        );
        let sim = simnet_run(manager(), vec![agent(7)], NetConditions::default(), script);
        let inits = count_matching(sim.trace(), "send manager -> device 7: TEST_INIT");
        let reports = count_matching(sim.trace(), "send device 7 -> manager: SIG_REPORT");
        assert_eq!(inits, 1);
        assert_eq!(reports, 1);
        let outcomes: Vec<SessionOutcome> = sim
            .manager()
            .sessions()
            .values()
            .map(|s| s.outcome.unwrap())
            .collect();
        assert_eq!(outcomes, vec![SessionOutcome::Pass]);
    }

    #[test]
    fn identical_inputs_give_identical_traces() {
        let build = || {
            let script = Script::new(60)
                .at(0, ScriptAction::Hello { device: 7 })
                .at(0, ScriptAction::Hello { device: 8 })
                .at(
                    1,
                    ScriptAction::StartTest {
                        device: 7,
                        scenario: Scenario::SignatureReport,
                    },
                )
                .at(
                    2,
                    ScriptAction::StartTest {
                        device: 8,
                        scenario: Scenario::LocalVerdict,
                    },
                );
            let conditions = NetConditions {
                drop_probability: 0.25,
                duplicate_probability: 0.2,
                delay_min: 0,
                delay_max: 2,
                rng_seed: 11,
            };
            simnet_run(manager(), vec![agent(7), agent(8)], conditions, script)
        };
        let a = build();
        let b = build();
        assert_eq!(a.trace_text(), b.trace_text());
        let log_a: Vec<String> = a.manager().log().iter().map(|l| l.to_string()).collect();
        let log_b: Vec<String> = b.manager().log().iter().map(|l| l.to_string()).collect();
        assert_eq!(log_a, log_b);
    }

    #[test]
    fn dropped_init_is_retransmitted_and_the_session_completes() {
        // Seed chosen so the first TEST_INIT transmission is dropped; the
        // assertions below verify that premise before relying on it.
        let mut chosen = None;
        for seed in 0..200u64 {
            let script = Script::new(40).at(0, ScriptAction::Hello { device: 7 }).at(
                1,
                ScriptAction::StartTest {
                    device: 7,
                    scenario: Scenario::SignatureReport,
                },
            );
            let conditions = NetConditions {
                drop_probability: 0.5,
                duplicate_probability: 0.0,
                delay_min: 0,
                delay_max: 0,
                rng_seed: seed,
            };
            let sim = simnet_run(manager(), vec![agent(7)], conditions, script);
            let first_init_dropped = sim
                .trace()
                .iter()
                .find(|l| l.contains("TEST_INIT"))
                .is_some_and(|l| l.contains("drop"));
            let completed = sim
                .manager()
                .sessions()
                .values()
                .all(|s| s.outcome == Some(SessionOutcome::Pass));
            if first_init_dropped && completed {
                let retransmissions =
                    count_matching(sim.trace(), "send manager -> device 7: TEST_INIT");
                assert!(retransmissions >= 1);
                chosen = Some(seed);
                break;
            }
        }
        assert!(
            chosen.is_some(),
            "no seed under 200 drops the first init and still completes"
        );
    }

    #[test]
    fn duplicate_reports_are_discarded_by_session_idempotency() {
        // Duplicates always on, no drops: every frame arrives twice.
        let script = Script::new(20).at(0, ScriptAction::Hello { device: 7 }).at(
            1,
            ScriptAction::StartTest {
                device: 7,
                scenario: Scenario::SignatureReport,
            },
        );
        let conditions = NetConditions {
            drop_probability: 0.0,
            duplicate_probability: 1.0,
            delay_min: 0,
            delay_max: 1,
            rng_seed: 3,
        };
        let sim = simnet_run(manager(), vec![agent(7)], conditions, script);
        let session_lines = sim
            .manager()
            .log()
            .iter()
            .filter(|l| matches!(l, LogLine::Session { .. }))
            .count();
        assert_eq!(session_lines, 1, "duplicate reports must not double-close");
        assert!(sim.manager().log().iter().any(
            |l| matches!(l, LogLine::Note { text, .. } if text.contains("duplicate report")
                || text.contains("unknown session"))
        ));
    }

    #[test]
    fn scenario_choice_does_not_change_outcomes() {
        // Same device and seeds, comparison site moves between manager and
        // device: outcomes must be identical.
        let run = |scenario: Scenario| {
            let mut script = Script::new(200).at(0, ScriptAction::Hello { device: 7 });
            for k in 0..6u64 {
                script = script.at(
                    1 + k * 10,
                    ScriptAction::StartTest {
                        device: 7,
                        scenario,
                    },
                );
            }
            let trojan = agent(7).with_faults(FaultSet::single(1, false), FaultMode::CaptureOnly);
            let sim = simnet_run(manager(), vec![trojan], NetConditions::default(), script);
            sim.manager()
                .sessions()
                .values()
                .map(|s| (s.seed.clone(), s.outcome.unwrap()))
                .collect::<Vec<_>>()
        };
        let by_signature = run(Scenario::SignatureReport);
        let by_verdict = run(Scenario::LocalVerdict);
        assert_eq!(by_signature, by_verdict);
        assert!(by_signature.iter().any(|(_, o)| *o == SessionOutcome::Fail));
    }

    #[test]
    fn trigger_request_travels_the_wire_and_schedules_the_target() {
        let script = Script::new(30)
            .at(0, ScriptAction::Hello { device: 3 })
            .at(0, ScriptAction::Hello { device: 7 })
            .at(
                2,
                ScriptAction::Trigger {
                    requester: 3,
                    target: 7,
                    reason: TriggerReason::CommFailure,
                },
            );
        let sim = simnet_run(
            manager(),
            vec![agent(3), agent(7)],
            NetConditions::default(),
            script,
        );
        assert_eq!(count_matching(sim.trace(), "TEST_TRIGGER_REQ"), 2); // send + recv
        let session = sim.manager().sessions().values().next().unwrap();
        assert_eq!(session.device_id, 7);
        assert_eq!(session.trigger_reason, Some(TriggerReason::CommFailure));
        assert_eq!(session.outcome, Some(SessionOutcome::Pass));
    }

    #[test]
    fn width_mismatched_agent_yields_error_frames_in_the_trace() {
        let wide = Nlfsr::parse_model("width 5\nx1\nx2\nx3\nx4\nx0\n").unwrap();
        let mut template = ConfigTemplate::sample_4bit();
        template.prpg_poly = crate::registers::Gf2Poly::parse("1+x+x^2+x^3+x^4+x^5").unwrap();
        template.misr_poly = crate::registers::Gf2Poly::parse("1+x^2+x^5").unwrap();
        template.misr_init = crate::registers::BitVec::zeros(5).unwrap();
        // Enrolls as model 1 (width 4) but actually runs a 5-stage device:
        // the HELLO lies about the width, the TEST_INIT seed then mismatches.
        let liar = DeviceAgent::new(9, 1, wide, template);
        let hello = Message::Hello {
            device_id: 9,
            model_id: 1,
            width: 4,
        };
        let script = Script::new(20).at(
            1,
            ScriptAction::StartTest {
                device: 9,
                scenario: Scenario::SignatureReport,
            },
        );
        let mut m = manager();
        m.handle_message(9, &hello, 0);
        let sim = simnet_run(m, vec![liar], NetConditions::default(), script);
        assert!(count_matching(sim.trace(), "ERROR code=0x02") >= 1);
    }
}
