//! Device-side endpoint: a DUT with its on-chip LBIST registers, driven by
//! TEST_INIT frames from the manager.
//!
//! The agent owns its polynomials and MISR init (they are hardware); the
//! seed and pattern count arrive over the wire. The fault set models a
//! Trojan baked into this particular device. Replies for completed sessions
//! are cached so a retransmitted TEST_INIT is answered without re-running
//! the test.

use std::collections::BTreeMap;

use crate::dut::{FaultMode, FaultSet, Nlfsr};
use crate::engine::{decide, run_lbist, ConfigTemplate, LbistConfig};

use super::wire::{Message, Scenario, ERR_BUSY, ERR_WIDTH_MISMATCH};

pub struct DeviceAgent {
    device_id: u32,
    model_id: u32,
    dut: Nlfsr,
    template: ConfigTemplate,
    faults: FaultSet,
    mode: FaultMode,
    /// Simulated execution latency of one test cycle, in ticks.
    exec_ticks: u64,
    replies: BTreeMap<u64, Message>,
    busy: Option<Busy>,
}

struct Busy {
    session_id: u64,
    ready_at: u64,
}

impl DeviceAgent {
    pub fn new(device_id: u32, model_id: u32, dut: Nlfsr, template: ConfigTemplate) -> Self {
        DeviceAgent {
            device_id,
            model_id,
            dut,
            template,
            faults: FaultSet::empty(),
            mode: FaultMode::CaptureOnly,
            exec_ticks: 0,
            replies: BTreeMap::new(),
            busy: None,
        }
    }

    /// Injects a Trojan into this device.
    pub fn with_faults(mut self, faults: FaultSet, mode: FaultMode) -> Self {
        self.faults = faults;
        self.mode = mode;
        self
    }

    pub fn with_exec_ticks(mut self, ticks: u64) -> Self {
        self.exec_ticks = ticks;
        self
    }

    pub fn device_id(&self) -> u32 {
        self.device_id
    }

    pub fn hello(&self) -> Message {
        Message::Hello {
            device_id: self.device_id,
            model_id: self.model_id,
            width: self.dut.width() as u8,
        }
    }

    /// Handles one inbound frame; returns `(send_at, message)` pairs.
    pub fn handle_message(&mut self, msg: &Message, now: u64) -> Vec<(u64, Message)> {
        match msg {
            Message::TestInit {
                session_id,
                scenario,
                pattern_count,
                seed,
                expected_signature,
            } => self.handle_init(
                *session_id,
                *scenario,
                *pattern_count,
                seed,
                expected_signature.as_ref(),
                now,
            ),
            // Acks and errors need no reply; anything else is not for us.
            Message::HelloAck { .. } | Message::Error { .. } => Vec::new(),
            _ => Vec::new(),
        }
    }

    fn handle_init(
        &mut self,
        session_id: u64,
        scenario: Scenario,
        pattern_count: u32,
        seed: &crate::registers::BitVec,
        expected_signature: Option<&crate::registers::BitVec>,
        now: u64,
    ) -> Vec<(u64, Message)> {
        if let Some(busy) = &self.busy {
            if now < busy.ready_at {
                if busy.session_id == session_id {
                    // Duplicate init for the run in flight; the reply is
                    // already scheduled.
                    return Vec::new();
                }
                return vec![(
                    now,
                    Message::Error {
                        code: ERR_BUSY,
                        session_id,
                    },
                )];
            }
        }
        if let Some(reply) = self.replies.get(&session_id) {
            // Retransmitted init: replay the cached reply, no re-execution.
            return vec![(now, reply.clone())];
        }
        if seed.width() != self.dut.width() {
            return vec![(
                now,
                Message::Error {
                    code: ERR_WIDTH_MISMATCH,
                    session_id,
                },
            )];
        }
        if let Some(expected) = expected_signature {
            if expected.width() != self.template.misr_poly.degree() {
                return vec![(
                    now,
                    Message::Error {
                        code: ERR_WIDTH_MISMATCH,
                        session_id,
                    },
                )];
            }
        }

        let cfg = LbistConfig {
            prpg_poly: self.template.prpg_poly.clone(),
            prpg_seed: seed.clone(),
            misr_poly: self.template.misr_poly.clone(),
            misr_init: self.template.misr_init.clone(),
            pattern_count,
        };
        let signature = match run_lbist(&self.dut, &cfg, &self.faults, self.mode) {
            Ok(sig) => sig,
            Err(_) => {
                // Unusable parameters (zero seed or count); treat as a
                // parameter mismatch.
                return vec![(
                    now,
                    Message::Error {
                        code: ERR_WIDTH_MISMATCH,
                        session_id,
                    },
                )];
            }
        };
        let reply = match scenario {
            Scenario::SignatureReport => Message::SigReport {
                session_id,
                signature,
            },
            Scenario::LocalVerdict => {
                let expected = expected_signature.expect("codec guarantees presence");
                let verdict = decide(&signature, expected).expect("widths checked above");
                Message::VerdictReport {
                    session_id,
                    pass: verdict.is_pass(),
                }
            }
        };
        let ready_at = now + self.exec_ticks;
        self.replies.insert(session_id, reply.clone());
        self.busy = Some(Busy {
            session_id,
            ready_at,
        });
        vec![(ready_at, reply)]
    }
}
