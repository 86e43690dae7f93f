//! Remotely managed self-test: a central manager issues fresh test
//! parameters to enrolled devices each cycle and evaluates the returned
//! signatures or verdicts, so no fixed pattern set ever repeats long enough
//! to tune a Trojan against it.
//!
//! The pieces:
//!
//! - [`wire`]: the length-prefixed frame codec shared by every transport.
//! - [`server`]: the [`TestManager`](server::TestManager) state machine
//!   (enrollment, session issue/evaluate, retries, trigger queues, logs).
//! - [`agent`]: the device-side endpoint executing received parameters on
//!   its (possibly Trojan-carrying) DUT.
//! - [`simnet`]: a deterministic discrete-event network for protocol tests
//!   and experiments.
//! - [`socket`]: the same state machines over real TCP streams.

pub mod agent;
pub mod server;
pub mod simnet;
pub mod socket;
pub mod wire;

pub use agent::DeviceAgent;
pub use server::{
    DeviceModel, DeviceRecord, DeviceStatus, LogLine, ManagerConfig, Outgoing, RemoteError,
    SchedulePolicy, SessionOutcome, SignatureMode, TestManager, TestSession,
};
pub use simnet::{simnet_run, NetConditions, Script, ScriptAction, Simulation};
pub use wire::{Message, Scenario, TriggerReason, WireError};
