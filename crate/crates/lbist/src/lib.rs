//! Desk-scale logic built-in self-test (LBIST) simulation.
//!
//! An LBIST block tests a circuit by clocking an LFSR whose states serve as
//! pseudo-random test patterns, capturing the circuit's responses in a MISR,
//! and comparing the compacted signature to a known-good value. Because the
//! compaction is lossy, a faulty circuit can *alias*: produce the golden
//! signature anyway. An adversary who knows the fixed test patterns can
//! exploit that to tune a stuck-at Trojan that the self-test never sees.
//!
//! This crate builds that whole story at bench scale on small
//! shift-register DUTs, plus the two countermeasures that deny the
//! adversary a fixed pattern set:
//!
//! - [`registers`]: GF(2) connection polynomials and Galois-configuration
//!   shift registers (the pattern generator and the signature compactor).
//! - [`dut`]: NLFSR devices under test described by ANF feedback functions,
//!   with stuck-at fault injection as the Trojan model.
//! - [`engine`]: the LBIST controller and decision logic, and the *keyed*
//!   variant where the seed derives from a key provisioned into an emulated
//!   fusebox after manufacturing.
//! - [`attack`]: exhaustive search for aliasing fault sets and the
//!   attack-complexity arithmetic.
//! - [`remote`]: a central test-management server issuing fresh per-cycle
//!   test parameters to networked device agents, over real TCP or a
//!   deterministic simulated network.
//! - [`cli`]: the `lbist` binary's subcommands (simulate, attack,
//!   provision, selftest, serve, agent, simnet).
//!
//! Start with the runnable examples (`cargo run --example run_selftest`,
//! `--example trojan_aliasing`, `--example remote_simnet`, ...); each one
//! demonstrates a single capability end to end.
//!
//! ```
//! use lbist::dut::{FaultMode, FaultSet, Nlfsr};
//! use lbist::engine::{golden_signature, run_lbist, LbistConfig};
//!
//! let dut = Nlfsr::sample_4bit();
//! let cfg = LbistConfig::sample_4bit();
//!
//! // The tuned Trojan collides with the golden signature...
//! let golden = golden_signature(&dut, &cfg).unwrap();
//! let trojan = FaultSet::single(1, false);
//! let faulty = run_lbist(&dut, &cfg, &trojan, FaultMode::CaptureOnly).unwrap();
//! assert_eq!(golden, faulty);
//!
//! // ...but most other stuck-at faults are caught.
//! let stuck0 = FaultSet::single(0, false);
//! let caught = run_lbist(&dut, &cfg, &stuck0, FaultMode::CaptureOnly).unwrap();
//! assert_ne!(golden, caught);
//! ```

pub mod attack;
pub mod cli;
pub mod dut;
pub mod engine;
pub mod registers;
pub mod remote;

pub use attack::{AttackConstraints, AttackReport};
pub use dut::{AnfFunction, FaultMode, FaultSet, Nlfsr, StuckFault};
pub use engine::{ConfigTemplate, Fusebox, LbistConfig, NvmRecord, TestKey, Verdict};
pub use registers::{BitVec, GaloisRegister, Gf2Poly};
