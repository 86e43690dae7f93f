//! Protocol robustness on a lossy simulated network: frames are dropped,
//! duplicated, and delayed, the manager retransmits and times out, and the
//! session log stays consistent.
//!
//! ```bash
//! cargo run --example lossy_network
//! ```

use lbist::dut::Nlfsr;
use lbist::engine::ConfigTemplate;
use lbist::remote::{
    simnet_run, DeviceAgent, DeviceModel, ManagerConfig, Message, NetConditions, Scenario,
    SchedulePolicy, Script, ScriptAction, SessionOutcome, TestManager,
};

fn run(conditions: NetConditions) -> lbist::remote::Simulation {
    let mut manager = TestManager::new(ManagerConfig {
        timeout: 5,
        retries: 2,
        schedule: SchedulePolicy::Manual,
        secret: 99,
        ..ManagerConfig::default()
    });
    manager.register_model(1, DeviceModel::sample_4bit());
    // Enrolled out of band, as a persisted registry would be.
    for id in 1u32..=3 {
        manager.handle_message(
            id,
            &Message::Hello {
                device_id: id,
                model_id: 1,
                width: 4,
            },
            0,
        );
    }
    let agents = (1u32..=3)
        .map(|id| DeviceAgent::new(id, 1, Nlfsr::sample_4bit(), ConfigTemplate::sample_4bit()))
        .collect();

    let mut script = Script::new(1540);
    for k in 0..50u64 {
        script = script.at(
            5 + k * 30,
            ScriptAction::StartTest {
                device: (k % 3) as u32 + 1,
                scenario: Scenario::SignatureReport,
            },
        );
    }
    simnet_run(manager, agents, conditions, script)
}

fn main() {
    let conditions = NetConditions {
        drop_probability: 0.3,
        duplicate_probability: 0.2,
        delay_min: 0,
        delay_max: 2,
        rng_seed: 6,
    };
    println!(
        "50 sessions over 3 devices, drop {:.0}%, duplicate {:.0}%, delay {}..{} ticks, timeout 5, 2 retries\n",
        conditions.drop_probability * 100.0,
        conditions.duplicate_probability * 100.0,
        conditions.delay_min,
        conditions.delay_max
    );

    let sim = run(conditions);
    let stats = |o: SessionOutcome| {
        sim.manager()
            .sessions()
            .values()
            .filter(|s| s.outcome == Some(o))
            .count()
    };
    let drops = sim.trace().iter().filter(|l| l.contains("drop")).count();
    let dups = sim
        .trace()
        .iter()
        .filter(|l| l.contains("send-dup"))
        .count();
    let retransmits = sim
        .trace()
        .iter()
        .filter(|l| l.contains("send manager") && l.contains("TEST_INIT"))
        .count()
        .saturating_sub(50);

    println!(
        "wire activity: {drops} frames dropped, {dups} duplicated, ~{retransmits} retransmissions"
    );
    println!(
        "outcomes: {} PASS, {} FAIL, {} TIMEOUT",
        stats(SessionOutcome::Pass),
        stats(SessionOutcome::Fail),
        stats(SessionOutcome::Timeout)
    );

    // Compare completed sessions against a lossless reference run.
    let reference = run(NetConditions::default());
    let mismatches = sim
        .manager()
        .sessions()
        .values()
        .filter(|s| s.outcome != Some(SessionOutcome::Timeout))
        .filter(|s| reference.manager().sessions()[&s.session_id].outcome != s.outcome)
        .count();
    println!("completed outcomes differing from the lossless reference: {mismatches}");
    assert_eq!(mismatches, 0);
    println!("\nloss costs availability (timeouts), never verdict integrity.");
}
