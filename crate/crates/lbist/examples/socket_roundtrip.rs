//! The same manager/agent machinery over real TCP on localhost: spawns the
//! server, connects two agents (one Trojaned), lets the periodic scheduler
//! run a few cycles, and prints the resulting session log.
//!
//! ```bash
//! cargo run --example socket_roundtrip
//! ```

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use lbist::dut::{FaultMode, FaultSet, Nlfsr};
use lbist::engine::ConfigTemplate;
use lbist::remote::socket::{run_agent, SocketServer};
use lbist::remote::{
    DeviceAgent, DeviceModel, ManagerConfig, SchedulePolicy, SessionOutcome, TestManager,
};

fn main() {
    let mut manager = TestManager::new(ManagerConfig {
        schedule: SchedulePolicy::Periodic { interval: 1 },
        secret: 7,
        ..ManagerConfig::default()
    });
    manager.register_model(1, DeviceModel::sample_4bit());
    let server = SocketServer::spawn("127.0.0.1:0", manager).expect("bind localhost");
    println!("manager listening on {}\n", server.addr());

    let stop = Arc::new(AtomicBool::new(false));
    let mut handles = Vec::new();
    for (id, faults) in [
        (1u32, FaultSet::empty()),
        (3u32, FaultSet::single(1, false)),
    ] {
        let addr = server.addr();
        let stop = Arc::clone(&stop);
        handles.push(thread::spawn(move || {
            let agent =
                DeviceAgent::new(id, 1, Nlfsr::sample_4bit(), ConfigTemplate::sample_4bit())
                    .with_faults(faults, FaultMode::CaptureOnly);
            let _ = run_agent(addr, agent, None, Some(stop));
        }));
    }

    // Let a few periodic cycles run.
    let deadline = Instant::now() + Duration::from_secs(15);
    while Instant::now() < deadline {
        let done = server.with_manager(|m| {
            m.sessions()
                .values()
                .filter(|s| s.outcome.is_some())
                .count()
        });
        if done >= 6 {
            break;
        }
        thread::sleep(Duration::from_millis(200));
    }

    println!("session log:");
    server.with_manager(|m| {
        for line in m.log() {
            println!("  {line}");
        }
        let fails = m
            .sessions()
            .values()
            .filter(|s| s.device_id == 3 && s.outcome == Some(SessionOutcome::Fail))
            .count();
        println!("\ndevice 3 carries the tuned Trojan: {fails} FAIL(s) once fresh seeds arrive");
    });

    stop.store(true, Ordering::SeqCst);
    server.stop();
    for h in handles {
        let _ = h.join();
    }
}
