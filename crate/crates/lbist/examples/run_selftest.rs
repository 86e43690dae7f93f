//! Run one LBIST cycle on the sample 4-stage device and print the per-cycle
//! trace: patterns from the LFSR, device responses, MISR states, and the
//! final signature.
//!
//! ```bash
//! cargo run --example run_selftest
//! ```

use lbist::dut::{FaultMode, FaultSet, Nlfsr};
use lbist::engine::{decide, golden_signature, run_trace, LbistConfig};

fn main() {
    let dut = Nlfsr::sample_4bit();
    let cfg = LbistConfig::sample_4bit();

    println!("device under test:");
    for line in dut.to_model_text().lines() {
        println!("  {line}");
    }
    println!(
        "PRPG {} seed {}, MISR {} init {}, {} patterns\n",
        cfg.prpg_poly, cfg.prpg_seed, cfg.misr_poly, cfg.misr_init, cfg.pattern_count
    );

    let trace = run_trace(&dut, &cfg, &FaultSet::empty(), FaultMode::CaptureOnly).unwrap();
    print!("{}", trace.render_table());

    let expected = golden_signature(&dut, &cfg).unwrap();
    let verdict = decide(&trace.signature, &expected).unwrap();
    println!(
        "\nverdict: {} (computed {}, expected {})",
        verdict.outcome, verdict.computed, verdict.expected
    );
}
