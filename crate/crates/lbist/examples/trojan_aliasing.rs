//! The aliasing collision: a stuck-at fault at stage 1 changes half of the
//! device's responses, yet the compacted signature comes out identical to
//! the fault-free one, so the self-test passes a sabotaged device.
//!
//! ```bash
//! cargo run --example trojan_aliasing
//! ```

use lbist::dut::{FaultMode, FaultSet, Nlfsr};
use lbist::engine::{run_trace, LbistConfig};

fn main() {
    let dut = Nlfsr::sample_4bit();
    let cfg = LbistConfig::sample_4bit();

    let clean = run_trace(&dut, &cfg, &FaultSet::empty(), FaultMode::CaptureOnly).unwrap();
    let trojan = FaultSet::single(1, false);
    let faulty = run_trace(&dut, &cfg, &trojan, FaultMode::CaptureOnly).unwrap();

    println!("side by side, fault-free vs stage 1 stuck at 0:\n");
    println!("cycle  pattern  response  misr   |  response  misr");
    let mut diffs = 0;
    for (i, (c, f)) in clean.rows.iter().zip(&faulty.rows).enumerate() {
        let mark = if c.response != f.response {
            diffs += 1;
            "  <- differs"
        } else {
            ""
        };
        println!(
            "{:<5}  {:<7}  {:<8}  {:<4}   |  {:<8}  {:<4}{}",
            i + 1,
            c.pattern,
            c.response,
            c.misr,
            f.response,
            f.misr,
            mark
        );
    }
    println!(
        "\n{} of {} responses differ, yet both signatures are {}",
        diffs,
        clean.rows.len(),
        clean.signature
    );
    assert_eq!(clean.signature, faulty.signature);
    println!("the self-test cannot tell the sabotaged device apart: it aliases");

    // Not every fault hides this well.
    let caught = run_trace(
        &dut,
        &cfg,
        &FaultSet::single(0, false),
        FaultMode::CaptureOnly,
    )
    .unwrap();
    println!(
        "\nfor contrast, stage 0 stuck at 0 yields signature {} != {} and is caught",
        caught.signature, clean.signature
    );
}
