//! The adversary's search: enumerate stuck-at fault assignments over the
//! device's stages and keep those whose signature collides with the golden
//! one, then relate the findings to the complexity formulas.
//!
//! ```bash
//! cargo run --example attack_search
//! ```

use lbist::attack::{
    enumerate_aliasing_faults, expected_trials, guess_probability, AttackConstraints,
};
use lbist::dut::{FaultMode, Nlfsr};
use lbist::engine::LbistConfig;

fn main() {
    let dut = Nlfsr::sample_4bit();
    let cfg = LbistConfig::sample_4bit();

    println!("single-fault search over all 4 stages:");
    let single = enumerate_aliasing_faults(
        &dut,
        &cfg,
        &AttackConstraints::all_stages(&dut, 1, FaultMode::CaptureOnly),
    )
    .unwrap();
    print!("{}", single.render_table());

    println!("\nfull search up to 4 simultaneous faults:");
    let full = enumerate_aliasing_faults(
        &dut,
        &cfg,
        &AttackConstraints::all_stages(&dut, 4, FaultMode::CaptureOnly),
    )
    .unwrap();
    print!("{}", full.render_table());

    println!("\ncomplexity arithmetic:");
    println!(
        "  a {}-bit compactor gives the adversary 2^({}-1) = {} expected trials",
        cfg.misr_poly.degree(),
        cfg.misr_poly.degree(),
        expected_trials(cfg.misr_poly.degree() as u32)
    );
    println!(
        "  at production scale, a 32-bit compactor means {} expected trials",
        expected_trials(32)
    );
    for fixed in [0u32, 1, 2] {
        println!(
            "  pinning {fixed} of {} stages leaves guess probability {}",
            dut.width(),
            guess_probability(dut.width() as u32, fixed)
        );
    }
}
