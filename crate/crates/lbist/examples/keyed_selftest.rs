//! The keyed countermeasure: the PRPG seed derives from a key programmed
//! into an emulated fusebox after manufacturing, so an adversary tuning a
//! Trojan at fabrication time cannot know which signature to collide with.
//! Re-keying in the field revokes whatever the adversary tuned against.
//!
//! ```bash
//! cargo run --example keyed_selftest
//! ```

use lbist::dut::{FaultMode, FaultSet, Nlfsr};
use lbist::engine::{derive_seed, keyed_selftest, provision, ConfigTemplate, Fusebox, TestKey};
use lbist::registers::BitVec;

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let fusebox = Fusebox::at(dir.path().join("fusebox.txt"));
    let dut = Nlfsr::sample_4bit();
    let template = ConfigTemplate::sample_4bit();
    let trojan = FaultSet::single(1, false);

    // The adversary tuned the Trojan against seed 1011. Suppose the user
    // happens to program exactly that key.
    let tuned_key = TestKey::parse("1011").unwrap();
    let record = provision(&dut, &template, &tuned_key, &fusebox).unwrap();
    println!(
        "provisioned key {} -> seed {}, expected signature {}, version {}",
        record.key,
        derive_seed(&record.key, 4).unwrap(),
        record.expected_signature,
        record.version
    );
    let verdict =
        keyed_selftest(&dut, &template, &record, &trojan, FaultMode::CaptureOnly).unwrap();
    println!(
        "self-test with the tuned Trojan: {} (the attack still works under its key)\n",
        verdict.outcome
    );

    // Count how the other keys fare: the Trojan survives only the keys
    // whose derived seed it happens to alias under. Surveyed on a scratch
    // fusebox so the device's own version history stays clean.
    let scratch = Fusebox::at(dir.path().join("survey.txt"));
    let mut fooled = Vec::new();
    let mut caught = 0;
    for v in 1u64..16 {
        let key = TestKey::new(BitVec::from_int(v, 4).unwrap());
        let record = provision(&dut, &template, &key, &scratch).unwrap();
        let verdict =
            keyed_selftest(&dut, &template, &record, &trojan, FaultMode::CaptureOnly).unwrap();
        if verdict.is_pass() {
            fooled.push(key.to_string());
        } else {
            caught += 1;
        }
    }
    println!("across all 15 nonzero 4-bit keys:");
    println!("  Trojan survives under: {}", fooled.join(", "));
    println!("  Trojan caught under the other {caught} keys");

    // Re-keying in the field.
    let fresh = TestKey::parse("0111").unwrap();
    let record = provision(&dut, &template, &fresh, &fusebox).unwrap();
    let verdict =
        keyed_selftest(&dut, &template, &record, &trojan, FaultMode::CaptureOnly).unwrap();
    println!(
        "\nre-keyed to {} (version {}): self-test with the Trojan now {}s",
        fresh, record.version, verdict.outcome
    );
    println!("fusebox file: {}", fusebox.path().display());
}
