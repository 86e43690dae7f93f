//! The adversary's toolbox: exhaustive search for stuck-at fault sets whose
//! signature collides with the golden one, plus the aliasing-probability and
//! attack-complexity arithmetic.
//!
//! The search enumerates every fault assignment over the candidate stages up
//! to the requested size, simulates each, and keeps the ones that alias. The
//! space is partitioned and simulated in parallel; findings are always
//! reported in a fixed order (ascending fault count, then lexicographic)
//! regardless of schedule.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::dut::{FaultMode, FaultSet, Nlfsr, StuckFault};
use crate::engine::{golden_signature, run_lbist, EngineError, LbistConfig};
use crate::registers::{misr_signature, BitVec, Gf2Poly, RegisterError};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Register(#[from] RegisterError),
    #[error("enumeration space {space} exceeds cap {cap}")]
    SpaceCapExceeded { space: u64, cap: u64 },
    #[error("exhaustive enumeration of {bits} stream bits exceeds the cap of {cap}")]
    StreamCapExceeded { bits: u32, cap: u32 },
    #[error("candidate stage {index} out of range for width {width}")]
    StageOutOfRange { index: usize, width: usize },
}

/// Probability of the form `1 / 2^k`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Dyadic {
    log2_denominator: u32,
}

impl Dyadic {
    pub fn new(log2_denominator: u32) -> Dyadic {
        Dyadic { log2_denominator }
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_denominator
    }

    pub fn as_f64(&self) -> f64 {
        2f64.powi(-(self.log2_denominator as i32))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_denominator < 64 {
            write!(f, "1/{}", 1u64 << self.log2_denominator)
        } else {
            write!(f, "2^-{}", self.log2_denominator)
        }
    }
}

/// Exact fraction with u128 terms, kept in lowest form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fraction {
    numerator: u128,
    denominator: u128,
}

impl Fraction {
    pub fn new(numerator: u128, denominator: u128) -> Fraction {
        assert!(denominator != 0, "zero denominator");
        let g = gcd(numerator, denominator);
        Fraction {
            numerator: numerator / g,
            denominator: denominator / g,
        }
    }

    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    pub fn denominator(&self) -> u128 {
        self.denominator
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// What the adversary is allowed to touch.
#[derive(Clone, Debug)]
pub struct AttackConstraints {
    /// Stages the adversary may pin. Order is irrelevant; duplicates ignored.
    pub candidate_stages: Vec<usize>,
    /// Largest number of simultaneously pinned stages.
    pub max_faults: usize,
    pub mode: FaultMode,
    /// Upper bound on the number of fault assignments that may be
    /// enumerated; the search refuses rather than run past it.
    pub space_cap: u64,
}

impl AttackConstraints {
    pub const DEFAULT_SPACE_CAP: u64 = 1 << 20;

    pub fn new(candidate_stages: Vec<usize>, max_faults: usize, mode: FaultMode) -> Self {
        AttackConstraints {
            candidate_stages,
            max_faults,
            mode,
            space_cap: Self::DEFAULT_SPACE_CAP,
        }
    }

    /// All stages of the device, both polarities.
    pub fn all_stages(dut: &Nlfsr, max_faults: usize, mode: FaultMode) -> Self {
        Self::new((0..dut.width()).collect(), max_faults, mode)
    }
}

/// One aliasing fault set found by the search, with the guess probability
/// the corresponding Trojan would grant the adversary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliasingSet {
    pub faults: FaultSet,
    pub signature: BitVec,
    pub guess_probability: Dyadic,
}

/// Search outcome. `trials_simulated` is the full enumerated space, and
/// `first_hit_index` the zero-based position of the first aliasing
/// assignment in enumeration order, when one exists.
#[derive(Clone, Debug)]
pub struct AttackReport {
    pub golden: BitVec,
    pub dut_width: usize,
    pub aliasing_sets: Vec<AliasingSet>,
    pub trials_simulated: u64,
    pub first_hit_index: Option<u64>,
}

impl AttackReport {
    pub fn found(&self) -> bool {
        !self.aliasing_sets.is_empty()
    }

    /// Human-readable table.
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "golden signature {}  trials {}  aliasing sets {}\n",
            self.golden,
            self.trials_simulated,
            self.aliasing_sets.len()
        );
        if let Some(idx) = self.first_hit_index {
            out.push_str(&format!("first hit at enumeration index {idx}\n"));
        }
        if !self.aliasing_sets.is_empty() {
            out.push_str("faults                     signature  guess-probability\n");
            for set in &self.aliasing_sets {
                out.push_str(&format!(
                    "{:<25}  {:<9}  {}\n",
                    set.faults.to_string(),
                    set.signature,
                    set.guess_probability
                ));
            }
        }
        out
    }

    /// Machine-readable line format, byte-stable across runs.
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for set in &self.aliasing_sets {
            out.push_str(&format!(
                "aliasing faults={} signature={} p={}\n",
                set.faults, set.signature, set.guess_probability
            ));
        }
        out.push_str(&format!(
            "summary golden={} trials={} found={} first_hit={}\n",
            self.golden,
            self.trials_simulated,
            self.aliasing_sets.len(),
            self.first_hit_index
                .map(|i| i.to_string())
                .unwrap_or_else(|| "-".into()),
        ));
        out
    }
}

/// Size of the enumeration space: sum over j of C(m, j) * 2^j for
/// j = 1 ..= max_faults.
pub fn enumeration_space(candidate_count: usize, max_faults: usize) -> u64 {
    let mut total: u64 = 0;
    for j in 1..=max_faults.min(candidate_count) {
        total =
            total.saturating_add(binomial(candidate_count as u64, j as u64).saturating_mul(1 << j));
    }
    total
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Enumerates every fault set over the candidate stages with 1..=max_faults
/// pinned stages and every stuck-value polarity, and returns exactly those
/// whose signature equals the fault-free one.
pub fn enumerate_aliasing_faults(
    dut: &Nlfsr,
    cfg: &LbistConfig,
    constraints: &AttackConstraints,
) -> Result<AttackReport, AttackError> {
    let golden = golden_signature(dut, cfg)?;

    let mut stages: Vec<usize> = constraints.candidate_stages.clone();
    stages.sort_unstable();
    stages.dedup();
    for &s in &stages {
        if s >= dut.width() {
            return Err(AttackError::StageOutOfRange {
                index: s,
                width: dut.width(),
            });
        }
    }
    let max_faults = constraints.max_faults.min(stages.len());

    let space = enumeration_space(stages.len(), max_faults);
    if space > constraints.space_cap {
        return Err(AttackError::SpaceCapExceeded {
            space,
            cap: constraints.space_cap,
        });
    }

    // Materialize the assignments in report order: ascending fault count,
    // then lexicographic over (stage, value) pairs.
    let mut assignments: Vec<FaultSet> = Vec::with_capacity(space as usize);
    for j in 1..=max_faults {
        for combo in combinations(&stages, j) {
            for v in 0..(1u64 << j) {
                let faults =
                    FaultSet::new(combo.iter().enumerate().map(|(pos, &stage)| StuckFault {
                        stage,
                        value: (v >> (j - 1 - pos)) & 1 == 1,
                    }))
                    .expect("combination stages are distinct");
                assignments.push(faults);
            }
        }
    }
    debug_assert_eq!(assignments.len() as u64, space);

    let results: Vec<Option<AliasingSet>> = assignments
        .par_iter()
        .map(|faults| {
            let sig = run_lbist(dut, cfg, faults, constraints.mode).expect("widths pre-checked");
            (sig == golden).then(|| AliasingSet {
                faults: faults.clone(),
                signature: sig,
                guess_probability: Dyadic::new((dut.width() - faults.len()) as u32),
            })
        })
        .collect();

    let first_hit_index = results.iter().position(|r| r.is_some()).map(|i| i as u64);
    let aliasing_sets: Vec<AliasingSet> = results.into_iter().flatten().collect();

    Ok(AttackReport {
        golden,
        dut_width: dut.width(),
        aliasing_sets,
        trials_simulated: space,
        first_hit_index,
    })
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(
        items: &[usize],
        k: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            current.push(items[i]);
            recurse(items, k, i + 1, current, out);
            current.pop();
        }
    }
    recurse(items, k, 0, &mut current, &mut out);
    out
}

/// Average number of simulation trials an adversary needs to find an
/// aliasing assignment against a `misr_width`-bit compactor: `2^(w-1)`.
pub fn expected_trials(misr_width: u32) -> u128 {
    assert!(
        (1..=128).contains(&misr_width),
        "misr_width must be in 1..=128"
    );
    1u128 << (misr_width - 1)
}

/// Probability that the adversary guesses the device output once
/// `fixed_stages` of a `dut_width`-stage device are pinned: `1/2^(n-k)`.
pub fn guess_probability(dut_width: u32, fixed_stages: u32) -> Dyadic {
    assert!(
        fixed_stages <= dut_width,
        "cannot fix more stages than exist"
    );
    Dyadic::new(dut_width - fixed_stages)
}

/// Fraction of all `stream_length`-word error streams that compact to the
/// zero signature, measured by exhaustive enumeration.
///
/// The result is exactly `2^-n` for any degree-n connection polynomial; the
/// enumeration is capped at `n * stream_length <= 24` bits.
pub fn aliasing_fraction_exhaustive(
    misr_poly: &Gf2Poly,
    stream_length: u32,
) -> Result<Fraction, AttackError> {
    const CAP_BITS: u32 = 24;
    let n = misr_poly.degree() as u32;
    let bits = n
        .checked_mul(stream_length)
        .filter(|&b| b <= CAP_BITS)
        .ok_or(AttackError::StreamCapExceeded {
            bits: n.saturating_mul(stream_length),
            cap: CAP_BITS,
        })?;
    if stream_length == 0 {
        return Err(AttackError::StreamCapExceeded {
            bits: 0,
            cap: CAP_BITS,
        });
    }

    let zero = BitVec::zeros(n as usize).expect("degree >= 2");
    let total: u64 = 1 << bits;
    let kernel = (0..total)
        .into_par_iter()
        .filter(|&encoded| {
            let stream: Vec<BitVec> = (0..stream_length)
                .map(|w| {
                    let word = (encoded >> (w * n)) & ((1 << n) - 1);
                    BitVec::from_int(word, n as usize).expect("width >= 2")
                })
                .collect();
            misr_signature(misr_poly, &zero, &stream)
                .expect("widths match")
                .is_zero()
        })
        .count() as u128;

    Ok(Fraction::new(kernel, total as u128))
}
