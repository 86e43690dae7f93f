//! Devices under test: NLFSRs defined by algebraic-normal-form feedback
//! functions, plus the stuck-at fault overlay used to model dopant-level
//! Trojans.
//!
//! A device is a bank of `n` stages, each with its own feedback function over
//! the current state. One clock applies all feedbacks simultaneously against
//! the unmodified input state. A stuck-at fault pins one stage to a constant;
//! [`FaultMode`] controls whether the pin applies only to the captured
//! next-state bit or also to what the feedback logic reads.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::registers::BitVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DutError {
    #[error("stage index {index} out of range for width {width}")]
    StageOutOfRange { index: usize, width: usize },
    #[error("state width {got} does not match device width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("duplicate monomial in feedback function")]
    DuplicateMonomial,
    #[error("duplicate fault on stage {0}")]
    DuplicateFaultStage(usize),
    #[error("device model parse error: {0}")]
    ModelParse(String),
    #[error("fault list parse error: {0}")]
    FaultParse(String),
}

/// Boolean function in algebraic normal form: an XOR of AND-monomials.
///
/// Each monomial is a set of stage indices; the empty monomial is the
/// constant 1, and a function with no terms evaluates to 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnfFunction {
    terms: BTreeSet<BTreeSet<usize>>,
}

impl AnfFunction {
    pub fn new<I, T>(terms: I) -> Result<Self, DutError>
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = usize>,
    {
        let mut set = BTreeSet::new();
        for term in terms {
            let monomial: BTreeSet<usize> = term.into_iter().collect();
            if !set.insert(monomial) {
                return Err(DutError::DuplicateMonomial);
            }
        }
        Ok(AnfFunction { terms: set })
    }

    /// Parses expressions like `x2 + x0*x1`, `1`, or `0` (no terms).
    pub fn parse(text: &str) -> Result<Self, DutError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(DutError::ModelParse("empty feedback expression".into()));
        }
        if text == "0" {
            return Self::new(Vec::<Vec<usize>>::new());
        }
        let mut terms: Vec<Vec<usize>> = Vec::new();
        for raw_term in text.split('+') {
            let term = raw_term.trim();
            if term == "1" {
                terms.push(Vec::new());
                continue;
            }
            let mut vars = Vec::new();
            for raw_var in term.split('*') {
                let var = raw_var.trim();
                let idx = var
                    .strip_prefix('x')
                    .and_then(|rest| rest.parse::<usize>().ok())
                    .ok_or_else(|| {
                        DutError::ModelParse(format!("bad variable '{var}' in term '{term}'"))
                    })?;
                vars.push(idx);
            }
            terms.push(vars);
        }
        Self::new(terms)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter_map(|t| t.iter().max().copied())
            .max()
    }

    /// XOR over terms of the AND over each term's variables.
    pub fn eval(&self, state: &BitVec) -> Result<bool, DutError> {
        if let Some(max) = self.max_index() {
            if max >= state.width() {
                return Err(DutError::StageOutOfRange {
                    index: max,
                    width: state.width(),
                });
            }
        }
        let mut acc = false;
        for term in &self.terms {
            acc ^= term.iter().all(|&i| state.get(i));
        }
        Ok(acc)
    }
}

impl fmt::Display for AnfFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for term in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            if term.is_empty() {
                f.write_str("1")?;
            } else {
                let vars: Vec<String> = term.iter().map(|i| format!("x{i}")).collect();
                f.write_str(&vars.join("*"))?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Nonlinear feedback shift register: one feedback function per stage, all
/// stages updated simultaneously from the current state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Nlfsr {
    feedbacks: Vec<AnfFunction>,
}

impl Nlfsr {
    pub fn new(feedbacks: Vec<AnfFunction>) -> Result<Self, DutError> {
        let width = feedbacks.len();
        if width == 0 {
            return Err(DutError::ModelParse(
                "device must have at least one stage".into(),
            ));
        }
        for f in &feedbacks {
            if let Some(max) = f.max_index() {
                if max >= width {
                    return Err(DutError::StageOutOfRange { index: max, width });
                }
            }
        }
        Ok(Nlfsr { feedbacks })
    }

    /// The built-in 4-stage sample device used across the examples and the
    /// test fixtures. It cycles through the fifteen nonzero 4-bit values.
    pub fn sample_4bit() -> Nlfsr {
        Nlfsr::parse_model(SAMPLE_4BIT_MODEL).expect("built-in model parses")
    }

    /// Parses the device model text format:
    ///
    /// ```text
    /// width 4
    /// x1
    /// x2 + x0*x1
    /// x3 + x0*x1
    /// x0 + x1
    /// ```
    ///
    /// One feedback expression per stage, stage 0 first. Blank lines and
    /// `#` comments are skipped.
    pub fn parse_model(text: &str) -> Result<Self, DutError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| DutError::ModelParse("empty model".into()))?;
        let width: usize = header
            .strip_prefix("width")
            .map(str::trim)
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| {
                DutError::ModelParse(format!("expected 'width <n>' header, got '{header}'"))
            })?;
        let feedbacks: Vec<AnfFunction> =
            lines.map(AnfFunction::parse).collect::<Result<_, _>>()?;
        if feedbacks.len() != width {
            return Err(DutError::ModelParse(format!(
                "model declares width {width} but lists {} feedback functions",
                feedbacks.len()
            )));
        }
        Self::new(feedbacks)
    }

    pub fn width(&self) -> usize {
        self.feedbacks.len()
    }

    pub fn feedbacks(&self) -> &[AnfFunction] {
        &self.feedbacks
    }

    /// One fault-free transition: bit `i` of the result is `f_i(state)`,
    /// every feedback evaluated against the unmodified input state.
    pub fn next(&self, state: &BitVec) -> Result<BitVec, DutError> {
        if state.width() != self.width() {
            return Err(DutError::WidthMismatch {
                expected: self.width(),
                got: state.width(),
            });
        }
        let bits: Vec<bool> = self
            .feedbacks
            .iter()
            .map(|f| f.eval(state))
            .collect::<Result<_, _>>()?;
        Ok(BitVec::new(bits).expect("width >= 1"))
    }

    /// Device model rendered back to the text format.
    pub fn to_model_text(&self) -> String {
        let mut out = format!("width {}\n", self.width());
        for f in &self.feedbacks {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }
}

/// Model text for [`Nlfsr::sample_4bit`].
pub const SAMPLE_4BIT_MODEL: &str = "\
width 4
x1
x2 + x0*x1
x3 + x0*x1
x0 + x1
";

/// A single stage pinned to a constant value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct StuckFault {
    pub stage: usize,
    pub value: bool,
}

impl fmt::Display for StuckFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}:={}", self.stage, self.value as u8)
    }
}

/// A set of stuck-at faults, at most one per stage.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct FaultSet {
    faults: BTreeMap<usize, bool>,
}

impl FaultSet {
    pub fn empty() -> FaultSet {
        FaultSet::default()
    }

    pub fn new<I: IntoIterator<Item = StuckFault>>(faults: I) -> Result<Self, DutError> {
        let mut map = BTreeMap::new();
        for f in faults {
            if map.insert(f.stage, f.value).is_some() {
                return Err(DutError::DuplicateFaultStage(f.stage));
            }
        }
        Ok(FaultSet { faults: map })
    }

    pub fn single(stage: usize, value: bool) -> FaultSet {
        FaultSet {
            faults: BTreeMap::from([(stage, value)]),
        }
    }

    /// Parses `s1:=0,s3:=1`. The empty string is the empty set.
    pub fn parse(text: &str) -> Result<Self, DutError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(FaultSet::empty());
        }
        let mut faults = Vec::new();
        for raw in text.split(',') {
            let item = raw.trim();
            let (stage_part, value_part) = item.split_once(":=").ok_or_else(|| {
                DutError::FaultParse(format!("expected 's<i>:=<0|1>', got '{item}'"))
            })?;
            let stage = stage_part
                .trim()
                .strip_prefix('s')
                .and_then(|rest| rest.parse::<usize>().ok())
                .ok_or_else(|| DutError::FaultParse(format!("bad stage in '{item}'")))?;
            let value = match value_part.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(DutError::FaultParse(format!(
                        "stuck value must be 0 or 1, got '{other}'"
                    )))
                }
            };
            faults.push(StuckFault { stage, value });
        }
        Self::new(faults)
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = StuckFault> + '_ {
        self.faults
            .iter()
            .map(|(&stage, &value)| StuckFault { stage, value })
    }

    pub fn max_stage(&self) -> Option<usize> {
        self.faults.keys().max().copied()
    }

    fn apply(&self, state: &BitVec) -> BitVec {
        let mut out = state.clone();
        for (&stage, &value) in &self.faults {
            out.set(stage, value);
        }
        out
    }
}

impl fmt::Display for FaultSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.faults.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.iter().map(|sf| sf.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Where the stuck value takes effect during a test cycle.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum FaultMode {
    /// The stuck value overrides the captured next-state bit only; feedback
    /// logic reads the loaded pattern unmodified. This is the default and
    /// the mode that reproduces the reference trace.
    #[default]
    CaptureOnly,
    /// The stuck value also corrupts what the feedback logic reads, as a
    /// physically stuck flip-flop output would.
    ReadAndCapture,
}

impl FaultMode {
    pub fn parse(text: &str) -> Result<Self, DutError> {
        match text.trim() {
            "capture-only" => Ok(FaultMode::CaptureOnly),
            "read-and-capture" => Ok(FaultMode::ReadAndCapture),
            other => Err(DutError::FaultParse(format!(
                "unknown fault mode '{other}' (expected capture-only or read-and-capture)"
            ))),
        }
    }
}

impl fmt::Display for FaultMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultMode::CaptureOnly => "capture-only",
            FaultMode::ReadAndCapture => "read-and-capture",
        })
    }
}

/// Response of the (possibly faulty) device to one test pattern.
///
/// The pattern is loaded wholesale as the device state and exactly one
/// transition is computed. An empty fault set reduces to [`Nlfsr::next`] in
/// both modes.
pub fn faulty_response(
    dut: &Nlfsr,
    pattern: &BitVec,
    faults: &FaultSet,
    mode: FaultMode,
) -> Result<BitVec, DutError> {
    if let Some(max) = faults.max_stage() {
        if max >= dut.width() {
            return Err(DutError::StageOutOfRange {
                index: max,
                width: dut.width(),
            });
        }
    }
    match mode {
        FaultMode::CaptureOnly => {
            let next = dut.next(pattern)?;
            Ok(faults.apply(&next))
        }
        FaultMode::ReadAndCapture => {
            let read = faults.apply(pattern);
            let next = dut.next(&read)?;
            Ok(faults.apply(&next))
        }
    }
}
