//! Two-spin pulse simulation: ideal RF rotations and J-coupling delays in
//! the rotating frame, time-ordered sequence products, the built-in
//! sequences, and an exhaustive search over sign/labeling conventions that
//! checks which choices make each sequence implement its target.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operators::UnitaryMatrix;
use crate::state::fidelity_up_to_global_phase;

/// A sequence validates a target when its fidelity clears this line.
pub const VALIDATION_THRESHOLD: f64 = 1.0 - 1e-10;

/// Spin count plus the scalar J coupling. J's magnitude never enters the
/// math — delays are stored as dimensionless multiples of 1/J — so it only
/// matters whether a coupling is defined at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSystem {
    spins: usize,
    j_hz: Option<f64>,
}

impl SpinSystem {
    pub fn new(spins: usize, j_hz: Option<f64>) -> Result<Self> {
        if spins == 0 {
            return Err(Error::NoVariables);
        }
        if let Some(j) = j_hz {
            if j <= 0.0 || !j.is_finite() {
                return Err(Error::NonPositiveCoupling { value: j });
            }
        }
        Ok(SpinSystem { spins, j_hz })
    }

    /// The experiment's arrangement: two coupled spins.
    pub fn coupled_pair() -> Self {
        SpinSystem {
            spins: 2,
            j_hz: Some(1.0),
        }
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn j_hz(&self) -> Option<f64> {
        self.j_hz
    }

    pub fn dim(&self) -> usize {
        1usize << self.spins
    }
}

/// Rotation axis in the transverse plane, sign folded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl Axis {
    /// (sign, is_y)
    fn decompose(self) -> (f64, bool) {
        match self {
            Axis::PlusX => (1.0, false),
            Axis::MinusX => (-1.0, false),
            Axis::PlusY => (1.0, true),
            Axis::MinusY => (-1.0, true),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::PlusX => "x",
            Axis::MinusX => "-x",
            Axis::PlusY => "y",
            Axis::MinusY => "-y",
        };
        f.write_str(s)
    }
}

/// Only quarter and half turns appear in the sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseAngle {
    HalfPi,
    Pi,
}

impl PulseAngle {
    pub fn radians(self) -> f64 {
        match self {
            PulseAngle::HalfPi => std::f64::consts::FRAC_PI_2,
            PulseAngle::Pi => std::f64::consts::PI,
        }
    }

    fn degrees(self) -> u32 {
        match self {
            PulseAngle::HalfPi => 90,
            PulseAngle::Pi => 180,
        }
    }
}

/// One step of a sequence: an RF rotation on one spin, or free evolution
/// under the J coupling for a given multiple of 1/J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseEvent {
    Rf {
        /// 1-based pulse subscript, mapped to a qubit by the conventions.
        spin: usize,
        axis: Axis,
        angle: PulseAngle,
    },
    Delay {
        /// Duration as a multiple of 1/J.
        multiple: f64,
    },
}

impl PulseEvent {
    pub fn rf(spin: usize, axis: Axis, angle: PulseAngle) -> Result<Self> {
        if spin == 0 {
            return Err(Error::SpinOutOfRange { spin, spins: 0 });
        }
        Ok(PulseEvent::Rf { spin, axis, angle })
    }

    pub fn delay(multiple: f64) -> Result<Self> {
        if !multiple.is_finite() || multiple <= 0.0 {
            return Err(Error::InvalidDelay { value: multiple });
        }
        Ok(PulseEvent::Delay { multiple })
    }
}

impl fmt::Display for PulseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseEvent::Rf { spin, axis, angle } => {
                write!(f, "{axis}{spin}/{}", angle.degrees())
            }
            PulseEvent::Delay { multiple } => write!(f, "d/{multiple}"),
        }
    }
}

fn parse_event(token: &str) -> Result<PulseEvent> {
    let invalid = |reason: &str| Error::InvalidPulse {
        token: token.to_string(),
        reason: reason.to_string(),
    };
    if let Some(rest) = token.strip_prefix("d/") {
        let multiple: f64 = rest
            .parse()
            .map_err(|_| invalid("delay multiple must be a number"))?;
        if !multiple.is_finite() || multiple <= 0.0 {
            return Err(Error::InvalidDelay { value: multiple });
        }
        return Ok(PulseEvent::Delay { multiple });
    }
    let (body, angle_text) = token
        .split_once('/')
        .ok_or(invalid("expected <axis><spin>/<degrees> or d/<multiple>"))?;
    let angle = match angle_text {
        "90" => PulseAngle::HalfPi,
        "180" => PulseAngle::Pi,
        _ => return Err(invalid("angle must be 90 or 180")),
    };
    let (negated, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body),
    };
    let (axis_char, spin_text) = {
        let mut chars = body.chars();
        let first = chars.next().ok_or(invalid("missing axis"))?;
        (first, chars.as_str())
    };
    let axis = match (axis_char, negated) {
        ('x', false) => Axis::PlusX,
        ('x', true) => Axis::MinusX,
        ('y', false) => Axis::PlusY,
        ('y', true) => Axis::MinusY,
        _ => return Err(invalid("axis must be x or y")),
    };
    let spin: usize = spin_text
        .parse()
        .map_err(|_| invalid("spin subscript must be an integer"))?;
    if spin == 0 {
        return Err(invalid("spin subscript starts at 1"));
    }
    Ok(PulseEvent::Rf { spin, axis, angle })
}

/// A nonempty, time-ordered list of events (first event acts first).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    events: Vec<PulseEvent>,
}

impl PulseSequence {
    pub fn new(events: Vec<PulseEvent>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(PulseSequence { events })
    }

    pub fn events(&self) -> &[PulseEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for PulseSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let events = s
            .split_whitespace()
            .map(parse_event)
            .collect::<Result<Vec<_>>>()?;
        PulseSequence::new(events)
    }
}

impl Serialize for PulseSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Exponent sign choice for rotations and coupling evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-",
            Sign::Plus => "+",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// How pulse subscripts land on qubits. Qubit 1 is the most significant
/// bit, matching assignment order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinLabelMap {
    /// Subscript k drives qubit k.
    Identity,
    /// Subscripts 1 and 2 exchange qubits; higher subscripts unchanged.
    Swapped,
}

impl SpinLabelMap {
    fn qubit_for(self, spin: usize) -> usize {
        match (self, spin) {
            (SpinLabelMap::Swapped, 1) => 2,
            (SpinLabelMap::Swapped, 2) => 1,
            (_, s) => s,
        }
    }
}

impl fmt::Display for SpinLabelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinLabelMap::Identity => "identity",
            SpinLabelMap::Swapped => "swapped",
        })
    }
}

impl Serialize for SpinLabelMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// One point in the convention space the sequences never pin down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Conventions {
    pub pulse_sign: Sign,
    pub coupling_sign: Sign,
    pub label_map: SpinLabelMap,
}

impl Conventions {
    /// All 8 combinations in a fixed nested order: pulse sign slowest,
    /// label map fastest.
    pub fn all() -> [Conventions; 8] {
        let mut out = [Conventions::default(); 8];
        let mut i = 0;
        for pulse_sign in [Sign::Minus, Sign::Plus] {
            for coupling_sign in [Sign::Minus, Sign::Plus] {
                for label_map in [SpinLabelMap::Identity, SpinLabelMap::Swapped] {
                    out[i] = Conventions {
                        pulse_sign,
                        coupling_sign,
                        label_map,
                    };
                    i += 1;
                }
            }
        }
        out
    }
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            pulse_sign: Sign::Minus,
            coupling_sign: Sign::Minus,
            label_map: SpinLabelMap::Identity,
        }
    }
}

impl fmt::Display for Conventions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(pulse {}, coupling {}, labels {})",
            self.pulse_sign, self.coupling_sign, self.label_map
        )
    }
}

fn pauli(is_y: bool) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    if is_y {
        DMatrix::from_row_slice(
            2,
            2,
            &[o, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), o],
        )
    } else {
        DMatrix::from_row_slice(
            2,
            2,
            &[o, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), o],
        )
    }
}

/// exp(pulse_sign * i * angle * axis_sign * sigma/2)
/// = cos(angle/2) * I + pulse_sign * axis_sign * i * sin(angle/2) * sigma.
fn rotation_2x2(axis: Axis, angle: PulseAngle, pulse_sign: Sign) -> DMatrix<Complex64> {
    let (axis_sign, is_y) = axis.decompose();
    let half = angle.radians() / 2.0;
    let sigma = pauli(is_y);
    let eye = DMatrix::identity(2, 2);
    let coeff = Complex64::new(0.0, pulse_sign.factor() * axis_sign * half.sin());
    eye * Complex64::new(half.cos(), 0.0) + sigma * coeff
}

/// The unitary for one event on the full register.
pub fn event_unitary(
    event: &PulseEvent,
    sys: &SpinSystem,
    conventions: &Conventions,
) -> Result<UnitaryMatrix> {
    match *event {
        PulseEvent::Rf { spin, axis, angle } => {
            let qubit = conventions.label_map.qubit_for(spin);
            if qubit == 0 || qubit > sys.spins() {
                return Err(Error::SpinOutOfRange {
                    spin,
                    spins: sys.spins(),
                });
            }
            let rot = rotation_2x2(axis, angle, conventions.pulse_sign);
            let mut full = DMatrix::identity(1, 1);
            for q in 1..=sys.spins() {
                let factor = if q == qubit {
                    rot.clone()
                } else {
                    DMatrix::identity(2, 2)
                };
                full = full.kronecker(&factor);
            }
            Ok(UnitaryMatrix::from_trusted(full))
        }
        PulseEvent::Delay { multiple } => {
            if !multiple.is_finite() || multiple <= 0.0 {
                return Err(Error::InvalidDelay { value: multiple });
            }
            // Pairwise Iz x Iz coupling: defined for exactly two spins with
            // J set.
            if sys.spins() != 2 || sys.j_hz().is_none() {
                return Err(Error::UndefinedCoupling);
            }
            // exp(coupling_sign * i * 2 pi * multiple * Iz x Iz) with
            // Iz x Iz = diag(1,-1,-1,1)/4.
            let quarter_turns =
                conventions.coupling_sign.factor() * 2.0 * std::f64::consts::PI * multiple / 4.0;
            let same = Complex64::from_polar(1.0, quarter_turns);
            let diff = Complex64::from_polar(1.0, -quarter_turns);
            let mut mat = DMatrix::zeros(4, 4);
            for (i, z) in [same, diff, diff, same].into_iter().enumerate() {
                mat[(i, i)] = z;
            }
            Ok(UnitaryMatrix::from_trusted(mat))
        }
    }
}

/// Time-ordered product of a sequence's event unitaries: later events
/// multiply on the left.
pub fn sequence_unitary(
    seq: &PulseSequence,
    sys: &SpinSystem,
    conventions: &Conventions,
) -> Result<UnitaryMatrix> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut product = DMatrix::identity(sys.dim(), sys.dim());
    for event in seq.events() {
        let u = event_unitary(event, sys, conventions)?;
        product = u.as_matrix() * product;
    }
    UnitaryMatrix::new(product)
}

/// The five sequences shipped with the crate, by name.
pub const BUILTIN_SEQUENCE_NAMES: [&str; 5] =
    ["R_V1andV2", "R_V2", "Gamma_m2", "Gamma_m1", "Hadamard"];

/// Look up a built-in sequence. The text forms are the authoritative
/// transcriptions; note Gamma_m1's third pulse is +y1, not -y1.
pub fn builtin_sequence(name: &str) -> Result<PulseSequence> {
    let text = match name {
        "R_V1andV2" => "y1/90 x1/90 -y1/90 d/0.5 y2/90 x2/90 -y2/90",
        "R_V2" => "y1/90 x1/90 -y1/90",
        "Gamma_m2" => "y1/90 -x1/90 -y1/90 d/0.5 y2/90 -x2/90 -y2/90",
        "Gamma_m1" => "y1/90 x1/90 y1/90 y2/90 -x2/90 -y2/90",
        "Hadamard" => "y1/90 x1/180 y2/90 x2/180",
        _ => {
            return Err(Error::UnknownSequence {
                name: name.to_string(),
            })
        }
    };
    text.parse()
}

/// The operator each built-in sequence is meant to realize.
pub fn builtin_target(name: &str) -> Result<UnitaryMatrix> {
    match name {
        "R_V1andV2" => {
            let f: crate::sat::Formula = "1, 2".parse()?;
            Ok(crate::operators::build_r(&f)?.to_dense())
        }
        "R_V2" => {
            let f: crate::sat::Formula = "n=2; 2".parse()?;
            Ok(crate::operators::build_r(&f)?.to_dense())
        }
        "Gamma_m2" => Ok(crate::operators::build_gamma(2, 2)?.to_dense()),
        "Gamma_m1" => Ok(crate::operators::build_gamma(2, 1)?.to_dense()),
        "Hadamard" => crate::operators::build_w(2),
        _ => Err(Error::UnknownTarget {
            name: name.to_string(),
        }),
    }
}

/// Fidelity of one convention combination against the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConventionRow {
    pub conventions: Conventions,
    pub fidelity: f64,
    pub validates: bool,
}

/// Fidelities for all 8 convention combinations, in `Conventions::all`
/// order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionReport {
    pub sequence: String,
    pub rows: Vec<ConventionRow>,
}

impl ConventionReport {
    /// Combinations clearing the validation threshold, in report order.
    pub fn validating_set(&self) -> Vec<Conventions> {
        self.rows
            .iter()
            .filter(|r| r.validates)
            .map(|r| r.conventions)
            .collect()
    }

    /// Highest-fidelity row (first on ties).
    pub fn best(&self) -> &ConventionRow {
        self.rows
            .iter()
            .reduce(|best, r| if r.fidelity > best.fidelity { r } else { best })
            .expect("report always has 8 rows")
    }
}

/// Evaluate a sequence against a target under all 8 convention
/// combinations on the coupled pair.
pub fn convention_search(seq: &PulseSequence, target: &UnitaryMatrix) -> Result<ConventionReport> {
    let sys = SpinSystem::coupled_pair();
    if target.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            left: target.dim(),
            right: sys.dim(),
        });
    }
    let mut rows = Vec::with_capacity(8);
    for conventions in Conventions::all() {
        let u = sequence_unitary(seq, &sys, &conventions)?;
        let fidelity = fidelity_up_to_global_phase(&u, target)?;
        rows.push(ConventionRow {
            conventions,
            fidelity,
            validates: fidelity >= VALIDATION_THRESHOLD,
        });
    }
    Ok(ConventionReport {
        sequence: seq.to_string(),
        rows,
    })
}
