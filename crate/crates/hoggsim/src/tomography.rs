//! Nine-setting readout tomography for the coupled pair: forward signal
//! model (doublet line <-> single-quantum coherence), seeded noise
//! injection, linear least-squares reconstruction of the deviation matrix,
//! and modulus tables for plotting.
//!
//! Line model: after the readout pulse P acts, sigma = P rho P^dagger; each
//! spin's doublet line, resolved by the partner spin's state, reads the
//! matching coherence element with unit gain. Absolute spectrometer scales
//! are unknowable here, so only scale-invariant statements are meaningful.
//!
//! Identifiability: line observations see rho only modulo the identity —
//! conjugation fixes I and every read element is off-diagonal — so the
//! 72 x 16 design matrix has rank 15 with null space exactly span{I}. A
//! deviation matrix is defined up to that shift anyway; datasets therefore
//! carry the preparation's known trace, and reconstruction adds it as one
//! constraint row, restoring full rank. `design_rank_report` exposes the
//! deficiency instead of hiding it in a pseudo-inverse.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::nmr::{event_unitary, Axis, Conventions, PulseAngle, PulseEvent, SpinSystem};
use crate::operators::UnitaryMatrix;
use crate::state::{DeviationMatrix, StateOperator};

/// Readout pulse applied to one spin before acquisition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReadoutPulse {
    /// No pulse.
    E,
    /// (pi/2) about x.
    X,
    /// (pi/2) about y.
    Y,
}

impl ReadoutPulse {
    fn letter(self) -> char {
        match self {
            ReadoutPulse::E => 'E',
            ReadoutPulse::X => 'X',
            ReadoutPulse::Y => 'Y',
        }
    }
}

/// One pulse choice per spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReadoutSetting {
    pub spin1: ReadoutPulse,
    pub spin2: ReadoutPulse,
}

impl ReadoutSetting {
    /// Two-letter id, e.g. "EE", "XY".
    pub fn id(&self) -> String {
        let mut s = String::with_capacity(2);
        s.push(self.spin1.letter());
        s.push(self.spin2.letter());
        s
    }
}

impl fmt::Display for ReadoutSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl Serialize for ReadoutSetting {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The nine settings {E, x, y} x {E, x, y}, spin 1 varying slowest.
pub fn readout_settings() -> [ReadoutSetting; 9] {
    let pulses = [ReadoutPulse::E, ReadoutPulse::X, ReadoutPulse::Y];
    let mut out = [ReadoutSetting {
        spin1: ReadoutPulse::E,
        spin2: ReadoutPulse::E,
    }; 9];
    let mut i = 0;
    for spin1 in pulses {
        for spin2 in pulses {
            out[i] = ReadoutSetting { spin1, spin2 };
            i += 1;
        }
    }
    out
}

/// Line ids in canonical order: spin-1 doublet (partner 0, partner 1), then
/// spin-2 doublet.
pub const LINE_IDS: [&str; 4] = ["s1p0", "s1p1", "s2p0", "s2p1"];

/// (row, column) of sigma read by each line, same order as LINE_IDS.
const LINE_COHERENCES: [(usize, usize); 4] = [(0, 2), (1, 3), (0, 1), (2, 3)];

/// The four complex line integrals of one acquisition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntensities {
    lines: [Complex64; 4],
}

impl LineIntensities {
    pub fn new(lines: [Complex64; 4]) -> Result<Self> {
        for (i, z) in lines.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteLine { index: i });
            }
        }
        Ok(LineIntensities { lines })
    }

    pub fn lines(&self) -> &[Complex64; 4] {
        &self.lines
    }

    pub fn max_modulus(&self) -> f64 {
        self.lines.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Serialize for LineIntensities {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(4))?;
        for (id, z) in LINE_IDS.iter().zip(self.lines) {
            map.serialize_entry(id, &[z.re, z.im])?;
        }
        map.end()
    }
}

/// One acquisition: the setting and its lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DatasetEntry {
    pub setting: ReadoutSetting,
    pub lines: LineIntensities,
}

/// A complete nine-setting acquisition run. `trace` is the preparation's
/// known trace: the lines cannot see the identity component of rho, so it
/// must ride along as prior knowledge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TomographyDataset {
    entries: Vec<DatasetEntry>,
    trace: f64,
    noise_sigma: f64,
    seed: u64,
}

impl TomographyDataset {
    pub fn new(
        entries: Vec<DatasetEntry>,
        trace: f64,
        noise_sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        let expected = readout_settings();
        if entries.len() != expected.len() {
            return Err(Error::IncompleteDataset {
                have: entries.len(),
                want: expected.len(),
            });
        }
        for (entry, setting) in entries.iter().zip(expected) {
            if entry.setting != setting {
                return Err(Error::IncompleteDataset {
                    have: entries.len(),
                    want: expected.len(),
                });
            }
        }
        if !trace.is_finite() {
            return Err(Error::NonFiniteTrace { value: trace });
        }
        Ok(TomographyDataset {
            entries,
            trace,
            noise_sigma,
            seed,
        })
    }

    pub fn entries(&self) -> &[DatasetEntry] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// All 36 lines in canonical order (settings outer, lines inner).
    pub fn lines_in_order(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.entries
            .iter()
            .flat_map(|e| e.lines.lines().iter().copied())
    }

    /// CSV rows of `setting,line,re,im`, one per line, canonical order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting,line,re,im\n");
        for entry in &self.entries {
            for (id, z) in LINE_IDS.iter().zip(entry.lines.lines()) {
                out.push_str(&format!("{},{},{},{}\n", entry.setting, id, z.re, z.im));
            }
        }
        out
    }
}

/// The readout pulse unitary for a setting (identity when both pulses are
/// E). Pulse sign and label map come from the conventions; no delay is
/// involved.
pub fn setting_unitary(
    setting: &ReadoutSetting,
    conventions: &Conventions,
) -> Result<UnitaryMatrix> {
    let sys = SpinSystem::coupled_pair();
    let mut product = DMatrix::identity(4, 4);
    for (spin, pulse) in [(1usize, setting.spin1), (2usize, setting.spin2)] {
        let axis = match pulse {
            ReadoutPulse::E => continue,
            ReadoutPulse::X => Axis::PlusX,
            ReadoutPulse::Y => Axis::PlusY,
        };
        let event = PulseEvent::rf(spin, axis, PulseAngle::HalfPi)?;
        let u = event_unitary(&event, &sys, conventions)?;
        product = u.as_matrix() * product;
    }
    UnitaryMatrix::new(product)
}

/// Lines produced by acquiring rho under one readout setting:
/// sigma = P rho P^dagger, then each line reads its coherence element.
pub fn forward_signals(
    rho: &DeviationMatrix,
    setting: &ReadoutSetting,
    conventions: &Conventions,
) -> Result<LineIntensities> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let p = setting_unitary(setting, conventions)?;
    let sigma = p.conjugate(rho)?;
    let mut lines = [Complex64::new(0.0, 0.0); 4];
    for (slot, (r, c)) in lines.iter_mut().zip(LINE_COHERENCES) {
        *slot = sigma.entry(r, c);
    }
    LineIntensities::new(lines)
}

/// Acquire all nine settings, optionally adding seeded Gaussian noise of
/// standard deviation `noise_sigma` times the largest noiseless line
/// modulus to the real and imaginary part of every line. `noise_sigma = 0`
/// never touches the generator.
pub fn simulate_dataset(
    rho: &DeviationMatrix,
    noise_sigma: f64,
    seed: u64,
    conventions: &Conventions,
) -> Result<TomographyDataset> {
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::InvalidNoise { value: noise_sigma });
    }
    let mut exact = Vec::with_capacity(9);
    for setting in readout_settings() {
        exact.push(DatasetEntry {
            setting,
            lines: forward_signals(rho, &setting, conventions)?,
        });
    }
    if noise_sigma > 0.0 {
        let scale = exact
            .iter()
            .map(|e| e.lines.max_modulus())
            .fold(0.0, f64::max);
        let normal = Normal::new(0.0, noise_sigma * scale)
            .map_err(|_| Error::InvalidNoise { value: noise_sigma })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for entry in exact.iter_mut() {
            let mut lines = *entry.lines.lines();
            for z in lines.iter_mut() {
                *z += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
            }
            entry.lines = LineIntensities::new(lines)?;
        }
    }
    TomographyDataset::new(exact, rho.trace().re, noise_sigma, seed)
}

/// The 16 Hermitian basis matrices behind the reconstruction parameters:
/// four diagonal projectors, then Re and Im generators for each index pair
/// (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
fn hermitian_basis() -> Vec<DeviationMatrix> {
    let mut basis = Vec::with_capacity(16);
    for i in 0..4 {
        let mut m = DMatrix::zeros(4, 4);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(DeviationMatrix::new(m).expect("diagonal is Hermitian"));
    }
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for (i, j) in pairs {
        let mut re = DMatrix::zeros(4, 4);
        re[(i, j)] = Complex64::new(1.0, 0.0);
        re[(j, i)] = Complex64::new(1.0, 0.0);
        basis.push(DeviationMatrix::new(re).expect("symmetric is Hermitian"));
    }
    for (i, j) in pairs {
        let mut im = DMatrix::zeros(4, 4);
        im[(i, j)] = Complex64::new(0.0, 1.0);
        im[(j, i)] = Complex64::new(0.0, -1.0);
        basis.push(DeviationMatrix::new(im).expect("antisymmetric imaginary is Hermitian"));
    }
    basis
}

/// Singular values at or below this threshold count as zero when ranking
/// the design matrix; its entries are O(1) by construction.
const RANK_TOL: f64 = 1e-9;

/// The expected line-observation rank: 16 Hermitian parameters minus the
/// unobservable identity direction.
pub const OBSERVABLE_RANK: usize = 15;

/// What the line observations can and cannot determine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankReport {
    /// Rank of the 72 x 16 line design matrix.
    pub rank: usize,
    pub null_dim: usize,
    /// True when the null space is exactly the identity direction, the one
    /// deficiency the model expects and the trace constraint repairs.
    pub identity_spans_null: bool,
}

/// The 72 x 16 real design matrix mapping Hermitian parameters to line
/// observations (re and im interleaved, canonical order).
fn line_design(basis: &[DeviationMatrix], conventions: &Conventions) -> Result<DMatrix<f64>> {
    let settings = readout_settings();
    let rows = settings.len() * LINE_IDS.len() * 2;
    let mut design = DMatrix::zeros(rows, basis.len());
    for (k, b) in basis.iter().enumerate() {
        let mut row = 0;
        for setting in &settings {
            let lines = forward_signals(b, setting, conventions)?;
            for z in lines.lines() {
                design[(row, k)] = z.re;
                design[(row + 1, k)] = z.im;
                row += 2;
            }
        }
    }
    Ok(design)
}

/// Identity matrix in design-parameter coordinates: weight 1 on each
/// diagonal parameter.
fn identity_parameters(dim: usize) -> DVector<f64> {
    let mut p = DVector::zeros(dim);
    for i in 0..4 {
        p[i] = 1.0;
    }
    p
}

/// Numerically characterize the line design matrix under the given
/// conventions.
pub fn design_rank_report(conventions: &Conventions) -> Result<RankReport> {
    let basis = hermitian_basis();
    let design = line_design(&basis, conventions)?;
    let annihilates_identity = (&design * identity_parameters(basis.len())).norm() <= RANK_TOL;
    let svd = design.svd(false, false);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL)
        .count();
    Ok(RankReport {
        rank,
        null_dim: basis.len() - rank,
        identity_spans_null: rank == basis.len() - 1 && annihilates_identity,
    })
}

/// Least-squares reconstruction of the deviation matrix from a full
/// dataset. The line observations pin 15 of the 16 Hermitian parameters;
/// the dataset's trace supplies the last as a constraint row. Any other
/// deficiency is reported as an error, never silently pseudo-inverted
/// away.
pub fn reconstruct(
    dataset: &TomographyDataset,
    conventions: &Conventions,
) -> Result<DeviationMatrix> {
    let settings = readout_settings();
    if dataset.entries().len() != settings.len() {
        return Err(Error::IncompleteDataset {
            have: dataset.entries().len(),
            want: settings.len(),
        });
    }
    let basis = hermitian_basis();
    let report = design_rank_report(conventions)?;
    if !(report.rank == basis.len() || report.identity_spans_null) {
        return Err(Error::RankDeficient {
            rank: report.rank,
            expected: basis.len(),
            null_dim: report.null_dim,
        });
    }

    let design = line_design(&basis, conventions)?;
    let line_rows = design.nrows();
    // The trace row is independent of the line rows: they annihilate the
    // identity direction, it does not. With the rank report verified above,
    // the augmented system has full column rank.
    let mut augmented = design.insert_row(line_rows, 0.0);
    for i in 0..4 {
        augmented[(line_rows, i)] = 1.0;
    }
    let mut observed = DVector::zeros(line_rows + 1);
    for (i, z) in dataset.lines_in_order().enumerate() {
        observed[2 * i] = z.re;
        observed[2 * i + 1] = z.im;
    }
    observed[line_rows] = dataset.trace();

    // Normal equations with Cholesky: the design's nonzero singular values
    // all sit in [1.4, 2.5], so squaring the condition number costs
    // nothing and the solve stays exact to machine precision.
    let gram = augmented.transpose() * &augmented;
    let rhs = augmented.transpose() * &observed;
    let theta = gram
        .cholesky()
        .ok_or_else(|| Error::SolveFailed {
            reason: "normal equations not positive definite".to_string(),
        })?
        .solve(&rhs);

    let mut mat = DMatrix::zeros(4, 4);
    for (k, b) in basis.iter().enumerate() {
        mat += b.as_matrix() * Complex64::new(theta[k], 0.0);
    }
    DeviationMatrix::new(mat)
}

/// Entry-wise modulus, rows and columns indexed 0..3 over the basis
/// |00>, |01>, |10>, |11>.
pub fn modulus_table(rho: &DeviationMatrix) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = rho.entry(i, j).norm();
        }
    }
    out
}

/// CSV for a modulus table with 0..3 axis labels.
pub fn modulus_table_csv(table: &[[f64; 4]; 4]) -> String {
    let mut out = String::from(",0,1,2,3\n");
    for (i, row) in table.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}
