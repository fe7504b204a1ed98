//! Pure-state and ensemble-state arithmetic: superpositions, unitary
//! application, probabilities, effective-pure-state preparation by
//! temporal averaging, and phase-insensitive comparison.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operators::{DiagonalUnitary, UnitaryMatrix};

/// Tolerance for state norms and Hermiticity.
pub const STATE_TOL: f64 = 1e-10;

/// A normalized n-qubit state in the lexicographic bit-string basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() || amps.is_empty() {
            return Err(Error::NotPowerOfTwo { dim: amps.len() });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { amps })
    }

    /// Basis state |index⟩.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVariables);
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::AssignmentOutOfRange { index, n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitudes as [re, im] pairs in basis order.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.amps.iter().map(|c| [c.re, c.im]).collect()
    }

    pub(crate) fn from_trusted(amps: Vec<Complex64>) -> Self {
        debug_assert!(amps.len().is_power_of_two());
        StateVector { amps }
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.amps.len()))?;
        for c in &self.amps {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

/// Equal superposition of all 2^n basis states: every amplitude 2^{−n/2}.
pub fn uniform_superposition(n: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::NoVariables);
    }
    if n > crate::sat::MAX_ENUM_VARS {
        return Err(Error::TooManyVariables {
            context: "state preparation",
            n,
            max: crate::sat::MAX_ENUM_VARS,
        });
    }
    let dim = 1usize << n;
    let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(StateVector::from_trusted(vec![amp; dim]))
}

/// Anything that can act on states and conjugate deviation matrices.
pub trait StateOperator {
    fn op_dim(&self) -> usize;

    /// Matrix–vector product.
    fn apply_to(&self, psi: &StateVector) -> Result<StateVector>;

    /// P·ρ·P†.
    fn conjugate(&self, rho: &DeviationMatrix) -> Result<DeviationMatrix>;
}

impl StateOperator for UnitaryMatrix {
    fn op_dim(&self) -> usize {
        self.dim()
    }

    fn apply_to(&self, psi: &StateVector) -> Result<StateVector> {
        if self.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: psi.dim(),
            });
        }
        let vec = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let out = self.as_matrix() * vec;
        StateVector::new(out.as_slice().to_vec())
    }

    fn conjugate(&self, rho: &DeviationMatrix) -> Result<DeviationMatrix> {
        if self.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rho.dim(),
            });
        }
        let m = self.as_matrix() * rho.as_matrix() * self.as_matrix().adjoint();
        DeviationMatrix::new(m)
    }
}

impl StateOperator for DiagonalUnitary {
    fn op_dim(&self) -> usize {
        self.dim()
    }

    fn apply_to(&self, psi: &StateVector) -> Result<StateVector> {
        if self.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: psi.dim(),
            });
        }
        let amps = psi
            .amplitudes()
            .iter()
            .zip(self.entries())
            .map(|(a, d)| a * d)
            .collect();
        StateVector::new(amps)
    }

    fn conjugate(&self, rho: &DeviationMatrix) -> Result<DeviationMatrix> {
        if self.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rho.dim(),
            });
        }
        let dim = self.dim();
        let mut m = rho.as_matrix().clone();
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] *= self.entry(i) * self.entry(j).conj();
            }
        }
        DeviationMatrix::new(m)
    }
}

/// Apply a unitary (dense or diagonal) to a state.
pub fn apply_unitary<O: StateOperator + ?Sized>(op: &O, psi: &StateVector) -> Result<StateVector> {
    op.apply_to(psi)
}

/// Squared moduli in basis order; sums to 1 within tolerance by the state
/// invariant.
pub fn probabilities(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

/// A Hermitian matrix with unconstrained trace, the object NMR actually
/// measures. Scale carries no meaning; comparisons normalize by the largest
/// modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMatrix {
    mat: DMatrix<Complex64>,
}

impl DeviationMatrix {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let mut deviation = 0.0f64;
        for i in 0..mat.nrows() {
            for j in 0..mat.ncols() {
                deviation = deviation.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(DeviationMatrix { mat })
    }

    pub fn zeros(dim: usize) -> Self {
        DeviationMatrix {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    /// Pure-state projector |ψ⟩⟨ψ|.
    pub fn pure(psi: &StateVector) -> Self {
        let dim = psi.dim();
        let mat = DMatrix::from_fn(dim, dim, |i, j| psi.amplitude(i) * psi.amplitude(j).conj());
        DeviationMatrix { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Largest entry modulus.
    pub fn max_modulus(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to another matrix.
    pub fn frobenius_distance(&self, other: &DeviationMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok((&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Rows of [re, im] pairs in basis order.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|r| {
                (0..self.dim())
                    .map(|c| [self.mat[(r, c)].re, self.mat[(r, c)].im])
                    .collect()
            })
            .collect()
    }
}

impl Serialize for DeviationMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.to_pairs();
        let mut seq = serializer.serialize_seq(Some(rows.len()))?;
        for row in rows {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Effective-pure-state preparation for two qubits: average the three
/// diagonal ensembles obtained by cyclically permuting (p01, p10, p11),
/// then subtract w·I with w their mean. The result is (p00 − w)·|00⟩⟨00|.
pub fn temporal_average(populations: [f64; 4]) -> DeviationMatrix {
    let [p00, p01, p10, p11] = populations;
    let cycles = [[p01, p10, p11], [p10, p11, p01], [p11, p01, p10]];
    let mut diag = [0.0f64; 4];
    for cycle in cycles {
        diag[0] += p00;
        diag[1] += cycle[0];
        diag[2] += cycle[1];
        diag[3] += cycle[2];
    }
    for d in diag.iter_mut() {
        *d /= 3.0;
    }
    let w = (p01 + p10 + p11) / 3.0;
    let mat = DMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            Complex64::new(diag[i] - w, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DeviationMatrix { mat }
}

/// |trace(A†·B)| / dim. Equals 1 exactly when A = e^{iφ}·B; symmetric and
/// invariant under A→VA, B→VB for any unitary V.
pub fn fidelity_up_to_global_phase(a: &UnitaryMatrix, b: &UnitaryMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let trace = (a.as_matrix().adjoint() * b.as_matrix()).trace();
    Ok((trace.norm() / a.dim() as f64).min(1.0))
}

/// True when b = e^{iφ}·a entry-wise within `tol` for a single φ. Works on
/// flattened matrices as well as vectors; operands of different lengths
/// never match.
pub fn equal_up_to_global_phase(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (k, max) = a
        .iter()
        .enumerate()
        .map(|(i, z)| (i, z.norm()))
        .fold((0, 0.0), |acc, it| if it.1 > acc.1 { it } else { acc });
    if max <= tol {
        return b.iter().all(|z| z.norm() <= tol);
    }
    let phase = b[k] / a[k];
    a.iter().zip(b).all(|(x, y)| (x * phase - y).norm() <= tol)
}
