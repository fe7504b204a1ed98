//! The search operators: the diagonal phase matrix R keyed by conflict
//! counts, the diagonal Γ keyed by Hamming weight, the n-fold Hadamard W,
//! and the mixing matrix U built two independent ways (entry-wise formula
//! and the W·Γ·W product) that must agree including global phase.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sat::Formula;

/// Dense matrices are capped at 2^12 x 2^12.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Max-norm tolerance for the unitarity invariant.
pub const UNITARITY_TOL: f64 = 1e-12;

/// i^k for integer k, computed exactly.
fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// (-i)^k for integer k, computed exactly.
fn neg_i_pow(k: usize) -> Complex64 {
    i_pow(k).conj()
}

/// A diagonal operator with unit-modulus entries, indexed by basis assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    entries: Vec<Complex64>,
}

impl DiagonalUnitary {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if !entries.len().is_power_of_two() || entries.is_empty() {
            return Err(Error::NotPowerOfTwo { dim: entries.len() });
        }
        for (index, e) in entries.iter().enumerate() {
            if (e.norm() - 1.0).abs() > UNITARITY_TOL {
                return Err(Error::NotUnitModulus {
                    index,
                    modulus: e.norm(),
                });
            }
        }
        Ok(DiagonalUnitary { entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        DiagonalUnitary::new(vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn qubits(&self) -> usize {
        self.entries.len().trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> Complex64 {
        self.entries[index]
    }

    /// Worst deviation of any entry modulus from 1.
    pub fn unitarity_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> UnitaryMatrix {
        let dim = self.dim();
        let mut mat = DMatrix::zeros(dim, dim);
        for (i, e) in self.entries.iter().enumerate() {
            mat[(i, i)] = *e;
        }
        UnitaryMatrix { mat }
    }

    /// Entries as [re, im] pairs in basis order.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.entries.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl Serialize for DiagonalUnitary {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for c in &self.entries {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

/// A dense square matrix satisfying U·U† = I within 1e-12 (max-norm).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    mat: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let u = UnitaryMatrix { mat };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    /// For builders whose output is unitary by construction; the invariant
    /// is still exercised by the test suite via `unitarity_deviation`.
    pub(crate) fn from_trusted(mat: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        UnitaryMatrix { mat }
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

    /// max |U·U† − I|.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = &self.mat * self.mat.adjoint();
        let mut worst = 0.0f64;
        for i in 0..product.nrows() {
            for j in 0..product.ncols() {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((product[(i, j)] - Complex64::new(expected, 0.0)).norm());
            }
        }
        worst
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

    /// Largest entry-wise absolute difference against another matrix.
    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(worst)
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.to_pairs();
        let mut seq = serializer.serialize_seq(Some(rows.len()))?;
        for row in rows {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Phase operator: entry at assignment s is √2·cos[(2c−1)π/4] for even m and
/// i^c for odd m, with c the conflict count of s. Both branches have unit
/// modulus for every integer c.
pub fn build_r(f: &Formula) -> Result<DiagonalUnitary> {
    let m = f.clause_count();
    if m == 0 {
        return Err(Error::NoClauses);
    }
    let n = f.var_count();
    if n > crate::sat::MAX_ENUM_VARS {
        return Err(Error::TooManyVariables {
            context: "phase operator construction",
            n,
            max: crate::sat::MAX_ENUM_VARS,
        });
    }
    let even = m.is_multiple_of(2);
    let mut entries = Vec::with_capacity(1 << n);
    for index in 0..(1usize << n) {
        let s = crate::sat::Assignment::new(n, index)?;
        let c = f.conflicts(&s)?;
        entries.push(if even {
            let value = 2f64.sqrt() * ((2.0 * c as f64 - 1.0) * FRAC_PI_4).cos();
            Complex64::new(value, 0.0)
        } else {
            i_pow(c)
        });
    }
    DiagonalUnitary::new(entries)
}

/// Mixing-phase diagonal: entry at bit string r is √2·cos[(m−2|r|−1)π/4] for
/// even m and i^|r|·e^{−imπ/4} for odd m. The odd-m global factor e^{−imπ/4}
/// is kept exactly as the formula states it; comparisons that need to ignore
/// it are phase-insensitive.
pub fn build_gamma(n: usize, m: usize) -> Result<DiagonalUnitary> {
    if n == 0 {
        return Err(Error::NoVariables);
    }
    if m == 0 {
        return Err(Error::NoClauses);
    }
    if n > crate::sat::MAX_ENUM_VARS {
        return Err(Error::TooManyVariables {
            context: "mixing-phase construction",
            n,
            max: crate::sat::MAX_ENUM_VARS,
        });
    }
    let even = m.is_multiple_of(2);
    let phase = Complex64::from_polar(1.0, -(m as f64) * FRAC_PI_4);
    let mut entries = Vec::with_capacity(1 << n);
    for r in 0..(1usize << n) {
        let weight = (r as u64).count_ones() as usize;
        entries.push(if even {
            let value = 2f64.sqrt() * ((m as f64 - 2.0 * weight as f64 - 1.0) * FRAC_PI_4).cos();
            Complex64::new(value, 0.0)
        } else {
            i_pow(weight) * phase
        });
    }
    DiagonalUnitary::new(entries)
}

/// n-fold Hadamard: entry (r, s) = 2^{−n/2}·(−1)^{parity(r AND s)}.
/// Self-inverse and symmetric.
pub fn build_w(n: usize) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::NoVariables);
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyVariables {
            context: "dense Hadamard construction",
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let scale = 2f64.powf(-(n as f64) / 2.0);
    let mat = DMatrix::from_fn(dim, dim, |r, s| {
        let parity = (r & s).count_ones() & 1;
        Complex64::new(if parity == 0 { scale } else { -scale }, 0.0)
    });
    Ok(UnitaryMatrix::from_trusted(mat))
}

/// Construction route for the mixing matrix U.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UMethod {
    /// Direct entry-wise formula in the Hamming distance d(r,s).
    Elementwise,
    /// The product W·Γ·W.
    Decomposition,
}

/// Mixing matrix: entry (r,s) is 2^{−(n−1)/2}·cos[(n−m+1−2d)π/4] for even m
/// and 2^{−n/2}·e^{i(n−m)π/4}·(−i)^d for odd m, with d = hamming(r, s);
/// equivalently W·Γ·W. The two methods agree entry-wise including global
/// phase, which is what makes keeping Γ's e^{−imπ/4} factor essential.
pub fn build_u(n: usize, m: usize, method: UMethod) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::NoVariables);
    }
    if m == 0 {
        return Err(Error::NoClauses);
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyVariables {
            context: "dense mixing-matrix construction",
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    match method {
        UMethod::Elementwise => {
            let even = m.is_multiple_of(2);
            // Entries depend only on d, so precompute the n+1 possible values.
            let by_distance: Vec<Complex64> = (0..=n)
                .map(|d| {
                    if even {
                        let scale = 2f64.powf(-((n as f64 - 1.0) / 2.0));
                        let angle = (n as f64 - m as f64 + 1.0 - 2.0 * d as f64) * FRAC_PI_4;
                        Complex64::new(scale * angle.cos(), 0.0)
                    } else {
                        let scale = 2f64.powf(-(n as f64) / 2.0);
                        let phase = Complex64::from_polar(1.0, (n as f64 - m as f64) * FRAC_PI_4);
                        scale * phase * neg_i_pow(d)
                    }
                })
                .collect();
            let mat = DMatrix::from_fn(dim, dim, |r, s| by_distance[(r ^ s).count_ones() as usize]);
            Ok(UnitaryMatrix::from_trusted(mat))
        }
        UMethod::Decomposition => {
            let w = build_w(n)?;
            let gamma = build_gamma(n, m)?;
            // Γ·W scales W's rows; one dense product then completes W·(Γ·W).
            let mut gw = w.as_matrix().clone();
            for (r, entry) in gamma.entries().iter().enumerate() {
                for c in 0..dim {
                    gw[(r, c)] *= entry;
                }
            }
            Ok(UnitaryMatrix::from_trusted(w.as_matrix() * gw))
        }
    }
}

/// In-place normalized Walsh–Hadamard transform; equals dense multiplication
/// by build_w(n). Length must be a power of two.
pub(crate) fn walsh_hadamard_in_place(amps: &mut [Complex64]) {
    let len = amps.len();
    debug_assert!(len.is_power_of_two() && len > 0);
    let mut half = 1;
    while half < len {
        let step = half << 1;
        for block in (0..len).step_by(step) {
            for i in block..block + half {
                let a = amps[i];
                let b = amps[i + half];
                amps[i] = a + b;
                amps[i + half] = a - b;
            }
        }
        half = step;
    }
    let scale = (len as f64).sqrt().recip();
    for a in amps.iter_mut() {
        *a *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn parse(text: &str) -> Formula {
        text.parse().unwrap()
    }

    fn assert_diag_eq(d: &DiagonalUnitary, expected: &[Complex64]) {
        assert_eq!(d.dim(), expected.len());
        for (i, e) in expected.iter().enumerate() {
            assert!(
                (d.entry(i) - e).norm() <= TOL,
                "entry {i}: {} vs {e}",
                d.entry(i)
            );
        }
    }

    #[test]
    fn r_for_two_positive_clauses() {
        let r = build_r(&parse("1, 2")).unwrap();
        assert_diag_eq(&r, &[c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn r_for_single_clause_on_low_variable() {
        let r = build_r(&parse("n=2; 2")).unwrap();
        assert_diag_eq(&r, &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)]);
    }

    #[test]
    fn r_odd_m_over_constrained_entry() {
        // m=3 with a contradictory pair: assignment 11 violates only ¬V1.
        let r = build_r(&parse("n=2; 1, -1, 2")).unwrap();
        assert!((r.entry(0b11) - c(0.0, 1.0)).norm() <= TOL);
    }

    #[test]
    fn r_rejects_empty_clause_list() {
        assert_eq!(build_r(&parse("n=2;")), Err(Error::NoClauses));
    }

    #[test]
    fn r_depends_only_on_conflict_counts() {
        let a = build_r(&parse("1, 2")).unwrap();
        let b = build_r(&parse("2, 1")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gamma_even_m_matches_printed_diagonal() {
        let g = build_gamma(2, 2).unwrap();
        assert_diag_eq(&g, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn gamma_odd_m_carries_global_phase() {
        let g = build_gamma(2, 1).unwrap();
        let phase = Complex64::from_polar(1.0, -FRAC_PI_4);
        let expected = [
            phase,
            phase * c(0.0, 1.0),
            phase * c(0.0, 1.0),
            phase * c(-1.0, 0.0),
        ];
        assert_diag_eq(&g, &expected);
        // Phase-insensitive match against the printed [1, i, i, -1].
        let printed = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(-1.0, 0.0)];
        assert!(crate::state::equal_up_to_global_phase(
            g.entries(),
            &printed,
            TOL
        ));
    }

    #[test]
    fn gamma_single_qubit_even_m_is_identity() {
        let g = build_gamma(1, 2).unwrap();
        assert_diag_eq(&g, &[c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn gamma_rejects_zero_clauses() {
        assert_eq!(build_gamma(2, 0), Err(Error::NoClauses));
    }

    #[test]
    fn w_single_qubit_is_hadamard() {
        let w = build_w(1).unwrap();
        let s = 0.5f64.sqrt();
        assert!((w.entry(0, 0) - c(s, 0.0)).norm() <= TOL);
        assert!((w.entry(0, 1) - c(s, 0.0)).norm() <= TOL);
        assert!((w.entry(1, 0) - c(s, 0.0)).norm() <= TOL);
        assert!((w.entry(1, 1) - c(-s, 0.0)).norm() <= TOL);
    }

    #[test]
    fn w_row_zero_is_uniform() {
        let w = build_w(2).unwrap();
        for sidx in 0..4 {
            assert!((w.entry(0, sidx) - c(0.5, 0.0)).norm() <= TOL);
        }
    }

    #[test]
    fn w_is_an_involution() {
        for n in 1..=8 {
            let w = build_w(n).unwrap();
            let product = w.as_matrix() * w.as_matrix();
            let identity = DMatrix::<Complex64>::identity(1 << n, 1 << n);
            let worst = (product - identity)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(worst <= TOL, "n={n}: worst {worst}");
        }
    }

    #[test]
    fn u_even_m_matches_derived_matrix() {
        let u = build_u(2, 2, UMethod::Elementwise).unwrap();
        let expected = [
            [0.5, 0.5, 0.5, -0.5],
            [0.5, 0.5, -0.5, 0.5],
            [0.5, -0.5, 0.5, 0.5],
            [-0.5, 0.5, 0.5, 0.5],
        ];
        for (r, row) in expected.iter().enumerate() {
            for (s, want) in row.iter().enumerate() {
                assert!(
                    (u.entry(r, s) - c(*want, 0.0)).norm() <= TOL,
                    "entry ({r},{s})"
                );
            }
        }
    }

    #[test]
    fn u_odd_m_corner_entry() {
        let expected = 0.5 * Complex64::from_polar(1.0, FRAC_PI_4);
        for method in [UMethod::Elementwise, UMethod::Decomposition] {
            let u = build_u(2, 1, method).unwrap();
            assert!((u.entry(0, 0) - expected).norm() <= TOL);
        }
    }

    #[test]
    fn u_methods_agree_including_global_phase() {
        for n in 1..=6 {
            for m in 1..=2 * n {
                let a = build_u(n, m, UMethod::Elementwise).unwrap();
                let b = build_u(n, m, UMethod::Decomposition).unwrap();
                let diff = a.max_abs_diff(&b).unwrap();
                assert!(diff <= TOL, "n={n} m={m}: diff {diff:.3e}");
            }
        }
    }

    #[test]
    fn operators_are_unitary() {
        for n in 1..=6usize {
            for m in 1..=2 * n {
                assert!(build_gamma(n, m).unwrap().unitarity_deviation() <= TOL);
                for method in [UMethod::Elementwise, UMethod::Decomposition] {
                    let u = build_u(n, m, method).unwrap();
                    assert!(u.unitarity_deviation() <= TOL, "n={n} m={m}");
                }
            }
            assert!(build_w(n).unwrap().unitarity_deviation() <= TOL);
        }
    }

    #[test]
    fn u_rejects_zero_clauses_and_oversize() {
        assert_eq!(build_u(2, 0, UMethod::Elementwise), Err(Error::NoClauses));
        assert!(matches!(
            build_u(MAX_DENSE_QUBITS + 1, 1, UMethod::Elementwise),
            Err(Error::TooManyVariables { .. })
        ));
        assert!(matches!(
            build_w(MAX_DENSE_QUBITS + 1),
            Err(Error::TooManyVariables { .. })
        ));
    }

    #[test]
    fn even_m_entries_real_odd_m_fourth_roots() {
        let r_even = build_r(&parse("1, 2")).unwrap();
        for e in r_even.entries() {
            assert!(e.im.abs() <= TOL);
            assert!((e.re.abs() - 1.0).abs() <= TOL);
        }
        let r_odd = build_r(&parse("n=2; 2")).unwrap();
        for e in r_odd.entries() {
            let fourth_root = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
                .iter()
                .any(|root| (e - root).norm() <= TOL);
            assert!(fourth_root, "entry {e}");
        }
    }

    #[test]
    fn walsh_hadamard_matches_dense_w() {
        for n in 1..=6 {
            let dim = 1usize << n;
            let mut amps: Vec<Complex64> = (0..dim)
                .map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.19).cos()))
                .collect();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in amps.iter_mut() {
                *a /= norm;
            }
            let w = build_w(n).unwrap();
            let dense = w.as_matrix() * DMatrix::from_column_slice(dim, 1, &amps);
            walsh_hadamard_in_place(&mut amps);
            for i in 0..dim {
                assert!((amps[i] - dense[(i, 0)]).norm() <= TOL, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn diagonal_unitary_rejects_non_unit_modulus() {
        let result = DiagonalUnitary::new(vec![c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            result,
            Err(Error::NotUnitModulus { index: 1, .. })
        ));
    }

    #[test]
    fn unitary_matrix_rejects_non_unitary_input() {
        let mat =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            UnitaryMatrix::new(mat),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn serializes_to_re_im_pairs() {
        let r = build_r(&parse("n=2; 2")).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json[0][0], 0.0);
        assert_eq!(json[0][1], 1.0);
        assert_eq!(json[1][0], 1.0);
        let w = build_w(1).unwrap();
        let json = serde_json::to_value(&w).unwrap();
        assert!((json[1][1][0].as_f64().unwrap() + 0.5f64.sqrt()).abs() <= TOL);
    }

    proptest! {
        #[test]
        fn u_translation_invariance(
            (n, m, t) in (1usize..=5).prop_flat_map(|n| {
                (Just(n), 1usize..=2 * n, 0usize..(1 << n))
            })
        ) {
            let u = build_u(n, m, UMethod::Elementwise).unwrap();
            let dim = 1usize << n;
            for r in 0..dim {
                for s in 0..dim {
                    let lhs = u.entry(r, s);
                    let rhs = u.entry(r ^ t, s ^ t);
                    prop_assert!((lhs - rhs).norm() <= TOL);
                }
            }
        }

        #[test]
        fn r_entries_unit_modulus(
            f in "(n=[1-4]; )?(-?[1-4])( -?[1-4])*(, (-?[1-4])( -?[1-4])*){0,3}"
        ) {
            if let Ok(formula) = f.parse::<Formula>() {
                if formula.clause_count() >= 1 {
                    let r = build_r(&formula).unwrap();
                    prop_assert!(r.unitarity_deviation() <= TOL);
                }
            }
        }
    }
}
