//! The end-to-end single-step algorithm: prepare the uniform superposition,
//! apply R then U, read out probabilities. Includes verification against the
//! brute-force oracle and exhaustive sweeps over every satisfiable 1-SAT
//! instance at a given width.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operators::{build_gamma, build_r, build_u, walsh_hadamard_in_place, UMethod};
use crate::sat::{Assignment, Formula};
use crate::state::{uniform_superposition, DeviationMatrix, StateOperator, StateVector};

/// Probability below which an amplitude is floating-point residue, not
/// support: far above the 1e-10 noise floor, far below the smallest
/// legitimate probability 2^{-n} at tractable widths.
pub const DECODE_THRESHOLD: f64 = 1e-6;

/// Tolerance for verification against the oracle.
pub const VERIFY_TOL: f64 = 1e-10;

/// Largest width `sweep` accepts; 3^10 - 1 = 59048 instances.
pub const MAX_SWEEP_VARS: usize = 10;

/// Outcome of one run: the final state and its decoded support.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    formula: Formula,
    final_state: StateVector,
    probabilities: Vec<f64>,
    decoded_solutions: Vec<Assignment>,
    guaranteed: bool,
}

impl SearchResult {
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn final_state(&self) -> &StateVector {
        &self.final_state
    }

    /// Full distribution in basis order.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Assignments with probability above the decode threshold, in index
    /// order. Subset of the distribution's support by construction.
    pub fn decoded_solutions(&self) -> &[Assignment] {
        &self.decoded_solutions
    }

    /// True when the instance is 1-SAT with every clause on a distinct
    /// variable, the regime where the single step provably lands on the
    /// solution set. Other inputs run exploratorily.
    pub fn guaranteed(&self) -> bool {
        self.guaranteed
    }

    /// Distribution keyed by bit string, deterministic order.
    pub fn probability_map(&self) -> BTreeMap<String, f64> {
        let n = self.formula.var_count();
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| (Assignment::new(n, i).expect("in range").to_string(), p))
            .collect()
    }
}

impl Serialize for SearchResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SearchResult", 5)?;
        s.serialize_field("formula", &self.formula.to_string())?;
        s.serialize_field("guaranteed", &self.guaranteed)?;
        s.serialize_field("amplitudes", &self.final_state)?;
        s.serialize_field("probabilities", &self.probability_map())?;
        s.serialize_field(
            "decoded_solutions",
            &self
                .decoded_solutions
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>(),
        )?;
        s.end()
    }
}

/// Comparison of a search outcome against the brute-force oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// False when the oracle set is empty (unsatisfiable instance): the
    /// equal-amplitude claim then has nothing to say.
    pub applicable: bool,
    pub passed: bool,
    pub oracle_solutions: Vec<Assignment>,
    pub max_offsolution_probability: f64,
    pub solution_probability_spread: f64,
}

/// Run the single step: |psi_0> = U R |psi_i>.
///
/// U is applied through its W-diag-W factorization as two fast transforms
/// around a diagonal scaling, so no dense matrix is materialized.
pub fn run_search(f: &Formula) -> Result<SearchResult> {
    let n = f.var_count();
    let m = f.clause_count();
    if m == 0 {
        return Err(Error::NoClauses);
    }
    let r = build_r(f)?;
    let gamma = build_gamma(n, m)?;

    let psi = uniform_superposition(n)?;
    let mut amps = psi.amplitudes().to_vec();
    for (a, d) in amps.iter_mut().zip(r.entries()) {
        *a *= d;
    }
    walsh_hadamard_in_place(&mut amps);
    for (a, d) in amps.iter_mut().zip(gamma.entries()) {
        *a *= d;
    }
    walsh_hadamard_in_place(&mut amps);
    let final_state = StateVector::new(amps)?;

    let probabilities = crate::state::probabilities(&final_state);
    let decoded_solutions = probabilities
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > DECODE_THRESHOLD)
        .map(|(i, _)| Assignment::new(n, i).expect("in range"))
        .collect();

    Ok(SearchResult {
        formula: f.clone(),
        final_state,
        probabilities,
        decoded_solutions,
        guaranteed: f.is_guaranteed_one_sat(),
    })
}

/// Check a result for equal probability on every oracle solution and none
/// elsewhere.
pub fn verify_result(f: &Formula, result: &SearchResult) -> Result<VerificationReport> {
    let oracle = f.enumerate_solutions()?;
    let probs = result.probabilities();
    if probs.len() != 1usize << f.var_count() {
        return Err(Error::DimensionMismatch {
            left: probs.len(),
            right: 1usize << f.var_count(),
        });
    }
    let mut is_solution = vec![false; probs.len()];
    for a in &oracle {
        is_solution[a.index()] = true;
    }
    let max_off = probs
        .iter()
        .zip(&is_solution)
        .filter(|(_, &sol)| !sol)
        .map(|(&p, _)| p)
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for a in &oracle {
        lo = lo.min(probs[a.index()]);
        hi = hi.max(probs[a.index()]);
    }
    let spread = if oracle.is_empty() { 0.0 } else { hi - lo };
    let applicable = !oracle.is_empty();
    Ok(VerificationReport {
        applicable,
        passed: applicable && max_off <= VERIFY_TOL && spread <= VERIFY_TOL,
        oracle_solutions: oracle,
        max_offsolution_probability: max_off,
        solution_probability_spread: spread,
    })
}

/// The ensemble version of the pipeline: rho_0 = (UR) rho_i (UR)^dagger with
/// rho_i the uniform-superposition projector. Dense operators, so limited to
/// widths where 2^n x 2^n matrices are practical.
pub fn final_deviation_matrix(f: &Formula) -> Result<DeviationMatrix> {
    let n = f.var_count();
    let m = f.clause_count();
    if m == 0 {
        return Err(Error::NoClauses);
    }
    let r = build_r(f)?;
    let u = build_u(n, m, UMethod::Elementwise)?;
    let rho_i = DeviationMatrix::pure(&uniform_superposition(n)?);
    u.conjugate(&r.conjugate(&rho_i)?)
}

/// One row of a sweep: the instance, whether it carries the single-step
/// guarantee, and how its verification went.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub formula: String,
    pub guaranteed: bool,
    pub passed: bool,
    pub max_offsolution_probability: f64,
    pub solution_probability_spread: f64,
}

/// Aggregate over every satisfiable width-n 1-SAT instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub formula_count: usize,
    pub pass_count: usize,
    pub worst_max_offsolution_probability: f64,
    pub worst_solution_probability_spread: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.pass_count == self.formula_count
    }
}

/// Each variable is independently absent, positive, or negated; `code`'s
/// base-3 digits pick the option, most significant digit = variable 1.
fn formula_from_code(n: usize, code: usize) -> Formula {
    let mut clauses = Vec::new();
    let mut rest = code;
    let mut scale = 3usize.pow(n as u32 - 1);
    for var in 1..=n {
        let digit = rest / scale;
        rest %= scale;
        scale = scale.max(1) / 3;
        match digit {
            0 => {}
            1 => clauses.push(
                crate::sat::Clause::new(
                    vec![crate::sat::Literal::positive(var).expect("var >= 1")],
                )
                .expect("nonempty"),
            ),
            _ => clauses.push(
                crate::sat::Clause::new(
                    vec![crate::sat::Literal::negative(var).expect("var >= 1")],
                )
                .expect("nonempty"),
            ),
        }
    }
    Formula::new(n, clauses).expect("valid by construction")
}

/// Run and verify all 3^n - 1 satisfiable instances on n variables.
/// Instances evaluate concurrently; the report lists them in a fixed
/// enumeration order regardless of scheduling.
pub fn sweep(n: usize) -> Result<SweepReport> {
    if n == 0 || n > MAX_SWEEP_VARS {
        return Err(Error::SweepOutOfRange {
            n,
            max: MAX_SWEEP_VARS,
        });
    }
    let count = 3usize.pow(n as u32) - 1;
    let rows: Vec<SweepRow> = (1..=count)
        .into_par_iter()
        .map(|code| {
            let f = formula_from_code(n, code);
            let result = run_search(&f)?;
            let report = verify_result(&f, &result)?;
            Ok(SweepRow {
                formula: f.to_string(),
                guaranteed: result.guaranteed(),
                passed: report.passed,
                max_offsolution_probability: report.max_offsolution_probability,
                solution_probability_spread: report.solution_probability_spread,
            })
        })
        .collect::<Result<_>>()?;

    let pass_count = rows.iter().filter(|r| r.passed).count();
    let worst_off = rows
        .iter()
        .map(|r| r.max_offsolution_probability)
        .fold(0.0, f64::max);
    let worst_spread = rows
        .iter()
        .map(|r| r.solution_probability_spread)
        .fold(0.0, f64::max);
    Ok(SweepReport {
        n,
        formula_count: count,
        pass_count,
        worst_max_offsolution_probability: worst_off,
        worst_solution_probability_spread: worst_spread,
        rows,
    })
}
