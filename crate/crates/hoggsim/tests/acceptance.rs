//! The acceptance gate. Nine go/no-go checks, one printed line each, run
//! with `cargo test --test acceptance`. Tolerances and budgets are pinned
//! here, not read from anywhere, so a regression cannot loosen them.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hoggsim::nmr::{self, Conventions, SpinSystem};
use hoggsim::operators::{build_gamma, build_r, build_u, build_w, UMethod};
use hoggsim::sat::Formula;
use hoggsim::search;
use hoggsim::state::{self, DeviationMatrix};
use hoggsim::tomography;

// Entrywise agreement for operator tables.
const MATRIX_TOL: f64 = 1e-12;
// Agreement for measured probabilities.
const PROBABILITY_TOL: f64 = 1e-10;
// Frobenius tolerance for noiseless tomography round trips.
const ROUNDTRIP_TOL: f64 = 1e-8;
// Noise level and acceptance band for the spurious-peak study.
const NOISE_SIGMA: f64 = 0.05;
const NOISE_RUNS: u64 = 100;
const NOISE_PASS_FLOOR: usize = 95;
const SPURIOUS_CEILING: f64 = 0.25;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn parse(text: &str) -> Formula {
    text.parse().expect("formula text parses")
}

fn diag_close(got: &[Complex64], want: &[Complex64]) -> Result<(), String> {
    let worst = got
        .iter()
        .zip(want)
        .map(|(g, w)| (g - w).norm())
        .fold(0.0f64, f64::max);
    if worst <= MATRIX_TOL {
        Ok(())
    } else {
        Err(format!("diagonal differs by {worst:e}"))
    }
}

// 1. The two-spin operator tables come out exactly as hand-derived: both R
// variants, both Γ variants, and U = WΓW entry for entry. Only the odd
// clause count's Γ is compared up to a global phase, since its printed
// form fixes one arbitrarily.
fn operator_tables() -> Result<String, String> {
    let r_and = build_r(&parse("1, 2")).map_err(|e| e.to_string())?;
    diag_close(
        r_and.entries(),
        &[c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
    )?;

    let r_single = build_r(&parse("n=2; 2")).map_err(|e| e.to_string())?;
    diag_close(
        r_single.entries(),
        &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)],
    )?;

    let gamma_22 = build_gamma(2, 2).map_err(|e| e.to_string())?;
    diag_close(
        gamma_22.entries(),
        &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
    )?;

    let gamma_21 = build_gamma(2, 1).map_err(|e| e.to_string())?;
    let phase = c(0.0, -std::f64::consts::FRAC_PI_4).exp();
    let gamma_21_expected: Vec<Complex64> = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(-1.0, 0.0)]
        .iter()
        .map(|z| phase * z)
        .collect();
    if !state::equal_up_to_global_phase(gamma_21.entries(), &gamma_21_expected, MATRIX_TOL) {
        return Err("odd-m Γ differs from the hand-derived table beyond a global phase".into());
    }

    let u_22 = build_u(2, 2, UMethod::Decomposition).map_err(|e| e.to_string())?;
    let signs: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0, 1.0],
    ];
    let mut worst = 0.0f64;
    for (i, row) in signs.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            worst = worst.max((u_22.entry(i, j) - c(0.5 * s, 0.0)).norm());
        }
    }
    if worst > MATRIX_TOL {
        return Err(format!(
            "U(2,2) differs from the hand-derived table by {worst:e}"
        ));
    }
    Ok("R, Γ, and U reproduce the hand-derived two-spin tables".into())
}

// 2. The named searches land where they should: the conjunction on |11>
// with certainty, the single-clause problem split evenly across its two
// solutions, and a three-variable conjunction on |101>.
fn named_searches() -> Result<String, String> {
    let and = search::run_search(&parse("1, 2")).map_err(|e| e.to_string())?;
    if and.probabilities()[0b11] < 1.0 - PROBABILITY_TOL {
        return Err(format!(
            "P(11) = {} for the conjunction",
            and.probabilities()[0b11]
        ));
    }

    let single = search::run_search(&parse("n=2; 2")).map_err(|e| e.to_string())?;
    let p = single.probabilities();
    for (index, want) in [(0b00, 0.0), (0b01, 0.5), (0b10, 0.0), (0b11, 0.5)] {
        if (p[index] - want).abs() > PROBABILITY_TOL {
            return Err(format!(
                "P({index:02b}) = {} for the single clause, want {want}",
                p[index]
            ));
        }
    }

    let three = search::run_search(&parse("1, -2, 3")).map_err(|e| e.to_string())?;
    if three.probabilities()[0b101] < 1.0 - PROBABILITY_TOL {
        return Err(format!("P(101) = {}", three.probabilities()[0b101]));
    }
    Ok("conjunction, single-clause, and three-variable searches all land exactly".into())
}

// 3. Every formula on up to eight variables verifies: solutions carry
// equal probability, non-solutions carry none.
fn exhaustive_sweep() -> Result<String, String> {
    let mut formulas = 0usize;
    for n in 1..=8 {
        let report = search::sweep(n).map_err(|e| e.to_string())?;
        if !report.all_passed() {
            return Err(format!(
                "{} of {} formulas failed at n={n}, worst off-solution probability {:e}",
                report.formula_count - report.pass_count,
                report.formula_count,
                report.worst_max_offsolution_probability,
            ));
        }
        formulas += report.formula_count;
    }
    Ok(format!("{formulas} formulas across n = 1..=8 all verify"))
}

// 4. The two ways of building U agree entrywise everywhere they both
// apply.
fn u_construction_agreement() -> Result<String, String> {
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for n in 1..=8 {
        for m in 1..=2 * n {
            let elementwise = build_u(n, m, UMethod::Elementwise).map_err(|e| e.to_string())?;
            let decomposed = build_u(n, m, UMethod::Decomposition).map_err(|e| e.to_string())?;
            worst = worst.max(
                elementwise
                    .max_abs_diff(&decomposed)
                    .map_err(|e| e.to_string())?,
            );
            pairs += 1;
        }
    }
    if worst > MATRIX_TOL {
        return Err(format!("constructions disagree by {worst:e}"));
    }
    Ok(format!("{pairs} (n, m) pairs agree within {worst:e}"))
}

// 5. Everything claiming to be unitary is unitary, including every pulse
// and every composed sequence under every convention.
fn unitarity_everywhere() -> Result<String, String> {
    let mut worst = 0.0f64;
    for text in ["1, 2", "n=2; 2", "1, -2, 3", "n=4; -2, 3"] {
        worst = worst.max(
            build_r(&parse(text))
                .map_err(|e| e.to_string())?
                .unitarity_deviation(),
        );
    }
    for n in 1..=6 {
        worst = worst.max(build_w(n).map_err(|e| e.to_string())?.unitarity_deviation());
        for m in 1..=2 * n {
            worst = worst.max(
                build_gamma(n, m)
                    .map_err(|e| e.to_string())?
                    .unitarity_deviation(),
            );
            if n <= 4 {
                worst = worst.max(
                    build_u(n, m, UMethod::Decomposition)
                        .map_err(|e| e.to_string())?
                        .unitarity_deviation(),
                );
            }
        }
    }
    let sys = SpinSystem::coupled_pair();
    for name in nmr::BUILTIN_SEQUENCE_NAMES {
        let seq = nmr::builtin_sequence(name).map_err(|e| e.to_string())?;
        for conventions in Conventions::all() {
            for event in seq.events() {
                worst = worst.max(
                    nmr::event_unitary(event, &sys, &conventions)
                        .map_err(|e| e.to_string())?
                        .unitarity_deviation(),
                );
            }
            worst = worst.max(
                nmr::sequence_unitary(&seq, &sys, &conventions)
                    .map_err(|e| e.to_string())?
                    .unitarity_deviation(),
            );
        }
    }
    if worst > MATRIX_TOL {
        return Err(format!("worst unitarity deviation {worst:e}"));
    }
    Ok(format!("worst unitarity deviation {worst:e}"))
}

// 6. The convention harness: the full grid of printed programs against
// diagonal targets evaluates deterministically; the three-pulse composite
// is diagonal under every convention; the conjunction's R program is
// realized under at least one convention. Programs no convention explains
// are reported, not asserted away.
fn convention_harness() -> Result<String, String> {
    let diagonal_names = ["R_V1andV2", "R_V2", "Gamma_m2", "Gamma_m1"];

    let grid = |_: ()| -> Result<Vec<u64>, String> {
        let mut bits = Vec::new();
        for seq_name in diagonal_names {
            let seq = nmr::builtin_sequence(seq_name).map_err(|e| e.to_string())?;
            for target_name in diagonal_names {
                let target = nmr::builtin_target(target_name).map_err(|e| e.to_string())?;
                let report = nmr::convention_search(&seq, &target).map_err(|e| e.to_string())?;
                if report.rows.len() != 8 {
                    return Err(format!(
                        "{} rows for {seq_name} vs {target_name}",
                        report.rows.len()
                    ));
                }
                bits.extend(report.rows.iter().map(|row| row.fidelity.to_bits()));
            }
        }
        Ok(bits)
    };
    if grid(())? != grid(())? {
        return Err("re-evaluating the grid changed a fidelity bit".into());
    }

    let sys = SpinSystem::coupled_pair();
    let composite: nmr::PulseSequence = "y1/90 x1/90 -y1/90"
        .parse()
        .map_err(|e: hoggsim::Error| e.to_string())?;
    for conventions in Conventions::all() {
        let u = nmr::sequence_unitary(&composite, &sys, &conventions).map_err(|e| e.to_string())?;
        let mut off = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    off = off.max(u.entry(i, j).norm());
                }
            }
        }
        if off > MATRIX_TOL {
            return Err(format!(
                "composite has off-diagonal weight {off:e} under {conventions}"
            ));
        }
    }

    let seq = nmr::builtin_sequence("R_V1andV2").map_err(|e| e.to_string())?;
    let target = nmr::builtin_target("R_V1andV2").map_err(|e| e.to_string())?;
    let report = nmr::convention_search(&seq, &target).map_err(|e| e.to_string())?;
    let validating = report.validating_set().len();
    if validating == 0 {
        return Err("no convention realizes the conjunction's R program".into());
    }
    if report.best().fidelity < 1.0 - PROBABILITY_TOL {
        return Err(format!(
            "best fidelity {} for the conjunction's R program",
            report.best().fidelity
        ));
    }

    let mut unresolved = Vec::new();
    for name in ["R_V2", "Gamma_m1"] {
        let seq = nmr::builtin_sequence(name).map_err(|e| e.to_string())?;
        let target = nmr::builtin_target(name).map_err(|e| e.to_string())?;
        let count = nmr::convention_search(&seq, &target)
            .map_err(|e| e.to_string())?
            .validating_set()
            .len();
        unresolved.push(format!("{name} {count}/8"));
    }
    Ok(format!(
        "grid deterministic, composite diagonal everywhere, conjunction R realized under {validating}/8; unresolved printed programs: {}",
        unresolved.join(", ")
    ))
}

fn random_hermitian(rng: &mut ChaCha8Rng) -> DeviationMatrix {
    let mut mat = DMatrix::<Complex64>::zeros(4, 4);
    for i in 0..4 {
        mat[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..4 {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            mat[(i, j)] = z;
            mat[(j, i)] = z.conj();
        }
    }
    DeviationMatrix::new(mat).expect("hermitian by construction")
}

// 7. Noiseless tomography is a round trip: the line reads determine
// everything but the identity component, the rank report says exactly
// that, and the trace-pinned reconstruction recovers random Hermitian
// matrices and both prepared answer states.
fn tomography_round_trip() -> Result<String, String> {
    let conventions = Conventions::default();
    let rank = tomography::design_rank_report(&conventions).map_err(|e| e.to_string())?;
    if rank.rank != tomography::OBSERVABLE_RANK || rank.null_dim != 1 || !rank.identity_spans_null {
        return Err(format!(
            "design rank {} with null dimension {}, identity_spans_null = {}",
            rank.rank, rank.null_dim, rank.identity_spans_null
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x1ea7_f00d);
    let mut worst = 0.0f64;
    let mut cases: Vec<DeviationMatrix> = (0..100).map(|_| random_hermitian(&mut rng)).collect();
    cases.push(search::final_deviation_matrix(&parse("1, 2")).map_err(|e| e.to_string())?);
    cases.push(search::final_deviation_matrix(&parse("n=2; 2")).map_err(|e| e.to_string())?);
    for rho in &cases {
        let dataset =
            tomography::simulate_dataset(rho, 0.0, 0, &conventions).map_err(|e| e.to_string())?;
        let rebuilt = tomography::reconstruct(&dataset, &conventions).map_err(|e| e.to_string())?;
        worst = worst.max(rebuilt.frobenius_distance(rho).map_err(|e| e.to_string())?);
    }
    if worst > ROUNDTRIP_TOL {
        return Err(format!(
            "worst round-trip distance {worst:e} over {} cases",
            cases.len()
        ));
    }
    Ok(format!(
        "rank {}+identity null space as documented; worst distance {worst:e} over {} cases",
        tomography::OBSERVABLE_RANK,
        cases.len()
    ))
}

// 8. Reconstructed modulus tables have exactly the right support without
// noise, and realistic noise produces spurious-but-bounded off-support
// weight in nearly every run.
fn noise_study() -> Result<String, String> {
    let conventions = Conventions::default();

    let support_cases = [
        ("1, 2", vec![(3, 3, 1.0)]),
        (
            "n=2; 2",
            vec![(1, 1, 0.5), (1, 3, 0.5), (3, 1, 0.5), (3, 3, 0.5)],
        ),
    ];
    for (text, support) in &support_cases {
        let rho = search::final_deviation_matrix(&parse(text)).map_err(|e| e.to_string())?;
        let dataset =
            tomography::simulate_dataset(&rho, 0.0, 0, &conventions).map_err(|e| e.to_string())?;
        let rebuilt = tomography::reconstruct(&dataset, &conventions).map_err(|e| e.to_string())?;
        let table = tomography::modulus_table(&rebuilt);
        for (i, row) in table.iter().enumerate() {
            for (j, &got) in row.iter().enumerate() {
                let want = support
                    .iter()
                    .find(|(r, c, _)| (*r, *c) == (i, j))
                    .map_or(0.0, |(_, _, v)| *v);
                if (got - want).abs() > ROUNDTRIP_TOL {
                    return Err(format!(
                        "noiseless table for `{text}` has {got} at ({i}, {j}), want {want}"
                    ));
                }
            }
        }
    }

    let rho = search::final_deviation_matrix(&parse("1, 2")).map_err(|e| e.to_string())?;
    let mut in_band = 0usize;
    let mut worst_spurious = 0.0f64;
    for seed in 0..NOISE_RUNS {
        let dataset = tomography::simulate_dataset(&rho, NOISE_SIGMA, seed, &conventions)
            .map_err(|e| e.to_string())?;
        let rebuilt = tomography::reconstruct(&dataset, &conventions).map_err(|e| e.to_string())?;
        let table = tomography::modulus_table(&rebuilt);
        let peak = table.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        if peak == 0.0 {
            return Err(format!("seed {seed} reconstructed an all-zero table"));
        }
        let spurious = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| (i, j) != (3, 3))
            .map(|(i, j)| table[i][j] / peak)
            .fold(0.0f64, f64::max);
        worst_spurious = worst_spurious.max(spurious);
        if spurious > 0.0 && spurious <= SPURIOUS_CEILING {
            in_band += 1;
        }
    }
    if in_band < NOISE_PASS_FLOOR {
        return Err(format!(
            "only {in_band}/{NOISE_RUNS} noisy runs kept spurious peaks in (0, {SPURIOUS_CEILING}]; worst {worst_spurious}"
        ));
    }
    Ok(format!(
        "noiseless support exact; {in_band}/{NOISE_RUNS} noisy runs in band, worst spurious peak {worst_spurious:.3}"
    ))
}

// 9. Temporal averaging cancels everything but the answer population.
fn temporal_averaging() -> Result<String, String> {
    let check = |populations: [f64; 4]| -> Result<(), String> {
        let avg = state::temporal_average(populations);
        let want = populations[0] - (populations[1] + populations[2] + populations[3]) / 3.0;
        if (avg.entry(0, 0) - c(want, 0.0)).norm() > MATRIX_TOL {
            return Err(format!(
                "corner entry {} for {populations:?}, want {want}",
                avg.entry(0, 0)
            ));
        }
        if want <= 0.0 {
            return Err(format!(
                "populations {populations:?} do not single out the answer"
            ));
        }
        for i in 0..4 {
            for j in 0..4 {
                if (i, j) != (0, 0) && avg.entry(i, j).norm() > MATRIX_TOL {
                    return Err(format!(
                        "entry ({i}, {j}) = {} survives averaging for {populations:?}",
                        avg.entry(i, j)
                    ));
                }
            }
        }
        Ok(())
    };

    check([4.0, 3.0, 2.0, 1.0])?;
    let frozen = state::temporal_average([4.0, 3.0, 2.0, 1.0]);
    if (frozen.entry(0, 0) - c(2.0, 0.0)).norm() > MATRIX_TOL {
        return Err(format!("frozen case gives {}", frozen.entry(0, 0)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let rest: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let p00 = rest.iter().cloned().fold(0.0f64, f64::max) + rng.random_range(0.05..1.0);
        check([p00, rest[0], rest[1], rest[2]])?;
    }
    Ok("only the answer population survives the three-run average".into())
}

struct Criterion {
    number: usize,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<String, String>,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion {
            number: 1,
            name: "operator tables",
            budget: Some(Duration::from_secs(1)),
            run: operator_tables,
        },
        Criterion {
            number: 2,
            name: "named searches",
            budget: Some(Duration::from_secs(1)),
            run: named_searches,
        },
        Criterion {
            number: 3,
            name: "exhaustive sweep",
            budget: Some(Duration::from_secs(60)),
            run: exhaustive_sweep,
        },
        Criterion {
            number: 4,
            name: "U construction agreement",
            budget: Some(Duration::from_secs(30)),
            run: u_construction_agreement,
        },
        Criterion {
            number: 5,
            name: "unitarity everywhere",
            budget: None,
            run: unitarity_everywhere,
        },
        Criterion {
            number: 6,
            name: "convention harness",
            budget: None,
            run: convention_harness,
        },
        Criterion {
            number: 7,
            name: "tomography round trip",
            budget: Some(Duration::from_secs(10)),
            run: tomography_round_trip,
        },
        Criterion {
            number: 8,
            name: "noise study",
            budget: None,
            run: noise_study,
        },
        Criterion {
            number: 9,
            name: "temporal averaging",
            budget: None,
            run: temporal_averaging,
        },
    ];

    let mut failures = Vec::new();
    for criterion in criteria {
        let start = Instant::now();
        let outcome = (criterion.run)();
        let elapsed = start.elapsed();
        let over_budget = criterion.budget.is_some_and(|b| elapsed > b);
        match (&outcome, over_budget) {
            (Ok(detail), false) => {
                println!(
                    "PASS  {} {}: {} ({elapsed:.2?})",
                    criterion.number, criterion.name, detail
                );
            }
            (Ok(_), true) => {
                println!(
                    "FAIL  {} {}: exceeded the {:?} budget ({elapsed:.2?})",
                    criterion.number,
                    criterion.name,
                    criterion.budget.unwrap()
                );
                failures.push(criterion.number);
            }
            (Err(reason), _) => {
                println!(
                    "FAIL  {} {}: {} ({elapsed:.2?})",
                    criterion.number, criterion.name, reason
                );
                failures.push(criterion.number);
            }
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance criteria failed: {failures:?}"
    );
}
