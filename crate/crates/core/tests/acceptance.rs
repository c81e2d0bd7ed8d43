//! Acceptance grid. Each criterion is checked against brute-force oracles
//! built here from index arithmetic, independent of the library's own
//! operator assembly, and prints one PASS/FAIL line.

use std::process::ExitCode;
use std::time::Instant;

use brauer_weingarten::brauer_linalg::gram_matrix;
use brauer_weingarten::designs::{construct_design_state, design_constraints, orbit_moment};
use brauer_weingarten::sampling::{empirical_moment_seeded, helstrom_experiment, EnsembleSpec};
use brauer_weingarten::tensor_rep::{closed_form_distance, rho_br, rho_sym, StateVector};
use brauer_weingarten::{enumerate_pairings, PairPartition, PairingBasis, Permutation};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

const TD_TOL: f64 = 1e-9;
const TWIRL_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const DESIGN_TOL: f64 = 1e-9;
const PROJECTOR_TOL: f64 = 1e-12;
const MOMENT_TOL: f64 = 5e-3;
const SIGMAS: f64 = 3.0;
const CAP: usize = 4096;
const SEED: u64 = 7_031_999;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// `rep(m)` as an integer matrix: entry `(I, J)` is 1 iff the digits of the
/// row index (points `1..t`) and column index (points `t+1..2t`) agree on
/// every pair.
fn oracle_rep(m: &PairPartition, d: usize) -> DMatrix<i64> {
    let t = m.t();
    let n = d.pow(t as u32);
    let pairs: Vec<(usize, usize)> = m.pairs().collect();
    let digit = |index: usize, k: usize| (index / d.pow((t - k) as u32)) % d;
    DMatrix::from_fn(n, n, |row, col| {
        let value = |p: usize| if p <= t { digit(row, p) } else { digit(col, p - t) };
        i64::from(pairs.iter().all(|&(a, b)| value(a) == value(b)))
    })
}

/// Tensor-factor permutation `|i₁…i_t⟩ ↦ |i_{σ⁻¹(1)}…i_{σ⁻¹(t)}⟩`.
fn oracle_perm(sigma: &Permutation, d: usize) -> DMatrix<i64> {
    let t = sigma.degree();
    let n = d.pow(t as u32);
    let inv = sigma.inverse();
    let mut out = DMatrix::zeros(n, n);
    for col in 0..n {
        let digits: Vec<usize> = (1..=t).map(|k| (col / d.pow((t - k) as u32)) % d).collect();
        let row = (1..=t).fold(0, |acc, k| acc * d + digits[inv.apply(k) - 1]);
        out[(row, col)] = 1;
    }
    out
}

fn to_f64(m: &DMatrix<i64>) -> DMatrix<f64> {
    m.map(|x| x as f64)
}

fn product(range: impl Iterator<Item = usize>) -> u64 {
    range.map(|x| x as u64).product()
}

/// `∏_{j<t}(d+2j)`, computed without the library.
fn z_oracle(d: usize, t: usize) -> u64 {
    product((0..t).map(|j| d + 2 * j))
}

fn p_oracle(d: usize, t: usize) -> u64 {
    product((0..t).map(|j| d + j))
}

fn oracle_rho_sym(d: usize, t: usize) -> DMatrix<f64> {
    let sum = Permutation::all(t)
        .iter()
        .fold(DMatrix::zeros(d.pow(t as u32), d.pow(t as u32)), |acc, s| acc + oracle_perm(s, d));
    to_f64(&sum) / p_oracle(d, t) as f64
}

fn oracle_rho_br(d: usize, t: usize) -> DMatrix<f64> {
    let n = d.pow(t as u32);
    let sum = enumerate_pairings(t).unwrap().iter().fold(DMatrix::zeros(n, n), |acc, m| acc + oracle_rep(m, d));
    to_f64(&sum) / z_oracle(d, t) as f64
}

fn real_trace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    0.5 * (a - b).symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

/// Real part of a library operator, after checking it carries no imaginary part.
fn real_part(op: &brauer_weingarten::tensor_rep::DenseOperator) -> DMatrix<f64> {
    assert!(op.entries().iter().all(|z| z.im.abs() < 1e-14));
    op.entries().map(|z| z.re)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

fn within_cap(d: usize, t: usize) -> bool {
    d.pow(t as u32) <= CAP
}

fn c1_matching_counts() -> Outcome {
    let expected = [1usize, 3, 15, 105, 945, 10395];
    let got: Vec<usize> = (1..=6).map(|t| enumerate_pairings(t).unwrap().len()).collect();
    if got == expected {
        Ok(format!("{got:?}"))
    } else {
        Err(format!("got {got:?}, expected {expected:?}"))
    }
}

fn c2_gram_oracle() -> Outcome {
    let mut entries = 0;
    for t in 1..=3 {
        for d in [2, 3] {
            let gram = gram_matrix(t, d).unwrap();
            let reps: Vec<DMatrix<i64>> = gram.basis().iter().map(|m| oracle_rep(m, d)).collect();
            for i in 0..gram.size() {
                for j in 0..gram.size() {
                    let brute = (reps[i].transpose() * &reps[j]).trace();
                    if BigInt::from(brute) != BigInt::from(gram.entry(i, j)) {
                        return Err(format!("t={t}, d={d}, ({i},{j}): gram {} vs trace {brute}", gram.entry(i, j)));
                    }
                    entries += 1;
                }
            }
        }
    }
    Ok(format!("{entries} entries equal exactly"))
}

fn c3_sum_of_traces() -> Outcome {
    for t in 1..=4 {
        for d in 1..=5 {
            let sum: i64 = enumerate_pairings(t).unwrap().iter().map(|m| oracle_rep(m, d).trace()).sum();
            if sum as u64 != z_oracle(d, t) {
                return Err(format!("t={t}, d={d}: {sum} vs {}", z_oracle(d, t)));
            }
        }
    }
    let t2d2: Vec<i64> = enumerate_pairings(2).unwrap().iter().map(|m| oracle_rep(m, 2).trace()).collect();
    Ok(format!("t<=4, d<=5 exact; t=2, d=2 traces {t2d2:?}"))
}

fn c4_all_ones() -> Outcome {
    for t in 1..=4 {
        for d in 1..=6 {
            let gram = gram_matrix(t, d).unwrap();
            let z = z_oracle(d, t);
            for i in 0..gram.size() {
                if gram.row_sum(i) != z.into() {
                    return Err(format!("t={t}, d={d}: row {i} sums to {}", gram.row_sum(i)));
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for t in 1..=3 {
        for d in 1..=4 {
            let twirl = real_part(&orbit_moment(&StateVector::basis(d, 0).unwrap(), t).unwrap());
            worst = worst.max(max_abs(&(twirl - oracle_rho_br(d, t))));
        }
    }
    if worst <= TWIRL_TOL {
        Ok(format!("G*1 = Z*1 exact; twirl deviation {worst:.2e}"))
    } else {
        Err(format!("twirl deviation {worst:.2e} > {TWIRL_TOL:e}"))
    }
}

fn c5_trace_distance() -> Outcome {
    let mut lines = Vec::new();
    let mut failed = false;
    for t in [2, 3, 4] {
        for d in 2..=6 {
            if !within_cap(d, t) {
                continue;
            }
            let numeric = real_trace_distance(&oracle_rho_br(d, t), &oracle_rho_sym(d, t));
            let exact = BigRational::one()
                - (1..t).fold(BigRational::one(), |acc, j| acc * BigRational::new((d + j).into(), (d + 2 * j).into()));
            assert_eq!(exact, closed_form_distance(d, t));
            let gap = (numeric - exact.to_f64().unwrap()).abs();
            if gap > TD_TOL {
                failed = true;
                lines.push(format!("(t={t},d={d}) numeric {numeric:.6} vs {exact}"));
            }
        }
    }
    if failed {
        Err(format!("{} grid points off: {}", lines.len(), lines.join("; ")))
    } else {
        Ok("all grid points within 1e-9".into())
    }
}

fn c6_positive() -> Outcome {
    let mut worst = f64::INFINITY;
    for t in [2, 3, 4] {
        for d in [2, 3] {
            if !within_cap(d, t) {
                continue;
            }
            let n = d.pow(t as u32);
            let sum = enumerate_pairings(t)
                .unwrap()
                .iter()
                .filter(|m| !m.is_permutation())
                .fold(DMatrix::zeros(n, n), |acc, m| acc + oracle_rep(m, d));
            worst = worst.min(to_f64(&sum).symmetric_eigen().eigenvalues.min());
        }
    }
    if worst >= -PSD_TOL {
        Ok(format!("min eigenvalue {worst:.2e}"))
    } else {
        Err(format!("min eigenvalue {worst:.2e}"))
    }
}

fn c7_three_design() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=6 {
        let psi = construct_design_state(d).unwrap();
        let r: f64 = psi.amplitudes().iter().map(|a| a * a).sum::<num_complex::Complex64>().norm();
        assert!((r * r - 2.0 / (d as f64 + 1.0)).abs() < 1e-12);
        for t in [2, 3] {
            let moment = real_part(&orbit_moment(&psi, t).unwrap().hermitian_part());
            worst = worst.max(real_trace_distance(&moment, &oracle_rho_sym(d, t)));
        }
    }
    if worst <= DESIGN_TOL {
        Ok(format!("max trace distance {worst:.2e}"))
    } else {
        Err(format!("max trace distance {worst:.2e}"))
    }
}

fn c8_impossibility() -> Outcome {
    for d in 1..=50usize {
        let set = design_constraints(4, d).unwrap();
        let r2 = BigRational::new(2.into(), (d + 1).into());
        let r4 = BigRational::new(8.into(), ((d + 1) * (d + 3)).into());
        if set.value_for_exponent(2) != Some(&r2) || set.value_for_exponent(4) != Some(&r4) {
            return Err(format!("d={d}: constraint values differ"));
        }
        let compatible = &r2 * &r2 == r4;
        if set.consistent != compatible || compatible != (d == 1) {
            return Err(format!("d={d}: consistent={} compatible={compatible}", set.consistent));
        }
    }
    Ok("inconsistent for 2<=d<=50, consistent at d=1".into())
}

fn c9_sandwich() -> Outcome {
    let mut points = 0;
    for d in [8usize, 16, 32, 64] {
        for t in (2usize..).take_while(|&t| t * t < d) {
            let td = closed_form_distance(d, t).to_f64().unwrap();
            let x = (t * (t - 1)) as f64 / d as f64;
            let (lo, hi) = (1.0 - (-x / 6.0).exp(), 1.0 - (-x).exp());
            if !(lo <= td && td <= hi) {
                return Err(format!("d={d}, t={t}: {td} outside [{lo}, {hi}]"));
            }
            let scaled = td / x;
            if !(1.0 / 12.0..=1.0).contains(&scaled) {
                return Err(format!("d={d}, t={t}: TD*d/(t(t-1)) = {scaled}"));
            }
            points += 1;
        }
    }
    Ok(format!("{points} grid points"))
}

fn c10_homomorphism() -> Outcome {
    let d = 2;
    let mut checked = 0;
    for t in 1..=3 {
        let basis = PairingBasis::new(t).unwrap();
        let reps: Vec<DMatrix<i64>> = basis.iter().map(|m| oracle_rep(m, d)).collect();
        for (i, m) in basis.iter().enumerate() {
            for (j, n) in basis.iter().enumerate() {
                let comp = m.compose(n).unwrap();
                let k = basis.index_of(&comp.product).unwrap();
                let rhs = &reps[k] * (d as i64).pow(comp.loops as u32);
                if &reps[i] * &reps[j] != rhs {
                    return Err(format!("t={t}: {m} * {n}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} products exact"))
}

fn c11_projector() -> Outcome {
    let mut idem = 0.0f64;
    let mut unit = 0.0f64;
    for t in 1..=4 {
        let perms = Permutation::all(t);
        for d in 1..=4usize {
            let n = d.pow(t as u32);
            let sum = perms.iter().fold(DMatrix::zeros(n, n), |acc, s| acc + oracle_perm(s, d));
            let pi = to_f64(&sum) / perms.len() as f64;
            idem = idem.max(max_abs(&(&pi * &pi - &pi)));
            let rank: u64 = product((0..t).map(|j| d + j)) / product(1..=t);
            if (pi.trace() - rank as f64).abs() > 1e-9 {
                return Err(format!("t={t}, d={d}: Tr = {} vs {rank}", pi.trace()));
            }
            unit = unit.max((rho_sym(d, t).unwrap().trace().re - 1.0).abs());
            unit = unit.max((rho_br(d, t).unwrap().trace().re - 1.0).abs());
        }
    }
    if idem <= PROJECTOR_TOL && unit <= PROJECTOR_TOL {
        Ok(format!("|P^2-P| {idem:.2e}, |Tr rho - 1| {unit:.2e}"))
    } else {
        Err(format!("|P^2-P| {idem:.2e}, |Tr rho - 1| {unit:.2e}"))
    }
}

fn c12_distinguisher() -> Outcome {
    let started = Instant::now();
    let two = helstrom_experiment(2, 2, 20_000, SEED, 4).unwrap();
    let one = helstrom_experiment(1, 3, 10_000, SEED, 4).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let z2 = (two.empirical_success - 0.625) / two.std_error;
    let z1 = (one.empirical_success - 0.5) / one.std_error;
    let detail = format!(
        "t=2,d=2: {:.5} vs 0.625 ({z2:+.1} sigma, sigma={:.5}); t=1,d=3: {:.5} vs 0.5 ({z1:+.1} sigma); {elapsed:.1}s",
        two.empirical_success, two.std_error, one.empirical_success
    );
    if z2.abs() <= SIGMAS && z1.abs() <= SIGMAS && elapsed < 60.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c13_empirical_moments() -> Outcome {
    let n = 100_000;
    let unitary = empirical_moment_seeded(&EnsembleSpec::unitary_haar(2, 2).unwrap(), n, SEED, 4).unwrap();
    let orbit = EnsembleSpec::orthogonal_orbit(StateVector::basis(2, 0).unwrap(), 2).unwrap();
    let orthogonal = empirical_moment_seeded(&orbit, n, SEED + 1, 4).unwrap();
    let du = unitary.entries().zip_map(&oracle_rho_sym(2, 2), |a, b| (a.re - b).hypot(a.im)).amax();
    let dor = orthogonal.entries().zip_map(&oracle_rho_br(2, 2), |a, b| (a.re - b).hypot(a.im)).amax();
    let detail = format!("unitary {du:.2e}, orthogonal {dor:.2e} (tol {MOMENT_TOL:e})");
    if du <= MOMENT_TOL && dor <= MOMENT_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("matching counts", c1_matching_counts),
        ("gram entries equal brute-force traces", c2_gram_oracle),
        ("sum of traces equals Z(d,t)", c3_sum_of_traces),
        ("all-ones eigenvector and twirl", c4_all_ones),
        ("trace distance equals closed form", c5_trace_distance),
        ("non-permutation sum is positive semidefinite", c6_positive),
        ("real 3-design state", c7_three_design),
        ("t=4 constraints inconsistent", c8_impossibility),
        ("sandwich bounds", c9_sandwich),
        ("diagram algebra homomorphism", c10_homomorphism),
        ("symmetric projector", c11_projector),
        ("monte carlo distinguisher", c12_distinguisher),
        ("empirical moments", c13_empirical_moments),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{:>2}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
