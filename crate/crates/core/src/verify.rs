//! The reproducibility grid: one check per acceptance criterion, each
//! returning a pass flag and a short human-readable measurement.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::brauer_linalg::{gram_matrix, z_factor};
use crate::designs::{closed_form_f64, construct_design_state, design_constraints, orbit_moment};
use crate::error::Result;
use crate::pairings::{double_factorial, enumerate_pairings, PairingBasis, Permutation};
use crate::sampling::{empirical_moment_seeded, helstrom_experiment, EnsembleSpec};
use crate::tensor_rep::{
    dimension_cap, min_eigenvalue, rep_pairing, rep_permutation, rho_br, rho_sym, trace_distance, DenseOperator,
    StateVector,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u8, name: &str, passed: bool, detail: String) -> Self {
        Self { id, name: name.to_string(), passed, detail }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub workers: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 20_240_601, workers: 1 }
    }
}

/// Runs every criterion in order. Errors inside a check are reported as a
/// failure of that criterion rather than aborting the grid.
pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionResult> {
    type Check = fn(&VerifyOptions) -> Result<(bool, String)>;
    let checks: [(u8, &str, Check); 13] = [
        (1, "matching counts", |_| matching_counts()),
        (2, "gram oracle equivalence", |_| gram_oracle()),
        (3, "sum of traces", |_| sum_of_traces()),
        (4, "all-ones eigenvector and twirl", |_| all_ones_eigenvector()),
        (5, "trace distance closed form", |_| trace_distance_closed_form()),
        (6, "non-permutation sum is positive", |_| non_permutation_positive()),
        (7, "real 3-design", |_| real_three_design()),
        (8, "t=4 impossibility", |_| four_design_impossible()),
        (9, "sandwich bounds", |_| sandwich_bounds()),
        (10, "diagram algebra homomorphism", |_| homomorphism()),
        (11, "symmetric projector", |_| symmetric_projector()),
        (12, "monte carlo distinguisher", monte_carlo_distinguisher),
        (13, "empirical moments", empirical_moments),
    ];
    checks
        .iter()
        .map(|&(id, name, check)| match check(opts) {
            Ok((passed, detail)) => CriterionResult::new(id, name, passed, detail),
            Err(e) => CriterionResult::new(id, name, false, format!("error: {e}")),
        })
        .collect()
}

pub fn matching_counts() -> Result<(bool, String)> {
    let expected = [1u64, 3, 15, 105, 945, 10395];
    let mut counts = Vec::new();
    for t in 1..=6 {
        counts.push(enumerate_pairings(t)?.len() as u64);
    }
    let formula: Vec<u64> = (1..=6).map(|t| double_factorial(2 * t - 1)).collect();
    Ok((counts == expected && formula == expected, format!("counts {counts:?}")))
}

/// Integer view of a 0/1 operator; `None` if any entry is not exactly 0 or 1.
fn indicator(op: &DenseOperator) -> Option<Vec<u8>> {
    op.entries()
        .iter()
        .map(|z| match (z.re, z.im) {
            (re, im) if re == 0.0 && im == 0.0 => Some(0),
            (re, im) if re == 1.0 && im == 0.0 => Some(1),
            _ => None,
        })
        .collect()
}

pub fn gram_oracle() -> Result<(bool, String)> {
    let mut checked = 0;
    for t in 1..=3 {
        for d in 2..=3 {
            let gram = gram_matrix(t, d)?;
            let reps =
                gram.basis().iter().map(|m| rep_pairing(m, d).map(|op| indicator(&op))).collect::<Result<Vec<_>>>()?;
            for i in 0..gram.size() {
                for j in 0..gram.size() {
                    let (Some(a), Some(b)) = (&reps[i], &reps[j]) else {
                        return Ok((false, format!("non 0/1 entries at t={t}, d={d}")));
                    };
                    let overlap: u64 = a.iter().zip(b).map(|(&x, &y)| u64::from(x & y)).sum();
                    if BigUint::from(overlap) != gram.entry(i, j) {
                        return Ok((false, format!("mismatch at t={t}, d={d}, ({i},{j})")));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok((true, format!("{checked} entries agree")))
}

pub fn sum_of_traces() -> Result<(bool, String)> {
    for t in 1..=4 {
        for d in 1..=5 {
            let mut total = 0u64;
            for m in enumerate_pairings(t)?.iter() {
                let op = rep_pairing(m, d)?;
                total += op.entries().diagonal().iter().filter(|z| z.re == 1.0).count() as u64;
            }
            if BigUint::from(total) != z_factor(d, t) {
                return Ok((false, format!("t={t}, d={d}: sum {total} vs Z {}", z_factor(d, t))));
            }
        }
    }
    Ok((true, "sum of traces equals Z(d,t) for t<=4, d<=5".into()))
}

pub fn all_ones_eigenvector() -> Result<(bool, String)> {
    for t in 1..=4 {
        for d in 1..=6 {
            let gram = gram_matrix(t, d)?;
            let z = z_factor(d, t);
            if (0..gram.size()).any(|i| gram.row_sum(i) != z) {
                return Ok((false, format!("row sum differs from Z at t={t}, d={d}")));
            }
        }
    }
    let mut worst = 0.0f64;
    for t in 1..=3 {
        for d in 1..=4 {
            let twirl = orbit_moment(&StateVector::basis(d, 0)?, t)?;
            worst = worst.max(twirl.max_abs_diff(&rho_br(d, t)?)?);
        }
    }
    Ok((worst <= 1e-10, format!("G*1 = Z*1 exact; max twirl deviation {worst:.3e}")))
}

fn grid_points(ts: &[usize], ds: impl Iterator<Item = usize> + Clone) -> Vec<(usize, usize)> {
    let cap = dimension_cap() as u128;
    ts.iter()
        .flat_map(|&t| ds.clone().map(move |d| (t, d)))
        .filter(|&(t, d)| (d as u128).pow(t as u32) <= cap)
        .collect()
}

pub fn trace_distance_closed_form() -> Result<(bool, String)> {
    let mut worst = (0.0f64, 0, 0, 0.0, 0.0);
    for (t, d) in grid_points(&[2, 3, 4], 2..=6) {
        let numeric = trace_distance(&rho_br(d, t)?, &rho_sym(d, t)?)?;
        let closed = closed_form_f64(d, t);
        let gap = (numeric - closed).abs();
        if gap > worst.0 {
            worst = (gap, t, d, numeric, closed);
        }
    }
    let (gap, t, d, numeric, closed) = worst;
    Ok((
        gap <= 1e-9,
        format!("max |numeric - closed| = {gap:.6} at t={t}, d={d} (numeric {numeric:.6}, closed {closed:.6})"),
    ))
}

pub fn non_permutation_positive() -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for (t, d) in grid_points(&[2, 3, 4], 2..=3) {
        let mut sum = DenseOperator::zeros(d, t)?;
        for m in enumerate_pairings(t)?.iter().filter(|m| !m.is_permutation()) {
            sum.add_pairing(m, 1.0)?;
        }
        worst = worst.min(min_eigenvalue(&sum)?);
    }
    Ok((worst >= -1e-10, format!("smallest eigenvalue {worst:.3e}")))
}

pub fn real_three_design() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for d in 2..=6 {
        let psi = construct_design_state(d)?;
        for t in [2, 3] {
            worst = worst.max(trace_distance(&orbit_moment(&psi, t)?, &rho_sym(d, t)?)?);
        }
    }
    Ok((worst <= 1e-9, format!("max trace distance {worst:.3e}")))
}

pub fn four_design_impossible() -> Result<(bool, String)> {
    for d in 1..=50usize {
        let set = design_constraints(4, d)?;
        let r2 = BigRational::new(2.into(), (d + 1).into());
        let r4 = BigRational::new(8.into(), ((d + 1) * (d + 3)).into());
        let values_ok = set.value_for_exponent(2) == Some(&r2) && set.value_for_exponent(4) == Some(&r4);
        if !values_ok || set.consistent != (d == 1) {
            return Ok((false, format!("unexpected constraints at d={d}: consistent={}", set.consistent)));
        }
        if d > 1 && &r2 * &r2 == r4 {
            return Ok((false, format!("(r^2)^2 equals r^4 at d={d}")));
        }
    }
    Ok((true, "inconsistent for 2<=d<=50, consistent at d=1".into()))
}

pub fn sandwich_bounds() -> Result<(bool, String)> {
    let mut points = 0;
    for d in [8usize, 16, 32, 64] {
        for t in (2usize..).take_while(|&t| t * t < d) {
            let td = closed_form_f64(d, t);
            let x = (t * (t - 1)) as f64 / d as f64;
            let lower = 1.0 - (-x / 6.0).exp();
            let upper = 1.0 - (-x).exp();
            let scaled = td / x;
            if !(lower <= td && td <= upper && (1.0 / 12.0..=1.0).contains(&scaled)) {
                return Ok((false, format!("bounds fail at d={d}, t={t}: {lower:.6} <= {td:.6} <= {upper:.6}")));
            }
            points += 1;
        }
    }
    Ok((true, format!("{points} grid points inside the sandwich")))
}

pub fn homomorphism() -> Result<(bool, String)> {
    let d = 2;
    let mut pairs = 0;
    for t in 1..=3 {
        let basis = PairingBasis::new(t)?;
        let reps = basis.iter().map(|m| rep_pairing(m, d)).collect::<Result<Vec<_>>>()?;
        for (i, m) in basis.iter().enumerate() {
            for (j, n) in basis.iter().enumerate() {
                let comp = m.compose(n)?;
                let lhs = reps[i].mul(&reps[j])?;
                let idx = basis.index_of(&comp.product).expect("product lies in the basis");
                let rhs = reps[idx].scale((d as f64).powi(comp.loops as i32));
                if lhs.entries() != rhs.entries() {
                    return Ok((false, format!("mismatch at t={t} for {m} * {n}")));
                }
                pairs += 1;
            }
        }
    }
    Ok((true, format!("{pairs} products agree exactly")))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k)
        .fold(BigRational::one(), |acc, i| acc * BigRational::new((n - i).into(), (i + 1).into()))
        .to_f64()
        .unwrap_or(f64::NAN)
}

pub fn symmetric_projector() -> Result<(bool, String)> {
    let mut idempotency = 0.0f64;
    let mut trace_gap = 0.0f64;
    let mut unit_gap = 0.0f64;
    for t in 1..=4 {
        let perms = Permutation::all(t);
        for d in 1..=4 {
            let mut pi = DenseOperator::zeros(d, t)?;
            for sigma in &perms {
                pi = pi.add(&rep_permutation(sigma, d)?)?;
            }
            let pi = pi.scale(1.0 / perms.len() as f64);
            idempotency = idempotency.max(pi.mul(&pi)?.max_abs_diff(&pi)?);
            trace_gap = trace_gap.max((pi.trace().re - binomial(d + t - 1, t)).abs());
            unit_gap = unit_gap.max((rho_sym(d, t)?.trace().re - 1.0).abs());
            unit_gap = unit_gap.max((rho_br(d, t)?.trace().re - 1.0).abs());
        }
    }
    Ok((
        idempotency <= 1e-12 && trace_gap <= 1e-10 && unit_gap <= 1e-12,
        format!("|P^2-P| {idempotency:.3e}, |Tr P - binom| {trace_gap:.3e}, |Tr rho - 1| {unit_gap:.3e}"),
    ))
}

pub fn monte_carlo_distinguisher(opts: &VerifyOptions) -> Result<(bool, String)> {
    let two = helstrom_experiment(2, 2, 20_000, opts.seed, opts.workers)?;
    let one = helstrom_experiment(1, 3, 10_000, opts.seed, opts.workers)?;
    let ok_two = (two.empirical_success - 0.625).abs() <= 3.0 * two.std_error;
    let ok_one = (one.empirical_success - 0.5).abs() <= 3.0 * one.std_error;
    let elapsed = two.elapsed_seconds + one.elapsed_seconds;
    Ok((
        ok_two && ok_one && elapsed < 60.0,
        format!(
            "t=2,d=2: {:.5} vs 0.625 (sigma {:.5}); t=1,d=3: {:.5} vs 0.5 (sigma {:.5})",
            two.empirical_success, two.std_error, one.empirical_success, one.std_error
        ),
    ))
}

pub fn empirical_moments(opts: &VerifyOptions) -> Result<(bool, String)> {
    let n = 100_000;
    let unitary = empirical_moment_seeded(&EnsembleSpec::unitary_haar(2, 2)?, n, opts.seed, opts.workers)?;
    let orbit = EnsembleSpec::orthogonal_orbit(StateVector::basis(2, 0)?, 2)?;
    let orthogonal = empirical_moment_seeded(&orbit, n, opts.seed.wrapping_add(1), opts.workers)?;
    let du = unitary.max_abs_diff(&rho_sym(2, 2)?)?;
    let dor = orthogonal.max_abs_diff(&rho_br(2, 2)?)?;
    Ok((du <= 5e-3 && dor <= 5e-3, format!("unitary {du:.3e}, orthogonal {dor:.3e}")))
}
