//! Orthogonal-orbit moment operators and exact-design constraints.
//!
//! Twirling `|ψ⟩⟨ψ|^⊗t` over Haar-random `O ∈ O(d)` lands in the span of
//! the Brauer diagrams. Its coefficients are `c = W·b` with overlap data
//! `b_m = r^(t − pr(m))`, `r = |⟨ψ*|ψ⟩|`, so the whole orbit moment is a
//! function of `r` alone.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::brauer_linalg::{gram_matrix_for, p_factor, CoefficientVector, WeingartenMatrix};
use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::pairings::{cycle_count, PairPartition, PairingBasis, Permutation};
use crate::tensor_rep::{
    closed_form_distance, min_eigenvalue, rho_sym, tensor_side, trace_distance, DenseOperator, StateVector,
};

/// `|⟨ψ*|ψ⟩| ∈ [0, 1]`.
pub fn conjugate_overlap(psi: &StateVector) -> f64 {
    psi.conjugate_overlap()
}

/// Weingarten data for one `(d, t)`, reusable across seed states.
#[derive(Clone, Debug)]
pub struct OrbitTwirl {
    basis: PairingBasis,
    weingarten: WeingartenMatrix,
}

impl OrbitTwirl {
    pub fn new(d: usize, t: usize) -> Result<Self> {
        tensor_side(d, t)?;
        let basis = PairingBasis::new(t)?;
        let gram = gram_matrix_for(basis.clone(), d)?;
        let weingarten = WeingartenMatrix::from_gram(&gram)?;
        Ok(Self { basis, weingarten })
    }

    pub fn d(&self) -> usize {
        self.weingarten.d
    }

    pub fn t(&self) -> usize {
        self.weingarten.t
    }

    /// Diagram coefficients of the orbit moment for a seed with conjugate
    /// overlap `r`.
    pub fn coefficients(&self, r: f64) -> Result<CoefficientVector> {
        let t = self.t();
        let b = CoefficientVector {
            t,
            values: self.basis.iter().map(|m| r.powi((t - m.propagating_number()) as i32)).collect(),
        };
        crate::brauer_linalg::twirl_coefficients(&self.weingarten, &b)
    }

    pub fn moment_for_overlap(&self, r: f64) -> Result<DenseOperator> {
        let c = self.coefficients(r)?;
        let mut op = DenseOperator::zeros(self.d(), self.t())?;
        for (m, &coeff) in self.basis.iter().zip(&c.values) {
            if coeff != 0.0 {
                op.add_pairing(m, coeff)?;
            }
        }
        Ok(op)
    }

    pub fn moment(&self, psi: &StateVector) -> Result<DenseOperator> {
        if psi.d() != self.d() {
            return Err(Error::Size(format!("state in C^{} twirled on d={}", psi.d(), self.d())));
        }
        self.moment_for_overlap(psi.conjugate_overlap())
    }
}

/// `∫ (O|ψ⟩⟨ψ|Oᵀ)^⊗t dO` via the Weingarten pipeline.
pub fn orbit_moment(psi: &StateVector, t: usize) -> Result<DenseOperator> {
    OrbitTwirl::new(psi.d(), t)?.moment(psi)
}

/// `√(½(1−s))|0⟩ + i√(½(1+s))|1⟩` with `s = √(2/(d+1))`, padded with zeros
/// to dimension `d`; its conjugate overlap squared is `2/(d+1)`.
pub fn construct_design_state(d: usize) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::Domain(format!("the two-amplitude design state needs d >= 2, got d={d}")));
    }
    design_family_state(d, (2.0 / (d as f64 + 1.0)).sqrt())
}

/// Member of the two-amplitude family with conjugate overlap `s ∈ [0, 1]`.
pub fn design_family_state(d: usize, s: f64) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::Domain(format!("the two-amplitude family needs d >= 2, got d={d}")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("conjugate overlap {s} outside [0, 1]")));
    }
    let mut amplitudes = vec![Complex64::zero(); d];
    amplitudes[0] = Complex64::new((0.5 * (1.0 - s)).sqrt(), 0.0);
    amplitudes[1] = Complex64::new(0.0, (0.5 * (1.0 + s)).sqrt());
    StateVector::normalized(amplitudes)
}

/// One constraint `r^exponent = required_value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapConstraint {
    pub exponent: u32,
    /// Propagating number of the diagram class this constraint came from.
    pub propagating_number: usize,
    pub required_value: ExactRational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignConstraintSet {
    pub t: usize,
    pub d: usize,
    /// Ordered by increasing exponent.
    pub constraints: Vec<OverlapConstraint>,
    pub consistent: bool,
    pub witness_r_squared: Option<f64>,
}

impl DesignConstraintSet {
    pub fn value_for_exponent(&self, exponent: u32) -> Option<&BigRational> {
        self.constraints.iter().find(|c| c.exponent == exponent).map(|c| &c.required_value.0)
    }
}

/// Conditions on `r = |⟨ψ*|ψ⟩|` under which the orthogonal orbit of `ψ`
/// reproduces `ρ_sym` exactly, derived from `G·c` with `c` the permutation
/// coefficients `1/P(d,t)`.
pub fn design_constraints(t: usize, d: usize) -> Result<DesignConstraintSet> {
    if d == 0 {
        return Err(Error::Size("dimension d must be positive".into()));
    }
    let basis = PairingBasis::new(t)?;
    let perms: Vec<Vec<usize>> =
        Permutation::all(t).iter().map(|s| PairPartition::from_permutation(s).partner()).collect();
    let p = BigRational::from_integer(p_factor(d, t).into());
    let powers: Vec<BigUint> = (0..=t).map(|k| BigUint::from(d).pow(k as u32)).collect();

    // (G·c)_m = (1/P) Σ_σ d^{cycles(m ∪ σ)}, grouped by pr(m)
    let mut classes: BTreeMap<usize, BigRational> = BTreeMap::new();
    for m in &basis {
        let partner = m.partner();
        let mut histogram = vec![0u64; t + 1];
        for sigma in &perms {
            histogram[cycle_count(&partner, sigma)] += 1;
        }
        let total: BigUint = histogram.iter().zip(&powers).map(|(&n, pw)| BigUint::from(n) * pw).sum();
        let value = BigRational::from_integer(total.into()) / &p;
        let pr = m.propagating_number();
        match classes.get(&pr) {
            Some(existing) if *existing != value => {
                return Err(Error::Structural(format!(
                    "diagrams with propagating number {pr} disagree: {existing} vs {value} (t={t}, d={d})"
                )));
            }
            Some(_) => {}
            None => {
                classes.insert(pr, value);
            }
        }
    }

    if classes.get(&t) != Some(&BigRational::one()) {
        return Err(Error::Structural(format!("permutation class does not evaluate to 1 at t={t}, d={d}")));
    }

    let mut constraints: Vec<OverlapConstraint> = classes
        .into_iter()
        .filter(|&(pr, _)| pr < t)
        .map(|(pr, value)| OverlapConstraint {
            exponent: (t - pr) as u32,
            propagating_number: pr,
            required_value: value.into(),
        })
        .collect();
    constraints.sort_by_key(|c| c.exponent);

    let consistent = constraints_consistent(&constraints);
    let witness_r_squared = constraints
        .first()
        .filter(|_| consistent)
        .map(|c| c.required_value.to_f64().powf(2.0 / c.exponent as f64));
    Ok(DesignConstraintSet { t, d, constraints, consistent, witness_r_squared })
}

/// `{r^kᵢ = vᵢ}` admits a common `r ∈ [0, 1]` iff every `vᵢ ∈ [0, 1]` and
/// `vᵢ^kⱼ = vⱼ^kᵢ` for every pair.
fn constraints_consistent(constraints: &[OverlapConstraint]) -> bool {
    let in_range = constraints.iter().all(|c| {
        let v = &c.required_value.0;
        !v.is_negative() && *v <= BigRational::one()
    });
    in_range
        && constraints.iter().enumerate().all(|(i, a)| {
            constraints[i + 1..]
                .iter()
                .all(|b| a.required_value.0.pow(b.exponent as i32) == b.required_value.0.pow(a.exponent as i32))
        })
}

/// The `t ≥ 4` no-go: inconsistent for every `d ≥ 2`, consistent at `d = 1`.
pub fn impossibility_report(t: usize, d: usize) -> Result<DesignConstraintSet> {
    if t < 4 {
        return Err(Error::Domain(format!("the no-go statement concerns t >= 4, got t={t}")));
    }
    let set = design_constraints(t, d)?;
    let expected = d == 1;
    if set.consistent != expected {
        return Err(Error::Structural(format!(
            "constraint set at t={t}, d={d} is {}consistent",
            if set.consistent { "" } else { "in" }
        )));
    }
    Ok(set)
}

/// Numeric comparison of an orbit moment against the Haar moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub t: usize,
    pub d: usize,
    pub trace_distance_numeric: f64,
    /// `1 − ∏_{j=1}^{t−1}(d+j)/(d+2j)`, attached for real seed states. It
    /// bounds `trace_distance_numeric` from above.
    pub trace_distance_closed_form: Option<ExactRational>,
    pub one_norm: f64,
    /// Smallest eigenvalue of the orbit moment.
    pub min_eigenvalue_check: f64,
    pub notes: String,
}

pub fn exact_design_check(psi: &StateVector, t: usize) -> Result<MomentReport> {
    let d = psi.d();
    let moment = orbit_moment(psi, t)?;
    let sym = rho_sym(d, t)?;
    let td = trace_distance(&moment, &sym)?;
    let mut notes = Vec::new();
    let closed = if psi.is_real() {
        notes.push("real seed: orbit moment is rho_br".to_string());
        Some(closed_form_distance(d, t).into())
    } else {
        notes.push(format!("conjugate overlap r = {}", psi.conjugate_overlap()));
        None
    };
    if d == 1 {
        notes.push("d = 1: every state equals |0> up to phase".into());
    }
    Ok(MomentReport {
        t,
        d,
        trace_distance_numeric: td,
        trace_distance_closed_form: closed,
        one_norm: 2.0 * td,
        min_eigenvalue_check: min_eigenvalue(&moment)?,
        notes: notes.join("; "),
    })
}

/// Closed form as `f64`, for tabulation.
pub fn closed_form_f64(d: usize, t: usize) -> f64 {
    closed_form_distance(d, t).to_f64().unwrap_or(f64::NAN)
}
