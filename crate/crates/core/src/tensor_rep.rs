//! Dense operators on `(C^d)^⊗t`.
//!
//! Multi-indices are row-major with tensor factor 1 as the most significant
//! digit in base `d`. Diagram points `1..=t` label the row (output) digits
//! and `t+1..=2t` the column (input) digits.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::brauer_linalg::{p_factor, z_factor};
use crate::error::{Error, Result};
use crate::pairings::{PairPartition, PairingBasis, Permutation};

pub const DEFAULT_DIM_CAP: usize = 4096;

/// Tolerance on `max |A − A†|` accepted by the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;

static DIM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIM_CAP);

/// Largest side length `d^t` a dense operator may have.
pub fn dimension_cap() -> usize {
    DIM_CAP.load(Ordering::Relaxed)
}

pub fn set_dimension_cap(cap: usize) {
    DIM_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// `d^t`, or a cap error when it exceeds [`dimension_cap`].
pub fn tensor_side(d: usize, t: usize) -> Result<usize> {
    if d == 0 || t == 0 {
        return Err(Error::Size(format!("d and t must be positive, got d={d}, t={t}")));
    }
    let cap = dimension_cap();
    let required = (d as u128).checked_pow(t as u32).unwrap_or(u128::MAX);
    if required > cap as u128 {
        return Err(Error::MemoryCap { required, cap });
    }
    Ok(required as usize)
}

/// A complex square matrix acting on `(C^d)^⊗t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    t: usize,
    d: usize,
    entries: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn zeros(d: usize, t: usize) -> Result<Self> {
        let n = tensor_side(d, t)?;
        Ok(Self { t, d, entries: DMatrix::zeros(n, n) })
    }

    pub fn identity(d: usize, t: usize) -> Result<Self> {
        let n = tensor_side(d, t)?;
        Ok(Self { t, d, entries: DMatrix::identity(n, n) })
    }

    pub fn from_matrix(d: usize, t: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        let n = tensor_side(d, t)?;
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::Size(format!(
                "{}x{} matrix cannot act on (C^{d})^⊗{t}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { t, d, entries })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// Adds `coeff · rep(m)`.
    pub fn add_pairing(&mut self, m: &PairPartition, coeff: f64) -> Result<()> {
        if m.t() != self.t {
            return Err(Error::Size(format!("diagram on t={} added to operator on t={}", m.t(), self.t)));
        }
        let c = Complex64::new(coeff, 0.0);
        for_each_pairing_entry(m, self.d, |row, col| self.entries[(row, col)] += c);
        Ok(())
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.t == other.t && self.d == other.d {
            Ok(())
        } else {
            Err(Error::Size(format!(
                "operators on (C^{})^⊗{} and (C^{})^⊗{} do not match",
                self.d, self.t, other.d, other.t
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { t: self.t, d: self.d, entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { t: self.t, d: self.d, entries: &self.entries - &other.entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { t: self.t, d: self.d, entries: &self.entries * &other.entries })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { t: self.t, d: self.d, entries: &self.entries * Complex64::new(factor, 0.0) }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `max |A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.side();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `½(A + A†)`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.entries.adjoint();
        Self { t: self.t, d: self.d, entries: (&self.entries + adj) * Complex64::new(0.5, 0.0) }
    }

    /// `⟨v|A|v⟩` for a vector on the full tensor space.
    pub fn expectation(&self, v: &DVector<Complex64>) -> Result<Complex64> {
        if v.len() != self.side() {
            return Err(Error::Size(format!("vector of length {} against operator side {}", v.len(), self.side())));
        }
        Ok(v.dotc(&(&self.entries * v)))
    }

    /// Traces out the last tensor factor.
    pub fn partial_trace_last(&self) -> Result<Self> {
        if self.t < 2 {
            return Err(Error::Size("cannot trace out the only tensor factor".into()));
        }
        let d = self.d;
        let n = self.side() / d;
        let entries = DMatrix::from_fn(n, n, |i, j| (0..d).map(|k| self.entries[(i * d + k, j * d + k)]).sum());
        Ok(Self { t: self.t - 1, d, entries })
    }

    fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Contract(format!("operator is not Hermitian (max |A − A†| = {defect:e})")));
        }
        Ok(())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.values)
    }

    /// Eigendecomposition of the Hermitian part, eigenvalues ascending.
    pub fn eigen(&self) -> Result<HermitianEigen> {
        self.require_hermitian()?;
        let h = self.hermitian_part().entries;
        let computation_err = || Error::Computation {
            t: self.t,
            d: self.d,
            reason: "Hermitian eigendecomposition did not converge".into(),
        };
        let (values, vectors) = if h.iter().all(|z| z.im == 0.0) {
            let re = h.map(|z| z.re);
            let eig = re.try_symmetric_eigen(f64::EPSILON, 0).ok_or_else(computation_err)?;
            (eig.eigenvalues, eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let eig = h.try_symmetric_eigen(f64::EPSILON, 0).ok_or_else(computation_err)?;
            (eig.eigenvalues, eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&k| values[k]).collect();
        let sorted_vectors = DMatrix::from_fn(vectors.nrows(), order.len(), |i, j| vectors[(i, order[j])]);
        Ok(HermitianEigen { values: sorted_values, vectors: sorted_vectors })
    }
}

/// Spectrum and orthonormal eigenvectors (as columns) of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Calls `f(row, col)` for every unit entry of `rep(m)`.
fn for_each_pairing_entry(m: &PairPartition, d: usize, mut f: impl FnMut(usize, usize)) {
    let t = m.t();
    // place value of each point's digit within its row or column index
    let place = |k: usize| d.pow((t - k) as u32);
    let weights: Vec<(usize, usize)> = m
        .pairs()
        .map(|(a, b)| {
            let mut w = (0, 0);
            for p in [a, b] {
                if p <= t {
                    w.0 += place(p);
                } else {
                    w.1 += place(p - t);
                }
            }
            w
        })
        .collect();
    let mut digits = vec![0usize; t];
    let (mut row, mut col) = (0usize, 0usize);
    loop {
        f(row, col);
        // odometer increment over one shared value per pair
        let mut k = 0;
        loop {
            if k == t {
                return;
            }
            digits[k] += 1;
            row += weights[k].0;
            col += weights[k].1;
            if digits[k] < d {
                break;
            }
            row -= d * weights[k].0;
            col -= d * weights[k].1;
            digits[k] = 0;
            k += 1;
        }
    }
}

/// The 0/1 operator of a Brauer diagram.
pub fn rep_pairing(m: &PairPartition, d: usize) -> Result<DenseOperator> {
    let mut op = DenseOperator::zeros(d, m.t())?;
    op.add_pairing(m, 1.0)?;
    Ok(op)
}

/// The tensor-factor permutation `σ ⊗ᵢ|ψᵢ⟩ = ⊗ᵢ|ψ_{σ⁻¹(i)}⟩`.
pub fn rep_permutation(sigma: &Permutation, d: usize) -> Result<DenseOperator> {
    let t = sigma.degree();
    let n = tensor_side(d, t)?;
    let inv = sigma.inverse();
    let mut entries = DMatrix::zeros(n, n);
    let mut input = vec![0usize; t];
    for col in 0..n {
        let mut rest = col;
        for k in (0..t).rev() {
            input[k] = rest % d;
            rest /= d;
        }
        let row = (1..=t).fold(0, |acc, i| acc * d + input[inv.apply(i) - 1]);
        entries[(row, col)] = Complex64::one();
    }
    Ok(DenseOperator { t, d, entries })
}

/// Haar moment of the unitary group, `(1/P(d,t)) Σ_σ σ`.
pub fn rho_sym(d: usize, t: usize) -> Result<DenseOperator> {
    let mut op = DenseOperator::zeros(d, t)?;
    let weight = 1.0 / p_factor(d, t).to_f64().unwrap_or(f64::INFINITY);
    for sigma in Permutation::all(t) {
        op.add_pairing(&PairPartition::from_permutation(&sigma), weight)?;
    }
    Ok(op)
}

/// Orthogonal-orbit moment of any real state, `(1/Z(d,t)) Σ_m m`.
pub fn rho_br(d: usize, t: usize) -> Result<DenseOperator> {
    tensor_side(d, t)?;
    let basis = PairingBasis::new(t)?;
    let mut op = DenseOperator::zeros(d, t)?;
    let weight = 1.0 / z_factor(d, t).to_f64().unwrap_or(f64::INFINITY);
    for m in &basis {
        op.add_pairing(m, weight)?;
    }
    Ok(op)
}

/// `½‖a − b‖₁` for Hermitian `a`, `b`.
pub fn trace_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    a.require_hermitian()?;
    b.require_hermitian()?;
    let diff = a.sub(b)?;
    Ok(0.5 * diff.eigenvalues()?.iter().map(|x| x.abs()).sum::<f64>())
}

/// `1 − ∏_{j=1}^{t−1} (d+j)/(d+2j) = 1 − P(d,t)/Z(d,t)`.
///
/// This is the weight `ρ_br` puts on non-permutation diagrams. It bounds
/// `trace_distance(ρ_br, ρ_sym)` from above and is strict for every `d ≥ 2`.
pub fn closed_form_distance(d: usize, t: usize) -> BigRational {
    let p = BigInt::from(p_factor(d, t));
    let z = BigInt::from(z_factor(d, t));
    if z.is_zero() {
        return BigRational::zero();
    }
    BigRational::one() - BigRational::new(p, z)
}

pub fn min_eigenvalue(a: &DenseOperator) -> Result<f64> {
    Ok(a.eigenvalues()?.first().copied().unwrap_or(0.0))
}

/// `Tr[rep(m) (|ψ⟩⟨ψ|)^⊗t] = |⟨ψ*|ψ⟩|^(t − pr(m))`.
pub fn overlap_trace(m: &PairPartition, psi: &StateVector) -> f64 {
    psi.conjugate_overlap().powi((m.t() - m.propagating_number()) as i32)
}

/// A unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

pub const NORM_TOL: f64 = 1e-12;

impl StateVector {
    /// Accepts amplitudes whose Euclidean norm is 1 within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Size("state vector of dimension 0".into()));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or empty vector".into()));
        }
        Ok(Self { amplitudes: amplitudes.into_iter().map(|a| a / norm).collect() })
    }

    /// Computational basis state `|k⟩` in `C^d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::Size(format!("basis index {k} out of range for d={d}")));
        }
        let mut amplitudes = vec![Complex64::zero(); d];
        amplitudes[k] = Complex64::one();
        Ok(Self { amplitudes })
    }

    pub fn d(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amplitudes)
    }

    /// `r = |⟨ψ*|ψ⟩| = |Σ_k ψ_k²|`.
    pub fn conjugate_overlap(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<Complex64>().norm().min(1.0)
    }

    pub fn is_real(&self) -> bool {
        self.amplitudes.iter().all(|a| a.im == 0.0)
    }

    /// `|ψ⟩^⊗t` as a vector of length `d^t`.
    pub fn tensor_power(&self, t: usize) -> Result<DVector<Complex64>> {
        tensor_side(self.d(), t)?;
        Ok(tensor_power_of(&self.amplitudes, t))
    }
}

pub(crate) fn tensor_power_of(amplitudes: &[Complex64], t: usize) -> DVector<Complex64> {
    let mut v = vec![Complex64::one()];
    for _ in 0..t {
        v = v.iter().flat_map(|x| amplitudes.iter().map(move |a| x * a)).collect();
    }
    DVector::from_vec(v)
}

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = Error;

    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(psi: StateVector) -> Self {
        psi.amplitudes.into_iter().map(|a| [a.re, a.im]).collect()
    }
}
