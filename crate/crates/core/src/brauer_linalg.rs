//! Exact Gram matrix of the Brauer diagram basis and its Weingarten
//! pseudo-inverse.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pairings::PairingBasis;
use crate::tensor_rep::dimension_cap;

/// `P(d,t) = d(d+1)…(d+t−1)`.
pub fn p_factor(d: usize, t: usize) -> BigUint {
    (0..t).map(|j| BigUint::from(d + j)).product()
}

/// `Z(d,t) = d(d+2)…(d+2t−2)`.
pub fn z_factor(d: usize, t: usize) -> BigUint {
    (0..t).map(|j| BigUint::from(d + 2 * j)).product()
}

/// Gram matrix `G[m][n] = Tr[rep(m)ᵀ rep(n)] = d^{cycles(m ∪ n)}`.
///
/// Entries are kept as their exponents, which makes every entry exact at any
/// `d`; [`GramMatrix::entry`] materializes the integer.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    t: usize,
    d: usize,
    basis: PairingBasis,
    exponents: Vec<u8>,
}

impl GramMatrix {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &PairingBasis {
        &self.basis
    }

    /// Side length `(2t−1)!!`.
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// Number of cycles formed by the union of basis elements `i` and `j`.
    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        self.exponents[i * self.size() + j] as u32
    }

    pub fn entry(&self, i: usize, j: usize) -> BigUint {
        BigUint::from(self.d).pow(self.exponent(i, j))
    }

    pub fn row_sum(&self, i: usize) -> BigUint {
        let n = self.size();
        let mut by_power = vec![0u64; self.t + 1];
        for j in 0..n {
            by_power[self.exponent(i, j) as usize] += 1;
        }
        by_power.iter().enumerate().map(|(k, &count)| BigUint::from(count) * BigUint::from(self.d).pow(k as u32)).sum()
    }

    /// Exact product `G·x`.
    pub fn mul_rational(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        let n = self.size();
        if x.len() != n {
            return Err(Error::Size(format!("vector of length {} against Gram matrix of side {n}", x.len())));
        }
        let powers: Vec<BigRational> =
            (0..=self.t).map(|k| BigRational::from_integer(BigUint::from(self.d).pow(k as u32).into())).collect();
        Ok((0..n)
            .map(|i| {
                x.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .fold(BigRational::zero(), |acc, (j, v)| acc + &powers[self.exponent(i, j) as usize] * v)
            })
            .collect())
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let n = self.size();
        let powers: Vec<f64> = (0..=self.t).map(|k| (self.d as f64).powi(k as i32)).collect();
        DMatrix::from_fn(n, n, |i, j| powers[self.exponent(i, j) as usize])
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.size();
        let entries: Vec<Vec<GramEntry>> =
            (0..n).map(|i| (0..n).map(|j| GramEntry(self.entry(i, j))).collect()).collect();
        let mut s = serializer.serialize_struct("GramMatrix", 4)?;
        s.serialize_field("t", &self.t)?;
        s.serialize_field("d", &self.d)?;
        s.serialize_field("basis", self.basis.as_slice())?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

/// A JSON integer when it fits in `u64`, a decimal string otherwise.
struct GramEntry(BigUint);

impl Serialize for GramEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => serializer.serialize_u64(v),
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

pub fn gram_matrix(t: usize, d: usize) -> Result<GramMatrix> {
    gram_matrix_for(PairingBasis::new(t)?, d)
}

pub fn gram_matrix_for(basis: PairingBasis, d: usize) -> Result<GramMatrix> {
    if d == 0 {
        return Err(Error::Size("dimension d must be positive".into()));
    }
    let t = basis.t();
    let n = basis.len();
    // dense Gram and Weingarten matrices share the tensor-side cap
    let cap = dimension_cap();
    if n > cap {
        return Err(Error::MemoryCap { required: n as u128, cap });
    }
    let partners: Vec<Vec<usize>> = basis.iter().map(|m| m.partner()).collect();
    let mut exponents = vec![0u8; n * n];
    for i in 0..n {
        exponents[i * n + i] = t as u8;
        for j in i + 1..n {
            let c = crate::pairings::cycle_count(&partners[i], &partners[j]) as u8;
            exponents[i * n + j] = c;
            exponents[j * n + i] = c;
        }
    }
    Ok(GramMatrix { t, d, basis, exponents })
}

/// Moore–Penrose pseudo-inverse of a Gram matrix.
#[derive(Clone, Debug)]
pub struct WeingartenMatrix {
    pub t: usize,
    pub d: usize,
    pub entries: DMatrix<f64>,
    pub rank: usize,
    /// Singular values at or below this threshold were treated as zero.
    pub cutoff: f64,
}

impl WeingartenMatrix {
    pub fn from_gram(gram: &GramMatrix) -> Result<Self> {
        let (t, d) = (gram.t(), gram.d());
        let g = gram.to_f64();
        let n = g.nrows();
        // G is symmetric positive semidefinite, so its singular values are
        // the absolute eigenvalues and the eigenvectors serve as both
        // singular bases.
        let eig = g.try_symmetric_eigen(f64::EPSILON, 0).ok_or_else(|| Error::Computation {
            t,
            d,
            reason: "symmetric eigendecomposition did not converge".into(),
        })?;
        let sigma_max = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let cutoff = sigma_max * 1e-12 * n as f64;
        let mut rank = 0;
        let mut scaled = eig.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            let s = eig.eigenvalues[k];
            if s.abs() > cutoff {
                rank += 1;
                col /= s;
            } else {
                col.fill(0.0);
            }
        }
        let w = scaled * eig.eigenvectors.transpose();
        let entries = (&w + w.transpose()) * 0.5;
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Computation { t, d, reason: "non-finite pseudo-inverse entry".into() });
        }
        Ok(Self { t, d, entries, rank, cutoff })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

impl Serialize for WeingartenMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = self.entries.row_iter().map(|r| r.iter().copied().collect()).collect();
        let mut s = serializer.serialize_struct("WeingartenMatrix", 5)?;
        s.serialize_field("t", &self.t)?;
        s.serialize_field("d", &self.d)?;
        s.serialize_field("rank", &self.rank)?;
        s.serialize_field("cutoff", &self.cutoff)?;
        s.serialize_field("entries", &rows)?;
        s.end()
    }
}

pub fn weingarten_matrix(t: usize, d: usize) -> Result<WeingartenMatrix> {
    WeingartenMatrix::from_gram(&gram_matrix(t, d)?)
}

/// Coefficients indexed by the global pairing order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    pub t: usize,
    pub values: Vec<f64>,
}

/// `c = W·b`: commutant expansion coefficients from overlap data.
pub fn twirl_coefficients(w: &WeingartenMatrix, b: &CoefficientVector) -> Result<CoefficientVector> {
    if b.t != w.t || b.values.len() != w.size() {
        return Err(Error::Size(format!(
            "coefficient vector (t={}, len={}) does not match Weingarten matrix (t={}, side={})",
            b.t,
            b.values.len(),
            w.t,
            w.size()
        )));
    }
    let c = &w.entries * DVector::from_column_slice(&b.values);
    Ok(CoefficientVector { t: b.t, values: c.iter().copied().collect() })
}
