//! Haar sampling, empirical moment operators and the Helstrom distinguisher.
//!
//! Parallel runs split the trials into one contiguous block per worker.
//! Worker `w` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `w`, and
//! the per-worker accumulators are reduced in worker order, so a fixed
//! `(seed, workers)` pair gives bit-identical results.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::designs::closed_form_f64;
use crate::error::{Error, Result};
use crate::tensor_rep::{rho_br, rho_sym, tensor_power_of, tensor_side, DenseOperator, StateVector};

/// Residual bound `max |gᵀg − I|` (or `|g†g − I|`) enforced on spot-checked draws.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Every `SPOT_CHECK_EVERY`-th draw is checked for orthogonality or unitarity.
const SPOT_CHECK_EVERY: usize = 100;

/// Haar-random `O ∈ O(d)`: QR of a Gaussian matrix with the signs of `R`'s
/// diagonal folded into `Q`.
pub fn sample_haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// Haar-random `U ∈ U(d)`: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal folded into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let diag = r[(j, j)];
        let norm = diag.norm();
        if norm > 0.0 {
            col *= diag / norm;
        }
    }
    q
}

pub fn orthogonality_residual(o: &DMatrix<f64>) -> f64 {
    let n = o.nrows();
    (o.transpose() * o - DMatrix::<f64>::identity(n, n)).amax()
}

pub fn unitarity_residual(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// `{O|ψ⟩ : O ~ Haar(O(d))}` for a chosen seed state.
    OrthogonalOrbit,
    /// `{U|0⟩ : U ~ Haar(U(d))}`.
    UnitaryHaar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub seed_state: StateVector,
    pub d: usize,
    pub t: usize,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, seed_state: StateVector, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::Size("t must be positive".into()));
        }
        Ok(Self { kind, d: seed_state.d(), seed_state, t })
    }

    pub fn unitary_haar(d: usize, t: usize) -> Result<Self> {
        Self::new(EnsembleKind::UnitaryHaar, StateVector::basis(d, 0)?, t)
    }

    pub fn orthogonal_orbit(seed_state: StateVector, t: usize) -> Result<Self> {
        Self::new(EnsembleKind::OrthogonalOrbit, seed_state, t)
    }

    /// One draw from the ensemble, plus the group element's residual when
    /// `check` is set.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, check: bool) -> (Vec<Complex64>, f64) {
        match self.kind {
            EnsembleKind::OrthogonalOrbit => {
                let o = sample_haar_orthogonal(self.d, rng);
                let residual = if check { orthogonality_residual(&o) } else { 0.0 };
                let o = o.map(|x| Complex64::new(x, 0.0));
                let phi = o * self.seed_state.to_vector();
                (phi.iter().copied().collect(), residual)
            }
            EnsembleKind::UnitaryHaar => {
                let u = sample_haar_unitary(self.d, rng);
                let residual = if check { unitarity_residual(&u) } else { 0.0 };
                (u.column(0).iter().copied().collect(), residual)
            }
        }
    }
}

/// Sizes of the contiguous trial blocks assigned to each worker.
fn worker_blocks(n: usize, workers: usize) -> Vec<usize> {
    let workers = workers.max(1);
    (0..workers).map(|w| n / workers + usize::from(w < n % workers)).collect()
}

fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Runs `job(worker, trials)` for every block, on scoped threads when more
/// than one worker is requested, returning outputs in worker order.
fn run_blocks<T: Send>(n: usize, workers: usize, job: impl Fn(usize, usize) -> T + Sync) -> Vec<T> {
    let blocks = worker_blocks(n, workers);
    if blocks.len() == 1 {
        return vec![job(0, blocks[0])];
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = blocks
            .iter()
            .enumerate()
            .map(|(w, &len)| {
                scope.spawn({
                    let job = &job;
                    move || job(w, len)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampling worker panicked")).collect()
    })
}

fn check_residual(residual: f64, d: usize, t: usize) -> Result<()> {
    if residual > RESIDUAL_TOL {
        return Err(Error::Computation {
            t,
            d,
            reason: format!("Haar sample residual {residual:e} exceeds tolerance"),
        });
    }
    Ok(())
}

/// Average of `n` sampled `(|φ⟩⟨φ|)^⊗t`, drawing from `rng`.
pub fn empirical_moment<R: Rng + ?Sized>(spec: &EnsembleSpec, n: usize, rng: &mut R) -> Result<DenseOperator> {
    let side = tensor_side(spec.d, spec.t)?;
    if n == 0 {
        return Err(Error::Size("at least one sample is required".into()));
    }
    let (sum, residual) = accumulate_moment(spec, side, n, rng);
    check_residual(residual, spec.d, spec.t)?;
    DenseOperator::from_matrix(spec.d, spec.t, sum / Complex64::new(n as f64, 0.0))
}

/// [`empirical_moment`] split over `workers` deterministic substreams of `seed`.
pub fn empirical_moment_seeded(spec: &EnsembleSpec, n: usize, seed: u64, workers: usize) -> Result<DenseOperator> {
    let side = tensor_side(spec.d, spec.t)?;
    if n == 0 {
        return Err(Error::Size("at least one sample is required".into()));
    }
    let parts = run_blocks(n, workers, |w, len| accumulate_moment(spec, side, len, &mut worker_rng(seed, w)));
    let mut total = DMatrix::<Complex64>::zeros(side, side);
    let mut worst = 0.0f64;
    for (sum, residual) in parts {
        total += sum;
        worst = worst.max(residual);
    }
    check_residual(worst, spec.d, spec.t)?;
    DenseOperator::from_matrix(spec.d, spec.t, total / Complex64::new(n as f64, 0.0))
}

fn accumulate_moment<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    side: usize,
    n: usize,
    rng: &mut R,
) -> (DMatrix<Complex64>, f64) {
    let mut sum = DMatrix::<Complex64>::zeros(side, side);
    let mut worst = 0.0f64;
    for i in 0..n {
        let (phi, residual) = spec.draw(rng, i % SPOT_CHECK_EVERY == 0);
        worst = worst.max(residual);
        let v = tensor_power_of(&phi, spec.t);
        sum.ger(Complex64::new(1.0, 0.0), &v, &v.conjugate(), Complex64::new(1.0, 0.0));
    }
    (sum, worst)
}

/// Outcome of the Monte Carlo distinguishing experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub t: usize,
    pub d: usize,
    pub n_samples: usize,
    /// Mean Born-rule success probability over the sampled trials.
    pub empirical_success: f64,
    /// `½ + ½·½‖ρ_br − ρ_sym‖₁` from the numeric spectrum.
    pub predicted_success: f64,
    /// `½ + ½·(1 − ∏(d+j)/(d+2j))`.
    pub closed_form_success: f64,
    pub trace_distance_numeric: f64,
    /// `√(p(1−p)/n)` with `p` the empirical success.
    pub std_error: f64,
    pub seed: u64,
    pub workers: usize,
    pub max_residual: f64,
    pub elapsed_seconds: f64,
    pub version: String,
}

/// The optimal measurement `{Π⁺, 1 − Π⁺}` for telling `t` copies of a
/// random real state from `t` copies of a Haar-random state.
#[derive(Clone, Debug)]
pub struct HelstromMeasurement {
    t: usize,
    d: usize,
    /// Orthonormal basis (columns) of the non-negative eigenspace of `ρ_br − ρ_sym`.
    positive_basis: DMatrix<Complex64>,
    trace_distance: f64,
}

impl HelstromMeasurement {
    pub fn new(d: usize, t: usize) -> Result<Self> {
        let diff = rho_br(d, t)?.sub(&rho_sym(d, t)?)?;
        let eig = diff.eigen()?;
        let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] >= -1e-12).collect();
        let positive_basis = DMatrix::from_fn(eig.vectors.nrows(), keep.len(), |i, j| eig.vectors[(i, keep[j])]);
        let trace_distance = 0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>();
        Ok(Self { t, d, positive_basis, trace_distance })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn trace_distance(&self) -> f64 {
        self.trace_distance
    }

    /// `⟨φ^⊗t|Π⁺|φ^⊗t⟩`: probability of answering "real".
    pub fn real_probability(&self, v: &DVector<Complex64>) -> f64 {
        (self.positive_basis.adjoint() * v).norm_squared()
    }
}

/// Simulates `n` rounds of: flip a fair coin, draw `t` copies of a state from
/// the chosen ensemble, apply the Helstrom measurement. Success counts the
/// exact Born probability of the correct answer.
pub fn helstrom_experiment(t: usize, d: usize, n: usize, seed: u64, workers: usize) -> Result<ExperimentResult> {
    let started = Stopwatch::start();
    tensor_side(d, t)?;
    if n == 0 {
        return Err(Error::Size("at least one trial is required".into()));
    }
    let workers = workers.max(1);
    let measurement = HelstromMeasurement::new(d, t)?;
    let real = EnsembleSpec::orthogonal_orbit(StateVector::basis(d, 0)?, t)?;
    let complex = EnsembleSpec::unitary_haar(d, t)?;

    let parts = run_blocks(n, workers, |w, len| {
        let mut rng = worker_rng(seed, w);
        let mut success = 0.0;
        let mut worst = 0.0f64;
        for i in 0..len {
            let is_real: bool = rng.random();
            let spec = if is_real { &real } else { &complex };
            let (phi, residual) = spec.draw(&mut rng, i % SPOT_CHECK_EVERY == 0);
            worst = worst.max(residual);
            let p_real = measurement.real_probability(&tensor_power_of(&phi, t));
            success += if is_real { p_real } else { 1.0 - p_real };
        }
        (success, worst)
    });
    let mut success = 0.0;
    let mut worst = 0.0f64;
    for (s, r) in parts {
        success += s;
        worst = worst.max(r);
    }
    check_residual(worst, d, t)?;

    let p = success / n as f64;
    let td = measurement.trace_distance();
    Ok(ExperimentResult {
        t,
        d,
        n_samples: n,
        empirical_success: p,
        predicted_success: 0.5 + 0.5 * td,
        closed_form_success: 0.5 + 0.5 * closed_form_f64(d, t),
        trace_distance_numeric: td,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
        seed,
        workers,
        max_residual: worst,
        elapsed_seconds: started.elapsed_seconds(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Wall-clock timer that reads zero where no clock is available.
struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed_seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}
