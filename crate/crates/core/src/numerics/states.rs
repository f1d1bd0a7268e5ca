//! Pure and mixed states and the standard operators built from them.

use super::linalg::{hermitian_eigen, hermitian_eigenvalues, trace_distance_matrices};
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Hermiticity, trace and positivity tolerance of [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-10;
/// Norm tolerance of [`StateVector`].
pub const VECTOR_TOL: f64 = 1e-12;
/// Largest drift [`project_to_density`] accepts before declaring the input broken.
pub const PROJECTION_TOL: f64 = 1e-6;

/// A unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = euclidean_norm(&amplitudes);
        if (norm - 1.0).abs() > VECTOR_TOL {
            return Err(Error::InvalidState(format!("state vector norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary non-zero vector.
    /// Skips the norm check; callers guarantee finiteness and a norm near 1.
    pub(crate) fn from_amplitudes_unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = euclidean_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.amplitudes)
    }

    /// `|v⟩⟨v|`
    pub fn outer(&self) -> ComplexMatrix {
        let n = self.dim();
        let a = &self.amplitudes;
        ComplexMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj())
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector { amplitudes: amps }
    }
}

pub(crate) fn euclidean_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.square_dim()?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let herm = mat.hermiticity_defect();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigenvalues(&mat)?[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { mat })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self { mat: psi.outer() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// `|k⟩⟨k|`
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        Ok(Self::from_pure(&StateVector::basis(dim, k)?))
    }

    pub fn from_real_diag(values: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::real_diag(values))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { mat: self.mat.kron(&other.mat) }
    }

    /// `⟨i|ρ|i⟩`
    pub fn population(&self, i: usize) -> f64 {
        self.mat[(i, i)].re
    }
}

/// Normalized trace distance `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(trace_distance_matrices(rho.matrix(), sigma.matrix())?.clamp(0.0, 1.0))
}

/// `Σ_i |i⟩|i⟩` on `d ⊗ d`; divided by `√d` when `normalized`.
pub fn maximally_entangled_vector(d: usize, normalized: bool) -> Result<Vec<C64>> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let scale = if normalized { 1.0 / (d as f64).sqrt() } else { 1.0 };
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(scale, 0.0);
    }
    Ok(v)
}

/// The normalized maximally entangled state `Γ/√d`.
pub fn maximally_entangled_state(d: usize) -> Result<StateVector> {
    StateVector::new(maximally_entangled_vector(d, true)?)
}

/// `SWAP = Σ_{i,j} |i⟩⟨j| ⊗ |j⟩⟨i|` on `d ⊗ d`.
pub fn swap_matrix(d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = ONE;
        }
    }
    Ok(s)
}

/// A state produced by [`project_to_density`] and the Schatten-2 size of the fix applied.
#[derive(Clone, Debug)]
pub struct Projected {
    pub state: DensityMatrix,
    pub correction: f64,
}

/// Snaps a nearly valid state back into the density cone: hermitize, clip
/// negative eigenvalues, renormalize the trace.
///
/// Inputs farther than [`PROJECTION_TOL`] from Hermitian unit trace are rejected.
pub fn project_to_density(x: &ComplexMatrix) -> Result<Projected> {
    x.square_dim()?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let herm = x.hermiticity_defect();
    let tr = x.trace();
    if herm > PROJECTION_TOL || (tr - ONE).norm() > PROJECTION_TOL {
        return Err(Error::Drift { drift: herm.max((tr - ONE).norm()), limit: PROJECTION_TOL });
    }
    let h = x.hermitian_part();
    let (vals, vecs) = hermitian_eigen(&h)?;
    let fixed = if vals.iter().all(|&v| v >= 0.0) {
        h
    } else {
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let diag = ComplexMatrix::real_diag(&clipped);
        vecs.dot(&diag).dot(&vecs.dagger()).hermitian_part()
    };
    let tr = fixed.trace().re;
    if tr <= 0.0 {
        return Err(Error::InvalidState("projection collapsed to zero trace".into()));
    }
    let fixed = if tr == 1.0 { fixed } else { fixed.scale_real(1.0 / tr) };
    let correction = fixed.hs_distance(x);
    Ok(Projected { state: DensityMatrix { mat: fixed }, correction })
}
