//! Exact Lindbladian generators and the channels they generate.
//!
//! Superoperators act on column-stacked vectors, `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
//! With that convention
//!
//! ```text
//! −i[H, ·]            ↦  −i (I ⊗ H − Hᵀ ⊗ I)
//! LρL† − ½{L†L, ρ}    ↦  conj(L) ⊗ L − ½ (I ⊗ L†L + (L†L)ᵀ ⊗ I)
//! ```
//!
//! Everything in this module is the oracle that simulated dynamics are compared against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::hermitian_eigenvalues;
use crate::numerics::{mat_vec, matexp, project_to_density, ComplexMatrix, DensityMatrix, C64, I, ZERO};

/// Largest evolution time accepted by [`exact_channel`].
pub const MAX_TIME: f64 = 1e3;
/// Trace-preservation and complete-positivity tolerance of [`QuantumChannel`].
pub const CHANNEL_TOL: f64 = 1e-9;
/// Hermiticity tolerance for Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// An optional Hamiltonian plus Lindblad operators on a `dim`-dimensional system.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladianSpec {
    dim: usize,
    hamiltonian: Option<ComplexMatrix>,
    lindblad_ops: Vec<ComplexMatrix>,
}

impl LindbladianSpec {
    pub fn new(dim: usize, hamiltonian: Option<ComplexMatrix>, lindblad_ops: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if let Some(h) = &hamiltonian {
            check_shape(h, dim, "Hamiltonian")?;
            let defect = h.hermiticity_defect();
            if defect > HERMITIAN_TOL {
                return Err(Error::InvalidArgument(format!("Hamiltonian is not Hermitian (defect {defect:.3e})")));
            }
        }
        for l in &lindblad_ops {
            check_shape(l, dim, "Lindblad operator")?;
        }
        Ok(Self { dim, hamiltonian, lindblad_ops })
    }

    /// Purely dissipative spec with the single operator `l`.
    pub fn single(l: ComplexMatrix) -> Result<Self> {
        let d = l.square_dim()?;
        Self::new(d, None, vec![l])
    }

    pub fn hamiltonian_only(h: ComplexMatrix) -> Result<Self> {
        let d = h.square_dim()?;
        Self::new(d, Some(h), vec![])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> Option<&ComplexMatrix> {
        self.hamiltonian.as_ref()
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad_ops
    }

    /// `𝓛(x)` for an arbitrary `dim×dim` matrix `x`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_shape(x, self.dim, "operand")?;
        let mut out = match &self.hamiltonian {
            Some(h) => h.commutator(x).scale(-I),
            None => ComplexMatrix::zeros(self.dim, self.dim),
        };
        for l in &self.lindblad_ops {
            let ldl = l.dagger().dot(l);
            let jump = l.dot(x).dot(&l.dagger());
            out = &(&out + &jump) - &ldl.anticommutator(x).scale_real(0.5);
        }
        Ok(out)
    }
}

fn check_shape(m: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// `𝓛(ρ) = −i[H, ρ] + Σ_k L_k ρ L_k† − ½{L_k†L_k, ρ}`.
pub fn apply_lindbladian(spec: &LindbladianSpec, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    spec.apply(rho.matrix())
}

/// A linear map on `d×d` matrices as a `d²×d²` matrix on column-stacked vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, mat: ComplexMatrix) -> Result<Self> {
        if mat.rows() != dim * dim || mat.cols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on dimension {dim} must be {0}x{0}",
                dim * dim
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: ComplexMatrix::identity(dim * dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// `unvec(mat · vec(x))`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_shape(x, self.dim, "operand")?;
        Ok(ComplexMatrix::unvectorize(&mat_vec(&self.mat, &x.vectorize()), self.dim))
    }

    /// `(id_R ⊗ self)(x)` where `x` lives on `R ⊗ S` with `R` of dimension `ref_dim`.
    ///
    /// Applies the map block by block: `x = Σ |r⟩⟨r'| ⊗ x_{rr'}`.
    pub fn apply_extended(&self, x: &ComplexMatrix, ref_dim: usize) -> Result<ComplexMatrix> {
        if ref_dim == 1 {
            return self.apply(x);
        }
        let n = self.dim;
        check_shape(x, ref_dim * n, "extended operand")?;
        let mut out = ComplexMatrix::zeros(ref_dim * n, ref_dim * n);
        for r in 0..ref_dim {
            for rp in 0..ref_dim {
                let block = ComplexMatrix::from_fn(n, n, |i, j| x[(r * n + i, rp * n + j)]);
                let mapped = self.apply(&block)?;
                for i in 0..n {
                    for j in 0..n {
                        out[(r * n + i, rp * n + j)] = mapped[(i, j)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("composing superoperators of different dimension".into()));
        }
        Ok(Superoperator { dim: self.dim, mat: self.mat.dot(&other.mat) })
    }

    pub fn scale_real(&self, c: f64) -> Superoperator {
        Superoperator { dim: self.dim, mat: self.mat.scale_real(c) }
    }
}

/// Column-stacking superoperator of the spec's generator.
pub fn to_superoperator(spec: &LindbladianSpec) -> Superoperator {
    let d = spec.dim;
    let id = ComplexMatrix::identity(d);
    let mut mat = ComplexMatrix::zeros(d * d, d * d);
    if let Some(h) = &spec.hamiltonian {
        let ham = &id.kron(h) - &h.transpose().kron(&id);
        mat = &mat + &ham.scale(-I);
    }
    for l in &spec.lindblad_ops {
        let ldl = l.dagger().dot(l);
        let jump = l.conj().kron(l);
        let anti = &id.kron(&ldl) + &ldl.transpose().kron(&id);
        mat = &(&mat + &jump) - &anti.scale_real(0.5);
    }
    Superoperator { dim: d, mat }
}

/// A superoperator that has passed trace-preservation and Choi-positivity checks.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    superop: Superoperator,
}

impl QuantumChannel {
    /// Validates CPTP to [`CHANNEL_TOL`].
    pub fn new(superop: Superoperator) -> Result<Self> {
        let ch = Self { superop };
        let tp = ch.trace_preservation_defect();
        if tp > CHANNEL_TOL {
            return Err(Error::InvalidChannel(format!("trace-preservation defect {tp:.3e}")));
        }
        let min = ch.choi_min_eigenvalue()?;
        if min < -CHANNEL_TOL {
            return Err(Error::InvalidChannel(format!("Choi matrix has eigenvalue {min:.3e}")));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self { superop: Superoperator::identity(dim) }
    }

    /// `X ↦ Tr[X] I/d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let vec_id = ComplexMatrix::identity(dim).vectorize();
        let n = dim * dim;
        let mat = ComplexMatrix::from_fn(n, n, |i, j| vec_id[i] * vec_id[j].conj() / dim as f64);
        Self { superop: Superoperator { dim, mat } }
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let d = u.square_dim()?;
        let mat = u.conj().kron(u);
        Self::new(Superoperator { dim: d, mat })
    }

    pub fn dim(&self) -> usize {
        self.superop.dim
    }

    pub fn superoperator(&self) -> &Superoperator {
        &self.superop
    }

    /// `max_j |((vec I)† · mat)_j − (vec I)_j|`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.superop.dim;
        let mat = &self.superop.mat;
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let s: C64 = (0..d).map(|k| mat[(k + k * d, col)]).sum();
            let want = if col % (d + 1) == 0 { 1.0 } else { 0.0 };
            worst = worst.max((s - want).norm());
        }
        worst
    }

    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&choi_matrix(self))?[0])
    }

    pub fn compose(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        Ok(QuantumChannel { superop: self.superop.compose(&other.superop)? })
    }

    /// Applies the channel to an arbitrary operator on the system.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.superop.apply(x)
    }

    /// `(id_R ⊗ self)(x)`.
    pub fn apply_extended(&self, x: &ComplexMatrix, ref_dim: usize) -> Result<ComplexMatrix> {
        self.superop.apply_extended(x, ref_dim)
    }
}

/// `e^{𝓛t}` by exponentiating `t` times the superoperator.
pub fn exact_channel(spec: &LindbladianSpec, t: f64) -> Result<QuantumChannel> {
    if !(0.0..=MAX_TIME).contains(&t) {
        return Err(Error::InvalidArgument(format!("time {t} outside [0, {MAX_TIME}]")));
    }
    let d = spec.dim;
    if t == 0.0 {
        return Ok(QuantumChannel::identity(d));
    }
    let gen = to_superoperator(spec);
    let mat = matexp(&gen.mat.scale_real(t))?;
    QuantumChannel::new(Superoperator { dim: d, mat })
}

/// Applies a channel to a state and projects back onto the density cone.
pub fn apply_channel(ch: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let out = ch.apply_matrix(rho.matrix())?;
    let projected = project_to_density(&out)?;
    log::trace!("apply_channel projection drift {:.3e}", projected.correction);
    Ok(projected.state)
}

/// `(id ⊗ ch)(|Γ⟩⟨Γ|/d)`, reference register first.
pub fn choi_matrix(ch: &QuantumChannel) -> ComplexMatrix {
    let d = ch.dim();
    let n = d * d;
    let mat = ch.superop.matrix();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            // column i + j*d of the superoperator is vec(ch(|i⟩⟨j|))
            let col = i + j * d;
            for a in 0..d {
                for b in 0..d {
                    let v = mat[(a + b * d, col)];
                    if v != ZERO {
                        out[(i * d + a, j * d + b)] = v / d as f64;
                    }
                }
            }
        }
    }
    out
}

/// Serializable form of [`LindbladianSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LindbladianSpecJson {
    pub dim: usize,
    pub hamiltonian: Option<crate::io::MatrixJson>,
    pub lindblad_ops: Vec<crate::io::MatrixJson>,
}

impl LindbladianSpec {
    pub fn to_json(&self) -> LindbladianSpecJson {
        LindbladianSpecJson {
            dim: self.dim,
            hamiltonian: self.hamiltonian.as_ref().map(crate::io::MatrixJson::from_matrix),
            lindblad_ops: self.lindblad_ops.iter().map(crate::io::MatrixJson::from_matrix).collect(),
        }
    }

    pub fn from_json(j: &LindbladianSpecJson) -> Result<Self> {
        let h = j.hamiltonian.as_ref().map(|m| m.to_matrix()).transpose()?;
        let ops = j.lindblad_ops.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()?;
        Self::new(j.dim, h, ops)
    }
}
