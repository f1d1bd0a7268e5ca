//! Program states: operators written into quantum states.
//!
//! A Lindblad operator is stored as `|ψ⟩ = (L ⊗ I)|Γ⟩`, so that
//! `ψ[i·d + j] = L[i, j]` and `‖ψ‖ = ‖L‖₂`. A Hamiltonian is stored as a
//! density matrix `σ` obtained by an affine shift and scale of `H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::F17;
use crate::numerics::linalg::hermitian_eigenvalues;
use crate::numerics::{ComplexMatrix, DensityMatrix, StateVector, C64};

/// How far `‖L‖₂` may sit from 1 before encoding is refused.
pub const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
/// Below this Schatten-2 norm a Hamiltonian is treated as zero.
const ZERO_HAMILTONIAN_TOL: f64 = 1e-12;

/// The pure state `(L ⊗ I)|Γ⟩` on registers `P, Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramState {
    d: usize,
    psi: StateVector,
}

impl ProgramState {
    /// Wraps raw amplitudes; the count must be a perfect square.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let n = amplitudes.len();
        let d = (n as f64).sqrt().round() as usize;
        if d == 0 || d * d != n {
            return Err(Error::DimensionMismatch(format!("{n} amplitudes is not a square count")));
        }
        Ok(Self { d, psi: StateVector::new(amplitudes)? })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn psi(&self) -> &StateVector {
        &self.psi
    }

    /// `|ψ⟩⟨ψ|` on `P ⊗ Q`.
    pub fn density(&self) -> ComplexMatrix {
        self.psi.outer()
    }

    pub fn to_json(&self) -> ProgramStateJson {
        ProgramStateJson {
            d: self.d,
            index_convention: INDEX_CONVENTION.to_string(),
            amplitudes_re: self.psi.amplitudes().iter().map(|z| F17(z.re)).collect(),
            amplitudes_im: self.psi.amplitudes().iter().map(|z| F17(z.im)).collect(),
        }
    }

    pub fn from_json(j: &ProgramStateJson) -> Result<Self> {
        if j.amplitudes_re.len() != j.amplitudes_im.len() {
            return Err(Error::DimensionMismatch("real and imaginary parts differ in length".into()));
        }
        let amps: Vec<C64> = j.amplitudes_re.iter().zip(&j.amplitudes_im).map(|(a, b)| C64::new(a.0, b.0)).collect();
        let p = Self::from_amplitudes(amps)?;
        if p.d != j.d {
            return Err(Error::DimensionMismatch(format!("declared d = {} but amplitudes imply {}", j.d, p.d)));
        }
        Ok(p)
    }
}

pub const INDEX_CONVENTION: &str = "amplitude[i*d + j] = L[i][j]";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProgramStateJson {
    pub d: usize,
    #[serde(default)]
    pub index_convention: String,
    pub amplitudes_re: Vec<F17>,
    pub amplitudes_im: Vec<F17>,
}

/// Amplitudes of `(L ⊗ I)|Γ⟩` without any norm check.
pub fn program_amplitudes(l: &ComplexMatrix) -> Result<Vec<C64>> {
    l.square_dim()?;
    Ok(l.entries().to_vec())
}

/// Encodes a unit Schatten-2 norm operator.
pub fn encode_lindblad(l: &ComplexMatrix) -> Result<ProgramState> {
    let d = l.square_dim()?;
    let norm = l.hs_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NormViolation { norm });
    }
    if !l.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(ProgramState { d, psi: StateVector::from_amplitudes_unchecked(program_amplitudes(l)?) })
}

/// `L[i, j] = ψ[i·d + j]`.
pub fn decode_program_state(p: &ProgramState) -> ComplexMatrix {
    ComplexMatrix::new(p.d, p.d, p.psi.amplitudes().to_vec()).expect("d² amplitudes")
}

/// A unit-norm operator together with the time it must run to reproduce the original.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledTask {
    pub normalized_op: ComplexMatrix,
    /// `‖L'‖₂²`
    pub original_norm_sq: f64,
    pub requested_time: f64,
    /// `‖L'‖₂² · t`
    pub rescaled_time: f64,
}

/// `L' ↦ L'/‖L'‖₂` with `t ↦ ‖L'‖₂² t`; the dissipator is quadratic in `L`.
pub fn rescale_task(l_prime: &ComplexMatrix, t: f64) -> Result<RescaledTask> {
    l_prime.square_dim()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be non-negative")));
    }
    let norm = l_prime.hs_norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("the zero operator cannot be encoded as a program state".into()));
    }
    let norm_sq = norm * norm;
    Ok(RescaledTask {
        normalized_op: l_prime.scale_real(1.0 / norm),
        original_norm_sq: norm_sq,
        requested_time: t,
        rescaled_time: norm_sq * t,
    })
}

/// `σ = (H + cI)/s` with the shift and scale needed to undo it.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianEncoding {
    pub sigma: DensityMatrix,
    /// `c`
    pub shift: f64,
    /// `s = Tr[H + cI]`; `−i[H, ·] = −i s [σ, ·]`.
    pub time_scale: f64,
}

/// Encodes a Hermitian `H` as a density matrix.
///
/// `c = max(0, −λ_min(H))` and `s = Tr[H + cI]`. A zero Hamiltonian maps to
/// `σ = I/d` with `c = 1`, `s = d`. A negative multiple of the identity has
/// `s = 0` and is rejected.
pub fn encode_hamiltonian(h: &ComplexMatrix) -> Result<HamiltonianEncoding> {
    let d = h.square_dim()?;
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::InvalidArgument(format!("Hamiltonian is not Hermitian (defect {defect:.3e})")));
    }
    let h = h.hermitian_part();
    if h.hs_norm() <= ZERO_HAMILTONIAN_TOL {
        return Ok(HamiltonianEncoding { sigma: DensityMatrix::maximally_mixed(d), shift: 1.0, time_scale: d as f64 });
    }
    let lambda_min = hermitian_eigenvalues(&h)?[0];
    let shift = (-lambda_min).max(0.0);
    let shifted = &h + &ComplexMatrix::identity(d).scale_real(shift);
    let scale = shifted.trace().re;
    if scale <= ZERO_HAMILTONIAN_TOL * (1.0 + shift) {
        return Err(Error::InvalidArgument(
            "Hamiltonian is a negative multiple of the identity; its shifted trace vanishes".into(),
        ));
    }
    let sigma = DensityMatrix::new(shifted.scale_real(1.0 / scale))?;
    Ok(HamiltonianEncoding { sigma, shift, time_scale: scale })
}

/// `ω = σ ⊗ |ψ⟩⟨ψ|` on registers `H, P, Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramTriple {
    d: usize,
    sigma: DensityMatrix,
    psi: ProgramState,
    omega: ComplexMatrix,
}

impl ProgramTriple {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn psi(&self) -> &ProgramState {
        &self.psi
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }
}

pub fn build_program_triple(sigma: &DensityMatrix, psi: &ProgramState) -> Result<ProgramTriple> {
    if sigma.dim() != psi.d {
        return Err(Error::DimensionMismatch(format!(
            "σ has dimension {} but ψ encodes a {}-dimensional operator",
            sigma.dim(),
            psi.d
        )));
    }
    let omega = sigma.matrix().kron(&psi.density());
    Ok(ProgramTriple { d: psi.d, sigma: sigma.clone(), psi: psi.clone(), omega })
}
