//! Wave matrix Lindbladization: the dilation operator, the dilated
//! generators and the step loops.
//!
//! Registers are ordered `[R,] S, [H,] P, Q`. The dilation operator is
//! `M_φ = (I_S ⊗ |φ⟩⟨Γ|_{PQ})(SWAP_{SP} ⊗ I_Q)` with `φ = Γ/√d` by default,
//! acting trivially on `R` and `H`. One step evolves `ρ ⊗ program` under
//! `e^{𝓜Δ}` and traces out the program registers.
//!
//! The reference register never enters the exponential: `M` is trivial on
//! `R`, so `e^{𝓜Δ} = id_R ⊗ e^{𝓜_active Δ}` and the step channel is stored on
//! the active registers only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{MatrixJson, F17};
use crate::lindblad::{exact_channel, LindbladianSpec, QuantumChannel, MAX_TIME};
use crate::numerics::{
    embed_operator, maximally_entangled_vector, partial_trace, project_to_density, swap_matrix, ComplexMatrix,
    DensityMatrix, Projected, RegisterLayout, StateVector, C64, ZERO,
};
use crate::program::{build_program_triple, encode_hamiltonian, encode_lindblad, ProgramState, ProgramTriple};

/// Largest `d` for Algorithm 1 without a reference register.
pub const MAX_DIM: usize = 4;
/// Largest `d` for Algorithm 1 with a reference register.
pub const MAX_DIM_WITH_REFERENCE: usize = 3;
/// Largest `d` for Algorithm 2 (its active space is `d⁴`).
pub const MAX_DIM_ALGORITHM_TWO: usize = 2;
/// A step whose projection moves the state further than this is an error.
pub const DRIFT_LIMIT: f64 = 1e-8;
const PHI_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    Reference,
    System,
    Hamiltonian,
    ProgramP,
    ProgramQ,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    /// Dissipator of `M` only.
    One,
    /// Adds `coupling · (SWAP_{SH} ⊗ I)` as the dilated Hamiltonian.
    Two { coupling: f64 },
}

impl Algorithm {
    pub fn number(&self) -> u8 {
        match self {
            Algorithm::One => 1,
            Algorithm::Two { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DilationConfig {
    pub d: usize,
    pub with_reference: bool,
    /// Replacement for `Γ/√d` in the output slot of `M`.
    pub phi: Option<StateVector>,
}

impl DilationConfig {
    pub fn new(d: usize) -> Self {
        Self { d, with_reference: false, phi: None }
    }

    pub fn with_reference(mut self, yes: bool) -> Self {
        self.with_reference = yes;
        self
    }

    pub fn with_phi(mut self, phi: StateVector) -> Self {
        self.phi = Some(phi);
        self
    }

    /// Registers in order for the given algorithm.
    pub fn registers(&self, algorithm: Algorithm) -> Vec<Register> {
        let mut regs = Vec::with_capacity(5);
        if self.with_reference {
            regs.push(Register::Reference);
        }
        regs.push(Register::System);
        if algorithm.number() == 2 {
            regs.push(Register::Hamiltonian);
        }
        regs.push(Register::ProgramP);
        regs.push(Register::ProgramQ);
        regs
    }

    pub fn layout(&self, algorithm: Algorithm) -> Result<RegisterLayout> {
        self.check_dim()?;
        RegisterLayout::uniform(self.d, self.registers(algorithm).len())
    }

    fn check_dim(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Ok(())
    }

    fn check_limits(&self, algorithm: Algorithm) -> Result<()> {
        self.check_dim()?;
        let limit = match (algorithm, self.with_reference) {
            (Algorithm::Two { .. }, _) => MAX_DIM_ALGORITHM_TWO,
            (Algorithm::One, true) => MAX_DIM_WITH_REFERENCE,
            (Algorithm::One, false) => MAX_DIM,
        };
        if self.d > limit {
            return Err(Error::DimensionLimit { d: self.d, limit });
        }
        Ok(())
    }

    fn phi_amplitudes(&self) -> Result<Vec<C64>> {
        match &self.phi {
            None => maximally_entangled_vector(self.d, true),
            Some(phi) => {
                if phi.dim() != self.d * self.d {
                    return Err(Error::DimensionMismatch(format!(
                        "φ has dimension {} but d² = {}",
                        phi.dim(),
                        self.d * self.d
                    )));
                }
                if (phi.norm() - 1.0).abs() > PHI_TOL {
                    return Err(Error::InvalidState(format!("φ has norm {}", phi.norm())));
                }
                Ok(phi.amplitudes().to_vec())
            }
        }
    }
}

fn position(regs: &[Register], r: Register) -> usize {
    regs.iter().position(|&x| x == r).expect("register present")
}

/// `M_φ` on `S, P, Q`: `⟨s p q|M|s' p' q'⟩ = δ_{s p'} δ_{s' q'} φ[p·d + q]`.
fn dilation_core(d: usize, phi: &[C64]) -> ComplexMatrix {
    let n = d * d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    for s in 0..d {
        for sp in 0..d {
            // column |s', p' = s, q' = s'⟩
            let col = (sp * d + s) * d + sp;
            for (pq, &amp) in phi.iter().enumerate() {
                if amp != ZERO {
                    m[(s * d * d + pq, col)] = amp;
                }
            }
        }
    }
    m
}

/// The dilation operator on the full space `[R,] S, [H,] P, Q`.
pub fn build_m(config: &DilationConfig, algorithm: Algorithm) -> Result<ComplexMatrix> {
    let layout = config.layout(algorithm)?;
    let regs = config.registers(algorithm);
    build_m_on(config, &regs, &layout)
}

fn build_m_on(config: &DilationConfig, regs: &[Register], layout: &RegisterLayout) -> Result<ComplexMatrix> {
    let core = dilation_core(config.d, &config.phi_amplitudes()?);
    let targets = [Register::System, Register::ProgramP, Register::ProgramQ].map(|r| position(regs, r));
    embed_operator(&core, layout, &targets)
}

/// `SWAP_{SH} ⊗ I` on the full space.
fn build_h_on(d: usize, regs: &[Register], layout: &RegisterLayout) -> Result<ComplexMatrix> {
    let targets = [position(regs, Register::System), position(regs, Register::Hamiltonian)];
    embed_operator(&swap_matrix(d)?, layout, &targets)
}

/// The dilated Lindbladian on the active registers `S, [H,] P, Q` (no reference).
pub fn dilated_spec(config: &DilationConfig, algorithm: Algorithm) -> Result<LindbladianSpec> {
    let active = DilationConfig { with_reference: false, ..config.clone() };
    let layout = active.layout(algorithm)?;
    let regs = active.registers(algorithm);
    let m = build_m_on(&active, &regs, &layout)?;
    let h = match algorithm {
        Algorithm::One => None,
        Algorithm::Two { coupling } => {
            if !coupling.is_finite() {
                return Err(Error::NonFinite);
            }
            Some(build_h_on(active.d, &regs, &layout)?.scale_real(coupling))
        }
    };
    LindbladianSpec::new(layout.total_dim(), h, vec![m])
}

#[derive(Clone, Debug)]
pub struct DilatedGenerator {
    config: DilationConfig,
    algorithm: Algorithm,
    registers: Vec<Register>,
    layout: RegisterLayout,
    m_op: ComplexMatrix,
    h_op: Option<ComplexMatrix>,
    delta: f64,
    active_spec: LindbladianSpec,
    step_channel: QuantumChannel,
}

impl DilatedGenerator {
    pub fn config(&self) -> &DilationConfig {
        &self.config
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    /// Layout of the full space including `R` when present.
    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    /// `M` on the full space.
    pub fn m_op(&self) -> &ComplexMatrix {
        &self.m_op
    }

    /// `SWAP_{SH} ⊗ I` on the full space, without the coupling factor.
    pub fn h_op(&self) -> Option<&ComplexMatrix> {
        self.h_op.as_ref()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The generator on the active registers.
    pub fn active_spec(&self) -> &LindbladianSpec {
        &self.active_spec
    }

    /// `e^{𝓜Δ}` on the active registers.
    pub fn step_channel(&self) -> &QuantumChannel {
        &self.step_channel
    }

    /// Dimension of the reference register (1 when absent).
    pub fn reference_dim(&self) -> usize {
        if self.config.with_reference {
            self.config.d
        } else {
            1
        }
    }

    /// Dimension of the state the step acts on: `R ⊗ S`.
    pub fn state_dim(&self) -> usize {
        self.reference_dim() * self.config.d
    }

    /// Register indices traced out after each step.
    pub fn program_registers(&self) -> Vec<usize> {
        self.registers
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, Register::Hamiltonian | Register::ProgramP | Register::ProgramQ))
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn build_dilated_generator(config: &DilationConfig, algorithm: Algorithm, delta: f64) -> Result<DilatedGenerator> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("step Δ = {delta} must be positive")));
    }
    config.check_limits(algorithm)?;
    let registers = config.registers(algorithm);
    let layout = config.layout(algorithm)?;
    let m_op = build_m_on(config, &registers, &layout)?;
    let h_op = match algorithm {
        Algorithm::One => None,
        Algorithm::Two { .. } => Some(build_h_on(config.d, &registers, &layout)?),
    };
    let active_spec = dilated_spec(config, algorithm)?;
    let step_channel = exact_channel(&active_spec, delta)?;
    Ok(DilatedGenerator {
        config: config.clone(),
        algorithm,
        registers,
        layout,
        m_op,
        h_op,
        delta,
        active_spec,
        step_channel,
    })
}

/// One consumable copy of a program.
pub trait ProgramCopy {
    fn d(&self) -> usize;
    /// Number of program registers (`P, Q` or `H, P, Q`).
    fn register_count(&self) -> usize;
    fn density(&self) -> ComplexMatrix;
}

impl ProgramCopy for ProgramState {
    fn d(&self) -> usize {
        ProgramState::d(self)
    }

    fn register_count(&self) -> usize {
        2
    }

    fn density(&self) -> ComplexMatrix {
        ProgramState::density(self)
    }
}

impl ProgramCopy for ProgramTriple {
    fn d(&self) -> usize {
        ProgramTriple::d(self)
    }

    fn register_count(&self) -> usize {
        3
    }

    fn density(&self) -> ComplexMatrix {
        self.omega().clone()
    }
}

/// `Tr_program[e^{𝓜Δ}(ρ ⊗ program)]`, projected onto the density cone.
///
/// `rho` lives on `R ⊗ S` when the generator has a reference register.
pub fn wml_step<P: ProgramCopy + ?Sized>(gen: &DilatedGenerator, rho: &DensityMatrix, program: &P) -> Result<Projected> {
    let program_density = program.density();
    step_with_density(gen, rho, &program_density, program.d(), program.register_count())
}

fn step_with_density(
    gen: &DilatedGenerator,
    rho: &DensityMatrix,
    program_density: &ComplexMatrix,
    program_d: usize,
    register_count: usize,
) -> Result<Projected> {
    let d = gen.config.d;
    if program_d != d || register_count != gen.program_registers().len() {
        return Err(Error::DimensionMismatch(format!(
            "program with {register_count} registers of dimension {program_d} does not fit the algorithm {} generator on d = {d}",
            gen.algorithm.number()
        )));
    }
    if rho.dim() != gen.state_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} but the generator acts on dimension {}",
            rho.dim(),
            gen.state_dim()
        )));
    }
    let joint = rho.matrix().kron(program_density);
    let evolved = gen.step_channel.apply_extended(&joint, gen.reference_dim())?;
    let reduced = partial_trace(&evolved, &gen.layout, &gen.program_registers())?;
    let projected = project_to_density(&reduced)?;
    if projected.correction > DRIFT_LIMIT {
        return Err(Error::Drift { drift: projected.correction, limit: DRIFT_LIMIT });
    }
    Ok(projected)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub final_state: DensityMatrix,
    pub steps: usize,
    pub delta: f64,
    pub time: f64,
    pub drift_log: Vec<f64>,
}

impl SimulationResult {
    pub fn max_drift(&self) -> f64 {
        self.drift_log.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> SimulationResultJson {
        SimulationResultJson {
            final_state: MatrixJson::from_matrix(self.final_state.matrix()),
            n: self.steps,
            time: F17(self.time),
            delta: F17(self.delta),
            max_drift: F17(self.max_drift()),
            distance_to_exact: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulationResultJson {
    pub final_state: MatrixJson,
    pub n: usize,
    pub time: F17,
    pub delta: F17,
    pub max_drift: F17,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_to_exact: Option<F17>,
}

fn check_run(t: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("step count n must be at least 1".into()));
    }
    if !(0.0..=MAX_TIME).contains(&t) {
        return Err(Error::InvalidArgument(format!("time {t} outside [0, {MAX_TIME}]")));
    }
    Ok(())
}

/// `n` steps of an already built generator; the total time is `n · Δ`.
pub fn run_with_generator<P: ProgramCopy + ?Sized>(
    gen: &DilatedGenerator,
    rho: &DensityMatrix,
    program: &P,
    n: usize,
) -> Result<SimulationResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("step count n must be at least 1".into()));
    }
    let copy = program.density();
    let mut state = rho.clone();
    let mut drift_log = Vec::with_capacity(n);
    for _ in 0..n {
        let step = step_with_density(gen, &state, &copy, program.d(), program.register_count())?;
        drift_log.push(step.correction);
        state = step.state;
    }
    Ok(SimulationResult { final_state: state, steps: n, delta: gen.delta, time: gen.delta * n as f64, drift_log })
}

fn run_steps(
    config: &DilationConfig,
    algorithm: Algorithm,
    rho: &DensityMatrix,
    t: f64,
    n: usize,
    program: &dyn ProgramCopy,
) -> Result<SimulationResult> {
    check_run(t, n)?;
    config.check_limits(algorithm)?;
    let expected_dim = if config.with_reference { config.d * config.d } else { config.d };
    if rho.dim() != expected_dim {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} but expected {expected_dim}",
            rho.dim()
        )));
    }
    if t == 0.0 {
        return Ok(SimulationResult { final_state: rho.clone(), steps: n, delta: 0.0, time: 0.0, drift_log: vec![0.0; n] });
    }
    let gen = build_dilated_generator(config, algorithm, t / n as f64)?;
    let mut res = run_with_generator(&gen, rho, program, n)?;
    res.time = t;
    Ok(res)
}

/// Algorithm 1: `n` steps of size `t/n` approximating `e^{𝓛t}` with `𝓛` the dissipator of `l`.
///
/// With `config.with_reference`, `rho` lives on `R ⊗ S`.
pub fn wml_simulate(
    l: &ComplexMatrix,
    rho: &DensityMatrix,
    t: f64,
    n: usize,
    config: &DilationConfig,
) -> Result<SimulationResult> {
    check_run(t, n)?;
    let psi = encode_lindblad(l)?;
    check_config_dim(config, psi.d())?;
    run_steps(config, Algorithm::One, rho, t, n, &psi)
}

/// Algorithm 2: adds the Hamiltonian `h`, encoded as a density matrix `σ`;
/// the dilated Hamiltonian carries the encoding's time scale.
pub fn wml_simulate_with_h(
    h: &ComplexMatrix,
    l: &ComplexMatrix,
    rho: &DensityMatrix,
    t: f64,
    n: usize,
    config: &DilationConfig,
) -> Result<SimulationResult> {
    check_run(t, n)?;
    let psi = encode_lindblad(l)?;
    check_config_dim(config, psi.d())?;
    let enc = encode_hamiltonian(h)?;
    let triple = build_program_triple(&enc.sigma, &psi)?;
    run_steps(config, Algorithm::Two { coupling: enc.time_scale }, rho, t, n, &triple)
}

/// Algorithm 1 on `R ⊗ S`, with `R` of the same dimension as `S`.
pub fn wml_simulate_with_reference(
    l: &ComplexMatrix,
    rho_rs: &DensityMatrix,
    t: f64,
    n: usize,
) -> Result<SimulationResult> {
    let d = l.square_dim()?;
    wml_simulate(l, rho_rs, t, n, &DilationConfig::new(d).with_reference(true))
}

fn check_config_dim(config: &DilationConfig, d: usize) -> Result<()> {
    if config.d != d {
        return Err(Error::DimensionMismatch(format!("config has d = {} but L is {d}×{d}", config.d)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{apply_channel, exact_channel};
    use crate::numerics::random::{random_density_matrix, random_pure_state, random_unit_hs_operator};
    use crate::numerics::{hermitian_eigenvalues, trace_distance, ONE};
    use std::f64::consts::FRAC_1_SQRT_2;

    /// `(1/√d) Σ_{ijk} |k⟩⟨j| ⊗ |i⟩⟨k| ⊗ |i⟩⟨j|` by brute force.
    fn triple_sum(d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d * d * d, d * d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let term = ComplexMatrix::unit(d, k, j).kron(&ComplexMatrix::unit(d, i, k)).kron(&ComplexMatrix::unit(d, i, j));
                    m = &m + &term;
                }
            }
        }
        m.scale_real(1.0 / (d as f64).sqrt())
    }

    /// `Σ_{ij} |i⟩⟨j| ⊗ I ⊗ |i⟩⟨j|`.
    fn mdagm_oracle(d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d * d * d, d * d * d);
        for i in 0..d {
            for j in 0..d {
                let e = ComplexMatrix::unit(d, i, j);
                m = &m + &e.kron(&ComplexMatrix::identity(d)).kron(&e);
            }
        }
        m
    }

    #[test]
    fn m_matches_triple_sum() {
        for d in 1..=3 {
            let m = build_m(&DilationConfig::new(d), Algorithm::One).unwrap();
            assert!(m.max_abs_diff(&triple_sum(d)) < 1e-15, "d = {d}");
        }
    }

    #[test]
    fn m_matches_operator_definition() {
        // (I ⊗ |φ⟩⟨Γ|)(SWAP ⊗ I) with explicit matrices
        let d = 2;
        let phi = random_pure_state(d * d, 5).unwrap();
        let gamma = maximally_entangled_vector(d, false).unwrap();
        let ket_bra = ComplexMatrix::from_fn(d * d, d * d, |a, b| phi.amplitudes()[a] * gamma[b].conj());
        let want = ComplexMatrix::identity(d)
            .kron(&ket_bra)
            .dot(&swap_matrix(d).unwrap().kron(&ComplexMatrix::identity(d)));
        let got = build_m(&DilationConfig::new(d).with_phi(phi), Algorithm::One).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn m_trace_and_default_phi() {
        for d in 2..=3 {
            let m = build_m(&DilationConfig::new(d), Algorithm::One).unwrap();
            let tr = m.dagger().dot(&m).trace();
            assert!((tr - C64::new((d * d) as f64, 0.0)).norm() < 1e-13);
            let explicit = DilationConfig::new(d).with_phi(crate::numerics::maximally_entangled_state(d).unwrap());
            assert_eq!(build_m(&explicit, Algorithm::One).unwrap(), m);
        }
        let bad = DilationConfig::new(2).with_phi(random_pure_state(3, 1).unwrap());
        assert!(build_m(&bad, Algorithm::One).is_err());
    }

    #[test]
    fn mdagm_closed_form_and_spectrum() {
        for d in 2..=3 {
            let m = build_m(&DilationConfig::new(d), Algorithm::One).unwrap();
            let mm = m.dagger().dot(&m);
            assert!(mm.max_abs_diff(&mdagm_oracle(d)) < 1e-13);
            let eig = hermitian_eigenvalues(&mm).unwrap();
            let n = d * d * d;
            for (k, &v) in eig.iter().enumerate() {
                let want = if k < n - d { 0.0 } else { d as f64 };
                assert!((v - want).abs() < 1e-12, "d = {d} eig[{k}] = {v}");
            }
        }
    }

    #[test]
    fn mdagm_with_reference_and_hamiltonian_registers() {
        let d = 2;
        let id = ComplexMatrix::identity(d);
        let m = build_m(&DilationConfig::new(d).with_reference(true), Algorithm::One).unwrap();
        assert!(m.dagger().dot(&m).max_abs_diff(&id.kron(&mdagm_oracle(d))) < 1e-13);
        let m2 = build_m(&DilationConfig::new(d), Algorithm::Two { coupling: 1.0 }).unwrap();
        // S, H, P, Q: identity on H sits between S and P
        let mut want = ComplexMatrix::zeros(16, 16);
        for i in 0..d {
            for j in 0..d {
                let e = ComplexMatrix::unit(d, i, j);
                want = &want + &e.kron(&id).kron(&id).kron(&e);
            }
        }
        assert!(m2.dagger().dot(&m2).max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn mdagm_independent_of_phi() {
        let d = 2;
        let base = build_m(&DilationConfig::new(d), Algorithm::One).unwrap();
        let base = base.dagger().dot(&base);
        for seed in 0..10 {
            let cfg = DilationConfig::new(d).with_phi(random_pure_state(d * d, 100 + seed).unwrap());
            let m = build_m(&cfg, Algorithm::One).unwrap();
            assert!(m.dagger().dot(&m).max_abs_diff(&base) < 1e-12);
        }
    }

    #[test]
    fn generator_examples() {
        let gen = build_dilated_generator(&DilationConfig::new(2), Algorithm::One, 0.1).unwrap();
        assert_eq!(gen.layout().total_dim(), 8);
        assert!(gen.step_channel().trace_preservation_defect() < 1e-9);
        assert!(gen.step_channel().choi_min_eigenvalue().unwrap() > -1e-9);
        assert!(gen.h_op().is_none());

        let gen = build_dilated_generator(&DilationConfig::new(2), Algorithm::Two { coupling: 1.0 }, 0.1).unwrap();
        let h = gen.h_op().unwrap();
        assert_eq!(h.rows(), 16);
        assert!(h.dot(h).max_abs_diff(&ComplexMatrix::identity(16)) < 1e-12);
        assert!(h.is_hermitian(1e-12));

        assert!(build_dilated_generator(&DilationConfig::new(2), Algorithm::One, 0.0).is_err());
        assert!(build_dilated_generator(&DilationConfig::new(2), Algorithm::One, -1.0).is_err());
        assert!(matches!(
            build_dilated_generator(&DilationConfig::new(5), Algorithm::One, 0.1),
            Err(Error::DimensionLimit { .. })
        ));
        assert!(build_dilated_generator(&DilationConfig::new(4).with_reference(true), Algorithm::One, 0.1).is_err());
        assert!(build_dilated_generator(&DilationConfig::new(3), Algorithm::Two { coupling: 1.0 }, 0.1).is_err());
    }

    #[test]
    fn step_with_zero_generator() {
        let l = ComplexMatrix::identity(2).scale_real(FRAC_1_SQRT_2);
        let psi = encode_lindblad(&l).unwrap();
        let gen = build_dilated_generator(&DilationConfig::new(2), Algorithm::One, 0.01).unwrap();
        let rho = random_density_matrix(2, 3).unwrap();
        let out = wml_step(&gen, &rho, &psi).unwrap();
        assert!(trace_distance(&out.state, &rho).unwrap() < 1e-3);
    }

    #[test]
    fn step_first_order_decay() {
        let psi = encode_lindblad(&ComplexMatrix::unit(2, 0, 1)).unwrap();
        let gen = build_dilated_generator(&DilationConfig::new(2), Algorithm::One, 0.01).unwrap();
        let rho = DensityMatrix::basis(2, 1).unwrap();
        let out = wml_step(&gen, &rho, &psi).unwrap();
        assert!((out.state.population(0) - 0.01).abs() < 5e-4);
    }

    #[test]
    fn step_rejects_mismatched_program() {
        let gen = build_dilated_generator(&DilationConfig::new(2), Algorithm::One, 0.01).unwrap();
        let psi3 = encode_lindblad(&random_unit_hs_operator(3, 1).unwrap()).unwrap();
        assert!(wml_step(&gen, &DensityMatrix::maximally_mixed(2), &psi3).is_err());
        let psi = encode_lindblad(&random_unit_hs_operator(2, 1).unwrap()).unwrap();
        assert!(wml_step(&gen, &DensityMatrix::maximally_mixed(3), &psi).is_err());
        let tri = build_program_triple(&DensityMatrix::maximally_mixed(2), &psi).unwrap();
        assert!(wml_step(&gen, &DensityMatrix::maximally_mixed(2), &tri).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let l = random_unit_hs_operator(2, 4).unwrap();
        let rho = random_density_matrix(2, 4).unwrap();
        let res = wml_simulate(&l, &rho, 0.0, 1, &DilationConfig::new(2)).unwrap();
        assert_eq!(res.final_state, rho);
        assert_eq!(res.steps, 1);
    }

    #[test]
    fn simulate_validates() {
        let rho = DensityMatrix::maximally_mixed(2);
        let l = ComplexMatrix::unit(2, 0, 1);
        assert!(wml_simulate(&l, &rho, 1.0, 0, &DilationConfig::new(2)).is_err());
        let err = wml_simulate(&l.scale_real(2.0), &rho, 1.0, 10, &DilationConfig::new(2)).unwrap_err();
        assert!(err.to_string().contains("rescale_task"));
        assert!(wml_simulate(&l, &rho, -1.0, 10, &DilationConfig::new(2)).is_err());
        assert!(wml_simulate(&l, &rho, 1.0, 10, &DilationConfig::new(3)).is_err());
    }

    #[test]
    fn amplitude_damping_end_point() {
        let l = ComplexMatrix::unit(2, 0, 1);
        let rho = DensityMatrix::basis(2, 1).unwrap();
        let res = wml_simulate(&l, &rho, 1.0, 1000, &DilationConfig::new(2)).unwrap();
        assert!((res.final_state.population(1) - (-1f64).exp()).abs() < 5e-3);
        assert!((res.delta * res.steps as f64 - 1.0).abs() < 1e-12);
        assert!(res.max_drift() <= DRIFT_LIMIT);
        assert_eq!(res.drift_log.len(), 1000);
    }

    #[test]
    fn unitary_evolution_through_algorithm_two() {
        let l = ComplexMatrix::identity(2).scale_real(FRAC_1_SQRT_2);
        let plus = StateVector::normalized(vec![ONE, ONE]).unwrap();
        let rho = DensityMatrix::from_pure(&plus);
        let t = std::f64::consts::FRAC_PI_4;
        let res = wml_simulate_with_h(&ComplexMatrix::pauli_z(), &l, &rho, t, 1000, &DilationConfig::new(2)).unwrap();
        let u = ComplexMatrix::diag(&[C64::from_polar(1.0, -t), C64::from_polar(1.0, t)]);
        let want = DensityMatrix::new(u.dot(rho.matrix()).dot(&u.dagger())).unwrap();
        assert!(trace_distance(&res.final_state, &want).unwrap() < 5e-3);
    }

    #[test]
    fn zero_hamiltonian_matches_algorithm_one() {
        let l = ComplexMatrix::unit(2, 0, 1);
        let rho = random_density_matrix(2, 12).unwrap();
        let cfg = DilationConfig::new(2);
        let t = 1.0;
        let exact = apply_channel(&exact_channel(&LindbladianSpec::single(l.clone()).unwrap(), t).unwrap(), &rho).unwrap();
        let mut errs = Vec::new();
        for n in [100, 1000] {
            let one = wml_simulate(&l, &rho, t, n, &cfg).unwrap();
            let two = wml_simulate_with_h(&ComplexMatrix::zeros(2, 2), &l, &rho, t, n, &cfg).unwrap();
            let err_two = trace_distance(&two.final_state, &exact).unwrap();
            let gap = trace_distance(&two.final_state, &one.final_state).unwrap();
            assert!(gap <= 2.0 * err_two, "n = {n}: gap {gap:e} vs error {err_two:e}");
            errs.push(err_two);
        }
        let ratio = errs[0] / errs[1];
        assert!((7.0..14.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn reference_marginal_preserved() {
        let l = random_unit_hs_operator(2, 21).unwrap();
        let rho_r = random_density_matrix(2, 22).unwrap();
        let rho_s = random_density_matrix(2, 23).unwrap();
        let res = wml_simulate_with_reference(&l, &rho_r.kron(&rho_s), 0.5, 50).unwrap();
        let layout = RegisterLayout::uniform(2, 2).unwrap();
        let marginal = partial_trace(res.final_state.matrix(), &layout, &[1]).unwrap();
        assert!(marginal.max_abs_diff(rho_r.matrix()) < 1e-9);
    }

    #[test]
    fn reference_run_on_entangled_input() {
        let l = ComplexMatrix::unit(2, 0, 1);
        let phi = DensityMatrix::from_pure(&crate::numerics::maximally_entangled_state(2).unwrap());
        let res = wml_simulate_with_reference(&l, &phi, 1.0, 1000).unwrap();
        let ch = exact_channel(&LindbladianSpec::single(l).unwrap(), 1.0).unwrap();
        let want = DensityMatrix::new(ch.apply_extended(phi.matrix(), 2).unwrap()).unwrap();
        assert!(trace_distance(&res.final_state, &want).unwrap() <= 5e-3);
    }

    #[test]
    fn result_json_fields() {
        let res = wml_simulate(&ComplexMatrix::unit(2, 0, 1), &DensityMatrix::basis(2, 1).unwrap(), 0.5, 10, &DilationConfig::new(2))
            .unwrap();
        let s = crate::io::to_json_string(&res.to_json()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["n"], 10);
        assert_eq!(v["delta"], 0.05);
        assert!(v["max_drift"].as_f64().unwrap() <= DRIFT_LIMIT);
        assert_eq!(v["final_state"]["dim"], 2);
    }
}
