//! Verification and sweep drivers shared by the command line and the tests.
//!
//! Every run is a pure function of its configuration: trials use seeds
//! `seed + i`, parallel work is merged by `(n, trial)`, and all floats are
//! written with 17 significant digits.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::F17;
use crate::lindblad::{exact_channel, LindbladianSpec};
use crate::metrics::{
    check_generator_identity, check_hamiltonian_identity, check_lemma1, check_mdagm_closed_form,
    check_mdagm_spectrum, check_phi_invariance, fit_convergence, single_step_order, t_squared_scaling_check,
    CurvePoint, ErrorCurve, IdentityReport,
};
use crate::numerics::random::{
    random_density_matrix_with, random_hermitian_with, random_unit_hs_operator_with, rng, trial_seed,
};
use crate::numerics::{trace_distance, ComplexMatrix, DensityMatrix, StateVector};
use crate::program::{build_program_triple, encode_hamiltonian, encode_lindblad};
use crate::wml::{
    build_dilated_generator, run_with_generator, Algorithm, DilatedGenerator, DilationConfig, MAX_DIM,
    MAX_DIM_ALGORITHM_TWO, MAX_DIM_WITH_REFERENCE,
};

/// Step sizes `2⁻³ … 2⁻¹⁰` for the single-step order check.
pub fn single_step_deltas() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

pub const SINGLE_STEP_SLOPE: f64 = 2.0;
pub const SINGLE_STEP_SLOPE_TOL: f64 = 0.1;
/// Largest `d` at which the verify suite runs the single-step order check.
pub const SINGLE_STEP_MAX_DIM: usize = 3;

const DIAMOND_NOTE: &str = "channel errors are state trace distances on sampled inputs; the exact diamond norm is not computed, so these are lower bounds on it";

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: F17,
    pub sections: Vec<IdentityReport>,
    pub notes: Vec<String>,
    pub pass: bool,
}

pub fn check_verify_dim(dim: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::DimensionLimit { d: dim, limit: MAX_DIM });
    }
    Ok(())
}

/// Runs every identity suite at `config.dim`.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    check_verify_dim(config.dim)?;
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if !(config.tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be non-negative", config.tol)));
    }
    let (d, trials, seed, tol) = (config.dim, config.trials, config.seed, config.tol);
    let mut sections = Vec::new();
    sections.extend(check_lemma1(d, trials, seed, tol)?);
    let mut closed = check_mdagm_closed_form(d)?;
    closed = IdentityReport::new(closed.name, closed.trials, closed.max_residual.0, tol);
    sections.push(closed);
    sections.push(check_mdagm_spectrum(d, tol)?);
    sections.push(check_hamiltonian_identity(d, trials, seed, tol)?);
    sections.extend(check_phi_invariance(d, trials.min(10), seed, tol)?);
    sections.extend(check_generator_identity(d, trials, seed, tol)?);
    let mut notes = Vec::new();
    if d <= SINGLE_STEP_MAX_DIM {
        let fit = single_step_order(d, &single_step_deltas(), trials.min(10), seed)?;
        sections.push(IdentityReport::new(
            "single_step_order",
            trials.min(10),
            (fit.slope.0 - SINGLE_STEP_SLOPE).abs(),
            SINGLE_STEP_SLOPE_TOL,
        ));
        notes.push(format!(
            "single_step_order: residual is |slope - 2| for the log-log fit over step sizes 2^-3..2^-10 (slope {}, r^2 {})",
            fit.slope, fit.r_squared
        ));
    } else {
        notes.push(format!("single_step_order skipped: the dilated step channel is too large above d = {SINGLE_STEP_MAX_DIM}"));
    }
    let pass = sections.iter().all(|s| s.pass);
    Ok(VerifyReport { dim: d, trials, seed, tol: F17(tol), sections, notes, pass })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub d: usize,
    pub t: f64,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub algorithm: u8,
    pub with_reference: bool,
    /// Fixed Lindblad operator; drawn per trial when absent.
    pub lindblad: Option<ComplexMatrix>,
    /// Fixed Hamiltonian for algorithm 2; drawn per trial when absent.
    pub hamiltonian: Option<ComplexMatrix>,
    pub phi: Option<StateVector>,
    pub expect_slope: f64,
    pub slope_tol: f64,
}

impl SweepConfig {
    /// `d = 2`, `t = 1`, `n ∈ {10, 10², 10³, 10⁴}`, 10 trials, slope band `−1 ± 0.15`.
    pub fn new(d: usize) -> Self {
        Self {
            d,
            t: 1.0,
            ns: vec![10, 100, 1000, 10000],
            trials: 10,
            seed: 0,
            algorithm: 1,
            with_reference: false,
            lindblad: None,
            hamiltonian: None,
            phi: None,
            expect_slope: -1.0,
            slope_tol: 0.15,
        }
    }

    fn dilation(&self) -> DilationConfig {
        DilationConfig { d: self.d, with_reference: self.with_reference, phi: self.phi.clone() }
    }

    fn state_dim(&self) -> usize {
        if self.with_reference {
            self.d * self.d
        } else {
            self.d
        }
    }
}

/// Shared validation for sweep-like runs.
pub fn check_dims(d: usize, algorithm: u8, with_reference: bool) -> Result<()> {
    let limit = match (algorithm, with_reference) {
        (1, false) => MAX_DIM,
        (1, true) => MAX_DIM_WITH_REFERENCE,
        (2, _) => MAX_DIM_ALGORITHM_TWO,
        (a, _) => return Err(Error::InvalidArgument(format!("algorithm must be 1 or 2, got {a}"))),
    };
    if !(2..=limit).contains(&d) {
        return Err(Error::DimensionLimit { d, limit });
    }
    Ok(())
}

fn check_operator(name: &str, op: &Option<ComplexMatrix>, d: usize) -> Result<()> {
    if let Some(m) = op {
        let n = m.square_dim()?;
        if n != d {
            return Err(Error::DimensionMismatch(format!("{name} is {n}×{n} but d = {d}")));
        }
    }
    Ok(())
}

fn validate_sweep(cfg: &SweepConfig) -> Result<()> {
    check_dims(cfg.d, cfg.algorithm, cfg.with_reference)?;
    if cfg.ns.len() < 3 {
        return Err(Error::InvalidArgument(format!("a sweep needs at least 3 step counts, got {}", cfg.ns.len())));
    }
    if cfg.ns[0] == 0 || cfg.ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("step counts must be positive and strictly increasing".into()));
    }
    if !(cfg.t > 0.0 && cfg.t <= crate::lindblad::MAX_TIME) {
        return Err(Error::InvalidArgument(format!("sweep time {} must lie in (0, {}]", cfg.t, crate::lindblad::MAX_TIME)));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    check_operator("L", &cfg.lindblad, cfg.d)?;
    check_operator("H", &cfg.hamiltonian, cfg.d)?;
    if cfg.hamiltonian.is_some() && cfg.algorithm != 2 {
        return Err(Error::InvalidArgument("a Hamiltonian requires algorithm 2".into()));
    }
    if let Some(l) = &cfg.lindblad {
        encode_lindblad(l)?;
    }
    Ok(())
}

/// One trial's inputs: `L`, optional `H`, and the initial state.
#[derive(Clone, Debug)]
struct TrialInput {
    l: ComplexMatrix,
    h: Option<ComplexMatrix>,
    rho: DensityMatrix,
}

fn trial_input(cfg: &SweepConfig, i: usize) -> Result<TrialInput> {
    let mut g = rng(trial_seed(cfg.seed, i));
    let l = match &cfg.lindblad {
        Some(l) => l.clone(),
        None => random_unit_hs_operator_with(&mut g, cfg.d)?,
    };
    let h = match (cfg.algorithm, &cfg.hamiltonian) {
        (2, Some(h)) => Some(h.clone()),
        (2, None) => Some(random_hermitian_with(&mut g, cfg.d)?),
        _ => None,
    };
    let rho = random_density_matrix_with(&mut g, cfg.state_dim())?;
    Ok(TrialInput { l, h, rho })
}

fn exact_target(cfg: &SweepConfig, input: &TrialInput) -> Result<DensityMatrix> {
    let spec = LindbladianSpec::new(cfg.d, input.h.clone(), vec![input.l.clone()])?;
    let ch = exact_channel(&spec, cfg.t)?;
    let ref_dim = cfg.state_dim() / cfg.d;
    DensityMatrix::new(ch.apply_extended(input.rho.matrix(), ref_dim)?)
}

fn algorithm_for(input: &TrialInput) -> Result<Algorithm> {
    Ok(match &input.h {
        None => Algorithm::One,
        Some(h) => Algorithm::Two { coupling: encode_hamiltonian(h)?.time_scale },
    })
}

fn run_trial(gen: &DilatedGenerator, input: &TrialInput, n: usize) -> Result<DensityMatrix> {
    let psi = encode_lindblad(&input.l)?;
    let res = match &input.h {
        None => run_with_generator(gen, &input.rho, &psi, n)?,
        Some(h) => {
            let triple = build_program_triple(&encode_hamiltonian(h)?.sigma, &psi)?;
            run_with_generator(gen, &input.rho, &triple, n)?
        }
    };
    Ok(res.final_state)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub n: usize,
    pub delta: F17,
    pub mean_distance: F17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    pub d: usize,
    pub algorithm: u8,
    pub with_reference: bool,
    pub t: F17,
    pub trials: usize,
    pub seed: u64,
    pub points: Vec<PointSummary>,
    pub slope: F17,
    pub intercept: F17,
    pub r_squared: F17,
    pub expect_slope: F17,
    pub slope_tol: F17,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub curve: ErrorCurve,
    pub fit: SweepFit,
}

impl SweepOutcome {
    pub fn csv(&self) -> String {
        self.curve.to_csv()
    }
}

/// Runs `trials × |ns|` simulations against the exact channel and fits the error curve.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    validate_sweep(cfg)?;
    let inputs: Vec<TrialInput> = (0..cfg.trials).map(|i| trial_input(cfg, i)).collect::<Result<_>>()?;
    let targets: Vec<DensityMatrix> = inputs.par_iter().map(|inp| exact_target(cfg, inp)).collect::<Result<_>>()?;
    let points: Vec<CurvePoint> = cfg
        .ns
        .par_iter()
        .map(|&n| -> Result<CurvePoint> {
            let delta = cfg.t / n as f64;
            // generators depend on the input only through the coupling
            let mut cache: HashMap<u64, DilatedGenerator> = HashMap::new();
            let mut distances = Vec::with_capacity(inputs.len());
            for (input, target) in inputs.iter().zip(&targets) {
                let alg = algorithm_for(input)?;
                let key = match alg {
                    Algorithm::One => 0,
                    Algorithm::Two { coupling } => coupling.to_bits(),
                };
                let gen = match cache.entry(key) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(build_dilated_generator(&cfg.dilation(), alg, delta)?),
                };
                let out = run_trial(gen, input, n)?;
                distances.push(trace_distance(&out, target)?);
            }
            Ok(CurvePoint::new(n, delta, distances))
        })
        .collect::<Result<_>>()?;
    let curve = fit_convergence(points)?;
    let slope = curve.fitted_slope.0;
    let pass = (slope - cfg.expect_slope).abs() <= cfg.slope_tol;
    let fit = SweepFit {
        d: cfg.d,
        algorithm: cfg.algorithm,
        with_reference: cfg.with_reference,
        t: F17(cfg.t),
        trials: cfg.trials,
        seed: cfg.seed,
        points: curve
            .points
            .iter()
            .map(|p| PointSummary { n: p.n, delta: p.delta, mean_distance: F17(p.mean()) })
            .collect(),
        slope: curve.fitted_slope,
        intercept: curve.fitted_intercept,
        r_squared: curve.r_squared,
        expect_slope: F17(cfg.expect_slope),
        slope_tol: F17(cfg.slope_tol),
        pass,
        note: DIAMOND_NOTE.to_string(),
    };
    Ok(SweepOutcome { curve, fit })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedRatioConfig {
    pub d: usize,
    pub ratio: f64,
    pub times: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub with_reference: bool,
    pub lindblad: Option<ComplexMatrix>,
    /// Pass when max/min of the mean errors is at most this.
    pub max_spread: f64,
}

impl FixedRatioConfig {
    pub fn new(d: usize, ratio: f64) -> Self {
        Self {
            d,
            ratio,
            times: vec![0.5, 1.0, 2.0],
            trials: 10,
            seed: 0,
            with_reference: false,
            lindblad: None,
            max_spread: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub t: F17,
    pub n: usize,
    pub mean_error: F17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedRatioReport {
    pub d: usize,
    pub with_reference: bool,
    pub ratio: F17,
    pub trials: usize,
    pub seed: u64,
    pub points: Vec<RatioSummary>,
    pub max_over_min: F17,
    pub max_spread: F17,
    pub pass: bool,
    pub note: String,
}

/// Mean errors at `n = round(t²/ratio)` across `times`; flat errors pass.
pub fn run_fixed_ratio(cfg: &FixedRatioConfig) -> Result<FixedRatioReport> {
    check_dims(cfg.d, 1, cfg.with_reference)?;
    check_operator("L", &cfg.lindblad, cfg.d)?;
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if cfg.times.is_empty() || cfg.times.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidArgument("times must be non-empty and non-negative".into()));
    }
    let state_dim = if cfg.with_reference { cfg.d * cfg.d } else { cfg.d };
    let reports: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(trial_seed(cfg.seed, i));
            let l = match &cfg.lindblad {
                Some(l) => l.clone(),
                None => random_unit_hs_operator_with(&mut g, cfg.d)?,
            };
            let rho = random_density_matrix_with(&mut g, state_dim)?;
            t_squared_scaling_check(&l, &rho, cfg.ratio, &cfg.times)
        })
        .collect::<Result<_>>()?;
    let points: Vec<RatioSummary> = (0..cfg.times.len())
        .map(|k| RatioSummary {
            t: reports[0].points[k].t,
            n: reports[0].points[k].n,
            mean_error: F17(reports.iter().map(|r| r.points[k].error.0).sum::<f64>() / reports.len() as f64),
        })
        .collect();
    let positive: Vec<f64> = points.iter().filter(|p| p.t.0 > 0.0).map(|p| p.mean_error.0).collect();
    let max_over_min = if positive.len() < 2 {
        1.0
    } else {
        let max = positive.iter().copied().fold(f64::MIN, f64::max);
        let min = positive.iter().copied().fold(f64::MAX, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    };
    Ok(FixedRatioReport {
        d: cfg.d,
        with_reference: cfg.with_reference,
        ratio: F17(cfg.ratio),
        trials: cfg.trials,
        seed: cfg.seed,
        points,
        max_over_min: F17(max_over_min),
        max_spread: F17(cfg.max_spread),
        pass: max_over_min <= cfg.max_spread,
        note: DIAMOND_NOTE.to_string(),
    })
}
