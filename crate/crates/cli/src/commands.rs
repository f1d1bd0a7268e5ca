use std::path::{Path, PathBuf};
use std::process::ExitCode;

use wml_core::io::{to_json_string, F17};
use wml_core::lindblad::{exact_channel, LindbladianSpec};
use wml_core::numerics::{trace_distance, ComplexMatrix, DensityMatrix};
use wml_core::program::rescale_task;
use wml_core::suite::{check_dims, run_fixed_ratio, run_sweep, run_verify, FixedRatioConfig, SweepConfig, VerifyConfig};
use wml_core::wml::{wml_simulate, wml_simulate_with_h, DilationConfig};

use crate::files::{emit, read_density, read_matrix, read_state, write};
use crate::{SimulateArgs, SweepArgs, VerifyArgs};

pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Config(String),
    /// Exit code 3.
    Io(String),
}

impl CliError {
    pub fn report(&self) -> ExitCode {
        match self {
            CliError::Config(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Io(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(3)
            }
        }
    }
}

impl From<wml_core::Error> for CliError {
    fn from(e: wml_core::Error) -> Self {
        match e {
            wml_core::Error::Json(_) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Caps the worker pool at `WML_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WML_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("WML_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot configure {n} worker threads: {e}")))
}

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Status, CliError> {
    let report = run_verify(&VerifyConfig { dim: a.dim, trials: a.trials, seed: a.seed, tol: a.tol })?;
    emit(a.out.as_deref(), &to_json_string(&report)?)?;
    for s in report.sections.iter().filter(|s| !s.pass) {
        eprintln!("failed: {} (residual {}, tol {})", s.name, s.max_residual, s.tol);
    }
    Ok(status(report.pass))
}

/// Applies `--auto-rescale`: returns the unit-norm operator and the time to run it for.
fn normalize(l: ComplexMatrix, t: f64, auto: bool) -> Result<(ComplexMatrix, f64), CliError> {
    if !auto {
        return Ok((l, t));
    }
    let task = rescale_task(&l, t)?;
    eprintln!(
        "rescaled: ‖L‖₂² = {}, running the normalized operator for t' = {}",
        F17(task.original_norm_sq),
        F17(task.rescaled_time)
    );
    Ok((task.normalized_op, task.rescaled_time))
}

fn check_dim(expected: Option<usize>, l: &ComplexMatrix) -> Result<usize, CliError> {
    let d = l.square_dim()?;
    if let Some(want) = expected {
        if want != d {
            return Err(CliError::Config(format!("--dim {want} but L is {d}×{d}")));
        }
    }
    Ok(d)
}

pub fn simulate(a: &SimulateArgs) -> Result<Status, CliError> {
    let l_in = read_matrix(&a.lindblad)?;
    let rho = read_density(&a.rho)?;
    let d = check_dim(a.dim, &l_in)?;
    check_dims(d, a.algorithm, a.with_reference)?;
    let h = a.hamiltonian.as_deref().map(read_matrix).transpose()?;
    if h.is_some() != (a.algorithm == 2) {
        return Err(CliError::Config("--hamiltonian is required with --algorithm 2 and only allowed there".into()));
    }
    let mut config = DilationConfig::new(d).with_reference(a.with_reference);
    if let Some(p) = &a.phi {
        config = config.with_phi(read_state(p)?);
    }
    let (l, t) = normalize(l_in, a.time, a.auto_rescale)?;
    let result = match &h {
        None => wml_simulate(&l, &rho, t, a.steps, &config)?,
        Some(h) => wml_simulate_with_h(h, &l, &rho, t, a.steps, &config)?,
    };
    let mut json = result.to_json();
    if a.compare_exact {
        let spec = LindbladianSpec::new(d, h, vec![l])?;
        let ch = exact_channel(&spec, t)?;
        let target = DensityMatrix::new(ch.apply_extended(rho.matrix(), rho.dim() / d)?)?;
        let dist = trace_distance(&result.final_state, &target)?;
        let line = format!("trace_distance_to_exact {}", F17(dist));
        // stdout carries the JSON when no --out is given
        if a.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        json.distance_to_exact = Some(F17(dist));
    }
    emit(a.out.as_deref(), &to_json_string(&json)?)?;
    Ok(Status::Pass)
}

fn fit_path(out: &Path) -> PathBuf {
    out.with_extension("fit.json")
}

pub fn sweep(a: &SweepArgs) -> Result<Status, CliError> {
    let lindblad = a.lindblad.as_deref().map(read_matrix).transpose()?;
    let hamiltonian = a.hamiltonian.as_deref().map(read_matrix).transpose()?;
    let phi = a.phi.as_deref().map(read_state).transpose()?;
    let (lindblad, t) = match lindblad {
        Some(l) => {
            let (l, t) = normalize(l, a.time, a.auto_rescale)?;
            (Some(l), t)
        }
        None => (None, a.time),
    };
    if let Some(ratio) = a.fixed_ratio {
        if a.algorithm != 1 || hamiltonian.is_some() || phi.is_some() {
            return Err(CliError::Config("--fixed-ratio supports algorithm 1 with the default φ only".into()));
        }
        let cfg = FixedRatioConfig {
            d: a.dim,
            ratio,
            times: a.times.clone(),
            trials: a.trials,
            seed: a.seed,
            with_reference: a.with_reference,
            lindblad,
            max_spread: a.max_spread,
        };
        let report = run_fixed_ratio(&cfg)?;
        emit(a.out.as_deref(), &to_json_string(&report)?)?;
        return Ok(status(report.pass));
    }
    let cfg = SweepConfig {
        d: a.dim,
        t,
        ns: a.steps_list.clone(),
        trials: a.trials,
        seed: a.seed,
        algorithm: a.algorithm,
        with_reference: a.with_reference,
        lindblad,
        hamiltonian,
        phi,
        expect_slope: a.expect_slope,
        slope_tol: a.slope_tol,
    };
    let outcome = run_sweep(&cfg)?;
    let fit = to_json_string(&outcome.fit)?;
    match &a.out {
        Some(p) => {
            write(p, &outcome.csv())?;
            write(&fit_path(p), &fit)?;
        }
        None => {
            print!("{}", outcome.csv());
            eprint!("{fit}");
        }
    }
    if !outcome.fit.pass {
        eprintln!(
            "slope {} outside {} ± {}",
            outcome.fit.slope, outcome.fit.expect_slope, outcome.fit.slope_tol
        );
    }
    Ok(status(outcome.fit.pass))
}
