//! Identity checks, channel distances and convergence fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::F17;
use crate::lindblad::{apply_channel, choi_matrix, exact_channel, LindbladianSpec, QuantumChannel};
use crate::numerics::random::{
    random_density_matrix_with, random_pure_state_with, random_unit_hs_operator_with, rng, trial_seed,
};
use crate::numerics::{
    hermitian_eigenvalues, maximally_entangled_state, partial_trace, swap_matrix, trace_distance,
    trace_distance_matrices, ComplexMatrix, DensityMatrix, RegisterLayout, StateVector, I,
};
use crate::program::{build_program_triple, encode_lindblad};
use crate::wml::{build_dilated_generator, build_m, dilated_spec, wml_simulate, wml_step, Algorithm, DilationConfig};

/// Tolerance for the closed form of `M†M`.
pub const MDAGM_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub trials: usize,
    pub max_residual: F17,
    pub tol: F17,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, trials: usize, max_residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            trials,
            max_residual: F17(max_residual),
            tol: F17(tol),
            pass: max_residual <= tol,
        }
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("identity checks need d ≥ 2, got {d}")));
    }
    Ok(())
}

/// Residuals `‖lhs − rhs‖₂` of the three partial-trace identities for one `(L, ρ)`.
pub fn lemma1_residuals(m: &ComplexMatrix, l: &ComplexMatrix, rho: &DensityMatrix) -> Result<[f64; 3]> {
    let d = rho.dim();
    let psi = encode_lindblad(l)?;
    let x = rho.matrix().kron(&psi.density());
    let layout = RegisterLayout::uniform(d, 3)?;
    let tr = |y: &ComplexMatrix| partial_trace(y, &layout, &[1, 2]);
    let mm = m.dagger().dot(m);
    let ldl = l.dagger().dot(l);
    let r = rho.matrix();
    Ok([
        tr(&m.dot(&x).dot(&m.dagger()))?.hs_distance(&l.dot(r).dot(&l.dagger())),
        tr(&mm.dot(&x))?.hs_distance(&ldl.dot(r)),
        tr(&x.dot(&mm))?.hs_distance(&r.dot(&ldl)),
    ])
}

/// Draws `L` then `ρ` for trial `i`.
fn trial_pair(d: usize, seed: u64, i: usize) -> Result<(ComplexMatrix, DensityMatrix)> {
    let mut g = rng(trial_seed(seed, i));
    let l = random_unit_hs_operator_with(&mut g, d)?;
    let rho = random_density_matrix_with(&mut g, d)?;
    Ok((l, rho))
}

/// `Tr_PQ[M(ρ⊗ψ)M†] = LρL†`, `Tr_PQ[M†M(ρ⊗ψ)] = L†Lρ`, `Tr_PQ[(ρ⊗ψ)M†M] = ρL†L`.
pub fn check_lemma1(d: usize, trials: usize, seed: u64, tol: f64) -> Result<[IdentityReport; 3]> {
    check_d(d)?;
    let m = build_m(&DilationConfig::new(d), Algorithm::One)?;
    let mut worst = [0.0f64; 3];
    for i in 0..trials {
        let (l, rho) = trial_pair(d, seed, i)?;
        let r = lemma1_residuals(&m, &l, &rho)?;
        for k in 0..3 {
            worst[k] = worst[k].max(r[k]);
        }
    }
    Ok([
        IdentityReport::new("reduced_jump", trials, worst[0], tol),
        IdentityReport::new("reduced_left", trials, worst[1], tol),
        IdentityReport::new("reduced_right", trials, worst[2], tol),
    ])
}

/// `Σ_{ij} |i⟩⟨j| ⊗ I ⊗ |i⟩⟨j|` built entry by entry.
pub fn mdagm_index_sum(d: usize) -> ComplexMatrix {
    let n = d * d * d;
    ComplexMatrix::from_fn(n, n, |row, col| {
        let (s, p, q) = (row / (d * d), (row / d) % d, row % d);
        let (s2, p2, q2) = (col / (d * d), (col / d) % d, col % d);
        if s == q && s2 == q2 && p == p2 {
            crate::numerics::ONE
        } else {
            crate::numerics::ZERO
        }
    })
}

/// Entrywise comparison of `M†M` against [`mdagm_index_sum`].
pub fn check_mdagm_closed_form(d: usize) -> Result<IdentityReport> {
    check_d(d)?;
    let m = build_m(&DilationConfig::new(d), Algorithm::One)?;
    let residual = m.dagger().dot(&m).max_abs_diff(&mdagm_index_sum(d));
    Ok(IdentityReport::new("mdagm_closed_form", 1, residual, MDAGM_TOL))
}

/// Largest deviation of the spectrum of `M†M` from `{d (×d), 0 (×d³−d)}`.
pub fn mdagm_spectrum_residual(d: usize) -> Result<f64> {
    check_d(d)?;
    let m = build_m(&DilationConfig::new(d), Algorithm::One)?;
    let eig = hermitian_eigenvalues(&m.dagger().dot(&m))?;
    let zeros = d * d * d - d;
    Ok(eig
        .iter()
        .enumerate()
        .map(|(k, &v)| if k < zeros { v.abs() } else { (v - d as f64).abs() })
        .fold(0.0, f64::max))
}

pub fn check_mdagm_spectrum(d: usize, tol: f64) -> Result<IdentityReport> {
    Ok(IdentityReport::new("mdagm_spectrum", 1, mdagm_spectrum_residual(d)?, tol))
}

/// `Tr₂[−i[SWAP, ρ⊗σ]] = −i[σ, ρ]` over random pairs.
pub fn check_hamiltonian_identity(d: usize, trials: usize, seed: u64, tol: f64) -> Result<IdentityReport> {
    check_d(d)?;
    let swap = swap_matrix(d)?;
    let layout = RegisterLayout::uniform(d, 2)?;
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let mut g = rng(trial_seed(seed, i));
        let rho = random_density_matrix_with(&mut g, d)?;
        let sigma = random_density_matrix_with(&mut g, d)?;
        let lhs = partial_trace(&swap.commutator(rho.kron(&sigma).matrix()).scale(-I), &layout, &[1])?;
        let rhs = sigma.matrix().commutator(rho.matrix()).scale(-I);
        worst = worst.max(lhs.hs_distance(&rhs));
    }
    Ok(IdentityReport::new("hamiltonian_swap_identity", trials, worst, tol))
}

/// `M_φ†M_φ` and `Tr_PQ[M_φ(ρ⊗ψ)M_φ†]` against the default `φ = Γ/√d`.
pub fn check_phi_invariance(d: usize, trials: usize, seed: u64, tol: f64) -> Result<[IdentityReport; 2]> {
    check_d(d)?;
    let base = build_m(&DilationConfig::new(d), Algorithm::One)?;
    let base_mm = base.dagger().dot(&base);
    let layout = RegisterLayout::uniform(d, 3)?;
    let (mut worst_mm, mut worst_first): (f64, f64) = (0.0, 0.0);
    for i in 0..trials {
        let mut g = rng(trial_seed(seed, i));
        let phi = random_pure_state_with(&mut g, d * d)?;
        let l = random_unit_hs_operator_with(&mut g, d)?;
        let rho = random_density_matrix_with(&mut g, d)?;
        let m = build_m(&DilationConfig::new(d).with_phi(phi), Algorithm::One)?;
        worst_mm = worst_mm.max(m.dagger().dot(&m).max_abs_diff(&base_mm));
        let x = rho.matrix().kron(&encode_lindblad(&l)?.density());
        let jump = |op: &ComplexMatrix| partial_trace(&op.dot(&x).dot(&op.dagger()), &layout, &[1, 2]);
        worst_first = worst_first.max(jump(&m)?.hs_distance(&jump(&base)?));
    }
    Ok([
        IdentityReport::new("phi_invariance_mdagm", trials, worst_mm, tol),
        IdentityReport::new("phi_invariance_first_order", trials, worst_first, tol),
    ])
}

/// `Tr_PQ[𝓜(ρ⊗ψ)] = 𝓛(ρ)` and `Tr_HPQ[𝓜(ρ⊗σ⊗ψ)] = −i[σ,ρ] + 𝓛(ρ)`.
pub fn check_generator_identity(d: usize, trials: usize, seed: u64, tol: f64) -> Result<[IdentityReport; 2]> {
    check_d(d)?;
    let cfg = DilationConfig::new(d);
    let one = dilated_spec(&cfg, Algorithm::One)?;
    let two = dilated_spec(&cfg, Algorithm::Two { coupling: 1.0 })?;
    let layout3 = RegisterLayout::uniform(d, 3)?;
    let layout4 = RegisterLayout::uniform(d, 4)?;
    let (mut w1, mut w2): (f64, f64) = (0.0, 0.0);
    for i in 0..trials {
        let mut g = rng(trial_seed(seed, i));
        let l = random_unit_hs_operator_with(&mut g, d)?;
        let rho = random_density_matrix_with(&mut g, d)?;
        let sigma = random_density_matrix_with(&mut g, d)?;
        let psi = encode_lindblad(&l)?;
        let want1 = LindbladianSpec::single(l.clone())?.apply(rho.matrix())?;
        let got1 = partial_trace(&one.apply(&rho.matrix().kron(&psi.density()))?, &layout3, &[1, 2])?;
        w1 = w1.max(got1.hs_distance(&want1));
        let triple = build_program_triple(&sigma, &psi)?;
        let want2 = LindbladianSpec::new(d, Some(sigma.matrix().clone()), vec![l])?.apply(rho.matrix())?;
        let got2 = partial_trace(&two.apply(&rho.matrix().kron(triple.omega()))?, &layout4, &[1, 2, 3])?;
        w2 = w2.max(got2.hs_distance(&want2));
    }
    Ok([
        IdentityReport::new("generator_first_order_alg1", trials, w1, tol),
        IdentityReport::new("generator_first_order_alg2", trials, w2, tol),
    ])
}

/// Trace distance between one WML step of size `delta` and `e^{𝓛Δ}(ρ)`.
pub fn single_step_defect(l: &ComplexMatrix, rho: &DensityMatrix, delta: f64) -> Result<f64> {
    let d = rho.dim();
    let gen = build_dilated_generator(&DilationConfig::new(d), Algorithm::One, delta)?;
    let psi = encode_lindblad(l)?;
    let out = wml_step(&gen, rho, &psi)?.state;
    let exact = apply_channel(&exact_channel(&LindbladianSpec::single(l.clone())?, delta)?, rho)?;
    trace_distance(&out, &exact)
}

/// Mean single-step defect over `trials` random `(L, ρ)` for each `Δ`, with a log-log fit.
pub fn single_step_order(d: usize, deltas: &[f64], trials: usize, seed: u64) -> Result<PowerLawFit> {
    check_d(d)?;
    let pairs: Vec<_> = (0..trials).map(|i| trial_pair(d, seed, i)).collect::<Result<_>>()?;
    let mut means = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let gen = build_dilated_generator(&DilationConfig::new(d), Algorithm::One, delta)?;
        let mut sum = 0.0;
        for (l, rho) in &pairs {
            let out = wml_step(&gen, rho, &encode_lindblad(l)?)?.state;
            let exact = apply_channel(&exact_channel(&LindbladianSpec::single(l.clone())?, delta)?, rho)?;
            sum += trace_distance(&out, &exact)?;
        }
        means.push(sum / trials as f64);
    }
    fit_power_law(deltas, &means)
}

/// Normalized trace distance between the Choi states of two channels.
pub fn choi_trace_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("channels on dimensions {} and {}", a.dim(), b.dim())));
    }
    Ok(trace_distance_matrices(&choi_matrix(a), &choi_matrix(b))?.clamp(0.0, 1.0))
}

/// Maximum of `½‖(id⊗a)(φ) − (id⊗b)(φ)‖₁` over the maximally entangled input
/// and `trials` random pure inputs on `R ⊗ S`.
pub fn sampled_diamond_lower_bound(a: &QuantumChannel, b: &QuantumChannel, trials: usize, seed: u64) -> Result<f64> {
    let d = a.dim();
    if d != b.dim() {
        return Err(Error::DimensionMismatch(format!("channels on dimensions {} and {}", d, b.dim())));
    }
    let mut inputs = vec![maximally_entangled_state(d)?];
    let mut g = rng(seed);
    for _ in 0..trials {
        inputs.push(random_pure_state_with(&mut g, d * d)?);
    }
    let mut best: f64 = 0.0;
    for phi in &inputs {
        best = best.max(bipartite_distance(a, b, phi)?);
    }
    Ok(best.clamp(0.0, 1.0))
}

fn bipartite_distance(a: &QuantumChannel, b: &QuantumChannel, phi: &StateVector) -> Result<f64> {
    let d = a.dim();
    let x = phi.outer();
    let ya = a.apply_extended(&x, d)?;
    let yb = b.apply_extended(&x, d)?;
    trace_distance_matrices(&ya, &yb)
}

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: F17,
    pub intercept: F17,
    pub r_squared: F17,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch("fit needs equally many x and y values".into()));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(format!("fit needs at least 3 points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit needs at least two distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(PowerLawFit { slope: F17(slope), intercept: F17(intercept), r_squared: F17(r_squared) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub delta: F17,
    pub distances: Vec<F17>,
}

impl CurvePoint {
    pub fn new(n: usize, delta: f64, distances: Vec<f64>) -> Self {
        Self { n, delta: F17(delta), distances: distances.into_iter().map(F17).collect() }
    }

    pub fn mean(&self) -> f64 {
        self.distances.iter().map(|x| x.0).sum::<f64>() / self.distances.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub points: Vec<CurvePoint>,
    pub fitted_slope: F17,
    pub fitted_intercept: F17,
    pub r_squared: F17,
}

impl ErrorCurve {
    /// `n,delta,trial,distance` rows, sorted by `(n, trial)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,delta,trial,distance\n");
        for p in &self.points {
            for (trial, dist) in p.distances.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", p.n, p.delta, trial, dist));
            }
        }
        out
    }
}

/// Fits `log(mean distance)` against `log n`.
pub fn fit_convergence(mut points: Vec<CurvePoint>) -> Result<ErrorCurve> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!("convergence fit needs at least 3 points, got {}", points.len())));
    }
    points.sort_by_key(|p| p.n);
    for p in &points {
        if p.distances.is_empty() {
            return Err(Error::InvalidArgument(format!("no distances at n = {}", p.n)));
        }
        if p.distances.iter().any(|x| !(0.0..=1.0).contains(&x.0)) {
            return Err(Error::InvalidArgument(format!("distance outside [0, 1] at n = {}", p.n)));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(CurvePoint::mean).collect();
    if ys.contains(&0.0) {
        return Err(Error::InvalidArgument("zero mean distance cannot be fitted on a log scale".into()));
    }
    let fit = fit_power_law(&xs, &ys)?;
    Ok(ErrorCurve { points, fitted_slope: fit.slope, fitted_intercept: fit.intercept, r_squared: fit.r_squared })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub t: F17,
    pub n: usize,
    pub error: F17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub ratio: F17,
    pub points: Vec<RatioPoint>,
    /// Max over min of the errors at `t > 0`; 1 when fewer than two such points exist.
    pub max_over_min: F17,
}

/// Runs WML at `n = round(t²/ratio)` for each `t` and reports how flat the error is.
///
/// `rho` lives on `S`, or on `R ⊗ S` to measure on an entangled input.
pub fn t_squared_scaling_check(
    l: &ComplexMatrix,
    rho: &DensityMatrix,
    ratio: f64,
    t_values: &[f64],
) -> Result<FlatnessReport> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!("ratio t²/n = {ratio} must be positive")));
    }
    let d = l.square_dim()?;
    let with_reference = rho.dim() == d * d && d > 1;
    let config = DilationConfig::new(d).with_reference(with_reference);
    let spec = LindbladianSpec::single(l.clone())?;
    let mut points = Vec::with_capacity(t_values.len());
    for &t in t_values {
        if t == 0.0 {
            points.push(RatioPoint { t: F17(0.0), n: 1, error: F17(0.0) });
            continue;
        }
        let n = (t * t / ratio).round();
        if !(n >= 1.0) || n > usize::MAX as f64 {
            return Err(Error::InvalidArgument(format!("t = {t} with t²/n = {ratio} gives step count {n}")));
        }
        let n = n as usize;
        let res = wml_simulate(l, rho, t, n, &config)?;
        let ch = exact_channel(&spec, t)?;
        let exact = DensityMatrix::new(ch.apply_extended(rho.matrix(), rho.dim() / d)?)?;
        points.push(RatioPoint { t: F17(t), n, error: F17(trace_distance(&res.final_state, &exact)?) });
    }
    let positive: Vec<f64> = points.iter().filter(|p| p.t.0 > 0.0).map(|p| p.error.0).collect();
    let max_over_min = if positive.len() < 2 {
        1.0
    } else {
        let max = positive.iter().copied().fold(f64::MIN, f64::max);
        let min = positive.iter().copied().fold(f64::MAX, f64::min);
        if min > 0.0 { max / min } else { f64::INFINITY }
    };
    Ok(FlatnessReport { ratio: F17(ratio), points, max_over_min: F17(max_over_min) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_matrix;
    use crate::numerics::{ComplexMatrix, ONE};

    #[test]
    fn mdagm_first_register_trace_is_identity() {
        let layout = RegisterLayout::uniform(2, 3).unwrap();
        let m = build_m(&DilationConfig::new(2), Algorithm::One).unwrap();
        let reduced = partial_trace(&m.dagger().dot(&m), &layout, &[0]).unwrap();
        let oracle = partial_trace(&mdagm_index_sum(2), &layout, &[0]).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
        assert!(oracle.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn reduced_identity_examples() {
        let m = build_m(&DilationConfig::new(2), Algorithm::One).unwrap();
        let l = ComplexMatrix::unit(2, 0, 1);
        let rho = DensityMatrix::basis(2, 1).unwrap();
        let r = lemma1_residuals(&m, &l, &rho).unwrap();
        assert!(r.iter().all(|&x| x <= 1e-13), "{r:?}");

        for d in 2..=3 {
            let m = build_m(&DilationConfig::new(d), Algorithm::One).unwrap();
            let l = ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt());
            let rho = crate::numerics::random_density_matrix(d, 3).unwrap();
            assert!(lemma1_residuals(&m, &l, &rho).unwrap().iter().all(|&x| x <= 1e-13));
        }
    }

    #[test]
    fn reduced_identity_random_trials() {
        for rep in check_lemma1(3, 100, 42, 1e-11).unwrap() {
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn mdagm_checks() {
        assert!(check_mdagm_closed_form(2).unwrap().max_residual.0 <= 1e-14);
        assert!(check_mdagm_closed_form(3).unwrap().pass);
        assert!(mdagm_spectrum_residual(2).unwrap() < 1e-12);
        assert!(mdagm_spectrum_residual(3).unwrap() < 1e-12);
        assert!(check_mdagm_closed_form(1).is_err());
    }

    #[test]
    fn identity_report_pass_flag() {
        assert!(IdentityReport::new("x", 1, 1e-12, 1e-11).pass);
        assert!(!IdentityReport::new("x", 1, 1e-10, 1e-11).pass);
        assert!(IdentityReport::new("x", 1, 1e-11, 1e-11).pass);
    }

    #[test]
    fn hamiltonian_and_phi_and_generator() {
        assert!(check_hamiltonian_identity(2, 100, 1, 1e-12).unwrap().pass);
        for rep in check_phi_invariance(2, 10, 2, 1e-12).unwrap() {
            assert!(rep.pass, "{rep:?}");
        }
        for rep in check_generator_identity(2, 20, 3, 1e-11).unwrap() {
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn choi_distance_examples() {
        let id = QuantumChannel::identity(2);
        assert_eq!(choi_trace_distance(&id, &id).unwrap(), 0.0);
        let dep = QuantumChannel::completely_depolarizing(2);
        assert!((choi_trace_distance(&id, &dep).unwrap() - 0.75).abs() < 1e-12);
        let spec = LindbladianSpec::single(ComplexMatrix::unit(2, 0, 1)).unwrap();
        let a = exact_channel(&spec, 1.0).unwrap();
        let b = exact_channel(&spec, 1.0 + 1e-6).unwrap();
        assert!(choi_trace_distance(&a, &b).unwrap() <= 1e-5);
        assert!(choi_trace_distance(&id, &QuantumChannel::identity(3)).is_err());
    }

    #[test]
    fn diamond_lower_bound_examples() {
        let id = QuantumChannel::identity(2);
        assert_eq!(sampled_diamond_lower_bound(&id, &id, 5, 0).unwrap(), 0.0);
        let z = QuantumChannel::unitary(&ComplexMatrix::pauli_z()).unwrap();
        assert!((sampled_diamond_lower_bound(&id, &z, 5, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_dominates_choi_distance() {
        for seed in 0..50u64 {
            let mk = |s: u64| {
                let l = random_matrix(2, s).scale_real(0.6);
                exact_channel(&LindbladianSpec::single(l).unwrap(), 0.7).unwrap()
            };
            let (a, b) = (mk(2 * seed), mk(2 * seed + 1));
            let c = choi_trace_distance(&a, &b).unwrap();
            let s = sampled_diamond_lower_bound(&a, &b, 3, seed).unwrap();
            assert!(s >= c - 1e-12);
            assert_eq!(c.to_bits(), choi_trace_distance(&b, &a).unwrap().to_bits());
            assert_eq!(s.to_bits(), sampled_diamond_lower_bound(&b, &a, 3, seed).unwrap().to_bits());
        }
    }

    #[test]
    fn power_law_fits() {
        let ns = [10.0, 100.0, 1000.0, 10000.0];
        let pts: Vec<CurvePoint> = ns.iter().map(|&n| CurvePoint::new(n as usize, 1.0 / n, vec![1.0 / n])).collect();
        let c = fit_convergence(pts).unwrap();
        assert!((c.fitted_slope.0 + 1.0).abs() < 1e-9);
        assert!(c.r_squared.0 >= 0.999999);

        let noise = [0.3, -0.8, 0.5, -0.1];
        let pts: Vec<CurvePoint> = ns
            .iter()
            .zip(noise)
            .map(|(&n, e)| CurvePoint::new(n as usize, 1.0 / n, vec![0.37 / n * (1.0 + 0.01 * e)]))
            .collect();
        assert!((fit_convergence(pts).unwrap().fitted_slope.0 + 1.0).abs() < 0.02);

        let two: Vec<CurvePoint> = ns[..2].iter().map(|&n| CurvePoint::new(n as usize, 1.0 / n, vec![1.0 / n])).collect();
        assert!(fit_convergence(two).is_err());
        let zero: Vec<CurvePoint> = ns.iter().map(|&n| CurvePoint::new(n as usize, 1.0 / n, vec![0.0])).collect();
        assert!(fit_convergence(zero).is_err());
    }

    #[test]
    fn curve_csv_layout() {
        let pts = vec![
            CurvePoint::new(100, 0.01, vec![0.001, 0.002]),
            CurvePoint::new(10, 0.1, vec![0.01, 0.02]),
            CurvePoint::new(1000, 0.001, vec![0.0001, 0.0002]),
        ];
        let c = fit_convergence(pts).unwrap();
        let csv = c.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,delta,trial,distance");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("10,1.0000000000000001e-1,0,"));
        assert!(lines[6].starts_with("1000,"));
    }

    #[test]
    fn flatness_zero_time() {
        let l = ComplexMatrix::unit(2, 0, 1);
        let rho = DensityMatrix::basis(2, 1).unwrap();
        let rep = t_squared_scaling_check(&l, &rho, 1e-2, &[0.0]).unwrap();
        assert_eq!(rep.points[0].error.0, 0.0);
        assert!(t_squared_scaling_check(&l, &rho, 10.0, &[0.5]).is_err());
    }

    #[test]
    fn doubling_n_halves_error() {
        let l = ComplexMatrix::unit(2, 0, 1);
        let plus = StateVector::normalized(vec![ONE, ONE]).unwrap();
        let rho = DensityMatrix::from_pure(&plus);
        let exact = apply_channel(&exact_channel(&LindbladianSpec::single(l.clone()).unwrap(), 1.0).unwrap(), &rho).unwrap();
        let err = |n| {
            let res = wml_simulate(&l, &rho, 1.0, n, &DilationConfig::new(2)).unwrap();
            trace_distance(&res.final_state, &exact).unwrap()
        };
        let r = err(400) / err(200);
        assert!((r - 0.5).abs() <= 0.15, "ratio {r}");
    }
}
