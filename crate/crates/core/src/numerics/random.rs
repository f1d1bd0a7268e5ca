//! Seeded random test inputs.
//!
//! Every generator draws from `ChaCha20Rng::seed_from_u64(seed)`; standard
//! complex Gaussians have independent `N(0, 1/2)` real and imaginary parts.
//! Derived seeds for trial `i` of a run seeded with `s` are `s + i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};
use super::states::{DensityMatrix, StateVector};
use crate::error::{Error, Result};

pub type Prng = ChaCha20Rng;

pub fn rng(seed: u64) -> Prng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Seed for trial `i` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let entries: Vec<C64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, entries).expect("shape matches")
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidArgument("dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `GG†/Tr[GG†]` for a Ginibre `G`.
pub fn random_density_matrix_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<DensityMatrix> {
    check_dim(d)?;
    let g = ginibre(rng, d, d);
    let gg = g.dot(&g.dagger()).hermitian_part();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_real(1.0 / tr))
}

/// Ginibre matrix divided by its Schatten-2 norm.
pub fn random_unit_hs_operator_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<ComplexMatrix> {
    check_dim(d)?;
    let g = ginibre(rng, d, d);
    let n = g.hs_norm();
    Ok(g.scale_real(1.0 / n))
}

pub fn random_pure_state_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<StateVector> {
    check_dim(d)?;
    StateVector::normalized((0..d).map(|_| complex_gaussian(rng)).collect())
}

/// `(G + G†)/2` for a Ginibre `G`.
pub fn random_hermitian_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<ComplexMatrix> {
    check_dim(d)?;
    Ok(ginibre(rng, d, d).hermitian_part())
}

pub fn random_density_matrix(d: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_matrix_with(&mut rng(seed), d)
}

pub fn random_unit_hs_operator(d: usize, seed: u64) -> Result<ComplexMatrix> {
    random_unit_hs_operator_with(&mut rng(seed), d)
}

pub fn random_pure_state(d: usize, seed: u64) -> Result<StateVector> {
    random_pure_state_with(&mut rng(seed), d)
}

pub fn random_hermitian(d: usize, seed: u64) -> Result<ComplexMatrix> {
    random_hermitian_with(&mut rng(seed), d)
}

/// Unnormalized square Ginibre matrix; test helper.
pub fn random_matrix(d: usize, seed: u64) -> ComplexMatrix {
    ginibre(&mut rng(seed), d, d)
}
