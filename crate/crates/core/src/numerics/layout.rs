//! Register bookkeeping for composite spaces.
//!
//! Register 0 is the most significant digit of the composite row-major index.

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Ordered per-register dimensions of a composite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    dims: Vec<usize>,
}

impl RegisterLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("invalid register dims {dims:?}")));
        }
        Ok(Self { dims })
    }

    /// `count` registers of dimension `d` each.
    pub fn uniform(d: usize, count: usize) -> Result<Self> {
        Self::new(vec![d; count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Splits a composite index into per-register digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Layout of the registers not in `traced`, in original order.
    pub fn kept(&self, traced: &[usize]) -> Result<RegisterLayout> {
        self.check_registers(traced)?;
        let dims: Vec<usize> = (0..self.len()).filter(|r| !traced.contains(r)).map(|r| self.dims[r]).collect();
        if dims.is_empty() {
            Ok(RegisterLayout { dims: vec![1] })
        } else {
            Ok(RegisterLayout { dims })
        }
    }

    fn check_registers(&self, regs: &[usize]) -> Result<()> {
        if let Some(&bad) = regs.iter().find(|&&r| r >= self.len()) {
            return Err(Error::InvalidArgument(format!(
                "register {bad} out of range for {} registers",
                self.len()
            )));
        }
        Ok(())
    }

    fn check_matrix(&self, x: &ComplexMatrix) -> Result<()> {
        let n = x.square_dim()?;
        if n != self.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix of dimension {n} against layout {:?} ({})",
                self.dims,
                self.total_dim()
            )));
        }
        Ok(())
    }
}

/// Traces out the registers listed in `traced`, keeping the rest in order.
pub fn partial_trace(x: &ComplexMatrix, layout: &RegisterLayout, traced: &[usize]) -> Result<ComplexMatrix> {
    layout.check_matrix(x)?;
    let kept = layout.kept(traced)?;
    let kept_regs: Vec<usize> = (0..layout.len()).filter(|r| !traced.contains(r)).collect();
    let traced_regs: Vec<usize> = (0..layout.len()).filter(|r| traced.contains(r)).collect();
    let traced_dims: Vec<usize> = traced_regs.iter().map(|&r| layout.dims[r]).collect();
    let kept_dim = kept.total_dim();
    let traced_dim: usize = traced_dims.iter().product();

    // full[a * traced_dim + t] = composite index of (kept digits a, traced digits t)
    let mut full = vec![0usize; kept_dim * traced_dim];
    let mut digits = vec![0usize; layout.len()];
    for a in 0..kept_dim {
        let ka = if kept_regs.is_empty() { vec![] } else { kept.digits(a) };
        for (slot, &r) in ka.iter().zip(&kept_regs) {
            digits[r] = *slot;
        }
        for t in 0..traced_dim {
            let mut rem = t;
            for (&r, &d) in traced_regs.iter().zip(&traced_dims).rev() {
                digits[r] = rem % d;
                rem /= d;
            }
            full[a * traced_dim + t] = layout.index(&digits);
        }
    }

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        for b in 0..kept_dim {
            let mut acc = ZERO;
            for t in 0..traced_dim {
                acc += x[(full[a * traced_dim + t], full[b * traced_dim + t])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Places `op`, acting on `targets` (in that order), into the full space
/// with the identity on every other register.
pub fn embed_operator(op: &ComplexMatrix, layout: &RegisterLayout, targets: &[usize]) -> Result<ComplexMatrix> {
    layout.check_registers(targets)?;
    if (1..targets.len()).any(|i| targets[..i].contains(&targets[i])) {
        return Err(Error::InvalidArgument(format!("repeated register in {targets:?}")));
    }
    let sub_dim: usize = targets.iter().map(|&r| layout.dims[r]).product();
    let m = op.square_dim()?;
    if m != sub_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {m} on registers {targets:?} of total dimension {sub_dim}"
        )));
    }
    let rest: Vec<usize> = (0..layout.len()).filter(|r| !targets.contains(r)).collect();
    let n = layout.total_dim();
    let rest_dim = n / sub_dim;
    // members[r] lists (composite index, sub index) sharing rest-index r
    let mut members: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(sub_dim); rest_dim];
    for idx in 0..n {
        let digits = layout.digits(idx);
        let sub = targets.iter().fold(0, |acc, &r| acc * layout.dims[r] + digits[r]);
        let other = rest.iter().fold(0, |acc, &r| acc * layout.dims[r] + digits[r]);
        members[other].push((idx, sub));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for group in &members {
        for &(i, a) in group {
            for &(j, b) in group {
                out[(i, j)] = op[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Permutation operator exchanging registers `a` and `b` (which must have equal dimension).
pub fn swap_registers(layout: &RegisterLayout, a: usize, b: usize) -> Result<ComplexMatrix> {
    layout.check_registers(&[a, b])?;
    if layout.dims[a] != layout.dims[b] {
        return Err(Error::DimensionMismatch(format!(
            "cannot swap registers of dimension {} and {}",
            layout.dims[a], layout.dims[b]
        )));
    }
    let n = layout.total_dim();
    let mut p = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        let mut digits = layout.digits(col);
        digits.swap(a, b);
        p[(layout.index(&digits), col)] = ONE;
    }
    Ok(p)
}
