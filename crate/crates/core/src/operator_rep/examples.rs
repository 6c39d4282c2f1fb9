use crate::error::{Error, Result};
use crate::frames::{standard_basis, FrameFamily, IndexConvention};
use crate::hilbert::{ComplexMatrix, ComplexVector, C64};

use super::FamilyGenerator;

fn aldroubi_diagonal(dim: usize) -> Vec<f64> {
    (1..=dim).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect()
}

/// Diagonal operator with entries `1 − 2^{−j}`, `j = 1..=dim`.
pub fn aldroubi_operator(dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    let d = aldroubi_diagonal(dim);
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| if r == c { C64::new(d[r], 0.0) } else { C64::new(0.0, 0.0) }))
}

/// Orbit `{D^k g}_{k < count}` of the diagonal `D = diag(1 − 2^{−j})` applied to
/// `g_j = √(1 − (1 − 2^{−j})²)`, truncated to `ℂ^dim`. Labels are `aldroubi:k`.
pub fn aldroubi_family(dim: usize, count: usize) -> Result<FrameFamily> {
    if dim == 0 || count == 0 {
        return Err(Error::Parameter("dimension and count must be positive".into()));
    }
    let d = aldroubi_diagonal(dim);
    // 1 − (1 − 2^{−j})² written without cancellation
    let mut v: Vec<f64> = (1..=dim)
        .map(|j| {
            let h = 0.5f64.powi(j as i32);
            (h * (2.0 - h)).sqrt()
        })
        .collect();
    let mut vectors = Vec::with_capacity(count);
    for _ in 0..count {
        vectors.push(ComplexVector::from_iterator(dim, v.iter().map(|&x| C64::new(x, 0.0))));
        v.iter_mut().zip(&d).for_each(|(x, a)| *x *= a);
    }
    let labels = (0..count).map(|k| format!("aldroubi:{k}")).collect();
    FrameFamily::new(vectors, IndexConvention::Nat0)?.with_labels(labels)
}

/// `aldroubi_family(n, n)` for each truncation size `n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AldroubiGenerator;

impl FamilyGenerator for AldroubiGenerator {
    fn family(&self, size: usize) -> Result<FrameFamily> {
        aldroubi_family(size, size)
    }
}

/// Standard basis of `ℂ^n` in natural order; its iteration operator is the one-step shift.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShiftOnbGenerator;

impl FamilyGenerator for ShiftOnbGenerator {
    fn family(&self, size: usize) -> Result<FrameFamily> {
        standard_basis(size)
    }
}
