//! Dense complex linear algebra over a truncated Hilbert space `C^J`.
//!
//! Every module shares the [`Tolerance`] policy defined here: numeric rank is
//! decided by a relative singular-value cutoff, residual checks by an absolute
//! threshold, and zero sets of sampled functions by a separate level.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexVector = DVector<C64>;
pub type ComplexMatrix = DMatrix<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative singular-value cutoff: `σ_i` counts toward the rank when `σ_i > rank_rel · σ_max`.
    pub rank_rel: f64,
    /// Absolute acceptance threshold for residual checks.
    pub residual_abs: f64,
    /// Values at or below this level belong to the zero set of a sampled function.
    pub zero_level: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rank_rel: 1e-10, residual_abs: 1e-8, zero_level: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, residual_abs: f64, zero_level: f64) -> Result<Self> {
        let tol = Self { rank_rel, residual_abs, zero_level };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.rank_rel) || self.rank_rel >= 1.0 {
            return Err(Error::InvalidTolerance(format!(
                "rank_rel must lie in (0, 1), got {}",
                self.rank_rel
            )));
        }
        if !positive(self.residual_abs) {
            return Err(Error::InvalidTolerance(format!(
                "residual_abs must be positive, got {}",
                self.residual_abs
            )));
        }
        if !positive(self.zero_level) {
            return Err(Error::InvalidTolerance(format!(
                "zero_level must be positive, got {}",
                self.zero_level
            )));
        }
        Ok(())
    }
}

/// Thin singular value decomposition `M = left · diag(sigma) · right*`.
///
/// `left` is `rows × r` and `right` is `cols × r` with `r = min(rows, cols)`;
/// `sigma` is sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub right: ComplexMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.left.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*s);
        }
        scaled * self.right.adjoint()
    }
}

pub fn is_finite_matrix(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_vector(v: &ComplexVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn to_faer(m: &ComplexMatrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    })
}

fn from_faer(m: faer::MatRef<'_, faer::c64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        C64::new(z.re, z.im)
    })
}

/// Full decomposition: `left` is `rows × rows`, `right` is `cols × cols`, `sigma` has
/// `min(rows, cols)` entries in descending order.
fn full_svd(m: &ComplexMatrix) -> Result<Svd> {
    if !is_finite_matrix(m) {
        return Err(Error::NumericFailure("matrix has non-finite entries".into()));
    }
    let (rows, cols) = m.shape();
    let r = rows.min(cols);
    if r == 0 {
        return Ok(Svd {
            left: ComplexMatrix::identity(rows, rows),
            sigma: Vec::new(),
            right: ComplexMatrix::identity(cols, cols),
        });
    }
    let dec = to_faer(m)
        .svd()
        .map_err(|e| Error::NumericFailure(format!("singular value decomposition did not converge: {e:?}")))?;
    let s = dec.S().column_vector();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let u = from_faer(dec.U());
    let v = from_faer(dec.V());
    let mut left = u.clone();
    let mut right = v.clone();
    for (dst, &src) in order.iter().enumerate() {
        left.set_column(dst, &u.column(src));
        right.set_column(dst, &v.column(src));
    }
    Ok(Svd { left, sigma: order.iter().map(|&i| s[i].re).collect(), right })
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let full = full_svd(m)?;
    let r = full.sigma.len();
    Ok(Svd {
        left: full.left.columns(0, r).into_owned(),
        sigma: full.sigma,
        right: full.right.columns(0, r).into_owned(),
    })
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !is_finite_matrix(m) {
        return Err(Error::NumericFailure("matrix has non-finite entries".into()));
    }
    if m.nrows().min(m.ncols()) == 0 {
        return Ok(Vec::new());
    }
    let mut sigma: Vec<f64> = to_faer(m)
        .singular_values()
        .map_err(|e| Error::NumericFailure(format!("singular value decomposition did not converge: {e:?}")))?;
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

/// Number of singular values strictly above `rank_rel · σ_max`.
pub fn numeric_rank(sigma: &[f64], tol: &Tolerance) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    let cutoff = tol.rank_rel * smax;
    sigma.iter().filter(|&&s| s > cutoff).count()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Moore–Penrose pseudo-inverse with singular values at or below the rank cutoff treated as zero.
pub fn pinv(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let dec = svd(m)?;
    let rank = numeric_rank(&dec.sigma, tol);
    let mut out = ComplexMatrix::zeros(m.ncols(), m.nrows());
    for j in 0..rank {
        let v = dec.right.column(j);
        let u = dec.left.column(j);
        out += (v * u.adjoint()).unscale(dec.sigma[j]);
    }
    Ok(out)
}

/// Orthonormal basis (as columns) of the numeric null space of `m`.
///
/// The column count is `cols − numeric_rank(m)`.
pub fn orthonormal_null_basis(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(ComplexMatrix::identity(cols, cols));
    }
    let dec = full_svd(m)?;
    let rank = numeric_rank(&dec.sigma, tol);
    Ok(dec.right.columns(rank, cols - rank).into_owned())
}

/// Orthogonal projector onto the column span of `basis` (assumed orthonormal).
pub fn projector(basis: &ComplexMatrix) -> ComplexMatrix {
    basis * basis.adjoint()
}

/// Haar-distributed random unitary matrix (QR of a complex Gaussian matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let z = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// Complex Gaussian matrix with independent standard normal real and imaginary parts.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn rank_plus_nullity_is_cols(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9, r in 0usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = r.min(rows).min(cols);
            let m = random_matrix(rows, r, &mut rng) * random_matrix(r, cols, &mut rng);
            let tol = Tolerance::default();
            let rank = numeric_rank(&singular_values(&m).unwrap(), &tol);
            let null = orthonormal_null_basis(&m, &tol).unwrap();
            prop_assert_eq!(rank + null.ncols(), cols);
            prop_assert_eq!(rank, r);
        }

        #[test]
        fn pinv_involution(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, &mut rng);
            let tol = Tolerance::default();
            let back = pinv(&pinv(&m, &tol).unwrap(), &tol).unwrap();
            prop_assert!((back - &m).norm() <= 1e-10 * m.norm());
        }
    }
}
