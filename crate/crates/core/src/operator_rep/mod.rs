//! Iteration-operator representations `f_{k+1} = T f_k` of ordered frames and
//! finite-truncation diagnostics for the boundedness of `T`.
//!
//! Nothing here certifies boundedness of an infinite-dimensional operator. The
//! verdicts summarise how `‖T_N‖` behaves over a ladder of truncations and are
//! heuristic by construction.

mod examples;
mod interleave;

pub use examples::{aldroubi_family, aldroubi_operator, AldroubiGenerator, ShiftOnbGenerator};
pub use interleave::{
    interleave, interleave_onbs, interleaving_classify, label_tag, AlternatingOnbGenerator,
    InterleavePattern, InterleavingClassification, Source,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{FrameFamily, IndexConvention};
use crate::hilbert::{self, numeric_rank, pinv, ComplexMatrix, Tolerance};

/// How numerically dependent families are treated when constructing `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependencePolicy {
    /// Any dependence at the rank cutoff makes the representation impossible.
    #[default]
    Strict,
    /// Dependence is accepted when the minimal-norm `T` still interpolates the family
    /// within `residual_abs`; `T` is then determined on the numerically resolved span.
    Resolved,
}

/// Right shift used on coefficient sequences of `ℤ`-windowed families.
/// `ℕ₀` families always use zero fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    #[default]
    ZeroFill,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepresentationOptions {
    pub independence: IndependencePolicy,
    pub shift_mode: ShiftMode,
    /// Minimum growth of `‖T_N‖` per doubling of `N` for an unbounded verdict.
    pub growth_factor: f64,
    /// Maximum relative variation of `‖T_N‖` per step for a bounded verdict.
    pub plateau_rel: f64,
}

impl Default for RepresentationOptions {
    fn default() -> Self {
        Self {
            independence: IndependencePolicy::Strict,
            shift_mode: ShiftMode::ZeroFill,
            growth_factor: 1.5,
            plateau_rel: 0.05,
        }
    }
}

impl RepresentationOptions {
    pub fn resolved() -> Self {
        Self { independence: IndependencePolicy::Resolved, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct IterationOperator {
    /// `J × J` minimal-Frobenius-norm solution of `T f_k = f_{k+1}`, zero on the
    /// orthogonal complement of the span of `f_0, …, f_{K−2}`.
    pub operator: ComplexMatrix,
    pub operator_norm: f64,
    /// `max_k ‖T f_k − f_{k+1}‖ / ‖f_{k+1}‖`.
    pub interp_residual: f64,
    pub family_rank: usize,
    /// `σ_max / σ_min` over the retained singular values of `f_0, …, f_{K−2}`.
    pub condition: f64,
    pub warnings: Vec<String>,
}

pub fn construct_iteration_operator(fam: &FrameFamily, tol: &Tolerance) -> Result<IterationOperator> {
    construct_iteration_operator_with(fam, tol, IndependencePolicy::Strict)
}

pub fn construct_iteration_operator_with(
    fam: &FrameFamily,
    tol: &Tolerance,
    policy: IndependencePolicy,
) -> Result<IterationOperator> {
    let k = fam.len();
    let j = fam.dim();
    let u = fam.synthesis_matrix();
    let family_sigma = hilbert::singular_values(&u)?;
    let family_rank = numeric_rank(&family_sigma, tol);
    let mut warnings = Vec::new();

    if policy == IndependencePolicy::Strict && family_rank < k {
        return Err(Error::RepresentationImpossible {
            size: None,
            reason: format!(
                "family is linearly dependent at the rank cutoff (rank {family_rank} for {k} vectors)"
            ),
        });
    }
    if k == 1 {
        return Ok(IterationOperator {
            operator: ComplexMatrix::zeros(j, j),
            operator_norm: 0.0,
            interp_residual: 0.0,
            family_rank,
            condition: 1.0,
            warnings,
        });
    }

    let head = u.columns(0, k - 1).into_owned();
    let tail = u.columns(1, k - 1).into_owned();
    let head_sigma = hilbert::singular_values(&head)?;
    let head_rank = numeric_rank(&head_sigma, tol);
    let condition = if head_rank == 0 { f64::INFINITY } else { head_sigma[0] / head_sigma[head_rank - 1] };

    let operator = &tail * pinv(&head, tol)?;
    let interp_residual = (0..k - 1)
        .map(|i| {
            let target = fam.vector(i + 1);
            let miss = (&operator * fam.vector(i) - target).norm();
            let scale = target.norm();
            if scale > 0.0 { miss / scale } else { miss }
        })
        .fold(0.0, f64::max);

    if interp_residual > tol.residual_abs {
        match policy {
            IndependencePolicy::Resolved => {
                return Err(Error::RepresentationImpossible {
                    size: None,
                    reason: format!(
                        "no operator maps each vector to its successor: minimal-norm interpolation residual {interp_residual:.3e} exceeds {:.1e}",
                        tol.residual_abs
                    ),
                })
            }
            IndependencePolicy::Strict => warnings.push(format!(
                "interpolation residual {interp_residual:.3e} exceeds {:.1e} despite numeric independence",
                tol.residual_abs
            )),
        }
    }
    if family_rank < k {
        warnings.push(format!(
            "family is numerically dependent (rank {family_rank} for {k} vectors); T is determined on the resolved span"
        ));
    } else if condition > 1.0 / tol.rank_rel.sqrt() {
        warnings.push(format!("ill-conditioned family: condition number {condition:.3e}"));
    }

    let operator_norm = hilbert::operator_norm(&operator)?;
    Ok(IterationOperator { operator, operator_norm, interp_residual, family_rank, condition, warnings })
}

/// Distance of the right-shifted kernel of the synthesis operator from the kernel itself:
/// `‖(I − P) 𝒯 Kb‖₂` with `Kb` an orthonormal kernel basis and `P` its projector.
/// Zero exactly when the kernel is trivial or shift-invariant.
pub fn shift_invariance_residual(fam: &FrameFamily, tol: &Tolerance, mode: ShiftMode) -> Result<f64> {
    let kb = fam.kernel_basis(tol)?;
    if kb.ncols() == 0 {
        return Ok(0.0);
    }
    let cyclic = matches!(fam.index(), IndexConvention::IntWindow { .. }) && mode == ShiftMode::Cyclic;
    let shifted = right_shift(&kb, cyclic);
    let leftover = &shifted - &kb * (kb.adjoint() * &shifted);
    hilbert::operator_norm(&leftover)
}

fn right_shift(coeffs: &ComplexMatrix, cyclic: bool) -> ComplexMatrix {
    let (k, d) = coeffs.shape();
    let mut out = ComplexMatrix::zeros(k, d);
    if k > 1 {
        out.rows_mut(1, k - 1).copy_from(&coeffs.rows(0, k - 1));
    }
    if cyclic {
        out.set_row(0, &coeffs.row(k - 1));
    }
    out
}

/// A source of nested truncations of one infinite family, indexed by truncation size.
pub trait FamilyGenerator: Sync {
    fn family(&self, size: usize) -> Result<FrameFamily>;
}

impl<F> FamilyGenerator for F
where
    F: Fn(usize) -> Result<FrameFamily> + Sync,
{
    fn family(&self, size: usize) -> Result<FrameFamily> {
        self(size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    BoundedLikely,
    UnboundedLikely,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentationDiagnostics {
    /// Iteration operator at the largest truncation size.
    #[serde(skip)]
    pub operator: ComplexMatrix,
    pub interp_residual: f64,
    pub shift_residual: f64,
    pub norm_profile: Vec<(usize, f64)>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

/// Verdict from the last two steps of a norm profile: unbounded when `‖T_N‖` grows by at
/// least `growth_factor` per doubling on both steps, bounded when it varies by at most
/// `plateau_rel` on both steps, inconclusive otherwise or with fewer than three sizes.
pub fn verdict_from_profile(profile: &[(usize, f64)], opts: &RepresentationOptions) -> Verdict {
    if profile.len() < 3 {
        return Verdict::Inconclusive;
    }
    let last = &profile[profile.len() - 3..];
    let grows = last.windows(2).all(|w| {
        let doublings = (w[1].0 as f64 / w[0].0 as f64).log2();
        w[1].1 >= w[0].1 * opts.growth_factor.powf(doublings) && w[1].1 > w[0].1
    });
    let flat = last.windows(2).all(|w| (w[1].1 - w[0].1).abs() <= opts.plateau_rel * w[0].1);
    if grows {
        Verdict::UnboundedLikely
    } else if flat {
        Verdict::BoundedLikely
    } else {
        Verdict::Inconclusive
    }
}

fn check_ladder(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Parameter("size ladder is empty".into()));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) || sizes[0] == 0 {
        return Err(Error::Parameter(format!("size ladder {sizes:?} must be positive and strictly increasing")));
    }
    Ok(())
}

/// A bounded verdict contradicts a two-basis interleaving that forces `T` to be unbounded.
fn reconcile_with_interleaving(fam: &FrameFamily, verdict: Verdict, warnings: &mut Vec<String>) -> Verdict {
    match interleaving_classify(fam) {
        Ok(c) if c.predicted_unbounded && verdict == Verdict::BoundedLikely => {
            warnings.push(
                "norm profile plateaus, but the two-basis interleaving has no same-basis successor pairs, which forces T to be unbounded; verdict downgraded".into(),
            );
            Verdict::Inconclusive
        }
        _ => verdict,
    }
}

/// Tracks `‖T_N‖` over nested truncations. A representation failure at any size aborts the
/// profile with that size attached.
pub fn boundedness_profile<G: FamilyGenerator + ?Sized>(
    generator: &G,
    sizes: &[usize],
    tol: &Tolerance,
    opts: &RepresentationOptions,
) -> Result<RepresentationDiagnostics> {
    check_ladder(sizes)?;
    let runs: Vec<Result<(FrameFamily, IterationOperator)>> = sizes
        .par_iter()
        .map(|&n| {
            let fam = generator.family(n).map_err(|e| e.at_size(n))?;
            let op = construct_iteration_operator_with(&fam, tol, opts.independence).map_err(|e| e.at_size(n))?;
            Ok((fam, op))
        })
        .collect();

    let mut norm_profile = Vec::with_capacity(sizes.len());
    let mut warnings = Vec::new();
    let mut interp_residual: f64 = 0.0;
    let mut last = None;
    for (&n, run) in sizes.iter().zip(runs) {
        let (fam, op) = run?;
        norm_profile.push((n, op.operator_norm));
        interp_residual = interp_residual.max(op.interp_residual);
        warnings.extend(op.warnings.iter().map(|w| format!("N={n}: {w}")));
        last = Some((fam, op));
    }
    let (fam, op) = last.expect("ladder is non-empty");
    let shift_residual = shift_invariance_residual(&fam, tol, opts.shift_mode)?;
    let verdict = verdict_from_profile(&norm_profile, opts);
    let verdict = reconcile_with_interleaving(&fam, verdict, &mut warnings);
    Ok(RepresentationDiagnostics {
        operator: op.operator,
        interp_residual,
        shift_residual,
        norm_profile,
        verdict,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub m: usize,
    pub lower_bound: f64,
}

/// Lower frame bounds of `{f_0, …, f_n} ∪ {f_m, …, f_last}` as a frame for the span of the
/// whole family, one per `m`. A sub-family that no longer spans gets bound 0.
pub fn tail_frame_check(fam: &FrameFamily, n: usize, ms: &[usize], tol: &Tolerance) -> Result<Vec<TailBound>> {
    if fam.index() != IndexConvention::Nat0 {
        return Err(Error::Parameter("tail frame check needs an ℕ₀-indexed family".into()));
    }
    let len = fam.len();
    if n >= len {
        return Err(Error::Range { index: n, len });
    }
    let full = hilbert::svd(&fam.synthesis_matrix())?;
    let rank = numeric_rank(&full.sigma, tol);
    let cutoff = tol.rank_rel * full.sigma_max();
    let span = full.left.columns(0, rank).into_owned();

    ms.iter()
        .map(|&m| {
            if m <= n {
                return Err(Error::Parameter(format!("tail start {m} must exceed head end {n}")));
            }
            if m >= len {
                return Err(Error::Range { index: m, len });
            }
            let positions: Vec<usize> = (0..=n).chain(m..len).collect();
            let sub = fam.select(&positions)?.synthesis_matrix();
            let sigma = hilbert::singular_values(&(span.adjoint() * sub))?;
            let lower_bound = match sigma.get(rank.wrapping_sub(1)) {
                Some(&s) if rank > 0 && s > cutoff => s * s,
                _ => 0.0,
            };
            Ok(TailBound { m, lower_bound })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub size: usize,
    pub excess: Option<usize>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub shift_residual: Option<f64>,
    pub operator_norm: Option<f64>,
    pub interp_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bounds: Option<Vec<TailBound>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExcessTrend {
    Growing,
    Constant,
    Irregular,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSeries {
    pub rows: Vec<SweepRow>,
    pub norm_profile: Vec<(usize, f64)>,
    pub verdict: Verdict,
    pub excess_trend: ExcessTrend,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interleaving: Option<InterleavingClassification>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailSpec {
    pub n: usize,
    pub ms: Vec<usize>,
}

/// Like [`boundedness_profile`], but failures at one size become row warnings and the sweep
/// continues. The verdict uses only the sizes where `T` could be constructed.
pub fn truncation_sweep<G: FamilyGenerator + ?Sized>(
    generator: &G,
    sizes: &[usize],
    tol: &Tolerance,
    opts: &RepresentationOptions,
    tail: Option<&TailSpec>,
) -> Result<SweepSeries> {
    check_ladder(sizes)?;
    let rows: Vec<(SweepRow, Option<FrameFamily>)> = sizes
        .par_iter()
        .map(|&size| sweep_row(generator, size, tol, opts, tail))
        .collect();

    let norm_profile: Vec<(usize, f64)> =
        rows.iter().filter_map(|(r, _)| r.operator_norm.map(|x| (r.size, x))).collect();
    let mut warnings: Vec<String> = rows
        .iter()
        .flat_map(|(r, _)| r.warnings.iter().map(move |w| format!("N={}: {w}", r.size)))
        .collect();
    if norm_profile.len() < sizes.len() {
        warnings.push(format!(
            "T could be constructed at {} of {} sizes",
            norm_profile.len(),
            sizes.len()
        ));
    }
    let mut verdict = verdict_from_profile(&norm_profile, opts);
    let largest = rows.iter().rev().find_map(|(_, f)| f.as_ref());
    let interleaving = largest.and_then(|f| interleaving_classify(f).ok());
    if let Some(fam) = largest {
        verdict = reconcile_with_interleaving(fam, verdict, &mut warnings);
    }
    let excesses: Vec<usize> = rows.iter().filter_map(|(r, _)| r.excess).collect();
    let excess_trend = if excesses.windows(2).all(|w| w[1] > w[0]) && excesses.len() > 1 {
        ExcessTrend::Growing
    } else if excesses.windows(2).all(|w| w[1] == w[0]) {
        ExcessTrend::Constant
    } else {
        ExcessTrend::Irregular
    };
    Ok(SweepSeries {
        rows: rows.into_iter().map(|(r, _)| r).collect(),
        norm_profile,
        verdict,
        excess_trend,
        interleaving,
        warnings,
    })
}

fn sweep_row<G: FamilyGenerator + ?Sized>(
    generator: &G,
    size: usize,
    tol: &Tolerance,
    opts: &RepresentationOptions,
    tail: Option<&TailSpec>,
) -> (SweepRow, Option<FrameFamily>) {
    let mut row = SweepRow {
        size,
        excess: None,
        lower_bound: None,
        upper_bound: None,
        shift_residual: None,
        operator_norm: None,
        interp_residual: None,
        tail_bounds: None,
        warnings: Vec::new(),
    };
    let fam = match generator.family(size) {
        Ok(f) => f,
        Err(e) => {
            row.warnings.push(e.to_string());
            return (row, None);
        }
    };
    match fam.classify(tol) {
        Ok(rep) => {
            row.excess = Some(rep.excess);
            row.lower_bound = Some(rep.lower_bound);
            row.upper_bound = Some(rep.upper_bound);
        }
        Err(e) => row.warnings.push(e.to_string()),
    }
    match shift_invariance_residual(&fam, tol, opts.shift_mode) {
        Ok(s) => row.shift_residual = Some(s),
        Err(e) => row.warnings.push(e.to_string()),
    }
    match construct_iteration_operator_with(&fam, tol, opts.independence) {
        Ok(op) => {
            row.operator_norm = Some(op.operator_norm);
            row.interp_residual = Some(op.interp_residual);
            row.warnings.extend(op.warnings);
        }
        Err(e) => row.warnings.push(e.to_string()),
    }
    if let Some(spec) = tail {
        match tail_frame_check(&fam, spec.n, &spec.ms, tol) {
            Ok(b) => row.tail_bounds = Some(b),
            Err(e) => row.warnings.push(format!("tail frame check: {e}")),
        }
    }
    (row, Some(fam))
}
