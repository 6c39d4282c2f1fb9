//! Shift-invariant systems `{T_{kb} φ}` from a sampled spectrum `φ̂`.
//!
//! The spectrum is sampled at `ξ_i = −F + iΔξ`, `Δξ = 2F/G`. In the time domain the
//! samples describe a function of period `P = 1/Δξ`, which is realized on `dim` equispaced
//! points of `[0, P)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{FrameFamily, IndexConvention};
use crate::hilbert::{ComplexVector, Tolerance, C64};
use crate::operator_rep::{shift_invariance_residual, FamilyGenerator, ShiftMode};

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    grid_size: usize,
    freq_extent: f64,
    values: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    grid_size: usize,
    freq_extent: f64,
    values: Vec<[f64; 2]>,
}

impl SampledSpectrum {
    pub fn new(freq_extent: f64, values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("spectrum needs at least one sample".into()));
        }
        if !(freq_extent.is_finite() && freq_extent > 0.0) {
            return Err(Error::Parameter(format!("frequency extent must be positive, got {freq_extent}")));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parameter("spectrum has non-finite samples".into()));
        }
        Ok(Self { grid_size: values.len(), freq_extent, values })
    }

    /// Samples `f(ξ_i)` on the grid of `grid_size` points over `[−F, F)`.
    pub fn from_fn(grid_size: usize, freq_extent: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = (0..grid_size).map(|i| f(grid_point(i, grid_size, freq_extent))).collect();
        Self::new(freq_extent, values)
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn freq_extent(&self) -> f64 {
        self.freq_extent
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.freq_extent / self.grid_size as f64
    }

    pub fn xi(&self, i: usize) -> f64 {
        grid_point(i, self.grid_size, self.freq_extent)
    }

    /// Time-domain period `1/Δξ`.
    pub fn period(&self) -> f64 {
        1.0 / self.spacing()
    }

    /// Nearest grid sample; zero outside `[−F, F]`.
    pub fn lookup(&self, xi: f64) -> C64 {
        if xi.abs() > self.freq_extent {
            return C64::new(0.0, 0.0);
        }
        let idx = ((xi + self.freq_extent) / self.spacing() + 0.5).floor();
        if idx < 0.0 || idx >= self.grid_size as f64 {
            return C64::new(0.0, 0.0);
        }
        self.values[idx as usize]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|z| z * c).collect(), ..self.clone() }
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spacing()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for SampledSpectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpectrumJson {
            grid_size: self.grid_size,
            freq_extent: self.freq_extent,
            values: self.values.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SampledSpectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SpectrumJson::deserialize(d)?;
        if raw.values.len() != raw.grid_size {
            return Err(serde::de::Error::custom(format!(
                "grid_size {} but {} values",
                raw.grid_size,
                raw.values.len()
            )));
        }
        let values = raw.values.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        SampledSpectrum::new(raw.freq_extent, values).map_err(serde::de::Error::custom)
    }
}

fn grid_point(i: usize, g: usize, f: f64) -> f64 {
    f * (2.0 * i as f64 - g as f64) / g as f64
}

/// Indicator of `[−1/2, 1/2)`, the spectrum of `sin(πx)/(πx)`.
pub fn sinc_spectrum(grid_size: usize, freq_extent: f64) -> Result<SampledSpectrum> {
    if freq_extent < 0.5 {
        return Err(Error::Parameter(format!("extent {freq_extent} does not cover [-1/2, 1/2]")));
    }
    SampledSpectrum::from_fn(grid_size, freq_extent, |xi| {
        C64::new(if (-0.5..0.5).contains(&xi) { 1.0 } else { 0.0 }, 0.0)
    })
}

/// `exp(−π ξ² / width²)`.
pub fn gauss_spectrum(grid_size: usize, freq_extent: f64, width: f64) -> Result<SampledSpectrum> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::Parameter(format!("width must be positive, got {width}")));
    }
    SampledSpectrum::from_fn(grid_size, freq_extent, |xi| C64::new((-PI * xi * xi / (width * width)).exp(), 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    pub gamma_grid: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub ess_inf_support: f64,
    pub ess_sup: f64,
    pub zero_fraction: f64,
    pub warnings: Vec<String>,
}

/// Fraction of grid points discarded at each end for essential bounds.
const ESS_TRIM: f64 = 0.005;

/// `Φ(γ) = Σ_k |φ̂((γ+k)/b)|²` on `gamma_points` equispaced points of `[0, 1)`.
pub fn phi_profile(spec: &SampledSpectrum, b: f64, gamma_points: usize, tol: &Tolerance) -> Result<PhiProfile> {
    if gamma_points == 0 {
        return Err(Error::Parameter("need at least one γ point".into()));
    }
    let gammas: Vec<f64> = (0..gamma_points).map(|i| i as f64 / gamma_points as f64).collect();
    phi_profile_at(spec, b, &gammas, tol)
}

/// [`phi_profile`] on an arbitrary list of `γ` values.
pub fn phi_profile_at(spec: &SampledSpectrum, b: f64, gammas: &[f64], tol: &Tolerance) -> Result<PhiProfile> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Parameter(format!("translation step b must be positive, got {b}")));
    }
    if gammas.is_empty() {
        return Err(Error::Parameter("need at least one γ point".into()));
    }
    tol.validate()?;
    check_extent(spec, tol)?;

    let f = spec.freq_extent();
    let phi_values: Vec<f64> = gammas
        .par_iter()
        .map(|&g| {
            let lo = (-f * b - g).ceil() as i64;
            let hi = (f * b - g).floor() as i64;
            (lo..=hi).map(|k| spec.lookup((g + k as f64) / b).norm_sqr()).sum()
        })
        .collect();

    let n = phi_values.len();
    let zeros = phi_values.iter().filter(|&&v| v <= tol.zero_level).count();
    let faint = phi_values.iter().filter(|&&v| v > 0.0 && v <= tol.zero_level).count();

    let mut sorted = phi_values.clone();
    sorted.sort_by(f64::total_cmp);
    let ess_sup = sorted[n - 1 - trim(n)];
    let support: Vec<f64> = sorted.iter().copied().filter(|&v| v > tol.zero_level).collect();
    let ess_inf_support = if support.is_empty() { 0.0 } else { support[trim(support.len())] };

    let mut warnings = Vec::new();
    if faint > 0 {
        warnings.push(format!(
            "Φ is positive but at most {:.1e} at {faint} grid points; the grid cannot separate these from zeros",
            tol.zero_level
        ));
    }
    Ok(PhiProfile {
        gamma_grid: gammas.to_vec(),
        phi_values,
        ess_inf_support: ess_inf_support.min(ess_sup),
        ess_sup,
        zero_fraction: zeros as f64 / n as f64,
        warnings,
    })
}

fn trim(n: usize) -> usize {
    ((n as f64 * ESS_TRIM).floor() as usize).min(n.saturating_sub(1) / 2)
}

/// Rejects spectra whose energy reaches the outer 1% of the sampled extent, where the
/// truncated `k`-sum would silently lose terms.
fn check_extent(spec: &SampledSpectrum, tol: &Tolerance) -> Result<()> {
    let f = spec.freq_extent();
    let peak = spec.values().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let edge = (0..spec.grid_size())
        .filter(|&i| spec.xi(i).abs() >= 0.99 * f)
        .map(|i| spec.values()[i].norm_sqr())
        .fold(0.0, f64::max);
    if peak > 0.0 && edge > tol.zero_level * peak {
        return Err(Error::Parameter(format!(
            "spectrum has mass within 1% of the extent ±{f}; widen the sampled extent"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SiClass {
    RieszBasis,
    FrameSequenceNotRiesz,
    NotFrameSequence,
}

/// Riesz basis when `Φ` is bounded away from zero off at most two grid points, frame
/// sequence when it is bounded away from zero on its support, otherwise neither. "Bounded
/// away" means the essential infimum exceeds `√zero_level` times the essential supremum.
pub fn classify_si(profile: &PhiProfile, tol: &Tolerance) -> SiClass {
    let n = profile.phi_values.len().max(1);
    if profile.ess_inf_support <= 0.0 || profile.ess_inf_support <= tol.zero_level.sqrt() * profile.ess_sup {
        SiClass::NotFrameSequence
    } else if profile.zero_fraction <= 2.0 / n as f64 {
        SiClass::RieszBasis
    } else {
        SiClass::FrameSequenceNotRiesz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationMode {
    /// Periodized translation; the family is `{C^k φ}` for a cyclic shift `C`.
    #[default]
    Cyclic,
    /// Samples shifted past the end are dropped. Indexed by `ℕ₀`.
    ZeroPad,
}

#[derive(Debug, Clone)]
pub struct TranslateFamily {
    pub family: FrameFamily,
    /// Translation step in samples.
    pub step: usize,
    pub mode: TranslationMode,
}

impl TranslateFamily {
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self { family: self.family.permuted(perm)?, ..self.clone() })
    }

    fn shift(&self, v: &ComplexVector) -> ComplexVector {
        shift_samples(v, self.step, self.mode)
    }
}

fn shift_samples(v: &ComplexVector, step: usize, mode: TranslationMode) -> ComplexVector {
    let n = v.len();
    ComplexVector::from_fn(n, |t, _| match mode {
        TranslationMode::Cyclic => v[(t + n - step % n) % n],
        TranslationMode::ZeroPad if t >= step => v[t - step],
        TranslationMode::ZeroPad => C64::new(0.0, 0.0),
    })
}

/// Time-domain generator on `dim` samples of one period: the DFT coefficient at frequency
/// `n/P` is `φ̂(n/P)·√Δξ`, read from grid index `n + G/2`, and the inverse DFT is unitary.
pub fn time_domain(spec: &SampledSpectrum, dim: usize) -> Result<ComplexVector> {
    let g = spec.grid_size();
    if g % 2 != 0 {
        return Err(Error::Parameter("time-domain realization needs an even grid size".into()));
    }
    if dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    let half = (dim / 2) as i64;
    let scale = spec.spacing().sqrt() / (dim as f64).sqrt();
    let coeffs: Vec<(i64, C64)> = (-half..dim as i64 - half)
        .filter_map(|n| {
            let i = n + (g / 2) as i64;
            (0..g as i64).contains(&i).then(|| (n, spec.values()[i as usize] * scale))
        })
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .collect();
    let d = dim as i64;
    Ok(ComplexVector::from_fn(dim, |t, _| {
        coeffs
            .iter()
            .map(|&(n, c)| c * C64::from_polar(1.0, 2.0 * PI * (n * t as i64).rem_euclid(d) as f64 / dim as f64))
            .sum()
    }))
}

/// `K` translates `T_{kb} φ`, `k = 0..K`, on `dim` samples of the period. The step `b·dim/P`
/// must be a whole number of samples.
pub fn si_family(
    spec: &SampledSpectrum,
    b: f64,
    count: usize,
    dim: usize,
    mode: TranslationMode,
) -> Result<TranslateFamily> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Parameter(format!("translation step b must be positive, got {b}")));
    }
    if count == 0 {
        return Err(Error::Parameter("count must be positive".into()));
    }
    let period = spec.period();
    let step = samples_per_step(b, dim, period).ok_or_else(|| Error::Discretization {
        reason: format!("step b = {b} is not a whole number of samples for dim {dim} and period {period}"),
        suggested_dim: suggest_dim(b, dim, period),
    })?;
    let phi = time_domain(spec, dim)?;
    let mut vectors = Vec::with_capacity(count);
    let mut v = phi;
    for _ in 0..count {
        let next = shift_samples(&v, step, mode);
        vectors.push(v);
        v = next;
    }
    let index = match mode {
        TranslationMode::Cyclic => IndexConvention::IntWindow { offset: 0 },
        TranslationMode::ZeroPad => IndexConvention::Nat0,
    };
    let labels = (0..count).map(|k| format!("t:{k}")).collect();
    let family = FrameFamily::new(vectors, index)?.with_labels(labels)?;
    Ok(TranslateFamily { family, step, mode })
}

fn samples_per_step(b: f64, dim: usize, period: f64) -> Option<usize> {
    let s = b * dim as f64 / period;
    let r = s.round();
    ((s - r).abs() <= 1e-9 * s.max(1.0) && r >= 1.0).then_some(r as usize)
}

fn suggest_dim(b: f64, dim: usize, period: f64) -> usize {
    (dim.max(1)..=dim.max(1) * 64).find(|&d| samples_per_step(b, d, period).is_some()).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationCheck {
    pub is_iterated: bool,
    /// `max_k ‖T_b f_k − f_{k+1}‖ / ‖f_{k+1}‖`.
    pub max_step_residual: f64,
    pub first_violation: Option<usize>,
    pub shift_residual: f64,
    pub shift_stable: bool,
}

pub fn translation_representation_check(fam: &TranslateFamily, tol: &Tolerance) -> Result<TranslationCheck> {
    let vs = fam.family.vectors();
    let mut max_step_residual: f64 = 0.0;
    let mut first_violation = None;
    for k in 0..vs.len().saturating_sub(1) {
        let target = &vs[k + 1];
        let scale = target.norm();
        let miss = (fam.shift(&vs[k]) - target).norm();
        let r = if scale > 0.0 { miss / scale } else { miss };
        if r > tol.residual_abs && first_violation.is_none() {
            first_violation = Some(k);
        }
        max_step_residual = max_step_residual.max(r);
    }
    let shift_residual = shift_invariance_residual(&fam.family, tol, ShiftMode::Cyclic)?;
    Ok(TranslationCheck {
        is_iterated: first_violation.is_none(),
        max_step_residual,
        first_violation,
        shift_residual,
        shift_stable: shift_residual <= tol.residual_abs,
    })
}

/// Shannon translates at truncation `n`: `sinc_spectrum(2n, 1)` has period `n`, sampled on
/// `oversample·n` points with step `b = 1/oversample` and `oversample·n` translates.
#[derive(Debug, Clone, Copy)]
pub struct ShannonGenerator {
    pub oversample: usize,
}

impl FamilyGenerator for ShannonGenerator {
    fn family(&self, n: usize) -> Result<FrameFamily> {
        let os = self.oversample.max(1);
        let spec = sinc_spectrum(2 * n, 1.0)?;
        Ok(si_family(&spec, 1.0 / os as f64, os * n, os * n, TranslationMode::Cyclic)?.family)
    }
}
