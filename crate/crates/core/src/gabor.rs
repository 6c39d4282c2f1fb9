//! Finite Gabor systems on `ℤ_L` with cyclic translation and discrete modulation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{FrameFamily, IndexConvention};
use crate::hilbert::{ComplexVector, C64};
use crate::operator_rep::{interleave, InterleavePattern};

/// `translate(v, a)[t] = v[(t − a) mod L]`.
pub fn translate(v: &ComplexVector, a: i64) -> ComplexVector {
    let l = v.len() as i64;
    ComplexVector::from_fn(v.len(), |t, _| v[(t as i64 - a).rem_euclid(l) as usize])
}

/// `modulate(v, b)[t] = e^{2πi b t / L} v[t]`.
pub fn modulate(v: &ComplexVector, b: i64) -> ComplexVector {
    let l = v.len() as i64;
    ComplexVector::from_fn(v.len(), |t, _| v[t] * unit_phase((b * t as i64).rem_euclid(l), l))
}

/// `e^{2πi k / L}` with `k` reduced mod `L` first, so exact multiples stay exact.
fn unit_phase(k: i64, l: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k.rem_euclid(l) as f64 / l as f64)
}

/// Phase `e^{−2πi ab/L}` with `T_a E_b = phase · E_b T_a`.
pub fn commutation_phase(a: i64, b: i64, l: usize) -> C64 {
    unit_phase(-(a * b), l as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    Delta,
    /// Normalized indicator of one translation cell `[0, a)`.
    Indicator,
    /// Unit-norm periodized Gaussian `exp(−π (t − 1/3)² / L)`. The third-of-a-sample
    /// offset keeps its Zak transform away from zero on the critical lattices.
    Gauss,
    Custom(Vec<C64>),
}

impl Window {
    pub fn build(&self, l: usize, a: usize) -> Result<ComplexVector> {
        match self {
            Window::Delta => Ok(ComplexVector::from_fn(l, |t, _| C64::new(if t == 0 { 1.0 } else { 0.0 }, 0.0))),
            Window::Indicator => {
                let h = 1.0 / (a as f64).sqrt();
                Ok(ComplexVector::from_fn(l, |t, _| C64::new(if t < a { h } else { 0.0 }, 0.0)))
            }
            Window::Gauss => {
                let lf = l as f64;
                let g = ComplexVector::from_fn(l, |t, _| {
                    let s: f64 = (-4i64..=4)
                        .map(|p| {
                            let x = t as f64 - 1.0 / 3.0 + p as f64 * lf;
                            (-PI * x * x / lf).exp()
                        })
                        .sum();
                    C64::new(s, 0.0)
                });
                let n = g.norm();
                Ok(g / C64::new(n, 0.0))
            }
            Window::Custom(v) if v.len() == l => Ok(ComplexVector::from_vec(v.clone())),
            Window::Custom(v) => Err(Error::Parameter(format!("custom window has {} samples, L = {l}", v.len()))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WindowJson {
    Name(String),
    Complex(Vec<[f64; 2]>),
    Real(Vec<f64>),
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match WindowJson::deserialize(d)? {
            WindowJson::Name(n) => match n.as_str() {
                "delta" => Ok(Window::Delta),
                "indicator" => Ok(Window::Indicator),
                "gauss" => Ok(Window::Gauss),
                other => Err(serde::de::Error::custom(format!("unknown window {other:?}"))),
            },
            WindowJson::Complex(v) => Ok(Window::Custom(v.into_iter().map(|[re, im]| C64::new(re, im)).collect())),
            WindowJson::Real(v) => Ok(Window::Custom(v.into_iter().map(|re| C64::new(re, 0.0)).collect())),
        }
    }
}

impl Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Window::Delta => WindowJson::Name("delta".into()),
            Window::Indicator => WindowJson::Name("indicator".into()),
            Window::Gauss => WindowJson::Name("gauss".into()),
            Window::Custom(v) => WindowJson::Complex(v.iter().map(|z| [z.re, z.im]).collect()),
        }
        .serialize(s)
    }
}

/// Enumeration of the lattice `(m, n)`, `m < L/b` modulations and `n < L/a` translations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaborOrder {
    /// `n` outer, `m` inner.
    Raster,
    /// Centered indices mapped through the `ℤ → ℕ₀` zigzag `0, −1, 1, −2, …`, then walked
    /// along anti-diagonals.
    Zigzag,
    /// Positions in the raster order.
    Permutation(Vec<usize>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OrderJson {
    Name(String),
    Perm(Vec<usize>),
}

impl<'de> Deserialize<'de> for GaborOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match OrderJson::deserialize(d)? {
            OrderJson::Name(n) => match n.as_str() {
                "raster" => Ok(GaborOrder::Raster),
                "zigzag" => Ok(GaborOrder::Zigzag),
                other => Err(serde::de::Error::custom(format!("unknown enumeration {other:?}"))),
            },
            OrderJson::Perm(p) => Ok(GaborOrder::Permutation(p)),
        }
    }
}

impl Serialize for GaborOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GaborOrder::Raster => OrderJson::Name("raster".into()),
            GaborOrder::Zigzag => OrderJson::Name("zigzag".into()),
            GaborOrder::Permutation(p) => OrderJson::Perm(p.clone()),
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGaborSystem {
    l: usize,
    a: usize,
    b: usize,
    g: ComplexVector,
}

impl FiniteGaborSystem {
    pub fn new(l: usize, a: usize, b: usize, g: ComplexVector) -> Result<Self> {
        if l == 0 || a == 0 || b == 0 || l % a != 0 || l % b != 0 {
            return Err(Error::Parameter(format!("need a | L and b | L with positive values, got L={l}, a={a}, b={b}")));
        }
        if g.len() != l {
            return Err(Error::Parameter(format!("window has {} samples, L = {l}", g.len())));
        }
        if !crate::hilbert::is_finite_vector(&g) || g.norm() == 0.0 {
            return Err(Error::Parameter("window must be finite and nonzero".into()));
        }
        Ok(Self { l, a, b, g })
    }

    pub fn with_window(l: usize, a: usize, b: usize, window: &Window) -> Result<Self> {
        if a == 0 || l % a != 0 {
            return Err(Error::Parameter(format!("need a | L, got L={l}, a={a}")));
        }
        Self::new(l, a, b, window.build(l, a)?)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn window(&self) -> &ComplexVector {
        &self.g
    }

    pub fn translations(&self) -> usize {
        self.l / self.a
    }

    pub fn modulations(&self) -> usize {
        self.l / self.b
    }

    pub fn count(&self) -> usize {
        self.translations() * self.modulations()
    }

    /// `E_{mb} T_{na} g`.
    pub fn element(&self, m: usize, n: usize) -> ComplexVector {
        modulate(&translate(&self.g, (n * self.a) as i64), (m * self.b) as i64)
    }

    /// Lattice points `(m, n)` in the requested order.
    pub fn lattice(&self, order: &GaborOrder) -> Result<Vec<(usize, usize)>> {
        let (mc, nc) = (self.modulations(), self.translations());
        let raster: Vec<(usize, usize)> = (0..nc).flat_map(|n| (0..mc).map(move |m| (m, n))).collect();
        match order {
            GaborOrder::Raster => Ok(raster),
            GaborOrder::Zigzag => {
                let key = |i: usize, c: usize| zigzag(centered(i, c));
                let mut pts = raster;
                pts.sort_by_key(|&(m, n)| {
                    let (zm, zn) = (key(m, mc), key(n, nc));
                    (zm + zn, zn)
                });
                Ok(pts)
            }
            GaborOrder::Permutation(p) => {
                let mut seen = vec![false; raster.len()];
                if p.len() != raster.len() || p.iter().any(|&i| i >= raster.len() || std::mem::replace(&mut seen[i], true)) {
                    return Err(Error::Config(format!("order is not a permutation of 0..{}", raster.len())));
                }
                Ok(p.iter().map(|&i| raster[i]).collect())
            }
        }
    }
}

/// Representative of `i mod c` in `(−c/2, c/2]`.
fn centered(i: usize, c: usize) -> i64 {
    let i = i as i64;
    let c = c as i64;
    if 2 * i > c { i - c } else { i }
}

fn zigzag(x: i64) -> u64 {
    if x >= 0 { 2 * x as u64 } else { (-2 * x - 1) as u64 }
}

/// Ordered Gabor family labelled `g:m,n`, indexed by `ℕ₀`.
pub fn gabor_family(sys: &FiniteGaborSystem, order: &GaborOrder) -> Result<FrameFamily> {
    let pts = sys.lattice(order)?;
    let vectors = pts.iter().map(|&(m, n)| sys.element(m, n)).collect();
    let labels = pts.iter().map(|&(m, n)| format!("g:{m},{n}")).collect();
    FrameFamily::new(vectors, IndexConvention::Nat0)?.with_labels(labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Density {
    /// Reduced fraction `count / L`.
    pub redundancy: (usize, usize),
    pub frame_possible: bool,
    pub basis_candidate: bool,
}

impl Density {
    pub fn redundancy_f64(&self) -> f64 {
        self.redundancy.0 as f64 / self.redundancy.1 as f64
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn density_check(sys: &FiniteGaborSystem) -> Density {
    let (num, den) = (sys.count(), sys.l());
    let d = gcd(num, den);
    Density {
        redundancy: (num / d, den / d),
        frame_possible: num >= den,
        basis_candidate: num == den,
    }
}

/// Finite model of the Gabor frame `{E_{m/3} T_n χ_[0,1]}` as the union of three shifted
/// orthonormal bases, ordered so that odd positions run through the unshifted basis and
/// even positions through the other two.
///
/// `L = cells · cell_len`; a unit translation is one cell and modulation by 1/3 is
/// `cells / 3` bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThirdsExample {
    pub cells: usize,
    pub cell_len: usize,
}

impl ThirdsExample {
    pub fn new(cells: usize, cell_len: usize) -> Result<Self> {
        if cells == 0 || cell_len == 0 || cells % 3 != 0 {
            return Err(Error::Parameter(format!("cells must be a positive multiple of 3, got {cells}")));
        }
        Ok(Self { cells, cell_len })
    }

    pub fn l(&self) -> usize {
        self.cells * self.cell_len
    }

    pub fn system(&self) -> Result<FiniteGaborSystem> {
        FiniteGaborSystem::with_window(self.l(), self.cell_len, self.cells / 3, &Window::Indicator)
    }

    /// `E_{k/3 + m} T_n χ` in the finite model.
    fn element(&self, k: usize, m: usize, n: usize) -> ComplexVector {
        let sys = self.system().expect("validated in new");
        sys.element(k + 3 * m, n)
    }

    /// Basis `k ∈ {0, 1, 2}` with `n` outer and `m` inner.
    fn basis(&self, ks: &[usize], tag: &str) -> Result<FrameFamily> {
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for n in 0..self.cells {
            for m in 0..self.cell_len {
                for &k in ks {
                    vectors.push(self.element(k, m, n));
                    labels.push(format!("{tag}:k={k},m={m},n={n}"));
                }
            }
        }
        FrameFamily::new(vectors, IndexConvention::Nat0)?.with_labels(labels)
    }

    /// Full lattice of `3L` vectors in raster order.
    pub fn lattice_family(&self) -> Result<FrameFamily> {
        gabor_family(&self.system()?, &GaborOrder::Raster)
    }

    /// First `truncation` vectors of the interleaved ordering; `truncation` must be even and
    /// at most `2L`.
    pub fn family(&self, truncation: usize) -> Result<FrameFamily> {
        if truncation == 0 || truncation % 2 != 0 || truncation / 2 > self.l() {
            return Err(Error::Pattern(format!(
                "truncation must be even and at most {}, got {truncation}",
                2 * self.l()
            )));
        }
        let onb0 = self.basis(&[0], "onb0")?;
        let onb12 = self.basis(&[1, 2], "onb12")?;
        interleave(&onb12, &onb0, &InterleavePattern::Alternate, ("onb12", "onb0"), Some(truncation))
    }
}

impl crate::operator_rep::FamilyGenerator for ThirdsExample {
    fn family(&self, size: usize) -> Result<FrameFamily> {
        ThirdsExample::family(self, size)
    }
}

/// Gabor step rule for size ladders: a fixed step or the full period `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Fixed(usize),
    Full,
}

impl Step {
    fn at(self, l: usize) -> usize {
        match self {
            Step::Fixed(s) => s,
            Step::Full => l,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StepJson {
    Fixed(usize),
    Name(String),
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match StepJson::deserialize(d)? {
            StepJson::Fixed(s) => Ok(Step::Fixed(s)),
            StepJson::Name(n) if n == "L" => Ok(Step::Full),
            StepJson::Name(n) => Err(serde::de::Error::custom(format!("step must be an integer or \"L\", got {n:?}"))),
        }
    }
}

impl Serialize for Step {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Step::Fixed(v) => StepJson::Fixed(*v),
            Step::Full => StepJson::Name("L".into()),
        }
        .serialize(s)
    }
}

/// Gabor families over a ladder of `L` values.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborLadder {
    pub a: Step,
    pub b: Step,
    pub window: Window,
    pub order: GaborOrder,
}

impl crate::operator_rep::FamilyGenerator for GaborLadder {
    fn family(&self, l: usize) -> Result<FrameFamily> {
        let sys = FiniteGaborSystem::with_window(l, self.a.at(l), self.b.at(l), &self.window)?;
        gabor_family(&sys, &self.order)
    }
}
