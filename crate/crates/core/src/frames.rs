//! Finite frame families and the quantities measured on them.
//!
//! A [`FrameFamily`] is an *ordered* list of vectors in `C^J`. Frame bounds are
//! always reported for the span of the family (frame-sequence bounds); whether
//! the family is also a frame for the ambient `C^J` is a separate flag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    self, is_finite_vector, numeric_rank, orthonormal_null_basis, pinv, ComplexMatrix,
    ComplexVector, Tolerance, C64,
};

/// How list positions map to indices of the underlying infinite sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IndexJson", into = "IndexJson")]
pub enum IndexConvention {
    /// Positions are `0, 1, 2, …` of an `ℕ₀`-indexed sequence.
    Nat0,
    /// Positions cover `offset, offset + 1, …` of a `ℤ`-indexed sequence.
    IntWindow { offset: i64 },
}

#[derive(Serialize, Deserialize)]
struct IndexJson {
    kind: String,
    #[serde(default)]
    offset: i64,
}

impl TryFrom<IndexJson> for IndexConvention {
    type Error = String;

    fn try_from(raw: IndexJson) -> std::result::Result<Self, String> {
        match raw.kind.as_str() {
            "NAT0" if raw.offset == 0 => Ok(IndexConvention::Nat0),
            "NAT0" => Err(format!("NAT0 index requires offset 0, got {}", raw.offset)),
            "INT_WINDOW" => Ok(IndexConvention::IntWindow { offset: raw.offset }),
            other => Err(format!("unknown index kind {other:?}")),
        }
    }
}

impl From<IndexConvention> for IndexJson {
    fn from(idx: IndexConvention) -> Self {
        match idx {
            IndexConvention::Nat0 => IndexJson { kind: "NAT0".into(), offset: 0 },
            IndexConvention::IntWindow { offset } => IndexJson { kind: "INT_WINDOW".into(), offset },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameFamily {
    dim: usize,
    vectors: Vec<ComplexVector>,
    index: IndexConvention,
    labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    RieszBasisForSpan,
    OvercompleteFrameForSpan,
    NotFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rank: usize,
    pub excess: usize,
    pub kernel_dim: usize,
    pub classification: Classification,
    pub is_frame_for_ambient: bool,
}

impl FrameFamily {
    pub fn new(vectors: Vec<ComplexVector>, index: IndexConvention) -> Result<Self> {
        let dim = match vectors.first() {
            Some(v) => v.len(),
            None => return Err(Error::InvalidFamily("a family needs at least one vector".into())),
        };
        if dim == 0 {
            return Err(Error::InvalidFamily("vectors must have positive dimension".into()));
        }
        for (k, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidFamily(format!(
                    "vector {k} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if !is_finite_vector(v) {
                return Err(Error::InvalidFamily(format!("vector {k} has non-finite entries")));
            }
        }
        Ok(Self { dim, vectors, index, labels: None })
    }

    /// Family whose `k`-th vector is the `k`-th column of `m`.
    pub fn from_columns(m: &ComplexMatrix, index: IndexConvention) -> Result<Self> {
        Self::new(m.column_iter().map(|c| c.into_owned()).collect(), index)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vectors.len() {
            return Err(Error::InvalidFamily(format!(
                "{} labels for {} vectors",
                labels.len(),
                self.vectors.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_index(mut self, index: IndexConvention) -> Self {
        self.index = index;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &ComplexVector {
        &self.vectors[k]
    }

    pub fn index(&self) -> IndexConvention {
        self.index
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Sub-family at the given list positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        let len = self.len();
        if let Some(&bad) = positions.iter().find(|&&p| p >= len) {
            return Err(Error::Range { index: bad, len });
        }
        let vectors = positions.iter().map(|&p| self.vectors[p].clone()).collect();
        let mut out = Self::new(vectors, self.index)?;
        if let Some(labels) = &self.labels {
            out.labels = Some(positions.iter().map(|&p| labels[p].clone()).collect());
        }
        Ok(out)
    }

    /// The first `n` vectors.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::Range { index: n, len: self.len() });
        }
        self.select(&(0..n).collect::<Vec<_>>())
    }

    /// Reorders the family so that position `k` holds the old vector `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len() {
            return Err(Error::Pattern(format!(
                "permutation has {} entries for {} vectors",
                perm.len(),
                self.len()
            )));
        }
        for &p in perm {
            if p >= self.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Pattern(format!("{perm:?} is not a permutation")));
            }
        }
        self.select(perm)
    }

    /// Applies the linear map `q` to every vector.
    pub fn mapped(&self, q: &ComplexMatrix) -> Result<Self> {
        if q.ncols() != self.dim {
            return Err(Error::Parameter(format!(
                "map has {} columns, family dimension is {}",
                q.ncols(),
                self.dim
            )));
        }
        let mut out = Self::new(self.vectors.iter().map(|v| q * v).collect(), self.index)?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    /// `J × K` matrix whose `k`-th column is the `k`-th vector.
    pub fn synthesis_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.vectors)
    }

    /// Frame operator `S = U U*`.
    pub fn frame_operator(&self) -> ComplexMatrix {
        let u = self.synthesis_matrix();
        &u * u.adjoint()
    }

    /// Optimal frame-sequence bounds for the span: `B = σ_max²`, `A = σ_r²` with `σ_r`
    /// the smallest singular value above the rank cutoff. An all-zero family gives `(0, 0)`.
    pub fn frame_bounds(&self, tol: &Tolerance) -> Result<FrameBounds> {
        let sigma = hilbert::singular_values(&self.synthesis_matrix())?;
        Ok(bounds_from_sigma(&sigma, tol))
    }

    pub fn excess(&self, tol: &Tolerance) -> Result<usize> {
        let sigma = hilbert::singular_values(&self.synthesis_matrix())?;
        Ok(self.len() - numeric_rank(&sigma, tol))
    }

    pub fn classify(&self, tol: &Tolerance) -> Result<FrameReport> {
        let sigma = hilbert::singular_values(&self.synthesis_matrix())?;
        let rank = numeric_rank(&sigma, tol);
        let bounds = bounds_from_sigma(&sigma, tol);
        let excess = self.len() - rank;
        let classification = if bounds.lower <= 0.0 {
            Classification::NotFrame
        } else if excess == 0 {
            Classification::RieszBasisForSpan
        } else {
            Classification::OvercompleteFrameForSpan
        };
        Ok(FrameReport {
            lower_bound: bounds.lower,
            upper_bound: bounds.upper,
            rank,
            excess,
            kernel_dim: excess,
            classification,
            is_frame_for_ambient: rank == self.dim && bounds.lower > 0.0,
        })
    }

    /// Orthonormal basis (columns, `K × excess`) of the numeric kernel of the synthesis operator.
    pub fn kernel_basis(&self, tol: &Tolerance) -> Result<ComplexMatrix> {
        orthonormal_null_basis(&self.synthesis_matrix(), tol)
    }

    /// Canonical dual `{S† f_k}`, computed as the columns of `(U†)*` so the same rank cutoff
    /// applies as for the family itself.
    pub fn canonical_dual(&self, tol: &Tolerance) -> Result<Self> {
        let u = self.synthesis_matrix();
        let sigma = hilbert::singular_values(&u)?;
        if bounds_from_sigma(&sigma, tol).lower <= 0.0 {
            return Err(Error::NotFrameSequence);
        }
        let dual = pinv(&u, tol)?.adjoint();
        let mut out = Self::from_columns(&dual, self.index)?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&FamilyJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FamilyJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

fn bounds_from_sigma(sigma: &[f64], tol: &Tolerance) -> FrameBounds {
    let rank = numeric_rank(sigma, tol);
    if rank == 0 {
        return FrameBounds { lower: 0.0, upper: 0.0 };
    }
    FrameBounds { lower: sigma[rank - 1].powi(2), upper: sigma[0].powi(2) }
}

/// Wire format: `{"dim": J, "index": {...}, "vectors": [[[re, im], ...], ...], "labels": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dim: usize,
    pub index: IndexConvention,
    pub vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&FrameFamily> for FamilyJson {
    fn from(fam: &FrameFamily) -> Self {
        FamilyJson {
            dim: fam.dim,
            index: fam.index,
            vectors: fam.vectors.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect(),
            labels: fam.labels.clone(),
        }
    }
}

impl TryFrom<FamilyJson> for FrameFamily {
    type Error = Error;

    fn try_from(raw: FamilyJson) -> Result<Self> {
        let vectors: Vec<ComplexVector> = raw
            .vectors
            .iter()
            .map(|v| ComplexVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1]))))
            .collect();
        let fam = FrameFamily::new(vectors, raw.index)?;
        if fam.dim != raw.dim {
            return Err(Error::InvalidFamily(format!(
                "declared dim {} does not match vector length {}",
                raw.dim, fam.dim
            )));
        }
        match raw.labels {
            Some(labels) => fam.with_labels(labels),
            None => Ok(fam),
        }
    }
}

impl Serialize for FrameFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrameFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FamilyJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

/// Standard basis `e_0, …, e_{n−1}` of `C^n`.
pub fn standard_basis(n: usize) -> Result<FrameFamily> {
    FrameFamily::from_columns(&ComplexMatrix::identity(n, n), IndexConvention::Nat0)
}

/// Unitary Fourier basis of `C^n`: `ε_j[t] = e^{2πi j t / n} / √n`.
pub fn fourier_basis(n: usize) -> Result<FrameFamily> {
    let scale = 1.0 / (n as f64).sqrt();
    let m = ComplexMatrix::from_fn(n, n, |t, j| {
        let phase = 2.0 * std::f64::consts::PI * ((j * t) % n) as f64 / n as f64;
        C64::from_polar(scale, phase)
    });
    FrameFamily::from_columns(&m, IndexConvention::Nat0)
}

impl FrameFamily {
    /// Orthonormal basis of the kernel vectors supported on `positions` (zero elsewhere).
    pub fn kernel_basis_supported_on(&self, positions: &[usize], tol: &Tolerance) -> Result<ComplexMatrix> {
        let sub = self.select(positions)?;
        let local = orthonormal_null_basis(&sub.synthesis_matrix(), tol)?;
        let mut out = ComplexMatrix::zeros(self.len(), local.ncols());
        for (row, &p) in positions.iter().enumerate() {
            out.set_row(p, &local.row(row));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{random_matrix, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_onb_union(n: usize, seed: u64) -> FrameFamily {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_unitary(n, &mut rng);
        let mut cols: Vec<ComplexVector> = standard_basis(n).unwrap().vectors().to_vec();
        cols.extend(q.column_iter().map(|c| c.into_owned()));
        FrameFamily::new(cols, IndexConvention::Nat0).unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn synthesis_matrix_columns() {
        let fam = standard_basis(3).unwrap();
        assert_eq!(fam.synthesis_matrix(), ComplexMatrix::identity(3, 3));

        let e1 = ComplexVector::from_vec(vec![c(1.0), c(0.0)]);
        let fam = FrameFamily::new(vec![e1.clone(), e1.clone()], IndexConvention::Nat0).unwrap();
        let u = fam.synthesis_matrix();
        assert_eq!(u.column(0), e1.column(0));
        assert_eq!(u.column(1), e1.column(0));

        let sigma = hilbert::singular_values(&two_onb_union(4, 1).synthesis_matrix()).unwrap();
        assert!(sigma.iter().all(|s| (s - 2f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn bounds_and_classification_of_bases() {
        let tol = Tolerance::default();
        let onb = standard_basis(5).unwrap();
        let b = onb.frame_bounds(&tol).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);

        let rep = standard_basis(4).unwrap().classify(&tol).unwrap();
        assert_eq!(rep.classification, Classification::RieszBasisForSpan);
        assert_eq!(rep.excess, 0);
        assert!(rep.is_frame_for_ambient);

        let dropped = standard_basis(4).unwrap().prefix(3).unwrap();
        let rep = dropped.classify(&tol).unwrap();
        assert_eq!(rep.classification, Classification::RieszBasisForSpan);
        assert!(!rep.is_frame_for_ambient);
    }

    #[test]
    fn two_onb_union_is_tight_with_excess_n() {
        let tol = Tolerance::default();
        let fam = two_onb_union(4, 7);
        let b = fam.frame_bounds(&tol).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-10 && (b.upper - 2.0).abs() < 1e-10);
        let rep = fam.classify(&tol).unwrap();
        assert_eq!(rep.classification, Classification::OvercompleteFrameForSpan);
        assert_eq!(rep.excess, 4);
        assert_eq!(rep.kernel_dim, 4);
        let s = fam.frame_operator();
        assert!((s - ComplexMatrix::identity(4, 4) * c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn all_zero_family_is_not_a_frame() {
        let tol = Tolerance::default();
        let fam = FrameFamily::new(vec![ComplexVector::zeros(3); 2], IndexConvention::Nat0).unwrap();
        let rep = fam.classify(&tol).unwrap();
        assert_eq!(rep.classification, Classification::NotFrame);
        assert_eq!((rep.lower_bound, rep.upper_bound), (0.0, 0.0));
        assert!(matches!(fam.canonical_dual(&tol), Err(Error::NotFrameSequence)));
    }

    #[test]
    fn frame_operator_of_single_vector_is_projector() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexVector::from_vec(vec![c(h), c(h)]);
        let fam = FrameFamily::new(vec![v], IndexConvention::Nat0).unwrap();
        let s = fam.frame_operator();
        for z in s.iter() {
            assert!((z - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_duals() {
        let tol = Tolerance::default();
        let onb = standard_basis(3).unwrap();
        assert_eq!(onb.canonical_dual(&tol).unwrap().synthesis_matrix(), onb.synthesis_matrix());

        let fam = two_onb_union(3, 2);
        let dual = fam.canonical_dual(&tol).unwrap();
        let halved = fam.synthesis_matrix() * c(0.5);
        assert!((dual.synthesis_matrix() - halved).norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let fam = FrameFamily::from_columns(&random_matrix(3, 5, &mut rng), IndexConvention::Nat0).unwrap();
        let dual = fam.canonical_dual(&tol).unwrap();
        let u = fam.synthesis_matrix();
        let ud = dual.synthesis_matrix();
        for _ in 0..20 {
            let f = random_matrix(3, 1, &mut rng);
            let rec = &u * (ud.adjoint() * &f);
            assert!((rec - &f).norm() <= 1e-9 * f.norm());
        }
    }

    #[test]
    fn kernel_of_duplicated_vector() {
        let tol = Tolerance::default();
        let v = ComplexVector::from_vec(vec![c(0.3), c(-0.4)]);
        let fam = FrameFamily::new(vec![v.clone(), v], IndexConvention::Nat0).unwrap();
        let kb = fam.kernel_basis(&tol).unwrap();
        assert_eq!(kb.ncols(), 1);
        assert!((kb[(0, 0)] + kb[(1, 0)]).norm() < 1e-12);
        assert_eq!(fam.excess(&tol).unwrap(), 1);
        assert_eq!(standard_basis(4).unwrap().kernel_basis(&tol).unwrap().ncols(), 0);
    }

    #[test]
    fn rejects_malformed_families() {
        assert!(FrameFamily::new(vec![], IndexConvention::Nat0).is_err());
        let a = ComplexVector::zeros(2);
        let b = ComplexVector::zeros(3);
        assert!(FrameFamily::new(vec![a.clone(), b], IndexConvention::Nat0).is_err());
        let nan = ComplexVector::from_vec(vec![C64::new(f64::NAN, 0.0)]);
        assert!(FrameFamily::new(vec![nan], IndexConvention::Nat0).is_err());
        let fam = FrameFamily::new(vec![a], IndexConvention::Nat0).unwrap();
        assert!(fam.clone().with_labels(vec![]).is_err());
        assert!(matches!(fam.select(&[1]), Err(Error::Range { index: 1, len: 1 })));
        assert!(fam.permuted(&[0, 0]).is_err());
    }

    #[test]
    fn json_round_trip_and_field_names() {
        let fam = two_onb_union(2, 4)
            .with_index(IndexConvention::IntWindow { offset: -2 })
            .with_labels(vec!["e:0".into(), "e:1".into(), "eps:0".into(), "eps:1".into()])
            .unwrap();
        let json = fam.to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["dim"], 2);
        assert_eq!(value["index"]["kind"], "INT_WINDOW");
        assert_eq!(value["index"]["offset"], -2);
        assert_eq!(value["vectors"].as_array().unwrap().len(), 4);
        assert_eq!(value["labels"][2], "eps:0");
        assert_eq!(FrameFamily::from_json(&json).unwrap(), fam);
    }

    #[test]
    fn json_rejects_inconsistent_input() {
        let bad_dim = r#"{"dim": 3, "index": {"kind": "NAT0", "offset": 0}, "vectors": [[[1,0],[0,0]]]}"#;
        assert!(FrameFamily::from_json(bad_dim).is_err());
        let bad_nat = r#"{"dim": 1, "index": {"kind": "NAT0", "offset": 4}, "vectors": [[[1,0]]]}"#;
        assert!(FrameFamily::from_json(bad_nat).is_err());
        let bad_kind = r#"{"dim": 1, "index": {"kind": "Z"}, "vectors": [[[1,0]]]}"#;
        assert!(FrameFamily::from_json(bad_kind).is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::hilbert::random_matrix;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn excess_matches_kernel_and_is_permutation_invariant(
            seed in any::<u64>(), j in 1usize..7, k in 1usize..10, r in 1usize..7,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = r.min(j).min(k);
            let m = random_matrix(j, r, &mut rng) * random_matrix(r, k, &mut rng);
            let fam = FrameFamily::from_columns(&m, IndexConvention::Nat0).unwrap();
            let tol = Tolerance::default();
            let rep = fam.classify(&tol).unwrap();
            prop_assert_eq!(rep.excess, fam.kernel_basis(&tol).unwrap().ncols());
            prop_assert_eq!(rep.excess, k - r);

            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            let shuffled = fam.permuted(&perm).unwrap().classify(&tol).unwrap();
            prop_assert_eq!(shuffled.excess, rep.excess);
            prop_assert_eq!(shuffled.classification, rep.classification);
            prop_assert!((shuffled.upper_bound - rep.upper_bound).abs() <= 1e-10 * rep.upper_bound);
            prop_assert!((shuffled.lower_bound - rep.lower_bound).abs() <= 1e-9 * rep.upper_bound);
        }

        #[test]
        fn frame_operator_is_gram_of_synthesis(seed in any::<u64>(), j in 1usize..6, k in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = FrameFamily::from_columns(&random_matrix(j, k, &mut rng), IndexConvention::Nat0).unwrap();
            let u = fam.synthesis_matrix();
            let s = fam.frame_operator();
            let direct = &u * u.adjoint();
            prop_assert!((&s - &direct).norm() <= 1e-13 * direct.norm());
            prop_assert!((s.adjoint() - &s).norm() <= 1e-13 * direct.norm());
        }

        #[test]
        fn dual_reconstructs_span(seed in any::<u64>(), j in 1usize..6, k in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = FrameFamily::from_columns(&random_matrix(j, k, &mut rng), IndexConvention::Nat0).unwrap();
            let tol = Tolerance::default();
            let dual = fam.canonical_dual(&tol).unwrap().synthesis_matrix();
            let u = fam.synthesis_matrix();
            // f in the span: f = U c.
            let f = &u * random_matrix(k, 1, &mut rng);
            let rec = &u * (dual.adjoint() * &f);
            prop_assert!((rec - &f).norm() <= tol.residual_abs * f.norm().max(1.0));
        }
    }
}
