use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{fourier_basis, standard_basis, FrameFamily, IndexConvention};
use crate::hilbert::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    First,
    Second,
}

/// Order in which two families are merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterleavePattern {
    /// first, second, first, second, ...
    Alternate,
    /// `n` from the first source, then `n` from the second, repeated.
    Blocks(usize),
    /// Explicit source for every position.
    Sequence(Vec<Source>),
    /// Permutation of the concatenation `first ++ second`.
    Permutation(Vec<usize>),
}

/// Label prefix before the first `':'`.
pub fn label_tag(label: &str) -> &str {
    label.split_once(':').map_or(label, |(tag, _)| tag)
}

fn labels_or_default(fam: &FrameFamily, tag: &str) -> Vec<String> {
    match fam.labels() {
        Some(l) => l.to_vec(),
        None => (0..fam.len()).map(|i| format!("{tag}:{i}")).collect(),
    }
}

fn source_order(pattern: &InterleavePattern, n1: usize, n2: usize, limit: usize) -> Result<Vec<(Source, usize)>> {
    if let InterleavePattern::Permutation(p) = pattern {
        let total = n1 + n2;
        let mut seen = vec![false; total];
        for &i in p {
            if i >= total || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Pattern(format!("{p:?} is not a permutation of 0..{total}")));
            }
        }
        if p.len() != total {
            return Err(Error::Pattern(format!("{p:?} is not a permutation of 0..{total}")));
        }
        return Ok(p
            .iter()
            .take(limit)
            .map(|&i| if i < n1 { (Source::First, i) } else { (Source::Second, i - n1) })
            .collect());
    }

    let want = limit.min(n1 + n2);
    let mut counts = [0usize, 0];
    let mut out = Vec::with_capacity(want);
    let mut pos = 0usize;
    while out.len() < want {
        let src = match pattern {
            InterleavePattern::Alternate => if pos % 2 == 0 { Source::First } else { Source::Second },
            InterleavePattern::Blocks(0) => return Err(Error::Pattern("block length must be positive".into())),
            InterleavePattern::Blocks(b) => if (pos / b) % 2 == 0 { Source::First } else { Source::Second },
            InterleavePattern::Sequence(s) => match s.get(pos) {
                Some(&src) => src,
                None => return Err(Error::Pattern(format!("sequence of {} sources ends before position {pos}", s.len()))),
            },
            InterleavePattern::Permutation(_) => unreachable!(),
        };
        let (slot, avail) = match src {
            Source::First => (0, n1),
            Source::Second => (1, n2),
        };
        if counts[slot] == avail {
            return Err(Error::Pattern(format!(
                "pattern exhausts the {} source at position {pos}",
                if slot == 0 { "first" } else { "second" }
            )));
        }
        out.push((src, counts[slot]));
        counts[slot] += 1;
        pos += 1;
    }
    Ok(out)
}

/// Merges two families of the same dimension following `pattern`, keeping the first `limit`
/// elements (all when `None`). Unlabelled sources are labelled `"{tag}:{i}"`.
pub fn interleave(
    first: &FrameFamily,
    second: &FrameFamily,
    pattern: &InterleavePattern,
    tags: (&str, &str),
    limit: Option<usize>,
) -> Result<FrameFamily> {
    if first.dim() != second.dim() {
        return Err(Error::InvalidFamily(format!(
            "cannot interleave families in dimensions {} and {}",
            first.dim(),
            second.dim()
        )));
    }
    let order = source_order(pattern, first.len(), second.len(), limit.unwrap_or(usize::MAX))?;
    if order.is_empty() {
        return Err(Error::Pattern("pattern selects no vectors".into()));
    }
    let l1 = labels_or_default(first, tags.0);
    let l2 = labels_or_default(second, tags.1);
    let (vectors, labels): (Vec<_>, Vec<_>) = order
        .into_iter()
        .map(|(src, i)| match src {
            Source::First => (first.vector(i).clone(), l1[i].clone()),
            Source::Second => (second.vector(i).clone(), l2[i].clone()),
        })
        .unzip();
    FrameFamily::new(vectors, IndexConvention::Nat0)?.with_labels(labels)
}

fn check_onb(fam: &FrameFamily, name: &str) -> Result<()> {
    let u = fam.synthesis_matrix();
    let gram = u.adjoint() * &u;
    let dev = (gram - ComplexMatrix::identity(fam.len(), fam.len())).camax();
    if fam.len() != fam.dim() || dev > 1e-10 {
        return Err(Error::InvalidFamily(format!("{name} is not an orthonormal basis")));
    }
    Ok(())
}

/// Union of two orthonormal bases of the same space in the order given by `pattern`,
/// labelled `e:i` and `eps:i` unless the inputs carry labels.
pub fn interleave_onbs(e: &FrameFamily, eps: &FrameFamily, pattern: &InterleavePattern) -> Result<FrameFamily> {
    check_onb(e, "e")?;
    check_onb(eps, "eps")?;
    interleave(e, eps, pattern, ("e", "eps"), None)
}

/// Successor-pair classes of an ordered union of two bases. `I1`: e → ε, `I2`: e → e,
/// `I3`: ε → e, `I4`: ε → ε, where e is the basis of the first vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleavingClassification {
    #[serde(rename = "I1")]
    pub i1: BTreeSet<usize>,
    #[serde(rename = "I2")]
    pub i2: BTreeSet<usize>,
    #[serde(rename = "I3")]
    pub i3: BTreeSet<usize>,
    #[serde(rename = "I4")]
    pub i4: BTreeSet<usize>,
    pub e_tag: String,
    pub eps_tag: String,
    pub predicted_unbounded: bool,
}

pub fn interleaving_classify(fam: &FrameFamily) -> Result<InterleavingClassification> {
    let labels = fam.labels().ok_or_else(|| Error::Label("family carries no labels".into()))?;
    let tags: Vec<&str> = labels.iter().map(|l| label_tag(l)).collect();
    let distinct: BTreeSet<&str> = tags.iter().copied().collect();
    if distinct.len() != 2 {
        return Err(Error::Label(format!(
            "expected exactly two basis tags, found {}: {:?}",
            distinct.len(),
            distinct
        )));
    }
    let e_tag = tags[0];
    let eps_tag = *distinct.iter().find(|t| **t != e_tag).expect("two tags");
    let mut c = InterleavingClassification {
        i1: BTreeSet::new(),
        i2: BTreeSet::new(),
        i3: BTreeSet::new(),
        i4: BTreeSet::new(),
        e_tag: e_tag.to_string(),
        eps_tag: eps_tag.to_string(),
        predicted_unbounded: false,
    };
    for (k, pair) in tags.windows(2).enumerate() {
        let set = match (pair[0] == e_tag, pair[1] == e_tag) {
            (true, false) => &mut c.i1,
            (true, true) => &mut c.i2,
            (false, true) => &mut c.i3,
            (false, false) => &mut c.i4,
        };
        set.insert(k);
    }
    c.predicted_unbounded = c.i2.is_empty() || c.i4.is_empty();
    Ok(c)
}

/// Nested truncations of the alternating ordering e₀, ε₀, e₁, ε₁, ... of the standard and
/// Fourier bases of a fixed `ℂ^ambient`.
#[derive(Debug, Clone)]
pub struct AlternatingOnbGenerator {
    e: FrameFamily,
    eps: FrameFamily,
}

impl AlternatingOnbGenerator {
    pub const DEFAULT_AMBIENT: usize = 512;

    pub fn new(ambient: usize) -> Result<Self> {
        Ok(Self { e: standard_basis(ambient)?, eps: fourier_basis(ambient)? })
    }

    pub fn ambient(&self) -> usize {
        self.e.dim()
    }

    pub fn family(&self, size: usize) -> Result<FrameFamily> {
        if size > 2 * self.ambient() {
            return Err(Error::Parameter(format!(
                "truncation {size} exceeds the {} vectors of the two bases",
                2 * self.ambient()
            )));
        }
        interleave(&self.e, &self.eps, &InterleavePattern::Alternate, ("e", "eps"), Some(size))
    }
}

impl super::FamilyGenerator for AlternatingOnbGenerator {
    fn family(&self, size: usize) -> Result<FrameFamily> {
        AlternatingOnbGenerator::family(self, size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags_of(fam: &FrameFamily) -> Vec<&str> {
        fam.labels().unwrap().iter().map(|l| label_tag(l)).collect()
    }

    #[test]
    fn alternate_on_c2() {
        let e = standard_basis(2).unwrap();
        let eps = fourier_basis(2).unwrap();
        let fam = interleave_onbs(&e, &eps, &InterleavePattern::Alternate).unwrap();
        assert_eq!(fam.labels().unwrap(), ["e:0", "eps:0", "e:1", "eps:1"]);
        assert_eq!(fam.vector(1), eps.vector(0));
        assert_eq!(fam.vector(2), e.vector(1));
    }

    #[test]
    fn block_pattern() {
        let e = standard_basis(4).unwrap();
        let eps = fourier_basis(4).unwrap();
        let fam = interleave_onbs(&e, &eps, &InterleavePattern::Blocks(2)).unwrap();
        assert_eq!(tags_of(&fam), ["e", "e", "eps", "eps", "e", "e", "eps", "eps"]);
        let c = interleaving_classify(&fam).unwrap();
        assert!(!c.i1.is_empty() && !c.i2.is_empty() && !c.i3.is_empty() && !c.i4.is_empty());
        assert!(!c.predicted_unbounded);
    }

    #[test]
    fn strict_alternation_predicts_unbounded() {
        let fam = AlternatingOnbGenerator::new(8).unwrap().family(16).unwrap();
        let c = interleaving_classify(&fam).unwrap();
        assert!(c.i2.is_empty() && c.i4.is_empty());
        assert!(c.predicted_unbounded);
        assert_eq!(c.i1.len() + c.i3.len(), 15);
    }

    #[test]
    fn basis_one_then_basis_two() {
        let e = standard_basis(3).unwrap();
        let eps = fourier_basis(3).unwrap();
        let fam = interleave_onbs(&e, &eps, &InterleavePattern::Blocks(3)).unwrap();
        let c = interleaving_classify(&fam).unwrap();
        assert_eq!(c.i2, BTreeSet::from([0, 1]));
        assert_eq!(c.i1, BTreeSet::from([2]));
        assert_eq!(c.i4, BTreeSet::from([3, 4]));
        assert!(c.i3.is_empty());
        assert!(!c.predicted_unbounded);
    }

    #[test]
    fn classification_covers_successor_indices() {
        let e = standard_basis(5).unwrap();
        let eps = fourier_basis(5).unwrap();
        let seq = [0, 0, 1, 0, 1, 1, 1, 0, 0, 1].map(|b| if b == 0 { Source::First } else { Source::Second });
        let fam = interleave_onbs(&e, &eps, &InterleavePattern::Sequence(seq.to_vec())).unwrap();
        let c = interleaving_classify(&fam).unwrap();
        let mut all: Vec<usize> = c.i1.iter().chain(&c.i2).chain(&c.i3).chain(&c.i4).copied().collect();
        all.sort();
        assert_eq!(all, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn exhausted_source_is_a_pattern_error() {
        let e = standard_basis(3).unwrap();
        let eps = fourier_basis(3).unwrap();
        let seq = vec![Source::First; 4];
        assert!(matches!(
            interleave_onbs(&e, &eps, &InterleavePattern::Sequence(seq)),
            Err(Error::Pattern(_))
        ));
        assert!(matches!(
            interleave(&e, &eps.prefix(1).unwrap(), &InterleavePattern::Alternate, ("e", "eps"), None),
            Err(Error::Pattern(_))
        ));
    }

    #[test]
    fn permutation_pattern() {
        let e = standard_basis(2).unwrap();
        let eps = fourier_basis(2).unwrap();
        let fam = interleave_onbs(&e, &eps, &InterleavePattern::Permutation(vec![3, 0, 2, 1])).unwrap();
        assert_eq!(fam.labels().unwrap(), ["eps:1", "e:0", "eps:0", "e:1"]);
        assert!(interleave_onbs(&e, &eps, &InterleavePattern::Permutation(vec![0, 0, 1, 2])).is_err());
    }

    #[test]
    fn non_basis_is_rejected() {
        let e = standard_basis(3).unwrap();
        let short = standard_basis(3).unwrap().prefix(2).unwrap();
        assert!(interleave_onbs(&e, &short, &InterleavePattern::Alternate).is_err());
    }

    #[test]
    fn label_errors() {
        let e = standard_basis(2).unwrap();
        assert!(matches!(interleaving_classify(&e), Err(Error::Label(_))));
        let two = e.with_labels(vec!["a:0".into(), "b:0".into()]).unwrap();
        assert!(interleaving_classify(&two).is_ok());
        let one = standard_basis(2).unwrap().with_labels(vec!["a:0".into(), "a:1".into()]).unwrap();
        assert!(matches!(interleaving_classify(&one), Err(Error::Label(_))));
    }
}
