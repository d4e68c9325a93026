//! Cuts, monomials in the boundary generators, and their classification.
//!
//! A cut `{I, J}` of `{1..n}` indexes the boundary generator `δ_{I,J}`. A
//! monomial is a product of such generators, stored as distinct cuts with
//! positive exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::labels::{Label, LabelSet};

/// Exact value of the integral map.
pub type IntegerValue = BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("ambient label count must be at least 3, got {0}")]
    AmbientTooSmall(u32),
    #[error("part {0} has fewer than 2 labels")]
    PartTooSmall(LabelSet),
    #[error("parts {0} and {1} do not partition {{1..{2}}}")]
    NotAPartition(LabelSet, LabelSet, u32),
    #[error("ambient mismatch: expected n={expected}, found n={found}")]
    AmbientMismatch { expected: u32, found: u32 },
    #[error("exponent must be positive")]
    ZeroExponent,
}

/// Unordered bipartition `{I, J}` of `{1..n}` with `|I|, |J| >= 2`.
///
/// The part containing label 1 is always stored as `first`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut {
    first: LabelSet,
    second: LabelSet,
    ambient_n: u32,
}

impl Cut {
    /// Normalizes two parts into a cut.
    pub fn new(a: LabelSet, b: LabelSet, n: u32) -> Result<Cut, ModelError> {
        if n < 3 {
            return Err(ModelError::AmbientTooSmall(n));
        }
        if a.intersects(&b) || a.len() + b.len() != n as usize || !a.within(n) || !b.within(n) {
            return Err(ModelError::NotAPartition(a, b, n));
        }
        for part in [&a, &b] {
            if part.len() < 2 {
                return Err(ModelError::PartTooSmall(part.clone()));
            }
        }
        let (first, second) = if a.contains(1) { (a, b) } else { (b, a) };
        Ok(Cut { first, second, ambient_n: n })
    }

    /// Builds the cut `{part, N \ part}`.
    pub fn from_part(part: LabelSet, n: u32) -> Result<Cut, ModelError> {
        if !part.within(n) {
            return Err(ModelError::NotAPartition(part.clone(), part.complement(n), n));
        }
        let rest = part.complement(n);
        Cut::new(part, rest, n)
    }

    /// Part containing label 1.
    pub fn first(&self) -> &LabelSet {
        &self.first
    }

    pub fn second(&self) -> &LabelSet {
        &self.second
    }

    pub fn parts(&self) -> [&LabelSet; 2] {
        [&self.first, &self.second]
    }

    pub fn ambient_n(&self) -> u32 {
        self.ambient_n
    }

    /// The part containing `label`.
    pub fn side_of(&self, label: Label) -> &LabelSet {
        if self.first.contains(label) {
            &self.first
        } else {
            &self.second
        }
    }

    /// Keel's quadratic relation: all four pairwise intersections of parts
    /// are nonempty.
    pub fn crosses(&self, other: &Cut) -> Result<bool, ModelError> {
        if self.ambient_n != other.ambient_n {
            return Err(ModelError::AmbientMismatch { expected: self.ambient_n, found: other.ambient_n });
        }
        Ok(self
            .parts()
            .iter()
            .all(|p| other.parts().iter().all(|q| p.intersects(q))))
    }
}

impl fmt::Debug for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ{}|{}", self.first, self.second)
    }
}

/// Canonicalizes an unordered pair of parts. See [`Cut::new`].
pub fn canonicalize_cut(a: LabelSet, b: LabelSet, n: u32) -> Result<Cut, ModelError> {
    Cut::new(a, b, n)
}

/// Symmetric crossing test. See [`Cut::crosses`].
pub fn crosses(a: &Cut, b: &Cut) -> Result<bool, ModelError> {
    a.crosses(b)
}

/// Product of boundary generators over a fixed ambient `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    ambient_n: u32,
    factors: BTreeMap<Cut, u32>,
}

impl Monomial {
    /// The empty monomial (degree 0).
    pub fn empty(n: u32) -> Result<Monomial, ModelError> {
        if n < 3 {
            return Err(ModelError::AmbientTooSmall(n));
        }
        Ok(Monomial { ambient_n: n, factors: BTreeMap::new() })
    }

    /// Builds a monomial, accumulating exponents of repeated cuts.
    pub fn from_factors<I>(n: u32, factors: I) -> Result<Monomial, ModelError>
    where
        I: IntoIterator<Item = (Cut, u32)>,
    {
        let mut m = Monomial::empty(n)?;
        for (cut, exp) in factors {
            m.multiply(cut, exp)?;
        }
        Ok(m)
    }

    /// Multiplies in `cut^exponent`.
    pub fn multiply(&mut self, cut: Cut, exponent: u32) -> Result<(), ModelError> {
        if cut.ambient_n != self.ambient_n {
            return Err(ModelError::AmbientMismatch { expected: self.ambient_n, found: cut.ambient_n });
        }
        if exponent == 0 {
            return Err(ModelError::ZeroExponent);
        }
        *self.factors.entry(cut).or_insert(0) += exponent;
        Ok(())
    }

    pub fn ambient_n(&self) -> u32 {
        self.ambient_n
    }

    /// Distinct cuts with their exponents, in canonical cut order.
    pub fn factors(&self) -> impl ExactSizeIterator<Item = (&Cut, u32)> + '_ {
        self.factors.iter().map(|(c, &e)| (c, e))
    }

    pub fn exponent(&self, cut: &Cut) -> u32 {
        self.factors.get(cut).copied().unwrap_or(0)
    }

    pub fn distinct_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn degree(&self) -> u64 {
        self.factors.values().map(|&e| u64::from(e)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Dimension of the ambient moduli space, `n - 3`.
    pub fn top_degree(&self) -> u64 {
        u64::from(self.ambient_n) - 3
    }

    /// First crossing pair of factors, if any.
    pub fn crossing_pair(&self) -> Option<(&Cut, &Cut)> {
        let cuts: Vec<&Cut> = self.factors.keys().collect();
        for (i, a) in cuts.iter().enumerate() {
            for b in &cuts[i + 1..] {
                if a.crosses(b).unwrap_or(false) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::render_monomial(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Classification {
    /// Two factors satisfy Keel's quadratic relation; the value is 0.
    ZeroByKeel,
    /// Distinct, pairwise non-crossing factors of top degree; the value is 1.
    Clever,
    /// Non-crossing factors of top degree with some repeated factor.
    TreeMonomial,
    /// Degree differs from `n - 3`; the value is 0.
    DegreeMismatch,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::ZeroByKeel => "ZeroByKeel",
            Classification::Clever => "Clever",
            Classification::TreeMonomial => "TreeMonomial",
            Classification::DegreeMismatch => "DegreeMismatch",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a monomial with a single pass over factor pairs.
pub fn classify(m: &Monomial) -> Classification {
    if m.degree() != m.top_degree() {
        return Classification::DegreeMismatch;
    }
    if m.crossing_pair().is_some() {
        return Classification::ZeroByKeel;
    }
    if m.factors().all(|(_, e)| e == 1) {
        Classification::Clever
    } else {
        Classification::TreeMonomial
    }
}
