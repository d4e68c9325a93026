//! Sorted sets of point labels.

use std::fmt;

/// A point label. Labels of an ambient space with `n` points are `1..=n`.
pub type Label = u32;

/// A finite set of labels, stored sorted and without duplicates.
///
/// Ordering is lexicographic on the sorted members, which is the order
/// used for canonical cut sorting.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelSet(Vec<Label>);

impl LabelSet {
    pub fn new() -> Self {
        LabelSet(Vec::new())
    }

    /// The full label set `{1, ..., n}`.
    pub fn full(n: u32) -> Self {
        LabelSet((1..=n).collect())
    }

    pub fn from_sorted_unchecked(members: Vec<Label>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        LabelSet(members)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.0.binary_search(&label).is_ok()
    }

    pub fn insert(&mut self, label: Label) -> bool {
        match self.0.binary_search(&label) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, label);
                true
            }
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Label> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.0
    }

    pub fn min(&self) -> Option<Label> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<Label> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &LabelSet) -> LabelSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LabelSet(out)
    }

    pub fn intersection(&self, other: &LabelSet) -> LabelSet {
        LabelSet(self.iter().filter(|&l| other.contains(l)).collect())
    }

    pub fn difference(&self, other: &LabelSet) -> LabelSet {
        LabelSet(self.iter().filter(|&l| !other.contains(l)).collect())
    }

    /// `{1..n} \ self`.
    pub fn complement(&self, n: u32) -> LabelSet {
        LabelSet((1..=n).filter(|&l| !self.contains(l)).collect())
    }

    pub fn intersects(&self, other: &LabelSet) -> bool {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset(&self, other: &LabelSet) -> bool {
        self.len() <= other.len() && self.iter().all(|l| other.contains(l))
    }

    pub fn is_strict_subset(&self, other: &LabelSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    /// True when every member lies in `1..=n`.
    pub fn within(&self, n: u32) -> bool {
        self.min().is_none_or(|lo| lo >= 1) && self.max().is_none_or(|hi| hi <= n)
    }
}

impl FromIterator<Label> for LabelSet {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        let mut v: Vec<Label> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        LabelSet(v)
    }
}

impl<const K: usize> From<[Label; K]> for LabelSet {
    fn from(arr: [Label; K]) -> Self {
        arr.into_iter().collect()
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders as `{1,2,3}`.
impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}
