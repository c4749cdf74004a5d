//! Sorted index sets over an ordered point list.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// A finite set of point indices, stored strictly increasing.
///
/// Every subset of an approximation `A_n` (poset elements, ball queries,
/// thread entries) is an `IndexSet`, so equality and hashing are canonical.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(SmallVec<[u32; 4]>);

impl IndexSet {
    pub fn new() -> Self {
        Self(SmallVec::new())
    }

    pub fn singleton(i: u32) -> Self {
        let mut v = SmallVec::new();
        v.push(i);
        Self(v)
    }

    /// Builds a set from arbitrary indices, sorting and deduplicating.
    pub fn from_unsorted<I: IntoIterator<Item = u32>>(items: I) -> Self {
        let mut v: SmallVec<[u32; 4]> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    /// Wraps indices that are already strictly increasing.
    pub fn from_sorted(items: &[u32]) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Self(SmallVec::from_slice(items))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for a in &self.0 {
            for b in it.by_ref() {
                match b.cmp(a) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
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
        IndexSet(out)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|&x| other.contains(x)).collect())
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&x| !other.contains(x))
    }

    /// The set with the element at position `pos` removed.
    pub fn without_position(&self, pos: usize) -> IndexSet {
        let mut v = self.0.clone();
        v.remove(pos);
        IndexSet(v)
    }

    /// Union of many sets.
    pub fn union_all<'a, I: IntoIterator<Item = &'a IndexSet>>(sets: I) -> IndexSet {
        let mut v: SmallVec<[u32; 4]> = SmallVec::new();
        for s in sets {
            v.extend_from_slice(&s.0);
        }
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.0.to_vec()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<u32> for IndexSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        IndexSet::from_unsorted(iter)
    }
}
