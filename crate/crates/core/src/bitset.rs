//! Fixed-width bit set over individual indexes.

const WORD_BITS: usize = 64;

/// A set of individual indexes drawn from `{0, …, width−1}`, stored as a
/// fixed-width bit array. Intersection and union run word-wise, so set
/// operations cost `⌈width/64⌉` word operations.
///
/// Bits past `width` in the last word are kept zero, so `==` and `Hash` work
/// on the raw words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SourceSet {
    width: usize,
    words: Box<[u64]>,
}

#[inline]
fn word_count(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

impl SourceSet {
    /// The empty set over `{0, …, width−1}`.
    pub fn empty(width: usize) -> Self {
        SourceSet {
            width,
            words: vec![0; word_count(width)].into_boxed_slice(),
        }
    }

    /// The full set `{0, …, width−1}`.
    pub fn full(width: usize) -> Self {
        let mut set = SourceSet {
            width,
            words: vec![!0u64; word_count(width)].into_boxed_slice(),
        };
        set.mask_tail();
        set
    }

    pub fn from_members(width: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut set = SourceSet::empty(width);
        for m in members {
            set.insert(m);
        }
        set
    }

    /// Clears any bits past `width` in the last word.
    fn mask_tail(&mut self) {
        let rem = self.width % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// Inserts `member`. Panics if `member >= width`.
    #[inline]
    pub fn insert(&mut self, member: usize) {
        assert!(member < self.width, "member {member} >= width {}", self.width);
        self.words[member / WORD_BITS] |= 1u64 << (member % WORD_BITS);
    }

    #[inline]
    pub fn contains(&self, member: usize) -> bool {
        member < self.width
            && self.words[member / WORD_BITS] & (1u64 << (member % WORD_BITS)) != 0
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &SourceSet) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    #[inline]
    pub fn intersect_with(&mut self, other: &SourceSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    #[inline]
    pub fn union_with(&mut self, other: &SourceSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn intersection(&self, other: &SourceSet) -> SourceSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    /// The complement within `{0, …, width−1}`.
    pub fn complement(&self) -> SourceSet {
        let mut out = SourceSet {
            width: self.width,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.mask_tail();
        out
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }
}

impl std::fmt::Debug for SourceSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_contains_iter() {
        let mut s = SourceSet::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert!(s.contains(0) && s.contains(64) && s.contains(129));
        assert!(!s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn full_and_complement_respect_width() {
        for width in [1, 63, 64, 65, 127, 128, 130] {
            let full = SourceSet::full(width);
            assert_eq!(full.len(), width);
            assert!(full.complement().is_empty());
            let empty = SourceSet::empty(width);
            assert_eq!(empty.complement(), full);
        }
    }

    #[test]
    fn complement_partitions() {
        let s = SourceSet::from_members(10, [0, 2, 9]);
        let c = s.complement();
        assert!(s.is_disjoint(&c));
        let mut u = s.clone();
        u.union_with(&c);
        assert_eq!(u, SourceSet::full(10));
    }

    #[test]
    fn set_ops() {
        let a = SourceSet::from_members(70, [1, 3, 68]);
        let b = SourceSet::from_members(70, [3, 68, 69]);
        assert_eq!(a.intersection(&b), SourceSet::from_members(70, [3, 68]));
        assert!(!a.is_disjoint(&b));
        assert!(a.is_disjoint(&SourceSet::from_members(70, [0, 2])));
    }

    #[test]
    #[should_panic(expected = "width")]
    fn insert_out_of_range_panics() {
        SourceSet::empty(4).insert(4);
    }
}
