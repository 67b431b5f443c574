use std::fmt;

/// Set of feature indices below `d`, stored as a bitmask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FeatureSubset {
    d: usize,
    words: Vec<u64>,
}

impl FeatureSubset {
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            words: vec![0; d.div_ceil(64)],
        }
    }

    pub fn full(d: usize) -> Self {
        let mut s = Self::empty(d);
        for i in 0..d {
            s.insert(i);
        }
        s
    }

    /// # Panics
    /// If any index is `>= d`.
    pub fn from_indices(d: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(d);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.d
    }

    pub fn insert(&mut self, i: usize) {
        assert!(
            i < self.d,
            "feature {i} outside subset universe of {}",
            self.d
        );
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.d {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.d && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Number of members (the subset's cardinality).
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
