use std::fmt;

/// A set of catalog indices of one kind (at most 64 per kind).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdSet(pub u64);

impl IdSet {
    pub const EMPTY: IdSet = IdSet(0);

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) -> bool {
        debug_assert!(i < 64);
        let had = self.contains(i);
        self.0 |= 1 << i;
        !had
    }

    pub fn with(self, i: usize) -> IdSet {
        IdSet(self.0 | (1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: IdSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: IdSet) -> IdSet {
        IdSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl FromIterator<usize> for IdSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = IdSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for IdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = IdSet::EMPTY;
        assert!(s.insert(3));
        assert!(!s.insert(3));
        s.insert(63);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 63]);
        assert!(IdSet::EMPTY.with(3).is_subset(s));
        assert!(!s.is_subset(IdSet::EMPTY.with(3)));
        assert_eq!(s.len(), 2);
        assert!(!s.contains(64));
    }
}
