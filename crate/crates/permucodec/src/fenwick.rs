//! Fenwick (binary indexed) tree over dense integer ids, with prefix-sum
//! search by binary lifting. Backs the urn model's rank queries.

use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug)]
pub(crate) struct Fenwick {
    tree: Vec<u64>, // 1-based
    len: usize,
    visits: AtomicU64,
}

impl Fenwick {
    /// Tree of `len` slots, every slot holding `value`.
    pub fn with_constant(len: usize, value: u64) -> Self {
        let mut tree = vec![0u64; len + 1];
        for i in 1..=len {
            tree[i] = value * (i & i.wrapping_neg()) as u64;
        }
        Fenwick {
            tree,
            len,
            visits: AtomicU64::new(0),
        }
    }

    fn visit(&self) {
        self.visits.fetch_add(1, Ordering::Relaxed);
    }

    pub fn visits(&self) -> u64 {
        self.visits.load(Ordering::Relaxed)
    }

    pub fn add(&mut self, index: usize, delta: u64) {
        let mut i = index + 1;
        while i <= self.len {
            self.visit();
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    pub fn sub(&mut self, index: usize, delta: u64) {
        let mut i = index + 1;
        while i <= self.len {
            self.visit();
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Raw value of internal node `i` (1-based): the sum of the slot range
    /// `(i - lowbit(i), i]`. Exposed for descents that mix in an external
    /// per-index term.
    pub fn subtree(&self, i: usize) -> u64 {
        self.visit();
        self.tree[i]
    }

    /// Sum of slots `[0, index)`.
    pub fn prefix(&self, index: usize) -> u64 {
        let mut i = index;
        let mut sum = 0;
        while i > 0 {
            self.visit();
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_init_matches_adds() {
        let a = Fenwick::with_constant(13, 3);
        let mut b = Fenwick::with_constant(13, 0);
        for i in 0..13 {
            b.add(i, 3);
        }
        for i in 0..=13 {
            assert_eq!(a.prefix(i), b.prefix(i));
            assert_eq!(a.prefix(i), 3 * i as u64);
        }
    }

    #[test]
    fn add_sub_round_trip() {
        let mut f = Fenwick::with_constant(9, 1);
        f.add(4, 5);
        f.add(0, 2);
        f.sub(4, 3);
        assert_eq!(f.prefix(9), 9 + 5 + 2 - 3);
        assert_eq!(f.prefix(4), 4 + 2);
        assert_eq!(f.prefix(5), 5 + 2 + 2);
    }
}
