//! Order-statistic multiset tree: the sampling-without-replacement engine.
//!
//! Each node holds a distinct symbol, its multiplicity, and the total count
//! of its subtree, so the tree answers both directions of the rank query in
//! time proportional to its depth:
//!
//! * `forward_lookup(x)` -> multiplicity of `x` and the count of elements
//!   strictly below it,
//! * `reverse_lookup(j)` -> the symbol owning rank `j`.
//!
//! Together with `insert` and `remove` these are exactly the operations an
//! ANS coder needs to sample elements from a shrinking multiset and to put
//! the consumed bits back on the other side.
//!
//! Balance is kept with AVL rotations on insert. Removal only decrements
//! counts and leaves the node in place with multiplicity zero; such nodes
//! own empty ranges, so every query stays correct, and the tree never
//! rebalances on removal. The depth bound is therefore in terms of the
//! number of distinct symbols ever inserted.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::ans::SymbolRange;
use crate::error::{Error, Result};

const NIL: u32 = u32::MAX;

#[derive(Debug)]
struct Node<X> {
    symbol: X,
    mult: u64,
    total: u64,
    height: u8,
    left: u32,
    right: u32,
}

/// Counted multiset tree over an ordered symbol type.
#[derive(Debug)]
pub struct SworTree<X> {
    nodes: Vec<Node<X>>,
    root: u32,
    visits: AtomicU64,
}

impl<X: Ord + Clone> Default for SworTree<X> {
    fn default() -> Self {
        Self::new()
    }
}

impl<X: Ord + Clone> SworTree<X> {
    pub fn new() -> Self {
        SworTree {
            nodes: Vec::new(),
            root: NIL,
            visits: AtomicU64::new(0),
        }
    }

    /// Balanced tree from an ascending item sequence (repeats allowed).
    pub fn build(items: &[X]) -> Result<Self> {
        if items.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("items not sorted".into()));
        }
        let mut runs: Vec<(X, u64)> = Vec::new();
        for item in items {
            match runs.last_mut() {
                Some((sym, mult)) if sym == item => *mult += 1,
                _ => runs.push((item.clone(), 1)),
            }
        }
        Ok(Self::from_runs(&runs))
    }

    /// Balanced tree from ascending `(symbol, multiplicity)` runs.
    pub fn from_runs(runs: &[(X, u64)]) -> Self {
        let mut tree = SworTree::new();
        tree.nodes.reserve(runs.len());
        tree.root = tree.build_range(runs);
        tree
    }

    fn build_range(&mut self, runs: &[(X, u64)]) -> u32 {
        if runs.is_empty() {
            return NIL;
        }
        let mid = runs.len() / 2;
        let left = self.build_range(&runs[..mid]);
        let right = self.build_range(&runs[mid + 1..]);
        let (symbol, mult) = runs[mid].clone();
        let idx = self.nodes.len() as u32;
        self.nodes.push(Node {
            symbol,
            mult,
            total: 0,
            height: 0,
            left,
            right,
        });
        self.refresh(idx);
        idx
    }

    /// Total number of elements, counting multiplicity.
    pub fn size(&self) -> u64 {
        self.total(self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// Height of the tree; every lookup touches at most `height + 1` nodes.
    pub fn height(&self) -> u32 {
        if self.root == NIL {
            0
        } else {
            self.nodes[self.root as usize].height as u32
        }
    }

    /// Cumulative count of nodes touched by lookups, inserts, and removals.
    pub fn visits(&self) -> u64 {
        self.visits.load(Ordering::Relaxed)
    }

    pub fn reset_visits(&self) {
        self.visits.store(0, Ordering::Relaxed);
    }

    fn visit(&self) {
        self.visits.fetch_add(1, Ordering::Relaxed);
    }

    fn total(&self, idx: u32) -> u64 {
        if idx == NIL {
            0
        } else {
            self.nodes[idx as usize].total
        }
    }

    fn height_of(&self, idx: u32) -> u8 {
        if idx == NIL {
            0
        } else {
            self.nodes[idx as usize].height
        }
    }

    fn refresh(&mut self, idx: u32) {
        let (left, right) = {
            let n = &self.nodes[idx as usize];
            (n.left, n.right)
        };
        let total = self.nodes[idx as usize].mult + self.total(left) + self.total(right);
        let height = 1 + self.height_of(left).max(self.height_of(right));
        let n = &mut self.nodes[idx as usize];
        n.total = total;
        n.height = height;
    }

    fn rotate_right(&mut self, idx: u32) -> u32 {
        let l = self.nodes[idx as usize].left;
        self.nodes[idx as usize].left = self.nodes[l as usize].right;
        self.nodes[l as usize].right = idx;
        self.refresh(idx);
        self.refresh(l);
        l
    }

    fn rotate_left(&mut self, idx: u32) -> u32 {
        let r = self.nodes[idx as usize].right;
        self.nodes[idx as usize].right = self.nodes[r as usize].left;
        self.nodes[r as usize].left = idx;
        self.refresh(idx);
        self.refresh(r);
        r
    }

    fn rebalance(&mut self, idx: u32) -> u32 {
        let n = &self.nodes[idx as usize];
        let (left, right) = (n.left, n.right);
        let balance = self.height_of(left) as i32 - self.height_of(right) as i32;
        if balance > 1 {
            let ln = &self.nodes[left as usize];
            if self.height_of(ln.left) < self.height_of(ln.right) {
                let new_left = self.rotate_left(left);
                self.nodes[idx as usize].left = new_left;
                self.refresh(idx);
            }
            self.rotate_right(idx)
        } else if balance < -1 {
            let rn = &self.nodes[right as usize];
            if self.height_of(rn.right) < self.height_of(rn.left) {
                let new_right = self.rotate_right(right);
                self.nodes[idx as usize].right = new_right;
                self.refresh(idx);
            }
            self.rotate_left(idx)
        } else {
            idx
        }
    }

    /// Add one occurrence of `x`.
    pub fn insert(&mut self, x: X) {
        let root = self.root;
        self.root = self.insert_at(root, x);
    }

    fn insert_at(&mut self, idx: u32, x: X) -> u32 {
        if idx == NIL {
            let new = self.nodes.len() as u32;
            self.nodes.push(Node {
                symbol: x,
                mult: 1,
                total: 1,
                height: 1,
                left: NIL,
                right: NIL,
            });
            return new;
        }
        self.visit();
        match x.cmp(&self.nodes[idx as usize].symbol) {
            std::cmp::Ordering::Equal => {
                let n = &mut self.nodes[idx as usize];
                n.mult += 1;
                n.total += 1;
                idx
            }
            std::cmp::Ordering::Less => {
                let left = self.nodes[idx as usize].left;
                let new_left = self.insert_at(left, x);
                self.nodes[idx as usize].left = new_left;
                self.refresh(idx);
                self.rebalance(idx)
            }
            std::cmp::Ordering::Greater => {
                let right = self.nodes[idx as usize].right;
                let new_right = self.insert_at(right, x);
                self.nodes[idx as usize].right = new_right;
                self.refresh(idx);
                self.rebalance(idx)
            }
        }
    }

    /// Remove one occurrence of `x`; errors if `x` is absent.
    pub fn remove(&mut self, x: &X) -> Result<()> {
        let root = self.root;
        self.remove_at(root, x)
    }

    fn remove_at(&mut self, idx: u32, x: &X) -> Result<()> {
        if idx == NIL {
            return Err(Error::SymbolNotFound);
        }
        self.visit();
        let next = {
            let n = &self.nodes[idx as usize];
            match x.cmp(&n.symbol) {
                std::cmp::Ordering::Equal => {
                    if n.mult == 0 {
                        return Err(Error::SymbolNotFound);
                    }
                    let n = &mut self.nodes[idx as usize];
                    n.mult -= 1;
                    n.total -= 1;
                    return Ok(());
                }
                std::cmp::Ordering::Less => n.left,
                std::cmp::Ordering::Greater => n.right,
            }
        };
        self.remove_at(next, x)?;
        self.nodes[idx as usize].total -= 1;
        Ok(())
    }

    /// Multiplicity of `x` and the count of elements strictly below it.
    pub fn forward_lookup(&self, x: &X) -> Result<SymbolRange> {
        let mut idx = self.root;
        let mut cum = 0u64;
        while idx != NIL {
            self.visit();
            let n = &self.nodes[idx as usize];
            match x.cmp(&n.symbol) {
                std::cmp::Ordering::Less => idx = n.left,
                std::cmp::Ordering::Greater => {
                    cum += self.total(n.left) + n.mult;
                    idx = n.right;
                }
                std::cmp::Ordering::Equal => {
                    if n.mult == 0 {
                        return Err(Error::SymbolNotFound);
                    }
                    return Ok(SymbolRange {
                        freq: n.mult,
                        cum: cum + self.total(n.left),
                    });
                }
            }
        }
        Err(Error::SymbolNotFound)
    }

    /// The symbol owning rank `j`, i.e. the unique `x` with
    /// `cum_x <= j < cum_x + mult_x`.
    pub fn reverse_lookup(&self, j: u64) -> Result<(X, SymbolRange)> {
        if j >= self.size() {
            return Err(Error::IndexOutOfRange {
                index: j,
                precision: self.size(),
            });
        }
        let mut idx = self.root;
        let mut offset = 0u64;
        let mut j = j;
        loop {
            debug_assert_ne!(idx, NIL, "ranks tile the tree size");
            self.visit();
            let n = &self.nodes[idx as usize];
            let n_left = self.total(n.left);
            if j < n_left {
                idx = n.left;
            } else if j < n_left + n.mult {
                return Ok((
                    n.symbol.clone(),
                    SymbolRange {
                        freq: n.mult,
                        cum: offset + n_left,
                    },
                ));
            } else {
                j -= n_left + n.mult;
                offset += n_left + n.mult;
                idx = n.right;
            }
        }
    }

    /// Multiplicity of `x` (zero if absent).
    pub fn multiplicity(&self, x: &X) -> u64 {
        self.forward_lookup(x).map(|r| r.freq).unwrap_or(0)
    }

    /// Ascending `(symbol, multiplicity)` pairs of the remaining multiset.
    pub fn runs(&self) -> Vec<(X, u64)> {
        let mut out = Vec::new();
        self.collect(self.root, &mut out);
        out
    }

    fn collect(&self, idx: u32, out: &mut Vec<(X, u64)>) {
        if idx == NIL {
            return;
        }
        let n = &self.nodes[idx as usize];
        self.collect(n.left, out);
        if n.mult > 0 {
            out.push((n.symbol.clone(), n.mult));
        }
        self.collect(n.right, out);
    }
}
