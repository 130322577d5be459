//! Partition compression by random-cycle coding.
//!
//! A partition of distinct, orderable elements is stored as an *ordering* of
//! those elements whose permutation cycles are the clusters. Writing each
//! cluster with its minimum first and listing clusters by descending
//! minimum, the decoder can find every cluster boundary on its own: a
//! decoded element smaller than the current cluster's head must start a new
//! cluster. No cluster count or sizes are ever transmitted.
//!
//! Within a cluster, everything after the head is coded as a set with the
//! multiset coder, reclaiming `log2((n_i - 1)!)` bits per cluster — exactly
//! the information content of the cluster assignment under the implied
//! model, which weights a partition by the product of `(n_i - 1)!`.

use std::collections::BTreeSet;

use crate::ans::{AnsState, SymbolCodec};
use crate::error::{Error, Result};
use crate::numeric::log2_factorial;
use crate::roc;
use crate::swor::SworTree;

/// A partition: pairwise-disjoint, non-empty clusters of distinct elements.
/// Clusters are kept sorted by their minimum element, ascending, so equality
/// is set-of-sets equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition<X: Ord> {
    clusters: Vec<BTreeSet<X>>,
}

impl<X: Ord> Partition<X> {
    /// Build from clusters, validating disjointness and non-emptiness.
    pub fn new(clusters: impl IntoIterator<Item = impl IntoIterator<Item = X>>) -> Result<Self> {
        let mut sets: Vec<BTreeSet<X>> = Vec::new();
        for cluster in clusters {
            let mut set = BTreeSet::new();
            let mut len = 0usize;
            for x in cluster {
                set.insert(x);
                len += 1;
            }
            if set.len() != len {
                return Err(Error::InvalidInput("duplicate element in cluster".into()));
            }
            if set.is_empty() {
                return Err(Error::InvalidInput("empty cluster".into()));
            }
            sets.push(set);
        }
        let mut seen = BTreeSet::new();
        for set in &sets {
            for x in set {
                if !seen.insert(x) {
                    return Err(Error::InvalidInput(
                        "duplicate element across clusters".into(),
                    ));
                }
            }
        }
        sets.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
        Ok(Partition { clusters: sets })
    }

    /// Total element count.
    pub fn len(&self) -> u64 {
        self.clusters.iter().map(|c| c.len() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Number of clusters.
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    /// Clusters ordered by ascending minimum.
    pub fn clusters(&self) -> &[BTreeSet<X>] {
        &self.clusters
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.clusters.iter().map(|c| c.len() as u64).collect()
    }
}

impl<X: Ord + Clone> Partition<X> {
    /// Foata canonical form: elements ascending within each cluster, cluster
    /// list ordered by descending head (= minimum) element. Idempotent by
    /// construction.
    pub fn foata_canonicalize(&self) -> CanonicalPartition<X> {
        let mut clusters: Vec<Vec<X>> = self
            .clusters
            .iter()
            .map(|c| c.iter().cloned().collect())
            .collect();
        clusters.reverse(); // stored ascending by min; Foata wants descending
        CanonicalPartition { clusters }
    }
}

/// A partition in Foata canonical order: within-cluster ascending, heads
/// strictly decreasing across the cluster list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPartition<X> {
    clusters: Vec<Vec<X>>,
}

impl<X> CanonicalPartition<X> {
    pub fn clusters(&self) -> &[Vec<X>] {
        &self.clusters
    }
}

/// Encode a partition. Clusters are processed from the smallest head to the
/// largest; each cluster is coded as its head's companions (a set, via the
/// multiset coder) followed by the head itself.
pub fn encode<X, C>(partition: &Partition<X>, codec: &C, state: &mut AnsState) -> Result<()>
where
    X: Ord + Clone,
    C: SymbolCodec<X>,
{
    let canonical = partition.foata_canonicalize();
    for cluster in canonical.clusters().iter().rev() {
        let rest: roc::Multiset<X> = cluster[1..].iter().cloned().collect();
        roc::encode(&rest, codec, state)?;
        codec.encode(state, &cluster[0])?;
    }
    Ok(())
}

/// Decode a partition of `n` elements. The first decoded element heads the
/// first cluster; every element that is larger than the current head joins
/// the current cluster (and its sampling rank is encoded back), while an
/// element smaller than the head opens the next cluster.
pub fn decode<X, C>(state: &mut AnsState, n: u64, codec: &C) -> Result<Partition<X>>
where
    X: Ord + Clone,
    C: SymbolCodec<X>,
{
    let mut clusters: Vec<Vec<X>> = Vec::new();
    let mut head: Option<X> = None;
    let mut tree: SworTree<X> = SworTree::new();
    let mut decoded = 0u64;
    while decoded < n {
        let z = codec.decode(state)?;
        decoded += 1;
        let starts_cluster = match &head {
            None => true,
            Some(h) => match z.cmp(h) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => {
                    return Err(Error::Corrupt("repeated cluster head".into()))
                }
                std::cmp::Ordering::Greater => false,
            },
        };
        if starts_cluster {
            head = Some(z.clone());
            tree = SworTree::new();
            clusters.push(vec![z]);
        } else {
            tree.insert(z.clone());
            let range = tree.forward_lookup(&z)?;
            if range.freq != 1 {
                return Err(Error::Corrupt("repeated element in cluster".into()));
            }
            state.push(range, tree.size());
            clusters.last_mut().expect("cluster open").push(z);
        }
    }
    Partition::new(clusters).map_err(|e| Error::Corrupt(e.to_string()))
}

/// Order information of a cluster assignment with the given sizes:
/// `sum_i log2((n_i - 1)!)` bits, the log of the number of element orderings
/// whose cycles produce exactly those clusters.
pub fn partition_order_info(sizes: &[u64]) -> f64 {
    sizes.iter().map(|&s| log2_factorial(s - 1)).sum()
}

/// `log2` probability of a cluster assignment under the implied model:
/// `log2( prod_i (n_i - 1)! / n! )`. Depends only on the cluster sizes.
pub fn implied_log_prob(sizes: &[u64]) -> f64 {
    let n: u64 = sizes.iter().sum();
    partition_order_info(sizes) - log2_factorial(n)
}

/// Bit savings of the three coding schemes on a given size profile, in the
/// order the clusters would be encoded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeComparison {
    /// Cycle coding: `sum_i log2((n_i - 1)!)` — the full order information.
    pub rcc_bits: f64,
    /// Sets-of-clusters with explicitly coded sizes:
    /// `sum_i (log2(n_i!) - log2(n - N_i))`.
    pub roc1_bits: f64,
    /// As above plus a bits-back step over the cluster order:
    /// `roc1 + log2(k!) - log2(n)`.
    pub roc2_bits: f64,
}

/// Compare the savings of cycle coding against the two set-of-clusters
/// schemes. Both alternatives are upper-bounded by the order information
/// (`rcc_bits`) for every size profile.
pub fn compare_schemes(sizes: &[u64]) -> SchemeComparison {
    let n: u64 = sizes.iter().sum();
    let k = sizes.len() as u64;
    let rcc_bits = partition_order_info(sizes);
    let mut roc1_bits = 0.0;
    let mut before = 0u64; // elements encoded before this cluster
    for &size in sizes {
        roc1_bits += log2_factorial(size) - ((n - before) as f64).log2();
        before += size;
    }
    let roc2_bits = roc1_bits + log2_factorial(k) - (n as f64).log2();
    SchemeComparison {
        rcc_bits,
        roc1_bits,
        roc2_bits,
    }
}

/// The size profile maximizing the order information at fixed `(n, k)`: one
/// cluster of `n - k + 1` elements, the rest singletons.
pub fn max_savings_sizes(n: u64, k: u64) -> Vec<u64> {
    assert!(k >= 1 && k <= n);
    let mut sizes = vec![1u64; k as usize];
    sizes[0] = n - k + 1;
    sizes
}

/// The size profile minimizing the order information at fixed `(n, k)`:
/// clusters as equal as possible, `n_i = n div k` plus one for the first
/// `n mod k` clusters.
pub fn min_savings_sizes(n: u64, k: u64) -> Vec<u64> {
    assert!(k >= 1 && k <= n);
    (0..k)
        .map(|i| n / k + if i < n % k { 1 } else { 0 })
        .collect()
}
