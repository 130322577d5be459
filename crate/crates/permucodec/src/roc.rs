//! Multiset compression by random-order coding.
//!
//! A multiset is a sequence with the order thrown away, and the order is
//! worth `log2( n! / prod_x M(x)! )` bits. To reclaim them, the encoder does
//! not pick an order up front: at each step it *samples* the next element
//! without replacement, using an ANS decode on the message built so far as
//! the source of randomness, then encodes the sampled element with the
//! symbol codec. The sampling decode shrinks the state by exactly the
//! order-information bits over the course of the run, and the decoder — which
//! sees the elements in reverse — re-encodes each element's rank to restore
//! the state bit-for-bit.
//!
//! The symbol codec must be exchangeable (any fixed codec is); the sampling
//! side needs only the [`SworTree`] rank structure, so encode and decode run
//! in `O(n log m)` tree work regardless of the alphabet size.

use std::collections::BTreeMap;

use crate::ans::{AnsState, SymbolCodec, SymbolRange};
use crate::error::{Error, Result};
use crate::numeric::log2_multinomial;
use crate::swor::SworTree;

/// A multiset: symbols with positive multiplicities. Ordering between
/// multisets compares the expanded, ascending element sequences
/// lexicographically (then by length), which is the canonical order used
/// when multisets themselves are symbols of an outer multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiset<X: Ord> {
    counts: BTreeMap<X, u64>,
    size: u64,
}

impl<X: Ord> Default for Multiset<X> {
    fn default() -> Self {
        Self::new()
    }
}

impl<X: Ord> Multiset<X> {
    pub fn new() -> Self {
        Multiset {
            counts: BTreeMap::new(),
            size: 0,
        }
    }

    pub fn insert(&mut self, x: X) {
        self.insert_many(x, 1);
    }

    pub fn insert_many(&mut self, x: X, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(x).or_insert(0) += count;
        self.size += count;
    }

    /// Remove one occurrence; errors if absent.
    pub fn remove(&mut self, x: &X) -> Result<()> {
        match self.counts.get_mut(x) {
            Some(c) if *c > 1 => *c -= 1,
            Some(_) => {
                self.counts.remove(x);
            }
            None => return Err(Error::SymbolNotFound),
        }
        self.size -= 1;
        Ok(())
    }

    /// Total element count, with multiplicity.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Number of distinct symbols.
    pub fn distinct_len(&self) -> usize {
        self.counts.len()
    }

    pub fn multiplicity(&self, x: &X) -> u64 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    /// Ascending `(symbol, multiplicity)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&X, u64)> {
        self.counts.iter().map(|(x, &c)| (x, c))
    }

    /// Ascending elements with repeats.
    pub fn elements(&self) -> impl Iterator<Item = &X> {
        self.counts
            .iter()
            .flat_map(|(x, &c)| std::iter::repeat(x).take(c as usize))
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.values().copied()
    }
}

impl<X: Ord + Clone> Multiset<X> {
    fn to_tree(&self) -> SworTree<X> {
        let runs: Vec<(X, u64)> = self.counts.iter().map(|(x, &c)| (x.clone(), c)).collect();
        SworTree::from_runs(&runs)
    }
}

impl<X: Ord> FromIterator<X> for Multiset<X> {
    fn from_iter<I: IntoIterator<Item = X>>(iter: I) -> Self {
        let mut ms = Multiset::new();
        for x in iter {
            ms.insert(x);
        }
        ms
    }
}

impl<X: Ord> PartialOrd for Multiset<X> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<X: Ord> Ord for Multiset<X> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Lexicographic over the expanded ascending element sequences,
        // without materializing them.
        let mut a = self.counts.iter();
        let mut b = other.counts.iter();
        let (mut ca, mut cb) = (a.next(), b.next());
        let (mut ra, mut rb) = (0u64, 0u64); // remaining of current run
        loop {
            match (ca, cb) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some((xa, &ma)), Some((xb, &mb))) => {
                    match xa.cmp(xb) {
                        std::cmp::Ordering::Equal => {
                            let (la, lb) = (ma - ra, mb - rb);
                            let step = la.min(lb);
                            ra += step;
                            rb += step;
                            if ra == ma {
                                ca = a.next();
                                ra = 0;
                            }
                            if rb == mb {
                                cb = b.next();
                                rb = 0;
                            }
                        }
                        other => return other,
                    }
                }
            }
        }
    }
}

/// Encode a multiset: repeatedly sample an element without replacement (an
/// ANS decode with weights equal to the remaining multiplicities and
/// precision equal to the remaining size), then encode it with `codec`.
pub fn encode<X, C>(multiset: &Multiset<X>, codec: &C, state: &mut AnsState) -> Result<()>
where
    X: Ord + Clone,
    C: SymbolCodec<X>,
{
    encode_traced(multiset, codec, state, |_, _, _| ())
}

/// [`encode`] with a hook observing each sampling step: the sampled symbol,
/// its range among the remaining elements, and the precision `n - i + 1`.
pub fn encode_traced<X, C>(
    multiset: &Multiset<X>,
    codec: &C,
    state: &mut AnsState,
    mut on_sample: impl FnMut(&X, SymbolRange, u64),
) -> Result<()>
where
    X: Ord + Clone,
    C: SymbolCodec<X>,
{
    let mut tree = multiset.to_tree();
    while !tree.is_empty() {
        let remaining = tree.size();
        let j = state.peek(remaining);
        let (z, range) = tree.reverse_lookup(j)?;
        on_sample(&z, range, remaining);
        state.pop(range, remaining);
        tree.remove(&z)?;
        codec.encode(state, &z)?;
    }
    Ok(())
}

/// Decode a multiset of `n` elements, restoring the pre-encode state
/// exactly: each decoded element's rank among the elements seen so far is
/// encoded back, reversing the sampling step.
pub fn decode<X, C>(state: &mut AnsState, n: u64, codec: &C) -> Result<Multiset<X>>
where
    X: Ord + Clone,
    C: SymbolCodec<X>,
{
    let mut tree = SworTree::new();
    let mut multiset = Multiset::new();
    for _ in 0..n {
        let z = codec.decode(state)?;
        tree.insert(z.clone());
        let range = tree.forward_lookup(&z)?;
        state.push(range, tree.size());
        multiset.insert(z);
    }
    Ok(multiset)
}

/// Information content of a multiset, in bits, given the cost of one
/// representative sequence under an exchangeable codec: the sequence cost
/// minus the order information `log2( n! / prod_x M(x)! )`.
pub fn multiset_info_content<X: Ord>(multiset: &Multiset<X>, sequence_bits: f64) -> f64 {
    sequence_bits - order_information(multiset)
}

/// `log2` of the multinomial coefficient of the multiset: the bits needed
/// to order its elements into a sequence.
pub fn order_information<X: Ord>(multiset: &Multiset<X>) -> f64 {
    log2_multinomial(multiset.size(), multiset.multiplicities())
}

/// Encode a multiset of multisets depth-first: sample an inner multiset
/// without replacement from the outer collection, then encode its elements
/// with [`encode`]; repeat until the outer collection is empty.
///
/// Returns the inner sizes in *decode* order. The sizes are side information
/// the decoder needs to delimit the inner blocks; they are the only part of
/// the message that lives outside the state.
pub fn nested_encode<X, C>(
    outer: &Multiset<Multiset<X>>,
    codec: &C,
    state: &mut AnsState,
) -> Result<Vec<u64>>
where
    X: Ord + Clone,
    C: SymbolCodec<X>,
{
    let mut tree = outer.to_tree();
    let mut sizes = Vec::with_capacity(outer.size() as usize);
    while !tree.is_empty() {
        let remaining = tree.size();
        let j = state.peek(remaining);
        let (inner, range) = tree.reverse_lookup(j)?;
        state.pop(range, remaining);
        tree.remove(&inner)?;
        sizes.push(inner.size());
        encode(&inner, codec, state)?;
    }
    sizes.reverse();
    Ok(sizes)
}

/// Inverse of [`nested_encode`]; `sizes` must be the returned size list.
pub fn nested_decode<X, C>(
    state: &mut AnsState,
    sizes: &[u64],
    codec: &C,
) -> Result<Multiset<Multiset<X>>>
where
    X: Ord + Clone,
    C: SymbolCodec<X>,
{
    let mut tree = SworTree::new();
    let mut outer = Multiset::new();
    for &size in sizes {
        let inner = decode(state, size, codec)?;
        tree.insert(inner.clone());
        let range = tree.forward_lookup(&inner)?;
        state.push(range, tree.size());
        outer.insert(inner);
    }
    Ok(outer)
}

/// Upper bound on the ordering bits reclaimable from a nested multiset:
/// `log2 |outer|! + sum_i log2 |inner_i|!`, attained when all inner
/// multisets are distinct and every inner element is distinct.
pub fn nested_savings_bound<X: Ord>(outer: &Multiset<Multiset<X>>) -> f64 {
    let mut bits = crate::numeric::log2_factorial(outer.size());
    for (inner, mult) in outer.iter() {
        bits += mult as f64 * crate::numeric::log2_factorial(inner.size());
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ans::{BytesCodec, QuantizedDist, UniformCodec};

    #[test]
    fn empty_multiset_leaves_state_unchanged() {
        let codec = UniformCodec::new(4).unwrap();
        let mut state = AnsState::new();
        let before = state.clone();
        encode(&Multiset::<u64>::new(), &codec, &mut state).unwrap();
        assert_eq!(state, before);
        let ms = decode::<u64, _>(&mut state, 0, &codec).unwrap();
        assert!(ms.is_empty());
        assert_eq!(state, before);
    }

    #[test]
    fn abb_growth_is_info_content() {
        // {a, b, b} under the uniform pair codec: 3 symbol bits minus
        // log2(3!/2!) ordering bits.
        let codec = UniformCodec::new(2).unwrap();
        let ms: Multiset<u64> = [0, 1, 1].into_iter().collect();
        let mut state = AnsState::new();
        let before = state.log2();
        encode(&ms, &codec, &mut state).unwrap();
        let growth = state.log2() - before;
        let expect = 3.0 - 3f64.log2();
        assert!((growth - expect).abs() < 1e-6, "{growth} vs {expect}");
    }

    #[test]
    fn round_trip_restores_multiset_and_state() {
        let dist = QuantizedDist::new([(b'x', 5), (b'y', 2), (b'z', 1)]).unwrap();
        let ms: Multiset<u8> = b"xxxyzzyxy".iter().copied().collect();
        let mut state = AnsState::new();
        let before = state.clone();
        encode(&ms, &dist, &mut state).unwrap();
        let back = decode(&mut state, ms.size(), &dist).unwrap();
        assert_eq!(back, ms);
        assert_eq!(state, before);
    }

    #[test]
    fn determinism_same_input_same_message() {
        let codec = BytesCodec::new(16);
        let ms: Multiset<Vec<u8>> = [b"pear".to_vec(), b"fig".to_vec(), b"fig".to_vec()]
            .into_iter()
            .collect();
        let mut a = AnsState::new();
        let mut b = AnsState::new();
        encode(&ms, &codec, &mut a).unwrap();
        encode(&ms, &codec, &mut b).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
    }

    #[test]
    fn sampling_path_probability_is_permutation_count() {
        use num_rational::BigRational;
        use num_bigint::BigInt;
        // Product over steps of mult/(remaining) must equal
        // prod_x M(x)! / n! exactly.
        let dist = QuantizedDist::new([(0u32, 1), (1, 1), (2, 1), (3, 1)]).unwrap();
        let ms: Multiset<u32> = [0, 0, 0, 1, 1, 2, 3, 3, 3, 3].into_iter().collect();
        let mut path = BigRational::from_integer(BigInt::from(1));
        let mut state = AnsState::new();
        encode_traced(&ms, &dist, &mut state, |_, range, precision| {
            path *= BigRational::new(BigInt::from(range.freq), BigInt::from(precision));
        })
        .unwrap();
        let mut expect = BigRational::new(
            BigInt::from(1),
            BigInt::from_biguint(num_bigint::Sign::Plus, crate::numeric::factorial(10)),
        );
        for m in ms.multiplicities() {
            expect *= BigRational::from_integer(BigInt::from_biguint(
                num_bigint::Sign::Plus,
                crate::numeric::factorial(m),
            ));
        }
        assert_eq!(path, expect);
    }

    #[test]
    fn mean_step_change_is_nonnegative() {
        use rand::{Rng, SeedableRng};
        // With the codec matching the sampling marginals, the expected
        // per-step bit change is the KL between the without-replacement
        // conditional and the marginal, which is never negative.
        let ms: Multiset<u8> = [0u8, 0, 0, 1, 1, 2, 3].into_iter().collect();
        let dist =
            QuantizedDist::new(ms.iter().map(|(x, c)| (*x, c))).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut sum = 0.0;
        let mut steps = 0u64;
        for _ in 0..1000 {
            let mut limbs = [0u64; 2];
            rng.fill(&mut limbs);
            let value = (num_bigint::BigUint::from(limbs[0]) << 64) | num_bigint::BigUint::from(limbs[1]);
            let mut state = AnsState::from_value(value);
            let mut tree = ms.to_tree();
            while !tree.is_empty() {
                let before = state.log2();
                let remaining = tree.size();
                let j = state.peek(remaining);
                let (z, range) = tree.reverse_lookup(j).unwrap();
                state.pop(range, remaining);
                tree.remove(&z).unwrap();
                dist.encode(&mut state, &z).unwrap();
                sum += state.log2() - before;
                steps += 1;
            }
        }
        let mean = sum / steps as f64;
        assert!(mean >= -0.01, "mean step change {mean}");
    }

    #[test]
    fn info_content_formula() {
        let ms: Multiset<u8> = [1u8, 2, 2].into_iter().collect();
        let got = multiset_info_content(&ms, 3.0);
        assert!((got - (3.0 - 3f64.log2())).abs() < 1e-12);

        let single: Multiset<u8> = [9u8].into_iter().collect();
        assert_eq!(multiset_info_content(&single, 2.5), 2.5);
    }

    #[test]
    fn multiset_order_is_expanded_lexicographic() {
        let ab: Multiset<u8> = [b'a', b'b'].into_iter().collect();
        let aa: Multiset<u8> = [b'a', b'a'].into_iter().collect();
        let a: Multiset<u8> = [b'a'].into_iter().collect();
        assert!(aa < ab);
        assert!(a < aa); // prefix
        assert_eq!(ab.cmp(&ab), std::cmp::Ordering::Equal);
    }

    #[test]
    fn nested_single_inner_equals_plain_roc() {
        let codec = BytesCodec::new(8);
        let inner: Multiset<Vec<u8>> = [b"k".to_vec(), b"v".to_vec()].into_iter().collect();
        let outer: Multiset<Multiset<Vec<u8>>> = [inner.clone()].into_iter().collect();

        let mut nested_state = AnsState::new();
        let sizes = nested_encode(&outer, &codec, &mut nested_state).unwrap();
        assert_eq!(sizes, vec![2]);

        let mut plain_state = AnsState::new();
        encode(&inner, &codec, &mut plain_state).unwrap();
        assert_eq!(nested_state, plain_state);
    }

    #[test]
    fn nested_round_trip() {
        let codec = BytesCodec::new(8);
        let mk = |items: &[&[u8]]| -> Multiset<Vec<u8>> {
            items.iter().map(|r| r.to_vec()).collect()
        };
        let outer: Multiset<Multiset<Vec<u8>>> = [
            mk(&[b"a", b"b", b"b"]),
            mk(&[b"q"]),
            mk(&[b"a", b"b", b"b"]),
            mk(&[]),
        ]
        .into_iter()
        .collect();
        let mut state = AnsState::new();
        let before = state.clone();
        let sizes = nested_encode(&outer, &codec, &mut state).unwrap();
        let back = nested_decode(&mut state, &sizes, &codec).unwrap();
        assert_eq!(back, outer);
        assert_eq!(state, before);
    }

    #[test]
    fn nested_pair_savings_one_bit() {
        // Two distinct singleton inner multisets: ordering them is worth
        // log2 2! = 1 bit against the sequential encoding.
        let codec = BytesCodec::new(4);
        let inner_a: Multiset<Vec<u8>> = [b"a".to_vec()].into_iter().collect();
        let inner_b: Multiset<Vec<u8>> = [b"b".to_vec()].into_iter().collect();
        let outer: Multiset<Multiset<Vec<u8>>> =
            [inner_a.clone(), inner_b.clone()].into_iter().collect();

        let mut nested_state = AnsState::new();
        nested_encode(&outer, &codec, &mut nested_state).unwrap();
        let nested_bits = nested_state.log2() - AnsState::new().log2();

        let mut seq_state = AnsState::new();
        for inner in [&inner_a, &inner_b] {
            for x in inner.elements() {
                codec.encode(&mut seq_state, x).unwrap();
            }
        }
        let seq_bits = seq_state.log2() - AnsState::new().log2();
        let savings = seq_bits - nested_bits;
        assert!((savings - 1.0).abs() < 1e-6, "savings {savings}");
    }
}
