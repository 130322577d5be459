//! Lossless compression for data whose order carries no information:
//! multisets, partitions/clusterings, and graphs.
//!
//! Encoding such an object as a sequence wastes the bits it takes to pick
//! one of the many equivalent orderings. The codecs here reclaim those bits
//! with *bits-back sampling*: an ANS decode on the partially built message
//! chooses which element to encode next, so the choice costs nothing once
//! the decoder — running the exact inverse — re-encodes each choice's rank.
//! Message sizes land at the information content of the combinatorial object
//! itself, not of any particular serialization of it.
//!
//! The pieces:
//!
//! * [`ans`] — the unbounded-integer ANS coder, quantized distributions, and
//!   primitive symbol codecs (uniform integers, byte records);
//! * [`swor`] — the order-statistic multiset tree driving sampling without
//!   replacement;
//! * [`roc`] — multiset and nested-multiset coding;
//! * [`rcc`] — partition coding via canonical permutation cycles;
//! * [`rec`] — graph coding with the integer-arithmetic urn vertex model;
//! * [`bbans`] — bits-back coding for small discrete latent-variable models;
//! * [`numeric`] — exact factorials, binomials, and precise `log2` helpers
//!   used by the rate formulas.
//!
//! A worked guide with runnable examples lives in the `book/` directory of
//! the repository and is mirrored under [`guide`] so the snippets build as
//! doc-tests.

pub mod ans;
pub mod bbans;
mod error;
mod fenwick;
pub mod guide;
pub mod numeric;
pub mod rcc;
pub mod rec;
pub mod roc;
pub mod swor;

pub use ans::{
    decode_sequence, encode_sequence, AnsState, BytesCodec, QuantizedDist, SymbolCodec,
    SymbolRange, UniformCodec, DEFAULT_SEED_BITS,
};
pub use bbans::DiscreteLvm;
pub use error::{Error, Result};
pub use rcc::{CanonicalPartition, Partition};
pub use rec::{GraphEdgeList, PolyaUrn};
pub use roc::Multiset;
pub use swor::SworTree;
