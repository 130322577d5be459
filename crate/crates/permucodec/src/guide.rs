//! The book's chapters, mounted as rustdoc modules so every code block in
//! the guide compiles and runs under `cargo test --doc`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/ans.md")]
pub mod ans {}

#[doc = include_str!("../../../book/src/multisets.md")]
pub mod multisets {}

#[doc = include_str!("../../../book/src/partitions.md")]
pub mod partitions {}

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}

#[doc = include_str!("../../../book/src/bits_back.md")]
pub mod bits_back {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
