//! Doc-test shims for the guide: every fenced Rust block in the book
//! chapters compiles and runs under `cargo test --doc`, keeping the
//! narrative in sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/spatial-model.md")]
mod spatial_model {}

#[doc = include_str!("../../../book/src/preferential-sampling.md")]
mod preferential_sampling {}

#[doc = include_str!("../../../book/src/exact-inference.md")]
mod exact_inference {}

#[doc = include_str!("../../../book/src/prediction.md")]
mod prediction_chapter {}

#[doc = include_str!("../../../book/src/evaluation.md")]
mod evaluation_chapter {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli_chapter {}
