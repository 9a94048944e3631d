//! The guide chapters from `book/`, re-exposed as rustdoc so every code block
//! in the book is compiled and run by `cargo test --doc`.

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/nehari.md")]
pub mod nehari {}

#[doc = include_str!("../../../book/src/green.md")]
pub mod green {}

#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod dynamics {}

#[doc = include_str!("../../../book/src/convergence.md")]
pub mod convergence {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
