//! Deterministic reasoning core for structure-guided prompting.
//!
//! Everything in this crate is pure computation over owned values: a triple
//! store with path search, the six task-specific navigation strategies, a
//! parser for graph-structured model transcripts, and the prompt template
//! registry. IO, dataset loading, and the evaluation harness live in the
//! companion `sgp-harness` crate.
//!
//! The crate is `no_std`-compatible (`alloc` required); the default `std`
//! feature only adds `std::error::Error` impls on the error types.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dynamic;
pub mod graph;
pub mod instance;
pub mod kinship;
pub mod prompts;
pub mod strategies;
pub mod textgraph;
pub mod triple;

pub use dynamic::{DynamicError, DynamicSeries, Event};
pub use graph::{Direction, GraphError, KnowledgeGraph, PathStep};
pub use instance::{AnswerKind, GoldAnswer, StructuredForm, TaskInstance, TaskKind};
pub use kinship::{Gender, KinshipError, KinshipRelation};
pub use prompts::{PromptBundle, PromptError, PromptMode};
pub use triple::{Triple, TripleError};

/// Implement `std::error::Error` for an error type when the `std` feature is on.
macro_rules! std_error {
    ($($ty:ty),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            impl std::error::Error for $ty {}
        )*
    };
}
pub(crate) use std_error;
