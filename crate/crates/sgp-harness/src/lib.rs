//! Evaluation harness around the reasoning core: a completion gateway with
//! live/mock/cache backends, loaders for the four benchmark families,
//! deterministic solvers with transcript rendering, a suite runner with
//! per-bucket scoring and consistency audits, and report emission.

pub mod audit;
pub mod cli;
pub mod datasets;
pub mod evaluator;
pub mod formats;
pub mod gateway;
pub mod solver;

pub use evaluator::{run_suite, EvalReport, RunConfig};
pub use gateway::{Backend, CompletionRequest, CompletionResult, Gateway, GatewayError};
