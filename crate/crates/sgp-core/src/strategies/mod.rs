//! Deterministic navigation strategies, one per reasoning task family.
//!
//! Each strategy is a pure function over value inputs: relation inference by
//! path folding, dynamic-state tracking, chain query resolution, constraint
//! ordering, attribute filtering, and forward chaining. They double as the
//! mock oracle's brain and as ground-truth generators for property tests.

pub mod chain;
pub mod chaining;
pub mod ordering;
pub mod query;
pub mod relation;
pub mod tracking;

pub use chain::{resolve_chain, ChainHop, ChainQuery, ResolveError};
pub use chaining::{
    forward_chain, parse_pattern, parse_rule, parse_rules, ChainingError, DerivationChain,
    FactPattern, Rule, RuleFiring, Term, DEFAULT_FIRING_BUDGET,
};
pub use ordering::{sort_order, OrderConstraint, SortError};
pub use query::{run_graph_query, Comparator, Conjunct, FilterPredicate, Projection, QueryError, QueryResult};
pub use relation::{infer_relation, RelationError};
pub use tracking::{track_dynamic, TrackError};
