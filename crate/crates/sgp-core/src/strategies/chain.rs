//! Chain queries: fold a hop sequence from an anchor entity, one entity per
//! hop, as in "the general who headed X reached what distinction?".

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Direction, KnowledgeGraph};
use crate::triple::entity_key;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainHop {
    pub relation: String,
    pub direction: Direction,
}

/// `anchor` followed by one or more hops; hops must be non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainQuery {
    pub anchor: String,
    pub hops: Vec<ChainHop>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolveError {
    EmptyChain,
    /// A hop matched nothing. `hop` is zero-based.
    Unanswerable { hop: usize, at: String },
    /// A hop matched several entities; all candidates reported.
    Ambiguous { hop: usize, candidates: Vec<String> },
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolveError::EmptyChain => write!(f, "chain query has no hops"),
            ResolveError::Unanswerable { hop, at } => {
                write!(f, "hop {} from '{}' matched nothing", hop, at)
            }
            ResolveError::Ambiguous { hop, candidates } => {
                write!(f, "hop {} is ambiguous: {}", hop, candidates.join(", "))
            }
        }
    }
}

crate::std_error!(ResolveError);

/// Resolves the chain left to right; every hop must land on exactly one
/// entity. Returns the final entity's display form.
pub fn resolve_chain(kg: &KnowledgeGraph, q: &ChainQuery) -> Result<String, ResolveError> {
    if q.hops.is_empty() {
        return Err(ResolveError::EmptyChain);
    }
    let mut current = q.anchor.clone();
    for (i, hop) in q.hops.iter().enumerate() {
        let matches: Vec<String> = match hop.direction {
            Direction::Forward => kg
                .objects_of(&current, &hop.relation)
                .into_iter()
                .map(|t| t.object.clone())
                .collect(),
            Direction::Inverse => kg
                .subjects_with(&hop.relation, &current)
                .into_iter()
                .map(|t| t.subject.clone())
                .collect(),
        };
        let mut unique: Vec<String> = Vec::new();
        for m in matches {
            if !unique.iter().any(|u| entity_key(u) == entity_key(&m)) {
                unique.push(m);
            }
        }
        match unique.len() {
            0 => {
                return Err(ResolveError::Unanswerable {
                    hop: i,
                    at: current,
                })
            }
            1 => current = unique.remove(0),
            _ => {
                return Err(ResolveError::Ambiguous {
                    hop: i,
                    candidates: unique,
                })
            }
        }
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::Triple;

    fn kg_from(edges: &[(&str, &str, &str)]) -> KnowledgeGraph {
        edges
            .iter()
            .map(|(s, r, o)| Triple::new(s, r, o).unwrap())
            .collect()
    }

    fn fwd(rel: &str) -> ChainHop {
        ChainHop {
            relation: String::from(rel),
            direction: Direction::Forward,
        }
    }

    fn inv(rel: &str) -> ChainHop {
        ChainHop {
            relation: String::from(rel),
            direction: Direction::Inverse,
        }
    }

    #[test]
    fn two_hop_composition() {
        let kg = kg_from(&[("a", "r1", "b"), ("b", "r2", "c")]);
        let q = ChainQuery {
            anchor: String::from("a"),
            hops: alloc::vec![fwd("r1"), fwd("r2")],
        };
        assert_eq!(resolve_chain(&kg, &q).unwrap(), "c");
    }

    #[test]
    fn inverse_hop_finds_headquartered_retailer() {
        let kg = kg_from(&[
            ("Lush Ltd.", "headquartered_in", "Poole"),
            ("The Lighthouse", "located_in", "Poole"),
        ]);
        let q = ChainQuery {
            anchor: String::from("Poole"),
            hops: alloc::vec![inv("headquartered_in")],
        };
        assert_eq!(resolve_chain(&kg, &q).unwrap(), "Lush Ltd.");
    }

    #[test]
    fn one_hop_equals_index_lookup() {
        let kg = kg_from(&[("a", "r1", "b")]);
        let q = ChainQuery {
            anchor: String::from("a"),
            hops: alloc::vec![fwd("r1")],
        };
        assert_eq!(
            resolve_chain(&kg, &q).unwrap(),
            kg.objects_of("a", "r1")[0].object
        );
    }

    #[test]
    fn zero_and_multi_match_hops_error() {
        let kg = kg_from(&[("a", "r", "b"), ("a", "r", "c")]);
        let ambiguous = ChainQuery {
            anchor: String::from("a"),
            hops: alloc::vec![fwd("r")],
        };
        assert!(matches!(
            resolve_chain(&kg, &ambiguous),
            Err(ResolveError::Ambiguous { hop: 0, .. })
        ));
        let missing = ChainQuery {
            anchor: String::from("a"),
            hops: alloc::vec![fwd("zzz")],
        };
        assert!(matches!(
            resolve_chain(&kg, &missing),
            Err(ResolveError::Unanswerable { hop: 0, .. })
        ));
    }
}
