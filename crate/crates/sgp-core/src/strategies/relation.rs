//! Missing-relation inference: fold kinship composition along the shortest
//! path between two people.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Direction, GraphError, KnowledgeGraph, PathStep};
use crate::kinship::{compose_kinship, Gender, KinshipError, KinshipRelation};
use crate::triple::entity_key;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationError {
    Graph(GraphError),
    Kinship(KinshipError),
}

impl fmt::Display for RelationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationError::Graph(e) => write!(f, "{}", e),
            RelationError::Kinship(e) => write!(f, "{}", e),
        }
    }
}

crate::std_error!(RelationError);

impl From<GraphError> for RelationError {
    fn from(e: GraphError) -> Self {
        RelationError::Graph(e)
    }
}

impl From<KinshipError> for RelationError {
    fn from(e: KinshipError) -> Self {
        RelationError::Kinship(e)
    }
}

/// Genders stated anywhere in the graph: a triple `(A, sister, B)` reveals
/// that B is female. Pronouns are not consulted.
pub fn gender_map(kg: &KnowledgeGraph) -> BTreeMap<String, Gender> {
    let mut map = BTreeMap::new();
    for t in kg.triples().chain(kg.superseded()) {
        if let Ok(rel) = KinshipRelation::parse(&t.relation) {
            if rel.gender != Gender::Unknown {
                map.entry(t.object_key()).or_insert(rel.gender);
            }
        }
    }
    map
}

fn step_relation(
    step: &PathStep,
    genders: &BTreeMap<String, Gender>,
) -> Result<KinshipRelation, RelationError> {
    let stated = KinshipRelation::parse(&step.relation)?;
    let to_gender = genders
        .get(&entity_key(&step.to))
        .copied()
        .unwrap_or(Gender::Unknown);
    let rel = match step.direction {
        // (from, r, to): the label already describes `to`.
        Direction::Forward => stated,
        // (to, r, from): the label describes `from`; flip it around.
        Direction::Inverse => stated.invert(to_gender),
    };
    // A neutral stated label ("parent") can still be gendered by what the
    // rest of the story says about the person.
    Ok(if rel.gender == Gender::Unknown {
        KinshipRelation::new(rel.position, to_gender)
    } else {
        rel
    })
}

/// Infers the label L such that "s is the L of o", by composing kinship
/// relations along `find_path(kg, s, o)`.
pub fn infer_relation(
    kg: &KnowledgeGraph,
    s: &str,
    o: &str,
) -> Result<KinshipRelation, RelationError> {
    let (rel, _) = infer_relation_with_steps(kg, s, o)?;
    Ok(rel)
}

/// Like [`infer_relation`], also returning the composed relation after each
/// step ("o-side view": element k is the relation of the k-th path node to
/// `s`). Used for rendering derivations.
pub fn infer_relation_with_steps(
    kg: &KnowledgeGraph,
    s: &str,
    o: &str,
) -> Result<(KinshipRelation, Vec<(PathStep, KinshipRelation)>), RelationError> {
    let path = kg.find_path(s, o)?;
    let genders = gender_map(kg);
    let mut acc = KinshipRelation::IDENTITY;
    let mut trace = Vec::with_capacity(path.len());
    for step in path {
        let step_rel = step_relation(&step, &genders)?;
        acc = compose_kinship(acc, step_rel)?;
        trace.push((step, acc));
    }
    let s_gender = genders
        .get(&entity_key(s))
        .copied()
        .unwrap_or(Gender::Unknown);
    Ok((acc.invert(s_gender), trace))
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

    #[test]
    fn frameworks_story_seth_jeremy_is_cousin() {
        let kg = kg_from(&[
            ("Christian", "son", "Seth"),
            ("Christian", "brother", "Jonathan"),
            ("Jonathan", "sister", "Ruth"),
            ("Ruth", "daughter", "Stephanie"),
            ("Stephanie", "brother", "Jeremy"),
        ]);
        let path = kg.find_path("Seth", "Jeremy").unwrap();
        assert_eq!(path.len(), 5, "raw path spans five stated edges");
        let rel = infer_relation(&kg, "Seth", "Jeremy").unwrap();
        assert_eq!(rel.label(), "cousin");
    }

    #[test]
    fn appendix_story_laura_is_jonathans_mother() {
        let kg = kg_from(&[
            ("Seth", "wife", "Laura"),
            ("Rosa", "father", "Seth"),
            ("Rosa", "brother", "Jason"),
            ("Jonathan", "brother", "Christian"),
            ("Christian", "brother", "Jason"),
        ]);
        let rel = infer_relation(&kg, "Laura", "Jonathan").unwrap();
        assert_eq!(rel.label(), "mother");
    }

    #[test]
    fn appendix_story_stephanie_is_stephens_niece() {
        let kg = kg_from(&[
            ("Christian", "sister", "Ruth"),
            ("Christian", "father", "Seth"),
            ("Ruth", "daughter", "Stephanie"),
            ("Christian", "brother", "Stephen"),
        ]);
        let rel = infer_relation(&kg, "Stephanie", "Stephen").unwrap();
        assert_eq!(rel.label(), "niece");
    }

    #[test]
    fn one_hop_returns_inverse_of_stated_edge() {
        let kg = kg_from(&[("Christian", "hasSon", "Seth")]);
        let rel = infer_relation(&kg, "Seth", "Christian").unwrap();
        assert_eq!(rel.label(), "son");
    }

    #[test]
    fn non_kinship_edge_is_not_determinable() {
        let kg = kg_from(&[("Ann", "coworker", "Bea")]);
        assert!(matches!(
            infer_relation(&kg, "Ann", "Bea"),
            Err(RelationError::Kinship(KinshipError::NotKinship(_)))
        ));
    }
}
