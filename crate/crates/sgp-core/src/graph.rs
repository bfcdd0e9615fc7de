//! Indexed triple store with functional-relation supersession and path search.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::triple::{canonical_relation, entity_key, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    Forward,
    Inverse,
}

/// One hop of an undirected path. `from`/`to` follow traversal order; the
/// direction records which way the underlying edge points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    pub from: String,
    pub to: String,
    pub relation: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    Validation(crate::triple::TripleError),
    EntityNotFound(String),
    NoPath { from: String, to: String },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Validation(e) => write!(f, "invalid triple: {}", e),
            GraphError::EntityNotFound(name) => write!(f, "entity not found: {}", name),
            GraphError::NoPath { from, to } => write!(f, "no path between {} and {}", from, to),
        }
    }
}

crate::std_error!(GraphError);

impl From<crate::triple::TripleError> for GraphError {
    fn from(e: crate::triple::TripleError) -> Self {
        GraphError::Validation(e)
    }
}

#[derive(Debug, Clone)]
struct Entry {
    triple: Triple,
    alive: bool,
}

/// An ordered triple set with subject/object indexes. Relations declared
/// functional keep at most one current object per subject; superseded facts
/// stay in a provenance log so graph evolution can be replayed.
///
/// This is a value type: clone it to branch state. Shared read-only use
/// across threads is safe.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    entries: Vec<Entry>,
    out_index: BTreeMap<String, Vec<usize>>,
    in_index: BTreeMap<String, Vec<usize>>,
    functional: BTreeSet<String>,
    /// Entity keys in first-seen order, with the display form as first seen.
    entity_order: Vec<String>,
    display: BTreeMap<String, String>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_functional_relations<'a, I: IntoIterator<Item = &'a str>>(relations: I) -> Self {
        let mut kg = Self::new();
        for r in relations {
            kg.declare_functional(r);
        }
        kg
    }

    /// Declares a relation single-valued: a later assertion for the same
    /// subject supersedes the current one.
    pub fn declare_functional(&mut self, relation: &str) {
        self.functional.insert(canonical_relation(relation));
    }

    pub fn is_functional(&self, relation: &str) -> bool {
        self.functional.contains(&canonical_relation(relation))
    }

    pub fn functional_relations(&self) -> impl Iterator<Item = &str> {
        self.functional.iter().map(|s| s.as_str())
    }

    /// Inserts a fact. Re-adding an identical current triple is a no-op; for
    /// functional relations any prior `(subject, relation, *)` triple is
    /// moved to the provenance log first.
    pub fn add_fact(&mut self, triple: Triple) -> Result<(), GraphError> {
        // Re-validate: fields are public, so the triple may not have come
        // through `Triple::new`.
        let triple = Triple::with_timestep(
            &triple.subject,
            &triple.relation,
            &triple.object,
            triple.timestep,
        )?;
        if self.contains(&triple) {
            return Ok(());
        }
        if self.functional.contains(&triple.relation) {
            let skey = triple.subject_key();
            let ids: Vec<usize> = self.alive_out(&skey).collect();
            for id in ids {
                if self.entries[id].triple.relation == triple.relation {
                    self.entries[id].alive = false;
                }
            }
        }
        self.insert_entry(triple);
        Ok(())
    }

    /// Removes a current fact (moving it to the provenance log). Returns
    /// whether anything matched.
    pub fn retract(&mut self, triple: &Triple) -> bool {
        let mut hit = false;
        for entry in &mut self.entries {
            if entry.alive && entry.triple == *triple {
                entry.alive = false;
                hit = true;
            }
        }
        hit
    }

    fn insert_entry(&mut self, triple: Triple) {
        let id = self.entries.len();
        let skey = triple.subject_key();
        let okey = triple.object_key();
        self.record_entity(&skey, &triple.subject);
        if !okey.is_empty() {
            self.record_entity(&okey, &triple.object);
        }
        self.out_index.entry(skey).or_default().push(id);
        self.in_index.entry(okey).or_default().push(id);
        self.entries.push(Entry { triple, alive: true });
    }

    fn record_entity(&mut self, key: &str, display: &str) {
        if !self.display.contains_key(key) {
            self.display.insert(String::from(key), String::from(display));
            self.entity_order.push(String::from(key));
        }
    }

    fn alive_out<'a>(&'a self, key: &str) -> impl Iterator<Item = usize> + 'a {
        self.out_index
            .get(key)
            .into_iter()
            .flatten()
            .copied()
            .filter(move |&id| self.entries[id].alive)
    }

    fn alive_in<'a>(&'a self, key: &str) -> impl Iterator<Item = usize> + 'a {
        self.in_index
            .get(key)
            .into_iter()
            .flatten()
            .copied()
            .filter(move |&id| self.entries[id].alive)
    }

    /// Current triples in insertion order.
    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.entries.iter().filter(|e| e.alive).map(|e| &e.triple)
    }

    /// Superseded triples, oldest first.
    pub fn superseded(&self) -> impl Iterator<Item = &Triple> {
        self.entries.iter().filter(|e| !e.alive).map(|e| &e.triple)
    }

    pub fn len(&self) -> usize {
        self.triples().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.alive_out(&triple.subject_key())
            .any(|id| self.entries[id].triple == *triple)
    }

    pub fn has_entity(&self, name: &str) -> bool {
        self.display.contains_key(&entity_key(name))
    }

    /// Display form (first-seen casing) of an entity, if present.
    pub fn display_name(&self, name: &str) -> Option<&str> {
        self.display.get(&entity_key(name)).map(|s| s.as_str())
    }

    /// Entity display names in first-seen order.
    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.entity_order.iter().map(|k| self.display[k].as_str())
    }

    pub fn out_edges(&self, entity: &str) -> Vec<&Triple> {
        self.alive_out(&entity_key(entity))
            .map(|id| &self.entries[id].triple)
            .collect()
    }

    pub fn in_edges(&self, entity: &str) -> Vec<&Triple> {
        self.alive_in(&entity_key(entity))
            .map(|id| &self.entries[id].triple)
            .collect()
    }

    /// Current triples `(subject, relation, *)`.
    pub fn objects_of(&self, subject: &str, relation: &str) -> Vec<&Triple> {
        let relation = canonical_relation(relation);
        self.alive_out(&entity_key(subject))
            .map(|id| &self.entries[id].triple)
            .filter(|t| t.relation == relation)
            .collect()
    }

    /// Current triples `(*, relation, object)`.
    pub fn subjects_with(&self, relation: &str, object: &str) -> Vec<&Triple> {
        let relation = canonical_relation(relation);
        self.alive_in(&entity_key(object))
            .map(|id| &self.entries[id].triple)
            .filter(|t| t.relation == relation)
            .collect()
    }

    /// Shortest undirected path from `s` to `o`, edges traversable both ways
    /// with the direction recorded. Ties are broken by edge insertion order.
    /// Returns the empty path iff `s == o`.
    pub fn find_path(&self, s: &str, o: &str) -> Result<Vec<PathStep>, GraphError> {
        let start = entity_key(s);
        let goal = entity_key(o);
        if !self.display.contains_key(&start) {
            return Err(GraphError::EntityNotFound(String::from(s)));
        }
        if !self.display.contains_key(&goal) {
            return Err(GraphError::EntityNotFound(String::from(o)));
        }
        if start == goal {
            return Ok(Vec::new());
        }

        // BFS; neighbors visited in entry-id order so the first discovered
        // parent is the earliest-inserted edge.
        let mut parent: BTreeMap<String, (String, usize, Direction)> = BTreeMap::new();
        let mut visited: BTreeSet<String> = BTreeSet::new();
        visited.insert(start.clone());
        let mut frontier: Vec<String> = alloc::vec![start.clone()];
        'bfs: while !frontier.is_empty() {
            let mut next: Vec<String> = Vec::new();
            for node in &frontier {
                let mut hops: Vec<(usize, String, Direction)> = Vec::new();
                for id in self.alive_out(node) {
                    hops.push((id, self.entries[id].triple.object_key(), Direction::Forward));
                }
                for id in self.alive_in(node) {
                    hops.push((id, self.entries[id].triple.subject_key(), Direction::Inverse));
                }
                hops.sort_by_key(|(id, _, _)| *id);
                for (id, nbr, dir) in hops {
                    if nbr.is_empty() || visited.contains(&nbr) {
                        continue;
                    }
                    visited.insert(nbr.clone());
                    parent.insert(nbr.clone(), (node.clone(), id, dir));
                    if nbr == goal {
                        break 'bfs;
                    }
                    next.push(nbr);
                }
            }
            frontier = next;
        }

        if !parent.contains_key(&goal) {
            return Err(GraphError::NoPath {
                from: String::from(s),
                to: String::from(o),
            });
        }
        let mut steps: Vec<PathStep> = Vec::new();
        let mut cursor = goal;
        while cursor != start {
            let (prev, id, dir) = parent[&cursor].clone();
            let triple = &self.entries[id].triple;
            steps.push(PathStep {
                from: self.display[&prev].clone(),
                to: self.display[&cursor].clone(),
                relation: triple.relation.clone(),
                direction: dir,
            });
            cursor = prev;
        }
        steps.reverse();
        Ok(steps)
    }

    /// Checks that out/in indexes exactly mirror the entry list. Exposed for
    /// property tests.
    pub fn index_consistent(&self) -> bool {
        for (id, entry) in self.entries.iter().enumerate() {
            let skey = entry.triple.subject_key();
            let okey = entry.triple.object_key();
            if !self.out_index.get(&skey).is_some_and(|v| v.contains(&id)) {
                return false;
            }
            if !self.in_index.get(&okey).is_some_and(|v| v.contains(&id)) {
                return false;
            }
        }
        for (key, ids) in self.out_index.iter() {
            for &id in ids {
                if self.entries[id].triple.subject_key() != *key {
                    return false;
                }
            }
        }
        for (key, ids) in self.in_index.iter() {
            for &id in ids {
                if self.entries[id].triple.object_key() != *key {
                    return false;
                }
            }
        }
        // Functional supersession: at most one current object per subject.
        for rel in &self.functional {
            let mut seen: BTreeSet<String> = BTreeSet::new();
            for t in self.triples() {
                if &t.relation == rel && !seen.insert(t.subject_key()) {
                    return false;
                }
            }
        }
        true
    }
}

impl FromIterator<Triple> for KnowledgeGraph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut kg = KnowledgeGraph::new();
        for t in iter {
            let _ = kg.add_fact(t);
        }
        kg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, r: &str, o: &str) -> Triple {
        Triple::new(s, r, o).unwrap()
    }

    #[test]
    fn add_fact_indexes_and_dedupes() {
        let mut kg = KnowledgeGraph::new();
        kg.add_fact(t("Alice", "has_book", "Hound of the Baskervilles")).unwrap();
        assert_eq!(kg.len(), 1);
        kg.add_fact(t("alice", "has book", "hound of the baskervilles")).unwrap();
        assert_eq!(kg.len(), 1, "identical triple is idempotent");
        assert!(kg.index_consistent());
    }

    #[test]
    fn functional_supersession_keeps_provenance() {
        let mut kg = KnowledgeGraph::with_functional_relations(["has_book"]);
        kg.add_fact(t("Alice", "has_book", "Hound of the Baskervilles")).unwrap();
        kg.add_fact(t("Alice", "has_book", "The Pearl")).unwrap();
        let current = kg.objects_of("Alice", "has book");
        assert_eq!(current.len(), 1);
        assert_eq!(current[0].object, "The Pearl");
        assert_eq!(kg.superseded().count(), 1);
        assert!(kg.index_consistent());
    }

    #[test]
    fn find_path_identity_and_errors() {
        let mut kg = KnowledgeGraph::new();
        kg.add_fact(t("Seth", "wife", "Laura")).unwrap();
        kg.add_fact(t("Rosa", "father", "Seth")).unwrap();
        kg.add_fact(t("Ann", "friend", "Bea")).unwrap();
        assert_eq!(kg.find_path("Seth", "Seth").unwrap(), alloc::vec![]);
        assert!(matches!(
            kg.find_path("Seth", "Zed"),
            Err(GraphError::EntityNotFound(_))
        ));
        assert!(matches!(
            kg.find_path("Seth", "Ann"),
            Err(GraphError::NoPath { .. })
        ));
    }

    #[test]
    fn find_path_records_direction() {
        let mut kg = KnowledgeGraph::new();
        kg.add_fact(t("Christian", "son", "Seth")).unwrap();
        kg.add_fact(t("Christian", "brother", "Jonathan")).unwrap();
        let path = kg.find_path("Seth", "Jonathan").unwrap();
        assert_eq!(path.len(), 2);
        assert_eq!(path[0].direction, Direction::Inverse);
        assert_eq!(path[0].to, "Christian");
        assert_eq!(path[1].direction, Direction::Forward);
        assert_eq!(path[1].to, "Jonathan");
    }
}
