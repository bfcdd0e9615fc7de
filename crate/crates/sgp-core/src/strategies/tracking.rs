//! Entity prediction over a dynamic graph: apply the event sequence, then
//! answer against the final snapshot.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamic::{DynamicError, DynamicSeries, Event};
use crate::graph::KnowledgeGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrackError {
    Dynamic(DynamicError),
    /// The query has no current value in the final snapshot.
    QueryUnanswered { entity: String, relation: String },
}

impl fmt::Display for TrackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackError::Dynamic(e) => write!(f, "{}", e),
            TrackError::QueryUnanswered { entity, relation } => {
                write!(f, "no current value for ({}, {})", entity, relation)
            }
        }
    }
}

crate::std_error!(TrackError);

impl From<DynamicError> for TrackError {
    fn from(e: DynamicError) -> Self {
        TrackError::Dynamic(e)
    }
}

/// Builds the snapshot series and answers `(entity, relation, ?)` against
/// the final snapshot. Returns the held object (display form).
pub fn track_dynamic(
    initial: &KnowledgeGraph,
    events: &[Event],
    query: (&str, &str),
) -> Result<String, TrackError> {
    let series = build_series(initial, events)?;
    answer_query(&series, query)
}

/// The series-building half of [`track_dynamic`], exposed so callers can
/// render per-step states.
pub fn build_series(
    initial: &KnowledgeGraph,
    events: &[Event],
) -> Result<DynamicSeries, TrackError> {
    let mut series = DynamicSeries::new(initial.clone());
    for event in events {
        series.apply_event(event.clone())?;
    }
    Ok(series)
}

pub fn answer_query(series: &DynamicSeries, query: (&str, &str)) -> Result<String, TrackError> {
    let (entity, relation) = query;
    let hits: Vec<_> = series.current().objects_of(entity, relation);
    match hits.first() {
        Some(t) if hits.len() == 1 => Ok(t.object.clone()),
        _ => Err(TrackError::QueryUnanswered {
            entity: String::from(entity),
            relation: String::from(relation),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::Triple;

    fn initial(rel: &str, pairs: &[(&str, &str)]) -> KnowledgeGraph {
        let mut kg = KnowledgeGraph::with_functional_relations([rel]);
        for (s, o) in pairs {
            kg.add_fact(Triple::new(s, rel, o).unwrap()).unwrap();
        }
        kg
    }

    fn swaps(rel: &str, pairs: &[(&str, &str)]) -> Vec<Event> {
        pairs
            .iter()
            .map(|(a, b)| Event::Swap {
                left: String::from(*a),
                right: String::from(*b),
                relation: String::from(rel),
            })
            .collect()
    }

    #[test]
    fn books_story_alice_ends_with_the_odyssey() {
        let kg = initial(
            "has_book",
            &[
                ("Alice", "Hound of the Baskervilles"),
                ("Bob", "The Pearl"),
                ("Claire", "The Odyssey"),
            ],
        );
        let events = swaps("has_book", &[("Bob", "Claire"), ("Claire", "Alice"), ("Bob", "Alice")]);
        assert_eq!(
            track_dynamic(&kg, &events, ("Alice", "has_book")).unwrap(),
            "The Odyssey"
        );
    }

    #[test]
    fn dancers_story_alice_ends_with_jamie() {
        let kg = initial(
            "is dancing with",
            &[("Alice", "Rodrigo"), ("Bob", "Jamie"), ("Claire", "Lola")],
        );
        let events = swaps(
            "is dancing with",
            &[("Claire", "Alice"), ("Bob", "Claire"), ("Claire", "Alice")],
        );
        assert_eq!(
            track_dynamic(&kg, &events, ("Alice", "is dancing with")).unwrap(),
            "Jamie"
        );
    }

    #[test]
    fn gift_story_bob_ends_with_blue() {
        let kg = initial(
            "has_gift",
            &[
                ("Alice", "yellow present"),
                ("Bob", "brown present"),
                ("Claire", "blue present"),
            ],
        );
        let events = swaps("has_gift", &[("Bob", "Alice"), ("Claire", "Alice"), ("Bob", "Alice")]);
        assert_eq!(
            track_dynamic(&kg, &events, ("Bob", "has_gift")).unwrap(),
            "blue present"
        );
    }

    #[test]
    fn zero_events_returns_initial_value() {
        let kg = initial("has_book", &[("Alice", "The Pearl")]);
        assert_eq!(
            track_dynamic(&kg, &[], ("Alice", "has_book")).unwrap(),
            "The Pearl"
        );
    }

    #[test]
    fn invalid_event_reports_step_index() {
        let kg = initial("has_book", &[("Alice", "The Pearl"), ("Bob", "The Odyssey")]);
        let events = swaps("has_book", &[("Alice", "Bob"), ("Alice", "Zed")]);
        let err = track_dynamic(&kg, &events, ("Alice", "has_book")).unwrap_err();
        assert!(
            matches!(err, TrackError::Dynamic(DynamicError::InvalidEvent { step: 1, .. })),
            "got {:?}",
            err
        );
    }
}
