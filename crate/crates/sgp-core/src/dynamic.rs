//! Dynamic snapshot series: a knowledge graph evolving over story timesteps.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::KnowledgeGraph;
use crate::triple::{canonical_relation, entity_key, Triple};

/// A state change applied between snapshots.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Event {
    /// Sets `(entity, relation, value)`, superseding a prior value when the
    /// relation is functional.
    Assign {
        entity: String,
        relation: String,
        value: String,
    },
    /// Exchanges the current objects the two entities hold under `relation`.
    Swap {
        left: String,
        right: String,
        relation: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DynamicError {
    /// The event could not be applied to the latest snapshot. `step` is the
    /// zero-based index of the offending event.
    InvalidEvent { step: usize, reason: String },
    Graph(crate::graph::GraphError),
}

impl fmt::Display for DynamicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicError::InvalidEvent { step, reason } => {
                write!(f, "invalid event at step {}: {}", step, reason)
            }
            DynamicError::Graph(e) => write!(f, "{}", e),
        }
    }
}

crate::std_error!(DynamicError);

impl From<crate::graph::GraphError> for DynamicError {
    fn from(e: crate::graph::GraphError) -> Self {
        DynamicError::Graph(e)
    }
}

/// Ordered snapshots plus the events applied between them.
/// Invariant: `snapshots.len() == events.len() + 1`.
#[derive(Debug, Clone, Default)]
pub struct DynamicSeries {
    snapshots: Vec<KnowledgeGraph>,
    events: Vec<Event>,
}

impl DynamicSeries {
    pub fn new(initial: KnowledgeGraph) -> Self {
        DynamicSeries {
            snapshots: alloc::vec![initial],
            events: Vec::new(),
        }
    }

    pub fn snapshots(&self) -> &[KnowledgeGraph] {
        &self.snapshots
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn current(&self) -> &KnowledgeGraph {
        self.snapshots.last().expect("series holds >= 1 snapshot")
    }

    /// Applies `event` to the latest snapshot and appends the result.
    pub fn apply_event(&mut self, event: Event) -> Result<(), DynamicError> {
        let step = self.events.len();
        let stamp = Some((step + 1) as u32);
        let mut next = self.current().clone();
        match &event {
            Event::Assign {
                entity,
                relation,
                value,
            } => {
                let triple = Triple::with_timestep(entity, relation, value, stamp)
                    .map_err(|e| DynamicError::InvalidEvent {
                        step,
                        reason: alloc::format!("{}", e),
                    })?;
                next.add_fact(triple)?;
            }
            Event::Swap {
                left,
                right,
                relation,
            } => {
                let left_t = Self::single_value(&next, left, relation, step)?;
                let right_t = Self::single_value(&next, right, relation, step)?;
                if entity_key(left) == entity_key(right) {
                    // Self-swap: snapshot unchanged.
                } else {
                    next.retract(&left_t);
                    next.retract(&right_t);
                    let a = Triple::with_timestep(left, relation, &right_t.object, stamp)
                        .expect("swap source triples were valid");
                    let b = Triple::with_timestep(right, relation, &left_t.object, stamp)
                        .expect("swap source triples were valid");
                    next.add_fact(a)?;
                    next.add_fact(b)?;
                }
            }
        }
        self.snapshots.push(next);
        self.events.push(event);
        Ok(())
    }

    fn single_value(
        kg: &KnowledgeGraph,
        entity: &str,
        relation: &str,
        step: usize,
    ) -> Result<Triple, DynamicError> {
        let matches = kg.objects_of(entity, relation);
        match matches.len() {
            1 => Ok(matches[0].clone()),
            0 => Err(DynamicError::InvalidEvent {
                step,
                reason: alloc::format!(
                    "{} holds no current value under '{}'",
                    entity,
                    canonical_relation(relation)
                ),
            }),
            n => Err(DynamicError::InvalidEvent {
                step,
                reason: alloc::format!(
                    "{} holds {} current values under '{}'",
                    entity,
                    n,
                    canonical_relation(relation)
                ),
            }),
        }
    }

    /// Recomputes every snapshot from the first and checks the recurrence
    /// `snapshots[t] == apply(snapshots[t-1], events[t-1])`.
    pub fn recurrence_holds(&self) -> bool {
        let mut replay = DynamicSeries::new(self.snapshots[0].clone());
        for e in &self.events {
            if replay.apply_event(e.clone()).is_err() {
                return false;
            }
        }
        replay
            .snapshots
            .iter()
            .zip(self.snapshots.iter())
            .all(|(a, b)| {
                let av: Vec<&Triple> = a.triples().collect();
                let bv: Vec<&Triple> = b.triples().collect();
                av == bv
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn books() -> KnowledgeGraph {
        let mut kg = KnowledgeGraph::with_functional_relations(["has_book"]);
        for (s, o) in [
            ("Alice", "Hound of the Baskervilles"),
            ("Bob", "The Pearl"),
            ("Claire", "The Odyssey"),
        ] {
            kg.add_fact(Triple::new(s, "has_book", o).unwrap()).unwrap();
        }
        kg
    }

    fn swap(a: &str, b: &str) -> Event {
        Event::Swap {
            left: a.into(),
            right: b.into(),
            relation: "has_book".into(),
        }
    }

    #[test]
    fn swap_exchanges_objects() {
        let mut series = DynamicSeries::new(books());
        series.apply_event(swap("Bob", "Claire")).unwrap();
        let kg = series.current();
        assert_eq!(kg.objects_of("Bob", "has book")[0].object, "The Odyssey");
        assert_eq!(kg.objects_of("Claire", "has book")[0].object, "The Pearl");
        assert!(series.recurrence_holds());
    }

    #[test]
    fn self_swap_is_identity() {
        let mut series = DynamicSeries::new(books());
        series.apply_event(swap("Bob", "Bob")).unwrap();
        let before: Vec<Triple> = series.snapshots()[0].triples().cloned().collect();
        let after: Vec<Triple> = series.current().triples().cloned().collect();
        assert_eq!(before, after);
    }

    #[test]
    fn swap_on_missing_value_fails_with_step() {
        let mut series = DynamicSeries::new(books());
        let err = series
            .apply_event(Event::Swap {
                left: "Alice".into(),
                right: "Bob".into(),
                relation: "has_gift".into(),
            })
            .unwrap_err();
        assert!(matches!(err, DynamicError::InvalidEvent { step: 0, .. }));
        assert_eq!(series.snapshots().len(), 1, "failed event appends nothing");
    }

    #[test]
    fn assign_supersedes_functional_value() {
        let mut kg = KnowledgeGraph::with_functional_relations(["has_gift"]);
        kg.add_fact(Triple::new("Bob", "has_gift", "yellow present").unwrap())
            .unwrap();
        let mut series = DynamicSeries::new(kg);
        series
            .apply_event(Event::Assign {
                entity: "Bob".into(),
                relation: "has_gift".into(),
                value: "blue present".into(),
            })
            .unwrap();
        let current = series.current().objects_of("Bob", "has gift");
        assert_eq!(current.len(), 1);
        assert_eq!(current[0].object, "blue present");
    }
}
