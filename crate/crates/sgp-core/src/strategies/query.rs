//! Graph query: select subjects meeting attribute criteria, then count,
//! list, or pick the extremum under a sort attribute.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::KnowledgeGraph;
use crate::triple::entity_key;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Comparator {
    Lt,
    Gt,
    Eq,
    Ne,
    Le,
    Ge,
}

impl Comparator {
    pub fn symbol(&self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Gt => ">",
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Conjunct {
    pub attribute: String,
    pub comparator: Comparator,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Projection {
    Count,
    Set,
    /// Last subject when sorted ascending by the attribute.
    ArgSortLast(String),
    ArgSortFirst(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterPredicate {
    pub conjuncts: Vec<Conjunct>,
    pub projection: Projection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryResult {
    Count(usize),
    Set(Vec<String>),
    Entity(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryError {
    MissingAttribute { subject: String, attribute: String },
    EmptySelection(String),
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::MissingAttribute { subject, attribute } => {
                write!(f, "subject '{}' has no attribute '{}'", subject, attribute)
            }
            QueryError::EmptySelection(what) => {
                write!(f, "no subject left to project '{}' over", what)
            }
        }
    }
}

crate::std_error!(QueryError);

/// Units stripped before deciding a literal is numeric.
pub const NUMERIC_UNITS: [&str; 2] = ["cm", "kg"];

/// Parses a literal as a decimal number, tolerating a trailing declared unit
/// ("11 kg" -> 11). Returns `None` when the string is not fully numeric.
pub fn numeric_value(raw: &str) -> Option<f64> {
    let mut s = raw.trim();
    for unit in NUMERIC_UNITS {
        if s.len() > unit.len() {
            let (head, tail) = s.split_at(s.len() - unit.len());
            if tail.eq_ignore_ascii_case(unit) && head.ends_with(char::is_whitespace) {
                s = head.trim_end();
                break;
            }
        }
    }
    s.parse::<f64>().ok()
}

fn compare(lhs: &str, cmp: Comparator, rhs: &str) -> bool {
    let ordering = match (numeric_value(lhs), numeric_value(rhs)) {
        (Some(a), Some(b)) => a.partial_cmp(&b),
        _ => Some(entity_key(lhs).cmp(&entity_key(rhs))),
    };
    let Some(ordering) = ordering else {
        return false;
    };
    match cmp {
        Comparator::Lt => ordering.is_lt(),
        Comparator::Gt => ordering.is_gt(),
        Comparator::Eq => ordering.is_eq(),
        Comparator::Ne => ordering.is_ne(),
        Comparator::Le => ordering.is_le(),
        Comparator::Ge => ordering.is_ge(),
    }
}

fn attribute_of<'a>(
    kg: &'a KnowledgeGraph,
    subject: &str,
    attribute: &str,
) -> Result<&'a str, QueryError> {
    // The newest assertion wins so queries see the final story state.
    kg.objects_of(subject, attribute)
        .last()
        .map(|t| t.object.as_str())
        .ok_or_else(|| QueryError::MissingAttribute {
            subject: String::from(subject),
            attribute: String::from(attribute),
        })
}

/// Evaluates the predicate over every subject of the graph, in first-seen
/// order. Every referenced attribute must exist on every candidate subject.
pub fn run_graph_query(kg: &KnowledgeGraph, p: &FilterPredicate) -> Result<QueryResult, QueryError> {
    let candidates: Vec<String> = kg
        .entities()
        .filter(|e| !kg.out_edges(e).is_empty())
        .map(String::from)
        .collect();

    let mut selected: Vec<String> = Vec::new();
    for subject in &candidates {
        let mut keep = true;
        for conjunct in &p.conjuncts {
            let value = attribute_of(kg, subject, &conjunct.attribute)?;
            if !compare(value, conjunct.comparator, &conjunct.value) {
                keep = false;
                break;
            }
        }
        if keep {
            selected.push(subject.clone());
        }
    }

    match &p.projection {
        Projection::Count => Ok(QueryResult::Count(selected.len())),
        Projection::Set => Ok(QueryResult::Set(selected)),
        Projection::ArgSortLast(attr) | Projection::ArgSortFirst(attr) => {
            let mut keyed: Vec<(usize, String, String)> = Vec::new();
            for (i, subject) in selected.iter().enumerate() {
                let value = attribute_of(kg, subject, attr)?;
                keyed.push((i, String::from(value), subject.clone()));
            }
            if keyed.is_empty() {
                return Err(QueryError::EmptySelection(attr.clone()));
            }
            // Stable ascending sort: numeric when both sides are numeric,
            // case-insensitive lexicographic otherwise.
            keyed.sort_by(|a, b| {
                match (numeric_value(&a.1), numeric_value(&b.1)) {
                    (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(core::cmp::Ordering::Equal),
                    _ => entity_key(&a.1).cmp(&entity_key(&b.1)),
                }
                .then(a.0.cmp(&b.0))
            });
            let pick = match &p.projection {
                Projection::ArgSortFirst(_) => keyed.first(),
                _ => keyed.last(),
            };
            Ok(QueryResult::Entity(pick.expect("non-empty").2.clone()))
        }
    }
}

impl fmt::Display for QueryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryResult::Count(n) => write!(f, "{}", n),
            QueryResult::Set(items) => write!(f, "{}", items.join(", ")),
            QueryResult::Entity(e) => write!(f, "{}", e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::Triple;

    /// The penguin table: name, age, height (cm), weight (kg).
    pub fn penguins() -> KnowledgeGraph {
        let rows = [
            ("Louis", "7", "50", "11"),
            ("Bernard", "5", "80", "13"),
            ("Vincent", "9", "60", "11"),
            ("Gwen", "8", "70", "15"),
        ];
        let mut kg = KnowledgeGraph::new();
        for (name, age, height, weight) in rows {
            for (attr, value) in [("name", name), ("age", age), ("height", height), ("weight", weight)] {
                kg.add_fact(Triple::new(name, attr, value).unwrap()).unwrap();
            }
        }
        kg
    }

    fn conj(attribute: &str, comparator: Comparator, value: &str) -> Conjunct {
        Conjunct {
            attribute: String::from(attribute),
            comparator,
            value: String::from(value),
        }
    }

    #[test]
    fn count_penguins_older_than_five() {
        let p = FilterPredicate {
            conjuncts: alloc::vec![conj("age", Comparator::Gt, "5")],
            projection: Projection::Count,
        };
        assert_eq!(run_graph_query(&penguins(), &p).unwrap(), QueryResult::Count(3));
    }

    #[test]
    fn count_young_heavy_penguins() {
        let p = FilterPredicate {
            conjuncts: alloc::vec![
                conj("age", Comparator::Lt, "8"),
                conj("weight", Comparator::Gt, "12"),
            ],
            projection: Projection::Count,
        };
        assert_eq!(run_graph_query(&penguins(), &p).unwrap(), QueryResult::Count(1));
    }

    #[test]
    fn last_penguin_alphabetically_is_vincent() {
        let p = FilterPredicate {
            conjuncts: alloc::vec![],
            projection: Projection::ArgSortLast(String::from("name")),
        };
        assert_eq!(
            run_graph_query(&penguins(), &p).unwrap(),
            QueryResult::Entity(String::from("Vincent"))
        );
    }

    #[test]
    fn empty_selection_counts_zero() {
        let p = FilterPredicate {
            conjuncts: alloc::vec![conj("age", Comparator::Gt, "100")],
            projection: Projection::Count,
        };
        assert_eq!(run_graph_query(&penguins(), &p).unwrap(), QueryResult::Count(0));
    }

    #[test]
    fn missing_attribute_is_reported() {
        let p = FilterPredicate {
            conjuncts: alloc::vec![conj("wingspan", Comparator::Gt, "1")],
            projection: Projection::Count,
        };
        assert!(matches!(
            run_graph_query(&penguins(), &p),
            Err(QueryError::MissingAttribute { .. })
        ));
    }

    #[test]
    fn unit_suffixes_parse_numerically() {
        assert_eq!(numeric_value("11 kg"), Some(11.0));
        assert_eq!(numeric_value("50 cm"), Some(50.0));
        assert_eq!(numeric_value("tall"), None);
        assert_eq!(numeric_value("5"), Some(5.0));
    }
}
