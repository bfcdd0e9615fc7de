//! Graph sorting: recover the unique total order implied by positional
//! constraints, or report why none (or more than one) exists.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::triple::entity_key;

/// Positional constraint over a fixed object set. Indices are 0-based from
/// the "left" (left = cheapest / first / oldest end of the order).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum OrderConstraint {
    /// `a` is anywhere left of `b`.
    LeftOf(String, String),
    /// `a` is anywhere right of `b`.
    RightOf(String, String),
    Leftmost(String),
    Rightmost(String),
    AtPosition(String, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SortError {
    UnknownObject(String),
    /// A binary constraint relates an object to itself, or an index is out
    /// of range.
    Invalid(String),
    /// No order satisfies the constraints.
    Inconsistent,
    /// More than one order satisfies the constraints; a sample of valid
    /// orders is reported.
    Underdetermined { candidates: Vec<Vec<String>> },
}

impl fmt::Display for SortError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortError::UnknownObject(o) => write!(f, "constraint mentions unknown object '{}'", o),
            SortError::Invalid(msg) => write!(f, "invalid constraint: {}", msg),
            SortError::Inconsistent => write!(f, "constraints admit no order"),
            SortError::Underdetermined { candidates } => {
                write!(f, "constraints admit {} or more orders", candidates.len())
            }
        }
    }
}

crate::std_error!(SortError);

const CANDIDATE_REPORT_LIMIT: usize = 8;

struct Solver<'a> {
    names: &'a [String],
    /// before[a] holds objects that must come before a.
    befores: Vec<Vec<usize>>,
    pinned: Vec<Option<usize>>,
    n: usize,
}

impl<'a> Solver<'a> {
    /// Depth-first position assignment, pruning on pins and order edges;
    /// collects up to `limit` full orders.
    fn search(&self, placed: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<String>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        let idx = placed.len();
        if idx == self.n {
            out.push(placed.iter().map(|&i| self.names[i].clone()).collect());
            return;
        }
        for cand in 0..self.n {
            if used[cand] {
                continue;
            }
            if let Some(p) = self.pinned[cand] {
                if p != idx {
                    continue;
                }
            }
            if self.pinned.iter().enumerate().any(|(o, &pin)| {
                o != cand && !used[o] && pin == Some(idx)
            }) {
                continue; // the slot is reserved for a different object
            }
            if self.befores[cand].iter().any(|&b| !used[b]) {
                continue; // a required predecessor is not yet placed
            }
            used[cand] = true;
            placed.push(cand);
            self.search(placed, used, out, limit);
            placed.pop();
            used[cand] = false;
            if out.len() >= limit {
                return;
            }
        }
    }
}

/// Returns the unique total order (index 0 = leftmost) satisfying every
/// constraint, erroring if the constraints are contradictory or leave the
/// order underdetermined.
pub fn sort_order(
    objects: &[String],
    constraints: &[OrderConstraint],
) -> Result<Vec<String>, SortError> {
    let n = objects.len();
    let index_of = |name: &str| -> Result<usize, SortError> {
        objects
            .iter()
            .position(|o| entity_key(o) == entity_key(name))
            .ok_or_else(|| SortError::UnknownObject(String::from(name)))
    };

    let mut befores: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    let mut pinned: Vec<Option<usize>> = alloc::vec![None; n];
    let pin = |slot: &mut Option<usize>, pos: usize| -> Result<(), SortError> {
        match slot {
            Some(existing) if *existing != pos => Err(SortError::Inconsistent),
            _ => {
                *slot = Some(pos);
                Ok(())
            }
        }
    };
    for c in constraints {
        match c {
            OrderConstraint::LeftOf(a, b) | OrderConstraint::RightOf(b, a) => {
                let (ai, bi) = (index_of(a)?, index_of(b)?);
                if ai == bi {
                    return Err(SortError::Invalid(alloc::format!(
                        "'{}' cannot be ordered against itself",
                        a
                    )));
                }
                befores[bi].push(ai);
            }
            OrderConstraint::Leftmost(a) => {
                let ai = index_of(a)?;
                pin(&mut pinned[ai], 0)?;
            }
            OrderConstraint::Rightmost(a) => {
                let ai = index_of(a)?;
                pin(&mut pinned[ai], n.saturating_sub(1))?;
            }
            OrderConstraint::AtPosition(a, pos) => {
                if *pos >= n {
                    return Err(SortError::Invalid(alloc::format!(
                        "position {} out of range for {} objects",
                        pos,
                        n
                    )));
                }
                let ai = index_of(a)?;
                pin(&mut pinned[ai], *pos)?;
            }
        }
    }
    // Two different objects pinned to the same slot can never both fit.
    let mut pin_slots: BTreeSet<usize> = BTreeSet::new();
    for pos in pinned.iter().flatten() {
        if !pin_slots.insert(*pos) {
            return Err(SortError::Inconsistent);
        }
    }

    let solver = Solver {
        names: objects,
        befores,
        pinned,
        n,
    };
    let mut out = Vec::new();
    solver.search(&mut Vec::new(), &mut alloc::vec![false; n], &mut out, CANDIDATE_REPORT_LIMIT);
    match out.len() {
        0 => Err(SortError::Inconsistent),
        1 => Ok(out.remove(0)),
        _ => Err(SortError::Underdetermined { candidates: out }),
    }
}

/// 1-based position lookup: "second from the left" is `position 2`.
pub fn object_at(order: &[String], position_from_left: usize) -> Option<&str> {
    position_from_left
        .checked_sub(1)
        .and_then(|i| order.get(i))
        .map(|s| s.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objs(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| String::from(*s)).collect()
    }

    #[test]
    fn birds_raven_is_second_from_left() {
        let objects = objs(&["falcon", "owl", "raven"]);
        let order = sort_order(
            &objects,
            &[
                OrderConstraint::Leftmost("falcon".into()),
                OrderConstraint::LeftOf("raven".into(), "owl".into()),
            ],
        )
        .unwrap();
        assert_eq!(order, objs(&["falcon", "raven", "owl"]));
        assert_eq!(object_at(&order, 2), Some("raven"));
    }

    #[test]
    fn fruits_mangoes_are_second_most_expensive() {
        // Cheapest end is index 0; "most expensive" is the right end.
        let objects = objs(&["peaches", "pears", "mangoes"]);
        let order = sort_order(
            &objects,
            &[
                OrderConstraint::LeftOf("mangoes".into(), "pears".into()),
                OrderConstraint::Leftmost("peaches".into()),
            ],
        )
        .unwrap();
        assert_eq!(order, objs(&["peaches", "mangoes", "pears"]));
        let second_most_expensive = object_at(&order, order.len() - 1).unwrap();
        assert_eq!(second_most_expensive, "mangoes");
    }

    #[test]
    fn quail_bluejay_falcon_from_right_of_constraints() {
        // Exactly one of the six permutations satisfies both statements.
        let objects = objs(&["blue jay", "quail", "falcon"]);
        let order = sort_order(
            &objects,
            &[
                OrderConstraint::RightOf("falcon".into(), "blue jay".into()),
                OrderConstraint::RightOf("blue jay".into(), "quail".into()),
            ],
        )
        .unwrap();
        assert_eq!(order, objs(&["quail", "blue jay", "falcon"]));
        assert_eq!(object_at(&order, 2), Some("blue jay"));
    }

    #[test]
    fn single_object_no_constraints() {
        let objects = objs(&["owl"]);
        assert_eq!(sort_order(&objects, &[]).unwrap(), objs(&["owl"]));
    }

    #[test]
    fn cycle_is_inconsistent() {
        let objects = objs(&["a", "b"]);
        let err = sort_order(
            &objects,
            &[
                OrderConstraint::LeftOf("a".into(), "b".into()),
                OrderConstraint::LeftOf("b".into(), "a".into()),
            ],
        )
        .unwrap_err();
        assert_eq!(err, SortError::Inconsistent);
    }

    #[test]
    fn missing_constraints_are_underdetermined() {
        let objects = objs(&["a", "b", "c"]);
        let err = sort_order(&objects, &[OrderConstraint::Leftmost("a".into())]).unwrap_err();
        match err {
            SortError::Underdetermined { candidates } => assert_eq!(candidates.len(), 2),
            other => panic!("expected Underdetermined, got {:?}", other),
        }
    }
}
