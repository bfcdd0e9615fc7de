//! Where to look, inside a transcript, for the fact that should back the
//! stated conclusion. Shared by the mock oracle (which emits that fact) and
//! the evaluator (which audits against it).

use sgp_core::strategies::{Projection, Term};
use sgp_core::textgraph::AuditQuery;
use sgp_core::{StructuredForm, TaskInstance};

/// Subject under which a query transcript records its match count or set.
pub const CRITERIA_SUBJECT: &str = "criteria matches";
pub const CRITERIA_TOTAL: &str = "total";
pub const CRITERIA_SET: &str = "set";
/// Subject under which a query transcript records sort extremes.
pub const SORTED_SUBJECT: &str = "sorted order";
pub const SORTED_LAST: &str = "last";
pub const SORTED_FIRST: &str = "first";
/// Subject/relation under which a chain transcript records its answer.
pub const CHAIN_ANSWER_SUBJECT: &str = "final answer";
pub const CHAIN_ANSWER_RELATION: &str = "is";
/// Relation under which a sorting transcript records 1-based positions.
pub const POSITION_RELATION: &str = "position";

/// The triple pattern whose last occurrence in a transcript is that
/// transcript's derived answer. `None` when the instance carries no
/// structured form (nothing to audit against).
pub fn audit_query_for(instance: &TaskInstance) -> Option<AuditQuery> {
    match instance.structured.as_ref()? {
        StructuredForm::Relation { subject, object, .. } => {
            // The answer fact is oriented "subject is the <L> of object".
            Some(AuditQuery::relation_between(object, subject))
        }
        StructuredForm::Dynamic {
            query_entity,
            query_relation,
            ..
        } => Some(AuditQuery::object_of(query_entity, query_relation)),
        StructuredForm::Chain { .. } => Some(AuditQuery::object_of(
            CHAIN_ANSWER_SUBJECT,
            CHAIN_ANSWER_RELATION,
        )),
        StructuredForm::Sorting { claims, .. } => {
            let position = claims.first()?.position;
            Some(AuditQuery::subject_of(
                POSITION_RELATION,
                &position.to_string(),
            ))
        }
        StructuredForm::Query { predicate, .. } => Some(match &predicate.projection {
            Projection::Count => AuditQuery::object_of(CRITERIA_SUBJECT, CRITERIA_TOTAL),
            Projection::Set => AuditQuery::object_of(CRITERIA_SUBJECT, CRITERIA_SET),
            Projection::ArgSortLast(_) => AuditQuery::object_of(SORTED_SUBJECT, SORTED_LAST),
            Projection::ArgSortFirst(_) => AuditQuery::object_of(SORTED_SUBJECT, SORTED_FIRST),
        }),
        StructuredForm::Inference { goal, .. } => {
            let slot = |t: &Term| match t {
                Term::Var(_) => None,
                Term::Const(c) => Some(c.clone()),
            };
            let (s, r, o) = (slot(&goal.subject), slot(&goal.relation), slot(&goal.object));
            let open = [&s, &r, &o].iter().filter(|x| x.is_none()).count();
            if open != 1 {
                return None;
            }
            Some(AuditQuery {
                subject: s,
                relation: r,
                object: o,
            })
        }
    }
}

/// Letter-to-text table the audit uses to resolve a stated option letter.
/// Sorting options resolve to the object their claim names, so the letter
/// can be compared against the object found at the asked position.
pub fn audit_options_for(instance: &TaskInstance) -> Vec<(char, String)> {
    if let Some(StructuredForm::Sorting { claims, .. }) = instance.structured.as_ref() {
        if !claims.is_empty() {
            return claims
                .iter()
                .map(|c| (c.letter, c.object.clone()))
                .collect();
        }
    }
    instance.options.clone()
}
