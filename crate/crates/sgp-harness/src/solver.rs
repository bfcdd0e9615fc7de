//! Runs the deterministic strategy for an instance's structured form and
//! renders the derivation as a transcript: numbered blocks of triples,
//! per-step updates, and a closing answer fact. Used by the mock oracle and
//! by the `solve` CLI commands.

use std::fmt::Write as _;

use sgp_core::strategies::{
    forward_chain, resolve_chain, run_graph_query, sort_order, ChainQuery, FilterPredicate,
    Projection, QueryResult, Rule, DEFAULT_FIRING_BUDGET,
};
use sgp_core::strategies::relation::infer_relation_with_steps;
use sgp_core::strategies::tracking::{answer_query, build_series};
use sgp_core::textgraph::normalize_answer;
use sgp_core::{Direction, Event, KnowledgeGraph, StructuredForm, TaskInstance, Triple};

use crate::audit;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("instance has no structured form attached")]
    NoStructuredForm,
    #[error("strategy failed: {0}")]
    Strategy(String),
    #[error("answer '{answer}' does not match any option")]
    NoMatchingOption { answer: String },
}

/// A solved instance: the canonical answer, the option letter it maps to
/// (when the instance has options), and the rendered derivation.
#[derive(Debug, Clone)]
pub struct Solved {
    pub answer_text: String,
    pub option_letter: Option<char>,
    /// Transcript body ending in the answer fact; no conclusion line yet.
    pub body: String,
    /// The fact that backs the conclusion, already the body's last bullet.
    pub answer_fact: Triple,
}

fn strategy_err(e: impl std::fmt::Display) -> SolveError {
    SolveError::Strategy(e.to_string())
}

fn graph_from(triples: &[Triple], functional: &[String]) -> KnowledgeGraph {
    let mut kg = KnowledgeGraph::new();
    for f in functional {
        kg.declare_functional(f);
    }
    for t in triples {
        let _ = kg.add_fact(t.clone());
    }
    kg
}

fn opening_line(body: &mut String) {
    body.push_str(
        "Let's create the knowledge graph by extracting facts from each sentence in the story.\n",
    );
}

fn fact_blocks(body: &mut String, triples: &[Triple]) {
    for (i, t) in triples.iter().enumerate() {
        let _ = write!(body, "\n{}. ({}, {}, {})\n", i + 1, t.subject, t.relation, t.object);
    }
}

fn answer_bullet(body: &mut String, fact: &Triple) {
    let _ = write!(body, "\n- ({}, {}, {})\n", fact.subject, fact.relation, fact.object);
}

fn resolve_option(instance: &TaskInstance, answer: &str) -> Option<char> {
    let want = normalize_answer(answer);
    instance
        .options
        .iter()
        .find(|(_, text)| normalize_answer(text) == want)
        .map(|(letter, _)| *letter)
}

/// Runs the strategy matching the instance's structured form.
pub fn solve_instance(instance: &TaskInstance) -> Result<Solved, SolveError> {
    let structured = instance
        .structured
        .as_ref()
        .ok_or(SolveError::NoStructuredForm)?;
    match structured {
        StructuredForm::Relation {
            triples,
            subject,
            object,
        } => solve_relation(instance, triples, subject, object),
        StructuredForm::Dynamic {
            initial,
            functional,
            events,
            query_entity,
            query_relation,
        } => solve_dynamic(instance, initial, functional, events, query_entity, query_relation),
        StructuredForm::Chain { triples, chain } => solve_chain(instance, triples, chain),
        StructuredForm::Sorting {
            objects,
            constraints,
            claims,
        } => solve_sorting(instance, objects, constraints, claims),
        StructuredForm::Query { rows, predicate } => solve_query(instance, rows, predicate),
        StructuredForm::Inference { facts, rules, goal } => {
            solve_inference(instance, facts, rules, goal)
        }
    }
}

fn finish(
    instance: &TaskInstance,
    answer_text: String,
    explicit_letter: Option<char>,
    mut body: String,
    answer_fact: Triple,
) -> Result<Solved, SolveError> {
    answer_bullet(&mut body, &answer_fact);
    let option_letter = match explicit_letter {
        Some(l) => Some(l),
        None if instance.options.is_empty() => None,
        None => Some(resolve_option(instance, &answer_text).ok_or_else(|| {
            SolveError::NoMatchingOption {
                answer: answer_text.clone(),
            }
        })?),
    };
    Ok(Solved {
        answer_text,
        option_letter,
        body,
        answer_fact,
    })
}

fn solve_relation(
    instance: &TaskInstance,
    triples: &[Triple],
    subject: &str,
    object: &str,
) -> Result<Solved, SolveError> {
    let kg = graph_from(triples, &[]);
    let (rel, trace) = infer_relation_with_steps(&kg, subject, object).map_err(strategy_err)?;
    let mut body = String::new();
    opening_line(&mut body);
    fact_blocks(&mut body, triples);
    let _ = write!(
        body,
        "\nNow, trace a path from {} to {}, expanding the most relevant facts step by step.\n\n",
        subject, object
    );
    for (i, (step, acc)) in trace.iter().enumerate() {
        let _ = writeln!(
            body,
            "Step {}: via {} we have ({}, {}, {}).",
            i + 1,
            step.to,
            subject,
            acc.label(),
            step.to
        );
    }
    let label = rel.label().to_string();
    let fact = Triple::new(object, &label, subject).map_err(strategy_err)?;
    finish(instance, label, None, body, fact)
}

fn solve_dynamic(
    instance: &TaskInstance,
    initial: &[Triple],
    functional: &[String],
    events: &[Event],
    query_entity: &str,
    query_relation: &str,
) -> Result<Solved, SolveError> {
    let kg = graph_from(initial, functional);
    let series = build_series(&kg, events).map_err(strategy_err)?;
    let answer = answer_query(&series, (query_entity, query_relation)).map_err(strategy_err)?;

    let mut body = String::new();
    body.push_str(
        "Let's create the knowledge graph by extracting facts from each sentence in the story. \
         The graph should evolve as the story progresses.\n",
    );
    body.push_str("\n1. At the start of the story:\n");
    for t in initial {
        let _ = write!(body, "\n   - ({}, {}, {})\n", t.subject, t.relation, t.object);
    }
    for (i, event) in events.iter().enumerate() {
        let after = &series.snapshots()[i + 1];
        match event {
            Event::Swap { left, right, relation } => {
                let _ = write!(body, "\n{}. Then, {} and {} swap.\n", i + 2, left, right);
                for who in [left, right] {
                    for t in after.objects_of(who, relation) {
                        let _ = write!(body, "\n   - ({}, {}, {})\n", t.subject, t.relation, t.object);
                    }
                }
            }
            Event::Assign { entity, relation, .. } => {
                let _ = write!(body, "\n{}. Then, {} changes.\n", i + 2, entity);
                for t in after.objects_of(entity, relation) {
                    let _ = write!(body, "\n   - ({}, {}, {})\n", t.subject, t.relation, t.object);
                }
            }
        }
    }
    let _ = write!(
        body,
        "\nSo, at the end of the story: ({}, {}, {}).\n",
        query_entity, query_relation, answer
    );
    let fact = Triple::new(query_entity, query_relation, &answer).map_err(strategy_err)?;
    finish(instance, answer, None, body, fact)
}

fn solve_chain(
    instance: &TaskInstance,
    triples: &[Triple],
    chain: &ChainQuery,
) -> Result<Solved, SolveError> {
    let kg = graph_from(triples, &[]);
    let answer = resolve_chain(&kg, chain).map_err(strategy_err)?;
    let mut body = String::new();
    opening_line(&mut body);
    fact_blocks(&mut body, triples);
    body.push_str("\nDecompose the question into sub-questions and answer them in order.\n\n");
    let mut at = chain.anchor.clone();
    for (i, hop) in chain.hops.iter().enumerate() {
        let via = match hop.direction {
            Direction::Forward => format!("'{}'", hop.relation),
            Direction::Inverse => format!("inverse '{}'", hop.relation),
        };
        // Replay hop-by-hop for the narration.
        let partial = ChainQuery {
            anchor: chain.anchor.clone(),
            hops: chain.hops[..=i].to_vec(),
        };
        let reached = resolve_chain(&kg, &partial).map_err(strategy_err)?;
        let _ = writeln!(body, "Step {}: from {} via {} we reach {}.", i + 1, at, via, reached);
        at = reached;
    }
    let fact = Triple::new(audit::CHAIN_ANSWER_SUBJECT, audit::CHAIN_ANSWER_RELATION, &answer)
        .map_err(strategy_err)?;
    finish(instance, answer, None, body, fact)
}

fn solve_sorting(
    instance: &TaskInstance,
    objects: &[String],
    constraints: &[sgp_core::strategies::OrderConstraint],
    claims: &[sgp_core::instance::SortClaim],
) -> Result<Solved, SolveError> {
    let order = sort_order(objects, constraints).map_err(strategy_err)?;
    let mut body = String::new();
    opening_line(&mut body);
    let position_facts: Vec<Triple> = order
        .iter()
        .enumerate()
        .map(|(i, obj)| Triple::new(obj, audit::POSITION_RELATION, &(i + 1).to_string()))
        .collect::<Result<_, _>>()
        .map_err(strategy_err)?;
    fact_blocks(&mut body, &position_facts);
    let _ = write!(body, "\nSorted from left to right: {}.\n", order.join(", "));

    // Which claim does the computed order make true?
    let holder = |position: usize| -> Option<&String> { order.get(position.checked_sub(1)?) };
    let (letter, answer_fact) = if claims.is_empty() {
        (None, position_facts.last().cloned().expect("non-empty order"))
    } else {
        let claim = claims
            .iter()
            .find(|c| {
                holder(c.position)
                    .is_some_and(|obj| normalize_answer(obj) == normalize_answer(&c.object))
            })
            .ok_or_else(|| SolveError::NoMatchingOption {
                answer: order.join(", "),
            })?;
        let fact = Triple::new(&claim.object, audit::POSITION_RELATION, &claim.position.to_string())
            .map_err(strategy_err)?;
        (Some(claim.letter), fact)
    };
    let answer_text = answer_fact.subject.clone();
    finish(instance, answer_text, letter, body, answer_fact)
}

fn solve_query(
    instance: &TaskInstance,
    rows: &[Triple],
    predicate: &FilterPredicate,
) -> Result<Solved, SolveError> {
    let kg = graph_from(rows, &[]);
    let result = run_graph_query(&kg, predicate).map_err(strategy_err)?;

    let mut body = String::new();
    opening_line(&mut body);
    // One numbered block per subject, attributes bulleted.
    let mut block = 0usize;
    for subject in kg.entities() {
        let edges = kg.out_edges(subject);
        if edges.is_empty() {
            continue;
        }
        block += 1;
        let _ = write!(body, "\n{}. {}:\n", block, subject);
        for t in edges {
            let _ = write!(body, "\n   - ({}, {}, {})\n", t.subject, t.relation, t.object);
        }
    }
    if !predicate.conjuncts.is_empty() {
        let described: Vec<String> = predicate
            .conjuncts
            .iter()
            .map(|c| format!("{} {} {}", c.attribute, c.comparator.symbol(), c.value))
            .collect();
        let _ = write!(body, "\nNow, select the objects where {}.\n", described.join(" and "));
        let matching = matching_subjects(&kg, predicate).map_err(strategy_err)?;
        body.push('\n');
        for m in &matching {
            let _ = writeln!(body, "- ({}, meets criteria, True)", m);
        }
    }

    let (answer_text, fact) = match &result {
        QueryResult::Count(n) => (
            n.to_string(),
            Triple::new(audit::CRITERIA_SUBJECT, audit::CRITERIA_TOTAL, &n.to_string()),
        ),
        QueryResult::Set(items) => (
            items.join(", "),
            Triple::new(audit::CRITERIA_SUBJECT, audit::CRITERIA_SET, &items.join(", ")),
        ),
        QueryResult::Entity(e) => {
            let slot = match predicate.projection {
                Projection::ArgSortFirst(_) => audit::SORTED_FIRST,
                _ => audit::SORTED_LAST,
            };
            (e.clone(), Triple::new(audit::SORTED_SUBJECT, slot, e))
        }
    };
    let fact = fact.map_err(strategy_err)?;
    finish(instance, answer_text, None, body, fact)
}

/// Subjects passing every conjunct, in first-seen order.
fn matching_subjects(
    kg: &KnowledgeGraph,
    predicate: &FilterPredicate,
) -> Result<Vec<String>, sgp_core::strategies::QueryError> {
    let listing = FilterPredicate {
        conjuncts: predicate.conjuncts.clone(),
        projection: Projection::Set,
    };
    match run_graph_query(kg, &listing)? {
        QueryResult::Set(items) => Ok(items),
        _ => unreachable!("Set projection returns a set"),
    }
}

fn solve_inference(
    instance: &TaskInstance,
    facts: &[Triple],
    rules: &[Rule],
    goal: &sgp_core::strategies::FactPattern,
) -> Result<Solved, SolveError> {
    let chain = forward_chain(facts, rules, goal, DEFAULT_FIRING_BUDGET).map_err(strategy_err)?;
    let mut body = String::new();
    opening_line(&mut body);
    fact_blocks(&mut body, facts);
    if !rules.is_empty() {
        body.push('\n');
        for (i, rule) in rules.iter().enumerate() {
            let premises: Vec<String> = rule.premises.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(
                body,
                "Rule {}: IF {} THEN {}.",
                i + 1,
                premises.join(" AND "),
                rule.conclusion
            );
        }
    }
    if !chain.firings.is_empty() {
        body.push_str("\nProgress step by step, combining conclusions with the facts:\n\n");
        for (i, firing) in chain.firings.iter().enumerate() {
            let _ = writeln!(
                body,
                "Step {}: applying rule {} we conclude:",
                i + 1,
                firing.rule_index + 1
            );
            let d = &firing.derived;
            let _ = writeln!(body, "- ({}, {}, {})", d.subject, d.relation, d.object);
        }
    }
    let answer_text = chain
        .goal_bindings
        .first()
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| chain.goal_fact.object.clone());
    let fact = chain.goal_fact.clone();
    finish(instance, answer_text, None, body, fact)
}

/// The closing conclusion line for an answer, in the transcript house style.
#[derive(Debug, Clone, PartialEq)]
pub enum Conclusion {
    Option(char),
    Entity(String),
    Relation(String),
    Number(i64),
}

impl Conclusion {
    pub fn render(&self) -> String {
        match self {
            Conclusion::Option(letter) => format!("Therefore, option ({}) is correct.", letter),
            Conclusion::Entity(e) => format!("So the answer is: {}.", e),
            Conclusion::Relation(r) => format!("Therefore, the missing relation is '{}'.", r),
            Conclusion::Number(n) => format!("So the answer is: {}.", n),
        }
    }
}

/// The conclusion a faithful transcript of this solution would state.
pub fn conclusion_for(instance: &TaskInstance, solved: &Solved) -> Conclusion {
    use sgp_core::instance::AnswerKind;
    match (instance.answer_kind(), solved.option_letter) {
        (AnswerKind::OptionLetter, Some(letter)) => Conclusion::Option(letter),
        (AnswerKind::Relation, _) => Conclusion::Relation(solved.answer_text.clone()),
        (AnswerKind::Number, _) => match solved.answer_text.parse() {
            Ok(n) => Conclusion::Number(n),
            Err(_) => Conclusion::Entity(solved.answer_text.clone()),
        },
        _ => Conclusion::Entity(solved.answer_text.clone()),
    }
}

/// Full transcript: body plus conclusion line.
pub fn render_transcript(solved: &Solved, conclusion: &Conclusion) -> String {
    format!("{}\n{}\n", solved.body, conclusion.render())
}
