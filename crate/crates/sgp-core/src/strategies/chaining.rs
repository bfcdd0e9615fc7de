//! Forward chaining over triple patterns: fixpoint closure with recorded
//! derivations, deterministic via rule and fact ordering.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::triple::{canonical_relation, entity_key, Triple};

/// A pattern term: a `?name` variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    fn parse(raw: &str) -> Term {
        let raw = raw.trim();
        match raw.strip_prefix('?') {
            Some(name) => Term::Var(String::from(name)),
            None => Term::Const(String::from(raw)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{}", v),
            Term::Const(c) => write!(f, "{}", c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FactPattern {
    pub subject: Term,
    pub relation: Term,
    pub object: Term,
}

impl FactPattern {
    pub fn new(subject: Term, relation: Term, object: Term) -> Self {
        FactPattern { subject, relation, object }
    }

    fn vars(&self) -> Vec<&str> {
        [&self.subject, &self.relation, &self.object]
            .into_iter()
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.as_str()),
                Term::Const(_) => None,
            })
            .collect()
    }
}

impl fmt::Display for FactPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.relation, self.object)
    }
}

/// `IF premises THEN conclusion`; every conclusion variable must occur in
/// a premise.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rule {
    pub premises: Vec<FactPattern>,
    pub conclusion: FactPattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainingError {
    MalformedRule(String),
    UnboundConclusionVar { rule: usize, var: String },
    Unprovable,
    BudgetExceeded { budget: usize },
}

impl fmt::Display for ChainingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainingError::MalformedRule(line) => write!(f, "malformed rule: {}", line),
            ChainingError::UnboundConclusionVar { rule, var } => {
                write!(f, "rule {} concludes with unbound variable ?{}", rule, var)
            }
            ChainingError::Unprovable => write!(f, "goal is not derivable from the facts"),
            ChainingError::BudgetExceeded { budget } => {
                write!(f, "closure exceeded the {}-firing budget", budget)
            }
        }
    }
}

crate::std_error!(ChainingError);

pub const DEFAULT_FIRING_BUDGET: usize = 10_000;

/// One rule application: which rule fired, under which bindings, from which
/// premise facts, deriving which fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleFiring {
    pub rule_index: usize,
    pub bindings: Vec<(String, String)>,
    pub premises: Vec<Triple>,
    pub derived: Triple,
}

/// The firings needed to reach the goal, in dependency order. Empty when the
/// goal was already among the stated facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationChain {
    pub firings: Vec<RuleFiring>,
    pub goal_fact: Triple,
    /// Goal-pattern variable assignments resolved from the matched fact.
    pub goal_bindings: Vec<(String, String)>,
}

type Bindings = BTreeMap<String, String>;

fn term_matches(term: &Term, value: &str, canon: fn(&str) -> String, bindings: &mut Bindings) -> bool {
    match term {
        Term::Const(c) => canon(c) == canon(value),
        Term::Var(v) => match bindings.get(v.as_str()) {
            Some(bound) => canon(bound) == canon(value),
            None => {
                bindings.insert(v.clone(), String::from(value));
                true
            }
        },
    }
}

fn pattern_matches(pattern: &FactPattern, fact: &Triple, bindings: &Bindings) -> Option<Bindings> {
    let mut next = bindings.clone();
    if term_matches(&pattern.subject, &fact.subject, entity_key, &mut next)
        && term_matches(&pattern.relation, &fact.relation, canonical_relation, &mut next)
        && term_matches(&pattern.object, &fact.object, entity_key, &mut next)
    {
        Some(next)
    } else {
        None
    }
}

fn substitute(term: &Term, bindings: &Bindings) -> Option<String> {
    match term {
        Term::Const(c) => Some(c.clone()),
        Term::Var(v) => bindings.get(v.as_str()).cloned(),
    }
}

fn instantiate(pattern: &FactPattern, bindings: &Bindings) -> Option<Triple> {
    Triple::new(
        &substitute(&pattern.subject, bindings)?,
        &substitute(&pattern.relation, bindings)?,
        &substitute(&pattern.object, bindings)?,
    )
    .ok()
}

fn fact_key(t: &Triple) -> (String, String, String) {
    (t.subject_key(), t.relation.clone(), t.object_key())
}

fn validate_rules(rules: &[Rule]) -> Result<(), ChainingError> {
    for (i, rule) in rules.iter().enumerate() {
        let premise_vars: BTreeSet<&str> = rule.premises.iter().flat_map(|p| p.vars()).collect();
        for var in rule.conclusion.vars() {
            if !premise_vars.contains(var) {
                return Err(ChainingError::UnboundConclusionVar {
                    rule: i,
                    var: String::from(var),
                });
            }
        }
    }
    Ok(())
}

/// Enumerates all bindings satisfying every premise against `facts`, in
/// fact-insertion order, invoking `emit` with the premise facts used.
fn match_premises(
    premises: &[FactPattern],
    facts: &[Triple],
    bindings: Bindings,
    used: &mut Vec<usize>,
    emit: &mut dyn FnMut(&Bindings, &[usize]),
) {
    match premises.split_first() {
        None => emit(&bindings, used),
        Some((first, rest)) => {
            for (i, fact) in facts.iter().enumerate() {
                if let Some(next) = pattern_matches(first, fact, &bindings) {
                    used.push(i);
                    match_premises(rest, facts, next, used, emit);
                    used.pop();
                }
            }
        }
    }
}

struct Derived {
    depth: usize,
    firing: Option<RuleFiring>,
}

/// Computes the fixpoint closure of `facts` under `rules` and returns the
/// shortest derivation of a fact matching `goal` (ties broken by rule and
/// fact order), or `Unprovable`. A closure deriving more than `budget` new
/// facts aborts with `BudgetExceeded`.
pub fn forward_chain(
    facts: &[Triple],
    rules: &[Rule],
    goal: &FactPattern,
    budget: usize,
) -> Result<DerivationChain, ChainingError> {
    validate_rules(rules)?;

    let mut known: Vec<Triple> = Vec::new();
    let mut info: BTreeMap<(String, String, String), Derived> = BTreeMap::new();
    for fact in facts {
        let key = fact_key(fact);
        if !info.contains_key(&key) {
            info.insert(key, Derived { depth: 0, firing: None });
            known.push(fact.clone());
        }
    }

    let mut firings_spent = 0usize;
    loop {
        let mut new_facts: Vec<(Triple, RuleFiring)> = Vec::new();
        for (rule_index, rule) in rules.iter().enumerate() {
            let mut emit = |bindings: &Bindings, used: &[usize]| {
                if let Some(derived) = instantiate(&rule.conclusion, bindings) {
                    let key = fact_key(&derived);
                    if !info.contains_key(&key)
                        && !new_facts.iter().any(|(t, _)| fact_key(t) == key)
                    {
                        new_facts.push((
                            derived.clone(),
                            RuleFiring {
                                rule_index,
                                bindings: bindings
                                    .iter()
                                    .map(|(k, v)| (k.clone(), v.clone()))
                                    .collect(),
                                premises: used.iter().map(|&i| known[i].clone()).collect(),
                                derived,
                            },
                        ));
                    }
                }
            };
            match_premises(&rule.premises, &known, Bindings::new(), &mut Vec::new(), &mut emit);
        }
        if new_facts.is_empty() {
            break;
        }
        firings_spent += new_facts.len();
        if firings_spent > budget {
            return Err(ChainingError::BudgetExceeded { budget });
        }
        let round = info.values().map(|d| d.depth).max().unwrap_or(0) + 1;
        for (fact, firing) in new_facts {
            info.insert(
                fact_key(&fact),
                Derived {
                    depth: round,
                    firing: Some(firing),
                },
            );
            known.push(fact);
        }
    }

    // Earliest-derived matching fact wins; `known` is in derivation order.
    let goal_hit = known
        .iter()
        .find(|fact| pattern_matches(goal, fact, &Bindings::new()).is_some())
        .cloned()
        .ok_or(ChainingError::Unprovable)?;
    let goal_bindings: Vec<(String, String)> = pattern_matches(goal, &goal_hit, &Bindings::new())
        .expect("goal_hit matched above")
        .into_iter()
        .collect();

    // Collect the firings the goal transitively depends on.
    let mut needed: Vec<RuleFiring> = Vec::new();
    let mut queue: Vec<Triple> = alloc::vec![goal_hit.clone()];
    let mut seen: BTreeSet<(String, String, String)> = BTreeSet::new();
    while let Some(fact) = queue.pop() {
        let key = fact_key(&fact);
        if !seen.insert(key.clone()) {
            continue;
        }
        if let Some(Derived { firing: Some(firing), .. }) = info.get(&key) {
            for premise in &firing.premises {
                queue.push(premise.clone());
            }
            needed.push(firing.clone());
        }
    }
    // Dependency order: shallower derivations first, then rule order.
    needed.sort_by_key(|f| {
        let depth = info.get(&fact_key(&f.derived)).map(|d| d.depth).unwrap_or(0);
        (depth, f.rule_index)
    });

    Ok(DerivationChain {
        firings: needed,
        goal_fact: goal_hit,
        goal_bindings,
    })
}

/// Parses `IF (pat) & (pat) THEN (pat)` with `?x` variables.
pub fn parse_rule(line: &str) -> Result<Rule, ChainingError> {
    let trimmed = line.trim();
    let malformed = || ChainingError::MalformedRule(String::from(line));
    let lower = trimmed.to_lowercase();
    if !lower.starts_with("if ") {
        return Err(malformed());
    }
    let then_at = lower.find(" then ").ok_or_else(malformed)?;
    let premise_part = &trimmed[3..then_at];
    let conclusion_part = &trimmed[then_at + 6..];
    let premises: Vec<FactPattern> = premise_part
        .split('&')
        .map(|p| parse_pattern(p).ok_or_else(malformed))
        .collect::<Result<_, _>>()?;
    if premises.is_empty() {
        return Err(malformed());
    }
    let conclusion = parse_pattern(conclusion_part).ok_or_else(malformed)?;
    let rule = Rule { premises, conclusion };
    validate_rules(core::slice::from_ref(&rule))?;
    Ok(rule)
}

/// Parses one rule per non-empty, non-`#` line.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, ChainingError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_rule)
        .collect()
}

/// Parses a `(subject, relation, object)` pattern with optional `?vars`.
pub fn parse_pattern(raw: &str) -> Option<FactPattern> {
    let inner = raw.trim().strip_prefix('(')?.strip_suffix(')')?;
    let parts: Vec<&str> = inner.splitn(3, ',').collect();
    if parts.len() != 3 {
        return None;
    }
    let terms: Vec<Term> = parts.iter().map(|p| Term::parse(p)).collect();
    if terms.iter().any(|t| matches!(t, Term::Const(c) if c.is_empty())) {
        return None;
    }
    let mut it = terms.into_iter();
    Some(FactPattern::new(
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ))
}
