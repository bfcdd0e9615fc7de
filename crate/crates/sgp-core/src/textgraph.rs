//! Parse free-text model responses into triples, final answers, and
//! derivation lines, and audit whether the stated conclusion agrees with the
//! facts the response itself derived.
//!
//! Parsing is regular-pattern based, not grammar-complete: it recognizes the
//! parenthesized `(A, r, B)` form, the dashed `A - r - B` form, and bulleted
//! or numbered variants of both. Nested parentheses inside entity names are
//! not supported. Lines that look like a triple but fail to parse are
//! skipped and tallied; plain prose is ignored.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::AnswerKind;
use crate::kinship::KinshipRelation;
use crate::triple::{canonical_relation, entity_key, Triple};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AnswerValue {
    Option(char),
    Entity(String),
    Relation(String),
    Number(i64),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParsedAnswer {
    pub value: AnswerValue,
    /// Source substring the answer was read from.
    pub raw_span: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParseDiagnostics {
    /// Lines that looked like a triple but did not parse.
    pub skipped_lines: usize,
    /// Distinct numbered sentence blocks seen.
    pub blocks_found: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockTriples {
    pub block: usize,
    pub triples: Vec<Triple>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedResponse {
    pub triples_by_block: Vec<BlockTriples>,
    pub final_answer: Option<ParsedAnswer>,
    pub derivation_lines: Vec<String>,
    pub diagnostics: ParseDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractError {
    NoAnswerFound,
}

impl fmt::Display for ExtractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no conclusion marker found in response")
    }
}

crate::std_error!(ExtractError);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ConsistencyStatus {
    Consistent,
    Inconsistent,
    Inconclusive,
}

/// Outcome of checking a response's stated conclusion against the facts it
/// derived along the way.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyReport {
    pub status: ConsistencyStatus,
    pub derived_answer: Option<ParsedAnswer>,
    pub stated_answer: Option<ParsedAnswer>,
    pub evidence: Vec<String>,
}

/// A triple pattern with exactly one open slot; the derived answer is
/// whatever the last matching triple holds in that slot.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditQuery {
    pub subject: Option<String>,
    pub relation: Option<String>,
    pub object: Option<String>,
}

impl AuditQuery {
    /// `(entity, relation, ?)`
    pub fn object_of(entity: &str, relation: &str) -> Self {
        AuditQuery {
            subject: Some(String::from(entity)),
            relation: Some(String::from(relation)),
            object: None,
        }
    }

    /// `(?, relation, entity)`
    pub fn subject_of(relation: &str, entity: &str) -> Self {
        AuditQuery {
            subject: None,
            relation: Some(String::from(relation)),
            object: Some(String::from(entity)),
        }
    }

    /// `(subject, ?, object)`
    pub fn relation_between(subject: &str, object: &str) -> Self {
        AuditQuery {
            subject: Some(String::from(subject)),
            relation: None,
            object: Some(String::from(object)),
        }
    }
}

// ---------------------------------------------------------------------------
// Triple extraction
// ---------------------------------------------------------------------------

fn unescape(s: &str) -> String {
    s.replace("\\_", "_")
}

/// Parses one canonical triple line: optional `t=N:` prefix, then
/// `(subject, relation, object)`. Extra commas belong to the object.
pub fn parse_triple_line(line: &str) -> Option<Triple> {
    let mut rest = line.trim();
    let mut timestep = None;
    if let Some(after) = rest.strip_prefix("t=") {
        let digits: String = after.chars().take_while(|c| c.is_ascii_digit()).collect();
        let tail = after[digits.len()..].trim_start();
        if !digits.is_empty() {
            if let Some(t) = tail.strip_prefix(':') {
                timestep = Some(digits.parse().ok()?);
                rest = t.trim_start();
            }
        }
    }
    let rest = rest.trim_end_matches(['.', ';']).trim_end();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    if inner.contains('(') || inner.contains(')') {
        return None; // nested parentheses unsupported
    }
    let parts: Vec<&str> = inner.splitn(3, ',').collect();
    if parts.len() != 3 {
        return None;
    }
    Triple::with_timestep(
        &unescape(parts[0].trim()),
        &unescape(parts[1].trim()),
        &unescape(parts[2].trim()),
        timestep,
    )
    .ok()
}

fn parse_dashed_line(line: &str) -> Option<Triple> {
    let parts: Vec<&str> = line.split(" - ").collect();
    if parts.len() < 3 {
        return None;
    }
    let object = parts[2..].join(" - ");
    let object = object.trim().trim_end_matches(['.', ';']).trim_end();
    Triple::new(&unescape(parts[0].trim()), &unescape(parts[1].trim()), &unescape(object)).ok()
}

/// Strips a leading `N.` sentence number, returning `(block, remainder)`.
fn strip_block_number(line: &str) -> Option<(usize, &str)> {
    let digits_end = line.find(|c: char| !c.is_ascii_digit())?;
    if digits_end == 0 {
        return None;
    }
    let rest = &line[digits_end..];
    let rest = rest.strip_prefix('.')?;
    if !rest.is_empty() && !rest.starts_with(' ') {
        return None;
    }
    let block = line[..digits_end].parse().ok()?;
    Some((block, rest.trim_start()))
}

fn strip_bullet(line: &str) -> &str {
    let t = line.trim_start();
    for marker in ["- ", "* "] {
        if let Some(rest) = t.strip_prefix(marker) {
            return rest.trim_start();
        }
    }
    t
}

/// Extracts triples grouped by numbered sentence block. Triples appearing
/// before any block header land in block 0.
pub fn extract_triples(text: &str) -> (Vec<BlockTriples>, ParseDiagnostics) {
    let mut groups: Vec<BlockTriples> = Vec::new();
    let mut diagnostics = ParseDiagnostics::default();
    let mut current_block = 0usize;
    let mut seen_blocks: Vec<usize> = Vec::new();

    let push = |block: usize, triple: Triple, groups: &mut Vec<BlockTriples>| {
        match groups.iter_mut().find(|g| g.block == block) {
            Some(g) => g.triples.push(triple),
            None => groups.push(BlockTriples {
                block,
                triples: alloc::vec![triple],
            }),
        }
    };

    for raw_line in text.lines() {
        let mut line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some((block, rest)) = strip_block_number(line) {
            current_block = block;
            if !seen_blocks.contains(&block) {
                seen_blocks.push(block);
                diagnostics.blocks_found += 1;
            }
            line = rest;
            if line.is_empty() {
                continue;
            }
        }
        let line = strip_bullet(line);
        if line.is_empty() {
            continue;
        }
        let looks_parenthesized = line.starts_with('(') || line.starts_with("t=");
        let looks_dashed = line.contains(" - ");
        if looks_parenthesized {
            match parse_triple_line(line) {
                Some(t) => push(current_block, t, &mut groups),
                None => diagnostics.skipped_lines += 1,
            }
        } else if looks_dashed {
            match parse_dashed_line(line) {
                Some(t) => push(current_block, t, &mut groups),
                None => diagnostics.skipped_lines += 1,
            }
        }
    }
    groups.sort_by_key(|g| g.block);
    (groups, diagnostics)
}

/// Full parse: triples, final answer (if any), derivation lines.
pub fn parse_response(text: &str, kind: AnswerKind) -> ParsedResponse {
    let (triples_by_block, diagnostics) = extract_triples(text);
    let derivation_lines = text
        .lines()
        .map(str::trim)
        .filter(|l| {
            let lower = to_ascii_lower(l);
            lower.starts_with("step") || lower.starts_with("given ") || lower.starts_with("from ")
        })
        .map(String::from)
        .collect();
    ParsedResponse {
        triples_by_block,
        final_answer: extract_final_answer(text, kind).ok(),
        derivation_lines,
        diagnostics,
    }
}

// ---------------------------------------------------------------------------
// Final-answer extraction
// ---------------------------------------------------------------------------

/// ASCII-only lowering so byte offsets into the original text stay valid.
fn to_ascii_lower(s: &str) -> String {
    s.chars().map(|c| c.to_ascii_lowercase()).collect()
}

/// Byte offsets of every case-insensitive occurrence of `needle`.
fn find_all_ci(haystack_lower: &str, needle: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(at) = haystack_lower[from..].find(needle) {
        out.push(from + at);
        from += at + needle.len().max(1);
    }
    out
}

fn is_word_boundary(text: &str, pos: usize) -> bool {
    pos == 0
        || !text[..pos]
            .chars()
            .next_back()
            .is_some_and(|c| c.is_alphanumeric())
}

/// Trims quotes, trailing punctuation, and whitespace off a captured span.
fn clean_capture(s: &str) -> String {
    let s = s.trim();
    let s = s.trim_end_matches(['.', '!', '?', ',', ';', ':']);
    let s = s.trim_matches(['\'', '"', '`']);
    String::from(s.trim())
}

fn capture_sentence_tail(text: &str, from: usize) -> &str {
    let tail = &text[from..];
    let end = tail
        .find(['.', '!', '?', '\n'])
        .map(|i| i + 1)
        .unwrap_or(tail.len());
    &tail[..end]
}

fn option_letter_at(text: &str, from: usize) -> Option<(char, usize)> {
    let tail = &text[from..];
    let mut chars = tail.char_indices().skip_while(|(_, c)| c.is_whitespace());
    let (mut i, mut c) = chars.next()?;
    let mut parenthesized = false;
    if c == '(' {
        parenthesized = true;
        (i, c) = chars.next()?;
    }
    if !c.is_ascii_alphabetic() {
        return None;
    }
    let letter = c.to_ascii_uppercase();
    if !('A'..='E').contains(&letter) {
        return None;
    }
    let after = from + i + 1;
    let next = text[after..].chars().next();
    if parenthesized {
        if next != Some(')') {
            return None;
        }
        Some((letter, after + 1))
    } else {
        // Bare letters only count when they stand alone ("option B.").
        match next {
            None => Some((letter, after)),
            Some(c) if !c.is_alphanumeric() => Some((letter, after)),
            _ => None,
        }
    }
}

fn typed_value(capture: &str, kind: AnswerKind) -> AnswerValue {
    let cleaned = clean_capture(capture);
    match kind {
        AnswerKind::Relation => AnswerValue::Relation(cleaned),
        AnswerKind::Number => match cleaned.parse::<i64>() {
            Ok(n) => AnswerValue::Number(n),
            Err(_) => AnswerValue::Entity(cleaned),
        },
        _ => {
            if let Ok(n) = cleaned.parse::<i64>() {
                AnswerValue::Number(n)
            } else {
                AnswerValue::Entity(cleaned)
            }
        }
    }
}

/// Scans for conclusion markers and returns the LAST one in source order.
/// Markers: "option (X)", line-initial "(X)", "the answer is ...",
/// "the missing relation is ...", quoted "... is 'X'", "(Answer: X)", and
/// possessive "... is Y's <relation>." for relation questions.
pub fn extract_final_answer(text: &str, kind: AnswerKind) -> Result<ParsedAnswer, ExtractError> {
    let lower = to_ascii_lower(text);
    let mut candidates: Vec<(usize, ParsedAnswer)> = Vec::new();

    // "option (X)"
    for at in find_all_ci(&lower, "option") {
        if !is_word_boundary(text, at) {
            continue;
        }
        if let Some((letter, end)) = option_letter_at(text, at + "option".len()) {
            candidates.push((
                at,
                ParsedAnswer {
                    value: AnswerValue::Option(letter),
                    raw_span: String::from(text[at..end].trim()),
                },
            ));
        }
    }

    // Line-initial "(X) ..." answer headers.
    let mut offset = 0;
    for line in text.lines() {
        let trimmed = line.trim_start();
        let lead = line.len() - trimmed.len();
        if trimmed.starts_with('(') {
            if let Some((letter, _)) = option_letter_at(trimmed, 0) {
                candidates.push((
                    offset + lead,
                    ParsedAnswer {
                        value: AnswerValue::Option(letter),
                        raw_span: String::from(trimmed.trim_end()),
                    },
                ));
            }
        }
        offset += line.len() + 1;
    }

    // "the answer is ..." / "answer is: ..."
    for at in find_all_ci(&lower, "answer is") {
        if !is_word_boundary(text, at) {
            continue;
        }
        let mut from = at + "answer is".len();
        if text[from..].starts_with(':') {
            from += 1;
        }
        if let Some((letter, end)) = option_letter_at(text, from) {
            candidates.push((
                at,
                ParsedAnswer {
                    value: AnswerValue::Option(letter),
                    raw_span: String::from(text[at..end].trim()),
                },
            ));
            continue;
        }
        let tail = capture_sentence_tail(text, from);
        // "the answer is option (B)" is caught by the option family above.
        if to_ascii_lower(tail).trim_start().starts_with("option") {
            continue;
        }
        let cleaned = clean_capture(tail);
        if cleaned.is_empty() {
            continue;
        }
        candidates.push((
            at,
            ParsedAnswer {
                value: typed_value(&cleaned, kind),
                raw_span: String::from(text[at..from + tail.len()].trim()),
            },
        ));
    }

    // "the missing relation is 'sibling'" and friends.
    for at in find_all_ci(&lower, "relation is") {
        let from = at + "relation is".len();
        let tail = capture_sentence_tail(text, from);
        let cleaned = clean_capture(tail.trim_start().trim_start_matches("that "));
        if cleaned.is_empty() {
            continue;
        }
        candidates.push((
            at,
            ParsedAnswer {
                value: AnswerValue::Relation(cleaned),
                raw_span: String::from(text[at..from + tail.len()].trim()),
            },
        ));
    }

    // Quoted conclusions: "... is 'melting'."
    for at in find_all_ci(&lower, " is '") {
        let from = at + " is '".len();
        let Some(close) = text[from..].find('\'') else {
            continue;
        };
        let capture = &text[from..from + close];
        if capture.is_empty() {
            continue;
        }
        candidates.push((
            at,
            ParsedAnswer {
                value: typed_value(capture, kind),
                raw_span: String::from(text[at + 1..from + close + 1].trim()),
            },
        ));
    }

    // "(Answer: Lush Ltd.)"
    for at in find_all_ci(&lower, "(answer:") {
        let from = at + "(answer:".len();
        let Some(close) = text[from..].find(')') else {
            continue;
        };
        let capture = clean_capture(&text[from..from + close]);
        if capture.is_empty() {
            continue;
        }
        candidates.push((
            at,
            ParsedAnswer {
                value: typed_value(&capture, kind),
                raw_span: String::from(&text[at..from + close + 1]),
            },
        ));
    }

    // Possessive relation statements: "Laura is Jonathan's mother."
    if kind == AnswerKind::Relation {
        for at in find_all_ci(&lower, "'s ") {
            let from = at + "'s ".len();
            let word: String = text[from..]
                .chars()
                .take_while(|c| c.is_alphanumeric() || *c == '-')
                .collect();
            let after = text[from + word.len()..].chars().next();
            let ends_sentence = matches!(after, None | Some('.') | Some('!') | Some('\n'));
            if !word.is_empty() && ends_sentence && KinshipRelation::parse(&word).is_ok() {
                candidates.push((
                    at,
                    ParsedAnswer {
                        value: AnswerValue::Relation(word.clone()),
                        raw_span: String::from(text[at..from + word.len()].trim()),
                    },
                ));
            }
        }
    }

    candidates
        .into_iter()
        .max_by_key(|(pos, _)| *pos)
        .map(|(_, answer)| answer)
        .ok_or(ExtractError::NoAnswerFound)
}

// ---------------------------------------------------------------------------
// Consistency audit
// ---------------------------------------------------------------------------

/// Normalized comparison form: case-folded, underscores as spaces, quotes
/// and trailing punctuation stripped, leading article dropped.
pub fn normalize_answer(s: &str) -> String {
    let cleaned = clean_capture(&s.replace('_', " ").replace('\\', ""));
    let key = entity_key(&cleaned);
    for article in ["the ", "a ", "an "] {
        if let Some(rest) = key.strip_prefix(article) {
            return String::from(rest);
        }
    }
    key
}

fn answer_comparable(value: &AnswerValue, options: &[(char, String)]) -> Option<String> {
    match value {
        AnswerValue::Option(letter) => options
            .iter()
            .find(|(l, _)| l.eq_ignore_ascii_case(letter))
            .map(|(_, text)| normalize_answer(text)),
        AnswerValue::Entity(s) | AnswerValue::Relation(s) => Some(normalize_answer(s)),
        AnswerValue::Number(n) => Some(alloc::format!("{}", n)),
    }
}

fn matches_slot(slot: &Option<String>, value: &str, canon: fn(&str) -> String) -> bool {
    match slot {
        Some(expected) => canon(expected) == canon(value),
        None => true,
    }
}

/// Compares the response's stated conclusion against the object (or subject,
/// or relation) of the last derived triple matching `query`. An option
/// letter on the stated side is resolved through `options` before comparing.
pub fn audit_consistency(
    text: &str,
    query: &AuditQuery,
    kind: AnswerKind,
    options: &[(char, String)],
) -> ConsistencyReport {
    let open_slots = [&query.subject, &query.relation, &query.object]
        .iter()
        .filter(|s| s.is_none())
        .count();
    let (blocks, _) = extract_triples(text);
    let derived_triple = if open_slots == 1 {
        blocks
            .iter()
            .flat_map(|b| b.triples.iter())
            .filter(|t| {
                matches_slot(&query.subject, &t.subject, entity_key)
                    && matches_slot(&query.relation, &t.relation, canonical_relation)
                    && matches_slot(&query.object, &t.object, entity_key)
            })
            .next_back()
            .cloned()
    } else {
        None
    };

    let derived_answer = derived_triple.as_ref().map(|t| {
        let value = if query.object.is_none() {
            AnswerValue::Entity(t.object.clone())
        } else if query.subject.is_none() {
            AnswerValue::Entity(t.subject.clone())
        } else {
            AnswerValue::Relation(t.relation.clone())
        };
        ParsedAnswer {
            value,
            raw_span: t.render_line(),
        }
    });
    let stated_answer = extract_final_answer(text, kind).ok();

    let status = match (&derived_answer, &stated_answer) {
        (Some(derived), Some(stated)) => {
            let derived_cmp = answer_comparable(&derived.value, options);
            let stated_cmp = answer_comparable(&stated.value, options);
            match (derived_cmp, stated_cmp) {
                (Some(d), Some(s)) if d == s => ConsistencyStatus::Consistent,
                (Some(_), Some(_)) => ConsistencyStatus::Inconsistent,
                _ => ConsistencyStatus::Inconclusive,
            }
        }
        _ => ConsistencyStatus::Inconclusive,
    };

    let mut evidence = Vec::new();
    if let Some(d) = &derived_answer {
        evidence.push(alloc::format!("derived: {}", d.raw_span));
    }
    if let Some(s) = &stated_answer {
        evidence.push(alloc::format!("stated: {}", s.raw_span));
    }

    ConsistencyReport {
        status,
        derived_answer,
        stated_answer,
        evidence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bulleted_parenthesized_triples() {
        let (blocks, diag) = extract_triples("- (Alice, has\\_book, The Odyssey)");
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].block, 0);
        assert_eq!(
            blocks[0].triples[0],
            Triple::new("Alice", "has book", "The Odyssey").unwrap()
        );
        assert_eq!(diag.skipped_lines, 0);
    }

    #[test]
    fn parses_dashed_triples() {
        let (blocks, _) = extract_triples("Alice - has - yellow present");
        assert_eq!(
            blocks[0].triples[0],
            Triple::new("Alice", "has", "yellow present").unwrap()
        );
    }

    #[test]
    fn numbered_lines_set_the_block() {
        let text = "1. (Seth, wife, Laura)\n\n2. At the park.\n\n   - (Rosa, father, Seth)\n";
        let (blocks, diag) = extract_triples(text);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].block, 1);
        assert_eq!(blocks[0].triples[0], Triple::new("Seth", "wife", "Laura").unwrap());
        assert_eq!(blocks[1].block, 2);
        assert_eq!(blocks[1].triples[0], Triple::new("Rosa", "father", "Seth").unwrap());
        assert_eq!(diag.blocks_found, 2);
        assert_eq!(diag.skipped_lines, 0);
    }

    #[test]
    fn empty_input_has_no_triples_or_blocks() {
        let (blocks, diag) = extract_triples("");
        assert!(blocks.is_empty());
        assert_eq!(diag, ParseDiagnostics::default());
    }

    #[test]
    fn malformed_triple_like_lines_are_tallied() {
        let (blocks, diag) = extract_triples("- (Alice, only-two-fields)\nFalcon - Position: Leftmost\n");
        assert!(blocks.is_empty());
        assert_eq!(diag.skipped_lines, 2);
    }

    #[test]
    fn commas_in_the_object_survive() {
        let line = "(Lush Ltd., headquartered in, Poole, Dorset, United Kingdom)";
        let t = parse_triple_line(line).unwrap();
        assert_eq!(t.subject, "Lush Ltd.");
        assert_eq!(t.object, "Poole, Dorset, United Kingdom");
    }

    #[test]
    fn final_answer_markers() {
        let opt = extract_final_answer("Therefore, option (C) is correct.", AnswerKind::OptionLetter).unwrap();
        assert_eq!(opt.value, AnswerValue::Option('C'));

        let entity = extract_final_answer("So the answer is: Ocean.", AnswerKind::Entity).unwrap();
        assert_eq!(entity.value, AnswerValue::Entity(String::from("Ocean")));

        let rel = extract_final_answer(
            "Therefore, the missing relation is 'sibling'.",
            AnswerKind::Relation,
        )
        .unwrap();
        assert_eq!(rel.value, AnswerValue::Relation(String::from("sibling")));

        assert_eq!(
            extract_final_answer("no markers here", AnswerKind::Entity),
            Err(ExtractError::NoAnswerFound)
        );
    }

    #[test]
    fn last_conclusion_wins() {
        let text = "The answer is: draft.\nAfter checking, the answer is: final.";
        let got = extract_final_answer(text, AnswerKind::Entity).unwrap();
        assert_eq!(got.value, AnswerValue::Entity(String::from("final")));
    }

    #[test]
    fn possessive_relation_statement() {
        let text = "So, the family relationship between Laura and Jonathan is that Laura is Jonathan's mother.";
        let got = extract_final_answer(text, AnswerKind::Relation).unwrap();
        assert_eq!(got.value, AnswerValue::Relation(String::from("mother")));
    }

    #[test]
    fn audit_flags_the_dancers_failure() {
        let text = "\
5. Finally, Claire and Alice switch partners.\n\n   - (Alice, is dancing with, Jamie)\n\n   - (Claire, is dancing with, Lola)\n\n\
So, at the end of the dance, Alice is dancing with Lola. Therefore, option (C) is correct.\n";
        let options = [
            ('A', String::from("Rodrigo")),
            ('B', String::from("Jamie")),
            ('C', String::from("Lola")),
        ];
        let report = audit_consistency(
            text,
            &AuditQuery::object_of("Alice", "is dancing with"),
            AnswerKind::OptionLetter,
            &options,
        );
        assert_eq!(report.status, ConsistencyStatus::Inconsistent);
        assert_eq!(
            report.derived_answer.unwrap().value,
            AnswerValue::Entity(String::from("Jamie"))
        );
        assert_eq!(report.stated_answer.unwrap().value, AnswerValue::Option('C'));
    }

    #[test]
    fn audit_confirms_the_books_success() {
        let text = "\
5. Finally, Bob and Alice swap books.\n\n   - (Bob, has\\_book, The Pearl)\n\n   - (Alice, has\\_book, The Odyssey)\n\n\
So, at the end of the semester, Alice has The Odyssey. Therefore, option (C) is correct.\n";
        let options = [
            ('A', String::from("Hound of the Baskervilles")),
            ('B', String::from("The Pearl")),
            ('C', String::from("The Odyssey")),
        ];
        let report = audit_consistency(
            text,
            &AuditQuery::object_of("Alice", "has_book"),
            AnswerKind::OptionLetter,
            &options,
        );
        assert_eq!(report.status, ConsistencyStatus::Consistent);
    }

    #[test]
    fn audit_flags_the_sunburn_failure() {
        let text = "\
2. (ultraviolet light, causes, sunburn)\n\n\
So, 'ultraviolet light' causes 'sunburn'.\n\n\
In conclusion, the form of solar radiation that causes sunburn is 'sunlight'.\n";
        let report = audit_consistency(
            text,
            &AuditQuery::subject_of("causes", "sunburn"),
            AnswerKind::Entity,
            &[],
        );
        assert_eq!(report.status, ConsistencyStatus::Inconsistent);
        assert_eq!(
            report.derived_answer.unwrap().value,
            AnswerValue::Entity(String::from("ultraviolet light"))
        );
        assert_eq!(
            report.stated_answer.unwrap().value,
            AnswerValue::Entity(String::from("sunlight"))
        );
    }

    #[test]
    fn audit_without_either_side_is_inconclusive() {
        let report = audit_consistency(
            "nothing to see",
            &AuditQuery::object_of("Alice", "has_book"),
            AnswerKind::Entity,
            &[],
        );
        assert_eq!(report.status, ConsistencyStatus::Inconclusive);
    }
}
