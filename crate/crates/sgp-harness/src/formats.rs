//! Text formats for the `solve` commands: triple files, event scripts,
//! ordering constraints, attribute tables, and filter expressions. `#`
//! starts a comment line in all line-based formats.

use std::path::Path;

use sgp_core::strategies::{ChainHop, ChainQuery, Comparator, Conjunct, OrderConstraint};
use sgp_core::textgraph::parse_triple_line;
use sgp_core::{Direction, Event, Triple};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path} line {line}: {reason}")]
    Line {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn line_err(path: &Path, line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Line {
        path: path.display().to_string(),
        line,
        reason: reason.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One `(subject, relation, object)` per line, optional `t=N:` prefix.
pub fn read_triples_file(path: &Path) -> Result<Vec<Triple>, FormatError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in content_lines(&text) {
        let triple = parse_triple_line(line)
            .ok_or_else(|| line_err(path, lineno, format!("not a triple: {}", line)))?;
        out.push(triple);
    }
    Ok(out)
}

/// `swap(A, B, relation)` / `assign(Entity, relation, value)`, one per line.
pub fn read_events_file(path: &Path) -> Result<Vec<Event>, FormatError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in content_lines(&text) {
        out.push(parse_event(line).ok_or_else(|| {
            line_err(path, lineno, format!("not an event: {}", line))
        })?);
    }
    Ok(out)
}

fn parse_event(line: &str) -> Option<Event> {
    let (head, rest) = line.split_once('(')?;
    let args = rest.trim_end().strip_suffix(')')?;
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != 3 || parts.iter().any(|p| p.is_empty()) {
        return None;
    }
    match head.trim().to_lowercase().as_str() {
        "swap" => Some(Event::Swap {
            left: parts[0].to_string(),
            right: parts[1].to_string(),
            relation: parts[2].to_string(),
        }),
        "assign" => Some(Event::Assign {
            entity: parts[0].to_string(),
            relation: parts[1].to_string(),
            value: parts[2].to_string(),
        }),
        _ => None,
    }
}

/// Constraint scripts:
/// ```text
/// objects: falcon, owl, raven
/// leftmost(falcon)
/// left_of(raven, owl)
/// right_of(a, b) | rightmost(x) | at(x, 0)
/// ```
pub fn read_constraints_file(
    path: &Path,
) -> Result<(Vec<String>, Vec<OrderConstraint>), FormatError> {
    let text = std::fs::read_to_string(path)?;
    let mut objects: Vec<String> = Vec::new();
    let mut constraints = Vec::new();
    for (lineno, line) in content_lines(&text) {
        if let Some(rest) = line.strip_prefix("objects:") {
            objects = rest
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            continue;
        }
        constraints.push(
            parse_constraint(line)
                .ok_or_else(|| line_err(path, lineno, format!("not a constraint: {}", line)))?,
        );
    }
    if objects.is_empty() {
        return Err(FormatError::Invalid(format!(
            "{}: missing 'objects:' line",
            path.display()
        )));
    }
    Ok((objects, constraints))
}

fn parse_constraint(line: &str) -> Option<OrderConstraint> {
    let (head, rest) = line.split_once('(')?;
    let args = rest.trim_end().strip_suffix(')')?;
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    let one = || parts.first().map(|s| s.to_string()).filter(|s| !s.is_empty());
    match (head.trim().to_lowercase().as_str(), parts.len()) {
        ("leftmost", 1) => Some(OrderConstraint::Leftmost(one()?)),
        ("rightmost", 1) => Some(OrderConstraint::Rightmost(one()?)),
        ("left_of", 2) => Some(OrderConstraint::LeftOf(
            parts[0].to_string(),
            parts[1].to_string(),
        )),
        ("right_of", 2) => Some(OrderConstraint::RightOf(
            parts[0].to_string(),
            parts[1].to_string(),
        )),
        ("at", 2) => Some(OrderConstraint::AtPosition(
            parts[0].to_string(),
            parts[1].parse().ok()?,
        )),
        _ => None,
    }
}

/// CSV attribute table: first header cell names the subject column, each
/// further header cell an attribute. A unit in parentheses is stripped from
/// the attribute name ("height (cm)" -> "height"). Every row also gets a
/// `name` attribute holding the subject.
pub fn read_table_csv(path: &Path) -> Result<Vec<Triple>, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| FormatError::Invalid(format!("{}: {}", path.display(), e)))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| FormatError::Invalid(e.to_string()))?
        .iter()
        .map(|h| strip_unit(h))
        .collect();
    if headers.len() < 2 {
        return Err(FormatError::Invalid(format!(
            "{}: table needs a subject column and at least one attribute",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| line_err(path, row_idx + 2, e.to_string()))?;
        let subject = record
            .get(0)
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| line_err(path, row_idx + 2, "empty subject cell"))?;
        for (col, attr) in headers.iter().enumerate() {
            let value = record.get(col).unwrap_or("");
            let triple = Triple::new(subject, attr, value)
                .map_err(|e| line_err(path, row_idx + 2, e.to_string()))?;
            out.push(triple);
        }
    }
    Ok(out)
}

fn strip_unit(header: &str) -> String {
    match header.split_once('(') {
        Some((name, _)) => name.trim().to_string(),
        None => header.trim().to_string(),
    }
}

/// Conjunctions like `age>5 & weight>=12`, also accepting `and` as the
/// separator.
pub fn parse_where(expr: &str) -> Result<Vec<Conjunct>, FormatError> {
    let normalized = expr.replace(" and ", " & ");
    let mut out = Vec::new();
    for clause in normalized.split('&') {
        let clause = clause.trim();
        if clause.is_empty() {
            continue;
        }
        out.push(parse_comparison(clause).ok_or_else(|| {
            FormatError::Invalid(format!("cannot parse condition '{}'", clause))
        })?);
    }
    if out.is_empty() {
        return Err(FormatError::Invalid(format!(
            "no conditions in '{}'",
            expr
        )));
    }
    Ok(out)
}

fn parse_comparison(clause: &str) -> Option<Conjunct> {
    // Longest operators first so ">=" is not read as ">".
    for (symbol, cmp) in [
        (">=", Comparator::Ge),
        ("<=", Comparator::Le),
        ("!=", Comparator::Ne),
        ("<", Comparator::Lt),
        (">", Comparator::Gt),
        ("=", Comparator::Eq),
    ] {
        if let Some((attr, value)) = clause.split_once(symbol) {
            let attribute = attr.trim();
            let value = value.trim();
            if attribute.is_empty() || value.is_empty() {
                return None;
            }
            return Some(Conjunct {
                attribute: attribute.to_string(),
                comparator: cmp,
                value: value.to_string(),
            });
        }
    }
    None
}

/// Hop list `rel1,^rel2`: a leading `^` walks the relation inversely.
pub fn parse_hops(spec: &str, anchor: &str) -> Result<ChainQuery, FormatError> {
    let hops: Vec<ChainHop> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|hop| match hop.strip_prefix('^') {
            Some(rel) => ChainHop {
                relation: rel.trim().to_string(),
                direction: Direction::Inverse,
            },
            None => ChainHop {
                relation: hop.to_string(),
                direction: Direction::Forward,
            },
        })
        .collect();
    if hops.is_empty() {
        return Err(FormatError::Invalid("hop list is empty".into()));
    }
    Ok(ChainQuery {
        anchor: anchor.to_string(),
        hops,
    })
}

/// `"Entity, relation"` query for dynamic tracking.
pub fn parse_entity_relation(spec: &str) -> Result<(String, String), FormatError> {
    let (entity, relation) = spec
        .split_once(',')
        .ok_or_else(|| FormatError::Invalid(format!("expected 'entity, relation', got '{}'", spec)))?;
    let entity = entity.trim();
    let relation = relation.trim();
    if entity.is_empty() || relation.is_empty() {
        return Err(FormatError::Invalid(format!(
            "expected 'entity, relation', got '{}'",
            spec
        )));
    }
    Ok((entity.to_string(), relation.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn where_expressions_parse() {
        let got = parse_where("age>5 & weight >= 12").unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].attribute, "age");
        assert_eq!(got[0].comparator, Comparator::Gt);
        assert_eq!(got[1].comparator, Comparator::Ge);
        assert!(parse_where("nonsense").is_err());
    }

    #[test]
    fn events_parse() {
        assert_eq!(
            parse_event("swap(Bob, Claire, has_book)"),
            Some(Event::Swap {
                left: "Bob".into(),
                right: "Claire".into(),
                relation: "has_book".into()
            })
        );
        assert_eq!(parse_event("noop(a, b, c)"), None);
    }

    #[test]
    fn constraints_parse() {
        assert_eq!(
            parse_constraint("left_of(raven, owl)"),
            Some(OrderConstraint::LeftOf("raven".into(), "owl".into()))
        );
        assert_eq!(
            parse_constraint("at(falcon, 0)"),
            Some(OrderConstraint::AtPosition("falcon".into(), 0))
        );
    }

    #[test]
    fn table_reads_with_units_stripped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("penguins.csv");
        std::fs::write(&path, "name,age,height (cm),weight (kg)\nLouis,7,50,11\n").unwrap();
        let triples = read_table_csv(&path).unwrap();
        assert!(triples.contains(&Triple::new("Louis", "height", "50").unwrap()));
        assert!(triples.contains(&Triple::new("Louis", "name", "Louis").unwrap()));
    }
}
