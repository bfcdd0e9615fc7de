//! Triples: the atomic `(subject, relation, object)` facts of a knowledge graph.

use alloc::borrow::ToOwned;
use alloc::string::String;
use core::fmt;

/// One fact. The relation is stored in canonical form (lowercased, internal
/// whitespace collapsed, underscores equal spaces); subject and object keep
/// their display casing and compare case-insensitively after trimming.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
    /// Story step that asserted this fact, when known.
    pub timestep: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleError {
    EmptySubject,
    EmptyRelation,
}

impl fmt::Display for TripleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleError::EmptySubject => write!(f, "triple subject is empty"),
            TripleError::EmptyRelation => write!(f, "triple relation is empty"),
        }
    }
}

crate::std_error!(TripleError);

/// Case-insensitive comparison key for an entity name: trimmed, lowercased,
/// internal whitespace collapsed.
pub fn entity_key(name: &str) -> String {
    let mut key = String::with_capacity(name.len());
    let mut pending_space = false;
    for ch in name.trim().chars() {
        if ch.is_whitespace() {
            pending_space = true;
        } else {
            if pending_space && !key.is_empty() {
                key.push(' ');
            }
            pending_space = false;
            for lower in ch.to_lowercase() {
                key.push(lower);
            }
        }
    }
    key
}

/// Canonical form of a relation label: lowercased, underscores treated as
/// spaces, whitespace collapsed.
pub fn canonical_relation(label: &str) -> String {
    let mut canon = String::with_capacity(label.len());
    let mut pending_space = false;
    for ch in label.trim().chars() {
        if ch.is_whitespace() || ch == '_' {
            pending_space = true;
        } else {
            if pending_space && !canon.is_empty() {
                canon.push(' ');
            }
            pending_space = false;
            for lower in ch.to_lowercase() {
                canon.push(lower);
            }
        }
    }
    canon
}

impl Triple {
    /// Builds a triple, canonicalizing the relation. Fails when subject or
    /// relation are empty after trimming.
    pub fn new(subject: &str, relation: &str, object: &str) -> Result<Self, TripleError> {
        Self::with_timestep(subject, relation, object, None)
    }

    pub fn with_timestep(
        subject: &str,
        relation: &str,
        object: &str,
        timestep: Option<u32>,
    ) -> Result<Self, TripleError> {
        let subject = subject.trim();
        let relation = canonical_relation(relation);
        if subject.is_empty() {
            return Err(TripleError::EmptySubject);
        }
        if relation.is_empty() {
            return Err(TripleError::EmptyRelation);
        }
        Ok(Triple {
            subject: subject.to_owned(),
            relation,
            object: object.trim().to_owned(),
            timestep,
        })
    }

    pub fn subject_key(&self) -> String {
        entity_key(&self.subject)
    }

    pub fn object_key(&self) -> String {
        entity_key(&self.object)
    }

    fn cmp_key(&self) -> (String, String, String, Option<u32>) {
        (
            self.subject_key(),
            self.relation.clone(),
            self.object_key(),
            self.timestep,
        )
    }

    /// Canonical one-line text form: `(subject, relation, object)` with an
    /// optional leading `t=N:` timestep prefix.
    pub fn render_line(&self) -> String {
        use core::fmt::Write;
        let mut line = String::new();
        if let Some(t) = self.timestep {
            let _ = write!(line, "t={}: ", t);
        }
        let _ = write!(line, "({}, {}, {})", self.subject, self.relation, self.object);
        line
    }
}

impl PartialEq for Triple {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key() == other.cmp_key()
    }
}

impl Eq for Triple {}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triple {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.cmp_key().cmp(&other.cmp_key())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_line())
    }
}
