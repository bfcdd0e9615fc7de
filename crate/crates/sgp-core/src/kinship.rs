//! Kinship labels and their composition algebra.
//!
//! A label is read against an anchor person: in the triple `(A, r, B)` the
//! label `r` describes `B`'s position relative to `A` ("B is the r of A",
//! the `hasR` edge style). Composition answers "A's r1's r2 is A's ?":
//! given `B = r1 of A` and `C = r2 of B`, it yields the label of `C`
//! relative to `A`.
//!
//! The table assumes the three people are distinct, siblings are full
//! siblings, and marriages are monogamous and between unrelated families.
//! Blood positions (uncle, nephew, cousin) are blood-only; affinal labels
//! cover direct in-laws. Compositions that are ambiguous under these
//! assumptions are undefined rather than guessed.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::triple::canonical_relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Gender {
    Male,
    Female,
    Unknown,
}

/// Structural position relative to the anchor person.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Position {
    /// Identity element of composition; not a surface label.
    SelfSame,
    Parent,
    Child,
    Sibling,
    Spouse,
    Grandparent,
    Grandchild,
    /// Parent's sibling (uncle / aunt).
    ParentSibling,
    /// Sibling's child (nephew / niece).
    SiblingChild,
    Cousin,
    ParentInLaw,
    ChildInLaw,
    SiblingInLaw,
}

/// `(generation delta, lateral, in-law, gender)` signature of a label.
/// Generation deltas add under composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub generation_delta: i8,
    pub lateral: bool,
    pub in_law: bool,
    pub gender: Gender,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KinshipRelation {
    pub position: Position,
    pub gender: Gender,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KinshipError {
    /// The composition (or label) is not determinable from the table.
    Undefined,
    NotKinship(String),
}

impl fmt::Display for KinshipError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KinshipError::Undefined => write!(f, "relation not determinable"),
            KinshipError::NotKinship(label) => {
                write!(f, "'{}' is not a kinship relation", label)
            }
        }
    }
}

crate::std_error!(KinshipError);

/// The 23 canonical surface labels.
pub const CANONICAL_LABELS: [&str; 23] = [
    "father",
    "mother",
    "son",
    "daughter",
    "brother",
    "sister",
    "husband",
    "wife",
    "grandfather",
    "grandmother",
    "grandson",
    "granddaughter",
    "uncle",
    "aunt",
    "nephew",
    "niece",
    "cousin",
    "father-in-law",
    "mother-in-law",
    "son-in-law",
    "daughter-in-law",
    "brother-in-law",
    "sister-in-law",
];

impl KinshipRelation {
    pub const IDENTITY: KinshipRelation = KinshipRelation {
        position: Position::SelfSame,
        gender: Gender::Unknown,
    };

    pub fn new(position: Position, gender: Gender) -> Self {
        KinshipRelation { position, gender }
    }

    /// Parses a label or alias ("hasSon", "grand_mother", "grandpa", ...).
    /// Neutral words ("parent", "sibling") parse with unknown gender.
    pub fn parse(label: &str) -> Result<Self, KinshipError> {
        use Gender::*;
        use Position::*;
        let mut norm = canonical_relation(label);
        // "hasSon" canonicalizes to "hasson"; peel the verb prefix.
        for prefix in ["has ", "has-", "has"] {
            if norm.len() > prefix.len() && norm.starts_with(prefix) {
                norm = String::from(&norm[prefix.len()..]);
                break;
            }
        }
        let norm = norm.replace(' ', "-").replace("--", "-");
        let (position, gender) = match norm.as_str() {
            "father" | "dad" | "papa" => (Parent, Male),
            "mother" | "mom" | "mum" | "mama" => (Parent, Female),
            "parent" => (Parent, Unknown),
            "son" => (Child, Male),
            "daughter" => (Child, Female),
            "child" => (Child, Unknown),
            "brother" => (Sibling, Male),
            "sister" => (Sibling, Female),
            "sibling" => (Sibling, Unknown),
            "husband" => (Spouse, Male),
            "wife" => (Spouse, Female),
            "spouse" | "partner" => (Spouse, Unknown),
            "grandfather" | "grandpa" | "grand-father" => (Grandparent, Male),
            "grandmother" | "grandma" | "grand-mother" => (Grandparent, Female),
            "grandparent" => (Grandparent, Unknown),
            "grandson" | "grand-son" => (Grandchild, Male),
            "granddaughter" | "grand-daughter" => (Grandchild, Female),
            "grandchild" => (Grandchild, Unknown),
            "uncle" => (ParentSibling, Male),
            "aunt" | "aunty" | "auntie" => (ParentSibling, Female),
            "nephew" => (SiblingChild, Male),
            "niece" => (SiblingChild, Female),
            "cousin" => (Cousin, Unknown),
            "father-in-law" => (ParentInLaw, Male),
            "mother-in-law" => (ParentInLaw, Female),
            "son-in-law" => (ChildInLaw, Male),
            "daughter-in-law" => (ChildInLaw, Female),
            "brother-in-law" => (SiblingInLaw, Male),
            "sister-in-law" => (SiblingInLaw, Female),
            _ => return Err(KinshipError::NotKinship(String::from(label))),
        };
        Ok(KinshipRelation { position, gender })
    }

    /// Canonical surface label; the gender-neutral wording when gender is
    /// unknown or the position has a single surface form.
    pub fn label(&self) -> &'static str {
        use Gender::*;
        use Position::*;
        match (self.position, self.gender) {
            (SelfSame, _) => "self",
            (Parent, Male) => "father",
            (Parent, Female) => "mother",
            (Parent, Unknown) => "parent",
            (Child, Male) => "son",
            (Child, Female) => "daughter",
            (Child, Unknown) => "child",
            (Sibling, Male) => "brother",
            (Sibling, Female) => "sister",
            (Sibling, Unknown) => "sibling",
            (Spouse, Male) => "husband",
            (Spouse, Female) => "wife",
            (Spouse, Unknown) => "spouse",
            (Grandparent, Male) => "grandfather",
            (Grandparent, Female) => "grandmother",
            (Grandparent, Unknown) => "grandparent",
            (Grandchild, Male) => "grandson",
            (Grandchild, Female) => "granddaughter",
            (Grandchild, Unknown) => "grandchild",
            (ParentSibling, Male) => "uncle",
            (ParentSibling, Female) => "aunt",
            (ParentSibling, Unknown) => "uncle or aunt",
            (SiblingChild, Male) => "nephew",
            (SiblingChild, Female) => "niece",
            (SiblingChild, Unknown) => "nephew or niece",
            (Cousin, _) => "cousin",
            (ParentInLaw, Male) => "father-in-law",
            (ParentInLaw, Female) => "mother-in-law",
            (ParentInLaw, Unknown) => "parent-in-law",
            (ChildInLaw, Male) => "son-in-law",
            (ChildInLaw, Female) => "daughter-in-law",
            (ChildInLaw, Unknown) => "child-in-law",
            (SiblingInLaw, Male) => "brother-in-law",
            (SiblingInLaw, Female) => "sister-in-law",
            (SiblingInLaw, Unknown) => "sibling-in-law",
        }
    }

    pub fn signature(&self) -> Signature {
        use Position::*;
        let (generation_delta, lateral, in_law) = match self.position {
            SelfSame => (0, false, false),
            Parent => (1, false, false),
            Child => (-1, false, false),
            Sibling => (0, true, false),
            Spouse => (0, false, false),
            Grandparent => (2, false, false),
            Grandchild => (-2, false, false),
            ParentSibling => (1, true, false),
            SiblingChild => (-1, true, false),
            Cousin => (0, true, false),
            ParentInLaw => (1, false, true),
            ChildInLaw => (-1, false, true),
            SiblingInLaw => (0, true, true),
        };
        Signature {
            generation_delta,
            lateral,
            in_law,
            gender: self.gender,
        }
    }

    /// The same relation seen from the other person. `other_gender` is the
    /// gender of the person the inverted label will describe.
    pub fn invert(&self, other_gender: Gender) -> KinshipRelation {
        use Position::*;
        let position = match self.position {
            SelfSame => SelfSame,
            Parent => Child,
            Child => Parent,
            Sibling => Sibling,
            Spouse => Spouse,
            Grandparent => Grandchild,
            Grandchild => Grandparent,
            ParentSibling => SiblingChild,
            SiblingChild => ParentSibling,
            Cousin => Cousin,
            ParentInLaw => ChildInLaw,
            ChildInLaw => ParentInLaw,
            SiblingInLaw => SiblingInLaw,
        };
        KinshipRelation {
            position,
            gender: other_gender,
        }
    }
}

impl fmt::Display for KinshipRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Position half of the composition table: `B = x of A`, `C = y of B`
/// gives `C = ? of A`. `None` marks undefined or ambiguous compositions.
fn compose_position(x: Position, y: Position) -> Option<Position> {
    use Position::*;
    Some(match (x, y) {
        (SelfSame, other) | (other, SelfSame) => other,

        // my parent's ...
        (Parent, Parent) => Grandparent,
        (Parent, Child) => Sibling,
        (Parent, Sibling) => ParentSibling,
        (Parent, Spouse) => Parent,
        (Parent, SiblingChild) => Cousin,
        (Parent, ParentInLaw) => Grandparent,
        (Parent, SiblingInLaw) => ParentSibling,

        // my child's ...
        (Child, Parent) => Spouse,
        (Child, Child) => Grandchild,
        (Child, Sibling) => Child,
        (Child, Spouse) => ChildInLaw,

        // my sibling's ...
        (Sibling, Parent) => Parent,
        (Sibling, Child) => SiblingChild,
        (Sibling, Sibling) => Sibling,
        (Sibling, Spouse) => SiblingInLaw,
        (Sibling, Grandparent) => Grandparent,
        (Sibling, ParentSibling) => ParentSibling,
        (Sibling, Cousin) => Cousin,

        // my spouse's ...
        (Spouse, Parent) => ParentInLaw,
        (Spouse, Child) => Child,
        (Spouse, Sibling) => SiblingInLaw,
        (Spouse, Grandchild) => Grandchild,
        (Spouse, ParentInLaw) => Parent,
        (Spouse, ChildInLaw) => ChildInLaw,

        // my grandparent's ...
        (Grandparent, Child) => ParentSibling,
        (Grandparent, Spouse) => Grandparent,

        // my grandchild's ...
        (Grandchild, Sibling) => Grandchild,

        // my uncle's / aunt's ...
        (ParentSibling, Parent) => Grandparent,
        (ParentSibling, Child) => Cousin,
        (ParentSibling, Sibling) => ParentSibling,

        // my nephew's / niece's ...
        (SiblingChild, Sibling) => SiblingChild,

        // my cousin's ...
        (Cousin, Sibling) => Cousin,

        // my parent-in-law's ...
        (ParentInLaw, Spouse) => ParentInLaw,

        // my child-in-law's ...
        (ChildInLaw, Spouse) => Child,
        (ChildInLaw, Child) => Grandchild,

        _ => return None,
    })
}

/// Composes two relations along a path `A -> B -> C`. `r_ab` is the label on
/// the `A -> B` edge (describing B), `r_bc` on `B -> C`; the result describes
/// C relative to A, gendered by `r_bc`'s person.
pub fn compose_kinship(
    r_ab: KinshipRelation,
    r_bc: KinshipRelation,
) -> Result<KinshipRelation, KinshipError> {
    let position = compose_position(r_ab.position, r_bc.position).ok_or(KinshipError::Undefined)?;
    // The result describes the terminal person, so it takes r_bc's gender —
    // unless r_bc is the identity, in which case the terminal person is B.
    let gender = if r_bc.position == Position::SelfSame {
        r_ab.gender
    } else {
        r_bc.gender
    };
    Ok(KinshipRelation { position, gender })
}

/// All `(label, relation)` pairs for the canonical label set.
pub fn canonical_relations() -> Vec<(&'static str, KinshipRelation)> {
    CANONICAL_LABELS
        .iter()
        .map(|&l| (l, KinshipRelation::parse(l).expect("canonical label parses")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(label: &str) -> KinshipRelation {
        KinshipRelation::parse(label).unwrap()
    }

    #[test]
    fn labels_round_trip() {
        for label in CANONICAL_LABELS {
            assert_eq!(rel(label).label(), label);
        }
    }

    #[test]
    fn aliases_and_prefixes_parse() {
        assert_eq!(rel("hasSon"), rel("son"));
        assert_eq!(rel("grand_mother"), rel("grandmother"));
        assert_eq!(rel("grandpa"), rel("grandfather"));
        assert_eq!(rel("father in law"), rel("father-in-law"));
        assert!(KinshipRelation::parse("friend").is_err());
    }

    #[test]
    fn frameworks_chain_composes_to_cousin() {
        // father's brother = uncle; uncle's sister = aunt; aunt's daughter =
        // cousin; cousin's brother = cousin.
        let uncle = compose_kinship(rel("father"), rel("brother")).unwrap();
        assert_eq!(uncle.label(), "uncle");
        let aunt = compose_kinship(uncle, rel("sister")).unwrap();
        assert_eq!(aunt.label(), "aunt");
        let cousin = compose_kinship(aunt, rel("daughter")).unwrap();
        assert_eq!(cousin.label(), "cousin");
        let still_cousin = compose_kinship(cousin, rel("brother")).unwrap();
        assert_eq!(still_cousin.label(), "cousin");
    }

    #[test]
    fn identity_is_neutral() {
        let r = compose_kinship(KinshipRelation::IDENTITY, rel("father")).unwrap();
        assert_eq!(r.label(), "father");
        let r = compose_kinship(rel("aunt"), KinshipRelation::IDENTITY).unwrap();
        assert_eq!(r.label(), "aunt");
    }

    #[test]
    fn cousin_of_cousin_is_undefined() {
        assert_eq!(
            compose_kinship(rel("cousin"), rel("cousin")),
            Err(KinshipError::Undefined)
        );
    }

    #[test]
    fn generation_deltas_add_across_the_table() {
        let rels = canonical_relations();
        let mut defined = 0;
        for (_, a) in &rels {
            for (_, b) in &rels {
                if let Ok(c) = compose_kinship(*a, *b) {
                    defined += 1;
                    assert_eq!(
                        c.signature().generation_delta,
                        a.signature().generation_delta + b.signature().generation_delta,
                        "delta must add for {} o {} = {}",
                        a.label(),
                        b.label(),
                        c.label()
                    );
                }
            }
        }
        assert!(defined > 0);
    }

    #[test]
    fn gendered_pairs_share_signatures() {
        for (m, f) in [
            ("father", "mother"),
            ("son", "daughter"),
            ("brother", "sister"),
            ("husband", "wife"),
            ("grandfather", "grandmother"),
            ("grandson", "granddaughter"),
            ("uncle", "aunt"),
            ("nephew", "niece"),
            ("father-in-law", "mother-in-law"),
            ("son-in-law", "daughter-in-law"),
            ("brother-in-law", "sister-in-law"),
        ] {
            let sm = rel(m).signature();
            let sf = rel(f).signature();
            assert_eq!(sm.generation_delta, sf.generation_delta);
            assert_eq!(sm.lateral, sf.lateral);
            assert_eq!(sm.in_law, sf.in_law);
            assert_ne!(sm.gender, sf.gender);
        }
    }
}
