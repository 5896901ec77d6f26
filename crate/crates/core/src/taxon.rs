//! Taxon names, taxon sets and strings over taxa.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Characters that may not appear in a taxon name.
pub const RESERVED_CHARS: &[char] = &['(', ')', ',', ';', ':', '#', '.'];

/// Name used for the extra leaf when none is supplied.
pub const DEFAULT_RESERVED_NAME: &str = "_ell";

/// A leaf name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Taxon(Arc<str>);

impl Taxon {
    pub fn new(name: &str) -> Result<Self> {
        if name.is_empty()
            || name
                .chars()
                .any(|c| c.is_whitespace() || RESERVED_CHARS.contains(&c))
        {
            return Err(Error::InvalidTaxon(name.to_string()));
        }
        Ok(Taxon(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A string over taxa.
pub type Word = Vec<Taxon>;

/// An ordered set of taxa with an optional reserved member (the extra leaf
/// shared by all line trees).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaxonSet {
    members: Vec<Taxon>,
    reserved: Option<Taxon>,
}

impl TaxonSet {
    pub fn new(members: Vec<Taxon>, reserved: Option<Taxon>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for t in &members {
            if !seen.insert(t) {
                return Err(Error::DuplicateTaxon(t.to_string()));
            }
        }
        if let Some(r) = &reserved {
            if !seen.contains(r) {
                return Err(Error::InvalidInput(format!(
                    "reserved taxon {r} is not a member"
                )));
            }
        }
        Ok(TaxonSet { members, reserved })
    }

    /// Builds `sigma` plus the reserved taxon appended at the end.
    pub fn with_reserved(sigma: &[Taxon], reserved: Taxon) -> Result<Self> {
        let mut members = sigma.to_vec();
        members.push(reserved.clone());
        TaxonSet::new(members, Some(reserved))
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let members = names
            .iter()
            .map(|n| Taxon::new(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        TaxonSet::new(members, None)
    }

    pub fn members(&self) -> &[Taxon] {
        &self.members
    }

    pub fn reserved(&self) -> Option<&Taxon> {
        self.reserved.as_ref()
    }

    /// Members other than the reserved taxon.
    pub fn sigma(&self) -> Vec<Taxon> {
        self.members
            .iter()
            .filter(|t| Some(*t) != self.reserved.as_ref())
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &Taxon) -> bool {
        self.members.contains(t)
    }

    pub fn get(&self, name: &str) -> Option<&Taxon> {
        self.members.iter().find(|t| t.as_str() == name)
    }
}

/// Parses a string over taxa.
///
/// Tokens may be separated by `.` or `,`. Without separators the text is
/// split by longest match against `alphabet` when one is given, and into
/// single characters otherwise.
pub fn parse_word(text: &str, alphabet: Option<&TaxonSet>) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let lookup = |tok: &str, at: usize| -> Result<Taxon> {
        match alphabet {
            Some(a) => a
                .get(tok)
                .cloned()
                .ok_or_else(|| Error::parse(at, format!("symbol {tok:?} not in alphabet"))),
            None => Taxon::new(tok).map_err(|_| Error::parse(at, format!("bad symbol {tok:?}"))),
        }
    };
    if text.contains(['.', ',']) {
        let mut out = Vec::new();
        let mut at = 0;
        for tok in text.split(['.', ',']) {
            out.push(lookup(tok.trim(), at)?);
            at += tok.len() + 1;
        }
        return Ok(out);
    }
    match alphabet {
        None => text
            .char_indices()
            .map(|(i, c)| lookup(&c.to_string(), i))
            .collect(),
        Some(a) => {
            let mut names: Vec<&str> = a.members().iter().map(Taxon::as_str).collect();
            names.sort_by_key(|n| std::cmp::Reverse(n.len()));
            let mut out = Vec::new();
            let mut rest = text;
            while !rest.is_empty() {
                let at = text.len() - rest.len();
                let name = names
                    .iter()
                    .find(|n| rest.starts_with(**n))
                    .ok_or_else(|| Error::parse(at, format!("no alphabet symbol matches {rest:?}")))?;
                out.push(lookup(name, at)?);
                rest = &rest[name.len()..];
            }
            Ok(out)
        }
    }
}

/// Renders a word: plain concatenation when every name is a single
/// character, `.`-separated otherwise.
pub fn render_word(word: &[Taxon]) -> String {
    if word.iter().all(|t| t.as_str().chars().count() == 1) {
        word.iter().map(Taxon::as_str).collect()
    } else {
        word.iter().map(Taxon::as_str).collect::<Vec<_>>().join(".")
    }
}

/// Convenience for tests and examples: one taxon per character.
pub fn word(text: &str) -> Word {
    text.chars()
        .map(|c| Taxon::new(&c.to_string()).expect("valid single-character taxon"))
        .collect()
}

/// Convenience: a taxon from a name known to be valid.
pub fn taxon(name: &str) -> Taxon {
    Taxon::new(name).expect("valid taxon name")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_characters() {
        for bad in ["", "a b", "a(", "x;", "h#1", "a:b", "a.b"] {
            assert!(Taxon::new(bad).is_err(), "{bad:?}");
        }
        assert!(Taxon::new("_ell").is_ok());
    }

    #[test]
    fn taxon_set_rejects_duplicates_and_foreign_reserved() {
        assert!(TaxonSet::from_names(&["a", "a"]).is_err());
        assert!(TaxonSet::new(vec![taxon("a")], Some(taxon("b"))).is_err());
        let s = TaxonSet::with_reserved(&word("abc"), taxon("l")).unwrap();
        assert_eq!(s.sigma(), word("abc"));
        assert_eq!(s.reserved(), Some(&taxon("l")));
    }

    #[test]
    fn word_parsing() {
        assert_eq!(parse_word("edabc", None).unwrap(), word("edabc"));
        assert_eq!(parse_word("", None).unwrap(), Vec::<Taxon>::new());
        let xs = TaxonSet::from_names(&["x1", "x2", "x10"]).unwrap();
        let w = parse_word("x10x1x2", Some(&xs)).unwrap();
        assert_eq!(render_word(&w), "x10.x1.x2");
        assert_eq!(parse_word("x1.x2", Some(&xs)).unwrap(), vec![taxon("x1"), taxon("x2")]);
        assert!(matches!(parse_word("x3", Some(&xs)), Err(Error::Parse { offset: 0, .. })));
        assert_eq!(render_word(&word("dce")), "dce");
    }
}
