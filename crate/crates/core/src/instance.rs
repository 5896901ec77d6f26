//! JSON instance container shared by the CLI subcommands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BinaryTree;
use crate::newick::{parse_newick, write_newick};
use crate::taxon::{parse_word, render_word, Taxon, TaxonSet, Word};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserved: Option<String>,
    #[serde(default)]
    pub trees: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strings: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

impl InstanceFile {
    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            offset: json_offset(text, e.line(), e.column()),
            message: e.to_string(),
        })?;
        inst.validate()?;
        Ok(inst)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn taxon_set(&self) -> Result<TaxonSet> {
        let set = TaxonSet::from_names(&self.alphabet)?;
        match &self.reserved {
            None => Ok(set),
            Some(r) => {
                let r = Taxon::new(r)?;
                TaxonSet::new(set.members().to_vec(), Some(r))
            }
        }
    }

    pub fn parsed_trees(&self) -> Result<Vec<BinaryTree>> {
        self.trees.iter().map(|t| parse_newick(t)).collect()
    }

    pub fn parsed_strings(&self) -> Result<Vec<Word>> {
        let set = self.taxon_set()?;
        self.strings
            .iter()
            .flatten()
            .map(|s| parse_word(s, Some(&set)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let set = self.taxon_set()?;
        for (i, tree) in self.parsed_trees()?.iter().enumerate() {
            if let Some(t) = tree.taxa().into_iter().find(|t| !set.contains(t)) {
                return Err(Error::InvalidInput(format!("tree {i}: leaf {t} is not in the alphabet")));
            }
        }
        self.parsed_strings()?;
        Ok(())
    }

    pub fn with_trees(alphabet: &TaxonSet, trees: &[BinaryTree]) -> Self {
        InstanceFile {
            alphabet: alphabet.members().iter().map(Taxon::to_string).collect(),
            reserved: alphabet.reserved().map(Taxon::to_string),
            trees: trees.iter().map(write_newick).collect(),
            strings: None,
            budget: None,
        }
    }

    pub fn with_strings(alphabet: &TaxonSet, strings: &[Word], budget: Option<usize>) -> Self {
        InstanceFile {
            alphabet: alphabet.members().iter().map(Taxon::to_string).collect(),
            reserved: alphabet.reserved().map(Taxon::to_string),
            trees: Vec::new(),
            strings: Some(strings.iter().map(|w| render_word(w)).collect()),
            budget,
        }
    }
}

fn json_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    start + column.saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
  "alphabet": ["a", "b", "c", "l"],
  "reserved": "l",
  "trees": ["((a,(b,(c,l))));", "((c,(b,(a,l))));"],
  "strings": ["abc", "c.b"],
  "budget": 2
}
"#;

    #[test]
    fn parse_and_rewrite() {
        let inst = InstanceFile::from_json(SAMPLE).unwrap();
        assert_eq!(inst.parsed_trees().unwrap().len(), 2);
        assert_eq!(inst.parsed_strings().unwrap()[1].len(), 2);
        assert_eq!(inst.taxon_set().unwrap().reserved().unwrap().as_str(), "l");
        let again = InstanceFile::from_json(&inst.to_json()).unwrap();
        assert_eq!(again, inst);
        assert!(inst.to_json().ends_with("}\n"));
    }

    #[test]
    fn rejects_foreign_symbols() {
        let bad = SAMPLE.replace("\"c.b\"", "\"cz\"");
        assert!(InstanceFile::from_json(&bad).is_err());
        let bad = SAMPLE.replace("(c,l)", "(z,l)");
        assert!(InstanceFile::from_json(&bad).is_err());
        let bad = SAMPLE.replace("\"budget\"", "\"budgett\"");
        assert!(matches!(InstanceFile::from_json(&bad), Err(Error::Parse { .. })));
    }
}
