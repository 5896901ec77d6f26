//! Order-dependent labeling of tree nodes and lineage taxon strings (LTS).
//!
//! Under a total order on the taxa, the root is labeled with the smallest
//! taxon and every other internal node with the larger of the minimum
//! taxa below its two children. Each taxon `f` then labels exactly one
//! node `w` above leaf `f`, and the LTS of `f` is the sequence of labels of
//! the nodes strictly between `w` and `f`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{BinaryTree, NodeId, NodeKind};
use crate::taxon::{render_word, Taxon, Word};

/// A total order on a taxon set. Position 0 is the smallest taxon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    seq: Vec<Taxon>,
    rank: HashMap<Taxon, usize>,
}

impl Ordering {
    pub fn new(seq: Vec<Taxon>) -> Result<Self> {
        let mut rank = HashMap::with_capacity(seq.len());
        for (i, t) in seq.iter().enumerate() {
            if rank.insert(t.clone(), i).is_some() {
                return Err(Error::DuplicateTaxon(t.to_string()));
            }
        }
        if seq.is_empty() {
            return Err(Error::InvalidInput("an ordering needs at least one taxon".into()));
        }
        Ok(Ordering { seq, rank })
    }

    pub fn taxa(&self) -> &[Taxon] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn rank(&self, t: &Taxon) -> Option<usize> {
        self.rank.get(t).copied()
    }

    fn rank_of(&self, t: &Taxon) -> usize {
        self.rank[t]
    }

    pub fn smallest(&self) -> &Taxon {
        &self.seq[0]
    }

    pub fn largest(&self) -> &Taxon {
        self.seq.last().expect("non-empty")
    }

    /// Smaller of two taxa under this order.
    pub fn min<'a>(&self, a: &'a Taxon, b: &'a Taxon) -> &'a Taxon {
        if self.rank_of(a) <= self.rank_of(b) {
            a
        } else {
            b
        }
    }

    pub fn taxon_set(&self) -> BTreeSet<Taxon> {
        self.seq.iter().cloned().collect()
    }
}

impl std::fmt::Display for Ordering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = self.seq.iter().map(Taxon::as_str).collect();
        f.write_str(&names.join("<"))
    }
}

/// Taxon label of every non-leaf node, root included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeLabeling {
    labels: BTreeMap<NodeId, Taxon>,
}

impl NodeLabeling {
    pub fn get(&self, v: NodeId) -> Option<&Taxon> {
        self.labels.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Taxon)> {
        self.labels.iter().map(|(&v, t)| (v, t))
    }

    /// The node labeled with `t`.
    pub fn node_of(&self, t: &Taxon) -> Option<NodeId> {
        self.labels.iter().find(|(_, x)| *x == t).map(|(&v, _)| v)
    }
}

/// Per-taxon strings, keyed by taxon.
pub type LtsMap = BTreeMap<Taxon, Word>;

fn check_taxa(tree: &BinaryTree, ord: &Ordering) -> Result<()> {
    let tt = tree.taxon_set();
    let ot = ord.taxon_set();
    if tt != ot {
        let missing: Vec<_> = ot.difference(&tt).map(Taxon::as_str).collect();
        let extra: Vec<_> = tt.difference(&ot).map(Taxon::as_str).collect();
        return Err(Error::TaxonMismatch(format!(
            "ordering taxa missing from tree: {missing:?}; tree taxa missing from ordering: {extra:?}"
        )));
    }
    Ok(())
}

/// Smallest taxon (under `ord`) below each node.
fn min_below(tree: &BinaryTree, ord: &Ordering) -> Vec<Taxon> {
    let mut min: Vec<Option<Taxon>> = vec![None; tree.node_count()];
    for v in tree.topological_order().into_iter().rev() {
        min[v.0] = Some(match tree.label(v) {
            Some(t) => t.clone(),
            None => tree
                .children(v)
                .map(|c| min[c.0].clone().expect("children are done first"))
                .min_by_key(|t| ord.rank_of(t))
                .expect("internal nodes have children"),
        });
    }
    min.into_iter().map(Option::unwrap).collect()
}

pub fn label_internal_nodes(tree: &BinaryTree, ord: &Ordering) -> Result<NodeLabeling> {
    check_taxa(tree, ord)?;
    let min = min_below(tree, ord);
    let mut labels = BTreeMap::new();
    for v in tree.nodes() {
        match tree.kind(v) {
            NodeKind::Root => {
                labels.insert(v, ord.smallest().clone());
            }
            NodeKind::Tree => {
                let label = tree
                    .children(v)
                    .map(|c| &min[c.0])
                    .max_by_key(|t| ord.rank_of(t))
                    .unwrap();
                labels.insert(v, label.clone());
            }
            _ => {}
        }
    }
    Ok(NodeLabeling { labels })
}

/// The LTS of every taxon of `tree` under `ord`.
pub fn lineage_taxon_strings(tree: &BinaryTree, ord: &Ordering) -> Result<LtsMap> {
    let labeling = label_internal_nodes(tree, ord)?;
    let min = min_below(tree, ord);
    let mut out = LtsMap::new();
    for (w, f) in labeling.iter() {
        // Descend from w towards leaf f through the children whose minimum is f.
        let mut lts = Vec::new();
        let mut v = tree
            .children(w)
            .find(|c| &min[c.0] == f)
            .expect("the labeling taxon lies below its node");
        while tree.kind(v) != NodeKind::Leaf {
            lts.push(labeling.get(v).expect("internal nodes are labeled").clone());
            v = tree.children(v).find(|c| &min[c.0] == f).unwrap();
        }
        out.insert(f.clone(), lts);
    }
    Ok(out)
}

/// Every taxon's string uses only taxa greater than itself, and the largest
/// taxon's string is empty.
pub fn check_c1_c2(strings: &LtsMap, ord: &Ordering) -> bool {
    let keys_ok = strings.keys().all(|t| ord.rank(t).is_some());
    let c1 = strings.iter().all(|(t, s)| {
        let r = ord.rank(t).unwrap_or(usize::MAX);
        s.iter().all(|x| ord.rank(x).is_some_and(|rx| rx > r))
    });
    let c2 = strings.get(ord.largest()).is_none_or(|s| s.is_empty());
    keys_ok && c1 && c2
}

/// Recovers the permutation `P` from the LTSs of the line tree `T(P)`.
///
/// When `reserved` is smallest, its LTS is `P` itself. Otherwise the taxa
/// with non-empty LTS form a chain starting at the smallest taxon, each
/// LTS ending with the next taxon of the chain; `P` is the concatenation,
/// over the chain, of each LTS minus its last letter followed by the chain
/// taxon, with the final LTS kept whole when the last chain taxon is the
/// reserved one.
pub fn reconstruct_permutation(strings: &LtsMap, ord: &Ordering, reserved: &Taxon) -> Result<Word> {
    let bad = |msg: String| Error::NotLineTreeProfile(msg);
    if ord.rank(reserved).is_none() {
        return Err(Error::TaxonMismatch(format!("reserved taxon {reserved} not in ordering")));
    }
    if let Some(t) = strings.keys().find(|t| ord.rank(t).is_none()) {
        return Err(Error::TaxonMismatch(format!("taxon {t} not in ordering")));
    }
    if !check_c1_c2(strings, ord) {
        return Err(bad("strings violate the ordering conditions".into()));
    }
    let empty = Vec::new();
    let get = |t: &Taxon| strings.get(t).unwrap_or(&empty);
    let n = ord.len() - 1;
    let mut used = BTreeSet::new();
    let mut out: Word = Vec::with_capacity(n);

    if ord.smallest() == reserved {
        out = get(reserved).clone();
        used.insert(reserved.clone());
    } else {
        let mut anchor = ord.smallest().clone();
        loop {
            let s = get(&anchor);
            let Some(last) = s.last() else {
                return Err(bad(format!("chain taxon {anchor} has an empty string")));
            };
            used.insert(anchor.clone());
            let next_is_end = get(last).is_empty();
            if next_is_end && &anchor == reserved {
                out.extend(s.iter().cloned());
                used.insert(last.clone());
                break;
            }
            out.extend(s[..s.len() - 1].iter().cloned());
            out.push(anchor.clone());
            if next_is_end {
                if last != reserved {
                    return Err(bad(format!(
                        "chain ends at {anchor} but its string ends with {last}, not the reserved taxon"
                    )));
                }
                used.insert(last.clone());
                break;
            }
            anchor = last.clone();
            if used.contains(&anchor) {
                return Err(bad(format!("chain revisits {anchor}")));
            }
        }
    }

    if let Some((t, s)) = strings.iter().find(|(t, s)| !s.is_empty() && !used.contains(*t)) {
        return Err(bad(format!("taxon {t} is off the chain but has string {}", render_word(s))));
    }
    let distinct: BTreeSet<&Taxon> = out.iter().collect();
    if out.len() != n || distinct.len() != n || distinct.contains(reserved) {
        return Err(bad(format!(
            "reconstruction {} is not a permutation of the {n} non-reserved taxa",
            render_word(&out)
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use crate::taxon::{taxon, word};

    fn ord(s: &str) -> Ordering {
        Ordering::new(word(s)).unwrap()
    }

    fn lts(pairs: &[(&str, &str)]) -> LtsMap {
        pairs.iter().map(|(t, s)| (taxon(t), word(s))).collect()
    }

    #[test]
    fn cherry_labels() {
        let t = parse_newick("((a,b));").unwrap();
        let lab = label_internal_nodes(&t, &ord("ab")).unwrap();
        let top = t.children(t.root()).next().unwrap();
        assert_eq!(lab.get(t.root()), Some(&taxon("a")));
        assert_eq!(lab.get(top), Some(&taxon("b")));
    }

    #[test]
    fn taxon_mismatch() {
        let t = parse_newick("((a,b));").unwrap();
        assert!(matches!(label_internal_nodes(&t, &ord("abc")), Err(Error::TaxonMismatch(_))));
        assert!(matches!(lineage_taxon_strings(&t, &ord("ac")), Err(Error::TaxonMismatch(_))));
    }

    #[test]
    fn conditions() {
        let o = ord("abcdel");
        assert!(check_c1_c2(&lts(&[("a", "edb"), ("b", "c"), ("c", "l")]), &o));
        assert!(!check_c1_c2(&lts(&[("a", "a")]), &o));
        assert!(!check_c1_c2(&lts(&[("l", "e")]), &o));
        assert!(!check_c1_c2(&lts(&[("b", "a")]), &o));
    }

    #[test]
    fn reconstruct_rejects_broken_chains() {
        let o = ord("abcdel");
        let l = taxon("l");
        // chain a -> b, but b's string is empty and b is not the reserved taxon
        let err = reconstruct_permutation(&lts(&[("a", "edb")]), &o, &l).unwrap_err();
        assert!(matches!(err, Error::NotLineTreeProfile(_)), "{err}");
        // stray non-empty string off the chain
        let err = reconstruct_permutation(&lts(&[("a", "edb"), ("b", "c"), ("c", "l"), ("d", "e")]), &o, &l)
            .unwrap_err();
        assert!(matches!(err, Error::NotLineTreeProfile(_)), "{err}");
    }

    #[test]
    fn reconstruct_case_two() {
        let o = ord("labcde");
        let p = reconstruct_permutation(&lts(&[("l", "caebd")]), &o, &taxon("l")).unwrap();
        assert_eq!(p, word("caebd"));
    }
}
