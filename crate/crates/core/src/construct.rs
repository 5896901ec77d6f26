//! Line trees of permutations, one-component networks of strings, the
//! path-and-collector network construction from per-taxon strings, and a
//! brute-force display checker.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::lts::{check_c1_c2, LtsMap, Ordering};
use crate::model::{BinaryTree, NodeId, NodeKind, PhyloNetwork};
use crate::taxon::{render_word, Taxon, TaxonSet, Word};

/// Default cap on the number of reticulation-parent selections tried.
pub const DEFAULT_DISPLAY_BUDGET: usize = 1_000_000;

fn check_permutation(p: &[Taxon], reserved: &Taxon) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidInput("permutation is empty".into()));
    }
    let mut seen = BTreeSet::new();
    for t in p {
        if t == reserved {
            return Err(Error::InvalidInput(format!("permutation contains the reserved taxon {t}")));
        }
        if !seen.insert(t) {
            return Err(Error::DuplicateTaxon(t.to_string()));
        }
    }
    Ok(())
}

/// The line tree `T(P)`: a spine `v_1 ... v_n` below the root with `p_i`
/// hanging off `v_i` and the reserved leaf as the second child of `v_n`.
pub fn line_tree_from_permutation(p: &[Taxon], reserved: &Taxon) -> Result<BinaryTree> {
    check_permutation(p, reserved)?;
    let mut dag = Dag::new();
    let mut parent = dag.add_node(None);
    for t in p {
        let v = dag.add_node(None);
        dag.add_edge(parent, v);
        let leaf = dag.add_node(Some(t.clone()));
        dag.add_edge(v, leaf);
        parent = v;
    }
    let ell = dag.add_node(Some(reserved.clone()));
    dag.add_edge(parent, ell);
    BinaryTree::from_dag(&dag)
}

/// Inverse of [`line_tree_from_permutation`].
pub fn permutation_from_line_tree(tree: &BinaryTree, reserved: &Taxon) -> Result<Word> {
    if !tree.is_line_tree() {
        return Err(Error::NotInImage("not a line tree".into()));
    }
    if tree.leaf(reserved).is_none() {
        return Err(Error::TaxonMismatch(format!("reserved taxon {reserved} is not a leaf")));
    }
    let mut out = Vec::new();
    let mut v = tree.children(tree.root()).next().expect("root has a child");
    if tree.kind(v) == NodeKind::Leaf {
        return Err(Error::NotInImage("single-leaf tree".into()));
    }
    loop {
        let kids: Vec<NodeId> = tree.children(v).collect();
        let leaves: Vec<&Taxon> = kids.iter().filter_map(|&c| tree.label(c)).collect();
        match leaves.as_slice() {
            [a, b] => {
                let last = if *b == reserved {
                    *a
                } else if *a == reserved {
                    *b
                } else {
                    return Err(Error::NotInImage(format!(
                        "the lowest cherry ({a}, {b}) does not contain {reserved}"
                    )));
                };
                out.push(last.clone());
                return Ok(out);
            }
            [a] => {
                if *a == reserved {
                    return Err(Error::NotInImage(format!(
                        "{reserved} hangs off the spine above the lowest cherry"
                    )));
                }
                out.push((*a).clone());
                v = *kids
                    .iter()
                    .find(|&&c| tree.kind(c) != NodeKind::Leaf)
                    .expect("one internal child");
            }
            _ => unreachable!("line trees have a leaf child at every tree node"),
        }
    }
}

/// The one-component network `N(Q)`: a spine `v_1 ... v_m` ending in the
/// reserved leaf, one collector per symbol of `Q` fed by every spine node
/// carrying that symbol, then degree-2 suppression. Its hybridization
/// number is `|Q|` minus the number of non-reserved taxa.
pub fn one_component_network(q: &[Taxon], alphabet: &TaxonSet) -> Result<PhyloNetwork> {
    let reserved = alphabet
        .reserved()
        .ok_or_else(|| Error::InvalidInput("alphabet has no reserved taxon".into()))?;
    let sigma = alphabet.sigma();
    if let Some(t) = q.iter().find(|t| !sigma.contains(t)) {
        return Err(Error::InvalidInput(format!("symbol {t} is not in the alphabet")));
    }
    if let Some(t) = sigma.iter().find(|t| !q.contains(t)) {
        return Err(Error::InvalidInput(format!(
            "symbol {t} does not occur in {}; its leaf would be unreachable",
            render_word(q)
        )));
    }
    let mut dag = Dag::new();
    let root = dag.add_node(None);
    let mut collectors = BTreeMap::new();
    for t in &sigma {
        let r = dag.add_node(None);
        let leaf = dag.add_node(Some(t.clone()));
        dag.add_edge(r, leaf);
        collectors.insert(t.clone(), r);
    }
    let mut parent = root;
    for t in q {
        let v = dag.add_node(None);
        dag.add_edge(parent, v);
        dag.add_edge(v, collectors[t]);
        parent = v;
    }
    let ell = dag.add_node(Some(reserved.clone()));
    dag.add_edge(parent, ell);
    dag.suppress_degree2()?;
    PhyloNetwork::from_dag(&dag)
}

/// Node roles of the path-and-collector scaffold before contraction.
#[derive(Clone, Debug)]
pub struct ConstructionScaffold {
    pub dag: Dag,
    /// Head node `h_i` of each taxon's path, in ordering position.
    pub heads: Vec<usize>,
    /// Inner path nodes `v_i1 ... v_ik` of each taxon, in ordering position.
    pub inner: Vec<Vec<usize>>,
    /// Cross edges `(v_im, h_j)`.
    pub cross_edges: Vec<(usize, usize)>,
}

/// Steps one and two: a vertical path `h_i, v_i1, ..., v_ik, pi_i` per
/// taxon and an edge from `v_im` to `h_j` whenever the m-th symbol of
/// `beta_i` is `pi_j`. The head of the smallest taxon serves as the root.
pub fn build_scaffold(ord: &Ordering, betas: &LtsMap) -> Result<ConstructionScaffold> {
    if let Some(t) = betas.keys().find(|t| ord.rank(t).is_none()) {
        return Err(Error::TaxonMismatch(format!("taxon {t} is not in the ordering")));
    }
    if !check_c1_c2(betas, ord) {
        return Err(Error::Conditions(
            "each string must use only larger taxa, and the largest taxon's string must be empty"
                .into(),
        ));
    }
    let empty = Vec::new();
    let mut dag = Dag::new();
    let mut heads = Vec::with_capacity(ord.len());
    let mut inner = Vec::with_capacity(ord.len());
    for t in ord.taxa() {
        let h = dag.add_node(None);
        let mut prev = h;
        let mut path = Vec::new();
        for _ in betas.get(t).unwrap_or(&empty) {
            let v = dag.add_node(None);
            dag.add_edge(prev, v);
            path.push(v);
            prev = v;
        }
        let leaf = dag.add_node(Some(t.clone()));
        dag.add_edge(prev, leaf);
        heads.push(h);
        inner.push(path);
    }
    let mut cross_edges = Vec::new();
    for (i, t) in ord.taxa().iter().enumerate() {
        for (m, x) in betas.get(t).unwrap_or(&empty).iter().enumerate() {
            let j = ord.rank(x).expect("checked by the ordering conditions");
            let e = (inner[i][m], heads[j]);
            dag.add_edge(e.0, e.1);
            cross_edges.push(e);
        }
    }
    Ok(ConstructionScaffold {
        dag,
        heads,
        inner,
        cross_edges,
    })
}

/// The network built from per-taxon strings: scaffold, then contraction of
/// every head with a single incoming edge.
///
/// Every taxon other than the smallest must occur in some string, as is
/// the case for lineage taxon strings and their supersequences; otherwise
/// its path would not be reachable from the root.
pub fn construct_network(ord: &Ordering, betas: &LtsMap) -> Result<PhyloNetwork> {
    let mut scaffold = build_scaffold(ord, betas)?;
    let unreached: Vec<&Taxon> = ord
        .taxa()
        .iter()
        .zip(&scaffold.heads)
        .skip(1)
        .filter(|(_, &h)| scaffold.dag.indegree(h) == 0)
        .map(|(t, _)| t)
        .collect();
    if !unreached.is_empty() {
        return Err(Error::Conditions(format!(
            "taxa {unreached:?} occur in no string, so their paths are unreachable"
        )));
    }
    let heads: BTreeSet<usize> = scaffold.heads.iter().skip(1).copied().collect();
    scaffold.dag.suppress_where(|v| heads.contains(&v))?;
    PhyloNetwork::from_dag(&scaffold.dag)
}

fn selection_count(net: &PhyloNetwork, budget: usize) -> Result<(Vec<NodeId>, usize)> {
    let rets: Vec<NodeId> = net.reticulations().collect();
    let mut total: usize = 1;
    for &r in &rets {
        total = total
            .checked_mul(net.parents(r).count())
            .filter(|&t| t <= budget)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "more than {budget} reticulation-parent selections to try"
                ))
            })?;
    }
    Ok((rets, total))
}

/// Calls `visit` with each tree obtained by keeping one incoming edge per
/// reticulation, pruning, and suppressing degree-2 nodes. Stops early when
/// `visit` returns `true`; the return value says whether it did.
pub fn for_each_displayed_tree(
    net: &PhyloNetwork,
    budget: usize,
    mut visit: impl FnMut(&BinaryTree) -> bool,
) -> Result<bool> {
    let (rets, total) = selection_count(net, budget)?;
    let parents: Vec<Vec<NodeId>> = rets.iter().map(|&r| net.parents(r).collect()).collect();
    for mut code in 0..total {
        let mut dag = net.dag().clone();
        for (r, ps) in rets.iter().zip(&parents) {
            let keep = code % ps.len();
            code /= ps.len();
            for (i, p) in ps.iter().enumerate() {
                if i != keep {
                    dag.remove_edge(p.0, r.0);
                }
            }
        }
        dag.retain_reachable(net.root().0);
        dag.prune_dead_ends();
        dag.suppress_degree2()?;
        if let Ok(tree) = BinaryTree::from_dag(&dag) {
            if tree.taxon_set().len() == net.taxa().len() && visit(&tree) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Canonical forms of all trees displayed by `net`.
pub fn displayed_tree_forms(net: &PhyloNetwork, budget: usize) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for_each_displayed_tree(net, budget, |t| {
        out.insert(t.canonical_form());
        false
    })?;
    Ok(out)
}

/// Whether some choice of one incoming edge per reticulation yields `tree`.
pub fn is_displayed(tree: &BinaryTree, net: &PhyloNetwork, budget: usize) -> Result<bool> {
    if tree.taxon_set() != net.taxa().into_iter().collect() {
        return Err(Error::TaxonMismatch("tree and network have different leaves".into()));
    }
    let target = tree.canonical_form();
    for_each_displayed_tree(net, budget, |t| t.canonical_form() == target)
}

/// Permutations `P` whose line tree `T(P)` is displayed by `net`.
pub fn displayed_line_trees(
    net: &PhyloNetwork,
    reserved: &Taxon,
    budget: usize,
) -> Result<BTreeSet<Word>> {
    let mut out = BTreeSet::new();
    for_each_displayed_tree(net, budget, |t| {
        if let Ok(p) = permutation_from_line_tree(t, reserved) {
            out.insert(p);
        }
        false
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use crate::taxon::{taxon, word};

    fn ell() -> Taxon {
        taxon("l")
    }

    fn alphabet(sigma: &str) -> TaxonSet {
        TaxonSet::with_reserved(&word(sigma), ell()).unwrap()
    }

    #[test]
    fn line_tree_shapes() {
        let t = line_tree_from_permutation(&word("edabc"), &ell()).unwrap();
        let drawn = parse_newick("((e,(d,(a,(b,(c,l))))));").unwrap();
        assert_eq!(t.canonical_form(), drawn.canonical_form());
        assert!(t.is_line_tree());
        assert_eq!(
            line_tree_from_permutation(&word("a"), &ell()).unwrap().canonical_form(),
            "((a,l));"
        );
        assert_eq!(
            line_tree_from_permutation(&word("ab"), &ell()).unwrap().canonical_form(),
            "((a,(b,l)));"
        );
        assert!(line_tree_from_permutation(&word("aba"), &ell()).is_err());
    }

    #[test]
    fn permutation_decoding() {
        let drawn = parse_newick("((e,(d,(a,(b,(c,l))))));").unwrap();
        assert_eq!(permutation_from_line_tree(&drawn, &ell()).unwrap(), word("edabc"));
        let t = line_tree_from_permutation(&word("caebd"), &ell()).unwrap();
        assert_eq!(permutation_from_line_tree(&t, &ell()).unwrap(), word("caebd"));
        let high = parse_newick("((l,(a,(b,c))));").unwrap();
        assert!(matches!(permutation_from_line_tree(&high, &ell()), Err(Error::NotInImage(_))));
        let balanced = parse_newick("(((a,b),(c,l)));").unwrap();
        assert!(matches!(permutation_from_line_tree(&balanced, &ell()), Err(Error::NotInImage(_))));
    }

    #[test]
    fn one_component_hn() {
        let n = one_component_network(&word("ababc"), &alphabet("abc")).unwrap();
        assert_eq!(n.hybridization_number(), 2);
        assert!(n.is_tree_child());
        let text = n.canonical_form();
        assert_eq!(text.matches("#H1").count(), 2, "{text}");
        assert_eq!(text.matches("#H2").count(), 2, "{text}");
        let p = one_component_network(&word("cab"), &alphabet("abc")).unwrap();
        let t = line_tree_from_permutation(&word("cab"), &ell()).unwrap();
        assert_eq!(p.canonical_form(), t.canonical_form());
        assert!(one_component_network(&word("ab"), &alphabet("abc")).is_err());
        assert!(one_component_network(&word("abcd"), &alphabet("abc")).is_err());
    }

    #[test]
    fn construction_requires_conditions_and_coverage() {
        let ord = Ordering::new(word("abl")).unwrap();
        let bad: LtsMap = [(taxon("b"), word("a"))].into_iter().collect();
        assert!(matches!(construct_network(&ord, &bad), Err(Error::Conditions(_))));
        let sparse: LtsMap = [(taxon("a"), word("l"))].into_iter().collect();
        assert!(matches!(construct_network(&ord, &sparse), Err(Error::Conditions(_))));
        let ok: LtsMap = [(taxon("a"), word("b")), (taxon("b"), word("l"))].into_iter().collect();
        let net = construct_network(&ord, &ok).unwrap();
        assert_eq!(net.hybridization_number(), 0);
        assert_eq!(net.canonical_form(), "((a,(b,l)));");
    }

    #[test]
    fn display_examples() {
        let t = line_tree_from_permutation(&word("ab"), &ell()).unwrap();
        assert!(is_displayed(&t, t.as_network(), DEFAULT_DISPLAY_BUDGET).unwrap());
        let nba = one_component_network(&word("ba"), &alphabet("ab")).unwrap();
        assert!(!is_displayed(&t, &nba, DEFAULT_DISPLAY_BUDGET).unwrap());
        let naba = one_component_network(&word("aba"), &alphabet("ab")).unwrap();
        let got = displayed_line_trees(&naba, &ell(), DEFAULT_DISPLAY_BUDGET).unwrap();
        assert_eq!(got, [word("ab"), word("ba")].into_iter().collect());
    }

    #[test]
    fn display_budget() {
        let n = one_component_network(&word("abababab"), &alphabet("ab")).unwrap();
        let t = line_tree_from_permutation(&word("ab"), &ell()).unwrap();
        assert!(matches!(is_displayed(&t, &n, 10), Err(Error::Capacity(_))));
    }
}
