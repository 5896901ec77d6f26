//! Minimum-hybridization tree-child networks.
//!
//! For a fixed ordering of the taxa, taking for each taxon a shortest
//! common supersequence of its lineage taxon strings across the input
//! trees and running [`construct_network`] gives a tree-child network that
//! displays every input tree. Some ordering yields a network of minimum
//! hybridization number, so [`solve_min_tcn`] enumerates them all.
//!
//! For line trees sharing a lowest leaf `l`, placing `l` first is always
//! optimal and the answer is the one-component network of a shortest
//! common supersequence of the trees' permutations ([`solve_line_trees_fast`]).

use std::collections::BTreeSet;

use itertools::Itertools;
use serde_json::json;

use crate::construct::{
    construct_network, is_displayed, one_component_network, permutation_from_line_tree,
    DEFAULT_DISPLAY_BUDGET,
};
use crate::error::{Error, Result};
use crate::lts::{check_c1_c2, lineage_taxon_strings, LtsMap, Ordering};
use crate::model::{BinaryTree, NodeKind, PhyloNetwork};
use crate::scs::{is_common_supersequence, ScsOptions};
use crate::taxon::{render_word, Taxon, TaxonSet, Word};

/// Default bound on the number of taxa for full ordering enumeration.
pub const DEFAULT_MAX_TAXA: usize = 9;

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub scs: ScsOptions,
    pub display_budget: usize,
    pub max_taxa: usize,
    /// Skip orderings whose partial cost already reaches the incumbent.
    pub prune: bool,
    /// Check tree-child-ness and display of every input before returning.
    pub verify: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            scs: ScsOptions::default(),
            display_budget: DEFAULT_DISPLAY_BUDGET,
            max_taxa: DEFAULT_MAX_TAXA,
            prune: true,
            verify: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileRow {
    pub taxon: Taxon,
    /// LTS of `taxon` in each input tree.
    pub lts: Vec<Word>,
    /// Chosen common supersequence of `lts`.
    pub beta: Word,
}

/// Lineage taxon strings of every taxon in every tree, with one common
/// supersequence per taxon. Rows follow the ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtsProfile {
    pub ordering: Ordering,
    pub rows: Vec<ProfileRow>,
}

impl LtsProfile {
    pub fn betas(&self) -> LtsMap {
        self.rows
            .iter()
            .map(|r| (r.taxon.clone(), r.beta.clone()))
            .collect()
    }

    pub fn beta_total(&self) -> usize {
        self.rows.iter().map(|r| r.beta.len()).sum()
    }

    pub fn row(&self, t: &Taxon) -> Option<&ProfileRow> {
        self.rows.iter().find(|r| &r.taxon == t)
    }
}

fn common_taxa(trees: &[BinaryTree]) -> Result<BTreeSet<Taxon>> {
    let first = trees
        .first()
        .ok_or_else(|| Error::InvalidInput("no input trees".into()))?
        .taxon_set();
    for (i, t) in trees.iter().enumerate().skip(1) {
        if t.taxon_set() != first {
            return Err(Error::TaxonMismatch(format!("tree {i} has a different taxon set than tree 0")));
        }
    }
    Ok(first)
}

pub fn lts_profile(trees: &[BinaryTree], ord: &Ordering, scs: &ScsOptions) -> Result<LtsProfile> {
    common_taxa(trees)?;
    let maps = trees
        .iter()
        .map(|t| lineage_taxon_strings(t, ord))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(ord.len());
    for t in ord.taxa() {
        let lts: Vec<Word> = maps.iter().map(|m| m[t].clone()).collect();
        let beta = scs.solve(&lts)?;
        rows.push(ProfileRow {
            taxon: t.clone(),
            lts,
            beta,
        });
    }
    let profile = LtsProfile {
        ordering: ord.clone(),
        rows,
    };
    if !check_c1_c2(&profile.betas(), ord) {
        return Err(Error::Invariant("profile strings violate the ordering conditions".into()));
    }
    Ok(profile)
}

/// `sum |beta_i|` minus the number of distinct taxa used by the strings.
/// Equals the hybridization number of the network built from them.
pub fn hn_formula(betas: &LtsMap) -> usize {
    let total: usize = betas.values().map(Vec::len).sum();
    let distinct: BTreeSet<&Taxon> = betas.values().flatten().collect();
    total - distinct.len()
}

pub fn network_for_ordering(
    trees: &[BinaryTree],
    ord: &Ordering,
    scs: &ScsOptions,
) -> Result<(PhyloNetwork, usize)> {
    let profile = lts_profile(trees, ord, scs)?;
    let net = construct_network(ord, &profile.betas())?;
    let hn = net.hybridization_number();
    Ok((net, hn))
}

/// Hybridization number reached by `ord`, without building the network.
pub fn ordering_cost(trees: &[BinaryTree], ord: &Ordering, scs: &ScsOptions) -> Result<usize> {
    Ok(hn_formula(&lts_profile(trees, ord, scs)?.betas()))
}

/// Cost of every ordering of the taxa, orderings in lexicographic order.
pub fn all_ordering_costs(trees: &[BinaryTree], scs: &ScsOptions) -> Result<Vec<(Ordering, usize)>> {
    let taxa: Vec<Taxon> = common_taxa(trees)?.into_iter().collect();
    let n = taxa.len();
    taxa.into_iter()
        .permutations(n)
        .map(|seq| {
            let ord = Ordering::new(seq)?;
            let cost = ordering_cost(trees, &ord, scs)?;
            Ok((ord, cost))
        })
        .collect()
}

/// Witness returned by the solvers.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub best_ordering: Ordering,
    pub network: PhyloNetwork,
    pub hn: usize,
    pub per_taxon_betas: LtsMap,
    pub orderings_searched: usize,
}

impl SolveReport {
    pub fn to_json(&self) -> serde_json::Value {
        let betas: serde_json::Map<String, serde_json::Value> = self
            .best_ordering
            .taxa()
            .iter()
            .map(|t| {
                let beta = self.per_taxon_betas.get(t).map(|w| render_word(w)).unwrap_or_default();
                (t.to_string(), json!(beta))
            })
            .collect();
        json!({
            "hn": self.hn,
            "ordering": self.best_ordering.taxa().iter().map(Taxon::as_str).collect::<Vec<_>>(),
            "network": self.network.canonical_form(),
            "betas": betas,
            "searched": self.orderings_searched,
        })
    }
}

fn dedup_trees(trees: &[BinaryTree]) -> Vec<BinaryTree> {
    let mut seen = BTreeSet::new();
    trees
        .iter()
        .filter(|t| seen.insert(t.canonical_form()))
        .cloned()
        .collect()
}

fn verify(net: &PhyloNetwork, trees: &[BinaryTree], budget: usize) -> Result<()> {
    if !net.is_tree_child() {
        return Err(Error::Invariant("constructed network is not tree-child".into()));
    }
    for (i, t) in trees.iter().enumerate() {
        if !is_displayed(t, net, budget)? {
            return Err(Error::Invariant(format!("constructed network does not display tree {i}")));
        }
    }
    Ok(())
}

/// Exact minimum tree-child network over all orderings. Ties go to the
/// lexicographically smallest ordering (by taxon name).
pub fn solve_min_tcn(trees: &[BinaryTree], opts: &SolverOptions) -> Result<SolveReport> {
    let taxa: Vec<Taxon> = common_taxa(trees)?.into_iter().collect();
    let trees = dedup_trees(trees);
    let n = taxa.len();
    if n > opts.max_taxa {
        return Err(Error::Capacity(format!(
            "{n} taxa exceed the ordering enumeration bound of {}; use solve-fast for line trees or heuristic SCS mode",
            opts.max_taxa
        )));
    }
    // Each taxon but the smallest occurs in the strings of every profile.
    let distinct = n - 1;
    let mut best: Option<(usize, Ordering, LtsMap)> = None;
    let mut searched = 0;
    'orderings: for seq in taxa.iter().cloned().permutations(n) {
        searched += 1;
        let ord = Ordering::new(seq)?;
        let maps = trees
            .iter()
            .map(|t| lineage_taxon_strings(t, &ord))
            .collect::<Result<Vec<_>>>()?;
        let mut betas = LtsMap::new();
        let mut total = 0;
        for t in ord.taxa() {
            let lts: Vec<Word> = maps.iter().map(|m| m[t].clone()).collect();
            let beta = opts.scs.solve(&lts)?;
            total += beta.len();
            betas.insert(t.clone(), beta);
            if let Some((incumbent, ..)) = &best {
                if opts.prune && total.saturating_sub(distinct) >= *incumbent {
                    continue 'orderings;
                }
            }
        }
        let hn = total - distinct;
        if best.as_ref().is_none_or(|(incumbent, ..)| hn < *incumbent) {
            best = Some((hn, ord, betas));
        }
    }
    let (hn, ord, betas) = best.expect("at least one ordering");
    let network = construct_network(&ord, &betas)?;
    if network.hybridization_number() != hn || hn_formula(&betas) != hn {
        return Err(Error::Invariant(format!(
            "network has hybridization number {} but the strings give {hn}",
            network.hybridization_number()
        )));
    }
    if opts.verify {
        verify(&network, &trees, opts.display_budget)?;
    }
    Ok(SolveReport {
        best_ordering: ord,
        network,
        hn,
        per_taxon_betas: betas,
        orderings_searched: searched,
    })
}

/// The taxa with non-empty LTS in the line tree `T(p)` when the reserved
/// taxon is not smallest: starting from the smallest taxon, each next
/// anchor is the smallest of the reserved taxon and the symbols after the
/// current anchor in `p`, until the anchor is the reserved taxon or the
/// last symbol of `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorChain {
    pub anchors: Vec<Taxon>,
}

pub fn anchor_chain(p: &[Taxon], ord: &Ordering, reserved: &Taxon) -> Result<AnchorChain> {
    if ord.smallest() == reserved {
        return Err(Error::WrongCase(format!("{reserved} is the smallest taxon of the ordering")));
    }
    let expected: BTreeSet<&Taxon> = ord.taxa().iter().filter(|t| *t != reserved).collect();
    let given: BTreeSet<&Taxon> = p.iter().collect();
    if given != expected || p.len() != expected.len() {
        return Err(Error::TaxonMismatch(
            "permutation must use each non-reserved taxon of the ordering once".into(),
        ));
    }
    let last = p.last().expect("non-empty");
    let mut anchors = vec![ord.smallest().clone()];
    loop {
        let cur = anchors.last().unwrap();
        if cur == reserved || cur == last {
            break;
        }
        let x = p.iter().position(|t| t == cur).unwrap();
        let next = p[x + 1..]
            .iter()
            .chain(std::iter::once(reserved))
            .min_by_key(|t| ord.rank(t))
            .unwrap()
            .clone();
        anchors.push(next);
    }
    Ok(AnchorChain { anchors })
}

/// Builds a common supersequence of the trees' permutations from their
/// LTSs under `ord`, choosing each per-taxon supersequence with `choose`.
///
/// With the reserved taxon smallest, the result is `choose` applied to the
/// permutations. Otherwise, for each taxon `t` with some non-empty LTS (in
/// order), `W_t = choose(t, lts)` and block `W_t` minus its last letter
/// followed by `t` is appended; when the largest such taxon is the
/// reserved one its block is `W_t` whole. Reserved letters are deleted.
pub fn assemble_supersequence_with(
    trees: &[BinaryTree],
    ord: &Ordering,
    reserved: &Taxon,
    mut choose: impl FnMut(&Taxon, &[Word]) -> Result<Word>,
) -> Result<Word> {
    let perms = trees
        .iter()
        .map(|t| permutation_from_line_tree(t, reserved))
        .collect::<Result<Vec<_>>>()?;
    let maps = trees
        .iter()
        .map(|t| lineage_taxon_strings(t, ord))
        .collect::<Result<Vec<_>>>()?;

    let mut checked_choose = |t: &Taxon, strings: &[Word]| -> Result<Word> {
        let w = choose(t, strings)?;
        if w.is_empty() || !is_common_supersequence(&w, strings) {
            return Err(Error::InvalidWitness(format!(
                "{} is not a non-empty common supersequence of the strings of {t}",
                render_word(&w)
            )));
        }
        Ok(w)
    };

    let q = if ord.smallest() == reserved {
        checked_choose(reserved, &perms)?
    } else {
        let mut blocks: Vec<(Taxon, Word)> = Vec::new();
        for t in ord.taxa() {
            let lts: Vec<Word> = maps
                .iter()
                .map(|m| m[t].clone())
                .filter(|s| !s.is_empty())
                .collect();
            if !lts.is_empty() {
                blocks.push((t.clone(), checked_choose(t, &lts)?));
            }
        }
        let mut q = Vec::new();
        let last = blocks.len() - 1;
        for (i, (t, w)) in blocks.into_iter().enumerate() {
            if i == last && &t == reserved {
                q.extend(w);
            } else {
                q.extend(w[..w.len() - 1].iter().cloned());
                q.push(t);
            }
        }
        q.retain(|t| t != reserved);
        q
    };
    if !is_common_supersequence(&q, &perms) {
        return Err(Error::Invariant(format!(
            "assembled {} is not a common supersequence of the permutations",
            render_word(&q)
        )));
    }
    Ok(q)
}

pub fn assemble_supersequence(
    trees: &[BinaryTree],
    ord: &Ordering,
    reserved: &Taxon,
    scs: &ScsOptions,
) -> Result<Word> {
    assemble_supersequence_with(trees, ord, reserved, |_, strings| scs.solve(strings))
}

/// Leaves that sit in the lowest cherry of every input line tree.
pub fn common_lowest_leaves(trees: &[BinaryTree]) -> Result<BTreeSet<Taxon>> {
    common_taxa(trees)?;
    let mut common: Option<BTreeSet<Taxon>> = None;
    for (i, t) in trees.iter().enumerate() {
        if !t.is_line_tree() {
            return Err(Error::InvalidInput(format!("tree {i} is not a line tree")));
        }
        let cherry: BTreeSet<Taxon> = t
            .nodes()
            .filter(|&v| t.kind(v) == NodeKind::Tree)
            .find(|&v| t.children(v).all(|c| t.kind(c) == NodeKind::Leaf))
            .map(|v| t.children(v).filter_map(|c| t.label(c).cloned()).collect())
            .unwrap_or_default();
        common = Some(match common {
            None => cherry,
            Some(c) => c.intersection(&cherry).cloned().collect(),
        });
    }
    Ok(common.unwrap_or_default())
}

/// Optimal network for line trees with a common lowest leaf: the
/// one-component network of a shortest common supersequence of their
/// permutations. Without `reserved`, the name-smallest common lowest leaf
/// is used.
pub fn solve_line_trees_fast(
    trees: &[BinaryTree],
    reserved: Option<&Taxon>,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let lowest = common_lowest_leaves(trees)?;
    let ell = match reserved {
        Some(r) if lowest.contains(r) => r.clone(),
        Some(r) => {
            return Err(Error::InvalidInput(format!(
                "{r} is not the lowest leaf of every line tree"
            )))
        }
        None => lowest
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidInput("the line trees share no lowest leaf".into()))?,
    };
    let trees = dedup_trees(trees);
    let perms = trees
        .iter()
        .map(|t| permutation_from_line_tree(t, &ell))
        .collect::<Result<Vec<_>>>()?;
    let q = opts.scs.solve(&perms)?;
    let sigma: Vec<Taxon> = trees[0].taxa().into_iter().filter(|t| t != &ell).collect();
    let alphabet = TaxonSet::with_reserved(&sigma, ell.clone())?;
    let network = one_component_network(&q, &alphabet)?;
    let hn = q.len() - sigma.len();
    if network.hybridization_number() != hn {
        return Err(Error::Invariant(format!(
            "one-component network has hybridization number {} instead of {hn}",
            network.hybridization_number()
        )));
    }
    if opts.verify {
        verify(&network, &trees, opts.display_budget)?;
    }
    let mut seq = vec![ell.clone()];
    seq.extend(sigma);
    Ok(SolveReport {
        best_ordering: Ordering::new(seq)?,
        network,
        hn,
        per_taxon_betas: [(ell, q)].into_iter().collect(),
        orderings_searched: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::line_tree_from_permutation;
    use crate::taxon::{taxon, word};

    fn ell() -> Taxon {
        taxon("l")
    }

    fn lines(perms: &[&str]) -> Vec<BinaryTree> {
        perms
            .iter()
            .map(|p| line_tree_from_permutation(&word(p), &ell()).unwrap())
            .collect()
    }

    fn ord(s: &str) -> Ordering {
        Ordering::new(word(s)).unwrap()
    }

    #[test]
    fn single_tree_profile_is_its_lts() {
        let trees = lines(&["eadbc"]);
        let o = ord("abclde");
        let p = lts_profile(&trees, &o, &ScsOptions::default()).unwrap();
        let direct = lineage_taxon_strings(&trees[0], &o).unwrap();
        assert_eq!(p.betas(), direct);
        let doubled = lines(&["eadbc", "eadbc"]);
        assert_eq!(lts_profile(&doubled, &o, &ScsOptions::default()).unwrap().betas(), direct);
        let (net, hn) = network_for_ordering(&trees, &o, &ScsOptions::default()).unwrap();
        assert_eq!(hn, 0);
        assert_eq!(net.canonical_form(), trees[0].canonical_form());
    }

    #[test]
    fn identical_trees_solve_to_the_tree() {
        let trees = lines(&["cab", "cab"]);
        let r = solve_min_tcn(&trees, &SolverOptions::default()).unwrap();
        assert_eq!(r.hn, 0);
        assert_eq!(r.network.canonical_form(), trees[0].canonical_form());
    }

    #[test]
    fn two_opposite_line_trees() {
        let trees = lines(&["ab", "ba"]);
        let r = solve_min_tcn(&trees, &SolverOptions::default()).unwrap();
        assert_eq!(r.hn, 1);
        let fast = solve_line_trees_fast(&trees, None, &SolverOptions::default()).unwrap();
        assert_eq!(fast.hn, 1);
        assert_eq!(fast.per_taxon_betas[&ell()].len(), 3);
    }

    #[test]
    fn anchor_chains() {
        let o = ord("abcled");
        assert_eq!(anchor_chain(&word("eadbc"), &o, &ell()).unwrap().anchors, word("abc"));
        assert_eq!(anchor_chain(&word("caebd"), &o, &ell()).unwrap().anchors, word("abl"));
        let high = ord("alb");
        assert_eq!(anchor_chain(&word("ab"), &high, &ell()).unwrap().anchors, word("al"));
        assert!(matches!(
            anchor_chain(&word("ab"), &ord("lab"), &ell()),
            Err(Error::WrongCase(_))
        ));
    }

    #[test]
    fn single_tree_assembly_is_its_permutation() {
        let trees = lines(&["eadbc"]);
        for o in ["abclde", "edcbal", "bleadc"] {
            let q = assemble_supersequence(&trees, &ord(o), &ell(), &ScsOptions::default()).unwrap();
            assert_eq!(q, word("eadbc"), "{o}");
        }
    }

    #[test]
    fn fast_path_rejects_non_line_input() {
        let t = crate::newick::parse_newick("(((a,b),(c,l)));").unwrap();
        assert!(solve_line_trees_fast(&[t], None, &SolverOptions::default()).is_err());
        let trees = lines(&["ab", "ba"]);
        assert!(solve_line_trees_fast(&trees, Some(&taxon("a")), &SolverOptions::default()).is_err());
    }

    #[test]
    fn enumeration_bound() {
        let trees = lines(&["abc"]);
        let opts = SolverOptions {
            max_taxa: 3,
            ..SolverOptions::default()
        };
        assert!(matches!(solve_min_tcn(&trees, &opts), Err(Error::Capacity(_))));
    }
}
