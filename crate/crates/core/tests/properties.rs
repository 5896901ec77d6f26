use std::collections::BTreeSet;

use itertools::Itertools;
use proptest::prelude::*;

use tcn_core::construct::{line_tree_from_permutation, permutation_from_line_tree};
use tcn_core::lts::{check_c1_c2, lineage_taxon_strings, Ordering};
use tcn_core::newick::parse_newick;
use tcn_core::scs::{exact_scs, exhaustive_scs_oracle, is_common_supersequence, majority_merge};
use tcn_core::taxon::{taxon, Taxon, Word};
use tcn_core::BinaryTree;

const NAMES: [&str; 7] = ["a", "b", "c", "d", "e", "f", "g"];

/// Newick text of a random binary tree on the first `n` names, built by
/// merging random pairs of subtrees.
fn random_newick(n: usize, picks: &[u32]) -> String {
    let mut parts: Vec<String> = NAMES[..n].iter().map(|s| s.to_string()).collect();
    let mut i = 0;
    while parts.len() > 1 {
        let x = parts.remove(picks[i] as usize % parts.len());
        let y = parts.remove(picks[i + 1] as usize % parts.len());
        parts.push(format!("({x},{y})"));
        i += 2;
    }
    format!("{};", parts[0])
}

fn tree_strategy() -> impl Strategy<Value = BinaryTree> {
    (2..=7usize, proptest::collection::vec(any::<u32>(), 12))
        .prop_map(|(n, picks)| parse_newick(&random_newick(n, &picks)).unwrap())
}

fn strings_strategy() -> impl Strategy<Value = Vec<Vec<u8>>> {
    proptest::collection::vec(proptest::collection::vec(0u8..4, 0..=5), 1..=3)
}

proptest! {
    #[test]
    fn newick_roundtrip(tree in tree_strategy()) {
        let text = tree.canonical_form();
        let back = parse_newick(&text).unwrap();
        prop_assert_eq!(back.canonical_form(), text);
        prop_assert_eq!(back.taxon_set(), tree.taxon_set());
    }

    #[test]
    fn exact_scs_is_shortest(strings in strings_strategy()) {
        let s = exact_scs(&strings).unwrap();
        prop_assert!(is_common_supersequence(&s, &strings));
        let longest = strings.iter().map(Vec::len).max().unwrap();
        prop_assert!(s.len() >= longest);
        let mm = majority_merge(&strings);
        prop_assert!(is_common_supersequence(&mm, &strings));
        prop_assert!(s.len() <= mm.len());
        let oracle = exhaustive_scs_oracle(&strings, s.len()).unwrap();
        prop_assert_eq!(oracle.len(), s.len());
    }

    #[test]
    fn lts_uses_each_taxon_once(tree in tree_strategy(), seed in any::<u64>()) {
        let mut taxa: Vec<Taxon> = tree.taxa().into_iter().collect();
        // deterministic shuffle from the seed
        let mut x = seed | 1;
        for i in (1..taxa.len()).rev() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            taxa.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let ord = Ordering::new(taxa.clone()).unwrap();
        let lts = lineage_taxon_strings(&tree, &ord).unwrap();
        prop_assert!(check_c1_c2(&lts, &ord));
        let mut used: Vec<Taxon> = lts.values().flatten().cloned().collect();
        used.sort();
        let mut want: Vec<Taxon> = taxa[1..].to_vec();
        want.sort();
        prop_assert_eq!(used, want);
    }
}

#[test]
fn permutation_line_tree_bijection() {
    let ell = taxon("l");
    let mut forms = BTreeSet::new();
    for n in 1..=6 {
        let sigma: Word = NAMES[..n].iter().map(|s| taxon(s)).collect();
        for p in sigma.iter().cloned().permutations(n) {
            let tree = line_tree_from_permutation(&p, &ell).unwrap();
            assert!(tree.is_line_tree());
            assert_eq!(permutation_from_line_tree(&tree, &ell).unwrap(), p);
            assert!(forms.insert(tree.canonical_form()));
        }
    }
    assert_eq!(forms.len(), 1 + 2 + 6 + 24 + 120 + 720);
}

/// Every child order of every binary tree on `leaves`.
fn ordered_trees(leaves: &[&str]) -> Vec<String> {
    if leaves.len() == 1 {
        return vec![leaves[0].to_string()];
    }
    let mut out = Vec::new();
    for mask in 1..(1u32 << leaves.len()) - 1 {
        let (left, right): (Vec<&str>, Vec<&str>) = {
            let mut l = Vec::new();
            let mut r = Vec::new();
            for (i, x) in leaves.iter().enumerate() {
                if mask >> i & 1 == 1 { l.push(*x) } else { r.push(*x) }
            }
            (l, r)
        };
        for x in ordered_trees(&left) {
            for y in ordered_trees(&right) {
                out.push(format!("({x},{y})"));
            }
        }
    }
    out
}

/// Unordered tree isomorphism on parsed Newick, by recursion on children.
fn isomorphic(a: &BinaryTree, b: &BinaryTree) -> bool {
    fn go(a: &BinaryTree, u: tcn_core::NodeId, b: &BinaryTree, v: tcn_core::NodeId) -> bool {
        let cu: Vec<_> = a.children(u).collect();
        let cv: Vec<_> = b.children(v).collect();
        if cu.len() != cv.len() || a.label(u) != b.label(v) {
            return false;
        }
        match cu.len() {
            0 => true,
            1 => go(a, cu[0], b, cv[0]),
            _ => {
                (go(a, cu[0], b, cv[0]) && go(a, cu[1], b, cv[1]))
                    || (go(a, cu[0], b, cv[1]) && go(a, cu[1], b, cv[0]))
            }
        }
    }
    go(a, a.root(), b, b.root())
}

#[test]
fn canonical_form_is_complete_invariant() {
    let trees: Vec<BinaryTree> = ordered_trees(&NAMES[..4])
        .iter()
        .map(|s| parse_newick(&format!("{s};")).unwrap())
        .collect();
    assert_eq!(trees.len(), 120);
    for a in &trees {
        for b in &trees {
            assert_eq!(a.canonical_form() == b.canonical_form(), isomorphic(a, b));
        }
    }
    // (2n-3)!! shapes on n labelled leaves
    for (n, classes) in [(5, 105), (6, 945)] {
        let forms: BTreeSet<String> = ordered_trees(&NAMES[..n])
            .iter()
            .map(|s| parse_newick(&format!("{s};")).unwrap().canonical_form())
            .collect();
        assert_eq!(forms.len(), classes);
    }
}
