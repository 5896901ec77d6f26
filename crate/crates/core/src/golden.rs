//! Worked examples with known answers, used by the `selftest` command.
//! The extra leaf is spelled `l`.

use crate::construct::{construct_network, is_displayed, line_tree_from_permutation, one_component_network, DEFAULT_DISPLAY_BUDGET};
use crate::error::Result;
use crate::lts::{lineage_taxon_strings, LtsMap, Ordering};
use crate::model::BinaryTree;
use crate::newick::parse_newick;
use crate::scs::ScsOptions;
use crate::solver::{assemble_supersequence_with, lts_profile};
use crate::taxon::{render_word, taxon, word, TaxonSet};

#[derive(Clone, Debug)]
pub struct GoldenCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The three line trees of the worked example with five letters.
pub const EXAMPLE_PERMUTATIONS: [&str; 3] = ["eadbc", "caebd", "cabed"];

/// Expected LTS table under `a<b<c<l<d<e`: taxon, one string per tree.
pub const EXAMPLE_TABLE: [(&str, [&str; 3]); 6] = [
    ("a", ["eb", "cb", "cb"]),
    ("b", ["dc", "el", "l"]),
    ("c", ["l", "", ""]),
    ("l", ["", "d", "ed"]),
    ("d", ["", "", ""]),
    ("e", ["", "", ""]),
];

pub const EXAMPLE_SCS_LENGTHS: [usize; 6] = [3, 4, 1, 2, 0, 0];

/// Per-taxon supersequences drawn in the worked figure.
pub const FIGURE_BETAS: [(&str, &str); 4] = [("a", "ecb"), ("b", "dcel"), ("c", "l"), ("l", "ed")];

pub fn example_trees() -> Vec<BinaryTree> {
    EXAMPLE_PERMUTATIONS
        .iter()
        .map(|p| line_tree_from_permutation(&word(p), &taxon("l")).expect("valid permutation"))
        .collect()
}

pub fn example_ordering() -> Ordering {
    Ordering::new(word("abclde")).expect("distinct taxa")
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> GoldenCheck {
    match f() {
        Ok((passed, detail)) => GoldenCheck { name, passed, detail },
        Err(e) => GoldenCheck {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn all_displayed(net: &crate::PhyloNetwork) -> Result<bool> {
    for t in example_trees() {
        if !is_displayed(&t, net, DEFAULT_DISPLAY_BUDGET)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn golden_checks() -> Vec<GoldenCheck> {
    vec![
        check("line tree of edabc", || {
            let t = line_tree_from_permutation(&word("edabc"), &taxon("l"))?;
            let drawn = parse_newick("((e,(d,(a,(b,(c,l))))));")?;
            Ok((t.canonical_form() == drawn.canonical_form() && t.is_line_tree(), t.canonical_form()))
        }),
        check("LTS of edabc under alphabetical order", || {
            let t = line_tree_from_permutation(&word("edabc"), &taxon("l"))?;
            let got = lineage_taxon_strings(&t, &Ordering::new(word("abcdel"))?)?;
            let want: LtsMap = [("a", "edb"), ("b", "c"), ("c", "l"), ("d", ""), ("e", ""), ("l", "")]
                .iter()
                .map(|(t, s)| (taxon(t), word(s)))
                .collect();
            Ok((got == want, format!("{got:?}")))
        }),
        check("LTS table and SCS lengths of the three-tree example", || {
            let p = lts_profile(&example_trees(), &example_ordering(), &ScsOptions::default())?;
            let mut ok = true;
            for ((t, cells), len) in EXAMPLE_TABLE.iter().zip(EXAMPLE_SCS_LENGTHS) {
                let row = p.row(&taxon(t)).expect("every taxon has a row");
                ok &= row.lts.iter().map(|w| render_word(w)).eq(cells.iter().map(|c| c.to_string()));
                ok &= row.beta.len() == len;
            }
            Ok((ok, format!("beta total {}", p.beta_total())))
        }),
        check("figure network has hybridization number 5", || {
            let betas: LtsMap = FIGURE_BETAS.iter().map(|(t, s)| (taxon(t), word(s))).collect();
            let net = construct_network(&example_ordering(), &betas)?;
            let hn = net.hybridization_number();
            Ok((hn == 5 && net.is_tree_child() && all_displayed(&net)?, format!("hn {hn}")))
        }),
        check("one-component network of ecadebced", || {
            let alphabet = TaxonSet::with_reserved(&word("abcde"), taxon("l"))?;
            let net = one_component_network(&word("ecadebced"), &alphabet)?;
            let hn = net.hybridization_number();
            Ok((hn == 4 && net.is_tree_child() && all_displayed(&net)?, format!("hn {hn}")))
        }),
        check("one-component network of ababc", || {
            let alphabet = TaxonSet::with_reserved(&word("abc"), taxon("l"))?;
            let hn = one_component_network(&word("ababc"), &alphabet)?.hybridization_number();
            Ok((hn == 2, format!("hn {hn}")))
        }),
        check("assembled supersequence with the drawn choices", || {
            let choices: LtsMap = [("a", "ecb"), ("b", "delc"), ("c", "l"), ("l", "ed")]
                .iter()
                .map(|(t, s)| (taxon(t), word(s)))
                .collect();
            let q = assemble_supersequence_with(&example_trees(), &example_ordering(), &taxon("l"), |t, _| {
                Ok(choices[t].clone())
            })?;
            Ok((q == word("ecadebced"), render_word(&q)))
        }),
    ]
}
