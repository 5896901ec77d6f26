//! Validated binary trees and phylogenetic networks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::newick;
use crate::taxon::Taxon;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Indegree 0, outdegree 1.
    Root,
    /// Indegree 1, outdegree 2.
    Tree,
    /// Indegree at least 2, outdegree 1.
    Reticulate,
    /// Indegree 1, outdegree 0, labeled.
    Leaf,
}

/// A rooted phylogenetic network whose node kinds have been checked
/// against the degree rules.
#[derive(Clone, Debug)]
pub struct PhyloNetwork {
    dag: Dag,
    kinds: Vec<NodeKind>,
    root: usize,
    leaves: BTreeMap<Taxon, usize>,
}

impl PhyloNetwork {
    /// Validates `dag` and freezes it. Removed slots are compacted away.
    pub fn from_dag(dag: &Dag) -> Result<Self> {
        let (dag, _) = dag.compact();
        let n = dag.node_count();
        if n == 0 {
            return Err(Error::Structure("empty graph".into()));
        }
        let mut problems = Vec::new();
        let sources = dag.sources();
        if sources.len() != 1 {
            problems.push(format!("expected one root, found sources {sources:?}"));
        }
        let mut kinds = Vec::with_capacity(n);
        let mut leaves = BTreeMap::new();
        for v in 0..n {
            let (indeg, outdeg) = (dag.indegree(v), dag.outdegree(v));
            let kind = match (indeg, outdeg) {
                (0, 1) => NodeKind::Root,
                (1, 2) => NodeKind::Tree,
                (i, 1) if i >= 2 => NodeKind::Reticulate,
                (1, 0) => NodeKind::Leaf,
                _ => {
                    problems.push(format!("node {v} has indegree {indeg} and outdegree {outdeg}"));
                    NodeKind::Tree
                }
            };
            let mut kids = dag.children(v).to_vec();
            kids.sort_unstable();
            if kids.windows(2).any(|w| w[0] == w[1]) {
                problems.push(format!("node {v} has parallel out-edges"));
            }
            match (kind, dag.label(v)) {
                (NodeKind::Leaf, Some(t)) => {
                    if leaves.insert(t.clone(), v).is_some() {
                        problems.push(format!("label {t} is used by more than one leaf"));
                    }
                }
                (NodeKind::Leaf, None) => problems.push(format!("leaf {v} has no label")),
                (_, Some(t)) => problems.push(format!("non-leaf node {v} carries label {t}")),
                _ => {}
            }
            kinds.push(kind);
        }
        if dag.topological_order().is_none() {
            problems.push("graph has a directed cycle".into());
        }
        if !problems.is_empty() {
            return Err(Error::Structure(problems.join("; ")));
        }
        let root = sources[0];
        Ok(PhyloNetwork {
            dag,
            kinds,
            root,
            leaves,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn root(&self) -> NodeId {
        NodeId(self.root)
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.kinds.len()).map(NodeId)
    }

    fn check(&self, v: NodeId) -> Result<usize> {
        if v.0 < self.kinds.len() {
            Ok(v.0)
        } else {
            Err(Error::UnknownNode(v.0))
        }
    }

    pub fn kind(&self, v: NodeId) -> NodeKind {
        self.kinds[v.0]
    }

    pub fn children(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.dag.children(v.0).iter().map(|&c| NodeId(c))
    }

    pub fn parents(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.dag.parents(v.0).iter().map(|&p| NodeId(p))
    }

    pub fn label(&self, v: NodeId) -> Option<&Taxon> {
        self.dag.label(v.0)
    }

    /// Leaf node carrying `t`.
    pub fn leaf(&self, t: &Taxon) -> Option<NodeId> {
        self.leaves.get(t).map(|&v| NodeId(v))
    }

    /// Leaf labels in name order.
    pub fn taxa(&self) -> Vec<Taxon> {
        self.leaves.keys().cloned().collect()
    }

    pub fn reticulations(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(|&v| self.kind(v) == NodeKind::Reticulate)
    }

    /// Sum over reticulate nodes of indegree minus one.
    pub fn hybridization_number(&self) -> usize {
        self.reticulations()
            .map(|v| self.dag.indegree(v.0) - 1)
            .sum()
    }

    /// Every non-leaf node has a child that is a tree node or a leaf.
    pub fn is_tree_child(&self) -> bool {
        self.nodes()
            .filter(|&v| self.kind(v) != NodeKind::Leaf)
            .all(|v| {
                self.children(v)
                    .any(|c| matches!(self.kind(c), NodeKind::Tree | NodeKind::Leaf))
            })
    }

    /// Whether a directed path leads from `v` to `u`. Every node is below
    /// itself.
    pub fn is_below(&self, u: NodeId, v: NodeId) -> Result<bool> {
        let (u, v) = (self.check(u)?, self.check(v)?);
        Ok(self.dag.reachable_from(v)[u])
    }

    /// Canonical extended Newick text; see [`newick::write_extended_newick`].
    pub fn canonical_form(&self) -> String {
        newick::write_extended_newick(self)
    }

    /// Topological order starting at the root.
    pub fn topological_order(&self) -> Vec<NodeId> {
        self.dag
            .topological_order()
            .expect("validated networks are acyclic")
            .into_iter()
            .map(NodeId)
            .collect()
    }

    /// Smallest leaf name below each node.
    pub fn min_leaf_below(&self) -> Vec<Taxon> {
        let mut min: Vec<Option<Taxon>> = vec![None; self.node_count()];
        for v in self.topological_order().into_iter().rev() {
            min[v.0] = match self.label(v) {
                Some(t) => Some(t.clone()),
                None => self.children(v).filter_map(|c| min[c.0].clone()).min(),
            };
        }
        min.into_iter()
            .map(|m| m.expect("every node reaches a leaf"))
            .collect()
    }
}

/// A rooted binary phylogenetic tree: a network without reticulations.
#[derive(Clone, Debug)]
pub struct BinaryTree(PhyloNetwork);

impl BinaryTree {
    pub fn from_dag(dag: &Dag) -> Result<Self> {
        let net = PhyloNetwork::from_dag(dag)?;
        BinaryTree::try_from(net)
    }

    pub fn as_network(&self) -> &PhyloNetwork {
        &self.0
    }

    pub fn into_network(self) -> PhyloNetwork {
        self.0
    }

    pub fn taxa(&self) -> Vec<Taxon> {
        self.0.taxa()
    }

    /// Every tree node has at least one leaf child.
    pub fn is_line_tree(&self) -> bool {
        let net = &self.0;
        net.nodes()
            .filter(|&v| net.kind(v) == NodeKind::Tree)
            .all(|v| net.children(v).any(|c| net.kind(c) == NodeKind::Leaf))
    }

    /// Newick text with children ordered by smallest descendant leaf name.
    /// Two trees are isomorphic (respecting leaf labels) iff their canonical
    /// forms are equal.
    pub fn canonical_form(&self) -> String {
        newick::write_newick(self)
    }

    pub fn taxon_set(&self) -> BTreeSet<Taxon> {
        self.0.leaves.keys().cloned().collect()
    }
}

impl TryFrom<PhyloNetwork> for BinaryTree {
    type Error = Error;

    fn try_from(net: PhyloNetwork) -> Result<Self> {
        let rets: Vec<NodeId> = net.reticulations().collect();
        if !rets.is_empty() {
            return Err(Error::Structure(format!(
                "tree has reticulate nodes {rets:?}"
            )));
        }
        Ok(BinaryTree(net))
    }
}

impl std::ops::Deref for BinaryTree {
    type Target = PhyloNetwork;

    fn deref(&self) -> &PhyloNetwork {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxon::taxon;

    fn cherry(a: &str, b: &str) -> BinaryTree {
        let mut g = Dag::new();
        let r = g.add_node(None);
        let v = g.add_node(None);
        let x = g.add_node(Some(taxon(a)));
        let y = g.add_node(Some(taxon(b)));
        g.add_edge(r, v);
        g.add_edge(v, x);
        g.add_edge(v, y);
        BinaryTree::from_dag(&g).unwrap()
    }

    #[test]
    fn tree_has_zero_hn_and_is_tree_child() {
        let t = cherry("a", "b");
        assert_eq!(t.hybridization_number(), 0);
        assert!(t.is_tree_child());
        assert!(t.is_line_tree());
    }

    #[test]
    fn reticulate_above_reticulate_is_not_tree_child() {
        // root -> s; s -> p, q; p, q -> h1; p, q -> h2; h1 -> a; h2 -> b
        let mut g = Dag::new();
        let root = g.add_node(None);
        let s = g.add_node(None);
        let p = g.add_node(None);
        let q = g.add_node(None);
        let h1 = g.add_node(None);
        let h2 = g.add_node(None);
        let a = g.add_node(Some(taxon("a")));
        let b = g.add_node(Some(taxon("b")));
        for (u, v) in [(root, s), (s, p), (s, q), (p, h1), (q, h1), (p, h2), (q, h2), (h1, a), (h2, b)] {
            g.add_edge(u, v);
        }
        let net = PhyloNetwork::from_dag(&g).unwrap();
        assert_eq!(net.hybridization_number(), 2);
        assert!(!net.is_tree_child());
        assert!(BinaryTree::try_from(net).is_err());
    }

    #[test]
    fn balanced_tree_is_not_a_line_tree() {
        let mut g = Dag::new();
        let r = g.add_node(None);
        let top = g.add_node(None);
        let l = g.add_node(None);
        let rr = g.add_node(None);
        g.add_edge(r, top);
        g.add_edge(top, l);
        g.add_edge(top, rr);
        for (p, name) in [(l, "a"), (l, "b"), (rr, "c"), (rr, "d")] {
            let x = g.add_node(Some(taxon(name)));
            g.add_edge(p, x);
        }
        let t = BinaryTree::from_dag(&g).unwrap();
        assert!(!t.is_line_tree());
        assert_eq!(t.canonical_form(), "(((a,b),(c,d)));");
    }

    #[test]
    fn structural_violations_are_listed() {
        let mut g = Dag::new();
        let r = g.add_node(None);
        let v = g.add_node(None);
        let a = g.add_node(Some(taxon("a")));
        let b = g.add_node(Some(taxon("a")));
        let c = g.add_node(None);
        g.add_edge(r, v);
        g.add_edge(v, a);
        g.add_edge(v, b);
        g.add_edge(v, c);
        let err = PhyloNetwork::from_dag(&g).unwrap_err().to_string();
        assert!(err.contains("node 1 has indegree 1 and outdegree 3"), "{err}");
        assert!(err.contains("label a"), "{err}");
        assert!(err.contains("leaf 4 has no label"), "{err}");
    }

    #[test]
    fn below_is_reflexive_and_directional() {
        let t = cherry("a", "b");
        let root = t.root();
        let child = t.children(root).next().unwrap();
        assert!(t.is_below(child, root).unwrap());
        assert!(t.is_below(root, root).unwrap());
        assert!(!t.is_below(root, child).unwrap());
        assert_eq!(t.is_below(NodeId(99), root), Err(Error::UnknownNode(99)));
    }

    #[test]
    fn child_order_does_not_change_canonical_form() {
        assert_eq!(cherry("a", "b").canonical_form(), cherry("b", "a").canonical_form());
        assert_eq!(cherry("b", "a").canonical_form(), "((a,b));");
    }
}
