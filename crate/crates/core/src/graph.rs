//! Mutable directed graph used while building, pruning and contracting
//! trees and networks. Validated graphs live in [`crate::model`].

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::taxon::Taxon;

/// An arena of nodes with optional leaf labels and directed edges.
///
/// Removed nodes keep their slot until [`Dag::compact`] renumbers the
/// arena, so ids stay stable while a graph is being edited.
#[derive(Clone, Debug, Default)]
pub struct Dag {
    labels: Vec<Option<Taxon>>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Dag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: Option<Taxon>) -> usize {
        self.labels.push(label);
        self.children.push(Vec::new());
        self.parents.push(Vec::new());
        self.alive.push(true);
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(self.alive[u] && self.alive[v]);
        self.children[u].push(v);
        self.parents[v].push(u);
    }

    /// Removes one copy of the edge `(u, v)`. Returns whether it existed.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let Some(i) = self.children[u].iter().position(|&c| c == v) else {
            return false;
        };
        self.children[u].remove(i);
        let j = self.parents[v].iter().position(|&p| p == u).expect("edge lists agree");
        self.parents[v].remove(j);
        true
    }

    pub fn remove_node(&mut self, v: usize) {
        for c in std::mem::take(&mut self.children[v]) {
            self.parents[c].retain(|&p| p != v);
        }
        for p in std::mem::take(&mut self.parents[v]) {
            self.children[p].retain(|&c| c != v);
        }
        self.alive[v] = false;
        self.labels[v] = None;
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    /// Ids of live nodes in increasing order.
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    pub fn node_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes().map(|v| self.children[v].len()).sum()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn label(&self, v: usize) -> Option<&Taxon> {
        self.labels[v].as_ref()
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.parents[v].len()
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    /// Live nodes with indegree zero.
    pub fn sources(&self) -> Vec<usize> {
        self.nodes().filter(|&v| self.parents[v].is_empty()).collect()
    }

    /// Topological order of the live nodes, or `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = self.sources().into();
        let mut order = Vec::with_capacity(self.node_count());
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        (order.len() == self.node_count()).then_some(order)
    }

    /// Nodes reachable from `from`, including `from` itself.
    pub fn reachable_from(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.alive.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// Deletes every node not reachable from `root`.
    pub fn retain_reachable(&mut self, root: usize) {
        let seen = self.reachable_from(root);
        let dead: Vec<usize> = self.nodes().filter(|&v| !seen[v]).collect();
        for v in dead {
            self.remove_node(v);
        }
    }

    /// Repeatedly deletes unlabeled nodes without children.
    pub fn prune_dead_ends(&mut self) {
        let mut stack: Vec<usize> = self
            .nodes()
            .filter(|&v| self.children[v].is_empty() && self.labels[v].is_none())
            .collect();
        while let Some(v) = stack.pop() {
            if !self.alive[v] {
                continue;
            }
            let parents = self.parents[v].clone();
            self.remove_node(v);
            for p in parents {
                if self.alive[p] && self.children[p].is_empty() && self.labels[p].is_none() {
                    stack.push(p);
                }
            }
        }
    }

    /// Contracts indegree-1 outdegree-1 nodes until none remain: the node
    /// `v` on `u -> v -> w` is removed and replaced by the edge `u -> w`.
    ///
    /// Fails without modifying the graph further if a contraction would
    /// create a second `u -> w` edge.
    pub fn suppress_degree2(&mut self) -> Result<()> {
        self.suppress_where(|_| true)
    }

    /// As [`Dag::suppress_degree2`], restricted to nodes accepted by `eligible`.
    pub fn suppress_where(&mut self, mut eligible: impl FnMut(usize) -> bool) -> Result<()> {
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..self.alive.len() {
                if !self.alive[v]
                    || self.parents[v].len() != 1
                    || self.children[v].len() != 1
                    || !eligible(v)
                {
                    continue;
                }
                let (u, w) = (self.parents[v][0], self.children[v][0]);
                if self.children[u].contains(&w) {
                    return Err(Error::Structure(format!(
                        "contracting node {v} would duplicate edge {u} -> {w}"
                    )));
                }
                self.remove_node(v);
                self.add_edge(u, w);
                changed = true;
            }
        }
        Ok(())
    }

    /// Renumbers live nodes densely, preserving their relative order.
    /// Returns the new graph and the old-to-new id map.
    pub fn compact(&self) -> (Dag, Vec<Option<usize>>) {
        let mut map = vec![None; self.alive.len()];
        let mut out = Dag::new();
        for v in self.nodes() {
            map[v] = Some(out.add_node(self.labels[v].clone()));
        }
        for v in self.nodes() {
            for &c in &self.children[v] {
                out.add_edge(map[v].unwrap(), map[c].unwrap());
            }
        }
        (out, map)
    }
}
