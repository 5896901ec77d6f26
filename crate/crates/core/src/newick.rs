//! Newick for rooted binary trees and extended Newick (`#H<k>` hybrid
//! tags) for networks.
//!
//! The outdegree-1 root is always materialized: `((a,b));` is a root above
//! a cherry and `(a);` is a root above a single leaf. When the top-level
//! node of the input has two children a root is added above it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::model::{BinaryTree, NodeId, NodeKind, PhyloNetwork};
use crate::taxon::Taxon;

#[derive(Debug)]
struct Parsed {
    offset: usize,
    children: Vec<Parsed>,
    name: Option<String>,
    tag: Option<u32>,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

const STOP: &[u8] = b"(),;:#";

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn document(mut self) -> Result<Parsed> {
        let top = self.node()?;
        self.skip_ws();
        match self.peek() {
            Some(b';') => self.pos += 1,
            Some(b')') => return Err(Error::parse(self.pos, "unbalanced parentheses: unexpected ')'")),
            Some(_) => return Err(Error::parse(self.pos, "expected ';'")),
            None => return Err(Error::parse(self.pos, "missing terminating ';'")),
        }
        self.skip_ws();
        if self.pos < self.text.len() {
            return Err(Error::parse(self.pos, "trailing text after ';'"));
        }
        Ok(top)
    }

    fn node(&mut self) -> Result<Parsed> {
        self.skip_ws();
        let offset = self.pos;
        let mut children = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.node()?);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    None | Some(b';') => {
                        return Err(Error::parse(offset, "unbalanced parentheses: '(' is never closed"))
                    }
                    Some(_) => return Err(Error::parse(self.pos, "expected ',' or ')'")),
                }
            }
        }
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|b| !STOP.contains(&b) && !b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
        let name = (self.pos > start).then(|| self.text[start..self.pos].to_string());
        let mut tag = None;
        if self.peek() == Some(b'#') {
            let at = self.pos;
            self.pos += 1;
            if self.peek() != Some(b'H') {
                return Err(Error::parse(at, "hybrid tags must have the form #H<number>"));
            }
            self.pos += 1;
            let digits = self.pos;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
            tag = Some(
                self.text[digits..self.pos]
                    .parse()
                    .map_err(|_| Error::parse(at, "hybrid tags must have the form #H<number>"))?,
            );
        }
        if self.peek() == Some(b':') {
            return Err(Error::parse(self.pos, "branch lengths are not supported"));
        }
        if children.is_empty() && name.is_none() && tag.is_none() {
            return Err(Error::parse(offset, "empty label"));
        }
        Ok(Parsed {
            offset,
            children,
            name,
            tag,
        })
    }
}

fn leaf_taxon(node: &Parsed, name: &str, seen: &mut BTreeSet<Taxon>) -> Result<Taxon> {
    let t = Taxon::new(name)
        .map_err(|_| Error::parse(node.offset, format!("invalid leaf label {name:?}")))?;
    if !seen.insert(t.clone()) {
        return Err(Error::parse(node.offset, format!("duplicate leaf label {name:?}")));
    }
    Ok(t)
}

/// Parses a rooted binary tree.
pub fn parse_newick(text: &str) -> Result<BinaryTree> {
    fn build(node: &Parsed, dag: &mut Dag, seen: &mut BTreeSet<Taxon>) -> Result<usize> {
        if node.tag.is_some() {
            return Err(Error::parse(node.offset, "hybrid tag in a tree; use extended Newick"));
        }
        if node.children.is_empty() {
            let t = leaf_taxon(node, node.name.as_deref().unwrap_or_default(), seen)?;
            return Ok(dag.add_node(Some(t)));
        }
        if node.name.is_some() {
            return Err(Error::parse(node.offset, "internal node labels are not supported"));
        }
        if node.children.len() != 2 {
            return Err(Error::parse(
                node.offset,
                format!("non-binary node with {} children", node.children.len()),
            ));
        }
        let v = dag.add_node(None);
        for c in &node.children {
            let cv = build(c, dag, seen)?;
            dag.add_edge(v, cv);
        }
        Ok(v)
    }

    let top = Parser { text, pos: 0 }.document()?;
    let mut dag = Dag::new();
    let mut seen = BTreeSet::new();
    let root = dag.add_node(None);
    let below = if top.children.len() == 1 && top.name.is_none() && top.tag.is_none() {
        &top.children[0]
    } else {
        &top
    };
    let child = build(below, &mut dag, &mut seen)?;
    dag.add_edge(root, child);
    BinaryTree::from_dag(&dag)
}

/// Parses a rooted network in extended Newick.
///
/// A reticulate node is written once as `(child)#H<k>` and referenced as a
/// bare `#H<k>` from each of its other parents.
pub fn parse_extended_newick(text: &str) -> Result<PhyloNetwork> {
    #[derive(Default)]
    struct TagInfo {
        occurrences: usize,
        definition: Option<usize>,
        first_offset: usize,
    }

    fn scan(node: &Parsed, tags: &mut BTreeMap<u32, TagInfo>) -> Result<()> {
        if let Some(k) = node.tag {
            if node.name.is_some() {
                return Err(Error::parse(node.offset, "reticulate leaves are not supported"));
            }
            let info = tags.entry(k).or_insert_with(|| TagInfo {
                first_offset: node.offset,
                ..TagInfo::default()
            });
            info.occurrences += 1;
            if !node.children.is_empty() {
                if info.definition.is_some() {
                    return Err(Error::parse(
                        node.offset,
                        format!("tag #H{k} is redefined with a second child list"),
                    ));
                }
                info.definition = Some(node.offset);
                if node.children.len() != 1 {
                    return Err(Error::parse(
                        node.offset,
                        format!("reticulate node #H{k} must have exactly one child"),
                    ));
                }
            }
        }
        node.children.iter().try_for_each(|c| scan(c, tags))
    }

    struct Builder<'t> {
        dag: Dag,
        seen: BTreeSet<Taxon>,
        tag_nodes: HashMap<u32, usize>,
        tags: &'t BTreeMap<u32, TagInfo>,
    }

    impl Builder<'_> {
        fn build(&mut self, node: &Parsed) -> Result<usize> {
            if let Some(k) = node.tag {
                let v = *self
                    .tag_nodes
                    .entry(k)
                    .or_insert_with(|| self.dag.add_node(None));
                if let Some(child) = node.children.first() {
                    let c = self.build(child)?;
                    self.dag.add_edge(v, c);
                }
                return Ok(v);
            }
            if node.children.is_empty() {
                let t = leaf_taxon(node, node.name.as_deref().unwrap_or_default(), &mut self.seen)?;
                return Ok(self.dag.add_node(Some(t)));
            }
            if node.name.is_some() {
                return Err(Error::parse(node.offset, "internal node labels are not supported"));
            }
            if node.children.len() != 2 {
                return Err(Error::parse(
                    node.offset,
                    format!("non-binary node with {} children", node.children.len()),
                ));
            }
            let v = self.dag.add_node(None);
            for c in &node.children {
                let cv = self.build(c)?;
                self.dag.add_edge(v, cv);
            }
            Ok(v)
        }
    }

    let top = Parser { text, pos: 0 }.document()?;
    let mut tags = BTreeMap::new();
    scan(&top, &mut tags)?;
    for (k, info) in &tags {
        if info.definition.is_none() {
            return Err(Error::parse(info.first_offset, format!("tag #H{k} is never defined")));
        }
        if info.occurrences < 2 {
            return Err(Error::parse(
                info.first_offset,
                format!("tag #H{k} appears once; a reticulation needs at least two parents"),
            ));
        }
    }
    if top.tag.is_some() {
        return Err(Error::parse(top.offset, "the top-level node cannot be a reticulation"));
    }

    let mut b = Builder {
        dag: Dag::new(),
        seen: BTreeSet::new(),
        tag_nodes: HashMap::new(),
        tags: &tags,
    };
    let root = b.dag.add_node(None);
    let below = if top.children.len() == 1 && top.name.is_none() {
        &top.children[0]
    } else {
        &top
    };
    let child = b.build(below)?;
    b.dag.add_edge(root, child);

    if b.dag.topological_order().is_none() {
        // Report the first tag whose node lies on or below a cycle.
        let order_free = cyclic_nodes(&b.dag);
        let offset = b
            .tag_nodes
            .iter()
            .filter(|(_, v)| order_free.contains(v))
            .filter_map(|(k, _)| b.tags[k].definition)
            .min()
            .unwrap_or(0);
        return Err(Error::parse(offset, "hybrid tags form a directed cycle"));
    }
    PhyloNetwork::from_dag(&b.dag)
}

fn cyclic_nodes(dag: &Dag) -> BTreeSet<usize> {
    let mut indeg: HashMap<usize, usize> = dag.nodes().map(|v| (v, dag.indegree(v))).collect();
    let mut stack: Vec<usize> = dag.sources();
    while let Some(v) = stack.pop() {
        indeg.remove(&v);
        for &c in dag.children(v) {
            if let Some(d) = indeg.get_mut(&c) {
                *d -= 1;
                if *d == 0 {
                    stack.push(c);
                }
            }
        }
    }
    indeg.into_keys().collect()
}

/// Writes a tree in canonical Newick.
pub fn write_newick(tree: &BinaryTree) -> String {
    write_extended_newick(tree.as_network())
}

/// Writes a network in canonical extended Newick.
///
/// Children are ordered by smallest descendant leaf, then by the text of
/// their unfolded subnetwork. Reticulations are tagged `#H1`, `#H2`, ... in
/// a topological order that uses the same key to break ties, and each is
/// expanded at its first occurrence. For tree-child networks the output is
/// a complete isomorphism invariant.
pub fn write_extended_newick(net: &PhyloNetwork) -> String {
    let order = net.topological_order();
    let min_leaf = net.min_leaf_below();
    let n = net.node_count();

    let mut code: Vec<String> = vec![String::new(); n];
    let mut sorted_children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for &v in order.iter().rev() {
        let mut kids: Vec<NodeId> = net.children(v).collect();
        kids.sort_by(|a, b| {
            (&min_leaf[a.0], &code[a.0]).cmp(&(&min_leaf[b.0], &code[b.0]))
        });
        code[v.0] = match net.kind(v) {
            NodeKind::Leaf => net.label(v).expect("leaves are labeled").to_string(),
            NodeKind::Reticulate => format!("#({})", code[kids[0].0]),
            _ => {
                let inner: Vec<&str> = kids.iter().map(|c| code[c.0].as_str()).collect();
                format!("({})", inner.join(","))
            }
        };
        sorted_children[v.0] = kids;
    }

    let mut tag = vec![0usize; n];
    let mut indeg: Vec<usize> = (0..n).map(|v| net.dag().indegree(v)).collect();
    let mut ready: BTreeSet<(&str, usize)> = BTreeSet::new();
    ready.insert((code[net.root().0].as_str(), net.root().0));
    let mut next_tag = 1;
    while let Some(entry) = ready.pop_first() {
        let v = entry.1;
        if net.kind(NodeId(v)) == NodeKind::Reticulate {
            tag[v] = next_tag;
            next_tag += 1;
        }
        for c in net.children(NodeId(v)) {
            indeg[c.0] -= 1;
            if indeg[c.0] == 0 {
                ready.insert((code[c.0].as_str(), c.0));
            }
        }
    }

    fn emit(
        v: NodeId,
        net: &PhyloNetwork,
        kids: &[Vec<NodeId>],
        tag: &[usize],
        expanded: &mut [bool],
        out: &mut String,
    ) {
        match net.kind(v) {
            NodeKind::Leaf => out.push_str(net.label(v).unwrap().as_str()),
            NodeKind::Reticulate if expanded[v.0] => {
                let _ = write!(out, "#H{}", tag[v.0]);
            }
            kind => {
                expanded[v.0] = true;
                out.push('(');
                for (i, &c) in kids[v.0].iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    emit(c, net, kids, tag, expanded, out);
                }
                out.push(')');
                if kind == NodeKind::Reticulate {
                    let _ = write!(out, "#H{}", tag[v.0]);
                }
            }
        }
    }

    let mut out = String::new();
    let mut expanded = vec![false; n];
    emit(net.root(), net, &sorted_children, &tag, &mut expanded, &mut out);
    out.push(';');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_line_tree_with_root_edge() {
        let t = parse_newick("((e,(d,(a,(b,(c,l))))));").unwrap();
        assert_eq!(t.taxa().len(), 6);
        assert!(t.is_line_tree());
        assert_eq!(t.canonical_form(), "((((a,(b,(c,l))),d),e));");
        assert_eq!(parse_newick(&t.canonical_form()).unwrap().canonical_form(), t.canonical_form());
    }

    #[test]
    fn implicit_root_above_two_children() {
        let t = parse_newick("(b,a);").unwrap();
        assert_eq!(write_newick(&t), "((a,b));");
    }

    #[test]
    fn single_leaf() {
        let t = parse_newick("(a);").unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(write_newick(&t), "(a);");
        assert_eq!(write_newick(&parse_newick("a;").unwrap()), "(a);");
    }

    #[test]
    fn tree_errors_carry_offsets() {
        let cases = [
            ("((a,b,c));", 1, "non-binary"),
            ("((a,b);", 0, "unbalanced"),
            ("((a,b)));", 7, "unbalanced"),
            ("((a,a));", 4, "duplicate"),
            ("((a,));", 4, "empty label"),
            ("((a,b))", 7, "';'"),
            ("((a:1,b));", 3, "branch lengths"),
            ("((a,b)x);", 1, "internal node labels"),
            ("(((a,b)));", 1, "non-binary"),
        ];
        for (text, offset, needle) in cases {
            match parse_newick(text) {
                Err(Error::Parse { offset: o, message }) => {
                    assert_eq!(o, offset, "{text}: {message}");
                    assert!(message.contains(needle), "{text}: {message}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn extended_roundtrip_and_tags() {
        let text = "(((a,#H1),((b)#H1,c)));";
        let net = parse_extended_newick(text).unwrap();
        assert_eq!(net.hybridization_number(), 1);
        let out = write_extended_newick(&net);
        let again = parse_extended_newick(&out).unwrap();
        assert_eq!(write_extended_newick(&again), out);
        assert_eq!(out.matches("#H1").count(), 2);
    }

    #[test]
    fn extended_newick_errors() {
        let once = parse_extended_newick("((a,(b)#H1));").unwrap_err();
        assert!(matches!(once, Error::Parse { ref message, .. } if message.contains("appears once")), "{once}");
        let twice = parse_extended_newick("(((a)#H1,(a)#H1));").unwrap_err();
        assert!(matches!(twice, Error::Parse { ref message, .. } if message.contains("redefined")), "{twice}");
        let undefined = parse_extended_newick("((#H1,#H1));").unwrap_err();
        assert!(matches!(undefined, Error::Parse { ref message, .. } if message.contains("never defined")), "{undefined}");
        let cycle = parse_extended_newick("((a,((b,#H1))#H1));").unwrap_err();
        assert!(matches!(cycle, Error::Parse { ref message, .. } if message.contains("cycle")), "{cycle}");
    }

    #[test]
    fn tree_through_extended_path() {
        let t = parse_newick("((a,(b,c)));").unwrap();
        let n = parse_extended_newick("((a,(b,c)));").unwrap();
        assert_eq!(t.canonical_form(), write_extended_newick(&n));
    }
}
