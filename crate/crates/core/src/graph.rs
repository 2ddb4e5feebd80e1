//! Undirected graphs loaded from whitespace-separated edge lists.
//!
//! Node tokens are arbitrary strings. Internally nodes are dense `u32` ids
//! assigned in order of first appearance, and adjacency is kept in CSR form
//! with every neighbor list sorted.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Immutable undirected simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    adjacency: Vec<NodeId>,
    tokens: Vec<String>,
    index: HashMap<String, NodeId>,
    edge_count: usize,
}

/// Bookkeeping from parsing an edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub edge_lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Builds a graph over `tokens` from an edge list of internal ids.
    /// Self-loops and repeated edges are dropped.
    pub fn from_edges(tokens: Vec<String>, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let n = tokens.len();
        let mut index = HashMap::with_capacity(n);
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i as NodeId).is_some() {
                return Err(Error::Data(format!("duplicate node token {t:?}")));
            }
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u != v {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![0; offsets[n]];
        for &(u, v) in edges {
            if u != v {
                adjacency[fill[u as usize]] = v;
                fill[u as usize] += 1;
                adjacency[fill[v as usize]] = u;
                fill[v as usize] += 1;
            }
        }

        // sort and dedup each row, then compact
        let mut compact = Vec::with_capacity(adjacency.len());
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0);
        for v in 0..n {
            let row = &mut adjacency[offsets[v]..offsets[v + 1]];
            row.sort_unstable();
            let start = compact.len();
            for &x in row.iter() {
                if compact.len() == start || *compact.last().unwrap() != x {
                    compact.push(x);
                }
            }
            new_offsets.push(compact.len());
        }
        compact.shrink_to_fit();
        let edge_count = compact.len() / 2;
        Ok(Graph {
            offsets: new_offsets,
            adjacency: compact,
            tokens,
            index,
            edge_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Position of `v`'s first neighbor in the flat adjacency array; slot
    /// `adjacency_offset(v) + j` identifies the directed edge to
    /// `neighbors(v)[j]`.
    #[inline]
    pub fn adjacency_offset(&self, v: NodeId) -> usize {
        self.offsets[v as usize]
    }

    pub fn checked_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check_node(v)?;
        Ok(self.neighbors(v))
    }

    pub fn checked_degree(&self, v: NodeId) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.degree(v))
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "node id {v} out of range (n = {})",
                self.node_count()
            )))
        }
    }

    /// Binary search in the sorted neighbor list.
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn token(&self, v: NodeId) -> &str {
        &self.tokens[v as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn node_id(&self, token: &str) -> Option<NodeId> {
        self.index.get(token).copied()
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count as f64 / self.node_count() as f64
    }

    /// Every undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }

    /// Component label per node, labels numbered in order of each
    /// component's smallest node id.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s as NodeId);
            while let Some(v) = queue.pop_front() {
                for &x in self.neighbors(v) {
                    if label[x as usize] == usize::MAX {
                        label[x as usize] = count;
                        queue.push_back(x);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.component_count() == 1
    }

    /// Induced subgraph on the largest connected component.
    ///
    /// Ids are re-compacted preserving relative order, so tokens survive.
    /// Among equally large components the one containing the smallest node id
    /// wins.
    pub fn largest_connected_component(&self) -> Graph {
        let (label, count) = self.components();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        // labels are ordered by minimal member, so the first maximum wins ties
        let best = sizes
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc })
            .0;
        let keep: Vec<bool> = label.iter().map(|&l| l == best).collect();
        self.induced_subgraph(&keep)
    }

    fn induced_subgraph(&self, keep: &[bool]) -> Graph {
        let mut remap = vec![NodeId::MAX; self.node_count()];
        let mut tokens = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                remap[v] = tokens.len() as NodeId;
                tokens.push(self.tokens[v].clone());
            }
        }
        let edges: Vec<(NodeId, NodeId)> = self
            .edges()
            .filter(|&(u, v)| keep[u as usize] && keep[v as usize])
            .map(|(u, v)| (remap[u as usize], remap[v as usize]))
            .collect();
        Graph::from_edges(tokens, &edges).expect("induced subgraph of a valid graph")
    }

    /// Writes one `u v` token line per undirected edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.token(u), self.token(v))?;
        }
        Ok(())
    }

    /// Writes `original_token internal_id` lines.
    pub fn write_nodemap<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, t) in self.tokens.iter().enumerate() {
            writeln!(out, "{t} {i}")?;
        }
        Ok(())
    }
}

/// Reads an edge list from `path`; see [`parse_edge_list`].
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    load_edge_list_with_stats(path).map(|(g, _)| g)
}

pub fn load_edge_list_with_stats(path: impl AsRef<Path>) -> Result<(Graph, LoadStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path)
}

/// Parses an edge list, treating every edge as undirected.
///
/// Lines starting with `#` or `%` and blank lines are skipped. The first two
/// whitespace-separated tokens of each remaining line form an edge; further
/// columns (weights, timestamps) are ignored. Node ids follow first
/// appearance, including appearances in dropped self-loops.
pub fn parse_edge_list<R: BufRead>(reader: R, path: &Path) -> Result<(Graph, LoadStats)> {
    let mut tokens: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut edges = Vec::new();
    let mut stats = LoadStats::default();

    let mut intern = |tok: &str, tokens: &mut Vec<String>| -> NodeId {
        if let Some(&id) = index.get(tok) {
            return id;
        }
        let id = tokens.len() as NodeId;
        index.insert(tok.to_owned(), id);
        tokens.push(tok.to_owned());
        id
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (a, b) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("expected two node tokens, got {trimmed:?}"),
                ))
            }
        };
        stats.edge_lines += 1;
        let u = intern(a, &mut tokens);
        let v = intern(b, &mut tokens);
        if u == v {
            stats.self_loops += 1;
        } else {
            edges.push((u.min(v), u.max(v)));
        }
    }
    if tokens.is_empty() {
        return Err(Error::Data(format!("{}: empty graph", path.display())));
    }
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    stats.duplicates = before - edges.len();
    let graph = Graph::from_edges(tokens, &edges)?;
    Ok((graph, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<(Graph, LoadStats)> {
        parse_edge_list(text.as_bytes(), Path::new("<mem>"))
    }

    #[test]
    fn triangle() {
        let (g, _) = parse("0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        for v in 0..3 {
            assert_eq!(g.degree(v), 2);
        }
    }

    #[test]
    fn duplicate_and_self_loop_dropped() {
        let (g, stats) = parse("a b\nb a\na a\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.self_loops, 1);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(g.node_id("a"), Some(0));
        assert_eq!(g.node_id("b"), Some(1));
    }

    #[test]
    fn comments_and_weights() {
        let (g, _) = parse("# header\n% konect\n\nx y 0.5\ny z 2 17\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse("1 2\n3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_graph_rejected() {
        assert!(matches!(parse("# nothing\n"), Err(Error::Data(_))));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_edge_list("/nonexistent/graph.edges"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn star_center_degree() {
        let (g, _) = parse("c 1\nc 2\nc 3\nc 4\n").unwrap();
        assert_eq!(g.degree(g.node_id("c").unwrap()), 4);
    }

    #[test]
    fn out_of_range_query() {
        let (g, _) = parse("0 1\n").unwrap();
        assert!(g.checked_degree(2).is_err());
        assert!(g.checked_neighbors(5).is_err());
        assert_eq!(g.checked_neighbors(1).unwrap(), &[0]);
    }

    #[test]
    fn lcc_of_triangle_plus_edge() {
        let (g, _) = parse("p q\n0 1\n1 2\n2 0\n").unwrap();
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.edge_count(), 3);
        let mut toks = lcc.tokens().to_vec();
        toks.sort();
        assert_eq!(toks, ["0", "1", "2"]);
    }

    #[test]
    fn lcc_tie_prefers_earliest_component() {
        let (g, _) = parse("a b\nc d\n").unwrap();
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.tokens(), ["a", "b"]);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let (g, _) = parse("0 1\n1 2\n2 3\n3 0\n0 2\n").unwrap();
        assert_eq!(g.largest_connected_component(), g);
    }

    #[test]
    fn nodemap_lines() {
        let (g, _) = parse("x y\n").unwrap();
        let mut buf = Vec::new();
        g.write_nodemap(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x 0\ny 1\n");
    }
}
