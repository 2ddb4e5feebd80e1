//! Train/test edge split for link prediction.

use std::collections::{HashSet, VecDeque};

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::sampling::{stream_rng, KneRng};

/// Removed test edges, sampled non-edges and the residual training graph.
#[derive(Clone, Debug)]
pub struct EdgeSplit {
    /// Original graph minus `test_pos`, on the same node ids.
    pub residual: Graph,
    pub test_pos: Vec<(NodeId, NodeId)>,
    /// Non-edges of the original graph, `|test_neg| = |test_pos|`.
    pub test_neg: Vec<(NodeId, NodeId)>,
    /// Residual edges.
    pub train_pos: Vec<(NodeId, NodeId)>,
    /// Non-edges disjoint from `test_neg`, `|train_neg| = |train_pos|`.
    pub train_neg: Vec<(NodeId, NodeId)>,
    /// Edges the fraction asked for; more than `test_pos.len()` when the
    /// connectivity constraint ran out of removable edges.
    pub requested: usize,
}

/// Adjacency lists that support edge deletion.
struct Residual {
    adj: Vec<Vec<NodeId>>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: VecDeque<NodeId>,
}

impl Residual {
    fn new(g: &Graph) -> Self {
        let n = g.node_count();
        Residual {
            adj: (0..n as NodeId).map(|v| g.neighbors(v).to_vec()).collect(),
            stamp: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn remove(&mut self, u: NodeId, v: NodeId) {
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a as usize];
            let i = list.iter().position(|&x| x == b).expect("edge present");
            list.swap_remove(i);
        }
    }

    /// Whether `v` is reachable from `u` once the edge `u–v` is ignored.
    /// Searches from the smaller-degree end and stops at the first hit.
    fn connected_without(&mut self, u: NodeId, v: NodeId) -> bool {
        let (s, t) = if self.adj[u as usize].len() <= self.adj[v as usize].len() { (u, v) } else { (v, u) };
        self.epoch += 1;
        let epoch = self.epoch;
        self.queue.clear();
        self.stamp[s as usize] = epoch;
        self.queue.push_back(s);
        while let Some(x) = self.queue.pop_front() {
            for &y in &self.adj[x as usize] {
                if (x == s && y == t) || self.stamp[y as usize] == epoch {
                    continue;
                }
                if y == t {
                    return true;
                }
                self.stamp[y as usize] = epoch;
                self.queue.push_back(y);
            }
        }
        false
    }
}

fn ordered(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Draws `count` distinct non-edges of `g`, avoiding `exclude`.
fn sample_non_edges(
    g: &Graph,
    count: usize,
    exclude: &HashSet<(NodeId, NodeId)>,
    rng: &mut KneRng,
) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.node_count() as u64;
    let pairs = n * n.saturating_sub(1) / 2;
    let available = pairs - g.edge_count() as u64 - exclude.len() as u64;
    if (count as u64) > available {
        return Err(Error::Data(format!(
            "graph is too dense: need {count} non-edges, only {available} available"
        )));
    }
    let mut taken = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..n) as NodeId;
        let v = rng.random_range(0..n) as NodeId;
        if u == v || g.has_edge(u, v) {
            continue;
        }
        let e = ordered(u, v);
        if exclude.contains(&e) || !taken.insert(e) {
            continue;
        }
        out.push(e);
    }
    Ok(out)
}

/// Picks up to `⌊fraction · m⌋` edges to remove, skipping bridges of the
/// current residual unless `allow_disconnect`. Returns the removed edges, the
/// kept edges (sorted) and the requested count.
fn choose_removals(
    g: &Graph,
    fraction: f64,
    allow_disconnect: bool,
    rng: &mut KneRng,
) -> (Vec<(NodeId, NodeId)>, Vec<(NodeId, NodeId)>, usize) {
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    edges.shuffle(rng);
    let requested = (fraction * edges.len() as f64).floor() as usize;
    let mut residual = Residual::new(g);
    let mut removed = vec![false; edges.len()];
    let mut test_pos = Vec::with_capacity(requested);
    for (i, &(u, v)) in edges.iter().enumerate() {
        if test_pos.len() == requested {
            break;
        }
        // A bridge stays a bridge as edges are deleted, so one pass suffices.
        if !allow_disconnect && !residual.connected_without(u, v) {
            continue;
        }
        residual.remove(u, v);
        removed[i] = true;
        test_pos.push((u, v));
    }
    let mut kept: Vec<(NodeId, NodeId)> = edges.iter().zip(&removed).filter(|(_, &r)| !r).map(|(&e, _)| e).collect();
    kept.sort_unstable();
    (test_pos, kept, requested)
}

/// Removes `⌊fraction · m⌋` uniformly chosen edges as positive test pairs.
///
/// Unless `allow_disconnect` is set, an edge is skipped when its removal
/// would disconnect the residual graph, so `g` must be connected and fewer
/// edges may be removed than requested (e.g. none at all on a tree).
pub fn split_edges(g: &Graph, fraction: f64, seed: u64, allow_disconnect: bool) -> Result<EdgeSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "edge fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if !allow_disconnect && !g.is_connected() {
        return Err(Error::Data(format!(
            "graph has {} components; take the largest connected component first",
            g.component_count()
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let (test_pos, train_pos, requested) = choose_removals(g, fraction, allow_disconnect, &mut rng);
    if test_pos.len() < requested {
        warn!(
            "only {} of {} requested edges could be removed without disconnecting the graph",
            test_pos.len(),
            requested
        );
    }
    if test_pos.is_empty() {
        return Err(Error::Data("no removable edges: every edge is a bridge".into()));
    }
    let residual_graph = Graph::from_edges(g.tokens().to_vec(), &train_pos)?;

    let test_neg = sample_non_edges(g, test_pos.len(), &HashSet::new(), &mut rng)?;
    let exclude: HashSet<_> = test_neg.iter().copied().collect();
    let train_neg = sample_non_edges(g, train_pos.len(), &exclude, &mut rng)?;

    Ok(EdgeSplit {
        residual: residual_graph,
        test_pos,
        test_neg,
        train_pos,
        train_neg,
        requested,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32)]) -> Graph {
        Graph::from_edges((0..n).map(|i| i.to_string()).collect(), edges).unwrap()
    }

    fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
        let mut rng = stream_rng(seed, 7);
        let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (rng.random_range(0..v), v)).collect();
        for _ in 0..extra {
            let (u, v) = (rng.random_range(0..n as u32), rng.random_range(0..n as u32));
            if u != v {
                edges.push((u, v));
            }
        }
        graph(n, &edges)
    }

    fn check_invariants(g: &Graph, s: &EdgeSplit) {
        assert!(s.residual.is_connected());
        assert_eq!(s.test_pos.len(), s.test_neg.len());
        assert_eq!(s.train_pos.len(), s.train_neg.len());
        assert_eq!(s.residual.edge_count() + s.test_pos.len(), g.edge_count());
        for &(u, v) in &s.test_pos {
            assert!(g.has_edge(u, v) && !s.residual.has_edge(u, v));
        }
        for &(u, v) in s.test_neg.iter().chain(&s.train_neg) {
            assert!(u != v && !g.has_edge(u, v));
        }
        let test_neg: HashSet<_> = s.test_neg.iter().collect();
        assert_eq!(test_neg.len(), s.test_neg.len());
        assert!(s.train_neg.iter().all(|e| !test_neg.contains(e)));
    }

    #[test]
    fn triangle_removes_one() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5)]);
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        for seed in 0..5 {
            let (removed, kept, requested) = choose_removals(&tri, 0.5, false, &mut stream_rng(seed, 0));
            assert_eq!((removed.len(), kept.len(), requested), (1, 2, 1));
            assert!(Graph::from_edges(tri.tokens().to_vec(), &kept).unwrap().is_connected());
        }
        let s = split_edges(&g, 0.5, 3, false).unwrap();
        check_invariants(&g, &s);
        assert_eq!((s.requested, s.test_pos.len()), (3, 1));
        assert!(s.residual.has_edge(2, 3));
    }

    #[test]
    fn tree_has_nothing_removable() {
        let path = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(matches!(split_edges(&path, 0.5, 0, false), Err(Error::Data(_))));
        let s = split_edges(&path, 0.5, 0, true).unwrap();
        assert_eq!(s.test_pos.len(), 2);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(matches!(split_edges(&g, 0.0, 0, false), Err(Error::InvalidArgument(_))));
        assert!(matches!(split_edges(&g, 1.0, 0, false), Err(Error::InvalidArgument(_))));
        let two = graph(4, &[(0, 1), (2, 3)]);
        assert!(matches!(split_edges(&two, 0.5, 0, false), Err(Error::Data(_))));
    }

    #[test]
    fn complete_graph_is_too_dense_for_negatives() {
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(matches!(split_edges(&k4, 0.5, 0, false), Err(Error::Data(_))));
    }

    #[test]
    fn random_graphs_keep_invariants() {
        for seed in 0..10 {
            let g = random_connected(200, 400, seed);
            let s = split_edges(&g, 0.5, seed, false).unwrap();
            check_invariants(&g, &s);
            assert_eq!(s.requested, g.edge_count() / 2);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let g = random_connected(100, 200, 1);
        let a = split_edges(&g, 0.5, 9, false).unwrap();
        let b = split_edges(&g, 0.5, 9, false).unwrap();
        assert_eq!(a.test_pos, b.test_pos);
        assert_eq!(a.test_neg, b.test_neg);
        assert_eq!(a.train_neg, b.train_neg);
    }
}
