//! Second-order biased random walks and the (center, context) pairs they
//! induce.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::sampling::{stream_rng, AliasTable, KneRng};

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    /// Maximum center/context distance.
    pub window: usize,
    pub seed: u64,
    /// Worker count. The corpus is reproducible for a fixed seed *and* a
    /// fixed worker count.
    pub threads: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 80,
            walk_length: 10,
            p: 1.0,
            q: 1.0,
            window: 10,
            seed: 0,
            threads: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_owned()));
        if self.walks_per_node < 1 {
            return bad("walks per node must be at least 1");
        }
        if self.walk_length < 2 {
            return bad("walk length must be at least 2");
        }
        if !(self.p > 0.0 && self.p.is_finite()) || !(self.q > 0.0 && self.q.is_finite()) {
            return bad("p and q must be positive");
        }
        if self.window < 1 {
            return bad("window must be at least 1");
        }
        if self.threads < 1 {
            return bad("threads must be at least 1");
        }
        Ok(())
    }

    fn is_first_order(&self) -> bool {
        self.p == 1.0 && self.q == 1.0
    }
}

/// A collection of walks stored back to back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkCorpus {
    nodes: Vec<NodeId>,
    offsets: Vec<usize>,
    node_count: usize,
}

impl WalkCorpus {
    pub fn new(node_count: usize) -> Self {
        WalkCorpus {
            nodes: Vec::new(),
            offsets: vec![0],
            node_count,
        }
    }

    pub fn push(&mut self, walk: &[NodeId]) {
        debug_assert!(walk.iter().all(|&v| (v as usize) < self.node_count));
        self.nodes.extend_from_slice(walk);
        self.offsets.push(self.nodes.len());
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Total number of walk positions, i.e. center occurrences.
    pub fn position_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn walk(&self, i: usize) -> &[NodeId] {
        &self.nodes[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn walks(&self) -> impl ExactSizeIterator<Item = &[NodeId]> + '_ {
        self.offsets.windows(2).map(move |w| &self.nodes[w[0]..w[1]])
    }

    /// Writes one walk per line as space-separated node tokens.
    pub fn write<W: Write>(&self, graph: &Graph, mut out: W) -> std::io::Result<()> {
        for walk in self.walks() {
            let mut first = true;
            for &v in walk {
                if !first {
                    out.write_all(b" ")?;
                }
                out.write_all(graph.token(v).as_bytes())?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Reads a walk file. With a graph, tokens are resolved against it;
/// otherwise ids are assigned in order of first appearance.
pub fn read_corpus(path: impl AsRef<Path>, graph: Option<&Graph>) -> Result<(WalkCorpus, Vec<String>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut tokens: Vec<String> = graph.map(|g| g.tokens().to_vec()).unwrap_or_default();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut walks: Vec<Vec<NodeId>> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut walk = Vec::new();
        for tok in line.split_whitespace() {
            let id = match graph {
                Some(g) => g.node_id(tok).ok_or_else(|| {
                    Error::parse(path, lineno + 1, format!("unknown node token {tok:?}"))
                })?,
                None => *index.entry(tok.to_owned()).or_insert_with(|| {
                    tokens.push(tok.to_owned());
                    (tokens.len() - 1) as NodeId
                }),
            };
            walk.push(id);
        }
        walks.push(walk);
    }
    let mut corpus = WalkCorpus::new(tokens.len());
    for w in &walks {
        corpus.push(w);
    }
    if corpus.is_empty() {
        return Err(Error::Data(format!("{}: empty walk file", path.display())));
    }
    Ok((corpus, tokens))
}

/// Per-directed-edge alias tables for the p/q-biased transition.
///
/// For the directed edge `t -> v` (CSR slot `e` of `t`'s row) the segment
/// `offsets[e]..offsets[e] + degree(v)` samples a position in `adj(v)`.
struct SecondOrder {
    offsets: Vec<usize>,
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl SecondOrder {
    fn build(g: &Graph, p: f64, q: f64) -> Result<Self> {
        let mut offsets = Vec::new();
        let mut prob = Vec::new();
        let mut alias = Vec::new();
        let mut weights = Vec::new();
        for t in 0..g.node_count() as NodeId {
            for &v in g.neighbors(t) {
                weights.clear();
                weights.extend(g.neighbors(v).iter().map(|&x| {
                    if x == t {
                        1.0 / p
                    } else if g.has_edge(t, x) {
                        1.0
                    } else {
                        1.0 / q
                    }
                }));
                let (pr, al) = AliasTable::new(&weights)?.into_parts();
                offsets.push(prob.len());
                prob.extend(pr);
                alias.extend(al);
            }
        }
        Ok(SecondOrder {
            offsets,
            prob,
            alias,
        })
    }

    #[inline]
    fn sample(&self, edge: usize, degree: usize, rng: &mut KneRng) -> usize {
        let base = self.offsets[edge];
        let i = rng.random_range(0..degree);
        if rng.random::<f64>() < self.prob[base + i] {
            i
        } else {
            self.alias[base + i] as usize
        }
    }
}

/// Simulates `walks_per_node` passes of one walk from every node.
///
/// Each pass visits start nodes in a freshly shuffled order. With
/// `p = q = 1` every step is a uniform neighbor choice; otherwise the step
/// from `v` after arriving from `t` weights candidate `x` by `1/p` if
/// `x = t`, `1` if `x` neighbors `t`, and `1/q` otherwise. Walks started at
/// isolated nodes consist of the start node alone.
pub fn generate_walks(g: &Graph, cfg: &WalkConfig) -> Result<WalkCorpus> {
    cfg.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Data("cannot walk an empty graph".into()));
    }
    let second = if cfg.is_first_order() {
        None
    } else {
        Some(SecondOrder::build(g, cfg.p, cfg.q)?)
    };
    let second = second.as_ref();

    let mut order_rng = stream_rng(cfg.seed, 0);
    let mut corpus = WalkCorpus::new(n);
    corpus.nodes.reserve(n * cfg.walks_per_node * cfg.walk_length);
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();

    for pass in 0..cfg.walks_per_node {
        order.shuffle(&mut order_rng);
        let chunk = n.div_ceil(cfg.threads);
        let stream_base = 1 + (pass * cfg.threads) as u64;
        let parts: Vec<WalkCorpus> = if cfg.threads == 1 {
            vec![walk_chunk(g, cfg, second, &order, stream_base)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = order
                    .chunks(chunk)
                    .enumerate()
                    .map(|(w, starts)| {
                        s.spawn(move || walk_chunk(g, cfg, second, starts, stream_base + w as u64))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            })
        };
        for part in parts {
            for w in part.walks() {
                corpus.push(w);
            }
        }
    }
    Ok(corpus)
}

fn walk_chunk(
    g: &Graph,
    cfg: &WalkConfig,
    second: Option<&SecondOrder>,
    starts: &[NodeId],
    stream: u64,
) -> WalkCorpus {
    let mut rng = stream_rng(cfg.seed, stream);
    let mut out = WalkCorpus::new(g.node_count());
    let mut walk = Vec::with_capacity(cfg.walk_length);
    for &start in starts {
        walk.clear();
        walk.push(start);
        if g.degree(start) > 0 {
            let first = g.neighbors(start);
            let j = rng.random_range(0..first.len());
            // CSR slot of the edge just traversed
            let mut edge = slot(g, start, j);
            walk.push(first[j]);
            while walk.len() < cfg.walk_length {
                let v = *walk.last().unwrap();
                let adj = g.neighbors(v);
                let j = match second {
                    None => rng.random_range(0..adj.len()),
                    Some(table) => table.sample(edge, adj.len(), &mut rng),
                };
                edge = slot(g, v, j);
                walk.push(adj[j]);
            }
        }
        out.push(&walk);
    }
    out
}

#[inline]
fn slot(g: &Graph, v: NodeId, j: usize) -> usize {
    g.adjacency_offset(v) + j
}

/// Window bounds `[lo, hi]` (inclusive, 0-based) of contexts for position `l`.
#[inline]
fn window_bounds(l: usize, len: usize, window: usize) -> (usize, usize) {
    (l.saturating_sub(window), (l + window).min(len - 1))
}

/// Number of contexts a center at position `l` sees in a walk of `len`.
#[inline]
pub fn contexts_at(l: usize, len: usize, window: usize) -> usize {
    let (lo, hi) = window_bounds(l, len, window);
    hi - lo
}

/// `(center, context)` pairs in walk-major, then position-major order.
/// Windows are clipped at walk boundaries.
pub fn context_pairs(
    corpus: &WalkCorpus,
    window: usize,
) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
    corpus.walks().flat_map(move |w| {
        (0..w.len()).flat_map(move |l| {
            let (lo, hi) = window_bounds(l, w.len(), window);
            (lo..=hi).filter(move |&k| k != l).map(move |k| (w[l], w[k]))
        })
    })
}

/// Closed-form count of [`context_pairs`].
pub fn context_pair_count(corpus: &WalkCorpus, window: usize) -> usize {
    corpus
        .walks()
        .map(|w| (0..w.len()).map(|l| contexts_at(l, w.len(), window)).sum::<usize>())
        .sum()
}

/// How often each node occurs as a context, summed over all centers.
pub fn occurrence_frequencies(corpus: &WalkCorpus, window: usize) -> Vec<u64> {
    let mut counts = vec![0u64; corpus.node_count()];
    for w in corpus.walks() {
        for (k, &u) in w.iter().enumerate() {
            // a position is a context of exactly as many centers as it has contexts
            counts[u as usize] += contexts_at(k, w.len(), window) as u64;
        }
    }
    counts
}
