//! Quotient multigraphs of partitions and their biconnected components.

use super::partition::SetPartition;
use crate::error::{Error, Result};

/// Multigraph on the blocks of a partition: edge `j` joins the blocks of
/// positions `j` and `j + 1 (mod k)`. Edge indices are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl QuotientGraph {
    pub fn from_edges(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::InvalidParameter(format!(
                "edge ({u}, {v}) leaves vertex range 0..{vertices}"
            )));
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn loops(&self) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, (u, v))| u == v)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }
}

pub fn quotient_graph(pi: &SetPartition) -> QuotientGraph {
    let k = pi.k();
    let edges = (0..k)
        .map(|j| (pi.block_of(j), pi.block_of((j + 1) % k)))
        .collect();
    QuotientGraph {
        vertices: pi.t(),
        edges,
    }
}

/// Edge sets of the biconnected components, and whether each is a simple
/// cycle (a two-edge bundle of parallel edges counts as a 2-cycle).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    /// Sorted edge indices of each biconnected component, ordered by their
    /// smallest edge index.
    pub components: Vec<Vec<usize>>,
    pub is_cactus: bool,
}

impl CycleDecomposition {
    /// The simple cycles, available only when the graph is a cactus.
    pub fn cycles(&self) -> Option<&[Vec<usize>]> {
        self.is_cactus.then_some(self.components.as_slice())
    }

    pub fn cycle_lengths(&self) -> Option<Vec<usize>> {
        self.cycles().map(|c| c.iter().map(Vec::len).collect())
    }
}

struct Tarjan<'a> {
    adj: Vec<Vec<(usize, usize)>>,
    edges: &'a [(usize, usize)],
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    components: Vec<Vec<usize>>,
}

const UNSEEN: usize = usize::MAX;

impl Tarjan<'_> {
    fn visit(&mut self, u: usize, parent_edge: usize) {
        self.disc[u] = self.time;
        self.low[u] = self.time;
        self.time += 1;
        for idx in 0..self.adj[u].len() {
            let (w, e) = self.adj[u][idx];
            if e == parent_edge {
                continue;
            }
            if self.disc[w] == UNSEEN {
                self.stack.push(e);
                self.visit(w, e);
                self.low[u] = self.low[u].min(self.low[w]);
                if self.low[w] >= self.disc[u] {
                    let mut comp = Vec::new();
                    while let Some(top) = self.stack.pop() {
                        comp.push(top);
                        if top == e {
                            break;
                        }
                    }
                    self.components.push(comp);
                }
            } else if self.disc[w] < self.disc[u] {
                // back edge (parallel edges to the parent land here too)
                self.stack.push(e);
                self.low[u] = self.low[u].min(self.disc[w]);
            }
        }
    }

    fn is_simple_cycle(&self, comp: &[usize]) -> bool {
        if comp.len() < 2 {
            return false;
        }
        let mut verts: Vec<usize> = comp
            .iter()
            .flat_map(|&e| [self.edges[e].0, self.edges[e].1])
            .collect();
        verts.sort_unstable();
        verts.dedup();
        verts.len() == comp.len()
    }
}

/// Biconnected components of a loop-free multigraph; the graph is a cactus
/// iff every component is a simple cycle.
pub fn cycle_decomposition(g: &QuotientGraph) -> Result<CycleDecomposition> {
    if let Some(&j) = g.loops().first() {
        return Err(Error::HasLoop(j));
    }
    let n = g.vertices;
    let mut adj = vec![Vec::new(); n];
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut tj = Tarjan {
        adj,
        edges: &g.edges,
        disc: vec![UNSEEN; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        components: Vec::new(),
    };
    for v in 0..n {
        if tj.disc[v] == UNSEEN {
            tj.visit(v, UNSEEN);
        }
    }
    let mut components = std::mem::take(&mut tj.components);
    for c in components.iter_mut() {
        c.sort_unstable();
    }
    components.sort();
    let is_cactus = components.iter().all(|c| tj.is_simple_cycle(c));
    Ok(CycleDecomposition {
        components,
        is_cactus,
    })
}
