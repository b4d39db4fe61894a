use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::structures::Hypergraph;

/// A bipartite graph with explicit sides. Left vertex `i` and right vertex
/// `j` are distinct objects even when `i == j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (pos, &(l, r)) in edges.iter().enumerate() {
            if l >= n_left {
                return Err(Error::VertexOutOfRange {
                    edge: pos,
                    vertex: l,
                    n: n_left,
                });
            }
            if r >= n_right {
                return Err(Error::VertexOutOfRange {
                    edge: pos,
                    vertex: r,
                    n: n_right,
                });
            }
            if !seen.insert((l, r)) {
                return Err(Error::InvalidParameter(format!("duplicate pair ({l}, {r})")));
            }
        }
        Ok(BipartiteGraph {
            n_left,
            n_right,
            edges,
        })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn n_vertices(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Swaps the roles of the two sides.
    pub fn swap_sides(&self) -> BipartiteGraph {
        BipartiteGraph {
            n_left: self.n_right,
            n_right: self.n_left,
            edges: self.edges.iter().map(|&(l, r)| (r, l)).collect(),
        }
    }

    /// The underlying 2-graph: left vertices keep their indices, right
    /// vertex `j` becomes `n_left + j`.
    pub fn to_graph(&self) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .map(|&(l, r)| vec![l, self.n_left + r])
            .collect();
        Hypergraph::new(2, self.n_vertices(), edges).expect("bipartite edges are valid 2-edges")
    }

    /// Recovers a bipartition of a 2-graph. Vertices `0..left_size` go left
    /// when `left_size` is given (checked); otherwise each component is
    /// 2-colored with its smallest vertex on the left. The returned vector
    /// maps each original vertex to `(is_left, index within its side)`.
    pub fn from_graph(
        graph: &Hypergraph,
        left_size: Option<usize>,
    ) -> Result<(BipartiteGraph, Vec<(bool, usize)>)> {
        if graph.r() != 2 {
            return Err(Error::UniformityMismatch {
                left: graph.r(),
                right: 2,
            });
        }
        let n = graph.n_vertices();
        let side: Vec<bool> = match left_size {
            Some(k) => (0..n).map(|v| v < k).collect(),
            None => {
                let inc = graph.incidence();
                let mut color: Vec<Option<bool>> = vec![None; n];
                for start in 0..n {
                    if color[start].is_some() {
                        continue;
                    }
                    color[start] = Some(true);
                    let mut queue = VecDeque::from([start]);
                    while let Some(v) = queue.pop_front() {
                        let cv = color[v].unwrap();
                        for &pos in &inc[v] {
                            let e = &graph.edges()[pos];
                            let u = if e[0] == v { e[1] } else { e[0] };
                            match color[u] {
                                None => {
                                    color[u] = Some(!cv);
                                    queue.push_back(u);
                                }
                                Some(cu) if cu == cv => {
                                    return Err(Error::Precondition("graph is not bipartite".into()))
                                }
                                _ => {}
                            }
                        }
                    }
                }
                color.into_iter().map(Option::unwrap).collect()
            }
        };
        let mut index = Vec::with_capacity(n);
        let (mut nl, mut nr) = (0, 0);
        for &is_left in &side {
            if is_left {
                index.push((true, nl));
                nl += 1;
            } else {
                index.push((false, nr));
                nr += 1;
            }
        }
        let mut edges = Vec::with_capacity(graph.n_edges());
        for e in graph.edges() {
            let (a, b) = (index[e[0]], index[e[1]]);
            match (a.0, b.0) {
                (true, false) => edges.push((a.1, b.1)),
                (false, true) => edges.push((b.1, a.1)),
                _ => {
                    return Err(Error::Precondition(
                        "an edge lies inside one side of the bipartition".into(),
                    ))
                }
            }
        }
        Ok((BipartiteGraph::new(nl, nr, edges)?, index))
    }
}
