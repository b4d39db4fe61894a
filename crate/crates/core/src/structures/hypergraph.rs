use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// An r-uniform hypergraph with possibly repeated edges.
///
/// Each edge is stored as a strictly increasing list of `r` vertex indices.
/// Edge positions are stable: constructors fix a deterministic order and
/// weights, edge-type labels and Levi right-vertices all refer to positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    r: usize,
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(r: usize, n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("uniformity must be at least 1".into()));
        }
        let mut sorted = Vec::with_capacity(edges.len());
        for (pos, mut edge) in edges.into_iter().enumerate() {
            if edge.len() != r {
                return Err(Error::EdgeArity {
                    edge: pos,
                    expected: r,
                    found: edge.len(),
                });
            }
            edge.sort_unstable();
            if let Some(&v) = edge.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { edge: pos, vertex: v, n });
            }
            if let Some(w) = edge.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::RepeatedVertex { edge: pos, vertex: w[0] });
            }
            sorted.push(edge);
        }
        Ok(Hypergraph { r, n, edges: sorted })
    }

    pub fn empty(r: usize, n: usize) -> Self {
        assert!(r >= 1);
        Hypergraph { r, n, edges: Vec::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, pos: usize) -> Result<&[usize]> {
        self.edges.get(pos).map(Vec::as_slice).ok_or(Error::InvalidEdge(pos))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for edge in &self.edges {
            for &v in edge {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Edge positions incident to each vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (pos, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                inc[v].push(pos);
            }
        }
        inc
    }

    /// Multiplicity of each distinct edge set.
    pub fn edge_multiset(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut counts = BTreeMap::new();
        for edge in &self.edges {
            *counts.entry(edge.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn has_repeated_edges(&self) -> bool {
        let mut seen = HashSet::new();
        !self.edges.iter().all(|e| seen.insert(e))
    }

    /// Applies `perm` (old index -> new index) to every vertex.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidParameter("relabeling has the wrong length".into()));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("relabeling is not a permutation".into()));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| perm[v]).collect())
            .collect();
        Hypergraph::new(self.r, self.n, edges)
    }

    /// Vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Hypergraph) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::UniformityMismatch {
                left: self.r,
                right: other.r,
            });
        }
        let mut edges = self.edges.clone();
        edges.extend(
            other
                .edges
                .iter()
                .map(|e| e.iter().map(|&v| v + self.n).collect::<Vec<_>>()),
        );
        Hypergraph::new(self.r, self.n + other.n, edges)
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest member. Isolated vertices form singleton components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for edge in &self.edges {
            for w in edge.windows(2) {
                let a = find(&mut parent, w[0]);
                let b = find(&mut parent, w[1]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n {
            let root = find(&mut parent, v);
            groups.entry(root).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Any two distinct edges (positions) share at most one vertex.
    pub fn is_linear(&self) -> bool {
        let mut covered: HashSet<(usize, usize)> = HashSet::new();
        for edge in &self.edges {
            for (i, &a) in edge.iter().enumerate() {
                for &b in &edge[i + 1..] {
                    if !covered.insert((a, b)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Three edges pairwise meeting in exactly one vertex, with empty
    /// common intersection.
    pub fn contains_triangle(&self) -> bool {
        let inc = self.incidence();
        let m = self.edges.len();
        let meet = |a: usize, b: usize| intersection_size(&self.edges[a], &self.edges[b]);
        for a in 0..m {
            // Only edges touching `a` can take part together with it.
            let mut touching: Vec<usize> = self.edges[a]
                .iter()
                .flat_map(|&v| inc[v].iter().copied())
                .filter(|&b| b > a)
                .collect();
            touching.sort_unstable();
            touching.dedup();
            touching.retain(|&b| meet(a, b) == 1);
            for (i, &b) in touching.iter().enumerate() {
                for &c in &touching[i + 1..] {
                    if meet(b, c) == 1 && triple_intersection_empty(&self.edges[a], &self.edges[b], &self.edges[c]) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// The sub-hypergraph spanned by `vertices` (sorted, deduplicated) and
    /// the given edge positions; vertices are renumbered by rank.
    pub fn restrict(&self, vertices: &[usize], edge_positions: &[usize]) -> Result<(Hypergraph, Vec<usize>)> {
        let mut rank = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            rank[v] = i;
        }
        let mut edges = Vec::with_capacity(edge_positions.len());
        for &pos in edge_positions {
            let edge = self.edge(pos)?;
            let mapped: Vec<usize> = edge.iter().map(|&v| rank[v]).collect();
            if mapped.contains(&usize::MAX) {
                return Err(Error::InvalidParameter(format!(
                    "edge {pos} leaves the chosen vertex set"
                )));
            }
            edges.push(mapped);
        }
        Ok((Hypergraph::new(self.r, vertices.len(), edges)?, vertices.to_vec()))
    }
}

pub(crate) fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn triple_intersection_empty(a: &[usize], b: &[usize], c: &[usize]) -> bool {
    !a.iter().any(|v| b.binary_search(v).is_ok() && c.binary_search(v).is_ok())
}

/// Orientation of a box-product edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeType {
    #[serde(rename = "h")]
    Horizontal,
    #[serde(rename = "v")]
    Vertical,
}

/// A hypergraph with one exact rational weight per edge position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedHypergraph {
    base: Hypergraph,
    weights: Vec<Rational>,
    edge_types: Option<Vec<EdgeType>>,
}

impl WeightedHypergraph {
    pub fn new(base: Hypergraph, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != base.n_edges() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} edges",
                weights.len(),
                base.n_edges()
            )));
        }
        Ok(WeightedHypergraph {
            base,
            weights,
            edge_types: None,
        })
    }

    pub fn uniform(base: Hypergraph, weight: Rational) -> Self {
        let weights = vec![weight; base.n_edges()];
        WeightedHypergraph {
            base,
            weights,
            edge_types: None,
        }
    }

    pub fn with_edge_types(mut self, edge_types: Vec<EdgeType>) -> Result<Self> {
        if edge_types.len() != self.base.n_edges() {
            return Err(Error::InvalidParameter("edge type labels do not match edge count".into()));
        }
        self.edge_types = Some(edge_types);
        Ok(self)
    }

    pub fn base(&self) -> &Hypergraph {
        &self.base
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn edge_types(&self) -> Option<&[EdgeType]> {
        self.edge_types.as_deref()
    }

    /// Total weight per distinct edge set; parallel copies add.
    pub fn weight_by_set(&self) -> BTreeMap<Vec<usize>, Rational> {
        let mut acc: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (edge, w) in self.base.edges().iter().zip(&self.weights) {
            *acc.entry(edge.clone()).or_default() += w;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(r: usize, n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(r, n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            Hypergraph::new(3, 3, vec![vec![0, 1]]),
            Err(Error::EdgeArity { edge: 0, .. })
        ));
        assert!(matches!(
            Hypergraph::new(2, 3, vec![vec![0, 3]]),
            Err(Error::VertexOutOfRange { vertex: 3, .. })
        ));
        assert!(matches!(
            Hypergraph::new(2, 3, vec![vec![1, 2], vec![1, 1]]),
            Err(Error::RepeatedVertex { edge: 1, vertex: 1 })
        ));
    }

    #[test]
    fn edges_are_sorted_but_positions_kept() {
        let h = hg(3, 5, &[&[4, 2, 0], &[1, 0, 3]]);
        assert_eq!(h.edges(), &[vec![0, 2, 4], vec![0, 1, 3]]);
    }

    #[test]
    fn triangle_detection() {
        assert!(hg(3, 6, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 0]]).contains_triangle());
        // Three edges through one vertex: pairwise size 1 but common vertex.
        assert!(!hg(3, 7, &[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6]]).contains_triangle());
    }

    #[test]
    fn linearity() {
        assert!(!hg(3, 4, &[&[0, 1, 2], &[0, 1, 3]]).is_linear());
        assert!(!hg(2, 2, &[&[0, 1], &[0, 1]]).is_linear());
        assert!(hg(3, 5, &[&[0, 1, 2], &[2, 3, 4]]).is_linear());
    }

    #[test]
    fn components_and_union() {
        let a = hg(2, 3, &[&[0, 1]]);
        let u = a.disjoint_union(&a).unwrap();
        assert_eq!(u.components(), vec![vec![0, 1], vec![2], vec![3, 4], vec![5]]);
        assert!(!u.is_connected());
    }

    #[test]
    fn weights_of_parallel_copies_add() {
        let h = hg(2, 2, &[&[0, 1], &[1, 0]]);
        let w = WeightedHypergraph::new(h, vec![crate::rational::int(2), crate::rational::int(-5)]).unwrap();
        assert_eq!(w.weight_by_set()[&vec![0, 1]], crate::rational::int(-3));
    }
}
