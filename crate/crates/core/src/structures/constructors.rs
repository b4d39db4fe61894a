//! Named hypergraphs and graph operations.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::structures::{BipartiteGraph, EdgeType, Hypergraph};

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let mut i = k;
        while i > 0 && current[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        i -= 1;
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

pub fn single_edge(r: usize) -> Hypergraph {
    Hypergraph::new(r, r, vec![(0..r).collect()]).expect("valid single edge")
}

/// The `r x r` grid hypergraph: vertex `(i, j)` is `i*r + j`; edges are the
/// rows `R_0..R_{r-1}` followed by the columns `C_0..C_{r-1}`.
pub fn grid(r: usize) -> Result<Hypergraph> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("grid needs r >= 2, got {r}")));
    }
    let rows = (0..r).map(|i| (0..r).map(|j| i * r + j).collect());
    let cols = (0..r).map(|j| (0..r).map(|i| i * r + j).collect());
    Hypergraph::new(r, r * r, rows.chain(cols).collect())
}

/// Incidence graph: left side `V(H)`, right side the edge positions.
pub fn levi(h: &Hypergraph) -> BipartiteGraph {
    let edges = h
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(pos, e)| e.iter().map(move |&v| (v, pos)))
        .collect();
    BipartiteGraph::new(h.n_vertices(), h.n_edges(), edges).expect("incidences are distinct")
}

/// The 1-subdivision of `K_{r,r}`, built as the Levi graph of `grid(r)`.
pub fn subdivision_krr(r: usize) -> Result<BipartiteGraph> {
    Ok(levi(&grid(r)?))
}

/// A box product together with the orientation of every edge position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxProduct {
    pub graph: Hypergraph,
    pub edge_types: Vec<EdgeType>,
    /// Number of vertices of the second factor; `(x, y)` is `x * n2 + y`.
    pub n2: usize,
}

/// Horizontal edges `{(x_1,y),...,(x_r,y)}` for every edge of `g1` and vertex
/// `y` of `g2` come first, then vertical edges for every vertex `x` of `g1`
/// and edge of `g2`.
pub fn box_product(g1: &Hypergraph, g2: &Hypergraph) -> Result<BoxProduct> {
    if g1.r() != g2.r() {
        return Err(Error::UniformityMismatch {
            left: g1.r(),
            right: g2.r(),
        });
    }
    let n2 = g2.n_vertices();
    let mut edges = Vec::with_capacity(g1.n_edges() * n2 + g1.n_vertices() * g2.n_edges());
    let mut types = Vec::with_capacity(edges.capacity());
    for e in g1.edges() {
        for y in 0..n2 {
            edges.push(e.iter().map(|&x| x * n2 + y).collect());
            types.push(EdgeType::Horizontal);
        }
    }
    for x in 0..g1.n_vertices() {
        for e in g2.edges() {
            edges.push(e.iter().map(|&y| x * n2 + y).collect());
            types.push(EdgeType::Vertical);
        }
    }
    Ok(BoxProduct {
        graph: Hypergraph::new(g1.r(), g1.n_vertices() * n2, edges)?,
        edge_types: types,
        n2,
    })
}

fn check_set_inclusion_params(n: usize, m: usize, k: usize) -> Result<()> {
    if k < 1 || m < 2 * k || n < m {
        return Err(Error::InvalidParameter(format!(
            "set inclusion needs n >= m >= 2k and k >= 1, got n={n}, m={m}, k={k}"
        )));
    }
    Ok(())
}

/// The `binom(m,k)`-graph on the `k`-subsets of `[n]` with one edge per
/// `m`-subset `X`, consisting of all `k`-subsets of `X`. Vertices are the
/// `k`-subsets in lexicographic rank order.
pub fn set_inclusion_rgraph(n: usize, m: usize, k: usize) -> Result<Hypergraph> {
    check_set_inclusion_params(n, m, k)?;
    let vertices = combinations(n, k);
    let rank: HashMap<&[usize], usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let inner = combinations(m, k);
    let edges = combinations(n, m)
        .into_iter()
        .map(|x| {
            inner
                .iter()
                .map(|sub| {
                    let subset: Vec<usize> = sub.iter().map(|&i| x[i]).collect();
                    rank[subset.as_slice()]
                })
                .collect()
        })
        .collect();
    Hypergraph::new(inner.len(), vertices.len(), edges)
}

/// The set-inclusion bipartite graph `I(n,m,k)`: left side the `k`-subsets,
/// right side the `m`-subsets, adjacent when contained.
pub fn set_inclusion_graph(n: usize, m: usize, k: usize) -> Result<BipartiteGraph> {
    if k < 1 || m <= k || n < m {
        return Err(Error::InvalidParameter(format!(
            "I(n,m,k) needs n >= m > k >= 1, got n={n}, m={m}, k={k}"
        )));
    }
    let small = combinations(n, k);
    let large = combinations(n, m);
    let mut edges = Vec::new();
    for (j, x) in large.iter().enumerate() {
        for (i, y) in small.iter().enumerate() {
            if y.iter().all(|v| x.binary_search(v).is_ok()) {
                edges.push((i, j));
            }
        }
    }
    BipartiteGraph::new(small.len(), large.len(), edges)
}

/// The Fano plane.
pub fn fano() -> Hypergraph {
    let lines = [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    Hypergraph::new(3, 7, lines.iter().map(|l| l.to_vec()).collect()).expect("valid Fano plane")
}

/// The cycle graph `C_n` with edges `{i, i+1 mod n}`.
pub fn cycle(n: usize) -> Result<Hypergraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
    }
    Hypergraph::new(2, n, (0..n).map(|i| vec![i, (i + 1) % n]).collect())
}

/// The star `K_{1,k}` with center 0.
pub fn star(k: usize) -> Hypergraph {
    Hypergraph::new(2, k + 1, (1..=k).map(|i| vec![0, i]).collect()).expect("valid star")
}

pub fn complete_bipartite(a: usize, b: usize) -> BipartiteGraph {
    let edges = (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect();
    BipartiteGraph::new(a, b, edges).expect("valid complete bipartite graph")
}

/// Two disjoint copies.
pub fn double(h: &Hypergraph) -> Hypergraph {
    h.disjoint_union(h).expect("same uniformity")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_order() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(7, 3).len(), 35);
    }

    #[test]
    fn grid_shapes() {
        let g3 = grid(3).unwrap();
        assert_eq!((g3.n_vertices(), g3.n_edges()), (9, 6));
        let g2 = grid(2).unwrap();
        assert_eq!(g2.edges(), &[vec![0, 1], vec![2, 3], vec![0, 2], vec![1, 3]]);
        assert!(grid(1).is_err());
    }

    #[test]
    fn grid_rows_and_columns_meet_once() {
        use crate::structures::hypergraph::intersection_size;
        let r = 4;
        let g = grid(r).unwrap();
        let e = g.edges();
        for a in 0..2 * r {
            for b in a + 1..2 * r {
                let same_kind = (a < r) == (b < r);
                assert_eq!(intersection_size(&e[a], &e[b]), if same_kind { 0 } else { 1 });
            }
        }
    }

    #[test]
    fn grid_is_linear_and_triangle_free() {
        for r in 2..=6 {
            assert!(grid(r).unwrap().is_linear());
        }
        assert!(!grid(3).unwrap().contains_triangle());
    }

    #[test]
    fn levi_shapes() {
        let l = levi(&single_edge(3));
        assert_eq!((l.n_left(), l.n_right(), l.edges().len()), (3, 1, 3));
        let s = subdivision_krr(3).unwrap();
        assert_eq!((s.n_vertices(), s.edges().len()), (15, 18));
        let empty = levi(&Hypergraph::empty(3, 5));
        assert_eq!((empty.n_left(), empty.n_right(), empty.edges().len()), (5, 0, 0));
    }

    #[test]
    fn levi_splits_repeated_edges() {
        let h = Hypergraph::new(2, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let l = levi(&h);
        assert_eq!(l.n_right(), 2);
        assert_eq!(l.edges().len(), 4);
    }

    #[test]
    fn box_product_counts() {
        let e = single_edge(3);
        let b = box_product(&e, &e).unwrap();
        assert_eq!((b.graph.n_vertices(), b.graph.n_edges()), (9, 6));
        assert_eq!(b.edge_types.iter().filter(|t| **t == EdgeType::Horizontal).count(), 3);
        let empty = Hypergraph::empty(3, 4);
        let f = fano();
        let b = box_product(&f, &empty).unwrap();
        assert_eq!(b.graph.n_edges(), 4 * 7);
        assert!(box_product(&f, &single_edge(2)).is_err());
    }

    #[test]
    fn set_inclusion_counts() {
        let k4 = set_inclusion_rgraph(4, 3, 1).unwrap();
        assert_eq!((k4.r(), k4.n_vertices(), k4.n_edges()), (3, 4, 4));
        let h = set_inclusion_rgraph(5, 4, 2).unwrap();
        assert_eq!((h.r(), h.n_vertices(), h.n_edges()), (6, 10, 5));
        assert!(set_inclusion_rgraph(5, 3, 2).is_err());
        assert!(set_inclusion_rgraph(3, 4, 1).is_err());
    }

    #[test]
    fn set_inclusion_pairs_covered() {
        for (n, m, k) in [(4, 3, 1), (5, 4, 2), (6, 4, 2), (5, 2, 1)] {
            let h = set_inclusion_rgraph(n, m, k).unwrap();
            let nv = h.n_vertices();
            for a in 0..nv {
                for b in a + 1..nv {
                    assert!(
                        h.edges().iter().any(|e| e.contains(&a) && e.contains(&b)),
                        "pair {a},{b} uncovered in I({n},{m},{k})"
                    );
                }
            }
        }
    }

    #[test]
    fn fano_is_a_projective_plane() {
        let f = fano();
        assert!(f.is_linear());
        assert_eq!(f.degrees(), vec![3; 7]);
    }
}
