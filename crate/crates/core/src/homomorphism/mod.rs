//! Exact homomorphism enumeration and counting between uniform hypergraphs.
//!
//! A homomorphism `H -> G` maps every edge of `H` onto `r` distinct vertices
//! forming an edge of `G`. Repeated edges are handled by position:
//!
//! * in the **pattern**, every edge position contributes its own factor, so
//!   a doubled pattern edge squares the weight of its image;
//! * in the **target**, parallel copies of an edge set are one image whose
//!   weight is the sum of the copies' weights.

mod iso;
pub(crate) mod search;

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{Rational, Weight};
use crate::structures::{Hypergraph, WeightedHypergraph};
use search::{HomSearch, TargetIndex};

pub use iso::{find_isomorphism, isomorphic};
pub(crate) use iso::refine_colors;

/// A total map between vertex sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexMap {
    target_size: usize,
    image: Vec<usize>,
}

impl VertexMap {
    pub fn new(target_size: usize, image: Vec<usize>) -> Result<Self> {
        if let Some(&x) = image.iter().find(|&&x| x >= target_size) {
            return Err(Error::InvalidParameter(format!(
                "image {x} outside target of size {target_size}"
            )));
        }
        Ok(VertexMap { target_size, image })
    }

    pub fn identity(n: usize) -> Self {
        VertexMap {
            target_size: n,
            image: (0..n).collect(),
        }
    }

    pub fn source_size(&self) -> usize {
        self.image.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, v: usize) -> usize {
        self.image[v]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &VertexMap) -> Result<VertexMap> {
        if then.source_size() != self.target_size {
            return Err(Error::InvalidParameter("maps do not compose".into()));
        }
        Ok(VertexMap {
            target_size: then.target_size,
            image: self.image.iter().map(|&x| then.image[x]).collect(),
        })
    }

    pub fn is_bijective(&self) -> bool {
        if self.image.len() != self.target_size {
            return false;
        }
        let mut seen = vec![false; self.target_size];
        self.image.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    }

    pub fn inverse(&self) -> Option<VertexMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.target_size];
        for (v, &x) in self.image.iter().enumerate() {
            inv[x] = v;
        }
        Some(VertexMap {
            target_size: self.image.len(),
            image: inv,
        })
    }
}

/// Sum of homomorphism weights together with the number of homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSum {
    pub value: Rational,
    pub hom_count: u128,
}

fn check_uniformity(h: &Hypergraph, g: &Hypergraph) -> Result<()> {
    if h.r() != g.r() {
        return Err(Error::UniformityMismatch {
            left: h.r(),
            right: g.r(),
        });
    }
    Ok(())
}

/// Whether `image` maps every edge of `h` onto an edge of `g`.
pub fn is_homomorphism(h: &Hypergraph, g: &Hypergraph, image: &[usize]) -> bool {
    if h.r() != g.r() || image.len() != h.n_vertices() {
        return false;
    }
    if image.iter().any(|&x| x >= g.n_vertices()) {
        return false;
    }
    let edges: std::collections::HashSet<&[usize]> = g.edges().iter().map(Vec::as_slice).collect();
    h.edges().iter().all(|e| {
        let mut img: Vec<usize> = e.iter().map(|&v| image[v]).collect();
        img.sort_unstable();
        edges.contains(img.as_slice())
    })
}

/// Calls `visit` on every homomorphism `h -> g` in search order (not sorted).
/// Returning `Break` stops the search.
pub fn for_each_hom<F>(h: &Hypergraph, g: &Hypergraph, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    check_uniformity(h, g)?;
    let index = TargetIndex::new(g);
    let _ = HomSearch::new(h, &index).run(|image, _| visit(image));
    Ok(())
}

/// All homomorphisms `h -> g`, sorted lexicographically by image array.
pub fn enumerate_homs(h: &Hypergraph, g: &Hypergraph) -> Result<Vec<VertexMap>> {
    let mut out = Vec::new();
    for_each_hom(h, g, |image| {
        out.push(VertexMap {
            target_size: g.n_vertices(),
            image: image.to_vec(),
        });
        ControlFlow::Continue(())
    })?;
    out.sort_unstable();
    Ok(out)
}

pub fn count_homs(h: &Hypergraph, g: &Hypergraph) -> Result<u128> {
    check_uniformity(h, g)?;
    let index = TargetIndex::new(g);
    Ok(HomSearch::new(h, &index).par_sum(|_, _| 1u128))
}

/// Injective homomorphisms, i.e. copies of `h` in `g` (labelled).
pub fn count_injective_homs(h: &Hypergraph, g: &Hypergraph) -> Result<u128> {
    check_uniformity(h, g)?;
    let index = TargetIndex::new(g);
    Ok(HomSearch::new(h, &index).injective(true).par_sum(|_, _| 1u128))
}

/// First injective homomorphism `h -> g` in search order, with pattern
/// vertex `v` optionally restricted to `domains[v]`.
pub fn find_injective_hom(
    h: &Hypergraph,
    g: &Hypergraph,
    domains: Option<Vec<Option<Vec<usize>>>>,
) -> Result<Option<VertexMap>> {
    check_uniformity(h, g)?;
    let index = TargetIndex::new(g);
    let mut search = HomSearch::new(h, &index).injective(true);
    if let Some(d) = domains {
        if d.len() != h.n_vertices() {
            return Err(Error::InvalidParameter("one domain per pattern vertex expected".into()));
        }
        search = search.with_domains(d);
    }
    let mut found = None;
    let _ = search.run(|image, _| {
        found = Some(VertexMap {
            target_size: g.n_vertices(),
            image: image.to_vec(),
        });
        ControlFlow::Break(())
    });
    Ok(found)
}

impl<A: Weight, B: Weight> Weight for (A, B) {
    fn empty_sum() -> Self {
        (A::empty_sum(), B::empty_sum())
    }
    fn empty_product() -> Self {
        (A::empty_product(), B::empty_product())
    }
    fn vanishes(&self) -> bool {
        self.0.vanishes() && self.1.vanishes()
    }
    fn from_count(count: u64) -> Self {
        (A::from_count(count), B::from_count(count))
    }
    fn mul_ref(&self, other: &Self) -> Self {
        (self.0.mul_ref(&other.0), self.1.mul_ref(&other.1))
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.0.add_assign_ref(&other.0);
        self.1.add_assign_ref(&other.1);
    }
}

/// `Σ_π ∏_{e ∈ E(H)} w(π(e))` over all homomorphisms `π: H -> T`.
///
/// Pattern edge positions each contribute a factor; an image edge set with
/// several parallel copies in `T` contributes the sum of their weights.
pub fn weighted_hom_sum(h: &Hypergraph, t: &WeightedHypergraph) -> Result<HomSum> {
    check_uniformity(h, t.base())?;
    let index = TargetIndex::new(t.base());
    let set_weights: Vec<Rational> = (0..index.sets().len())
        .map(|s| {
            index
                .positions(s)
                .iter()
                .map(|&p| &t.weights()[p])
                .sum::<Rational>()
        })
        .collect();
    let search = HomSearch::new(h, &index);
    if set_weights.iter().all(|w| w.is_integer()) {
        let small: Option<Vec<i64>> = set_weights.iter().map(|w| w.numer().to_i64()).collect();
        let big: Vec<BigInt> = set_weights.iter().map(|w| w.numer().clone()).collect();
        let (value, hom_count) = search.par_sum(|_, sets| {
            let product = small.as_ref().and_then(|small| {
                sets.iter().try_fold(1i128, |acc, &s| acc.checked_mul(small[s] as i128))
            });
            let value = match product {
                Some(p) => BigInt::from(p),
                None => sets.iter().fold(BigInt::one(), |acc, &s| acc * &big[s]),
            };
            (value, 1u128)
        });
        return Ok(HomSum {
            value: Rational::from_integer(value),
            hom_count,
        });
    }
    let (value, hom_count) = search.par_sum(|_, sets| {
        let value = sets
            .iter()
            .fold(Rational::one(), |acc, &s| acc * &set_weights[s]);
        (value, 1u128)
    });
    Ok(HomSum { value, hom_count })
}

pub fn endomorphisms(h: &Hypergraph) -> Vec<VertexMap> {
    enumerate_homs(h, h).expect("same uniformity")
}

pub fn count_endomorphisms(h: &Hypergraph) -> u128 {
    count_homs(h, h).expect("same uniformity")
}

pub fn automorphisms(h: &Hypergraph) -> Vec<VertexMap> {
    endomorphisms(h)
        .into_iter()
        .filter(VertexMap::is_bijective)
        .filter(|m| {
            // Bijective endomorphisms of multigraphs must also respect
            // multiplicities to be automorphisms.
            let multiset = h.edge_multiset();
            let mut image = std::collections::BTreeMap::new();
            for e in h.edges() {
                let mut img: Vec<usize> = e.iter().map(|&v| m.image[v]).collect();
                img.sort_unstable();
                *image.entry(img).or_insert(0usize) += 1;
            }
            image == multiset
        })
        .collect()
}

/// For every edge position: whether it is the image of exactly one edge
/// position under every endomorphism.
pub fn odd_edges(h: &Hypergraph) -> Vec<bool> {
    let index = TargetIndex::new(h);
    let n_sets = index.sets().len();
    let mut bad = vec![false; n_sets];
    let mut remaining = n_sets;
    let mut hits = vec![0usize; n_sets];
    let _ = HomSearch::new(h, &index).run(|_, sets| {
        hits.iter_mut().for_each(|c| *c = 0);
        for &s in sets {
            hits[s] += 1;
        }
        for s in 0..n_sets {
            if hits[s] != 1 && !bad[s] {
                bad[s] = true;
                remaining -= 1;
            }
        }
        if remaining == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    h.edges()
        .iter()
        .map(|e| !bad[index.lookup(e).expect("own edge indexed")])
        .collect()
}

pub fn is_odd_edge(h: &Hypergraph, edge: usize) -> Result<bool> {
    h.edge(edge)?;
    Ok(odd_edges(h)[edge])
}

/// The homomorphic image of `h` in `g` as a hypergraph of its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageSubgraph {
    pub graph: Hypergraph,
    /// Image vertex `i` is vertex `vertex_map[i]` of `g`.
    pub vertex_map: Vec<usize>,
    /// Image edge `j` is edge position `edge_positions[j]` of `g` (the first
    /// position carrying that vertex set).
    pub edge_positions: Vec<usize>,
}

pub fn image_subgraph(h: &Hypergraph, g: &Hypergraph, map: &VertexMap) -> Result<ImageSubgraph> {
    check_uniformity(h, g)?;
    if !is_homomorphism(h, g, map.image()) {
        return Err(Error::NotAHomomorphism(format!("{:?}", map.image())));
    }
    let mut vertices: Vec<usize> = map.image().to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    let first_position: std::collections::HashMap<&[usize], usize> = g
        .edges()
        .iter()
        .enumerate()
        .rev()
        .map(|(p, e)| (e.as_slice(), p))
        .collect();
    let mut positions: Vec<usize> = h
        .edges()
        .iter()
        .map(|e| {
            let mut img: Vec<usize> = e.iter().map(|&v| map.apply(v)).collect();
            img.sort_unstable();
            first_position[img.as_slice()]
        })
        .collect();
    positions.sort_unstable();
    positions.dedup();
    let (graph, vertex_map) = g.restrict(&vertices, &positions)?;
    Ok(ImageSubgraph {
        graph,
        vertex_map,
        edge_positions: positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::structures::{cycle, fano, grid, set_inclusion_rgraph, single_edge};

    fn triangle() -> Hypergraph {
        cycle(3).unwrap()
    }

    #[test]
    fn edge_into_triangle() {
        assert_eq!(count_homs(&single_edge(2), &triangle()).unwrap(), 6);
        let all = enumerate_homs(&single_edge(2), &triangle()).unwrap();
        let images: Vec<&[usize]> = all.iter().map(|m| m.image()).collect();
        assert_eq!(images, vec![&[0, 1], &[0, 2], &[1, 0], &[1, 2], &[2, 0], &[2, 1]]);
    }

    #[test]
    fn grid_into_single_edge() {
        assert_eq!(count_homs(&grid(3).unwrap(), &single_edge(3)).unwrap(), 12);
    }

    #[test]
    fn edgeless_target() {
        assert_eq!(count_homs(&single_edge(3), &Hypergraph::empty(3, 5)).unwrap(), 0);
        assert!(count_homs(&single_edge(3), &single_edge(2)).is_err());
    }

    #[test]
    fn endomorphism_counts() {
        assert_eq!(count_endomorphisms(&single_edge(4)), 24);
        assert_eq!(count_endomorphisms(&Hypergraph::empty(2, 4)), 256);
        let f = fano();
        let endos = endomorphisms(&f);
        assert_eq!(endos.len(), 168);
        assert!(endos.iter().all(VertexMap::is_bijective));
        assert_eq!(automorphisms(&f).len(), 168);
    }

    #[test]
    fn weighted_sum_of_negated_edge() {
        let t = WeightedHypergraph::uniform(single_edge(3), int(-1));
        let s = weighted_hom_sum(&single_edge(3), &t).unwrap();
        assert_eq!(s.value, int(-6));
        assert_eq!(s.hom_count, 6);
    }

    #[test]
    fn parallel_target_copies_add() {
        let doubled = Hypergraph::new(2, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let t = WeightedHypergraph::new(doubled, vec![int(2), int(3)]).unwrap();
        let s = weighted_hom_sum(&single_edge(2), &t).unwrap();
        // Two orientations, each weighing 2 + 3.
        assert_eq!((s.value, s.hom_count), (int(10), 2));
        // A doubled pattern edge squares that weight.
        let pattern = Hypergraph::new(2, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(weighted_hom_sum(&pattern, &t).unwrap().value, int(50));
    }

    #[test]
    fn odd_edge_detection() {
        assert!(odd_edges(&set_inclusion_rgraph(4, 3, 1).unwrap()).iter().all(|&b| b));
        assert!(odd_edges(&grid(3).unwrap()).iter().all(|&b| !b));
        assert!(is_odd_edge(&single_edge(3), 0).unwrap());
        assert!(is_odd_edge(&single_edge(3), 1).is_err());
        let doubled = Hypergraph::new(2, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(!is_odd_edge(&doubled, 0).unwrap());
    }

    #[test]
    fn image_of_collapse_is_single_edge() {
        let g = grid(3).unwrap();
        // A Latin square: (i, j) -> (i + j) mod 3.
        let latin: Vec<usize> = (0..9).map(|v| (v / 3 + v % 3) % 3).collect();
        let map = VertexMap::new(9, latin.clone()).unwrap();
        // Every row and column lands on {0, 1, 2}, the first row of the grid.
        let img = image_subgraph(&g, &g, &map).unwrap();
        assert_eq!(img.graph, single_edge(3));
        let shifted: Vec<usize> = (0..9).map(|v| 3 + (v / 3 + v % 3) % 3).collect();
        assert!(image_subgraph(&g, &g, &VertexMap::new(9, shifted).unwrap()).is_ok());
        let broken: Vec<usize> = (0..9).map(|v| (v / 3 + v % 3) % 3 * 4 % 9).collect();
        assert!(image_subgraph(&g, &g, &VertexMap::new(9, broken).unwrap()).is_err());
        let edge_map = VertexMap::new(3, latin).unwrap();
        let img = image_subgraph(&g, &single_edge(3), &edge_map).unwrap();
        assert_eq!(img.graph, single_edge(3));
        let id = image_subgraph(&g, &g, &VertexMap::identity(9)).unwrap();
        assert_eq!(id.graph, g);
    }

    #[test]
    fn composition_and_inverse() {
        let a = VertexMap::new(3, vec![2, 0, 1]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.then(&inv).unwrap(), VertexMap::identity(3));
        assert!(VertexMap::new(2, vec![0, 2]).is_err());
    }
}
