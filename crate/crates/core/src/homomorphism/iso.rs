use std::ops::ControlFlow;

use crate::homomorphism::search::{HomSearch, TargetIndex};
use crate::structures::Hypergraph;

/// Color refinement on the incidence structure, run jointly over several
/// hypergraphs so that equal colors mean the same thing in each of them.
/// Colors are invariant under isomorphism.
pub(crate) fn refine_colors(graphs: &[&Hypergraph]) -> Vec<Vec<usize>> {
    let incs: Vec<Vec<Vec<usize>>> = graphs.iter().map(|g| g.incidence()).collect();
    let mut colors: Vec<Vec<usize>> = graphs.iter().map(|g| g.degrees()).collect();
    let mut distinct = count_distinct(&colors);
    let max_rounds = graphs.iter().map(|g| g.n_vertices()).max().unwrap_or(0) + 1;
    for _ in 0..max_rounds {
        let signatures: Vec<Vec<(usize, Vec<Vec<usize>>)>> = graphs
            .iter()
            .enumerate()
            .map(|(gi, g)| {
                (0..g.n_vertices())
                    .map(|v| {
                        let mut around: Vec<Vec<usize>> = incs[gi][v]
                            .iter()
                            .map(|&e| {
                                let mut cs: Vec<usize> = g.edges()[e]
                                    .iter()
                                    .filter(|&&u| u != v)
                                    .map(|&u| colors[gi][u])
                                    .collect();
                                cs.sort_unstable();
                                cs
                            })
                            .collect();
                        around.sort();
                        (colors[gi][v], around)
                    })
                    .collect()
            })
            .collect();
        let mut all: Vec<&(usize, Vec<Vec<usize>>)> = signatures.iter().flatten().collect();
        all.sort();
        all.dedup();
        colors = signatures
            .iter()
            .map(|sigs| {
                sigs.iter()
                    .map(|s| all.binary_search(&s).expect("signature present"))
                    .collect()
            })
            .collect();
        let now = count_distinct(&colors);
        if now == distinct {
            break;
        }
        distinct = now;
    }
    colors
}

fn count_distinct(colors: &[Vec<usize>]) -> usize {
    let mut all: Vec<usize> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// Finds an isomorphism `a -> b` (as an image array), if one exists.
pub fn find_isomorphism(a: &Hypergraph, b: &Hypergraph) -> Option<Vec<usize>> {
    if a.r() != b.r() || a.n_vertices() != b.n_vertices() || a.n_edges() != b.n_edges() {
        return None;
    }
    let mut da = a.degrees();
    let mut db = b.degrees();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return None;
    }
    let mut ma: Vec<usize> = a.edge_multiset().into_values().collect();
    let mut mb: Vec<usize> = b.edge_multiset().into_values().collect();
    ma.sort_unstable();
    mb.sort_unstable();
    if ma != mb {
        return None;
    }
    let colors = refine_colors(&[a, b]);
    let mut ha = colors[0].clone();
    let mut hb = colors[1].clone();
    ha.sort_unstable();
    hb.sort_unstable();
    if ha != hb {
        return None;
    }
    let domains = (0..a.n_vertices())
        .map(|v| {
            Some(
                (0..b.n_vertices())
                    .filter(|&u| colors[1][u] == colors[0][v])
                    .collect(),
            )
        })
        .collect();
    let index = TargetIndex::new(b);
    let search = HomSearch::new(a, &index).injective(true).with_domains(domains);
    let mut found = None;
    let _ = search.run(|image, sets| {
        let mut hits = vec![0usize; index.sets().len()];
        for &s in sets {
            hits[s] += 1;
        }
        if hits.iter().enumerate().all(|(s, &h)| h == index.positions(s).len()) {
            found = Some(image.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// Isomorphism test for small hypergraphs: an edge-preserving bijection
/// with equal edge multisets.
pub fn isomorphic(a: &Hypergraph, b: &Hypergraph) -> bool {
    find_isomorphism(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{box_product, grid, single_edge};

    #[test]
    fn grid_matches_box_product_of_edges() {
        let e = single_edge(3);
        let b = box_product(&e, &e).unwrap().graph;
        assert!(isomorphic(&grid(3).unwrap(), &b));
    }

    #[test]
    fn grid_differs_from_disjoint_edges() {
        let edges = (0..6).map(|i| vec![3 * i, 3 * i + 1, 3 * i + 2]).collect();
        let disjoint = Hypergraph::new(3, 18, edges).unwrap();
        let padded = grid(3).unwrap().disjoint_union(&Hypergraph::empty(3, 9)).unwrap();
        assert!(!isomorphic(&padded, &disjoint));
    }

    #[test]
    fn permuted_labels_are_isomorphic() {
        let g = crate::structures::fano();
        let perm = [3, 6, 0, 5, 1, 4, 2];
        let h = g.relabel(&perm).unwrap();
        let iso = find_isomorphism(&g, &h).unwrap();
        assert!(crate::homomorphism::is_homomorphism(&g, &h, &iso));
    }

    #[test]
    fn multiplicities_matter() {
        let a = Hypergraph::new(2, 3, vec![vec![0, 1], vec![0, 1], vec![1, 2]]).unwrap();
        let b = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2], vec![1, 2]]).unwrap();
        let c = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert!(isomorphic(&a, &b));
        assert!(!isomorphic(&a, &c));
    }
}
