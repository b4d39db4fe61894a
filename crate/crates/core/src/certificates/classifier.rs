use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homomorphism::{for_each_hom, image_subgraph, isomorphic, VertexMap};
use crate::structures::{grid, Hypergraph};

/// How the images of `grid(r)` in a linear hypergraph break down.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationStats {
    pub total: u128,
    pub iso_to_grid: u128,
    pub single_edge: u128,
    pub contains_triangle: u128,
    /// Homomorphisms whose image fits none of the three cases.
    pub violations: Vec<VertexMap>,
}

/// Enumerates every homomorphism `grid(r) -> g` and classifies its image.
pub fn grid_classifier(g: &Hypergraph, r: usize) -> Result<ClassificationStats> {
    if g.r() != r {
        return Err(Error::UniformityMismatch { left: r, right: g.r() });
    }
    if !g.is_linear() {
        return Err(Error::NotLinear);
    }
    let pattern = grid(r)?;
    let mut stats = ClassificationStats::default();
    let mut failure = None;
    for_each_hom(&pattern, g, |image| {
        let map = VertexMap::new(g.n_vertices(), image.to_vec()).expect("image in range");
        let img = match image_subgraph(&pattern, g, &map) {
            Ok(img) => img.graph,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        stats.total += 1;
        if img.n_edges() == 1 {
            stats.single_edge += 1;
        } else if img.n_edges() == pattern.n_edges() && isomorphic(&img, &pattern) {
            stats.iso_to_grid += 1;
        } else if img.contains_triangle() {
            stats.contains_triangle += 1;
        } else {
            stats.violations.push(map);
        }
        ControlFlow::Continue(())
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(stats),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{fano, single_edge};

    #[test]
    fn grid_into_itself() {
        let g = grid(3).unwrap();
        let s = grid_classifier(&g, 3).unwrap();
        assert_eq!(s.iso_to_grid, 72);
        assert_eq!(s.single_edge, 72);
        assert!(s.violations.is_empty());
    }

    #[test]
    fn single_edge_images() {
        let s = grid_classifier(&single_edge(3), 3).unwrap();
        assert_eq!((s.total, s.single_edge), (12, 12));
    }

    #[test]
    fn fano_has_triangles() {
        let s = grid_classifier(&fano(), 3).unwrap();
        assert!(s.contains_triangle > 0);
        assert!(s.violations.is_empty());
    }

    #[test]
    fn rejects_non_linear() {
        let g = Hypergraph::new(3, 4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert!(matches!(grid_classifier(&g, 3), Err(Error::NotLinear)));
    }
}
