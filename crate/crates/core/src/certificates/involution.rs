use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::homomorphism::refine_colors;
use crate::structures::Hypergraph;

/// An involution fixing `fixed` and swapping each pair `(plus, minus)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableInvolution {
    pub fixed: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

const FIXED: u8 = 0;
const PLUS: u8 = 1;
const MINUS: u8 = 2;

impl StableInvolution {
    /// Image array of the involution on `n` vertices, if the parts cover
    /// every vertex exactly once.
    pub fn image(&self, n: usize) -> Option<Vec<usize>> {
        let mut image = vec![usize::MAX; n];
        let mut place = |v: usize, to: usize| -> bool {
            if v >= n || image[v] != usize::MAX {
                return false;
            }
            image[v] = to;
            true
        };
        for &v in &self.fixed {
            if !place(v, v) {
                return None;
            }
        }
        for &(p, m) in &self.pairs {
            if p == m || !place(p, m) || !place(m, p) {
                return None;
            }
        }
        image.iter().all(|&x| x != usize::MAX).then_some(image)
    }

    fn sides(&self, n: usize) -> Vec<u8> {
        let mut side = vec![FIXED; n];
        for &(p, m) in &self.pairs {
            side[p] = PLUS;
            side[m] = MINUS;
        }
        side
    }
}

/// Edge-preserving (with multiplicity), no edge inside the fixed part, no
/// edge meeting both swapped halves.
pub fn verify_stable_involution(h: &Hypergraph, s: &StableInvolution) -> bool {
    let n = h.n_vertices();
    let Some(image) = s.image(n) else {
        return false;
    };
    let side = s.sides(n);
    let multiset = h.edge_multiset();
    for e in h.edges() {
        if e.iter().all(|&v| side[v] == FIXED) {
            return false;
        }
        if e.iter().any(|&v| side[v] == PLUS) && e.iter().any(|&v| side[v] == MINUS) {
            return false;
        }
        let mut img: Vec<usize> = e.iter().map(|&v| image[v]).collect();
        img.sort_unstable();
        if multiset.get(&img) != multiset.get(e) {
            return false;
        }
    }
    true
}

struct Search<'a> {
    h: &'a Hypergraph,
    inc: Vec<Vec<usize>>,
    colors: Vec<usize>,
    multiset: BTreeMap<Vec<usize>, usize>,
    image: Vec<usize>,
    side: Vec<u8>,
}

impl Search<'_> {
    /// Checks the edges through `touched` whose vertices are all assigned.
    fn consistent(&self, touched: &[usize]) -> bool {
        for &v in touched {
            for &e in &self.inc[v] {
                let edge = &self.h.edges()[e];
                let mut plus = false;
                let mut minus = false;
                let mut complete = true;
                for &u in edge {
                    if self.image[u] == usize::MAX {
                        complete = false;
                        continue;
                    }
                    plus |= self.side[u] == PLUS;
                    minus |= self.side[u] == MINUS;
                }
                if plus && minus {
                    return false;
                }
                if !complete {
                    continue;
                }
                if !plus && !minus {
                    return false;
                }
                let mut img: Vec<usize> = edge.iter().map(|&u| self.image[u]).collect();
                img.sort_unstable();
                if self.multiset.get(&img) != self.multiset.get(edge) {
                    return false;
                }
            }
        }
        true
    }

    fn descend(&mut self, v: usize) -> bool {
        let n = self.h.n_vertices();
        let Some(v) = (v..n).find(|&u| self.image[u] == usize::MAX) else {
            return true;
        };
        self.image[v] = v;
        self.side[v] = FIXED;
        if self.consistent(&[v]) && self.descend(v + 1) {
            return true;
        }
        for w in v + 1..n {
            if self.image[w] != usize::MAX || self.colors[w] != self.colors[v] {
                continue;
            }
            for (sv, sw) in [(PLUS, MINUS), (MINUS, PLUS)] {
                self.image[v] = w;
                self.image[w] = v;
                self.side[v] = sv;
                self.side[w] = sw;
                if self.consistent(&[v, w]) && self.descend(v + 1) {
                    return true;
                }
            }
            self.image[w] = usize::MAX;
        }
        self.image[v] = usize::MAX;
        false
    }
}

/// Exhaustive search. Vertices are decided in increasing order, fixing
/// before pairing and pairing with smaller partners first, so the result is
/// the first stable involution in lexicographic order of its image array
/// (ties between orientations broken by putting the smaller vertex in the
/// plus half).
pub fn find_stable_involution(h: &Hypergraph) -> Option<StableInvolution> {
    let n = h.n_vertices();
    let mut search = Search {
        h,
        inc: h.incidence(),
        colors: refine_colors(&[h]).pop().unwrap_or_default(),
        multiset: h.edge_multiset(),
        image: vec![usize::MAX; n],
        side: vec![FIXED; n],
    };
    if !search.descend(0) {
        return None;
    }
    let mut fixed = Vec::new();
    let mut pairs = Vec::new();
    for v in 0..n {
        match search.side[v] {
            FIXED => fixed.push(v),
            PLUS => pairs.push((v, search.image[v])),
            _ => {}
        }
    }
    Some(StableInvolution { fixed, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{cycle, double, grid, single_edge, subdivision_krr};

    #[test]
    fn four_cycle() {
        let s = find_stable_involution(&cycle(4).unwrap()).unwrap();
        assert_eq!(s.fixed, vec![0, 2]);
        assert_eq!(s.pairs, vec![(1, 3)]);
        assert!(verify_stable_involution(&cycle(4).unwrap(), &s));
    }

    #[test]
    fn none_for_single_edges_and_subdivided_k33() {
        assert!(find_stable_involution(&single_edge(2)).is_none());
        assert!(find_stable_involution(&single_edge(3)).is_none());
        assert!(find_stable_involution(&subdivision_krr(3).unwrap().to_graph()).is_none());
    }

    #[test]
    fn copy_swap_on_doubles() {
        for h in [single_edge(3), grid(3).unwrap()] {
            let d = double(&h);
            let n = h.n_vertices();
            let swap = StableInvolution {
                fixed: vec![],
                pairs: (0..n).map(|v| (v, v + n)).collect(),
            };
            assert!(verify_stable_involution(&d, &swap));
            assert!(find_stable_involution(&d).is_some());
        }
    }

    #[test]
    fn broken_involutions_fail() {
        let c4 = cycle(4).unwrap();
        let bad = StableInvolution {
            fixed: vec![1, 3],
            pairs: vec![(0, 1)],
        };
        assert!(!verify_stable_involution(&c4, &bad));
        let not_edge_preserving = StableInvolution {
            fixed: vec![0, 1],
            pairs: vec![(2, 3)],
        };
        assert!(!verify_stable_involution(&c4, &not_edge_preserving));
    }
}
