//! Homomorphism densities against step functions.
//!
//! Pattern edges are counted by position: a pattern edge listed twice
//! contributes its factor twice. (Target weights in
//! [`weighted_hom_sum`](crate::homomorphism::weighted_hom_sum) add instead.)
//!
//! Exact densities clear denominators first and sum big integers, dividing
//! once at the end.

pub(crate) mod engine;
mod step;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::parallel;
use crate::rational::{common_denominator, Interval, Rational, Weight};
use crate::structures::{BipartiteGraph, Hypergraph};
use engine::{pattern_sum, Table};

pub use step::{multisets, orderings, BipEntries, BipStepFunction, Mode, SymStepFunction, FLAT_JSON_MAX};

fn to_integer(value: &Rational, scale: &BigInt) -> BigInt {
    (value * Rational::from_integer(scale.clone())).to_integer()
}

fn pow(base: &BigInt, exp: usize) -> BigInt {
    num_traits::pow(base.clone(), exp)
}

/// `t_H(h)`: the average over part assignments, weighted by part measures,
/// of the product of `h` over the edges of `H`.
pub fn density_sym(h: &Hypergraph, f: &SymStepFunction) -> Result<Rational> {
    if h.r() != f.r() {
        return Err(Error::UniformityMismatch { left: h.r(), right: f.r() });
    }
    let scale = common_denominator(f.support().values());
    let table = Table::new(
        f.r(),
        f.n(),
        f.support().iter().map(|(k, v)| (k.clone(), to_integer(v, &scale))),
    )?;
    let (sum, measure_scale) = match f.measures() {
        Some(m) => {
            let d = common_denominator(m);
            let weights: Vec<BigInt> = m.iter().map(|x| to_integer(x, &d)).collect();
            (pattern_sum(h, &table, Some(&weights))?, d)
        }
        None => (pattern_sum(h, &table, None)?, BigInt::from(f.n())),
    };
    let denom = pow(&scale, h.n_edges()) * pow(&measure_scale, h.n_vertices());
    Ok(Rational::new(sum, denom))
}

/// Union-find components of a bipartite graph: (left vertices, right vertices).
fn bip_components(g: &BipartiteGraph) -> Vec<(Vec<usize>, Vec<usize>)> {
    let nl = g.n_left();
    let mut parent: Vec<usize> = (0..g.n_vertices()).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for &(l, r) in g.edges() {
        let a = find(&mut parent, l);
        let b = find(&mut parent, nl + r);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
    for v in 0..g.n_vertices() {
        let root = find(&mut parent, v);
        let entry = groups.entry(root).or_default();
        if v < nl {
            entry.0.push(v);
        } else {
            entry.1.push(v - nl);
        }
    }
    groups.into_values().collect()
}

/// One side enumerated, the other summed out vertex by vertex.
struct SideSum<'a, W> {
    /// Enumerated vertices in order.
    order: Vec<usize>,
    /// Summed-out vertices closing at each depth, with their neighbours.
    closing: Vec<Vec<Vec<usize>>>,
    values: usize,
    other_values: usize,
    entry: &'a (dyn Fn(usize, usize) -> &'a W + Sync),
}

impl<W: Weight> SideSum<'_, W> {
    fn factor(&self, depth: usize, image: &[usize]) -> W {
        let mut acc = W::empty_product();
        for nbrs in &self.closing[depth] {
            let mut s = W::empty_sum();
            for y in 0..self.other_values {
                let mut term = W::empty_product();
                for &u in nbrs {
                    term = term.mul_ref((self.entry)(image[u], y));
                    if term.vanishes() {
                        break;
                    }
                }
                s.add_assign_ref(&term);
            }
            if s.vanishes() {
                return s;
            }
            acc = acc.mul_ref(&s);
        }
        acc
    }

    fn descend(&self, depth: usize, image: &mut [usize], acc: &W, out: &mut W) {
        if depth == self.order.len() {
            out.add_assign_ref(acc);
            return;
        }
        let v = self.order[depth];
        for x in 0..self.values {
            image[v] = x;
            let f = self.factor(depth, image);
            if !f.vanishes() {
                self.descend(depth + 1, image, &acc.mul_ref(&f), out);
            }
        }
    }

    fn total(&self, n_enumerated: usize) -> W {
        let partials: Vec<W> = parallel::install(|| {
            (0..self.values)
                .into_par_iter()
                .map(|x| {
                    let mut image = vec![0; n_enumerated];
                    image[self.order[0]] = x;
                    let mut out = W::empty_sum();
                    let f = self.factor(0, &image);
                    if !f.vanishes() {
                        self.descend(1, &mut image, &f, &mut out);
                    }
                    out
                })
                .collect()
        });
        partials.iter().fold(W::empty_sum(), |mut acc, p| {
            acc.add_assign_ref(p);
            acc
        })
    }
}

/// `Σ_{φ,ψ} ∏_{(u,v)} c[φ(u)][ψ(v)]` with `c` row-major `rows x cols`.
pub(crate) fn bip_sum<W: Weight>(g: &BipartiteGraph, rows: usize, cols: usize, c: &[W]) -> W {
    let mut adj_left = vec![Vec::new(); g.n_left()];
    let mut adj_right = vec![Vec::new(); g.n_right()];
    for &(l, r) in g.edges() {
        adj_left[l].push(r);
        adj_right[r].push(l);
    }
    let mut total = W::empty_product();
    for (left, right) in bip_components(g) {
        let factor = match (left.len(), right.len()) {
            (1, 0) => W::from_count(rows as u64),
            (0, 1) => W::from_count(cols as u64),
            _ => {
                let cost_left = (rows as f64).ln() * left.len() as f64;
                let cost_right = (cols as f64).ln() * right.len() as f64;
                let by_left = |i: usize, j: usize| &c[i * cols + j];
                let by_right = |j: usize, i: usize| &c[i * cols + j];
                if cost_left <= cost_right {
                    side_sum(&left, &adj_left, g.n_left(), rows, cols, &by_left)
                } else {
                    side_sum(&right, &adj_right, g.n_right(), cols, rows, &by_right)
                }
            }
        };
        if factor.vanishes() {
            return factor;
        }
        total = total.mul_ref(&factor);
    }
    total
}

fn side_sum<'a, W: Weight>(
    vertices: &[usize],
    adj: &[Vec<usize>],
    n_side: usize,
    values: usize,
    other_values: usize,
    entry: &'a (dyn Fn(usize, usize) -> &'a W + Sync),
) -> W {
    // Order by breadth-first search through the other side so that summed
    // vertices close early.
    let mut other_nbrs: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &v in vertices {
        for &w in &adj[v] {
            other_nbrs.entry(w).or_default().push(v);
        }
    }
    let mut order = Vec::with_capacity(vertices.len());
    let mut seen = vec![false; n_side];
    let mut queue = std::collections::VecDeque::from([vertices[0]]);
    seen[vertices[0]] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for w in &adj[v] {
            for &u in &other_nbrs[w] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut rank = vec![usize::MAX; n_side];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut closing = vec![Vec::new(); order.len()];
    for nbrs in other_nbrs.values() {
        let depth = nbrs.iter().map(|&u| rank[u]).max().expect("nonempty");
        closing[depth].push(nbrs.clone());
    }
    SideSum {
        order,
        closing,
        values,
        other_values,
        entry,
    }
    .total(n_side)
}

/// `t_G(f)` with left vertices on row parts and right vertices on column
/// parts. Needs exact entries.
pub fn density_bip(g: &BipartiteGraph, f: &BipStepFunction) -> Result<Rational> {
    let c = f
        .exact_entries()
        .ok_or_else(|| Error::Precondition("exact density needs an exact step function".into()))?;
    let scale = common_denominator(c);
    let ints: Vec<BigInt> = c.iter().map(|v| to_integer(v, &scale)).collect();
    let sum = bip_sum(g, f.n(), f.n_cols(), &ints);
    let denom = pow(&scale, g.edges().len())
        * pow(&BigInt::from(f.n()), g.n_left())
        * pow(&BigInt::from(f.n_cols()), g.n_right());
    Ok(Rational::new(sum, denom))
}

/// Interval enclosure of `t_G(f)` over every function inside the entry
/// enclosures; exact entries give a point.
pub fn density_bip_interval(g: &BipartiteGraph, f: &BipStepFunction) -> Interval {
    let c = f.interval_entries();
    let sum = bip_sum(g, f.n(), f.n_cols(), &c);
    let denom = pow(&BigInt::from(f.n()), g.n_left()) * pow(&BigInt::from(f.n_cols()), g.n_right());
    sum.scale(&Rational::new(BigInt::one(), denom))
}

pub fn transpose(f: &BipStepFunction) -> BipStepFunction {
    f.transpose()
}

/// Symmetric function on `n + N` parts: rows first (measure `1/(2n)` each),
/// then columns (measure `1/(2N)` each); `f` between the halves, zero inside
/// each half.
pub fn doubling(f: &BipStepFunction) -> Result<SymStepFunction> {
    let c = f
        .exact_entries()
        .ok_or_else(|| Error::Precondition("doubling needs an exact step function".into()))?;
    let (n, m) = (f.n(), f.n_cols());
    let entries = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| (vec![i, n + j], c[i * m + j].clone()));
    let mut measures = vec![Rational::new(BigInt::one(), BigInt::from(2 * n)); n];
    measures.extend(vec![Rational::new(BigInt::one(), BigInt::from(2 * m)); m]);
    SymStepFunction::from_entries(2, n + m, entries)?.with_measures(measures)
}

/// Symmetric function on `n·N` parts indexed by pairs `p = (i, j)` as
/// `i·N + j`, with `h[(i,j),(k,l)] = c[i][l] · c[k][j]`.
pub fn tensor_square(f: &BipStepFunction) -> Result<SymStepFunction> {
    let c = f
        .exact_entries()
        .ok_or_else(|| Error::Precondition("tensor square needs an exact step function".into()))?;
    let (n, m) = (f.n(), f.n_cols());
    let at = |i: usize, j: usize| &c[i * m + j];
    SymStepFunction::from_fn(2, n * m, |key| {
        let (i, j) = (key[0] / m, key[0] % m);
        let (k, l) = (key[1] / m, key[1] % m);
        at(i, l) * at(k, j)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::structures::{complete_bipartite, cycle, grid, levi, single_edge, star, subdivision_krr};

    fn c4() -> Hypergraph {
        cycle(4).unwrap()
    }

    #[test]
    fn constant_function_on_single_edge() {
        let f = SymStepFunction::constant(3, 1, rat(5, 7)).unwrap();
        assert_eq!(density_sym(&single_edge(3), &f).unwrap(), rat(5, 7));
        let f = SymStepFunction::constant(3, 2, int(-1)).unwrap();
        assert_eq!(density_sym(&single_edge(3), &f).unwrap(), int(-1));
    }

    #[test]
    fn rank_one_sign_pattern_on_c4() {
        let f = SymStepFunction::from_fn(2, 2, |k| if k[0] == k[1] { int(1) } else { int(-1) }).unwrap();
        assert_eq!(density_sym(&c4(), &f).unwrap(), int(1));
    }

    #[test]
    fn mismatched_arity_is_rejected() {
        let f = SymStepFunction::constant(2, 1, int(1)).unwrap();
        assert!(matches!(
            density_sym(&single_edge(3), &f),
            Err(Error::UniformityMismatch { .. })
        ));
    }

    #[test]
    fn bipartite_basics() {
        let edge = complete_bipartite(1, 1);
        let f = BipStepFunction::from_rows(vec![vec![int(2)]]).unwrap();
        assert_eq!(density_bip(&edge, &f).unwrap(), int(2));
        let k31 = complete_bipartite(3, 1);
        let f = BipStepFunction::from_rows(vec![vec![int(-1)]]).unwrap();
        assert_eq!(density_bip(&k31, &f).unwrap(), int(-1));
    }

    #[test]
    fn swapping_sides_transposes() {
        let g = subdivision_krr(2).unwrap();
        let f = BipStepFunction::from_rows(vec![vec![int(1), int(-2), rat(1, 3)], vec![int(0), int(3), int(-1)]]).unwrap();
        assert_eq!(
            density_bip(&g, &f).unwrap(),
            density_bip(&g.swap_sides(), &f.transpose()).unwrap()
        );
    }

    #[test]
    fn interval_density_encloses_exact() {
        let g = levi(&grid(3).unwrap());
        let f = BipStepFunction::from_rows(vec![vec![int(1), int(-1)], vec![rat(1, 2), int(2)]]).unwrap();
        let exact = density_bip(&g, &f).unwrap();
        assert_eq!(density_bip_interval(&g, &f), Interval::point(exact.clone()));
        let widened = BipStepFunction::real(
            2,
            2,
            f.interval_entries().iter().map(|i| i.widen(&rat(1, 1000))).collect(),
        )
        .unwrap();
        let enc = density_bip_interval(&g, &widened);
        assert!(enc.contains(&exact) && !enc.is_point());
    }

    #[test]
    fn doubling_identity_on_path() {
        let g = complete_bipartite(1, 2);
        let f = BipStepFunction::from_rows(vec![vec![int(1), int(-2), int(3)], vec![int(0), int(1), int(-1)]]).unwrap();
        let d = doubling(&f).unwrap();
        let lhs = density_sym(&g.to_graph(), &d).unwrap() * int(8);
        let rhs = density_bip(&g, &f).unwrap() + density_bip(&g, &f.transpose()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tensor_square_is_symmetric_and_multiplicative() {
        let f = BipStepFunction::from_rows(vec![vec![int(1), int(-2)], vec![int(3), rat(1, 2)]]).unwrap();
        let h = tensor_square(&f).unwrap();
        let g = cycle(6).unwrap();
        let (bip, _) = BipartiteGraph::from_graph(&g, None).unwrap();
        let lhs = density_sym(&g, &h).unwrap();
        let rhs = density_bip(&bip, &f).unwrap() * density_bip(&bip, &f.transpose()).unwrap();
        assert_eq!(lhs, rhs);
        let one = tensor_square(&BipStepFunction::from_rows(vec![vec![int(1)]]).unwrap()).unwrap();
        assert_eq!(one.to_flat(), vec![int(1)]);
    }

    #[test]
    fn star_with_measures() {
        // Two parts of measure 1/3 and 2/3, value 1 only on part pair (0, 1).
        let f = SymStepFunction::from_entries(2, 2, [(vec![0, 1], int(1))])
            .unwrap()
            .with_measures(vec![rat(1, 3), rat(2, 3)])
            .unwrap();
        // Centre on 0 forces leaves on 1 and vice versa.
        let expected = rat(1, 3) * rat(8, 27) + rat(2, 3) * rat(1, 27);
        assert_eq!(density_sym(&star(3), &f).unwrap(), expected);
    }
}
