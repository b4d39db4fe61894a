//! Brute-force reference implementations.
//!
//! Everything here walks all `n^v` maps with no pruning. It exists to check
//! the fast engines on small instances and is exposed so that the CLI and
//! external tests can use the same references.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::density::{BipStepFunction, SymStepFunction};
use crate::homomorphism::is_homomorphism;
use crate::rational::Rational;
use crate::structures::{BipartiteGraph, Hypergraph, WeightedHypergraph};

/// `n^v`, the number of candidate maps, if it fits.
pub fn map_count(n: usize, v: usize) -> Option<u128> {
    (0..v).try_fold(1u128, |acc, _| acc.checked_mul(n as u128))
}

/// Calls `visit` on every map `[v] -> [n]` in lexicographic order.
pub fn for_each_map(v: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    if n == 0 && v > 0 {
        return;
    }
    let mut image = vec![0usize; v];
    loop {
        visit(&image);
        let Some(i) = (0..v).rev().find(|&i| image[i] + 1 < n) else {
            return;
        };
        image[i] += 1;
        for slot in &mut image[i + 1..] {
            *slot = 0;
        }
    }
}

pub fn count_homs(h: &Hypergraph, g: &Hypergraph) -> u128 {
    let mut count = 0;
    for_each_map(h.n_vertices(), g.n_vertices(), |img| {
        if is_homomorphism(h, g, img) {
            count += 1;
        }
    });
    count
}

pub fn count_injective_homs(h: &Hypergraph, g: &Hypergraph) -> u128 {
    let mut count = 0;
    for_each_map(h.n_vertices(), g.n_vertices(), |img| {
        let mut seen = img.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() == img.len() && is_homomorphism(h, g, img) {
            count += 1;
        }
    });
    count
}

/// Sum over homomorphisms of the product of image weights, parallel target
/// copies adding.
pub fn weighted_hom_sum(h: &Hypergraph, t: &WeightedHypergraph) -> Rational {
    let by_set = t.weight_by_set();
    let mut total = Rational::zero();
    for_each_map(h.n_vertices(), t.base().n_vertices(), |img| {
        let mut term = Rational::one();
        for e in h.edges() {
            let mut key: Vec<usize> = e.iter().map(|&v| img[v]).collect();
            key.sort_unstable();
            match by_set.get(&key) {
                Some(w) => term *= w,
                None => return,
            }
        }
        total += term;
    });
    total
}

pub fn density_sym(h: &Hypergraph, f: &SymStepFunction) -> Rational {
    let mu = f.measure_vector();
    let mut total = Rational::zero();
    for_each_map(h.n_vertices(), f.n(), |img| {
        let mut term: Rational = img.iter().map(|&x| &mu[x]).product();
        for e in h.edges() {
            let idx: Vec<usize> = e.iter().map(|&v| img[v]).collect();
            term *= f.get(&idx);
            if term.is_zero() {
                return;
            }
        }
        total += term;
    });
    total
}

pub fn density_bip(g: &BipartiteGraph, f: &BipStepFunction) -> Rational {
    let c = f.exact_entries().expect("exact step function");
    let (rows, cols) = (f.n(), f.n_cols());
    let (nl, nr) = (g.n_left(), g.n_right());
    let mut total = Rational::zero();
    for_each_map(nl + nr, rows.max(cols), |img| {
        if img[..nl].iter().any(|&x| x >= rows) || img[nl..].iter().any(|&y| y >= cols) {
            return;
        }
        let term: Rational = g.edges().iter().map(|&(l, r)| &c[img[l] * cols + img[nl + r]]).product();
        total += term;
    });
    let denom = num_traits::pow(BigInt::from(rows), nl) * num_traits::pow(BigInt::from(cols), nr);
    total / Rational::from_integer(denom)
}

/// Rational with numerator in `[-span, span]` and denominator in `[1, den]`.
pub fn random_rational(rng: &mut impl Rng, span: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-span..=span).into(), rng.gen_range(1..=den).into())
}

pub fn random_sym(rng: &mut impl Rng, r: usize, n: usize) -> SymStepFunction {
    SymStepFunction::from_fn(r, n, |_| random_rational(rng, 5, 4)).expect("valid shape")
}

pub fn random_bip(rng: &mut impl Rng, rows: usize, cols: usize) -> BipStepFunction {
    let entries = (0..rows * cols).map(|_| random_rational(rng, 5, 4)).collect();
    BipStepFunction::exact(rows, cols, entries).expect("valid shape")
}

/// `m` random edges (repeats allowed) on `n >= r` vertices.
pub fn random_hypergraph(rng: &mut impl Rng, r: usize, n: usize, m: usize) -> Hypergraph {
    let edges = (0..m)
        .map(|_| rand::seq::index::sample(rng, n, r).into_vec())
        .collect();
    Hypergraph::new(r, n, edges).expect("valid edges")
}

pub fn random_weighted(rng: &mut impl Rng, r: usize, n: usize, m: usize) -> WeightedHypergraph {
    let base = random_hypergraph(rng, r, n, m);
    let weights = (0..m).map(|_| random_rational(rng, 3, 2)).collect();
    WeightedHypergraph::new(base, weights).expect("one weight per edge")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{cycle, single_edge};

    #[test]
    fn maps_are_enumerated_once() {
        let mut seen = Vec::new();
        for_each_map(2, 3, |m| seen.push(m.to_vec()));
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[5], vec![1, 2]);
        let mut empty = 0;
        for_each_map(0, 4, |_| empty += 1);
        assert_eq!(empty, 1);
    }

    #[test]
    fn triangle_counts() {
        let k3 = cycle(3).unwrap();
        assert_eq!(count_homs(&k3, &k3), 6);
        assert_eq!(count_homs(&single_edge(2), &k3), 6);
        assert_eq!(count_injective_homs(&k3, &k3), 6);
    }
}
