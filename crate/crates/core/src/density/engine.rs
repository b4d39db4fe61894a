//! Summation engine behind every density computation.
//!
//! It evaluates `Σ_φ ∏_u μ(φ(u)) ∏_e a(φ(e))` over all maps `φ: V(H) -> [n]`,
//! where `a` is a symmetric table keyed by sorted multisets and `μ` is an
//! optional per-part weight. Components of `H` are summed separately. Inside
//! a component a large set `I` of vertices, no two sharing an edge, is
//! eliminated in closed form at the leaves; only the rest is enumerated.
//! When `a` is sparse the candidates for a vertex come from an index over
//! sub-multisets of the support, so the cost tracks the number of nonzero
//! terms rather than `n^{v(H)}`.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::parallel;
use crate::rational::Weight;
use crate::structures::Hypergraph;

const MAX_ARITY: usize = 32;
/// Above this arity only the full support is indexed.
const FULL_INDEX_MAX_R: usize = 8;
/// Components up to this size get an exact maximum independent set.
const EXACT_SPLIT_MAX: usize = 26;

/// Symmetric table over sorted multisets of `[n]`, with a candidate index.
pub(crate) struct Table<W> {
    r: usize,
    n: usize,
    base: u128,
    values: FxHashMap<u128, W>,
    extend: Option<FxHashMap<u128, Vec<usize>>>,
    active: Vec<usize>,
    /// Few extensions per part: leaves would only cost pruning.
    sparse: bool,
}

fn encode(base: u128, sorted: &[usize]) -> u128 {
    sorted
        .iter()
        .rev()
        .fold(0u128, |acc, &x| acc * base + (x as u128 + 1))
}

fn encode_unsorted(base: u128, items: impl Iterator<Item = usize>) -> u128 {
    let mut buf = [0usize; MAX_ARITY];
    let mut k = 0;
    for x in items {
        buf[k] = x;
        k += 1;
    }
    buf[..k].sort_unstable();
    encode(base, &buf[..k])
}

impl<W: Weight> Table<W> {
    /// `entries` holds sorted multisets of size `r` with nonzero values.
    pub(crate) fn new(r: usize, n: usize, entries: impl IntoIterator<Item = (Vec<usize>, W)>) -> Result<Self> {
        if r == 0 || r > MAX_ARITY {
            return Err(Error::InvalidParameter(format!("unsupported arity {r}")));
        }
        let base = n as u128 + 1;
        let fits = (0..r).try_fold(1u128, |acc, _| acc.checked_mul(base)).is_some_and(|m| m < u128::MAX / 2);
        if !fits {
            return Err(Error::InvalidParameter(format!(
                "step function of size {n} and arity {r} is too large to index"
            )));
        }
        let mut values = FxHashMap::default();
        let mut extend: FxHashMap<u128, Vec<usize>> = FxHashMap::default();
        let mut active = Vec::new();
        for (key, value) in entries {
            debug_assert!(key.len() == r && key.windows(2).all(|w| w[0] <= w[1]));
            if value.vanishes() {
                continue;
            }
            active.extend_from_slice(&key);
            if r <= FULL_INDEX_MAX_R {
                for mask in 1u32..(1u32 << r) - 1 {
                    let sub: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| key[i]).collect();
                    let list = extend.entry(encode(base, &sub)).or_default();
                    list.extend((0..r).filter(|i| mask >> i & 1 == 0).map(|i| key[i]));
                }
            }
            values.insert(encode(base, &key), value);
        }
        for list in extend.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        active.sort_unstable();
        active.dedup();
        let reach: usize = active
            .iter()
            .filter_map(|&x| extend.get(&encode(base, &[x])))
            .map(Vec::len)
            .sum();
        let sparse = r <= FULL_INDEX_MAX_R && r > 1 && 4 * reach < n * active.len();
        Ok(Table {
            r,
            n,
            base,
            values,
            extend: (r <= FULL_INDEX_MAX_R).then_some(extend),
            active,
            sparse,
        })
    }

    fn value(&self, code: u128) -> Option<&W> {
        self.values.get(&code)
    }
}

struct Constraint {
    /// Other vertices of the edge assigned before this one.
    earlier: Vec<usize>,
    closes: bool,
}

struct Step {
    vertex: usize,
    constraints: Vec<Constraint>,
}

/// An eliminated vertex, given by the other vertices of each incident edge.
struct Leaf {
    edges: Vec<Vec<usize>>,
}

struct Plan {
    steps: Vec<Step>,
    leaves: Vec<Leaf>,
}

/// Largest vertex set with no two members in a common edge, exact for small
/// components and greedy otherwise. With `pendant_only` only vertices of
/// degree one qualify.
fn eliminated_set(h: &Hypergraph, comp: &[usize], pendant_only: bool) -> Vec<usize> {
    let local: rustc_hash::FxHashMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = comp.len();
    let mut conflict = vec![0u64; k.min(64)];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for edge in h.edges() {
        if !local.contains_key(&edge[0]) {
            continue;
        }
        for &a in edge {
            for &b in edge {
                if a != b {
                    adj[local[&a]].push(local[&b]);
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degrees = h.degrees();
    let allowed: Vec<bool> = comp.iter().map(|&v| !pendant_only || degrees[v] <= 1).collect();
    let chosen: Vec<usize> = if k <= EXACT_SPLIT_MAX {
        for (i, list) in adj.iter().enumerate() {
            conflict[i] = list.iter().fold(0, |m, &j| m | 1 << j);
        }
        let mut best = 0u64;
        let remaining = (0..k).filter(|&i| allowed[i]).fold(0u64, |m, i| m | 1 << i);
        max_independent(&conflict, remaining, 0, &mut best);
        (0..k).filter(|i| best >> i & 1 == 1).collect()
    } else {
        let mut removed: Vec<bool> = allowed.iter().map(|a| !a).collect();
        let mut out = Vec::new();
        loop {
            let pick = (0..k)
                .filter(|&i| !removed[i])
                .min_by_key(|&i| adj[i].iter().filter(|&&j| !removed[j]).count());
            let Some(i) = pick else { break };
            out.push(i);
            removed[i] = true;
            for &j in &adj[i] {
                removed[j] = true;
            }
        }
        out
    };
    chosen.into_iter().map(|i| comp[i]).collect()
}

fn max_independent(conflict: &[u64], remaining: u64, current: u64, best: &mut u64) {
    if remaining == 0 {
        if current.count_ones() > best.count_ones() {
            *best = current;
        }
        return;
    }
    if current.count_ones() + remaining.count_ones() <= best.count_ones() {
        return;
    }
    let v = remaining.trailing_zeros() as usize;
    let bit = 1u64 << v;
    max_independent(conflict, remaining & !bit & !conflict[v], current | bit, best);
    if conflict[v] & remaining != 0 {
        max_independent(conflict, remaining & !bit, current, best);
    }
}

fn plan_component(h: &Hypergraph, comp: &[usize], inc: &[Vec<usize>], sparse: bool) -> Plan {
    let eliminated = eliminated_set(h, comp, sparse);
    let n = h.n_vertices();
    let mut is_leaf = vec![false; n];
    for &v in &eliminated {
        is_leaf[v] = true;
    }
    let deg: Vec<usize> = (0..n).map(|v| inc[v].len()).collect();
    // Breadth-first over the enumerated vertices, adjacency through edges.
    let mut enumerated: Vec<usize> = comp.iter().copied().filter(|&v| !is_leaf[v]).collect();
    enumerated.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    for &root in &enumerated {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = inc[v]
                .iter()
                .flat_map(|&e| h.edges()[e].iter().copied())
                .filter(|&u| !seen[u] && !is_leaf[u])
                .collect();
            next.sort_unstable();
            next.dedup();
            for u in next {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    let mut rank = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let steps = order
        .iter()
        .map(|&v| {
            let constraints = inc[v]
                .iter()
                .map(|&e| {
                    let edge = &h.edges()[e];
                    let earlier: Vec<usize> = edge.iter().copied().filter(|&u| rank[u] < rank[v]).collect();
                    let closes = earlier.len() + 1 == edge.len();
                    Constraint { earlier, closes }
                })
                .collect();
            Step { vertex: v, constraints }
        })
        .collect();
    let leaves = eliminated
        .iter()
        .map(|&v| Leaf {
            edges: inc[v]
                .iter()
                .map(|&e| h.edges()[e].iter().copied().filter(|&u| u != v).collect())
                .collect(),
        })
        .collect();
    Plan { steps, leaves }
}

struct Run<'a, W> {
    table: &'a Table<W>,
    measure: Option<&'a [W]>,
    plan: &'a Plan,
}

impl<W: Weight> Run<'_, W> {
    fn weight_of(&self, x: usize) -> Option<&W> {
        self.measure.map(|m| &m[x])
    }

    /// Sorted candidates for a vertex whose constraint keys are `keys`.
    fn candidates(&self, keys: &[u128]) -> Option<Vec<usize>> {
        let mut lists: Vec<&[usize]> = Vec::with_capacity(keys.len());
        if let Some(extend) = &self.table.extend {
            for k in keys {
                lists.push(extend.get(k)?.as_slice());
            }
        }
        let base: &[usize] = match lists.iter().min_by_key(|l| l.len()) {
            Some(l) => l,
            None => &self.table.active,
        };
        Some(
            base.iter()
                .copied()
                .filter(|x| lists.iter().all(|l| l.binary_search(x).is_ok()))
                .collect(),
        )
    }

    fn step_candidates(&self, k: usize, image: &[usize]) -> Option<Vec<usize>> {
        let keys: Vec<u128> = self.plan.steps[k]
            .constraints
            .iter()
            .filter(|c| !c.earlier.is_empty())
            .map(|c| encode_unsorted(self.table.base, c.earlier.iter().map(|&u| image[u])))
            .collect();
        self.candidates(&keys)
    }

    /// Product of the closing factors and the part weight for `x` at step `k`.
    fn step_factor(&self, k: usize, x: usize, image: &[usize]) -> Option<W> {
        let mut acc: Option<W> = self.weight_of(x).cloned();
        for c in self.plan.steps[k].constraints.iter().filter(|c| c.closes) {
            let code = encode_unsorted(
                self.table.base,
                c.earlier.iter().map(|&u| image[u]).chain(std::iter::once(x)),
            );
            let v = self.table.value(code)?;
            acc = Some(match acc {
                Some(a) => a.mul_ref(v),
                None => v.clone(),
            });
        }
        Some(acc.unwrap_or_else(W::empty_product))
    }

    fn leaf_value(&self, image: &[usize]) -> W {
        let mut total = W::empty_product();
        for leaf in &self.plan.leaves {
            let mut sum = W::empty_sum();
            let keys: Vec<u128> = if self.table.r > 1 {
                leaf.edges
                    .iter()
                    .map(|others| encode_unsorted(self.table.base, others.iter().map(|&u| image[u])))
                    .collect()
            } else {
                Vec::new()
            };
            let Some(cands) = self.candidates(&keys) else {
                return W::empty_sum();
            };
            'x: for x in cands {
                let mut term: Option<W> = self.weight_of(x).cloned();
                for others in &leaf.edges {
                    let code = encode_unsorted(
                        self.table.base,
                        others.iter().map(|&u| image[u]).chain(std::iter::once(x)),
                    );
                    let Some(v) = self.table.value(code) else {
                        continue 'x;
                    };
                    term = Some(match term {
                        Some(t) => t.mul_ref(v),
                        None => v.clone(),
                    });
                }
                sum.add_assign_ref(&term.unwrap_or_else(W::empty_product));
            }
            if sum.vanishes() {
                return sum;
            }
            total = total.mul_ref(&sum);
        }
        total
    }

    fn descend(&self, k: usize, image: &mut [usize], acc: &W, out: &mut W) {
        if k == self.plan.steps.len() {
            let leaf = self.leaf_value(image);
            if !leaf.vanishes() {
                out.add_assign_ref(&acc.mul_ref(&leaf));
            }
            return;
        }
        let Some(cands) = self.step_candidates(k, image) else {
            return;
        };
        let v = self.plan.steps[k].vertex;
        for x in cands {
            image[v] = x;
            if let Some(f) = self.step_factor(k, x, image) {
                let next = acc.mul_ref(&f);
                self.descend(k + 1, image, &next, out);
            }
        }
        image[v] = usize::MAX;
    }

    fn total(&self, n_vertices: usize) -> W {
        if self.plan.steps.is_empty() {
            let image = vec![usize::MAX; n_vertices];
            return self.leaf_value(&image);
        }
        let firsts = {
            let image = vec![usize::MAX; n_vertices];
            self.step_candidates(0, &image).unwrap_or_default()
        };
        let partials: Vec<W> = parallel::install(|| {
            firsts
                .par_iter()
                .map(|&x| {
                    let mut image = vec![usize::MAX; n_vertices];
                    image[self.plan.steps[0].vertex] = x;
                    let mut out = W::empty_sum();
                    if let Some(f) = self.step_factor(0, x, &image) {
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

/// `Σ_φ ∏_u μ(φ(u)) ∏_e a(φ(e))`; without `measure` every part weighs one.
pub(crate) fn pattern_sum<W: Weight>(h: &Hypergraph, table: &Table<W>, measure: Option<&[W]>) -> Result<W> {
    if h.r() != table.r {
        return Err(Error::UniformityMismatch {
            left: h.r(),
            right: table.r,
        });
    }
    if let Some(m) = measure {
        if m.len() != table.n {
            return Err(Error::InvalidParameter("one measure per part expected".into()));
        }
    }
    let inc = h.incidence();
    let isolated_factor = || match measure {
        Some(m) => m.iter().fold(W::empty_sum(), |mut acc, w| {
            acc.add_assign_ref(w);
            acc
        }),
        None => W::from_count(table.n as u64),
    };
    let mut total = W::empty_product();
    for comp in h.components() {
        let factor = if inc[comp[0]].is_empty() {
            isolated_factor()
        } else {
            let plan = plan_component(h, &comp, &inc, table.sparse);
            Run {
                table,
                measure,
                plan: &plan,
            }
            .total(h.n_vertices())
        };
        if factor.vanishes() {
            return Ok(factor);
        }
        total = total.mul_ref(&factor);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{cycle, grid, single_edge, star};

    fn all_ones(r: usize, n: usize) -> Table<u128> {
        let keys = crate::density::multisets(n, r);
        Table::new(r, n, keys.into_iter().map(|k| (k, 1u128))).unwrap()
    }

    #[test]
    fn all_ones_counts_every_map() {
        for (h, n) in [(grid(3).unwrap(), 2usize), (cycle(5).unwrap(), 3), (star(3), 4)] {
            let t = all_ones(h.r(), n);
            let expected = (n as u128).pow(h.n_vertices() as u32);
            assert_eq!(pattern_sum(&h, &t, None).unwrap(), expected);
        }
    }

    #[test]
    fn sparse_table_counts_homomorphisms() {
        // Support = permutations of one 3-set: sums count homomorphisms.
        for n in [5, 20] {
            let t = Table::new(3, n, [(vec![1, 2, 4], 1u128)]).unwrap();
            assert_eq!(t.sparse, n == 20);
            assert_eq!(pattern_sum(&grid(3).unwrap(), &t, None).unwrap(), 12);
            assert_eq!(pattern_sum(&single_edge(3), &t, None).unwrap(), 6);
            assert_eq!(pattern_sum(&star(3), &Table::new(2, n, [(vec![1, 2], 1u128)]).unwrap(), None).unwrap(), 2);
        }
    }

    #[test]
    fn isolated_vertices_use_measure_mass() {
        let h = Hypergraph::new(2, 3, vec![vec![0, 1]]).unwrap();
        let t = all_ones(2, 2);
        let m = [2u128, 5];
        assert_eq!(pattern_sum(&h, &t, Some(&m)).unwrap(), 7 * 7 * 7);
    }

    #[test]
    fn split_is_independent() {
        let g = grid(3).unwrap();
        let comp: Vec<usize> = (0..9).collect();
        let set = eliminated_set(&g, &comp, false);
        assert_eq!(set.len(), 3);
        for e in g.edges() {
            assert!(e.iter().filter(|v| set.contains(v)).count() <= 1);
        }
        let s = star(3);
        assert_eq!(eliminated_set(&s, &[0, 1, 2, 3], false), vec![1, 2, 3]);
        assert_eq!(eliminated_set(&s, &[0, 1, 2, 3], true), vec![1, 2, 3]);
        assert!(eliminated_set(&g, &comp, true).is_empty());
    }
}
