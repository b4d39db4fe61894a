//! Backtracking homomorphism search.
//!
//! Pattern vertices are assigned in a breadth-first order rooted at a
//! maximum-degree vertex. Whenever a pattern edge already has assigned
//! vertices, the candidates for the next vertex come from an index keyed by
//! the sorted images of those vertices: it lists every target vertex that
//! extends them inside some target edge. Edges whose last vertex is being
//! assigned are closed by an exact lookup of the full image set.

use std::collections::{HashMap, VecDeque};
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::parallel;
use crate::rational::Weight;
use crate::structures::Hypergraph;

/// Above this uniformity only singletons and `(r-1)`-subsets are indexed.
const FULL_SUBSET_INDEX_MAX_R: usize = 8;

pub(crate) struct TargetIndex {
    r: usize,
    n: usize,
    /// Distinct edge vertex sets and the target positions carrying each.
    sets: Vec<Vec<usize>>,
    positions: Vec<Vec<usize>>,
    set_id: HashMap<Vec<usize>, usize>,
    extend: HashMap<Vec<usize>, Vec<usize>>,
    active: Vec<usize>,
}

impl TargetIndex {
    pub(crate) fn new(target: &Hypergraph) -> Self {
        let r = target.r();
        let mut sets = Vec::new();
        let mut positions: Vec<Vec<usize>> = Vec::new();
        let mut set_id = HashMap::new();
        for (pos, edge) in target.edges().iter().enumerate() {
            let id = *set_id.entry(edge.clone()).or_insert_with(|| {
                sets.push(edge.clone());
                positions.push(Vec::new());
                sets.len() - 1
            });
            positions[id].push(pos);
        }
        let mut extend: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        let full = r <= FULL_SUBSET_INDEX_MAX_R;
        for set in &sets {
            if full {
                for mask in 1u32..(1u32 << r) - 1 {
                    let key: Vec<usize> =
                        (0..r).filter(|i| mask >> i & 1 == 1).map(|i| set[i]).collect();
                    let list = extend.entry(key).or_default();
                    list.extend((0..r).filter(|i| mask >> i & 1 == 0).map(|i| set[i]));
                }
            } else {
                for (i, &v) in set.iter().enumerate() {
                    let others = || set.iter().enumerate().filter(move |&(j, _)| j != i).map(|(_, &w)| w);
                    extend.entry(vec![v]).or_default().extend(others());
                    extend.entry(others().collect()).or_default().push(v);
                }
            }
        }
        for list in extend.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let mut active: Vec<usize> = sets.iter().flatten().copied().collect();
        active.sort_unstable();
        active.dedup();
        TargetIndex {
            r,
            n: target.n_vertices(),
            sets,
            positions,
            set_id,
            extend,
            active,
        }
    }

    pub(crate) fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub(crate) fn positions(&self, set: usize) -> &[usize] {
        &self.positions[set]
    }

    pub(crate) fn lookup(&self, set: &[usize]) -> Option<usize> {
        self.set_id.get(set).copied()
    }

    fn is_indexed(&self, size: usize) -> bool {
        size == 1 || size + 1 == self.r || self.r <= FULL_SUBSET_INDEX_MAX_R
    }
}

struct Constraint {
    edge: usize,
    earlier: Vec<usize>,
    closes: bool,
}

struct Step {
    vertex: usize,
    has_edges: bool,
    constraints: Vec<Constraint>,
}

/// Breadth-first vertex order, each component rooted at its (first)
/// maximum-degree vertex.
pub(crate) fn search_order(pattern: &Hypergraph) -> Vec<usize> {
    let n = pattern.n_vertices();
    let deg = pattern.degrees();
    let inc = pattern.incidence();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    for &root in &by_degree {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = inc[v]
                .iter()
                .flat_map(|&e| pattern.edges()[e].iter().copied())
                .filter(|&u| !seen[u])
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            for u in nbrs {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    order
}

pub(crate) struct HomSearch<'a> {
    pattern: &'a Hypergraph,
    target: &'a TargetIndex,
    steps: Vec<Step>,
    injective: bool,
    domains: Option<Vec<Option<Vec<usize>>>>,
}

struct State {
    image: Vec<usize>,
    edge_sets: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> HomSearch<'a> {
    pub(crate) fn new(pattern: &'a Hypergraph, target: &'a TargetIndex) -> Self {
        debug_assert_eq!(pattern.r(), target.r);
        let order = search_order(pattern);
        let mut rank = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let inc = pattern.incidence();
        let steps = order
            .iter()
            .map(|&v| {
                let constraints = inc[v]
                    .iter()
                    .map(|&e| {
                        let edge = &pattern.edges()[e];
                        let earlier: Vec<usize> =
                            edge.iter().copied().filter(|&u| rank[u] < rank[v]).collect();
                        let closes = earlier.len() + 1 == edge.len();
                        Constraint { edge: e, earlier, closes }
                    })
                    .collect();
                Step {
                    vertex: v,
                    has_edges: !inc[v].is_empty(),
                    constraints,
                }
            })
            .collect();
        HomSearch {
            pattern,
            target,
            steps,
            injective: false,
            domains: None,
        }
    }

    pub(crate) fn injective(mut self, yes: bool) -> Self {
        self.injective = yes;
        self
    }

    /// Restricts pattern vertex `v` to the sorted list `domains[v]`.
    pub(crate) fn with_domains(mut self, domains: Vec<Option<Vec<usize>>>) -> Self {
        let domains = domains
            .into_iter()
            .map(|d| {
                d.map(|mut list| {
                    list.sort_unstable();
                    list.dedup();
                    list
                })
            })
            .collect();
        self.domains = Some(domains);
        self
    }

    fn fresh_state(&self) -> State {
        State {
            image: vec![usize::MAX; self.pattern.n_vertices()],
            edge_sets: vec![usize::MAX; self.pattern.n_edges()],
            used: vec![false; self.target.n],
        }
    }

    /// Visits every homomorphism in search order. The callback receives the
    /// image array and, per pattern edge, the id of its image edge set.
    pub(crate) fn run<F>(&self, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    {
        let mut state = self.fresh_state();
        self.descend(0, &mut state, &mut visit)
    }

    /// Candidate images of the first vertex in search order.
    fn first_candidates(&self) -> Vec<usize> {
        let mut state = self.fresh_state();
        match self.steps.first() {
            Some(_) => self.candidates(0, &mut state).unwrap_or_default(),
            None => Vec::new(),
        }
    }

    /// Runs the subtree where the first vertex maps to `x`.
    fn run_from<F>(&self, x: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    {
        let mut state = self.fresh_state();
        self.try_assign(0, x, &mut state, visit)
    }

    /// Sums `leaf` over all homomorphisms, splitting the first level across
    /// worker threads.
    pub(crate) fn par_sum<T, L>(&self, leaf: L) -> T
    where
        T: Weight,
        L: Fn(&[usize], &[usize]) -> T + Sync,
    {
        if self.steps.is_empty() {
            return leaf(&[], &[]);
        }
        let firsts = self.first_candidates();
        let partials: Vec<T> = parallel::install(|| {
            firsts
                .par_iter()
                .map(|&x| {
                    let mut acc = T::empty_sum();
                    let _ = self.run_from(x, &mut |img: &[usize], sets: &[usize]| {
                        acc.add_assign_ref(&leaf(img, sets));
                        ControlFlow::Continue(())
                    });
                    acc
                })
                .collect()
        });
        partials.iter().fold(T::empty_sum(), |mut acc, p| {
            acc.add_assign_ref(p);
            acc
        })
    }

    fn descend<F>(&self, k: usize, state: &mut State, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    {
        if k == self.steps.len() {
            return visit(&state.image, &state.edge_sets);
        }
        let Some(cands) = self.candidates(k, state) else {
            return ControlFlow::Continue(());
        };
        for x in cands {
            self.try_assign(k, x, state, visit)?;
        }
        ControlFlow::Continue(())
    }

    fn try_assign<F>(&self, k: usize, x: usize, state: &mut State, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    {
        let step = &self.steps[k];
        let v = step.vertex;
        state.image[v] = x;
        let mut ok = true;
        let mut buf = Vec::with_capacity(self.target.r);
        for c in step.constraints.iter().filter(|c| c.closes) {
            buf.clear();
            buf.extend(self.pattern.edges()[c.edge].iter().map(|&u| state.image[u]));
            buf.sort_unstable();
            match self.target.lookup(&buf) {
                Some(id) => state.edge_sets[c.edge] = id,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let mut flow = ControlFlow::Continue(());
        if ok {
            if self.injective {
                state.used[x] = true;
            }
            flow = self.descend(k + 1, state, visit);
            if self.injective {
                state.used[x] = false;
            }
        }
        state.image[v] = usize::MAX;
        flow
    }

    /// Sorted candidate images for step `k`, or `None` when some edge
    /// constraint already rules out every target vertex.
    fn candidates(&self, k: usize, state: &mut State) -> Option<Vec<usize>> {
        let step = &self.steps[k];
        let mut lists: Vec<&[usize]> = Vec::new();
        let mut forbidden: Vec<usize> = Vec::new();
        for c in &step.constraints {
            if c.earlier.is_empty() {
                continue;
            }
            let mut key: Vec<usize> = c.earlier.iter().map(|&u| state.image[u]).collect();
            key.sort_unstable();
            if key.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
            if self.target.is_indexed(key.len()) {
                lists.push(self.target.extend.get(&key)?.as_slice());
            }
            forbidden.extend(key);
        }
        let domain = self
            .domains
            .as_ref()
            .and_then(|d| d[step.vertex].as_deref());
        let all: Vec<usize>;
        let base: &[usize] = match lists.iter().min_by_key(|l| l.len()) {
            Some(l) => l,
            None => match domain {
                Some(d) => d,
                None if step.has_edges => &self.target.active,
                None => {
                    all = (0..self.target.n).collect();
                    &all
                }
            },
        };
        let out = base
            .iter()
            .copied()
            .filter(|x| lists.iter().all(|l| l.binary_search(x).is_ok()))
            .filter(|x| domain.is_none_or(|d| d.binary_search(x).is_ok()))
            .filter(|x| !forbidden.contains(x))
            .filter(|&x| !(self.injective && state.used[x]))
            .collect();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{grid, single_edge};

    #[test]
    fn order_starts_at_max_degree() {
        let star = crate::structures::star(3);
        assert_eq!(search_order(&star), vec![0, 1, 2, 3]);
        let h = Hypergraph::new(2, 4, vec![vec![0, 1], vec![1, 2], vec![1, 3]]).unwrap();
        assert_eq!(search_order(&h)[0], 1);
    }

    #[test]
    fn counts_grid_into_edge() {
        let g = grid(3).unwrap();
        let t = single_edge(3);
        let idx = TargetIndex::new(&t);
        let search = HomSearch::new(&g, &idx);
        let mut count = 0;
        let _ = search.run(|_, _| {
            count += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(count, 12);
        assert_eq!(search.par_sum(|_, _| 1u128), 12);
    }
}
