//! Symmetric tensors as weighted sums of `r`-th powers of vectors, the
//! odd-order rescaling that absorbs the weights, and the passage between a
//! step function on `H` and one on its Levi graph.

mod linalg;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::density::engine::{pattern_sum, Table};
use crate::density::{density_bip_interval, density_sym, multisets, orderings, BipStepFunction, SymStepFunction};
use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, format_rational, odd_root_enclosure, Interval, Rational};
use crate::structures::io::{get_rational_array, get_usize};
use crate::structures::{levi, Hypergraph};

/// Resampling rounds before the generic sampler gives up.
pub const RESAMPLE_CAP: usize = 100;
pub const DEFAULT_BITS: u32 = 128;
pub const MAX_BITS: u32 = 4096;
/// Largest dimension `binomial(n+r-1, r)` handled by the generic solve in
/// [`transfer_witness`]; bigger tensors use [`decompose_sparse`].
pub const GENERIC_DIMENSION_MAX: usize = 120;
/// Largest enumeration the direct interval density may run.
const DIRECT_DENSITY_MAX: f64 = 4.0e6;

/// `a = Σ_j λ_j (b_j)^{⊗r}` with columns `b_j ∈ Q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    n: usize,
    r: usize,
    lambda: Vec<Rational>,
    columns: Vec<Vec<Rational>>,
}

impl Decomposition {
    pub fn new(n: usize, r: usize, lambda: Vec<Rational>, columns: Vec<Vec<Rational>>) -> Result<Self> {
        if r == 0 || n == 0 || lambda.is_empty() {
            return Err(Error::InvalidParameter("decompositions need n, r, N >= 1".into()));
        }
        if lambda.len() != columns.len() || columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter("lambda and B have inconsistent shapes".into()));
        }
        Ok(Decomposition { n, r, lambda, columns })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of terms `N`.
    pub fn n_terms(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn column(&self, j: usize) -> &[Rational] {
        &self.columns[j]
    }

    pub fn b(&self, i: usize, j: usize) -> &Rational {
        &self.columns[j][i]
    }

    /// `{"n","r","N","lambda":["p/q",..],"B":[[row 0],..]}` with `B` of
    /// shape `n x N`.
    pub fn to_value(&self) -> Value {
        let lambda: Vec<String> = self.lambda.iter().map(format_rational).collect();
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| self.columns.iter().map(|c| format_rational(&c[i])).collect())
            .collect();
        json!({"n": self.n, "r": self.r, "N": self.n_terms(), "lambda": lambda, "B": rows})
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let n = get_usize(value, "n", "$")?;
        let r = get_usize(value, "r", "$")?;
        let terms = get_usize(value, "N", "$")?;
        let lambda = get_rational_array(
            value.get("lambda").ok_or_else(|| Error::malformed("$", "missing field \"lambda\""))?,
            "$.lambda",
        )?;
        let rows = value
            .get("B")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::malformed("$.B", "expected an array of rows"))?;
        if rows.len() != n {
            return Err(Error::malformed("$.B", format!("expected {n} rows, found {}", rows.len())));
        }
        let mut columns = vec![Vec::with_capacity(n); terms];
        for (i, row) in rows.iter().enumerate() {
            let row = get_rational_array(row, &format!("$.B[{i}]"))?;
            if row.len() != terms {
                return Err(Error::malformed(format!("$.B[{i}]"), format!("expected {terms} entries")));
            }
            for (j, v) in row.into_iter().enumerate() {
                columns[j].push(v);
            }
        }
        if lambda.len() != terms {
            return Err(Error::malformed("$.lambda", format!("expected {terms} coefficients")));
        }
        Decomposition::new(n, r, lambda, columns).map_err(|e| Error::malformed("$", e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }
}

/// `∏_{i ∈ m} b_i`.
fn power_entry(b: &[Rational], m: &[usize]) -> Rational {
    m.iter().map(|&i| &b[i]).product()
}

fn sample_vector(rng: &mut ChaCha8Rng, n: usize, span: i64) -> Vec<Rational> {
    (0..n)
        .map(|_| Rational::from_integer(rng.gen_range(-span..=span).into()))
        .collect()
}

fn require_uniform(a: &SymStepFunction) -> Result<()> {
    if a.measures().is_some() {
        return Err(Error::Precondition("decomposition needs uniform part measures".into()));
    }
    Ok(())
}

/// [`decompose_seeded`] with seed 0.
pub fn decompose(a: &SymStepFunction) -> Result<Decomposition> {
    decompose_seeded(a, 0)
}

/// Samples `N = binomial(n+r-1, r)` integer vectors with entries in
/// `[-rn, rn]` whose `r`-th powers span the symmetric tensors, resampling
/// dependent ones, then solves for `λ` exactly.
pub fn decompose_seeded(a: &SymStepFunction, seed: u64) -> Result<Decomposition> {
    require_uniform(a)?;
    let (n, r) = (a.n(), a.r());
    let keys = multisets(n, r);
    let dim = keys.len();
    debug_assert_eq!(dim, binomial(n + r - 1, r));
    let span = (r * n) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors: Vec<Vec<Rational>> = (0..dim).map(|_| sample_vector(&mut rng, n, span)).collect();
    let matrix_of = |vectors: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        keys.iter()
            .map(|m| vectors.iter().map(|v| power_entry(v, m)).collect())
            .collect()
    };
    let mut rounds = 0;
    let matrix = loop {
        let matrix = matrix_of(&vectors);
        let pivots = linalg::pivot_columns(&matrix);
        if pivots.len() == dim {
            break matrix;
        }
        rounds += 1;
        if rounds > RESAMPLE_CAP {
            return Err(Error::Internal(format!(
                "power vectors failed to span after {RESAMPLE_CAP} resampling rounds"
            )));
        }
        let mut is_pivot = vec![false; dim];
        for p in pivots {
            is_pivot[p] = true;
        }
        for (j, v) in vectors.iter_mut().enumerate() {
            if !is_pivot[j] {
                *v = sample_vector(&mut rng, n, span);
            }
        }
    };
    let rhs: Vec<Rational> = keys.iter().map(|m| a.get(m)).collect();
    let lambda = linalg::solve(&matrix, &rhs).ok_or_else(|| Error::Internal("full-rank system did not solve".into()))?;
    Decomposition::new(n, r, lambda, vectors)
}

/// Decomposition by polarization: each nonzero entry on the multiset
/// `{i_1, ..., i_r}` contributes the `2^{r-1}` vectors
/// `e_{i_1} ± e_{i_2} ± ... ± e_{i_r}`. The number of terms grows with the
/// support instead of with `n`.
pub fn decompose_sparse(a: &SymStepFunction) -> Result<Decomposition> {
    require_uniform(a)?;
    let (n, r) = (a.n(), a.r());
    if r > 20 {
        return Err(Error::InvalidParameter(format!("polarization needs r <= 20, got {r}")));
    }
    let signs = 1usize << (r - 1);
    let denom = Rational::from_integer(BigInt::from(signs) * BigInt::from(factorial(r)));
    let mut lambda = Vec::with_capacity(a.nnz() * signs);
    let mut columns = Vec::with_capacity(a.nnz() * signs);
    for (m, value) in a.support() {
        let base = value * Rational::from_integer(orderings(m).into()) / &denom;
        for mask in 0..signs {
            let mut b = vec![Rational::zero(); n];
            b[m[0]] += Rational::one();
            let mut negative = false;
            for (k, &i) in m.iter().enumerate().skip(1) {
                if mask >> (k - 1) & 1 == 1 {
                    b[i] -= Rational::one();
                    negative = !negative;
                } else {
                    b[i] += Rational::one();
                }
            }
            lambda.push(if negative { -base.clone() } else { base.clone() });
            columns.push(b);
        }
    }
    if lambda.is_empty() {
        lambda.push(Rational::zero());
        columns.push(vec![Rational::zero(); n]);
    }
    Decomposition::new(n, r, lambda, columns)
}

/// Multisets of size `r` drawn from `support`, as sorted index vectors.
fn multisets_within(support: &[usize], r: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    multisets(support.len(), r)
        .into_iter()
        .map(move |m| m.into_iter().map(|k| support[k]).collect())
}

/// `Σ_j λ_j (b_j)^{⊗r}`.
pub fn reconstruct(d: &Decomposition) -> SymStepFunction {
    let mut acc: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for (lambda, b) in d.lambda.iter().zip(&d.columns) {
        if lambda.is_zero() {
            continue;
        }
        let support: Vec<usize> = (0..d.n).filter(|&i| !b[i].is_zero()).collect();
        for m in multisets_within(&support, d.r) {
            let v = lambda * power_entry(b, &m);
            *acc.entry(m).or_insert_with(Rational::zero) += v;
        }
    }
    SymStepFunction::from_entries(d.r, d.n, acc).expect("shape checked on construction")
}

/// Odd-order rescaling `c_ij = sign(λ_j)·|N λ_j|^{1/r}·b_ij`, each entry an
/// interval enclosing the real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RescaledDecomposition {
    n: usize,
    r: usize,
    terms: usize,
    bits: u32,
    c: Vec<Interval>,
}

impl RescaledDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n_terms(&self) -> usize {
        self.terms
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn c(&self, i: usize, j: usize) -> &Interval {
        &self.c[i * self.terms + j]
    }

    /// Largest entry width.
    pub fn error_bound(&self) -> Rational {
        self.c.iter().map(Interval::width).max().unwrap_or_else(Rational::zero)
    }

    /// The `n x N` real-mode step function.
    pub fn to_bip(&self) -> BipStepFunction {
        BipStepFunction::real(self.n, self.terms, self.c.clone()).expect("shape fixed")
    }

    /// Largest distance from an exact tensor entry to the far end of the
    /// enclosure of the induced tensor, over all entries.
    pub fn reconstruction_error(&self, exact: &SymStepFunction) -> Result<Rational> {
        let induced = induced_sym_enclosure(&self.to_bip(), self.r)?;
        let mut worst = Rational::zero();
        for (m, iv) in &induced {
            let a = exact.get(m);
            worst = worst.max((&iv.lo - &a).abs()).max((&iv.hi - &a).abs());
        }
        for (m, a) in exact.support() {
            if !induced.contains_key(m) {
                worst = worst.max(a.abs());
            }
        }
        Ok(worst)
    }
}

/// Absorbs `λ` into the columns by real `r`-th roots, which exist for every
/// sign only when `r` is odd. `bits` sets the relative width of each root.
pub fn rescale_odd(d: &Decomposition, bits: u32) -> Result<RescaledDecomposition> {
    if d.r.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "rescaling needs odd r, got {}; negative weights have no even root",
            d.r
        )));
    }
    let terms = d.n_terms();
    let big_n = Rational::from_integer(terms.into());
    let roots: Vec<Interval> = d
        .lambda
        .iter()
        .map(|l| odd_root_enclosure(&(&big_n * l), d.r as u32, bits))
        .collect();
    let mut c = Vec::with_capacity(d.n * terms);
    for i in 0..d.n {
        for (j, root) in roots.iter().enumerate() {
            c.push(root.scale(&d.columns[j][i]));
        }
    }
    Ok(RescaledDecomposition {
        n: d.n,
        r: d.r,
        terms,
        bits,
        c,
    })
}

/// `a_{i_1..i_r} = (1/N) Σ_j c_{i_1 j} ⋯ c_{i_r j}` for an exact `f`.
pub fn induced_sym(f: &BipStepFunction, r: usize) -> Result<SymStepFunction> {
    let c = f
        .exact_entries()
        .ok_or_else(|| Error::Precondition("exact induced tensor needs an exact step function".into()))?;
    let (n, cols) = (f.n(), f.n_cols());
    let mut acc: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for j in 0..cols {
        let col: Vec<Rational> = (0..n).map(|i| c[i * cols + j].clone()).collect();
        let support: Vec<usize> = (0..n).filter(|&i| !col[i].is_zero()).collect();
        for m in multisets_within(&support, r) {
            let v = power_entry(&col, &m);
            *acc.entry(m).or_insert_with(Rational::zero) += v;
        }
    }
    let scale = Rational::new(BigInt::one(), cols.into());
    SymStepFunction::from_entries(r, n, acc.into_iter().map(|(k, v)| (k, v * &scale)))
}

/// Enclosures of the induced tensor on every multiset lying inside some
/// column's support; all other entries are exactly zero.
pub fn induced_sym_enclosure(f: &BipStepFunction, r: usize) -> Result<BTreeMap<Vec<usize>, Interval>> {
    if r == 0 {
        return Err(Error::InvalidParameter("arity must be positive".into()));
    }
    let (n, cols) = (f.n(), f.n_cols());
    let mut acc: BTreeMap<Vec<usize>, Interval> = BTreeMap::new();
    for j in 0..cols {
        let col: Vec<Interval> = (0..n).map(|i| f.get(i, j)).collect();
        let support: Vec<usize> = (0..n).filter(|&i| !(col[i].lo.is_zero() && col[i].hi.is_zero())).collect();
        for m in multisets_within(&support, r) {
            let v = m.iter().skip(1).fold(col[m[0]].clone(), |p, &i| &p * &col[i]);
            let slot = acc.entry(m).or_insert_with(Interval::zero);
            *slot = &*slot + &v;
        }
    }
    let scale = Rational::new(BigInt::one(), cols.into());
    Ok(acc.into_iter().map(|(k, v)| (k, v.scale(&scale))).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferRoute {
    /// Interval density evaluated on the Levi graph itself.
    Direct,
    /// Exact density on `H` widened by a forward error bound.
    Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferOptions {
    pub bits: u32,
    pub max_bits: u32,
    pub seed: u64,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions {
            bits: DEFAULT_BITS,
            max_bits: MAX_BITS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransferWitness {
    pub decomposition: Decomposition,
    pub rescaled: RescaledDecomposition,
    /// The asymmetric step function for the Levi graph (real mode).
    pub witness: BipStepFunction,
    /// Encloses `t_{L(H)}(f)` for every `f` inside the witness entries.
    pub density: Interval,
    /// `t_H(h)`, computed exactly.
    pub exact_density: Rational,
    pub bits: u32,
    pub route: TransferRoute,
}

/// Turns a symmetric step function with `t_H(h) < 0` (for odd `r`) into an
/// asymmetric one with `t_{L(H)}(f) < 0`, certified by an interval.
///
/// Precision doubles from `options.bits` while the interval still meets
/// zero; past `options.max_bits` the result is [`Error::Inconclusive`].
pub fn transfer_witness(h: &Hypergraph, a: &SymStepFunction, options: TransferOptions) -> Result<TransferWitness> {
    let r = h.r();
    if r.is_multiple_of(2) {
        return Err(Error::Precondition(format!("witness transfer needs odd r, got {r}")));
    }
    if a.r() != r {
        return Err(Error::UniformityMismatch { left: r, right: a.r() });
    }
    require_uniform(a)?;
    let exact_density = density_sym(h, a)?;
    if !exact_density.is_negative() {
        return Err(Error::Precondition(format!(
            "density is {}, not negative",
            format_rational(&exact_density)
        )));
    }
    let decomposition = if binomial(a.n() + r - 1, r) <= GENERIC_DIMENSION_MAX {
        decompose_seeded(a, options.seed)?
    } else {
        decompose_sparse(a)?
    };
    if reconstruct(&decomposition) != *a {
        return Err(Error::Internal("decomposition does not reproduce the tensor".into()));
    }
    let levi_graph = levi(h);
    let terms = decomposition.n_terms();
    let cost_rows = (a.n() as f64).ln() * h.n_vertices() as f64;
    let cost_cols = (terms as f64).ln() * h.n_edges() as f64;
    let route = if cost_rows.min(cost_cols) <= DIRECT_DENSITY_MAX.ln() {
        TransferRoute::Direct
    } else {
        TransferRoute::Bound
    };
    let weak_count = match route {
        TransferRoute::Direct => BigInt::zero(),
        TransferRoute::Bound => weak_support_count(h, &decomposition)?,
    };
    let mut bits = options.bits.max(1);
    loop {
        let rescaled = rescale_odd(&decomposition, bits)?;
        let witness = rescaled.to_bip();
        let density = match route {
            TransferRoute::Direct => density_bip_interval(&levi_graph, &witness),
            TransferRoute::Bound => bound_density(h, a, &exact_density, &witness, &weak_count)?,
        };
        if density.strictly_negative() {
            return Ok(TransferWitness {
                decomposition,
                rescaled,
                witness,
                density,
                exact_density,
                bits,
                route,
            });
        }
        if bits >= options.max_bits {
            return Err(Error::Inconclusive(format!(
                "density enclosure {density} still meets zero at {bits} bits"
            )));
        }
        bits = (bits * 2).min(options.max_bits);
    }
}

/// Number of maps `V(H) -> [n]` sending every edge onto a multiset inside
/// the support of some column.
fn weak_support_count(h: &Hypergraph, d: &Decomposition) -> Result<BigInt> {
    let mut keys: std::collections::BTreeSet<Vec<usize>> = Default::default();
    for (lambda, b) in d.lambda.iter().zip(&d.columns) {
        if lambda.is_zero() {
            continue;
        }
        let support: Vec<usize> = (0..d.n).filter(|&i| !b[i].is_zero()).collect();
        keys.extend(multisets_within(&support, d.r));
    }
    let table = Table::new(d.r, d.n, keys.into_iter().map(|k| (k, BigInt::one())))?;
    pattern_sum(h, &table, None)
}

/// `t_H(a) ± W·((M+δ)^e - M^e)/n^v`, where `W` counts the maps on which the
/// perturbed tensor can be nonzero, `M` bounds `|a|` and `δ` bounds the
/// entrywise distance between `a` and the induced enclosure.
fn bound_density(
    h: &Hypergraph,
    a: &SymStepFunction,
    exact: &Rational,
    witness: &BipStepFunction,
    weak_count: &BigInt,
) -> Result<Interval> {
    let induced = induced_sym_enclosure(witness, a.r())?;
    let mut delta = Rational::zero();
    for (m, iv) in &induced {
        let v = a.get(m);
        delta = delta.max((&iv.lo - &v).abs()).max((&iv.hi - &v).abs());
    }
    if a.support().keys().any(|m| !induced.contains_key(m)) {
        return Err(Error::Internal("witness support misses a tensor entry".into()));
    }
    let big_m = a.max_abs();
    let e = h.n_edges();
    let spread = num_traits::pow(&big_m + &delta, e) - num_traits::pow(big_m, e);
    let maps = Rational::from_integer(num_traits::pow(BigInt::from(a.n()), h.n_vertices()));
    let radius = Rational::from_integer(weak_count.clone()) * spread / maps;
    Ok(Interval::point(exact.clone()).widen(&radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::structures::{grid, single_edge};

    fn diagonal() -> SymStepFunction {
        SymStepFunction::from_entries(3, 2, [(vec![0, 0, 0], int(1)), (vec![1, 1, 1], int(1))]).unwrap()
    }

    #[test]
    fn generic_round_trip() {
        let a = diagonal();
        let d = decompose(&a).unwrap();
        assert_eq!(d.n_terms(), 4);
        assert_eq!(reconstruct(&d), a);
        let zero = SymStepFunction::zero(3, 3).unwrap();
        let d = decompose(&zero).unwrap();
        assert!(d.lambda().iter().all(Zero::is_zero));
    }

    #[test]
    fn sparse_round_trip() {
        let a = SymStepFunction::from_entries(3, 4, [(vec![0, 1, 3], int(-1)), (vec![2, 2, 1], rat(1, 2))]).unwrap();
        let d = decompose_sparse(&a).unwrap();
        assert_eq!(d.n_terms(), 8);
        assert_eq!(reconstruct(&d), a);
    }

    #[test]
    fn reconstruct_single_term() {
        let d = Decomposition::new(2, 3, vec![int(2)], vec![vec![int(1), int(1)]]).unwrap();
        let a = reconstruct(&d);
        assert!(multisets(2, 3).iter().all(|m| a.get(m) == int(2)));
    }

    #[test]
    fn rescaling_exact_roots() {
        let d = Decomposition::new(2, 3, vec![rat(-8, 1)], vec![vec![int(1), int(0)]]).unwrap();
        let c = rescale_odd(&d, 64).unwrap();
        assert_eq!(c.c(0, 0), &Interval::point(int(-2)));
        assert_eq!(c.c(1, 0), &Interval::zero());
        let even = Decomposition::new(1, 2, vec![int(1)], vec![vec![int(1)]]).unwrap();
        assert!(rescale_odd(&even, 64).is_err());
    }

    #[test]
    fn induced_sign_pattern() {
        let f = BipStepFunction::from_rows(vec![vec![int(1)], vec![int(-1)]]).unwrap();
        let a = induced_sym(&f, 3).unwrap();
        for m in multisets(2, 3) {
            let ones = m.iter().filter(|&&i| i == 1).count() as i32;
            assert_eq!(a.get(&m), int((-1i64).pow(ones as u32)));
        }
    }

    #[test]
    fn json_round_trip() {
        let d = decompose(&diagonal()).unwrap();
        assert_eq!(Decomposition::parse(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn single_edge_witness() {
        let a = SymStepFunction::constant(3, 1, int(-1)).unwrap();
        let w = transfer_witness(&single_edge(3), &a, TransferOptions::default()).unwrap();
        assert!(w.density.strictly_negative());
        assert!(w.density.contains(&int(-1)));
        assert_eq!(w.route, TransferRoute::Direct);
    }

    #[test]
    fn rejects_nonnegative_density() {
        let a = SymStepFunction::constant(3, 1, int(1)).unwrap();
        assert!(matches!(
            transfer_witness(&grid(3).unwrap(), &a, TransferOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
