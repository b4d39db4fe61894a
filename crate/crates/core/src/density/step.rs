use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Interval, Rational};
use crate::structures::io::{get_rational, get_rational_array, get_usize};

/// Largest `n^r` written out as a flat array; bigger tensors use `support`.
pub const FLAT_JSON_MAX: usize = 1 << 20;

/// Nondecreasing `r`-tuples over `[n]` in lexicographic order.
pub fn multisets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0usize; r];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] + 1 < n) else {
            return out;
        };
        let next = cur[i] + 1;
        for slot in &mut cur[i..] {
            *slot = next;
        }
    }
}

/// Number of distinct orderings of a sorted multiset.
pub fn orderings(sorted: &[usize]) -> u128 {
    let mut count = crate::rational::factorial(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let j = (i..sorted.len()).find(|&j| sorted[j] != sorted[i]).unwrap_or(sorted.len());
        count /= crate::rational::factorial(j - i);
        i = j;
    }
    count
}

/// Row-major successor of a tuple over `[n]`, wrapping to all zeros.
fn advance(idx: &mut [usize], n: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return;
        }
        *slot = 0;
    }
}

fn pow_usize(n: usize, r: usize) -> Option<usize> {
    (0..r).try_fold(1usize, |acc, _| acc.checked_mul(n))
}

/// Symmetric step function of arity `r` with `n` parts, stored sparsely by
/// sorted index multiset. Parts have measure `1/n` unless a measure vector
/// is attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymStepFunction {
    r: usize,
    n: usize,
    entries: BTreeMap<Vec<usize>, Rational>,
    measures: Option<Vec<Rational>>,
}

impl SymStepFunction {
    pub fn zero(r: usize, n: usize) -> Result<Self> {
        if r == 0 || n == 0 {
            return Err(Error::InvalidParameter("step functions need r >= 1 and n >= 1".into()));
        }
        Ok(SymStepFunction {
            r,
            n,
            entries: BTreeMap::new(),
            measures: None,
        })
    }

    pub fn constant(r: usize, n: usize, value: Rational) -> Result<Self> {
        Self::from_fn(r, n, |_| value.clone())
    }

    /// Evaluates `value` once per sorted index multiset.
    pub fn from_fn(r: usize, n: usize, mut value: impl FnMut(&[usize]) -> Rational) -> Result<Self> {
        let mut out = Self::zero(r, n)?;
        for key in multisets(n, r) {
            let v = value(&key);
            if !v.is_zero() {
                out.entries.insert(key, v);
            }
        }
        Ok(out)
    }

    /// From entries keyed by any ordering of the index tuple. Later keys
    /// that sort to the same multiset overwrite earlier ones.
    pub fn from_entries(
        r: usize,
        n: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Result<Self> {
        let mut out = Self::zero(r, n)?;
        for (idx, v) in entries {
            out.set(&idx, v)?;
        }
        Ok(out)
    }

    /// From a row-major flat array of length `n^r`; rejects asymmetric input.
    pub fn from_flat(r: usize, n: usize, flat: &[Rational]) -> Result<Self> {
        let total = pow_usize(n, r).ok_or_else(|| Error::InvalidParameter("tensor too large".into()))?;
        if flat.len() != total {
            return Err(Error::InvalidParameter(format!(
                "expected {total} entries for n = {n}, r = {r}, found {}",
                flat.len()
            )));
        }
        let mut out = Self::zero(r, n)?;
        let mut idx = vec![0usize; r];
        let mut positions = Vec::with_capacity(total);
        for value in flat {
            if idx.windows(2).all(|w| w[0] <= w[1]) && !value.is_zero() {
                out.entries.insert(idx.clone(), value.clone());
            }
            positions.push(idx.clone());
            advance(&mut idx, n);
        }
        for (idx, value) in positions.into_iter().zip(flat) {
            if out.get(&idx) != *value {
                return Err(Error::NotSymmetric(idx));
            }
        }
        Ok(out)
    }

    /// Row-major flat array of length `n^r`.
    pub fn to_flat(&self) -> Vec<Rational> {
        let total = pow_usize(self.n, self.r).expect("tensor too large to flatten");
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.r];
        for _ in 0..total {
            out.push(self.get(&idx));
            advance(&mut idx, self.n);
        }
        out
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, idx: &[usize]) -> Rational {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sets every ordering of `idx` to `value`.
    pub fn set(&mut self, idx: &[usize], value: Rational) -> Result<()> {
        if idx.len() != self.r {
            return Err(Error::InvalidParameter(format!("index of length {} for arity {}", idx.len(), self.r)));
        }
        if let Some(&x) = idx.iter().find(|&&x| x >= self.n) {
            return Err(Error::InvalidParameter(format!("index {x} outside size {}", self.n)));
        }
        let mut key = idx.to_vec();
        key.sort_unstable();
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// Nonzero entries by sorted multiset.
    pub fn support(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn max_abs(&self) -> Rational {
        self.entries.values().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }

    /// Attaches part measures; they must be positive and sum to one.
    pub fn with_measures(mut self, measures: Vec<Rational>) -> Result<Self> {
        if measures.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "{} measures for {} parts",
                measures.len(),
                self.n
            )));
        }
        if measures.iter().any(|m| !m.is_positive()) {
            return Err(Error::InvalidParameter("part measures must be positive".into()));
        }
        if measures.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::InvalidParameter("part measures must sum to 1".into()));
        }
        let uniform = Rational::new(1.into(), self.n.into());
        self.measures = if measures.iter().all(|m| *m == uniform) {
            None
        } else {
            Some(measures)
        };
        Ok(self)
    }

    /// Explicit measures, `None` when uniform.
    pub fn measures(&self) -> Option<&[Rational]> {
        self.measures.as_deref()
    }

    pub fn measure_vector(&self) -> Vec<Rational> {
        match &self.measures {
            Some(m) => m.clone(),
            None => vec![Rational::new(1.into(), self.n.into()); self.n],
        }
    }

    /// Renames part `i` to `perm[i]`, carrying entries and measures along.
    pub fn permute_parts(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation of the parts".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| {
                let mut key: Vec<usize> = k.iter().map(|&i| perm[i]).collect();
                key.sort_unstable();
                (key, v.clone())
            })
            .collect();
        let measures = self.measures.as_ref().map(|m| {
            let mut out = vec![Rational::zero(); self.n];
            for (i, v) in m.iter().enumerate() {
                out[perm[i]] = v.clone();
            }
            out
        });
        Ok(SymStepFunction {
            r: self.r,
            n: self.n,
            entries,
            measures,
        })
    }

    /// `{"r","n","entries":[flat row-major],"measures"?}`; tensors with more
    /// than [`FLAT_JSON_MAX`] cells write `"support": [[[i,..], "p/q"], ..]`
    /// instead of `"entries"`.
    pub fn to_value(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("r".into(), json!(self.r));
        obj.insert("n".into(), json!(self.n));
        if pow_usize(self.n, self.r).is_some_and(|t| t <= FLAT_JSON_MAX) {
            let flat: Vec<String> = self.to_flat().iter().map(format_rational).collect();
            obj.insert("entries".into(), json!(flat));
        } else {
            let support: Vec<Value> = self
                .entries
                .iter()
                .map(|(k, v)| json!([k, format_rational(v)]))
                .collect();
            obj.insert("support".into(), Value::Array(support));
        }
        if let Some(m) = &self.measures {
            let m: Vec<String> = m.iter().map(format_rational).collect();
            obj.insert("measures".into(), json!(m));
        }
        Value::Object(obj)
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::malformed("$", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "r" | "n" | "entries" | "support" | "measures") {
                return Err(Error::malformed(format!("$.{key}"), "unknown field"));
            }
        }
        let r = get_usize(value, "r", "$")?;
        let n = get_usize(value, "n", "$")?;
        let mut out = match (obj.get("entries"), obj.get("support")) {
            (Some(flat), None) => {
                let flat = get_rational_array(flat, "$.entries")?;
                Self::from_flat(r, n, &flat).map_err(|e| Error::malformed("$.entries", e.to_string()))?
            }
            (None, Some(support)) => {
                let items = support
                    .as_array()
                    .ok_or_else(|| Error::malformed("$.support", "expected an array"))?;
                let mut out = Self::zero(r, n)?;
                for (i, item) in items.iter().enumerate() {
                    let at = format!("$.support[{i}]");
                    let pair = item
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::malformed(&at, "expected [index, value]"))?;
                    let idx: Vec<usize> = serde_json::from_value(pair[0].clone())
                        .map_err(|e| Error::malformed(format!("{at}[0]"), e.to_string()))?;
                    let v = get_rational(&pair[1], &format!("{at}[1]"))?;
                    out.set(&idx, v).map_err(|e| Error::malformed(&at, e.to_string()))?;
                }
                out
            }
            _ => return Err(Error::malformed("$", "exactly one of \"entries\" and \"support\" expected")),
        };
        if let Some(m) = obj.get("measures").filter(|m| !m.is_null()) {
            let m = get_rational_array(m, "$.measures")?;
            out = out
                .with_measures(m)
                .map_err(|e| Error::malformed("$.measures", e.to_string()))?;
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }
}

/// Entries of an asymmetric step function: exact, or enclosed reals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BipEntries {
    Exact(Vec<Rational>),
    Real(Vec<Interval>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Real,
}

/// Two-variable step function: `n` row parts of measure `1/n`, `N` column
/// parts of measure `1/N`, entries row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipStepFunction {
    rows: usize,
    cols: usize,
    entries: BipEntries,
}

impl BipStepFunction {
    fn check_shape(rows: usize, cols: usize, len: usize) -> Result<()> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("step function dimensions must be positive".into()));
        }
        if rows.checked_mul(cols) != Some(len) {
            return Err(Error::InvalidParameter(format!(
                "{len} entries for a {rows}x{cols} step function"
            )));
        }
        Ok(())
    }

    pub fn exact(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        Self::check_shape(rows, cols, entries.len())?;
        Ok(BipStepFunction {
            rows,
            cols,
            entries: BipEntries::Exact(entries),
        })
    }

    pub fn real(rows: usize, cols: usize, entries: Vec<Interval>) -> Result<Self> {
        Self::check_shape(rows, cols, entries.len())?;
        Ok(BipStepFunction {
            rows,
            cols,
            entries: BipEntries::Real(entries),
        })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::exact(n, cols, rows.into_iter().flatten().collect())
    }

    /// Row count `n`.
    pub fn n(&self) -> usize {
        self.rows
    }

    /// Column count `N`.
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn mode(&self) -> Mode {
        match self.entries {
            BipEntries::Exact(_) => Mode::Exact,
            BipEntries::Real(_) => Mode::Real,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.mode() == Mode::Exact
    }

    pub fn entries(&self) -> &BipEntries {
        &self.entries
    }

    pub fn exact_entries(&self) -> Option<&[Rational]> {
        match &self.entries {
            BipEntries::Exact(e) => Some(e),
            BipEntries::Real(_) => None,
        }
    }

    /// Entries as intervals; exact entries become points.
    pub fn interval_entries(&self) -> Vec<Interval> {
        match &self.entries {
            BipEntries::Exact(e) => e.iter().cloned().map(Interval::point).collect(),
            BipEntries::Real(e) => e.clone(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        let k = i * self.cols + j;
        match &self.entries {
            BipEntries::Exact(e) => Interval::point(e[k].clone()),
            BipEntries::Real(e) => e[k].clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        fn flip<T: Clone>(v: &[T], rows: usize, cols: usize) -> Vec<T> {
            (0..cols)
                .flat_map(|j| (0..rows).map(move |i| (i, j)))
                .map(|(i, j)| v[i * cols + j].clone())
                .collect()
        }
        let entries = match &self.entries {
            BipEntries::Exact(e) => BipEntries::Exact(flip(e, self.rows, self.cols)),
            BipEntries::Real(e) => BipEntries::Real(flip(e, self.rows, self.cols)),
        };
        BipStepFunction {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Largest entry width; zero in exact mode.
    pub fn max_width(&self) -> Rational {
        match &self.entries {
            BipEntries::Exact(_) => Rational::zero(),
            BipEntries::Real(e) => e.iter().map(Interval::width).max().unwrap_or_else(Rational::zero),
        }
    }

    /// `{"mode":"exact","n","N","entries":["p/q",..]}`, or in real mode
    /// `"entries":[["lo","hi"],..]`.
    pub fn to_value(&self) -> Value {
        let (mode, entries) = match &self.entries {
            BipEntries::Exact(e) => ("exact", json!(e.iter().map(format_rational).collect::<Vec<_>>())),
            BipEntries::Real(e) => (
                "real",
                json!(e
                    .iter()
                    .map(|i| [format_rational(&i.lo), format_rational(&i.hi)])
                    .collect::<Vec<_>>()),
            ),
        };
        json!({"mode": mode, "n": self.rows, "N": self.cols, "entries": entries})
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::malformed("$", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "mode" | "n" | "N" | "entries") {
                return Err(Error::malformed(format!("$.{key}"), "unknown field"));
            }
        }
        let rows = get_usize(value, "n", "$")?;
        let cols = get_usize(value, "N", "$")?;
        let mode = match obj.get("mode").map(|m| m.as_str()) {
            None | Some(Some("exact")) => Mode::Exact,
            Some(Some("real")) => Mode::Real,
            _ => return Err(Error::malformed("$.mode", "expected \"exact\" or \"real\"")),
        };
        let raw = obj
            .get("entries")
            .ok_or_else(|| Error::malformed("$", "missing field \"entries\""))?;
        let out = match mode {
            Mode::Exact => Self::exact(rows, cols, get_rational_array(raw, "$.entries")?),
            Mode::Real => {
                let items = raw
                    .as_array()
                    .ok_or_else(|| Error::malformed("$.entries", "expected an array"))?;
                let mut entries = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    let at = format!("$.entries[{i}]");
                    let pair = get_rational_array(item, &at)?;
                    if pair.len() != 2 || pair[0] > pair[1] {
                        return Err(Error::malformed(&at, "expected [lo, hi] with lo <= hi"));
                    }
                    let mut pair = pair.into_iter();
                    entries.push(Interval::new(pair.next().unwrap(), pair.next().unwrap()));
                }
                Self::real(rows, cols, entries)
            }
        };
        out.map_err(|e| Error::malformed("$", e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn multisets_in_lex_order() {
        assert_eq!(
            multisets(3, 2),
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]]
        );
        assert_eq!(multisets(4, 3).len(), 20);
        assert_eq!(orderings(&[0, 0, 1]), 3);
        assert_eq!(orderings(&[0, 1, 2]), 6);
    }

    #[test]
    fn flat_round_trip_and_symmetry_check() {
        let f = SymStepFunction::from_fn(3, 3, |k| int((k[0] + 2 * k[1] + 4 * k[2]) as i64 - 5)).unwrap();
        let flat = f.to_flat();
        assert_eq!(SymStepFunction::from_flat(3, 3, &flat).unwrap(), f);
        let mut bad = flat.clone();
        bad[1] = int(100);
        assert!(matches!(SymStepFunction::from_flat(3, 3, &bad), Err(Error::NotSymmetric(_))));
        let mut late = vec![int(0); 4];
        late[2] = int(1);
        assert!(SymStepFunction::from_flat(2, 2, &late).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = SymStepFunction::from_entries(2, 2, [(vec![1, 0], rat(-1, 2))])
            .unwrap()
            .with_measures(vec![rat(1, 3), rat(2, 3)])
            .unwrap();
        let text = f.to_json();
        assert_eq!(text, r#"{"r":2,"n":2,"entries":["0","-1/2","-1/2","0"],"measures":["1/3","2/3"]}"#);
        assert_eq!(SymStepFunction::parse(&text).unwrap(), f);
        assert!(SymStepFunction::parse(r#"{"r":2,"n":1,"entries":["1"],"measures":["1/2"]}"#).is_err());
    }

    #[test]
    fn uniform_measures_are_dropped() {
        let f = SymStepFunction::zero(2, 2).unwrap().with_measures(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert!(f.measures().is_none());
    }

    #[test]
    fn transpose_is_involutive() {
        let f = BipStepFunction::from_rows(vec![vec![int(1), int(2), int(3)], vec![int(4), int(5), int(6)]]).unwrap();
        let t = f.transpose();
        assert_eq!((t.n(), t.n_cols()), (3, 2));
        assert_eq!(t.get(2, 0), Interval::point(int(3)));
        assert_eq!(t.transpose(), f);
        let back = BipStepFunction::parse(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn real_mode_json() {
        let f = BipStepFunction::real(1, 2, vec![Interval::new(int(0), rat(1, 2)), Interval::point(int(-1))]).unwrap();
        assert_eq!(BipStepFunction::parse(&f.to_json()).unwrap(), f);
        assert_eq!(f.max_width(), rat(1, 2));
    }
}
