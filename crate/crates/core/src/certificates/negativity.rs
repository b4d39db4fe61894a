use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::density::{density_sym, SymStepFunction};
use crate::error::{Error, Result};
use crate::homomorphism::{count_endomorphisms, odd_edges, weighted_hom_sum};
use crate::rational::{format_rational, int, Rational};
use crate::structures::io::get_rational;
use crate::structures::{Hypergraph, HypergraphDocument, WeightedHypergraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "odd-edge")]
    OddEdge,
    #[serde(rename = "grid-pipeline")]
    GridPipeline,
    #[serde(rename = "custom")]
    Custom,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::OddEdge => "odd-edge",
            Provenance::GridPipeline => "grid-pipeline",
            Provenance::Custom => "custom",
        }
    }
}

/// A weighted target whose total weighted homomorphism count from the
/// pattern is negative, which rules out positivity of the pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct NegativityCertificate {
    pub pattern: Hypergraph,
    pub target: WeightedHypergraph,
    pub sum: Rational,
    /// `sum / n(target)^{v(pattern)}`, the density against the tensorized target.
    pub density: Rational,
    pub provenance: Provenance,
    /// Provenance-specific data carried along verbatim.
    pub details: Option<Value>,
}

/// The symmetric step function on the target's vertices with the total
/// weight of each edge set on all orderings of that set and zero elsewhere.
pub fn tensorize(t: &WeightedHypergraph) -> SymStepFunction {
    let base = t.base();
    let mut f = SymStepFunction::zero(base.r(), base.n_vertices().max(1)).expect("positive arity");
    for (set, w) in t.weight_by_set() {
        f.set(&set, w).expect("edges lie inside the vertex set");
    }
    f
}

/// `n(target)^{v(pattern)}`.
fn map_total(pattern: &Hypergraph, target: &WeightedHypergraph) -> Rational {
    Rational::from_integer(num_traits::pow(
        BigInt::from(target.base().n_vertices()),
        pattern.n_vertices(),
    ))
}

impl NegativityCertificate {
    /// Computes the sum and density and rejects non-negative sums.
    pub fn build(
        pattern: Hypergraph,
        target: WeightedHypergraph,
        provenance: Provenance,
        details: Option<Value>,
    ) -> Result<Self> {
        let sum = weighted_hom_sum(&pattern, &target)?.value;
        Self::with_sum(pattern, target, sum, provenance, details)
    }

    /// Uses a sum computed elsewhere (for example in closed form).
    pub fn with_sum(
        pattern: Hypergraph,
        target: WeightedHypergraph,
        sum: Rational,
        provenance: Provenance,
        details: Option<Value>,
    ) -> Result<Self> {
        if !sum.is_negative() {
            return Err(Error::Precondition(format!(
                "weighted sum {} is not negative",
                format_rational(&sum)
            )));
        }
        let density = &sum / map_total(&pattern, &target);
        Ok(NegativityCertificate {
            pattern,
            target,
            sum,
            density,
            provenance,
            details,
        })
    }

    /// Recomputes the sum and the density from the pattern and target alone.
    pub fn verify(&self) -> Result<()> {
        let recomputed = weighted_hom_sum(&self.pattern, &self.target)?.value;
        if recomputed != self.sum {
            return Err(Error::Precondition(format!(
                "recorded sum {} differs from recomputed {}",
                format_rational(&self.sum),
                format_rational(&recomputed)
            )));
        }
        if !recomputed.is_negative() {
            return Err(Error::Precondition("weighted sum is not negative".into()));
        }
        let density = density_sym(&self.pattern, &tensorize(&self.target))?;
        if density != self.density || density != &recomputed / map_total(&self.pattern, &self.target) {
            return Err(Error::Precondition(format!(
                "recorded density {} differs from recomputed {}",
                format_rational(&self.density),
                format_rational(&density)
            )));
        }
        if self.provenance == Provenance::GridPipeline {
            crate::certificates::pipeline::check_details(self)?;
        }
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("provenance".into(), json!(self.provenance.as_str()));
        obj.insert("pattern".into(), HypergraphDocument::plain(self.pattern.clone()).to_value());
        obj.insert("target".into(), HypergraphDocument::from_weighted(&self.target).to_value());
        obj.insert("sum".into(), json!(format_rational(&self.sum)));
        obj.insert("density".into(), json!(format_rational(&self.density)));
        if let Some(d) = &self.details {
            obj.insert("details".into(), d.clone());
        }
        Value::Object(obj)
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }

    /// Parses without recomputing anything; call [`verify`](Self::verify).
    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::malformed("$", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(
                key.as_str(),
                "provenance" | "pattern" | "target" | "sum" | "density" | "details"
            ) {
                return Err(Error::malformed(format!("$.{key}"), "unknown field"));
            }
        }
        let field = |k: &str| obj.get(k).ok_or_else(|| Error::malformed("$", format!("missing field {k:?}")));
        let provenance: Provenance = serde_json::from_value(field("provenance")?.clone())
            .map_err(|e| Error::malformed("$.provenance", e.to_string()))?;
        let pattern = HypergraphDocument::from_value(field("pattern")?)
            .map_err(|e| Error::malformed("$.pattern", e.to_string()))?
            .graph;
        let target = HypergraphDocument::from_value(field("target")?)
            .and_then(HypergraphDocument::into_weighted)
            .map_err(|e| Error::malformed("$.target", e.to_string()))?;
        let sum = get_rational(field("sum")?, "$.sum")?;
        let density = get_rational(field("density")?, "$.density")?;
        Ok(NegativityCertificate {
            pattern,
            target,
            sum,
            density,
            provenance,
            details: obj.get("details").cloned(),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }
}

/// If `h` has an odd edge: weight `-1` on that edge set and `+1` on every
/// other edge set of `h`. Every endomorphism then weighs exactly `-1`.
pub fn odd_edge_certificate(h: &Hypergraph) -> Result<Option<NegativityCertificate>> {
    let odd = odd_edges(h);
    let Some(pos) = odd.iter().position(|&b| b) else {
        return Ok(None);
    };
    let sets: Vec<Vec<usize>> = h.edge_multiset().into_keys().collect();
    let chosen = &h.edges()[pos];
    let weights: Vec<Rational> = sets.iter().map(|s| if s == chosen { int(-1) } else { int(1) }).collect();
    let simple = Hypergraph::new(h.r(), h.n_vertices(), sets)?;
    let target = WeightedHypergraph::new(simple, weights)?;
    let details = json!({"odd_edge": pos, "edge": chosen});
    let cert = NegativityCertificate::build(h.clone(), target, Provenance::OddEdge, Some(details))?;
    let endos = count_endomorphisms(h);
    if cert.sum != -Rational::from_integer(endos.into()) {
        return Err(Error::Internal(format!(
            "odd-edge sum {} is not minus the {endos} endomorphisms",
            format_rational(&cert.sum)
        )));
    }
    debug_assert!(!cert.sum.is_zero());
    Ok(Some(cert))
}
