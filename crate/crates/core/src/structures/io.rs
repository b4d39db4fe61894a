//! JSON hypergraph documents:
//! `{"r": int, "n": int, "edges": [[int,...],...], "weights": ["p/q",...]?, "edge_types": ["h"|"v",...]?}`
//! and bipartite documents `{"left": int, "right": int, "edges": [[l, r],...]}`.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::structures::{BipartiteGraph, EdgeType, Hypergraph, WeightedHypergraph};

/// A parsed hypergraph document with its optional per-edge annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergraphDocument {
    pub graph: Hypergraph,
    pub weights: Option<Vec<Rational>>,
    pub edge_types: Option<Vec<EdgeType>>,
}

impl HypergraphDocument {
    pub fn plain(graph: Hypergraph) -> Self {
        HypergraphDocument {
            graph,
            weights: None,
            edge_types: None,
        }
    }

    pub fn from_weighted(w: &WeightedHypergraph) -> Self {
        HypergraphDocument {
            graph: w.base().clone(),
            weights: Some(w.weights().to_vec()),
            edge_types: w.edge_types().map(<[EdgeType]>::to_vec),
        }
    }

    /// Missing weights default to `+1` on every edge.
    pub fn into_weighted(self) -> Result<WeightedHypergraph> {
        let weights = self
            .weights
            .unwrap_or_else(|| vec![Rational::from_integer(1.into()); self.graph.n_edges()]);
        let w = WeightedHypergraph::new(self.graph, weights)?;
        match self.edge_types {
            Some(t) => w.with_edge_types(t),
            None => Ok(w),
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(Wire::from(self)).expect("document serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Wire::from(self)).expect("document serializes")
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        parse_document(value, "$")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }
}

#[derive(Serialize)]
struct Wire<'a> {
    r: usize,
    n: usize,
    edges: &'a [Vec<usize>],
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_types: Option<&'a [EdgeType]>,
}

impl<'a> From<&'a HypergraphDocument> for Wire<'a> {
    fn from(doc: &'a HypergraphDocument) -> Self {
        Wire {
            r: doc.graph.r(),
            n: doc.graph.n_vertices(),
            edges: doc.graph.edges(),
            weights: doc
                .weights
                .as_ref()
                .map(|w| w.iter().map(format_rational).collect()),
            edge_types: doc.edge_types.as_deref(),
        }
    }
}

pub fn parse(text: &str) -> Result<HypergraphDocument> {
    HypergraphDocument::parse(text)
}

pub fn serialize(graph: &Hypergraph) -> String {
    HypergraphDocument::plain(graph.clone()).to_json()
}

pub fn serialize_weighted(graph: &WeightedHypergraph) -> String {
    HypergraphDocument::from_weighted(graph).to_json()
}

impl BipartiteGraph {
    pub fn to_value(&self) -> Value {
        serde_json::json!({
            "left": self.n_left(),
            "right": self.n_right(),
            "edges": self.edges().iter().map(|&(l, r)| [l, r]).collect::<Vec<_>>(),
        })
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::malformed("$", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "left" | "right" | "edges") {
                return Err(Error::malformed(format!("$.{key}"), "unknown field"));
            }
        }
        let left = get_usize(value, "left", "$")?;
        let right = get_usize(value, "right", "$")?;
        let edges: Vec<(usize, usize)> = obj
            .get("edges")
            .map(|e| serde_json::from_value(e.clone()))
            .transpose()
            .map_err(|e| Error::malformed("$.edges", e.to_string()))?
            .ok_or_else(|| Error::malformed("$", "missing field \"edges\""))?;
        BipartiteGraph::new(left, right, edges)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }
}

pub(crate) fn get_usize(obj: &Value, key: &str, at: &str) -> Result<usize> {
    obj.get(key)
        .ok_or_else(|| Error::malformed(at, format!("missing field {key:?}")))?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::malformed(format!("{at}.{key}"), "expected a nonnegative integer"))
}

pub(crate) fn get_rational(value: &Value, at: &str) -> Result<Rational> {
    match value {
        Value::String(s) => parse_rational(s).map_err(|e| Error::malformed(at, e.to_string())),
        Value::Number(num) if num.is_i64() => Ok(Rational::from_integer(num.as_i64().unwrap().into())),
        _ => Err(Error::malformed(at, "expected a rational string \"p/q\"")),
    }
}

pub(crate) fn get_rational_array(value: &Value, at: &str) -> Result<Vec<Rational>> {
    value
        .as_array()
        .ok_or_else(|| Error::malformed(at, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| get_rational(v, &format!("{at}[{i}]")))
        .collect()
}

fn parse_document(value: &Value, at: &str) -> Result<HypergraphDocument> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::malformed(at, "expected an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "r" | "n" | "edges" | "weights" | "edge_types") {
            return Err(Error::malformed(format!("{at}.{key}"), "unknown field"));
        }
    }
    let r = get_usize(value, "r", at)?;
    let n = get_usize(value, "n", at)?;
    if r == 0 {
        return Err(Error::malformed(format!("{at}.r"), "uniformity must be at least 1"));
    }
    let raw_edges = obj
        .get("edges")
        .ok_or_else(|| Error::malformed(at, "missing field \"edges\""))?
        .as_array()
        .ok_or_else(|| Error::malformed(format!("{at}.edges"), "expected an array"))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (i, raw) in raw_edges.iter().enumerate() {
        let here = format!("{at}.edges[{i}]");
        let items = raw
            .as_array()
            .ok_or_else(|| Error::malformed(&here, "expected an array of vertices"))?;
        if items.len() != r {
            return Err(Error::malformed(
                &here,
                format!("expected {r} vertices, found {}", items.len()),
            ));
        }
        let mut edge = Vec::with_capacity(r);
        for (j, item) in items.iter().enumerate() {
            let v = item
                .as_u64()
                .ok_or_else(|| Error::malformed(format!("{here}[{j}]"), "expected a vertex index"))?
                as usize;
            if v >= n {
                return Err(Error::malformed(
                    format!("{here}[{j}]"),
                    format!("vertex {v} out of range (n = {n})"),
                ));
            }
            if edge.contains(&v) {
                return Err(Error::malformed(format!("{here}[{j}]"), format!("repeated vertex {v}")));
            }
            edge.push(v);
        }
        edges.push(edge);
    }
    let graph = Hypergraph::new(r, n, edges)?;
    let weights = match obj.get("weights") {
        None | Some(Value::Null) => None,
        Some(w) => {
            let w = get_rational_array(w, &format!("{at}.weights"))?;
            if w.len() != graph.n_edges() {
                return Err(Error::malformed(
                    format!("{at}.weights"),
                    format!("{} weights for {} edges", w.len(), graph.n_edges()),
                ));
            }
            Some(w)
        }
    };
    let edge_types = match obj.get("edge_types") {
        None | Some(Value::Null) => None,
        Some(t) => {
            let types: Vec<EdgeType> = serde_json::from_value(t.clone())
                .map_err(|e| Error::malformed(format!("{at}.edge_types"), e.to_string()))?;
            if types.len() != graph.n_edges() {
                return Err(Error::malformed(
                    format!("{at}.edge_types"),
                    "edge type count does not match edge count",
                ));
            }
            Some(types)
        }
    };
    Ok(HypergraphDocument {
        graph,
        weights,
        edge_types,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn bipartite_round_trip() {
        let b = crate::structures::subdivision_krr(2).unwrap();
        assert_eq!(BipartiteGraph::parse(&b.to_json()).unwrap(), b);
        assert!(BipartiteGraph::parse(r#"{"left":1,"right":1,"edges":[[0,1]]}"#).is_err());
    }

    #[test]
    fn parses_single_edge() {
        let doc = parse(r#"{"r":3,"n":3,"edges":[[0,1,2]]}"#).unwrap();
        assert_eq!(doc.graph, crate::structures::single_edge(3));
        assert!(doc.weights.is_none());
    }

    #[test]
    fn parses_rational_weights_and_duplicates() {
        let doc = parse(r#"{"r":2,"n":2,"edges":[[0,1],[1,0]],"weights":["−1","1/2"]}"#).unwrap();
        assert_eq!(doc.weights, Some(vec![int(-1), rat(1, 2)]));
        assert_eq!(doc.graph.edge_multiset()[&vec![0, 1]], 2);
    }

    #[test]
    fn reports_positions() {
        let err = parse(r#"{"r":2,"n":2,"edges":[[0,1],[0,5]]}"#).unwrap_err();
        assert!(err.to_string().contains("edges[1][1]"), "{err}");
        let err = parse(r#"{"r":3,"n":4,"edges":[[0,1]]}"#).unwrap_err();
        assert!(err.to_string().contains("expected 3 vertices"), "{err}");
        let err = parse("{\"r\":2,\n\"n\":2,\n\"edges\":[[0,1]").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err:?}");
        let err = parse(r#"{"r":2,"n":2,"edges":[[0,1]],"weights":["x"]}"#).unwrap_err();
        assert!(err.to_string().contains("weights[0]"), "{err}");
    }

    #[test]
    fn serializes_compactly_with_types() {
        let b = crate::structures::box_product(
            &crate::structures::single_edge(2),
            &crate::structures::single_edge(2),
        )
        .unwrap();
        let doc = HypergraphDocument {
            graph: b.graph,
            weights: Some(vec![int(1), int(1), int(-1), rat(-1, 2)]),
            edge_types: Some(b.edge_types),
        };
        let text = doc.to_json();
        assert_eq!(
            text,
            r#"{"r":2,"n":4,"edges":[[0,2],[1,3],[0,1],[2,3]],"weights":["1","1","-1","-1/2"],"edge_types":["h","h","v","v"]}"#
        );
        assert_eq!(parse(&text).unwrap(), doc);
    }
}
