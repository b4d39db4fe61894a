use std::fs;
use std::io::Read;

use posigraph::structures::{
    cycle, fano, grid, set_inclusion_graph, set_inclusion_rgraph, single_edge, star, subdivision_krr,
    BipartiteGraph, Hypergraph, HypergraphDocument,
};
use posigraph::{Error, Result};
use serde_json::Value;

/// A graph-like object read from a file or built from a name.
#[derive(Clone, Debug)]
pub enum Object {
    Hyper(HypergraphDocument),
    Bip(BipartiteGraph),
}

impl Object {
    pub fn to_value(&self) -> Value {
        match self {
            Object::Hyper(doc) => doc.to_value(),
            Object::Bip(b) => b.to_value(),
        }
    }

    /// Bipartite graphs become 2-graphs with the right side shifted up.
    pub fn hypergraph(&self) -> Hypergraph {
        match self {
            Object::Hyper(doc) => doc.graph.clone(),
            Object::Bip(b) => b.to_graph(),
        }
    }

    pub fn bipartite(&self) -> Result<BipartiteGraph> {
        match self {
            Object::Bip(b) => Ok(b.clone()),
            Object::Hyper(doc) => Ok(BipartiteGraph::from_graph(&doc.graph, None)?.0),
        }
    }
}

pub fn read_text(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::InvalidParameter(format!("reading stdin: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("reading {path}: {e}")))
    }
}

pub fn read_json(path: &str) -> Result<Value> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn object_from_value(value: &Value) -> Result<Object> {
    if value.get("left").is_some() {
        Ok(Object::Bip(BipartiteGraph::from_value(value)?))
    } else {
        Ok(Object::Hyper(HypergraphDocument::from_value(value)?))
    }
}

fn numbers(text: &str) -> Option<Vec<usize>> {
    text.split('-').map(|p| p.parse().ok()).collect()
}

/// Recognized names: `single-edge-R`, `grid-R`, `fano`, `cycle-N`, `star-K`,
/// `subdivision-Krr-R`, `set-inclusion-N-M-K`, `set-inclusion-graph-N-M-K`.
pub fn named(name: &str) -> Result<Option<Object>> {
    let lower = name.to_ascii_lowercase();
    let hyper = |g: Hypergraph| Some(Object::Hyper(HypergraphDocument::plain(g)));
    let one = |rest: &str| -> Result<usize> {
        match numbers(rest).as_deref() {
            Some([x]) => Ok(*x),
            _ => Err(Error::InvalidParameter(format!("cannot read the size in {name:?}"))),
        }
    };
    let three = |rest: &str| -> Result<(usize, usize, usize)> {
        match numbers(rest).as_deref() {
            Some([a, b, c]) => Ok((*a, *b, *c)),
            _ => Err(Error::InvalidParameter(format!("expected three sizes in {name:?}"))),
        }
    };
    Ok(if lower == "fano" {
        hyper(fano())
    } else if let Some(rest) = lower.strip_prefix("single-edge-") {
        let r = one(rest)?;
        if r == 0 {
            return Err(Error::InvalidParameter("single edge needs r >= 1".into()));
        }
        hyper(single_edge(r))
    } else if let Some(rest) = lower.strip_prefix("grid-") {
        hyper(grid(one(rest)?)?)
    } else if let Some(rest) = lower.strip_prefix("cycle-") {
        hyper(cycle(one(rest)?)?)
    } else if let Some(rest) = lower.strip_prefix("star-") {
        hyper(star(one(rest)?))
    } else if let Some(rest) = lower.strip_prefix("subdivision-krr-") {
        Some(Object::Bip(subdivision_krr(one(rest)?)?))
    } else if let Some(rest) = lower.strip_prefix("set-inclusion-graph-") {
        let (n, m, k) = three(rest)?;
        Some(Object::Bip(set_inclusion_graph(n, m, k)?))
    } else if let Some(rest) = lower.strip_prefix("set-inclusion-") {
        let (n, m, k) = three(rest)?;
        hyper(set_inclusion_rgraph(n, m, k)?)
    } else {
        None
    })
}

/// A name from [`named`], otherwise a JSON file (`-` for stdin).
pub fn load_object(source: &str) -> Result<Object> {
    match named(source)? {
        Some(obj) => Ok(obj),
        None => object_from_value(&read_json(source)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(load_object("grid-3").unwrap().hypergraph().n_edges(), 6);
        assert_eq!(load_object("Subdivision-Krr-3").unwrap().bipartite().unwrap().n_vertices(), 15);
        assert_eq!(load_object("set-inclusion-4-3-1").unwrap().hypergraph().n_edges(), 4);
        assert!(named("grid-x").is_err());
        assert!(named("petersen").unwrap().is_none());
    }
}
