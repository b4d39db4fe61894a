use serde::{Deserialize, Serialize};

use crate::certificates::involution::{find_stable_involution, StableInvolution};
use crate::error::{Error, Result};
use crate::homomorphism::odd_edges;
use crate::structures::Hypergraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "positive-certified")]
    PositiveCertified,
    #[serde(rename = "non-positive-certified")]
    NonPositiveCertified,
    #[serde(rename = "unknown")]
    Unknown,
}

/// Outcome of the quick positivity checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    /// Whether some vertex has even degree; `None` when the condition does
    /// not apply (even `r > 2`).
    pub even_degree_vertex: Option<bool>,
    /// First odd edge position, if any.
    pub odd_edge: Option<usize>,
    pub stable_involution: Option<StableInvolution>,
    pub verdict: Verdict,
}

/// Even-degree vertex (necessary for positivity when `r = 2` or `r` is
/// odd), odd edge (rules positivity out), stable involution (proves it).
pub fn necessary_conditions(h: &Hypergraph) -> Result<Report> {
    let r = h.r();
    let even_degree_vertex = (r == 2 || r % 2 == 1).then(|| h.degrees().iter().any(|d| d % 2 == 0));
    let odd_edge = odd_edges(h).iter().position(|&b| b);
    let stable_involution = find_stable_involution(h);
    let negative = odd_edge.is_some() || even_degree_vertex == Some(false);
    let verdict = match (negative, stable_involution.is_some()) {
        (true, true) => {
            return Err(Error::Internal(
                "a stable involution coexists with a non-positivity witness".into(),
            ))
        }
        (true, false) => Verdict::NonPositiveCertified,
        (false, true) => Verdict::PositiveCertified,
        (false, false) => Verdict::Unknown,
    };
    Ok(Report {
        even_degree_vertex,
        odd_edge,
        stable_involution,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{cycle, star, subdivision_krr};

    #[test]
    fn star_fails_degree_condition() {
        let rep = necessary_conditions(&star(3)).unwrap();
        assert_eq!(rep.even_degree_vertex, Some(false));
        assert_eq!(rep.verdict, Verdict::NonPositiveCertified);
    }

    #[test]
    fn cycle_is_certified_positive() {
        let rep = necessary_conditions(&cycle(4).unwrap()).unwrap();
        assert_eq!(rep.verdict, Verdict::PositiveCertified);
        assert_eq!(rep.even_degree_vertex, Some(true));
    }

    #[test]
    fn subdivided_k33_is_open_to_quick_checks() {
        let rep = necessary_conditions(&subdivision_krr(3).unwrap().to_graph()).unwrap();
        assert_eq!(rep.even_degree_vertex, Some(true));
        assert_eq!(rep.verdict, Verdict::Unknown);
    }
}
