use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::certificates::classifier::grid_classifier;
use crate::certificates::generator::greedy_linear_generator;
use crate::certificates::negativity::{tensorize, NegativityCertificate, Provenance};
use crate::density::density_sym;
use crate::error::{Error, Result};
use crate::homomorphism::{count_homs, for_each_hom, weighted_hom_sum};
use crate::oracle;
use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::structures::{box_product, grid, single_edge, EdgeType, Hypergraph, WeightedHypergraph};

/// Largest predicted homomorphism count for which the pipeline also sums
/// over all homomorphisms directly.
pub const DIRECT_HOM_MAX: u128 = 5_000_000;
pub const RETRY_CAP: usize = 4;
const ORACLE_MAPS_MAX: u128 = 1_000_000;

/// Homomorphism counts of `grid(r)` into the box product of two single
/// edges, split by the shape of the image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomConstants {
    pub r: usize,
    /// Homomorphisms onto one fixed edge.
    pub c: u128,
    /// Homomorphisms onto the whole product grid.
    pub big_c: u128,
    /// Homomorphisms whose image is neither.
    pub other: u128,
}

static CONSTANTS: Mutex<BTreeMap<usize, HomConstants>> = Mutex::new(BTreeMap::new());

/// Brute-force counts, cached per `r`.
pub fn hom_constants(r: usize) -> Result<HomConstants> {
    if !(2..=5).contains(&r) {
        return Err(Error::InvalidParameter(format!("hom constants need 2 <= r <= 5, got {r}")));
    }
    if let Some(k) = CONSTANTS.lock().expect("cache lock").get(&r) {
        return Ok(*k);
    }
    let pattern = grid(r)?;
    let edge = single_edge(r);
    let c = count_homs(&pattern, &edge)?;
    if oracle::map_count(r, r * r).is_some_and(|m| m <= ORACLE_MAPS_MAX) && oracle::count_homs(&pattern, &edge) != c {
        return Err(Error::Internal(format!("c_{r} disagrees with the brute-force oracle")));
    }
    let product = box_product(&edge, &edge)?.graph;
    let mut single = 0u128;
    let mut full = 0u128;
    let mut other = 0u128;
    let mut images = Vec::with_capacity(pattern.n_edges());
    for_each_hom(&pattern, &product, |image| {
        images.clear();
        images.extend(pattern.edges().iter().map(|e| {
            let mut s: Vec<usize> = e.iter().map(|&v| image[v]).collect();
            s.sort_unstable();
            s
        }));
        images.sort_unstable();
        images.dedup();
        match images.len() {
            1 => single += 1,
            k if k == product.n_edges() => full += 1,
            _ => other += 1,
        }
        ControlFlow::Continue(())
    })?;
    if single != c * product.n_edges() as u128 {
        return Err(Error::Internal(format!(
            "single-edge images ({single}) are not c_{r} times the {} edges",
            product.n_edges()
        )));
    }
    let k = HomConstants {
        r,
        c,
        big_c: full,
        other,
    };
    CONSTANTS.lock().expect("cache lock").insert(r, k);
    Ok(k)
}

/// `2 c n e - C e^2`.
pub fn closed_form_sum(k: &HomConstants, n: usize, e: usize) -> BigInt {
    let (n, e) = (BigInt::from(n), BigInt::from(e));
    BigInt::from(2) * k.c * &n * &e - BigInt::from(k.big_c) * &e * &e
}

/// Classifier counts recorded in a pipeline certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub total: u128,
    pub single_edge: u128,
    pub iso_to_grid: u128,
    pub contains_triangle: u128,
}

/// Everything the pipeline learned on its way to the certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineDetails {
    pub r: usize,
    pub n: usize,
    pub seed: u64,
    /// Generator runs, including the successful one.
    pub attempts: usize,
    pub edges: usize,
    pub constants: HomConstants,
    pub closed_form: String,
    /// Present when the sum was also enumerated directly.
    pub direct: Option<String>,
    pub classifier: ClassifierSummary,
    /// Edges of the generated `G`; the target is `G □ G`.
    pub graph: Vec<Vec<usize>>,
}

impl PipelineDetails {
    pub fn from_certificate(cert: &NegativityCertificate) -> Result<Self> {
        let value = cert
            .details
            .as_ref()
            .ok_or_else(|| Error::malformed("$.details", "pipeline details missing"))?;
        serde_json::from_value(value.clone()).map_err(|e| Error::malformed("$.details", e.to_string()))
    }

    /// Rebuilds `G`.
    pub fn generated_graph(&self) -> Result<Hypergraph> {
        Hypergraph::new(self.r, self.n, self.graph.clone())
    }
}

/// `G □ G` with `+1` on horizontal and `-1` on vertical edges.
pub fn signed_box_square(g: &Hypergraph) -> Result<WeightedHypergraph> {
    let bp = box_product(g, g)?;
    let weights = bp
        .edge_types
        .iter()
        .map(|t| match t {
            EdgeType::Horizontal => int(1),
            EdgeType::Vertical => int(-1),
        })
        .collect();
    WeightedHypergraph::new(bp.graph, weights)?.with_edge_types(bp.edge_types)
}

/// Consistency of a pipeline certificate's details with its target and sum.
pub(crate) fn check_details(cert: &NegativityCertificate) -> Result<()> {
    let d = PipelineDetails::from_certificate(cert)?;
    let g = d.generated_graph()?;
    if g.n_edges() != d.edges || signed_box_square(&g)? != cert.target {
        return Err(Error::Precondition("target is not the signed box square of the recorded graph".into()));
    }
    if d.constants != hom_constants(d.r)? {
        return Err(Error::Precondition("recorded constants differ from recomputed ones".into()));
    }
    let closed = Rational::from_integer(closed_form_sum(&d.constants, d.n, d.edges));
    if parse_rational(&d.closed_form)? != closed || closed != cert.sum {
        return Err(Error::Precondition(format!(
            "closed form {} does not match the sum {}",
            format_rational(&closed),
            format_rational(&cert.sum)
        )));
    }
    Ok(())
}

/// Generator, classifier, closed form and (when small) direct enumeration,
/// ending in a negativity certificate for `grid(r)` with odd `r`.
pub fn grid_pipeline(r: usize, n: usize, seed: u64) -> Result<NegativityCertificate> {
    if r < 3 || r.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("grid pipeline needs odd r >= 3, got {r}")));
    }
    let k = hom_constants(r)?;
    if k.other != 0 {
        return Err(Error::Internal(format!("{} unexpected homomorphism images", k.other)));
    }
    let mut n = n.max(r);
    let mut attempts = 0;
    let g = loop {
        attempts += 1;
        let g = greedy_linear_generator(r, n, seed)?;
        if g.n_edges() as u128 * k.big_c > 2 * k.c * n as u128 {
            break g;
        }
        if attempts > RETRY_CAP {
            return Err(Error::GeneratorShortfall(format!(
                "{} edges on {n} vertices after {attempts} attempts; need more than {}n/{}",
                g.n_edges(),
                2 * k.c,
                k.big_c
            )));
        }
        n *= 2;
    };
    let stats = grid_classifier(&g, r)?;
    if !stats.violations.is_empty() || stats.iso_to_grid != 0 || stats.single_edge != k.c * g.n_edges() as u128 {
        return Err(Error::Internal(format!(
            "classifier on the generated graph: {} violations, {} grid images, {} single-edge images",
            stats.violations.len(),
            stats.iso_to_grid,
            stats.single_edge
        )));
    }
    let e = g.n_edges();
    let closed = Rational::from_integer(closed_form_sum(&k, n, e));
    let target = signed_box_square(&g)?;
    let pattern = grid(r)?;
    let predicted = 2 * k.c * (n * e) as u128 + k.big_c * (e * e) as u128;
    let direct = if predicted <= DIRECT_HOM_MAX {
        let sum = weighted_hom_sum(&pattern, &target)?;
        if sum.value != closed || sum.hom_count != predicted {
            return Err(Error::Internal(format!(
                "direct sum {} over {} homomorphisms, closed form {} over {predicted}",
                format_rational(&sum.value),
                sum.hom_count,
                format_rational(&closed)
            )));
        }
        Some(sum.value)
    } else {
        None
    };
    let details = PipelineDetails {
        r,
        n,
        seed,
        attempts,
        edges: e,
        constants: k,
        closed_form: format_rational(&closed),
        direct: direct.as_ref().map(format_rational),
        classifier: ClassifierSummary {
            total: stats.total,
            single_edge: stats.single_edge,
            iso_to_grid: stats.iso_to_grid,
            contains_triangle: stats.contains_triangle,
        },
        graph: g.edges().to_vec(),
    };
    let details = serde_json::to_value(details).expect("details serialize");
    let cert = NegativityCertificate::with_sum(pattern, target, closed, Provenance::GridPipeline, Some(details))?;
    if direct.is_some() && density_sym(&cert.pattern, &tensorize(&cert.target))? != cert.density {
        return Err(Error::Internal("step-function density differs from sum / n^v".into()));
    }
    Ok(cert)
}
