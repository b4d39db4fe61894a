use std::fmt::Write as _;

use posigraph::certificates::{
    find_stable_involution, grid_pipeline, necessary_conditions, odd_edge_certificate, signed_box_square,
    tensorize, verify_stable_involution, NegativityCertificate, PipelineDetails, StableInvolution, Verdict,
};
use posigraph::decomposition::{decompose_seeded, rescale_odd, transfer_witness, TransferOptions, TransferRoute};
use posigraph::density::{density_bip, density_bip_interval, density_sym, BipStepFunction, SymStepFunction};
use posigraph::homomorphism::{count_homs, count_injective_homs, weighted_hom_sum};
use posigraph::rational::{approx, format_rational, Interval};
use posigraph::structures::{
    box_product, double, levi, BipartiteGraph, HypergraphDocument,
};
use posigraph::{Error, Result};
use serde_json::{json, Value};

use crate::input::{load_object, named, object_from_value, read_json, Object};

/// What a verb produced: machine JSON, a human report and an exit code.
pub struct Outcome {
    pub json: Value,
    pub report: String,
    pub code: u8,
}

impl Outcome {
    fn ok(json: Value, report: String) -> Self {
        Outcome { json, report, code: 0 }
    }
}

fn interval_json(i: &Interval) -> Value {
    json!({"lo": format_rational(&i.lo), "hi": format_rational(&i.hi)})
}

fn size(args: &[String], at: usize, what: &str) -> Result<usize> {
    args.get(at)
        .ok_or_else(|| Error::InvalidParameter(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{what} must be a nonnegative integer")))
}

pub fn construct(kind: &str, args: &[String], input: &str) -> Result<Outcome> {
    let obj = match kind {
        "levi" => {
            let source = args.first().map(String::as_str).unwrap_or(input);
            Object::Bip(levi(&load_object(source)?.hypergraph()))
        }
        "box-product" => {
            let [a, b] = args else {
                return Err(Error::InvalidParameter("box-product takes two objects".into()));
            };
            let bp = box_product(&load_object(a)?.hypergraph(), &load_object(b)?.hypergraph())?;
            Object::Hyper(HypergraphDocument {
                graph: bp.graph,
                weights: None,
                edge_types: Some(bp.edge_types),
            })
        }
        "signed-box-square" => {
            let source = args.first().map(String::as_str).unwrap_or(input);
            Object::Hyper(HypergraphDocument::from_weighted(&signed_box_square(
                &load_object(source)?.hypergraph(),
            )?))
        }
        "double" => {
            let source = args.first().map(String::as_str).unwrap_or(input);
            Object::Hyper(HypergraphDocument::plain(double(&load_object(source)?.hypergraph())))
        }
        "fano" => named("fano")?.expect("known name"),
        "set-inclusion" | "set-inclusion-graph" => {
            let (n, m, k) = (size(args, 0, "n")?, size(args, 1, "m")?, size(args, 2, "k")?);
            named(&format!("{kind}-{n}-{m}-{k}"))?.expect("known name")
        }
        "single-edge" | "grid" | "cycle" | "star" | "subdivision-krr" => {
            let x = size(args, 0, "size")?;
            named(&format!("{kind}-{x}"))?.expect("known name")
        }
        other => return Err(Error::InvalidParameter(format!("unknown object kind {other:?}"))),
    };
    let report = match &obj {
        Object::Hyper(d) => format!(
            "{kind}: {}-graph with {} vertices and {} edges",
            d.graph.r(),
            d.graph.n_vertices(),
            d.graph.n_edges()
        ),
        Object::Bip(b) => format!(
            "{kind}: bipartite graph with sides {} and {}, {} edges",
            b.n_left(),
            b.n_right(),
            b.edges().len()
        ),
    };
    Ok(Outcome::ok(obj.to_value(), report))
}

pub fn homcount(input: &str, target: &str) -> Result<Outcome> {
    let pattern = load_object(input)?.hypergraph();
    let target = load_object(target)?;
    match target {
        Object::Hyper(doc) if doc.weights.is_some() => {
            let t = doc.into_weighted()?;
            let sum = weighted_hom_sum(&pattern, &t)?;
            let report = format!(
                "{} homomorphisms, weighted sum {}",
                sum.hom_count,
                format_rational(&sum.value)
            );
            Ok(Outcome::ok(
                json!({"homomorphisms": sum.hom_count.to_string(), "weighted_sum": format_rational(&sum.value)}),
                report,
            ))
        }
        other => {
            let g = other.hypergraph();
            let homs = count_homs(&pattern, &g)?;
            let injective = count_injective_homs(&pattern, &g)?;
            Ok(Outcome::ok(
                json!({"homomorphisms": homs.to_string(), "injective": injective.to_string()}),
                format!("{homs} homomorphisms, {injective} injective"),
            ))
        }
    }
}

enum Step {
    Sym(SymStepFunction),
    Bip(BipStepFunction),
}

fn load_step(path: &str) -> Result<Step> {
    let value = read_json(path)?;
    if value.get("mode").is_some() {
        Ok(Step::Bip(BipStepFunction::from_value(&value)?))
    } else {
        Ok(Step::Sym(SymStepFunction::from_value(&value)?))
    }
}

pub fn density(input: &str, step: &str) -> Result<Outcome> {
    let obj = load_object(input)?;
    match load_step(step)? {
        Step::Sym(f) => {
            let d = density_sym(&obj.hypergraph(), &f)?;
            Ok(Outcome::ok(
                json!({"density": format_rational(&d)}),
                format!("t(H, h) = {} ~ {:e}", format_rational(&d), approx(&d)),
            ))
        }
        Step::Bip(f) => {
            let g: BipartiteGraph = obj.bipartite()?;
            if f.is_exact() {
                let d = density_bip(&g, &f)?;
                Ok(Outcome::ok(
                    json!({"density": format_rational(&d)}),
                    format!("t(G, f) = {} ~ {:e}", format_rational(&d), approx(&d)),
                ))
            } else {
                let d = density_bip_interval(&g, &f);
                Ok(Outcome::ok(
                    json!({"density": interval_json(&d)}),
                    format!("t(G, f) in [{:e}, {:e}]", approx(&d.lo), approx(&d.hi)),
                ))
            }
        }
    }
}

pub fn involution(input: &str) -> Result<Outcome> {
    let obj = load_object(input)?;
    let h = obj.hypergraph();
    let found = find_stable_involution(&h);
    let report = match &found {
        Some(s) => format!("stable involution: fixed {:?}, pairs {:?}", s.fixed, s.pairs),
        None => "no stable involution (exhaustive search)".to_string(),
    };
    let inv = match &found {
        Some(s) => serde_json::to_value(s)?,
        None => json!("none"),
    };
    Ok(Outcome::ok(
        json!({"pattern": HypergraphDocument::plain(h).to_value(), "involution": inv}),
        report,
    ))
}

pub fn certify(input: &str) -> Result<Outcome> {
    let h = load_object(input)?.hypergraph();
    let report = necessary_conditions(&h)?;
    let cert = odd_edge_certificate(&h)?;
    let mut text = String::new();
    match report.even_degree_vertex {
        Some(true) => writeln!(text, "even-degree vertex: present").unwrap(),
        Some(false) => writeln!(text, "even-degree vertex: absent, so not positive").unwrap(),
        None => writeln!(text, "even-degree vertex: not applicable for r = {}", h.r()).unwrap(),
    }
    match report.odd_edge {
        Some(e) => writeln!(text, "odd edge: position {e}, so not positive").unwrap(),
        None => writeln!(text, "odd edge: none").unwrap(),
    }
    match &report.stable_involution {
        Some(_) => writeln!(text, "stable involution: found, so positive").unwrap(),
        None => writeln!(text, "stable involution: none").unwrap(),
    }
    let verdict = serde_json::to_value(report.verdict)?;
    write!(text, "verdict: {}", verdict.as_str().unwrap_or_default()).unwrap();
    let code = u8::from(report.verdict == Verdict::NonPositiveCertified);
    Ok(Outcome {
        json: json!({
            "report": serde_json::to_value(&report)?,
            "certificate": cert.as_ref().map(NegativityCertificate::to_value),
        }),
        report: text,
        code,
    })
}

pub fn pipeline(r: usize, n: usize, seed: u64) -> Result<Outcome> {
    let cert = grid_pipeline(r, n, seed)?;
    let d = PipelineDetails::from_certificate(&cert)?;
    let mut text = String::new();
    writeln!(
        text,
        "generator: {} edges on {} vertices (seed {seed}, {} attempt(s))",
        d.edges, d.n, d.attempts
    )
    .unwrap();
    writeln!(
        text,
        "constants: c = {}, C = {}; classifier: {} single-edge images, 0 violations",
        d.constants.c, d.constants.big_c, d.classifier.single_edge
    )
    .unwrap();
    writeln!(text, "closed form: {}", d.closed_form).unwrap();
    match &d.direct {
        Some(v) => writeln!(text, "direct enumeration: {v} (agrees)").unwrap(),
        None => writeln!(text, "direct enumeration: skipped at this size").unwrap(),
    }
    write!(text, "density: {:e}", approx(&cert.density)).unwrap();
    Ok(Outcome::ok(cert.to_value(), text))
}

pub fn decompose(input: &str, seed: u64, bits: u32) -> Result<Outcome> {
    let Step::Sym(a) = load_step(input)? else {
        return Err(Error::InvalidParameter("decompose needs a symmetric step function".into()));
    };
    let d = decompose_seeded(&a, seed)?;
    let mut text = format!("{} rank-one terms for n = {}, r = {}", d.n_terms(), d.n(), d.r());
    if d.r() % 2 == 1 {
        let rescaled = rescale_odd(&d, bits)?;
        let err = rescaled.reconstruction_error(&a)?;
        write!(text, "; real reconstruction error at {bits} bits: {:e}", approx(&err)).unwrap();
    }
    Ok(Outcome::ok(d.to_value(), text))
}

pub fn transfer(input: &str, step: Option<&str>, seed: u64, bits: u32) -> Result<(Outcome, Option<Value>)> {
    let value = read_json_or_named(input)?;
    let (pattern, a) = match (value.get("provenance"), step) {
        (Some(_), None) => {
            let cert = NegativityCertificate::from_value(&value)?;
            let a = tensorize(&cert.target);
            (cert.pattern, a)
        }
        (_, Some(step)) => {
            let Step::Sym(a) = load_step(step)? else {
                return Err(Error::InvalidParameter("transfer needs a symmetric step function".into()));
            };
            (object_from_value(&value)?.hypergraph(), a)
        }
        (None, None) => {
            return Err(Error::InvalidParameter(
                "transfer needs --step unless the input is a negativity certificate".into(),
            ))
        }
    };
    let options = TransferOptions {
        bits,
        seed,
        ..TransferOptions::default()
    };
    let w = transfer_witness(&pattern, &a, options)?;
    let route = match w.route {
        TransferRoute::Direct => "direct",
        TransferRoute::Bound => "bound",
    };
    let json = json!({
        "pattern": HypergraphDocument::plain(pattern.clone()).to_value(),
        "levi": levi(&pattern).to_value(),
        "route": route,
        "bits": w.bits,
        "terms": w.decomposition.n_terms(),
        "exact_density": format_rational(&w.exact_density),
        "density": interval_json(&w.density),
    });
    let report = format!(
        "t(H, h) = {:e}; Levi density in [{:e}, {:e}] via the {route} route at {} bits, {} terms: the Levi graph is not positive",
        approx(&w.exact_density),
        approx(&w.density.lo),
        approx(&w.density.hi),
        w.bits,
        w.decomposition.n_terms()
    );
    Ok((Outcome::ok(json, report), Some(w.witness.to_value())))
}

fn read_json_or_named(source: &str) -> Result<Value> {
    match named(source)? {
        Some(obj) => Ok(obj.to_value()),
        None => read_json(source),
    }
}

pub fn verify(input: &str) -> Result<Outcome> {
    let value = read_json(input)?;
    let (kind, result) = if value.get("provenance").is_some() {
        let checked = NegativityCertificate::from_value(&value).and_then(|c| c.verify());
        ("negativity", checked)
    } else if let Some(inv) = value.get("involution") {
        let checked = (|| {
            let h = HypergraphDocument::from_value(
                value
                    .get("pattern")
                    .ok_or_else(|| Error::InvalidParameter("missing pattern".into()))?,
            )?
            .graph;
            if inv == "none" {
                return match find_stable_involution(&h) {
                    None => Ok(()),
                    Some(_) => Err(Error::Precondition("a stable involution exists".into())),
                };
            }
            let s: StableInvolution = serde_json::from_value(inv.clone())?;
            if verify_stable_involution(&h, &s) {
                Ok(())
            } else {
                Err(Error::Precondition("not a stable involution".into()))
            }
        })();
        ("involution", checked)
    } else {
        return Err(Error::InvalidParameter("unrecognized certificate file".into()));
    };
    Ok(match result {
        Ok(()) => Outcome::ok(json!({"kind": kind, "valid": true}), format!("{kind} certificate verified")),
        Err(e) => Outcome {
            json: json!({"kind": kind, "valid": false, "reason": e.to_string()}),
            report: format!("{kind} certificate rejected: {e}"),
            code: 2,
        },
    })
}
