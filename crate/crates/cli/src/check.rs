use posigraph::density::{density_bip, density_sym};
use posigraph::homomorphism::{count_homs, count_injective_homs, weighted_hom_sum};
use posigraph::oracle;
use posigraph::structures::BipartiteGraph;
use posigraph::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::Outcome;

/// One random round of engine-versus-oracle comparisons; returns the names
/// of the comparisons that disagreed.
fn round(rng: &mut ChaCha8Rng) -> Result<Vec<&'static str>> {
    let mut failed = Vec::new();
    let r = rng.gen_range(2..=3);
    let hn = rng.gen_range(r..=4);
    let hm = rng.gen_range(1..=3);
    let h = oracle::random_hypergraph(rng, r, hn, hm);
    let gn = rng.gen_range(r..=4);
    let gm = rng.gen_range(1..=4);
    let t = oracle::random_weighted(rng, r, gn, gm);
    let g = t.base();
    if count_homs(&h, g)? != oracle::count_homs(&h, g) {
        failed.push("count_homs");
    }
    if count_injective_homs(&h, g)? != oracle::count_injective_homs(&h, g) {
        failed.push("count_injective_homs");
    }
    if weighted_hom_sum(&h, &t)?.value != oracle::weighted_hom_sum(&h, &t) {
        failed.push("weighted_hom_sum");
    }
    let parts = rng.gen_range(1..=3);
    let f = oracle::random_sym(rng, r, parts);
    if density_sym(&h, &f)? != oracle::density_sym(&h, &f) {
        failed.push("density_sym");
    }
    let (nl, nr) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let edges = (0..nl)
        .flat_map(|i| (0..nr).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(0.5))
        .collect::<Vec<_>>();
    let b = BipartiteGraph::new(nl, nr, edges)?;
    let (rows, cols) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let f = oracle::random_bip(rng, rows, cols);
    if density_bip(&b, &f)? != oracle::density_bip(&b, &f) {
        failed.push("density_bip");
    }
    Ok(failed)
}

/// `budget` rounds; exit code 4 on any disagreement.
pub fn check(budget: usize, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures: Vec<Value> = Vec::new();
    for i in 0..budget {
        for name in round(&mut rng)? {
            failures.push(json!({"round": i, "check": name}));
        }
    }
    let report = if failures.is_empty() {
        format!("{budget} rounds, 5 comparisons each: all agree with the oracle")
    } else {
        format!("{budget} rounds: {} disagreements with the oracle", failures.len())
    };
    let code = if failures.is_empty() { 0 } else { 4 };
    Ok(Outcome {
        json: json!({"rounds": budget, "seed": seed, "failures": failures}),
        report,
        code,
    })
}
