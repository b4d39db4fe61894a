//! Positivity and non-positivity certificates: stable involutions, odd
//! edges, quick necessary conditions, and the grid counterexample pipeline.

mod classifier;
mod conditions;
mod generator;
mod involution;
mod negativity;
mod pipeline;

pub use classifier::{grid_classifier, ClassificationStats};
pub use conditions::{necessary_conditions, Report, Verdict};
pub use generator::{greedy_linear_generator, random_linear_triangle_free};
pub use involution::{find_stable_involution, verify_stable_involution, StableInvolution};
pub use negativity::{odd_edge_certificate, tensorize, NegativityCertificate, Provenance};
pub use pipeline::{
    closed_form_sum, grid_pipeline, hom_constants, signed_box_square, ClassifierSummary, HomConstants,
    PipelineDetails, DIRECT_HOM_MAX, RETRY_CAP,
};
