//! Diagnostic labels, subject records, cohort CSV ingestion, and the
//! synthetic-cohort generator.

mod cohort;
mod labels;
mod synthetic;

pub use cohort::{load_cohort, save_cohort, Cohort, Provenance, Subject};
pub use labels::{DiagnosticLabel, GroupLabel, Sex};
pub use synthetic::{
    default_atrophy_rules, generate_synthetic, paper_counts, paper_counts_spec, separable_spec,
    RegionBlock, SyntheticSpec, TemplateRules,
};
