//! Non-compensatory level-of-satisfaction sorting.
//!
//! Evaluations from many evaluators, each with their own criteria and
//! weights, are pooled into credibility degrees against category floors
//! without any averaging. Alternatives are then sorted pessimistically,
//! swept over a grid of cut-levels, grouped by their credibility profiles,
//! and diagnosed per criterion through the mode of their raw grades.
//!
//! All arithmetic on grades, weights, credibility and cut-levels is exact.

pub mod config;
pub mod credibility;
pub mod decimal;
pub mod diagnostics;
pub mod error;
pub mod grouping;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod sensitivity;
pub mod sorting;

pub use credibility::{credibility_table, credibility_vector, local_concordance};
pub use diagnostics::{group_mode_table, mode, recommend, Action, GroupModeTable, Recommendation};
pub use error::{Error, Result, Stage, ValidationErrors, ValidationIssue};
pub use grouping::{apply_group_override, cluster_alternatives, GroupAssignment, Linkage};
pub use model::{
    to_doubled, validate_dataset, Alternative, BoundaryProfile, Category, CategorySet,
    CredibilityTable, CredibilityVector, Criterion, CutLevel, Dataset, DatasetParts,
    EvaluationRecord, Evaluator, Grade2x, Scale, Weight, WeightEntry,
};
pub use pipeline::{run_pipeline, run_until, ReportBundle, Target};
pub use sensitivity::{
    build_sensitivity_matrix, transition_profile, LambdaGrid, SensitivityMatrix, TransitionProfile,
};
pub use sorting::{assign_pessimistic, sort_all, Assignment};
