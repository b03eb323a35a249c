//! Evaluation metric, statistical suites, density plots and the batch runner.

mod experiment;
mod gamma;
mod heatmap;
mod norms;
mod suites;

pub use experiment::{
    run_experiment, summarize_point, CensorOverrides, EigenOverrides, ExperimentConfig, ExperimentReport,
    GammaQuantiles, GridConfig, ModelConfig, MultiBlockOverrides, NormOverrides, Pipeline, PointSummary,
    TrialRecord, TwoBlockOverrides,
};
pub use gamma::{gamma_correctness, GammaReport};
pub use heatmap::{density_heatmap, Heatmap};
pub use norms::{
    expected_eigenspace, expected_lambda_k, norm_trial, verify_norm_bounds, verify_norm_bounds_with, NormOptions,
    NormReport, NormTrial,
};
pub use suites::{
    correction_suite_two, corrupt_partition, multi_stage_suite, projection_suite, CorrectionTrial, MultiStageTrial,
    ProjectionTrial,
};
