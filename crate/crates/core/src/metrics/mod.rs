//! Trotter error metrics, spectral descriptors and the T-gate cost model.

pub mod commutators;
pub mod descriptors;
pub mod report;
pub mod tgate;

pub use commutators::{
    alpha, alpha_ordered, alpha_ordered_with, alpha_projected, alpha_pruned, dense_commutator_norm,
    project_all, MetricOptions, PairSum,
};
pub use descriptors::{
    l1_bound, second_order_estimate, spectral_descriptors, FragmentSpectrum, SpectralDescriptors,
};
pub use report::{
    build_report, reports_to_csv, sector_name, ReportInput, TrotterReport, CSV_COLUMNS,
};
pub use tgate::{tgate_cost, tgate_count, ErrorSplit, TgateEstimate};
