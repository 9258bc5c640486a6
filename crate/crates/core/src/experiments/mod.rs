//! Monte Carlo experiments: effective sum-rates averaged over pathloss and
//! fading, effective gains over the cacheless baseline, and figure presets.

mod imperfect;
mod msv;
mod recipes;
mod report;
mod runner;
mod scenario;

pub use imperfect::{csir_series, run_imperfect_csi};
pub use msv::run_msv;
pub use recipes::{list_recipes, recipe, recipes, Recipe};
pub use report::{effective_gain, GainMode, Moments, RateCurve, RateReport, ReportRow, CSV_HEADER};
pub use runner::{run_experiment, run_vcc_bd_mrc, run_vcc_zf};
pub use scenario::{
    ExperimentKind, Pathloss, PowerPoint, PowerSweep, QChoice, RateCandidates, Scenario, Schemes,
    DEFAULT_FADINGS, DEFAULT_LOCATIONS,
};
