//! Privacy and correctness auditing: exact enumeration at tiny sizes and
//! Monte Carlo at realistic ones.

use thiserror::Error;

pub mod enumerate;
pub mod info;
pub mod montecarlo;
pub mod report;

pub use enumerate::{enumerate_joint, JointDistribution, TinyConfig, DEFAULT_BUDGET};
pub use info::{conditional_mi, mutual_information, Given, Var};
pub use montecarlo::{monte_carlo_stats, McStats};
pub use report::{announcement_tv, privacy_report, AnnouncementTv, PrivacyReport, PRIVACY_THRESHOLD};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("enumeration needs up to {bound:.3e} atoms, budget is {budget:.3e}")]
    Budget { bound: f64, budget: f64 },
    #[error("invalid tiny configuration: {0}")]
    Config(String),
    #[error("conditioning event has zero probability")]
    ZeroProbability,
}
