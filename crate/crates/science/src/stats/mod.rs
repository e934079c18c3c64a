//! Descriptive statistics, regression, and 2x2 / RxC contingency-table
//! measures and tests. Results are returned to the caller and never stored.

mod contingency;
mod descriptive;
mod regression;
pub mod special;
mod table;

use serde::{Deserialize, Serialize};

pub use contingency::{
    chi_square_2x2, chi_square_gof, chi_square_rxc, cohens_kappa, gk_gamma, kendall_tau_a,
    kendall_tau_c, mcnemar, odds_ratio, phi_coefficient, proportion_difference, relative_risk,
    z_correlated_proportions, PairCounts, Table2x2Summary,
};
pub use descriptive::{descriptive, variance, Descriptive, Sample};
pub use regression::{linear_regression_pearson, Regression};
pub use table::{Table2x2, TableRxC};

/// Outcome of a hypothesis test. `p_value` is two-sided wherever a sign
/// applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Option<u32>,
    pub p_value: Option<f64>,
    pub method: String,
}
