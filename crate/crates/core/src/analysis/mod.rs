//! Experiments on channel pairs: closed-form thresholds, optimal-input grid
//! searches, EA-region sweeps and the conjecture testers.
//!
//! Every function here is pure. Parallel entry points run on the caller's
//! rayon pool and return results in input order.

mod experiments;
mod formulas;
mod search;

pub use experiments::{
    conjecture1_batch, conjecture1_trial, conjecture2_scan, edge_lambda, singlet_output_lambda,
    strategy_compare, sweep, sweep_point, Conjecture2Point, ConjectureTrial, PairFamily,
    StrategyComparison, SweepRecord, CONJECTURE_ENV_DIM, TIGHT_TOL,
};
pub use formulas::{
    ad_pf_det_s1s2_zero, ad_pf_ea_check, clamp_threshold, depol_ad_det_difference,
    depol_ad_det_s1_zero, depol_ad_determinant_solutions, depol_ad_threshold,
    depol_pf_boundary, depol_pf_det_difference, depol_pf_det_s1_one,
    depol_pf_stationary_points, gad_boundary_gamma, S1Candidate, EB_PARAM_TOL,
};
pub use search::{default_form, grid, optimal_input_search, parse_grid, OutputPt, IMPROVEMENT_TOL};
