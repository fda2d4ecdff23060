//! Regret accumulation, regret matching and full-walk CFR/CFR+.

mod cfr;
mod regret;

pub(crate) use cfr::apply_exact_iteration;
pub use cfr::{counterfactual_regrets, run_cfr, CfrConfig, CfrSolver};
pub use regret::{regret_matching, regret_matching_into, RegretTable, StrategyAveraging};
