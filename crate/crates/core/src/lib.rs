//! Counterfactual regret minimization with baseline-corrected sampled values.
//!
//! The crate materializes small two-player zero-sum extensive-form games
//! ([`game`], [`games`]) and solves them with full-walk CFR/CFR+
//! ([`solver`]) or Monte Carlo CFR under outcome sampling ([`os`]) and
//! public outcome sampling ([`pos`]). Sampled values are corrected with a
//! per-(history, action) baseline ([`baselines`]); [`variance`] measures and
//! bounds the variance those baselines leave, and [`experiment`] drives
//! multi-seed runs that write CSV metrics.

pub mod baselines;
pub mod experiment;
pub mod game;
pub mod games;
pub mod os;
pub mod pos;
pub mod sampling;
pub mod solver;
pub mod variance;

pub use game::{GameTree, Player, StrategyProfile};
