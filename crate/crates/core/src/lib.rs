//! Latency and cost of distributed jobs that add redundant tasks or
//! relaunch stragglers.
//!
//! [`analytic`] holds the closed forms, [`simulator`] the Monte Carlo
//! oracle, [`trace`] the event-log ingestion and [`sweep`] the cost/latency
//! curves and CSV output used by the `straggler` command-line tool.

pub mod analytic;
pub mod distributions;
pub mod quadrature;
pub mod simulator;
pub mod specialfn;
pub mod sweep;
pub mod trace;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/zero-delay.md")]
    mod zero_delay {}
    #[doc = include_str!("../../../book/src/relaunch.md")]
    mod relaunch {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
}
