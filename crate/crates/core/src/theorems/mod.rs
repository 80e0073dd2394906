//! Machine checks of the Weyl-tensor coincidence theorem and its supporting
//! identities.

pub mod algebra;
pub mod glue;
pub mod report;
pub mod suites;
pub mod transform;

pub use report::{CheckResult, Criterion, Verdict, VerificationReport};
pub use suites::{run_suite, RunConfig, Suite};
