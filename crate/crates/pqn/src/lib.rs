//! Verification suites, reports and trajectory export on top of `pqn-core`.

pub mod controls;
pub mod flows;
pub mod oracle;
pub mod report;
pub mod sampling;
pub mod suites;
