//! Command-line front end: system files, the orbit cache, run reports and
//! the check battery.

pub mod app;
pub mod cache;
pub mod check;
pub mod commands;
pub mod corpus;
pub mod polyparse;
pub mod report;
pub mod system;
