pub mod fpalg;
pub mod group_engine;
pub mod skew_core;
pub mod enumeration;
pub mod structure_verify;
pub mod cli_reports;
