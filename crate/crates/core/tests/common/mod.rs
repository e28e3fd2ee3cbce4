//! Independent reference values for the integration tests.
#![allow(dead_code)]

pub mod oracle;
