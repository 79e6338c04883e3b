//! Shared helpers for the integration tests: an independent finite-difference
//! eigenvalue oracle and seeded random problem generators.

#![allow(dead_code)]

pub mod gen;
pub mod oracle;
