//! Configuration files and run outputs.

pub mod config;
pub mod output;
pub mod shipped;
