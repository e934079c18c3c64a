#![allow(dead_code)]

pub mod integrate;
pub mod nn;
pub mod pairs;
pub mod sequence_cases;
pub mod stats_cases;
