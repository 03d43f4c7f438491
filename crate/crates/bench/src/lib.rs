//! Random instance generation, strategy benchmarking, SVG timelines and the
//! `divload` command line.

pub mod bench;
pub mod cli;
pub mod gantt;
pub mod gen;
