pub mod aig;
pub mod analysis;
pub mod analytics;
pub mod bench;
pub mod cli;
pub mod equiv;
pub mod generate;
pub mod netlist;
pub mod restructure;
pub mod search;
pub mod seed;
pub mod sop;
pub mod trojan;
pub mod tt;
