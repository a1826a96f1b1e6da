pub mod bootstrap;
pub mod chain;
pub mod cli;
pub mod constants;
pub mod exact;
pub mod falsify;
pub mod report;
